#include "pmf/ntt.hpp"

#include <stdexcept>

namespace pmf {
namespace {

u64 mulmod64(u64 a, u64 b, u64 m) { return u64((u128(a) * b) % m); }

u64 powmod64(u64 a, u64 e, u64 m) {
  u64 r = 1;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod64(r, a, m);
    a = mulmod64(a, a, m);
    e >>= 1;
  }
  return r;
}

bool is_prime64(u64 n) {
  if (n < 2) return false;
  for (u64 q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % q == 0) return n == q;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) d >>= 1, ++s;
  for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    u64 x = powmod64(a % n, d, n);
    if (x <= 1 || x == n - 1) continue;
    bool witness = true;
    for (int i = 0; i + 1 < s; ++i) {
      x = mulmod64(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

}  // namespace

NttPlan::NttPlan() {
  // primes c*2^24 + 1 just below 2^62, with primitive roots; product > 2^300
  constexpr int kShift = 24;
  u64 c = (u64(1) << 62) / (u64(1) << kShift);
  while (primes_.size() < 5) {
    u64 q = (c << kShift) + 1;
    if (is_prime64(q)) {
      // find generator: factor q-1 = c * 2^24 by trial division of c
      std::vector<u64> fac = {2};
      u64 m = c;
      for (u64 d = 3; d * d <= m; d += 2) {
        if (m % d == 0) {
          fac.push_back(d);
          while (m % d == 0) m /= d;
        }
      }
      if (m > 1) fac.push_back(m);
      u64 g = 0;
      for (u64 cand = 2; cand < 1000; ++cand) {
        bool ok = true;
        for (u64 f : fac) {
          if (powmod64(cand, (q - 1) / f, q) == 1) {
            ok = false;
            break;
          }
        }
        if (ok) {
          g = cand;
          break;
        }
      }
      if (g) {
        primes_.push_back(q);
        gens_.push_back(g);
      }
    }
    --c;
  }
}

const NttPlan& NttPlan::instance() {
  static NttPlan plan;
  return plan;
}

void NttPlan::transform(std::vector<u64>& a, u64 q, u64 g, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    u64 w = powmod64(g, (q - 1) / len, q);
    if (inverse) w = powmod64(w, q - 2, q);
    for (std::size_t i = 0; i < n; i += len) {
      u64 wn = 1;
      for (std::size_t j = 0; j < len / 2; ++j) {
        u64 u = a[i + j];
        u64 v = mulmod64(a[i + j + len / 2], wn, q);
        a[i + j] = u + v < q ? u + v : u + v - q;
        a[i + j + len / 2] = u >= v ? u - v : u + q - v;
        wn = mulmod64(wn, w, q);
      }
    }
  }
  if (inverse) {
    u64 ninv = powmod64(u64(n % q), q - 2, q);
    for (auto& x : a) x = mulmod64(x, ninv, q);
  }
}

std::vector<u128> ntt_multiply(const ZRing& ring, const std::vector<u128>& a,
                               const std::vector<u128>& b, std::size_t out_len) {
  const NttPlan& plan = NttPlan::instance();
  if (a.empty() || b.empty() || out_len == 0) return std::vector<u128>(out_len, ring.zero());
  std::size_t full = std::min(out_len, a.size() + b.size() - 1);
  std::size_t n = 1;
  while (n < a.size() + b.size() - 1) n <<= 1;
  if (n > (std::size_t(1) << 24)) throw Error("ntt_multiply: length too large");

  const int K = int(plan.primes().size());
  std::vector<std::vector<u64>> res(K);
  for (int k = 0; k < K; ++k) {
    u64 q = plan.primes()[k], g = plan.gens()[k];
    std::vector<u64> fa(n, 0), fb(n, 0);
    for (std::size_t i = 0; i < a.size(); ++i) fa[i] = u64(ring.to_plain(a[i]) % q);
    for (std::size_t i = 0; i < b.size(); ++i) fb[i] = u64(ring.to_plain(b[i]) % q);
    NttPlan::transform(fa, q, g, false);
    NttPlan::transform(fb, q, g, false);
    for (std::size_t i = 0; i < n; ++i) fa[i] = mulmod64(fa[i], fb[i], q);
    NttPlan::transform(fa, q, g, true);
    fa.resize(n);
    res[k] = std::move(fa);
  }

  // mixed-radix CRT: x = d0 + q0*(d1 + q1*(d2 + q2*(d3 + q3*d4)))
  const auto& Q = plan.primes();
  // precompute inverses inv[j][i] = Q[i]^{-1} mod Q[j] for i < j
  u64 inv[8][8];
  for (int j = 0; j < K; ++j)
    for (int i = 0; i < j; ++i) inv[j][i] = powmod64(Q[i] % Q[j], Q[j] - 2, Q[j]);

  std::vector<u128> qmont(K);
  for (int k = 0; k < K; ++k) qmont[k] = ring.from_plain(Q[k]);

  std::vector<u128> out(out_len, ring.zero());
  std::vector<u64> d(K);
  for (std::size_t i = 0; i < full; ++i) {
    for (int j = 0; j < K; ++j) {
      u64 x = res[j][i];
      for (int t = 0; t < j; ++t) {
        u64 diff = x >= d[t] % Q[j] ? x - d[t] % Q[j] : x + Q[j] - d[t] % Q[j];
        x = mulmod64(diff, inv[j][t], Q[j]);
      }
      d[j] = x;
    }
    u128 acc = ring.from_plain(d[K - 1]);
    for (int j = K - 2; j >= 0; --j)
      acc = ring.add(ring.mul(acc, qmont[j]), ring.from_plain(d[j]));
    out[i] = acc;
  }
  return out;
}

}  // namespace pmf
