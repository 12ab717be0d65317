#include "pmf/dirichlet.hpp"

#include <algorithm>
#include <numeric>

namespace pmf {

namespace {

std::vector<bigint> poly_mul_z(const std::vector<bigint>& a, const std::vector<bigint>& b) {
  std::vector<bigint> c(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  }
  return c;
}

std::vector<bigint> poly_div_exact(std::vector<bigint> a, const std::vector<bigint>& b) {
  std::vector<bigint> q(a.size() - b.size() + 1, 0);
  for (int i = int(a.size()) - 1; i >= int(b.size()) - 1; --i) {
    bigint c = a[i];
    if (c == 0) continue;
    int shift = i - int(b.size()) + 1;
    q[shift] = c;
    for (std::size_t j = 0; j < b.size(); ++j) a[shift + j] -= c * b[j];
  }
  for (auto& x : a)
    if (x != 0) throw Error("poly_div_exact: division not exact");
  return q;
}

u64 powmod_u64(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = u64((u128(r) * a) % m);
    a = u64((u128(a) * a) % m);
    e >>= 1;
  }
  return r;
}

// CRT lift: x ≡ a mod m1, x ≡ 1 mod m2 (m1, m2 coprime)
u64 crt_lift(u64 a, u64 m1, u64 m2) {
  for (u64 x = 1; x < m1 * m2; ++x)
    if (x % m1 == a % m1 && x % m2 == 1 % std::max<u64>(m2, 2)) return x;
  if (m2 == 1) return a % m1;
  throw Error("crt_lift failed");
}

}  // namespace

std::vector<bigint> cyclotomic_polynomial(u64 n) {
  std::vector<bigint> num(n + 1, 0);
  num[0] = -1;
  num[n] = 1;
  for (u64 d = 1; d < n; ++d) {
    if (n % d != 0) continue;
    num = poly_div_exact(num, cyclotomic_polynomial(d));
  }
  return num;
}

CycloRing::CycloRing(u64 E) : E_(std::max<u64>(E, 1)) {
  phi_ = cyclotomic_polynomial(E_);
  deg_ = int(phi_.size()) - 1;
}

std::vector<bigint> CycloRing::one() const {
  auto v = zero();
  v[0] = 1;
  return v;
}

std::vector<bigint> CycloRing::reduce(std::vector<bigint> a) const {
  for (int i = int(a.size()) - 1; i >= deg_; --i) {
    bigint c = a[i];
    if (c == 0) continue;
    a[i] = 0;
    for (int j = 0; j < deg_; ++j) a[i - deg_ + j] -= c * phi_[j];
  }
  a.resize(deg_, 0);
  return a;
}

std::vector<bigint> CycloRing::zeta_pow(u64 t) const {
  t %= E_;
  std::vector<bigint> cur(t + 1, 0);
  cur[t] = 1;
  return reduce(std::move(cur));
}

std::vector<bigint> CycloRing::add(const std::vector<bigint>& a,
                                   const std::vector<bigint>& b) const {
  auto c = a;
  for (int i = 0; i < deg_; ++i) c[i] += b[i];
  return c;
}

std::vector<bigint> CycloRing::mul(const std::vector<bigint>& a,
                                   const std::vector<bigint>& b) const {
  return reduce(poly_mul_z(a, b));
}

std::vector<bigint> CycloRing::scale(const std::vector<bigint>& a, const bigint& c) const {
  auto b = a;
  for (auto& x : b) x *= c;
  return b;
}

bool CycloRing::is_zero(const std::vector<bigint>& a) const {
  for (const auto& x : a)
    if (x != 0) return false;
  return true;
}

std::vector<std::vector<bigint>> CycloRing::zeta_mult_matrix(u64 t) const {
  auto z = zeta_pow(t);
  std::vector<std::vector<bigint>> M(deg_, std::vector<bigint>(deg_, 0));
  for (int i = 0; i < deg_; ++i) {
    auto xi = zero();
    xi[i] = 1;
    auto col = mul(z, xi);
    for (int j = 0; j < deg_; ++j) M[j][i] = col[j];
  }
  return M;
}

std::vector<bigint> CycloRing::trace_row(u64 j) const {
  std::vector<bigint> row(deg_, 0);
  for (int i = 0; i < deg_; ++i) {
    // trace(zeta^j * x^i) = sum of Galois conjugates zeta^{c(j+i)}; the sum is
    // Galois invariant, hence rational: read the constant coordinate
    std::vector<bigint> acc = zero();
    for (u64 c = 1; c <= E_; ++c) {
      if (std::gcd(c, E_) != 1) continue;
      acc = add(acc, zeta_pow((c * (j + u64(i))) % E_));
    }
    for (int t = 1; t < deg_; ++t)
      if (acc[t] != 0) throw Error("trace_row: non-rational trace (internal)");
    row[i] = acc[0];
  }
  return row;
}

UnitGroup::UnitGroup(u64 n) : N(n) {
  dlog.assign(std::max<u64>(N, 1), {});
  if (N <= 2) {
    exponent = 1;
    if (N == 2) dlog[1] = {};
    return;
  }
  std::vector<std::pair<u64, int>> fac;
  u64 m = N;
  for (u64 d = 2; d * d <= m; ++d)
    if (m % d == 0) {
      int e = 0;
      while (m % d == 0) m /= d, ++e;
      fac.emplace_back(d, e);
    }
  if (m > 1) fac.emplace_back(m, 1);

  for (auto [q, e] : fac) {
    u64 qe = 1;
    for (int i = 0; i < e; ++i) qe *= q;
    u64 rest = N / qe;
    if (q == 2) {
      if (e == 1) continue;
      gens.push_back(crt_lift(qe - 1, qe, rest));
      orders.push_back(2);
      if (e >= 3) {
        gens.push_back(crt_lift(5, qe, rest));
        orders.push_back(qe / 4);
      }
      continue;
    }
    u64 phi = qe / q * (q - 1);
    std::vector<u64> pf;
    u64 t = phi;
    for (u64 d = 2; d * d <= t; ++d)
      if (t % d == 0) {
        pf.push_back(d);
        while (t % d == 0) t /= d;
      }
    if (t > 1) pf.push_back(t);
    u64 g = 0;
    for (u64 cand = 2; cand < qe; ++cand) {
      if (cand % q == 0) continue;
      bool ok = true;
      for (u64 f : pf)
        if (powmod_u64(cand, phi / f, qe) == 1) {
          ok = false;
          break;
        }
      if (ok) {
        g = cand;
        break;
      }
    }
    gens.push_back(crt_lift(g, qe, rest));
    orders.push_back(phi);
  }

  exponent = 1;
  for (u64 o : orders) exponent = std::lcm(exponent, o);

  u64 total = 1;
  for (u64 o : orders) total *= o;
  for (u64 cnt = 0; cnt < total; ++cnt) {
    std::vector<u64> tup(gens.size());
    u64 rem = cnt;
    u64 v = 1 % N;
    for (std::size_t i = 0; i < gens.size(); ++i) {
      tup[i] = rem % orders[i];
      rem /= orders[i];
      v = u64((u128(v) * powmod_u64(gens[i], tup[i], N)) % N);
    }
    dlog[v] = tup;
  }
  dlog[1] = std::vector<u64>(gens.size(), 0);
}

DirichletChar::DirichletChar(const UnitGroup* G, std::vector<u64> exps)
    : G_(G), exps_(std::move(exps)) {
  const u64 N = G_->N, E = G_->exponent;
  trivial_ = true;
  for (u64 e : exps_)
    if (e % E != 0) trivial_ = false;
  odd_ = false;
  if (N > 2) {
    auto v = value_exp(-1);
    odd_ = v && (*v % E) != 0;
  }
  conductor_ = N;
  for (u64 f = 1; f <= N; ++f) {
    if (N % f != 0) continue;
    bool ok = true;
    for (u64 r = 1; r < N && ok; ++r) {
      if (std::gcd(r, N) != 1) continue;
      if (f == 1 || r % f == 1) {
        auto v = value_exp((long long)r);
        if (!v || *v % E != 0) ok = false;
      }
    }
    if (ok) {
      conductor_ = f;
      break;
    }
  }
}

std::optional<u64> DirichletChar::value_exp(long long n) const {
  const u64 N = G_->N, E = G_->exponent;
  if (N == 1) return 0;
  long long r = n % (long long)N;
  if (r < 0) r += N;
  if (r == 0 || std::gcd(u64(r), N) != 1) return std::nullopt;
  const auto& tup = G_->dlog[r];
  u64 acc = 0;
  for (std::size_t i = 0; i < tup.size(); ++i) acc = u64((acc + u128(exps_[i]) * tup[i]) % E);
  return acc;
}

std::optional<u64> DirichletChar::value_exp_primitive(long long n) const {
  const u64 N = G_->N;
  const u64 f = conductor_;
  long long r = n % (long long)std::max<u64>(f, 1);
  if (r < 0) r += f;
  if (f == 1) return 0;
  if (r == 0 || std::gcd(u64(r), f) != 1) return std::nullopt;
  // find r' ≡ r mod f with gcd(r', N) = 1
  for (u64 j = 0; j < N / f + 1; ++j) {
    u64 rp = u64(r) + j * f;
    if (rp % std::max<u64>(N, 1) != 0 && std::gcd(rp % N, N) == 1)
      return value_exp((long long)(rp % N));
  }
  throw Error("value_exp_primitive: lift not found");
}

std::vector<DirichletChar> DirichletChar::all_characters(const UnitGroup* G) {
  std::vector<DirichletChar> out;
  u64 total = 1;
  for (u64 o : G->orders) total *= o;
  for (u64 cnt = 0; cnt < total; ++cnt) {
    std::vector<u64> exps(G->gens.size());
    u64 rem = cnt;
    for (std::size_t i = 0; i < G->gens.size(); ++i) {
      u64 e = rem % G->orders[i];
      rem /= G->orders[i];
      exps[i] = e * (G->exponent / G->orders[i]);
    }
    out.emplace_back(G, exps);
  }
  if (out.empty()) out.emplace_back(G, std::vector<u64>{});
  return out;
}

DirichletChar DirichletChar::product(const DirichletChar& other) const {
  std::vector<u64> exps(exps_.size());
  for (std::size_t i = 0; i < exps_.size(); ++i)
    exps[i] = (exps_[i] + other.exps_[i]) % G_->exponent;
  return DirichletChar(G_, exps);
}

bigrat bernoulli_number(int n) {
  static std::vector<bigrat> cache = {bigrat(1)};
  while (int(cache.size()) <= n) {
    int m = int(cache.size());
    bigrat s = 0;
    bigint binom = 1;
    for (int k = 0; k < m; ++k) {
      s += bigrat(binom) * cache[k];
      binom = binom * (m + 1 - k) / (k + 1);
    }
    cache.push_back(-s / bigrat(binom));
  }
  return cache[n];
}

static bigrat bernoulli_poly(int k, const bigrat& x) {
  bigrat s = 0;
  bigint binom = 1;
  std::vector<bigrat> xpow(k + 1);
  xpow[0] = 1;
  for (int j = 1; j <= k; ++j) xpow[j] = xpow[j - 1] * x;
  for (int j = 0; j <= k; ++j) {
    s += bigrat(binom) * bernoulli_number(k - j) * xpow[j];
    binom = binom * (k - j) / (j + 1);
  }
  return s;
}

std::vector<bigrat> generalized_bernoulli(const CycloRing& C, const DirichletChar& chi, int k) {
  const u64 f = std::max<u64>(chi.conductor(), 1);
  std::vector<bigrat> out(C.deg(), 0);
  bigrat fk = 1;
  for (int i = 0; i + 1 < k; ++i) fk *= bigrat(bigint(f));
  for (u64 a = 1; a <= f; ++a) {
    auto v = chi.value_exp_primitive((long long)a);
    if (!v) continue;
    auto z = C.zeta_pow(*v);
    bigrat b = bernoulli_poly(k, bigrat(bigint(a), bigint(f))) * fk;
    for (int i = 0; i < C.deg(); ++i) out[i] += b * bigrat(z[i]);
  }
  return out;
}

EisensteinSeries eisenstein_qexp(const CycloRing& C, const DirichletChar& psi,
                                 const DirichletChar& phi, int k, u64 t, int qprec) {
  const bool product_odd = psi.odd() != phi.odd();
  if ((product_odd ? 1 : 0) != (k % 2))
    throw ParityMismatch("psi*phi parity must match the weight");
  EisensteinSeries E;
  E.C = &C;
  E.k = k;
  E.t = t;
  E.psi = psi;
  E.phi = phi;
  E.qprec = qprec;
  E.a0.assign(C.deg(), 0);
  E.coords.assign(C.deg(), std::vector<bigint>(qprec, 0));

  const bool both_trivial = psi.conductor() == 1 && phi.conductor() == 1;
  if (k == 2 && both_trivial) {
    if (t <= 1) throw LevelMismatch("weight-2 trivial Eisenstein needs t > 1");
    E.a0[0] = bigrat(bigint(t) - 1, 24);
    for (int n = 1; n < qprec; ++n) {
      bigint s = 0;
      for (int d = 1; d * d <= n; ++d) {
        if (n % d != 0) continue;
        s += d;
        if (d != n / d) s += n / d;
      }
      bigint s2 = 0;
      if (n % int(t) == 0) {
        int m2 = n / int(t);
        for (int d = 1; d * d <= m2; ++d) {
          if (m2 % d != 0) continue;
          s2 += d;
          if (d != m2 / d) s2 += m2 / d;
        }
      }
      E.coords[0][n] = s - bigint(t) * s2;
    }
    return E;
  }

  const int nmax = int((qprec + t - 1) / t);
  std::vector<std::vector<bigint>> an(C.deg(), std::vector<bigint>(std::max(nmax, 1), 0));
  for (int d = 1; d < nmax; ++d) {
    auto pv = phi.value_exp_primitive(d);
    if (!pv) continue;
    bigint dk = 1;
    for (int i = 0; i + 1 < k; ++i) dk *= d;
    for (int n = d; n < nmax; n += d) {
      auto sv = psi.value_exp_primitive(n / d);
      if (!sv) continue;
      auto z = C.zeta_pow((*pv + *sv) % C.order());
      for (int i = 0; i < C.deg(); ++i)
        if (z[i] != 0) an[i][n] += dk * z[i];
    }
  }
  for (int n = 1; n < nmax; ++n) {
    if (u64(n) * t >= u64(qprec)) break;
    for (int i = 0; i < C.deg(); ++i) E.coords[i][u64(n) * t] = an[i][n];
  }

  if (psi.conductor() == 1) {
    auto B = generalized_bernoulli(C, phi, k);
    for (int i = 0; i < C.deg(); ++i) E.a0[i] = -B[i] / bigrat(2 * k);
  }
  return E;
}

}  // namespace pmf
