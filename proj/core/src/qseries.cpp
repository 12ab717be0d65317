#include "pmf/qseries.hpp"

#include <algorithm>

#include "pmf/ntt.hpp"

namespace pmf {

namespace {
void check_same_ring(const QSeries& a, const QSeries& b) {
  if (a.R != b.R || !(a.R && b.R)) throw PrecisionMismatch("q-series ring mismatch");
}
constexpr int kNaiveCut = 96;
}  // namespace

QSeries qs_add(const QSeries& a, const QSeries& b) {
  check_same_ring(a, b);
  QSeries r(*a.R, std::min(a.qprec, b.qprec));
  r.padic_prec = std::min(a.padic_prec, b.padic_prec);
  r.alternate = a.alternate;
  for (int i = 0; i < r.qprec; ++i) r.c[i] = a.R->add(a.c[i], b.c[i]);
  return r;
}

QSeries qs_sub(const QSeries& a, const QSeries& b) {
  check_same_ring(a, b);
  QSeries r(*a.R, std::min(a.qprec, b.qprec));
  r.padic_prec = std::min(a.padic_prec, b.padic_prec);
  r.alternate = a.alternate;
  for (int i = 0; i < r.qprec; ++i) r.c[i] = a.R->sub(a.c[i], b.c[i]);
  return r;
}

QSeries qs_scale(const QSeries& a, u128 s_mont) {
  QSeries r(*a.R, a.qprec);
  r.padic_prec = a.padic_prec;
  r.alternate = a.alternate;
  for (int i = 0; i < a.qprec; ++i) r.c[i] = a.R->mul(a.c[i], s_mont);
  return r;
}

QSeries qs_mul_trunc(const QSeries& a, const QSeries& b, int out_len) {
  check_same_ring(a, b);
  const ZRing& R = *a.R;
  int lim = std::min({out_len, a.qprec, b.qprec});
  QSeries r(R, lim);
  r.padic_prec = std::min(a.padic_prec, b.padic_prec);
  if (lim <= 0) return r;
  if (std::size_t(lim) <= kNaiveCut || a.qprec <= kNaiveCut || b.qprec <= kNaiveCut) {
    for (int i = 0; i < std::min(a.qprec, lim); ++i) {
      if (R.is_zero(a.c[i])) continue;
      int jmax = std::min(b.qprec, lim - i);
      for (int j = 0; j < jmax; ++j)
        r.c[i + j] = R.add(r.c[i + j], R.mul(a.c[i], b.c[j]));
    }
    return r;
  }
  std::vector<u128> ta(a.c.begin(), a.c.begin() + std::min(a.qprec, lim));
  std::vector<u128> tb(b.c.begin(), b.c.begin() + std::min(b.qprec, lim));
  r.c = ntt_multiply(R, ta, tb, lim);
  return r;
}

QSeries qs_mul(const QSeries& a, const QSeries& b) {
  return qs_mul_trunc(a, b, std::min(a.qprec, b.qprec));
}

QSeries qs_invert(const QSeries& a) {
  const ZRing& R = *a.R;
  if (a.qprec <= 0 || R.val(a.c[0]) != 0)
    throw Error("qs_invert: leading coefficient is not a unit");
  QSeries g(R, 1);
  g.padic_prec = a.padic_prec;
  g.c[0] = R.inv_unit(a.c[0]);
  auto pad = [&R](const QSeries& s, int len) {
    QSeries r(R, len);
    r.padic_prec = s.padic_prec;
    std::copy(s.c.begin(), s.c.begin() + std::min(s.qprec, len), r.c.begin());
    return r;
  };
  while (g.qprec < a.qprec) {
    int nl = std::min(2 * g.qprec, a.qprec);
    // g' = g(2 - a g) to nl terms, with g zero-padded
    QSeries gp = pad(g, nl);
    QSeries ag = qs_mul_trunc(qs_truncate(a, nl), gp, nl);
    QSeries two(R, nl);
    two.c[0] = R.add(R.one(), R.one());
    QSeries gg = qs_mul_trunc(gp, qs_sub(two, ag), nl);
    gg.padic_prec = a.padic_prec;
    g = gg;
  }
  return g;
}

QSeries qs_map_Up(const QSeries& a, u64 p) {
  int out = a.qprec > 0 ? int((a.qprec - 1) / (long long)p) + 1 : 0;
  QSeries r(*a.R, out);
  r.padic_prec = a.padic_prec;
  r.alternate = a.alternate;
  for (int n = 0; n < out; ++n) r.c[n] = a.c[std::size_t(n) * p];
  return r;
}

QSeries qs_map_Ul(const QSeries& a, u64 ell) { return qs_map_Up(a, ell); }

QSeries qs_expand_t(const QSeries& a, u64 t) {
  long long out = (long long)(a.qprec - 1) * (long long)t + 1;
  if (a.qprec <= 0) out = 0;
  QSeries r(*a.R, int(out));
  r.padic_prec = a.padic_prec;
  r.alternate = a.alternate;
  for (int n = 0; n < a.qprec; ++n) r.c[std::size_t(n) * t] = a.c[n];
  return r;
}

QSeries qs_theta(const QSeries& a, u64 j) {
  const ZRing& R = *a.R;
  QSeries r(*a.R, a.qprec);
  r.padic_prec = a.padic_prec;
  r.alternate = a.alternate;
  for (int n = 1; n < a.qprec; ++n) {
    u128 njm = R.pow(R.from_plain(u128(n)), j);
    r.c[n] = R.mul(a.c[n], njm);
  }
  return r;
}

int qs_first_unit(const QSeries& a) {
  for (int n = 0; n < a.qprec; ++n)
    if (a.R->val(a.c[n]) == 0) return n;
  return -1;
}

int qs_content_val(const QSeries& a) {
  int v = a.R->prec();
  for (int n = 0; n < a.qprec && v > 0; ++n) v = std::min(v, a.R->val(a.c[n]));
  return v;
}

QSeries qs_div_exact_p(const QSeries& a, int e) {
  QSeries r(*a.R, a.qprec);
  r.padic_prec = std::max(0, a.padic_prec - e);
  r.alternate = a.alternate;
  for (int n = 0; n < a.qprec; ++n) r.c[n] = a.R->div_exact_p(a.c[n], e);
  return r;
}

QSeries qs_truncate(const QSeries& a, int qp) {
  QSeries r(*a.R, std::min(qp, a.qprec));
  r.padic_prec = a.padic_prec;
  r.alternate = a.alternate;
  std::copy(a.c.begin(), a.c.begin() + r.qprec, r.c.begin());
  return r;
}

std::vector<bigint> eta_power_series(int exponent, int len) {
  // prod_{n>=1} (1-q^n)^e by repeated multiplication with sparse binomials,
  // via exact big integers
  std::vector<bigint> f(len, 0);
  f[0] = 1;
  for (int n = 1; n < len; ++n) {
    // multiply by (1-q^n)^exponent using binomial expansion, truncated
    std::vector<bigint> g(len, 0);
    bigint binom = 1;
    for (int j = 0; j * n < len; ++j) {
      if (j > 0) {
        binom = binom * (exponent - j + 1);
        binom /= j;
      }
      bigint coef = (j % 2 == 0) ? binom : -binom;
      for (int i = 0; i + j * n < len; ++i)
        if (f[i] != 0) g[i + j * n] += coef * f[i];
    }
    f = std::move(g);
  }
  return f;
}

std::vector<bigint> eta_product_series(const std::vector<std::pair<int, int>>& exps,
                                       int len, int* q_shift_out) {
  long long total = 0;
  for (auto [d, e] : exps) total += (long long)d * e;
  if (total % 24 != 0) throw Error("eta_product_series: q-valuation not integral");
  int shift = int(total / 24);
  if (q_shift_out) *q_shift_out = shift;
  std::vector<bigint> f(len, 0);
  f[0] = 1;
  for (auto [d, e] : exps) {
    // multiply by prod (1-q^{dn})^e
    std::vector<bigint> part = eta_power_series(e, (len + d - 1) / d);
    std::vector<bigint> g(len, 0);
    for (std::size_t j = 0; j < part.size(); ++j) {
      if (part[j] == 0) continue;
      std::size_t off = j * d;
      if (off >= std::size_t(len)) break;
      for (std::size_t i = 0; i + off < std::size_t(len); ++i)
        if (f[i] != 0) g[i + off] += part[j] * f[i];
    }
    f = std::move(g);
  }
  return f;
}

QSeries qs_from_bigints(const ZRing& R, const std::vector<bigint>& v, int qprec) {
  QSeries r(R, qprec);
  for (int i = 0; i < qprec && i < int(v.size()); ++i) r.c[i] = R.from_big(v[i]);
  return r;
}

}  // namespace pmf
