#pragma once

#include <vector>

#include "pmf/zring.hpp"

namespace pmf {

// Truncated q-expansion with coefficients in Z/p^prec. Tracks how many
// q-coefficients are known (qprec) and the guaranteed p-adic precision of
// them (padic_prec <= ring precision); both propagate pessimistically.
// `alternate` marks T[U']-based q-series as opposed to standard ones.
struct QSeries {
  const ZRing* R = nullptr;
  int qprec = 0;
  int padic_prec = 0;
  bool alternate = false;
  std::vector<u128> c;  // Montgomery form, size == qprec

  QSeries() = default;
  QSeries(const ZRing& ring, int qp)
      : R(&ring), qprec(qp), padic_prec(ring.prec()), c(qp, 0) {}

  u128 coeff(long long n) const { return (n >= 0 && n < qprec) ? c[n] : 0; }
  bool known(long long n) const { return n >= 0 && n < qprec; }
};

QSeries qs_add(const QSeries& a, const QSeries& b);
QSeries qs_sub(const QSeries& a, const QSeries& b);
QSeries qs_scale(const QSeries& a, u128 s_mont);
QSeries qs_mul(const QSeries& a, const QSeries& b);
QSeries qs_mul_trunc(const QSeries& a, const QSeries& b, int out_len);
// inverse of a unit power series (a_0 a unit), Newton iteration
QSeries qs_invert(const QSeries& a);
// a_n -> a_{np}
QSeries qs_map_Up(const QSeries& a, u64 p);
// a_n -> a_{n ell}  (U_ell on q-series, ell | N)
QSeries qs_map_Ul(const QSeries& a, u64 ell);
// f(q) -> f(q^t)
QSeries qs_expand_t(const QSeries& a, u64 t);
// theta^j: a_n -> n^j a_n (constant term dies)
QSeries qs_theta(const QSeries& a, u64 j);
// minimum index with unit coefficient, or -1
int qs_first_unit(const QSeries& a);
// content valuation: min valuation over known coefficients (capped)
int qs_content_val(const QSeries& a);
QSeries qs_div_exact_p(const QSeries& a, int e);
QSeries qs_truncate(const QSeries& a, int qp);

// exact-integer series helpers (eta products, Jacobi products)
std::vector<bigint> eta_power_series(int exponent, int len);              // prod (1-q^n)^exponent
std::vector<bigint> eta_product_series(const std::vector<std::pair<int, int>>& exps,
                                       int len, int* q_shift_out);        // prod eta(d z)^{e_d}
QSeries qs_from_bigints(const ZRing& R, const std::vector<bigint>& v, int qprec);

}  // namespace pmf
