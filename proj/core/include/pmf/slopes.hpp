#pragma once

// Newton polygons of monic polynomials over Z/p^m and slope factorization by
// Hensel lifting along a polygon vertex. Slopes are root valuations (the
// negated hull slopes), listed nondecreasing.

#include <vector>

#include "pmf/linalg.hpp"

namespace pmf {

struct NPSegment {
  long long num = 0;  // root valuation num/den
  long long den = 1;
  int mult = 0;       // number of roots
  bool ambiguous = false;  // valuation only bounded below at this precision
};

struct NewtonPolygon {
  int degree = 0;
  std::vector<NPSegment> segments;  // nondecreasing valuation; ambiguous block last
  bool fully_certified = true;

  int mult_of(long long num, long long den) const {
    for (const auto& s : segments)
      if (!s.ambiguous && s.num * den == num * s.den) return s.mult;
    return 0;
  }
  std::vector<std::pair<long long, long long>> slope_list() const;
};

// vals[i] = valuation of coefficient of X^i (val >= prec means unknown zero);
// the polynomial must be monic so vals.back() == 0.
NewtonPolygon newton_polygon_from_vals(const std::vector<int>& vals, int prec);

template <class R>
NewtonPolygon newton_polygon(const R& r, const std::vector<typename R::Elem>& f) {
  std::vector<int> vals(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) vals[i] = r.val(f[i]);
  if (vals.empty() || vals.back() != 0)
    throw AmbiguousAtPrecision("newton_polygon: polynomial not monic-with-unit-lead");
  return newton_polygon_from_vals(vals, r.prec());
}

// hull x-range [i_lo, i_hi] occupied by roots of valuation num/den; the roots
// of larger valuation sit to the left of i_lo
struct SegmentRange {
  int i_lo = 0, i_hi = 0;
  bool found = false;
};
SegmentRange np_segment_range(const std::vector<int>& vals, int prec, long long num,
                              long long den);

template <class R>
struct SlopeFactorResult {
  std::vector<typename R::Elem> h_s;     // monic, all roots of the target slope
  std::vector<typename R::Elem> h_rest;  // monic complement
  int resultant_val = 0;                 // separation certificate
};

// split monic f = g*h at a certified hull vertex x = d: h of degree n-d holds
// the small-valuation roots, g the large ones
template <class R>
void split_at_vertex(const R& r, const std::vector<typename R::Elem>& f, int d,
                     std::vector<typename R::Elem>& g, std::vector<typename R::Elem>& h) {
  const int n = int(f.size()) - 1;
  const int prec = r.prec();
  if (d <= 0) {
    g = {r.one()};
    h = f;
    return;
  }
  if (d >= n) {
    g = f;
    h = {r.one()};
    return;
  }
  int w = r.val(f[d]);
  if (w >= prec) throw SegmentNotSeparated("vertex coefficient vanishes at this precision");
  h.assign(f.begin() + d, f.end());
  g.assign(d + 1, r.zero());
  auto uinv = r.inv_unit(r.unit_part(f[d]));
  for (int i = 0; i <= d; ++i) {
    if (r.val(f[i]) < w) throw SegmentNotSeparated("not a hull vertex");
    g[i] = r.mul(r.div_exact_p(f[i], w), uinv);
  }
  g[d] = r.one();

  auto residual = [&]() {
    auto gh = poly_mul(r, g, h);
    std::vector<typename R::Elem> e(n + 1, r.zero());
    for (int i = 0; i <= n; ++i) e[i] = r.sub(f[i], gh[i]);
    return e;
  };
  int last_ev = -1;
  for (int iter = 0; iter < 2 * prec + 8; ++iter) {
    auto e = residual();
    int ev = prec;
    for (auto& x : e) ev = std::min(ev, r.val(x));
    if (ev >= prec) return;
    if (ev <= last_ev)
      throw SegmentNotSeparated("Hensel iteration stalled (segment not separated at this precision)");
    last_ev = ev;
    // solve dg*h + dh*g = e, deg dg < d, deg dh < n-d
    Mat<R> M(r, n, n);
    for (int j = 0; j < d; ++j)
      for (int t = 0; t < int(h.size()); ++t) M.at(j + t, j) = h[t];
    for (int j = 0; j < n - d; ++j)
      for (int t = 0; t < int(g.size()); ++t) M.at(j + t, d + j) = g[t];
    std::vector<typename R::Elem> rhs(n, r.zero());
    for (int i = 0; i < n; ++i) rhs[i] = e[i];
    auto sol = solve_linear(M, rhs);
    if (!sol.solvable)
      throw SegmentNotSeparated("Hensel correction unsolvable at this precision");
    for (int j = 0; j < d; ++j) g[j] = r.add(g[j], sol.x[j]);
    for (int j = 0; j < n - d; ++j) h[j] = r.add(h[j], sol.x[d + j]);
  }
  throw SegmentNotSeparated("Hensel iteration failed to converge");
}

template <class R>
SlopeFactorResult<R> slope_factor(const R& r, const std::vector<typename R::Elem>& f,
                                  long long num, long long den = 1, int np_prec = -1) {
  SlopeFactorResult<R> out;
  const int prec = r.prec();
  if (np_prec < 0 || np_prec > prec) np_prec = prec;
  std::vector<int> vals(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) vals[i] = std::min(r.val(f[i]), np_prec);
  auto np = newton_polygon_from_vals(vals, np_prec);
  int mult = np.mult_of(num, den);
  // the uncertified block hides valuations >= its recorded bound; the target
  // is safe only when strictly below that bound
  bool block_risk = false;
  for (const auto& s : np.segments)
    if (s.ambiguous && num * s.den >= s.num * den) block_risk = true;
  if (mult == 0) {
    if (block_risk)
      throw AmbiguousAtPrecision("target slope lies in the uncertified part of the polygon");
    out.h_s = {r.one()};
    out.h_rest = f;
    out.resultant_val = 0;
    return out;
  }
  if (block_risk)
    throw AmbiguousAtPrecision("target segment may extend into the uncertified block");
  auto range = np_segment_range(vals, np_prec, num, den);
  if (!range.found) throw SegmentNotSeparated("segment range not certified");
  std::vector<typename R::Elem> g1, h1, g2;
  split_at_vertex(r, f, range.i_hi, g1, h1);   // h1: roots below target
  split_at_vertex(r, g1, range.i_lo, g2, out.h_s);  // h_s: roots at target
  out.h_rest = poly_mul(r, g2, h1);
  out.resultant_val = resultant_val(r, out.h_s, out.h_rest);
  if (out.resultant_val >= prec)
    throw SegmentNotSeparated("factors share a root at this precision");
  return out;
}

}  // namespace pmf
