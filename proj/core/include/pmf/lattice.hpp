#pragma once

// Lattices as row spans of coordinate matrices inside a fixed ambient Z_p^n.
// Saturation, intersection, sum and quotient elementary divisors all reduce
// to Smith normal forms; membership is an SNF solvability test where a
// zero-at-precision pivot counts as failure.

#include <vector>

#include "pmf/linalg.hpp"

namespace pmf {

// basis of the p-saturation of the row span (rows of the result have unit
// content and span {x : p^k x in span for some k})
template <class R>
Mat<R> lattice_saturate(const Mat<R>& L) {
  const R& r = *L.ring;
  auto S = smith_normal_form(L);
  // L = U D V; saturation is spanned by the first `rank` rows of V
  Mat<R> B(r, S.rank, L.nc);
  for (int i = 0; i < S.rank; ++i)
    for (int j = 0; j < L.nc; ++j) B.at(i, j) = S.V.at(i, j);
  return B;
}

template <class R>
Mat<R> lattice_stack(const Mat<R>& A, const Mat<R>& B) {
  if (A.nc != B.nc) throw IncompatibleAmbient("stack: ambient dimensions differ");
  Mat<R> C(*A.ring, A.nr + B.nr, A.nc);
  std::copy(A.a.begin(), A.a.end(), C.a.begin());
  std::copy(B.a.begin(), B.a.end(), C.a.begin() + A.a.size());
  return C;
}

// sum of lattices: reduced (non-saturated) basis with p-power pivots, i.e. the
// rows p^{e_i} * (row i of V) for the finite exponents
template <class R>
Mat<R> lattice_sum(const Mat<R>& A, const Mat<R>& B) {
  const R& r = *A.ring;
  auto stacked = lattice_stack(A, B);
  auto S = smith_normal_form(stacked);
  Mat<R> out(r, S.rank, A.nc);
  for (int i = 0; i < S.rank; ++i)
    for (int j = 0; j < A.nc; ++j) out.at(i, j) = r.mul_p_pow(S.V.at(i, j), S.exponents[i]);
  return out;
}

// intersection of row spans (saturated inputs give the honest intersection up
// to the reported precision loss)
template <class R>
Mat<R> lattice_intersect(const Mat<R>& A, const Mat<R>& B) {
  const R& r = *A.ring;
  if (A.nc != B.nc) throw IncompatibleAmbient("intersect: ambient dimensions differ");
  // solve a*A - b*B = 0: kernel of the stacked transpose
  Mat<R> M(r, A.nc, A.nr + B.nr);
  for (int i = 0; i < A.nr; ++i)
    for (int j = 0; j < A.nc; ++j) M.at(j, i) = A.at(i, j);
  for (int i = 0; i < B.nr; ++i)
    for (int j = 0; j < B.nc; ++j) M.at(j, A.nr + i) = B.at(i, j);
  auto K = kernel_saturated(M);  // rows (a | -b)
  Mat<R> out(r, K.nr, A.nc);
  for (int k = 0; k < K.nr; ++k)
    for (int j = 0; j < A.nc; ++j) {
      auto s = r.zero();
      for (int i = 0; i < A.nr; ++i) s = r.add(s, r.mul(K.at(k, i), A.at(i, j)));
      out.at(k, j) = s;
    }
  return lattice_saturate(out);
}

struct QuotientShape {
  int free_rank = 0;
  std::vector<int> torsion_exponents;  // nonzero finite exponents, nondecreasing
  int ambient_rank = 0;
  int sub_rank = 0;
};

// elementary divisors of Ambient/L where L's rows are given in coordinates of
// the ambient basis (ambient = Z_p^{nc})
template <class R>
QuotientShape quotient_divisors(const Mat<R>& amb_coords_of_L, int ambient_rank) {
  const R& r = *amb_coords_of_L.ring;
  auto S = smith_normal_form(amb_coords_of_L);
  QuotientShape q;
  q.ambient_rank = ambient_rank;
  q.sub_rank = S.rank;
  q.free_rank = ambient_rank - S.rank;
  for (int e : S.exponents)
    if (e > 0 && e < r.prec()) q.torsion_exponents.push_back(e);
  return q;
}

// membership x in rowspan(L) with integral coordinates; zero-at-precision
// pivots are treated as failure
template <class R>
bool lattice_member(const Mat<R>& L, const std::vector<typename R::Elem>& x,
                    int* denominator_val = nullptr) {
  Mat<R> Lt = mat_transpose(L);
  auto sol = solve_linear(Lt, x);
  if (denominator_val) *denominator_val = sol.denominator_val;
  return sol.solvable;
}

template <class R>
int lattice_rank(const Mat<R>& L) {
  return smith_normal_form(L).rank;
}

}  // namespace pmf
