#pragma once

// Exact linear algebra over Z/p^m, templated over the scalar ring so the same
// routines run on the Montgomery ring and on the big-integer ring. Pivoting is
// deterministic: smallest valuation first, then smallest row/column index.

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "pmf/zring.hpp"

namespace pmf {

template <class R>
struct Mat {
  using E = typename R::Elem;
  const R* ring = nullptr;
  int nr = 0, nc = 0;
  std::vector<E> a;

  Mat() = default;
  Mat(const R& r, int rows, int cols)
      : ring(&r), nr(rows), nc(cols), a(std::size_t(rows) * cols, r.zero()) {}

  E& at(int i, int j) { return a[std::size_t(i) * nc + j]; }
  const E& at(int i, int j) const { return a[std::size_t(i) * nc + j]; }

  std::vector<E> row(int i) const {
    return std::vector<E>(a.begin() + std::size_t(i) * nc, a.begin() + std::size_t(i + 1) * nc);
  }

  static Mat identity(const R& r, int n) {
    Mat m(r, n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = r.one();
    return m;
  }
};

template <class R>
Mat<R> mat_mul(const Mat<R>& A, const Mat<R>& B) {
  const R& r = *A.ring;
  Mat<R> C(r, A.nr, B.nc);
  for (int i = 0; i < A.nr; ++i)
    for (int k = 0; k < A.nc; ++k) {
      const auto aik = A.at(i, k);
      if (r.is_zero(aik)) continue;
      const auto* brow = &B.a[std::size_t(k) * B.nc];
      auto* crow = &C.a[std::size_t(i) * C.nc];
      for (int j = 0; j < B.nc; ++j) crow[j] = r.add(crow[j], r.mul(aik, brow[j]));
    }
  return C;
}

template <class R>
std::vector<typename R::Elem> mat_apply(const Mat<R>& A, const std::vector<typename R::Elem>& x) {
  const R& r = *A.ring;
  std::vector<typename R::Elem> y(A.nr, r.zero());
  for (int i = 0; i < A.nr; ++i) {
    auto s = r.zero();
    for (int j = 0; j < A.nc; ++j) s = r.add(s, r.mul(A.at(i, j), x[j]));
    y[i] = s;
  }
  return y;
}

template <class R>
std::vector<typename R::Elem> vec_apply_mat(const std::vector<typename R::Elem>& x,
                                            const Mat<R>& A) {
  const R& r = *A.ring;
  std::vector<typename R::Elem> y(A.nc, r.zero());
  for (int i = 0; i < A.nr; ++i) {
    if (r.is_zero(x[i])) continue;
    for (int j = 0; j < A.nc; ++j) y[j] = r.add(y[j], r.mul(x[i], A.at(i, j)));
  }
  return y;
}

template <class R>
Mat<R> mat_add(const Mat<R>& A, const Mat<R>& B) {
  const R& r = *A.ring;
  Mat<R> C(r, A.nr, A.nc);
  for (std::size_t i = 0; i < A.a.size(); ++i) C.a[i] = r.add(A.a[i], B.a[i]);
  return C;
}

template <class R>
Mat<R> mat_sub(const Mat<R>& A, const Mat<R>& B) {
  const R& r = *A.ring;
  Mat<R> C(r, A.nr, A.nc);
  for (std::size_t i = 0; i < A.a.size(); ++i) C.a[i] = r.sub(A.a[i], B.a[i]);
  return C;
}

template <class R>
Mat<R> mat_scale(const Mat<R>& A, typename R::Elem s) {
  const R& r = *A.ring;
  Mat<R> C(r, A.nr, A.nc);
  for (std::size_t i = 0; i < A.a.size(); ++i) C.a[i] = r.mul(A.a[i], s);
  return C;
}

template <class R>
Mat<R> mat_transpose(const Mat<R>& A) {
  Mat<R> C(*A.ring, A.nc, A.nr);
  for (int i = 0; i < A.nr; ++i)
    for (int j = 0; j < A.nc; ++j) C.at(j, i) = A.at(i, j);
  return C;
}

template <class R>
Mat<R> mat_pow(const Mat<R>& A, u128 e) {
  Mat<R> r = Mat<R>::identity(*A.ring, A.nr), b = A;
  while (e) {
    if (e & 1) r = mat_mul(r, b);
    b = mat_mul(b, b);
    e >>= 1;
  }
  return r;
}

template <class R>
bool mat_is_zero(const Mat<R>& A) {
  for (const auto& x : A.a)
    if (!A.ring->is_zero(x)) return false;
  return true;
}

// agreement precision of two matrices: min valuation of the difference
template <class R>
int mat_agree_val(const Mat<R>& A, const Mat<R>& B) {
  const R& r = *A.ring;
  int v = r.prec();
  for (std::size_t i = 0; i < A.a.size(); ++i) v = std::min(v, r.val(r.sub(A.a[i], B.a[i])));
  return v;
}

template <class R>
int mat_min_val(const Mat<R>& A) {
  const R& r = *A.ring;
  int v = r.prec();
  for (const auto& x : A.a) v = std::min(v, r.val(x));
  return v;
}

// ---------------------------------------------------------------------------
// Smith normal form over Z/p^m: A = U * D * V, U and V unimodular, D diagonal
// with entries p^{e_1} | ... | p^{e_r}. Over the local ring a single sweep
// with min-valuation pivoting already yields the divisibility chain.
// Exponents >= prec mean "zero at this precision".
// ---------------------------------------------------------------------------
template <class R>
struct SmithForm {
  std::vector<int> exponents;  // per elimination step, nondecreasing
  Mat<R> U, V;                 // A = U*D*V
  Mat<R> Uinv, Vinv;           // D = Uinv*A*Vinv
  int rank = 0;                // #exponents < prec
  int rank_units = 0;          // #exponents == 0
  int max_finite_exp = 0;      // largest exponent < prec (0 if none)
};

template <class R>
SmithForm<R> smith_normal_form(const Mat<R>& A) {
  const R& r = *A.ring;
  const int m = A.nr, n = A.nc, prec = r.prec();
  Mat<R> D = A;
  Mat<R> L = Mat<R>::identity(r, m), Linv = Mat<R>::identity(r, m);
  Mat<R> Rt = Mat<R>::identity(r, n), Rtinv = Mat<R>::identity(r, n);

  auto row_addmul = [&r](Mat<R>& M, int dst, int src, typename R::Elem f) {
    for (int j = 0; j < M.nc; ++j) M.at(dst, j) = r.add(M.at(dst, j), r.mul(f, M.at(src, j)));
  };
  auto col_addmul = [&r](Mat<R>& M, int dst, int src, typename R::Elem f) {
    for (int i = 0; i < M.nr; ++i) M.at(i, dst) = r.add(M.at(i, dst), r.mul(f, M.at(i, src)));
  };
  auto row_swap = [](Mat<R>& M, int i, int j) {
    for (int k = 0; k < M.nc; ++k) std::swap(M.at(i, k), M.at(j, k));
  };
  auto col_swap = [](Mat<R>& M, int i, int j) {
    for (int k = 0; k < M.nr; ++k) std::swap(M.at(k, i), M.at(k, j));
  };

  const int steps = std::min(m, n);
  std::vector<int> exps;
  for (int s = 0; s < steps; ++s) {
    int pv = prec + 1, pi = -1, pj = -1;
    for (int i = s; i < m; ++i)
      for (int j = s; j < n; ++j) {
        int v = r.val(D.at(i, j));
        if (v < pv) {
          pv = v;
          pi = i;
          pj = j;
        }
      }
    if (pi < 0 || pv > prec || pv >= prec) break;  // rest is zero at precision
    if (pi != s) {
      row_swap(D, pi, s);
      row_swap(Linv, pi, s);
      col_swap(L, pi, s);
    }
    if (pj != s) {
      col_swap(D, pj, s);
      row_swap(Rt, pj, s);
      col_swap(Rtinv, pj, s);
    }
    // normalize pivot to exactly p^pv
    auto u = r.unit_part(D.at(s, s));
    auto uinv = r.inv_unit(u);
    for (int j = 0; j < n; ++j) D.at(s, j) = r.mul(D.at(s, j), uinv);
    for (int j = 0; j < m; ++j) Linv.at(s, j) = r.mul(Linv.at(s, j), uinv);
    for (int i = 0; i < m; ++i) L.at(i, s) = r.mul(L.at(i, s), u);
    // clear column s (row ops), then row s (col ops; column stays clear)
    for (int i = 0; i < m; ++i) {
      if (i == s || r.is_zero(D.at(i, s))) continue;
      auto q = r.neg(r.div_exact_p(D.at(i, s), pv));
      row_addmul(D, i, s, q);
      row_addmul(Linv, i, s, q);
      col_addmul(L, s, i, r.neg(q));
    }
    for (int j = 0; j < n; ++j) {
      if (j == s || r.is_zero(D.at(s, j))) continue;
      auto q = r.neg(r.div_exact_p(D.at(s, j), pv));
      col_addmul(D, j, s, q);
      row_addmul(Rt, s, j, r.neg(q));
      col_addmul(Rtinv, j, s, q);
    }
    exps.push_back(pv);
  }

  SmithForm<R> out;
  out.exponents = exps;
  out.exponents.resize(steps, prec);
  for (int e : out.exponents) {
    if (e < prec) {
      ++out.rank;
      out.max_finite_exp = std::max(out.max_finite_exp, e);
    }
    if (e == 0) ++out.rank_units;
  }
  out.U = std::move(L);
  out.Uinv = std::move(Linv);
  out.V = std::move(Rt);
  out.Vinv = std::move(Rtinv);
  return out;
}

// ---------------------------------------------------------------------------
// Unit-pivot row echelon; optionally saturates rows (divides out p-content)
// and reports the total content removed. Pivot entries are normalized to 1
// and cleared above.
// ---------------------------------------------------------------------------
template <class R>
struct Echelon {
  Mat<R> rows;
  std::vector<int> pivot_col;
  int sat_loss = 0;  // max p-content divided out of any row
  int rank() const { return int(pivot_col.size()); }
};

template <class R>
Echelon<R> echelonize(const Mat<R>& A, bool saturate = false) {
  const R& r = *A.ring;
  const int prec = r.prec();
  std::vector<std::vector<typename R::Elem>> rows;
  std::vector<int> pivots;
  int sat_loss = 0;
  for (int i = 0; i < A.nr; ++i) {
    auto v = A.row(i);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      auto c = v[pivots[k]];
      if (r.is_zero(c)) continue;
      for (int j = 0; j < A.nc; ++j) v[j] = r.sub(v[j], r.mul(c, rows[k][j]));
    }
    int pj = -1, pv = prec;
    for (int j = 0; j < A.nc; ++j) {
      int w = r.val(v[j]);
      if (w < pv) {
        pv = w;
        pj = j;
        if (w == 0) break;
      }
    }
    if (pj < 0) continue;  // row vanished at this precision
    if (pv > 0) {
      if (!saturate) continue;  // without saturation only unit pivots qualify
      for (int j = 0; j < A.nc; ++j) v[j] = r.div_exact_p(v[j], pv);
      sat_loss = std::max(sat_loss, pv);
      // re-find pivot: smallest column with unit entry
      pj = -1;
      for (int j = 0; j < A.nc; ++j)
        if (r.val(v[j]) == 0) {
          pj = j;
          break;
        }
    } else {
      // prefer the leftmost unit pivot for determinism
      for (int j = 0; j < pj; ++j)
        if (r.val(v[j]) == 0) {
          pj = j;
          break;
        }
    }
    auto inv = r.inv_unit(v[pj]);
    for (int j = 0; j < A.nc; ++j) v[j] = r.mul(v[j], inv);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      auto c = rows[k][pj];
      if (r.is_zero(c)) continue;
      for (int j = 0; j < A.nc; ++j) rows[k][j] = r.sub(rows[k][j], r.mul(c, v[j]));
    }
    rows.push_back(std::move(v));
    pivots.push_back(pj);
  }
  std::vector<int> order(rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = int(i);
  std::sort(order.begin(), order.end(), [&](int x, int y) { return pivots[x] < pivots[y]; });
  Echelon<R> e;
  e.sat_loss = sat_loss;
  e.rows = Mat<R>(r, int(rows.size()), A.nc);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    e.pivot_col.push_back(pivots[order[i]]);
    for (int j = 0; j < A.nc; ++j) e.rows.at(int(i), j) = rows[order[i]][j];
  }
  return e;
}

// Coordinates of v in a unit-pivot echelon basis. Returns nullopt when a
// residue of valuation < residue_tol remains.
template <class R>
std::optional<std::vector<typename R::Elem>> coords_in_echelon(const Echelon<R>& e,
                                                               std::vector<typename R::Elem> v,
                                                               int residue_tol = -1,
                                                               int* residue_val = nullptr) {
  const R& r = *e.rows.ring;
  if (residue_tol < 0) residue_tol = r.prec();
  std::vector<typename R::Elem> coords(e.rank(), r.zero());
  for (int k = 0; k < e.rank(); ++k) {
    auto c = v[e.pivot_col[k]];
    coords[k] = c;
    if (r.is_zero(c)) continue;
    for (int j = 0; j < e.rows.nc; ++j) v[j] = r.sub(v[j], r.mul(c, e.rows.at(k, j)));
  }
  int rv = r.prec();
  for (int j = 0; j < e.rows.nc && rv > 0; ++j) rv = std::min(rv, r.val(v[j]));
  if (residue_val) *residue_val = rv;
  if (rv < residue_tol) return std::nullopt;
  return coords;
}

// ---------------------------------------------------------------------------
// Linear solve through the Smith form. denominator_val is the largest pivot
// exponent used: the solution is certified modulo p^{prec - denominator_val}.
// ---------------------------------------------------------------------------
template <class R>
struct SolveResult {
  bool solvable = false;
  std::vector<typename R::Elem> x;
  int denominator_val = 0;
};

template <class R>
SolveResult<R> solve_via_snf(const SmithForm<R>& S, const std::vector<typename R::Elem>& b) {
  const R& r = *S.U.ring;
  const int prec = r.prec();
  const int nr = S.U.nr, nc = S.V.nc;
  SolveResult<R> res;
  auto c = mat_apply(S.Uinv, b);
  std::vector<typename R::Elem> y(nc, r.zero());
  int dval = 0;
  const int steps = std::min(nr, nc);
  for (int i = 0; i < steps; ++i) {
    int e = S.exponents[i];
    if (e >= prec) {
      if (r.val(c[i]) < prec) return res;
      continue;
    }
    if (r.val(c[i]) < e) return res;
    y[i] = r.div_exact_p(c[i], e);
    dval = std::max(dval, e);
  }
  for (int i = steps; i < nr; ++i)
    if (r.val(c[i]) < prec) return res;
  res.x = mat_apply(S.Vinv, y);
  res.solvable = true;
  res.denominator_val = dval;
  return res;
}

template <class R>
SolveResult<R> solve_linear(const Mat<R>& A, const std::vector<typename R::Elem>& b) {
  return solve_via_snf(smith_normal_form(A), b);
}

// Saturated right kernel of A (rows span {x : A x = 0}).
template <class R>
Mat<R> kernel_saturated(const Mat<R>& A, int zero_threshold = -1) {
  const R& r = *A.ring;
  if (zero_threshold < 0) zero_threshold = r.prec();
  auto S = smith_normal_form(A);
  std::vector<int> pos;
  const int steps = std::min(A.nr, A.nc);
  for (int i = 0; i < steps; ++i)
    if (S.exponents[i] >= zero_threshold) pos.push_back(i);
  for (int i = steps; i < A.nc; ++i) pos.push_back(i);
  Mat<R> K(r, int(pos.size()), A.nc);
  for (std::size_t k = 0; k < pos.size(); ++k)
    for (int j = 0; j < A.nc; ++j) K.at(int(k), j) = S.Vinv.at(j, pos[k]);
  return K;
}

// Unimodular inverse (all SNF exponents zero), e.g. for transform matrices.
template <class R>
Mat<R> mat_inverse_unimodular(const Mat<R>& A) {
  auto S = smith_normal_form(A);
  if (S.rank_units != A.nr || A.nr != A.nc)
    throw Error("mat_inverse_unimodular: matrix is not unimodular");
  // A = U D V with D = I  =>  A^{-1} = Vinv * Uinv
  return mat_mul(S.Vinv, S.Uinv);
}

// ---------------------------------------------------------------------------
// Characteristic polynomials; coefficients low-to-high, monic.
// Berkowitz is division-free (exact mod p^m) and used for small matrices.
// Hessenberg runs in O(n^3) with valuation pivoting and reports the largest
// pivot valuation divided by; use for the large operator matrices.
// ---------------------------------------------------------------------------
template <class R>
std::vector<typename R::Elem> charpoly_berkowitz(const Mat<R>& A) {
  const R& r = *A.ring;
  const int n = A.nr;
  std::vector<typename R::Elem> poly(1, r.one());  // degree-first storage
  for (int k = 1; k <= n; ++k) {
    std::vector<typename R::Elem> col(k + 1, r.zero());
    col[0] = r.one();
    col[1] = r.neg(A.at(k - 1, k - 1));
    if (k >= 2) {
      std::vector<typename R::Elem> w(k - 1);
      for (int i = 0; i < k - 1; ++i) w[i] = A.at(i, k - 1);
      for (int t = 2; t <= k; ++t) {
        auto s = r.zero();
        for (int i = 0; i < k - 1; ++i) s = r.add(s, r.mul(A.at(k - 1, i), w[i]));
        col[t] = r.neg(s);
        if (t < k) {
          std::vector<typename R::Elem> w2(k - 1, r.zero());
          for (int i = 0; i < k - 1; ++i) {
            auto acc = r.zero();
            for (int j = 0; j < k - 1; ++j) acc = r.add(acc, r.mul(A.at(i, j), w[j]));
            w2[i] = acc;
          }
          w = std::move(w2);
        }
      }
    }
    std::vector<typename R::Elem> next(k + 1, r.zero());
    for (int i = 0; i < int(col.size()); ++i) {
      if (r.is_zero(col[i])) continue;
      for (int j = 0; j < int(poly.size()) && i + j <= k; ++j)
        next[i + j] = r.add(next[i + j], r.mul(col[i], poly[j]));
    }
    poly = std::move(next);
  }
  return std::vector<typename R::Elem>(poly.rbegin(), poly.rend());
}

template <class R>
struct CharpolyResult {
  std::vector<typename R::Elem> coeffs;  // low-to-high, monic
  int precision_spent = 0;               // max pivot valuation divided by
};

template <class R>
CharpolyResult<R> charpoly_hessenberg(Mat<R> A) {
  const R& r = *A.ring;
  const int n = A.nr, prec = r.prec();
  CharpolyResult<R> out;
  int spent = 0;
  for (int k = 0; k + 2 < n; ++k) {
    int pi = -1, pv = prec + 1;
    for (int i = k + 1; i < n; ++i) {
      int v = r.val(A.at(i, k));
      if (v < pv) {
        pv = v;
        pi = i;
      }
    }
    if (pi < 0 || pv >= prec) continue;
    if (pi != k + 1) {
      for (int j = 0; j < n; ++j) std::swap(A.at(pi, j), A.at(k + 1, j));
      for (int i = 0; i < n; ++i) std::swap(A.at(i, pi), A.at(i, k + 1));
    }
    auto piv_unit_inv = r.inv_unit(r.unit_part(A.at(k + 1, k)));
    if (pv > 0) spent = std::max(spent, pv);
    for (int i = k + 2; i < n; ++i) {
      auto x = A.at(i, k);
      if (r.is_zero(x)) continue;
      if (r.val(x) < pv) throw Error("charpoly_hessenberg: pivot logic violated");
      auto f = r.mul(r.div_exact_p(x, pv), piv_unit_inv);
      for (int j = 0; j < n; ++j) A.at(i, j) = r.sub(A.at(i, j), r.mul(f, A.at(k + 1, j)));
      for (int j = 0; j < n; ++j) A.at(j, k + 1) = r.add(A.at(j, k + 1), r.mul(f, A.at(j, i)));
    }
  }
  std::vector<std::vector<typename R::Elem>> P(n + 1);
  P[0] = {r.one()};
  for (int k = 1; k <= n; ++k) {
    std::vector<typename R::Elem> pk(k + 1, r.zero());
    for (int j = 0; j < int(P[k - 1].size()); ++j) {
      pk[j + 1] = r.add(pk[j + 1], P[k - 1][j]);
      pk[j] = r.sub(pk[j], r.mul(A.at(k - 1, k - 1), P[k - 1][j]));
    }
    auto beta = r.one();
    for (int i = k - 2; i >= 0; --i) {
      beta = r.mul(beta, A.at(i + 1, i));
      auto coef = r.mul(A.at(i, k - 1), beta);
      if (!r.is_zero(coef))
        for (int j = 0; j < int(P[i].size()); ++j) pk[j] = r.sub(pk[j], r.mul(coef, P[i][j]));
    }
    P[k] = std::move(pk);
  }
  out.coeffs = std::move(P[n]);
  out.precision_spent = spent;
  return out;
}

template <class R>
CharpolyResult<R> charpoly_auto(const Mat<R>& A) {
  if (A.nr <= 64) {
    CharpolyResult<R> out;
    out.coeffs = charpoly_berkowitz(A);
    out.precision_spent = 0;
    return out;
  }
  return charpoly_hessenberg(A);
}

// exact division by a monic polynomial; remainder must vanish at precision
template <class R>
std::vector<typename R::Elem> poly_div_exact_monic(const R& r,
                                                   std::vector<typename R::Elem> a,
                                                   const std::vector<typename R::Elem>& b) {
  if (b.empty() || !r.eq(b.back(), r.one()))
    throw Error("poly_div_exact_monic: divisor not monic");
  if (a.size() < b.size()) throw Error("poly_div_exact_monic: degree underflow");
  std::vector<typename R::Elem> q(a.size() - b.size() + 1, r.zero());
  for (int i = int(a.size()) - 1; i >= int(b.size()) - 1; --i) {
    auto c = a[i];
    if (r.is_zero(c)) continue;
    int shift = i - int(b.size()) + 1;
    q[shift] = c;
    for (std::size_t j = 0; j < b.size(); ++j)
      a[shift + j] = r.sub(a[shift + j], r.mul(c, b[j]));
  }
  for (const auto& x : a)
    if (!r.is_zero(x)) throw Error("poly_div_exact_monic: remainder nonzero");
  return q;
}

// Horner evaluation of a polynomial (low-to-high coefficients) at a matrix.
template <class R>
Mat<R> poly_at_matrix(const std::vector<typename R::Elem>& f, const Mat<R>& A) {
  const R& r = *A.ring;
  const int n = A.nr;
  Mat<R> acc(r, n, n);
  if (f.empty()) return acc;
  for (int i = 0; i < n; ++i) acc.at(i, i) = f.back();
  for (int d = int(f.size()) - 2; d >= 0; --d) {
    acc = mat_mul(acc, A);
    for (int i = 0; i < n; ++i) acc.at(i, i) = r.add(acc.at(i, i), f[d]);
  }
  return acc;
}

// polynomial helpers (coefficients low-to-high)
template <class R>
std::vector<typename R::Elem> poly_mul(const R& r, const std::vector<typename R::Elem>& a,
                                       const std::vector<typename R::Elem>& b) {
  std::vector<typename R::Elem> c(a.size() + b.size() - 1, r.zero());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (r.is_zero(a[i])) continue;
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] = r.add(c[i + j], r.mul(a[i], b[j]));
  }
  return c;
}

template <class R>
int poly_agree_val(const R& r, const std::vector<typename R::Elem>& a,
                   const std::vector<typename R::Elem>& b) {
  int v = r.prec();
  std::size_t n = std::max(a.size(), b.size());
  for (std::size_t i = 0; i < n && v > 0; ++i) {
    auto x = i < a.size() ? a[i] : r.zero();
    auto y = i < b.size() ? b[i] : r.zero();
    v = std::min(v, r.val(r.sub(x, y)));
  }
  return v;
}

// valuation of resultant of two polynomials = sum of SNF exponents of the
// Sylvester matrix (determinant up to unit); prec if rank-deficient.
template <class R>
int resultant_val(const R& r, const std::vector<typename R::Elem>& f,
                  const std::vector<typename R::Elem>& g) {
  int df = int(f.size()) - 1, dg = int(g.size()) - 1;
  if (df < 0 || dg < 0) return r.prec();
  if (df == 0 || dg == 0) return 0;  // unit resultants for constants (monic use)
  Mat<R> S(r, df + dg, df + dg);
  for (int i = 0; i < dg; ++i)
    for (int j = 0; j <= df; ++j) S.at(i, i + j) = f[df - j];
  for (int i = 0; i < df; ++i)
    for (int j = 0; j <= dg; ++j) S.at(dg + i, i + j) = g[dg - j];
  auto snf = smith_normal_form(S);
  int total = 0;
  for (int e : snf.exponents) {
    if (e >= r.prec()) return r.prec();
    total += e;
  }
  return std::min(total, r.prec());
}

}  // namespace pmf
