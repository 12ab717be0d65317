#include "pmf/theta.hpp"

#include <algorithm>
#include <numeric>

#include "pmf/slopes.hpp"

namespace pmf {

QSeries OcLattice::row_series(int i, int len) const {
  auto f = space->basis.series_of(rows.row(i), len);
  f.padic_prec = std::min(f.padic_prec, cert);
  return f;
}

QSeries OcLattice::series_of(const std::vector<u128>& coords, int len) const {
  const ZRing& R = *space->basis.R;
  std::vector<u128> big(space->dim(), 0);
  for (int i = 0; i < rows.nr; ++i) {
    if (R.is_zero(coords[i])) continue;
    for (int j = 0; j < rows.nc; ++j)
      big[j] = R.add(big[j], R.mul(coords[i], rows.at(i, j)));
  }
  auto f = space->basis.series_of(big, len);
  f.padic_prec = std::min(f.padic_prec, cert);
  return f;
}

LatticeOps::LatticeOps(const OcLattice& L, int window_len, int tol)
    : L_(&L), window_(window_len), tol_(tol) {
  const ZRing& R = *L.space->basis.R;
  row_q_.reserve(L.rank());
  for (int i = 0; i < L.rank(); ++i) row_q_.push_back(L.row_series(i, window_len));
  Mat<ZRing> rows(R, L.rank(), window_len);
  for (int i = 0; i < L.rank(); ++i)
    for (int j = 0; j < window_len; ++j) rows.at(i, j) = row_q_[i].c[j];
  row_ech_ = echelonize(rows, false);
  if (row_ech_.rank() != L.rank())
    throw SystemSingularAtPrecision("lattice rows dependent in the chosen window");
}

std::optional<std::vector<u128>> LatticeOps::coords_of(const QSeries& f, int* rv) const {
  const ZRing& R = *L_->space->basis.R;
  if (f.qprec < window_) throw InsufficientQPrecision("lattice window read");
  std::vector<u128> v(f.c.begin(), f.c.begin() + window_);
  auto c = coords_in_echelon(row_ech_, std::move(v), tol_, rv);
  if (!c) return std::nullopt;
  // echelon rows are unimodular combinations of lattice rows: translate back
  // by solving against the row matrix on pivot columns
  // (echelonize performs row ops only, so coordinates against the echelon
  // rows convert by the recorded pivots; rebuild via solve)
  Mat<ZRing> A(R, L_->rank(), L_->rank());
  for (int i = 0; i < L_->rank(); ++i)
    for (int t = 0; t < L_->rank(); ++t) A.at(t, i) = row_q_[i].c[row_ech_.pivot_col[t]];
  auto sol = solve_linear(A, *c);
  if (!sol.solvable || sol.denominator_val > 0) return std::nullopt;
  return sol.x;
}

u128 LatticeOps::a1_of(const std::vector<u128>& coords) const {
  const ZRing& R = *L_->space->basis.R;
  u128 s = 0;
  for (int i = 0; i < L_->rank(); ++i) s = R.add(s, R.mul(coords[i], row_q_[i].c[1]));
  return s;
}

Mat<ZRing> LatticeOps::from_images(const std::vector<QSeries>& images, const char* what) const {
  const ZRing& R = *L_->space->basis.R;
  Mat<ZRing> M(R, L_->rank(), L_->rank());
  for (int i = 0; i < int(images.size()); ++i) {
    int rv = 0;
    auto c = coords_of(images[i], &rv);
    if (!c)
      throw MembershipFailedAtPrecision(std::string(what) +
                                        ": image leaves the lattice (residue valuation " +
                                        std::to_string(rv) + ")");
    for (int j = 0; j < L_->rank(); ++j) M.at(j, i) = (*c)[j];
  }
  return M;
}

Mat<ZRing> LatticeOps::U() const {
  if (u_cache_) return *u_cache_;
  const u64 p = L_->space->basis.p;
  std::vector<QSeries> images;
  for (int i = 0; i < L_->rank(); ++i) {
    auto f = L_->row_series(i, window_ * int(p) + 1);
    images.push_back(qs_map_Up(f, p));
  }
  auto M = from_images(images, "U");
  u_cache_ = M;
  return M;
}

Mat<ZRing> LatticeOps::diamond(u64 d) const {
  auto it = dia_cache_.find(d);
  if (it != dia_cache_.end()) return it->second;
  const ZRing& R = *L_->space->basis.R;
  std::vector<QSeries> images;
  for (int i = 0; i < L_->rank(); ++i) {
    auto f = L_->space->basis.diamond_series_of(L_->rows.row(i), d, window_);
    f.padic_prec = std::min(f.padic_prec, L_->cert);
    images.push_back(std::move(f));
  }
  auto M = from_images(images, "diamond");
  dia_cache_.emplace(d, M);
  return M;
}

Mat<ZRing> LatticeOps::hecke_prime(u64 ell) const {
  auto it = hecke_cache_.find(ell);
  if (it != hecke_cache_.end()) return it->second;
  const ZRing& R = *L_->space->basis.R;
  const u64 N = L_->space->basis.N;
  const int w = L_->space->basis.w;
  std::vector<QSeries> images;
  if (N % ell == 0) {
    for (int i = 0; i < L_->rank(); ++i) {
      auto f = L_->row_series(i, window_ * int(ell) + 1);
      images.push_back(qs_map_Ul(f, ell));
    }
  } else {
    // ell^{w-1} as a p-adic unit power (w may be negative)
    u128 lw;
    if (w >= 1)
      lw = R.pow(R.from_int((long long)ell), u128(w - 1));
    else
      lw = R.pow(R.inv_unit(R.from_int((long long)ell)), u128(1 - w));
    for (int i = 0; i < L_->rank(); ++i) {
      auto f = L_->row_series(i, window_ * int(ell) + 1);
      auto df = L_->space->basis.diamond_series_of(L_->rows.row(i), ell % N, window_ / int(ell) + 1);
      QSeries img(R, window_);
      img.padic_prec = std::min(f.padic_prec, L_->cert);
      for (int j = 0; j < window_; ++j) {
        u128 x = f.c[std::size_t(j) * ell];
        if (j % int(ell) == 0) x = R.add(x, R.mul(lw, df.c[j / int(ell)]));
        img.c[j] = x;
      }
      images.push_back(std::move(img));
    }
  }
  auto M = from_images(images, "hecke");
  hecke_cache_.emplace(ell, M);
  return M;
}

Mat<ZRing> LatticeOps::hecke_Tn(u64 n, const Mat<ZRing>& at_p) const {
  const ZRing& R = *L_->space->basis.R;
  const u64 p = L_->space->basis.p;
  const u64 N = L_->space->basis.N;
  const int w = L_->space->basis.w;
  Mat<ZRing> M = Mat<ZRing>::identity(R, L_->rank());
  u64 rest = n;
  // p-part
  while (rest % p == 0) {
    rest /= p;
    M = mat_mul(M, at_p);
  }
  // parts dividing N
  for (u64 ell = 2; ell * ell <= rest || rest > 1;) {
    if (rest == 1) break;
    u64 q = 0;
    for (u64 d = 2; d * d <= rest; ++d)
      if (rest % d == 0) {
        q = d;
        break;
      }
    if (q == 0) q = rest;
    int e = 0;
    while (rest % q == 0) {
      rest /= q;
      ++e;
    }
    if (N % q == 0) {
      auto Uq = hecke_prime(q);
      for (int i = 0; i < e; ++i) M = mat_mul(M, Uq);
    } else {
      // T_{q^e} by the three-term recurrence
      auto Tq = hecke_prime(q);
      u128 qw;
      if (w >= 1)
        qw = R.pow(R.from_int((long long)q), u128(w - 1));
      else
        qw = R.pow(R.inv_unit(R.from_int((long long)q)), u128(1 - w));
      auto Dq = diamond(q % N);
      Mat<ZRing> prev = Mat<ZRing>::identity(R, L_->rank());
      Mat<ZRing> cur = Tq;
      for (int i = 1; i < e; ++i) {
        auto next = mat_sub(mat_mul(Tq, cur), mat_scale(mat_mul(Dq, prev), qw));
        prev = cur;
        cur = next;
      }
      M = mat_mul(M, cur);
    }
  }
  return M;
}

Mat<ZRing> scaled_inverse_uprime(const ZRing& R, const Mat<ZRing>& U_restr,
                                 const Mat<ZRing>& diamond_p, int k, int in_cert, int* cert) {
  const int r = U_restr.nr;
  if (r == 0) {
    if (cert) *cert = in_cert;
    return U_restr;
  }
  // exact lifting absorbs the adjugate-depth cancellations; the intrinsic
  // information loss of the scaled inverse is k-1
  BigRing B(R.p(), R.prec() + r * (k - 1) + 8);
  Mat<BigRing> Ub(B, r, r), Db(B, r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      Ub.at(i, j) = B.from_big(R.to_big(U_restr.at(i, j)));
      Db.at(i, j) = B.from_big(R.to_big(diamond_p.at(i, j)));
    }
  auto snf = smith_normal_form(Ub);
  Mat<ZRing> X(R, r, r);
  int worst = 0;
  for (int j = 0; j < r; ++j) {
    std::vector<bigint> rhs(r);
    for (int i = 0; i < r; ++i) rhs[i] = B.mul_p_pow(Db.at(i, j), k - 1);
    auto sol = solve_via_snf(snf, rhs);
    if (!sol.solvable)
      throw SegmentNotSeparated("U' inversion unsolvable (not pure slope k-1?)");
    worst = std::max(worst, sol.denominator_val);
    for (int i = 0; i < r; ++i) X.at(i, j) = R.from_big(sol.x[i]);
  }
  if (worst > r * (k - 1) + 4)
    throw SegmentNotSeparated("U' inversion spent more than the slope budget");
  if (cert) *cert = std::max(0, in_cert - (k - 1));
  return X;
}

namespace {

std::vector<u64> unit_reps(u64 N) {
  std::vector<u64> out;
  for (u64 d = 1; d < N; ++d)
    if (std::gcd(d, N) == 1) out.push_back(d);
  if (out.empty()) out.push_back(1);
  return out;
}

// SNF divisor profile of the Z_p-module spanned by the given matrices
std::vector<int> span_divisors(const ZRing& R, const std::vector<Mat<ZRing>>& mats, int r) {
  Mat<ZRing> V(R, int(mats.size()), r * r);
  for (std::size_t i = 0; i < mats.size(); ++i)
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b) V.at(int(i), a * r + b) = mats[i].at(a, b);
  auto S = smith_normal_form(V);
  std::vector<int> divs;
  for (int e : S.exponents)
    if (e < R.prec()) divs.push_back(e);
  return divs;
}

}  // namespace

HeckeDualResult hecke_dual_lattice(const OcLattice& L, LatticeOps& ops, const Mat<ZRing>& at_p,
                                   int bound, int window_len) {
  (void)window_len;
  const ZRing& R = *L.space->basis.R;
  const u64 N = L.space->basis.N;
  const int r = L.rank();
  HeckeDualResult out;

  auto spans_for = [&](int nb) {
    std::vector<Mat<ZRing>> mats;
    auto dreps = unit_reps(N);
    for (int n = 1; n <= nb; ++n) {
      auto Tn = ops.hecke_Tn(u64(n), at_p);
      for (u64 d : dreps) mats.push_back(mat_mul(ops.diamond(d), Tn));
    }
    return mats;
  };
  auto mats1 = spans_for(bound);
  auto div1 = span_divisors(R, mats1, r);
  auto mats2 = spans_for(2 * bound);
  auto div2 = span_divisors(R, mats2, r);
  if (div1 != div2) throw NotConverged("hecke span still growing at twice the bound");
  out.used_bound = bound;
  out.algebra_rank = int(div2.size());

  // a1 functionals of the full generator list
  Mat<ZRing> G(R, int(mats2.size()), r);
  for (std::size_t i = 0; i < mats2.size(); ++i) {
    // row = a1 o t_i: a1( t_i e_j )
    for (int j = 0; j < r; ++j) {
      std::vector<u128> col(r);
      for (int t = 0; t < r; ++t) col[t] = mats2[i].at(t, j);
      G.at(int(i), j) = ops.a1_of(col);
    }
  }
  auto S = smith_normal_form(G);
  if (S.rank != r) throw PairingDegenerate("a1 functionals do not span (rank " +
                                           std::to_string(S.rank) + " of " + std::to_string(r) + ")");
  // dual basis: columns of Vinv scaled by p^{-e_i}
  // new row j (in L-coordinates over Q_p): Vinv-col j / p^{e_j}
  OcLattice dual;
  dual.space = L.space;
  dual.rows = Mat<ZRing>(R, r, L.rows.nc);
  int emax = 0;
  for (int j = 0; j < r; ++j) {
    int e = S.exponents[j];
    emax = std::max(emax, e);
    // lattice coords in the ambient echelon basis: (Vinv col j) . L.rows / p^e
    std::vector<u128> amb(L.rows.nc, 0);
    for (int t = 0; t < r; ++t) {
      u128 c = S.Vinv.at(t, j);
      if (R.is_zero(c)) continue;
      for (int b = 0; b < L.rows.nc; ++b)
        amb[b] = R.add(amb[b], R.mul(c, L.rows.at(t, b)));
    }
    // integrality of the dual element: its ambient coordinates must divide
    for (int b = 0; b < L.rows.nc; ++b) {
      if (R.val(amb[b]) < e)
        throw PairingDegenerate("dual element not integral at this precision");
      dual.rows.at(j, b) = R.div_exact_p(amb[b], e);
    }
  }
  dual.cert = std::max(0, L.cert - emax);
  out.dual = dual;

  // pairing Gram matrix between a module basis of the algebra and the dual
  // basis: unimodularity is the perfection certificate
  {
    // module basis: rows of the span echelon lifted back to matrices
    Mat<ZRing> V(R, int(mats2.size()), r * r);
    for (std::size_t i = 0; i < mats2.size(); ++i)
      for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) V.at(int(i), a * r + b) = mats2[i].at(a, b);
    auto ve = echelonize(V, true);
    if (ve.rank() != r) throw PairingDegenerate("algebra module rank != lattice rank");
    LatticeOps dops(out.dual, ops.window(), std::max(0, dual.cert - 2));
    Mat<ZRing> Gram(R, r, r);
    for (int i = 0; i < r; ++i) {
      Mat<ZRing> ti(R, r, r);
      for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) ti.at(a, b) = ve.rows.at(i, a * r + b);
      // t_i acts on L-coordinates; dual rows are in ambient coords: express
      // dual rows in L-coordinates (they are Vinv columns / p^e by design)
      for (int j = 0; j < r; ++j) {
        std::vector<u128> dj(r);
        for (int t = 0; t < r; ++t) dj[t] = S.Vinv.at(t, j);
        auto img = mat_apply(ti, dj);
        u128 val = ops.a1_of(img);
        // divide by p^{e_j}
        if (R.val(val) < S.exponents[j])
          throw PairingDegenerate("gram entry not integral");
        Gram.at(i, j) = R.div_exact_p(val, S.exponents[j]);
      }
    }
    auto gs = smith_normal_form(Gram);
    out.gram_divisors = gs.exponents;
    out.gram_unimodular = (gs.rank_units == r);
  }
  return out;
}

AoData anti_ordinary_lattice(const OverconvergentSpace& space_k,
                             const OverconvergentSpace& space_2k, int k, int bound,
                             int window_len) {
  const ZRing& R = space_k.ring();
  AoData out;
  int cert0 = 0;
  auto ordk = ordinary_part(space_2k, &cert0);
  OcLattice L0;
  L0.space = &space_2k;
  L0.rows = ordk;
  L0.cert = std::min(cert0, space_2k.m_cert);
  LatticeOps ops0(L0, window_len, std::max(0, L0.cert - 2));
  auto U0 = ops0.U();
  // T[U]-dual integral lattice of the ordinary part
  auto dualres = hecke_dual_lattice(L0, ops0, U0, bound, window_len);
  out.source = dualres.dual;
  LatticeOps ops1(out.source, window_len, std::max(0, out.source.cert - 2));
  out.U_source = ops1.U();
  out.diamond_p_source = ops1.diamond(space_k.basis.p % space_k.basis.N);

  // theta image into the weight-k space
  const int prefix_k = space_k.basis.prefix;
  Mat<ZRing> img(R, out.source.rank(), space_k.dim());
  int cert = std::min(out.source.cert, space_k.basis.cert_prec);
  for (int i = 0; i < out.source.rank(); ++i) {
    auto f = out.source.row_series(i, prefix_k);
    auto tf = qs_theta(f, u64(k - 1));
    tf.padic_prec = cert;
    int rv = 0;
    auto c = space_k.basis.coords_of(tf, &rv);
    if (!c)
      throw NotContained("theta image misses the weight-k span (residue valuation " +
                         std::to_string(rv) + ")");
    for (int j = 0; j < space_k.dim(); ++j) img.at(i, j) = (*c)[j];
  }
  auto snf = smith_normal_form(img);
  if (snf.rank_units != out.source.rank())
    throw NotContained("theta image is not saturated at this precision");
  out.lattice.space = &space_k;
  out.lattice.rows = img;
  out.lattice.cert = std::min(cert, space_k.m_cert);
  out.cert = out.lattice.cert;
  return out;
}

ToData twist_ordinary_lattice(const OverconvergentSpace& space_k,
                              const ClassicalSpace& classical_k, bool cuspidal, int qlen) {
  const ZRing& R = space_k.ring();
  const u64 p = space_k.basis.p;
  const int k = classical_k.k;
  ToData out;
  out.cuspidal = cuspidal;
  // T_p-ordinary part of the classical space (cuspidal variant restricts first)
  auto Tp = classical_k.hecke_prime(p);
  int cert = classical_k.cert_prec;
  Mat<ZRing> base;
  if (cuspidal) {
    int ccert = 0;
    auto cusp = classical_k.cusp_sublattice(&ccert);
    cert = std::min(cert, ccert);
    if (cusp.nr == 0) {
      base = Mat<ZRing>(R, 0, classical_k.dim);
    } else {
      // restrict T_p to the cusp lattice and take its slope-0 part there
      auto snf = smith_normal_form(mat_transpose(cusp));
      Mat<ZRing> Tpc(R, cusp.nr, cusp.nr);
      for (int i = 0; i < cusp.nr; ++i) {
        auto sol = solve_via_snf(snf, mat_apply(Tp, cusp.row(i)));
        if (!sol.solvable) throw Error("cusp lattice is not T_p stable");
        for (int j = 0; j < cusp.nr; ++j) Tpc.at(j, i) = sol.x[j];
      }
      int oc = 0;
      auto ordc = classical_k.ordinary_sublattice(Tpc, &oc);
      cert = std::min(cert, oc);
      base = mat_mul(ordc, cusp);
    }
  } else {
    int oc = 0;
    base = classical_k.ordinary_sublattice(Tp, &oc);
    cert = std::min(cert, oc);
  }
  const int d = base.nr;
  if (d == 0) {
    out.lattice.space = &space_k;
    out.lattice.rows = Mat<ZRing>(R, 0, space_k.dim());
    out.lattice.cert = cert;
    out.U_to = Mat<ZRing>(R, 0, 0);
    out.Uprime_to = Mat<ZRing>(R, 0, 0);
    out.diamond_p_to = Mat<ZRing>(R, 0, 0);
    out.cert = cert;
    return out;
  }

  // old-space q-lattice: rows g(q) and g(q^p), saturated
  if (classical_k.ops_len < qlen)
    throw InsufficientQPrecision("classical space rows too short for the old lattice");
  int window = (int(p) + 1) * (row_prefix_len(classical_k.N, k) + 4);
  if (qlen < window * int(p) + 1)
    throw InsufficientQPrecision("old-space window exceeds qlen");
  std::vector<QSeries> old_rows;
  for (int i = 0; i < d; ++i) {
    auto g = classical_k.series_of(base.row(i), qlen);
    old_rows.push_back(g);
    old_rows.push_back(qs_expand_t(qs_truncate(g, (qlen - 1) / int(p) + 1), p));
  }
  for (auto& f : old_rows) f = qs_truncate(f, qlen);
  // saturated echelon on the window, tracking combinations
  Mat<ZRing> pre(R, int(old_rows.size()), window);
  for (std::size_t i = 0; i < old_rows.size(); ++i)
    for (int j = 0; j < window; ++j) pre.at(int(i), j) = old_rows[i].c[j];
  auto ech = echelonize(pre, true);
  if (ech.rank() != 2 * d)
    throw SystemSingularAtPrecision("old-space rows dependent at this precision");
  cert -= ech.sat_loss;
  // recover echelon rows as full q-series: solve prefix coordinates
  auto presnf = smith_normal_form(mat_transpose(pre));
  std::vector<QSeries> old_basis;
  for (int i = 0; i < 2 * d; ++i) {
    auto sol = solve_via_snf(presnf, ech.rows.row(i));
    if (!sol.solvable) throw Error("old-space echelon reconstruction failed");
    QSeries f(R, qlen);
    f.padic_prec = cert;
    for (std::size_t t = 0; t < old_rows.size(); ++t) {
      if (R.is_zero(sol.x[t])) continue;
      for (int n = 0; n < qlen; ++n) f.c[n] = R.add(f.c[n], R.mul(sol.x[t], old_rows[t].c[n]));
    }
    old_basis.push_back(std::move(f));
  }
  out.old_rows_q = ech.rows;

  // U on the old lattice, then the slope-(k-1) kernel
  Mat<ZRing> Uold(R, 2 * d, 2 * d);
  for (int i = 0; i < 2 * d; ++i) {
    auto uf = qs_map_Up(old_basis[i], p);
    std::vector<u128> v(uf.c.begin(), uf.c.begin() + window);
    int rv = 0;
    auto c = coords_in_echelon(ech, std::move(v), std::max(0, cert - 2), &rv);
    if (!c) throw SystemSingularAtPrecision("U image escapes the old lattice");
    for (int j = 0; j < 2 * d; ++j) Uold.at(j, i) = (*c)[j];
  }
  auto cp = charpoly_berkowitz(Uold);
  auto sf = slope_factor(R, cp, k - 1, 1, std::max(0, cert - 2));
  auto H = poly_at_matrix(sf.h_s, Uold);
  auto K = kernel_saturated(H);
  if (K.nr != int(sf.h_s.size()) - 1)
    throw SegmentNotSeparated("critical stabilization kernel rank mismatch");
  if (K.nr != d)
    throw RankMismatch("critical stabilization rank " + std::to_string(K.nr) + " != " +
                       std::to_string(d));

  // embed into the overconvergent space
  out.lattice.space = &space_k;
  out.lattice.rows = Mat<ZRing>(R, d, space_k.dim());
  const int prefix_k = space_k.basis.prefix;
  for (int i = 0; i < d; ++i) {
    QSeries f(R, qlen);
    f.padic_prec = std::max(0, cert - 2);
    for (int t = 0; t < 2 * d; ++t) {
      if (R.is_zero(K.at(i, t))) continue;
      for (int n = 0; n < qlen; ++n) f.c[n] = R.add(f.c[n], R.mul(K.at(i, t), old_basis[t].c[n]));
    }
    int rv = 0;
    auto c = space_k.basis.coords_of(qs_truncate(f, prefix_k), &rv);
    if (!c)
      throw NotContained("critical stabilization misses the weight-k span (residue " +
                         std::to_string(rv) + ")");
    for (int j = 0; j < space_k.dim(); ++j) out.lattice.rows.at(i, j) = (*c)[j];
  }
  out.lattice.cert = std::min({cert, space_k.m_cert, space_k.basis.cert_prec});
  // U restricted to the embedded lattice and the scaled inverse
  LatticeOps tops(out.lattice, std::max(prefix_k / 2, 2 * d + 8),
                  std::max(0, out.lattice.cert - 2));
  out.U_to = tops.U();
  out.diamond_p_to = tops.diamond(p % classical_k.N);
  int ucert = 0;
  out.Uprime_to = scaled_inverse_uprime(R, out.U_to, out.diamond_p_to, k, out.lattice.cert,
                                        &ucert);
  out.cert = ucert;
  return out;
}

CriticalSubspace critical_subspace(const OverconvergentSpace& space_k, const AoData& ao,
                                   const ToData& to, int k) {
  const ZRing& R = space_k.ring();
  CriticalSubspace out;
  auto stacked = lattice_stack(ao.lattice.rows, to.lattice.rows);
  auto V = lattice_saturate(stacked);
  int cert = std::min(ao.cert, to.cert);

  // generalized-eigenvector closure above the twist-ordinary eigenvalues:
  // for each simple unit eigenvalue of U' on `to`, solve (U - beta) x = v
  const int d = to.U_to.nr;
  if (d > 0) {
    auto cpU = charpoly_berkowitz(to.Uprime_to);
    // split off each residue root of the reduction mod p
    std::vector<std::pair<u128, std::vector<u128>>> eigen;  // (beta_U, eigvec in to-coords)
    {
      std::vector<u128> f = cpU;
      for (u64 c0 = 0; c0 < R.p(); ++c0) {
        // count multiplicity of root c0 mod p
        auto evalp = [&](const std::vector<u128>& g, u64 c) {
          u128 acc = 0;
          for (int i = int(g.size()) - 1; i >= 0; --i)
            acc = R.add(R.mul(acc, R.from_plain(c)), g[i]);
          return acc;
        };
        if (R.val(evalp(f, c0)) == 0) continue;
        // Newton-refine a simple root; skip if the derivative vanishes mod p
        std::vector<u128> df(f.size() - 1);
        for (std::size_t i = 1; i < f.size(); ++i) df[i - 1] = R.mul_small(f[i], u64(i));
        if (R.val(evalp(df, c0)) != 0) continue;  // multiple root cluster: no defect search
        u128 x = R.from_plain(c0);
        for (int it = 0; it < 40; ++it) {
          u128 fx = 0, dfx = 0;
          for (int i = int(f.size()) - 1; i >= 0; --i) fx = R.add(R.mul(fx, x), f[i]);
          for (int i = int(df.size()) - 1; i >= 0; --i) dfx = R.add(R.mul(dfx, x), df[i]);
          if (R.val(fx) >= R.prec()) break;
          x = R.sub(x, R.mul(fx, R.inv_unit(dfx)));
        }
        // eigenvector of U' for eigenvalue x
        Mat<ZRing> A = to.Uprime_to;
        for (int i = 0; i < d; ++i) A.at(i, i) = R.sub(A.at(i, i), x);
        auto kern = kernel_saturated(A);
        if (kern.nr != 1) continue;
        // U-eigenvalue on the same vector
        auto img = mat_apply(to.U_to, kern.row(0));
        int piv = -1;
        for (int t = 0; t < d; ++t)
          if (R.val(kern.at(0, t)) == 0) {
            piv = t;
            break;
          }
        if (piv < 0) continue;
        u128 beta = R.mul(img[piv], R.inv_unit(kern.at(0, piv)));
        eigen.emplace_back(beta, kern.row(0));
      }
    }
    for (auto& [beta, vec] : eigen) {
      // v in ambient echelon coordinates
      std::vector<u128> v(space_k.dim(), 0);
      for (int t = 0; t < d; ++t) {
        if (R.is_zero(vec[t])) continue;
        for (int j = 0; j < space_k.dim(); ++j)
          v[j] = R.add(v[j], R.mul(vec[t], to.lattice.rows.at(t, j)));
      }
      Mat<ZRing> A = space_k.U;
      for (int i = 0; i < space_k.dim(); ++i) A.at(i, i) = R.sub(A.at(i, i), beta);
      auto snf = smith_normal_form(A);
      for (int chain = 0; chain < 4; ++chain) {
        auto sol = solve_via_snf(snf, v);
        if (!sol.solvable) break;
        // new direction only if it extends the span
        Mat<ZRing> cand(R, V.nr + 1, space_k.dim());
        for (int i = 0; i < V.nr; ++i)
          for (int j = 0; j < space_k.dim(); ++j) cand.at(i, j) = V.at(i, j);
        for (int j = 0; j < space_k.dim(); ++j) cand.at(V.nr, j) = sol.x[j];
        auto sat = lattice_saturate(cand);
        if (sat.nr == V.nr) break;
        V = sat;
        ++out.defect;
        cert = std::min(cert, std::max(0, space_k.m_cert - sol.denominator_val));
        v = sol.x;
      }
    }
  }
  out.V.space = &space_k;
  out.V.rows = V;
  out.V.cert = std::min(cert, space_k.m_cert);
  out.cert = out.V.cert;
  return out;
}

Mat<ZRing> theta_matrix(const OcLattice& source, const OcLattice& target, int k, int len,
                        int tol) {
  const ZRing& R = *source.space->basis.R;
  LatticeOps tops(target, len, tol);
  Mat<ZRing> M(R, target.rank(), source.rank());
  for (int i = 0; i < source.rank(); ++i) {
    auto f = source.row_series(i, len);
    auto tf = qs_theta(f, u64(k - 1));
    tf.padic_prec = std::min(tf.padic_prec, tol);
    int rv = 0;
    auto c = tops.coords_of(tf, &rv);
    if (!c)
      throw NotContained("theta image outside the target lattice (residue " +
                         std::to_string(rv) + ")");
    for (int j = 0; j < target.rank(); ++j) M.at(j, i) = (*c)[j];
  }
  return M;
}

HodgeReport hodge_identity_check(const ZRing& R, const QSeries& f, const StabilizedPair& sp,
                                 u128 chi_p, int k, int terms, int tol) {
  HodgeReport rep;
  // tau_k(U) on f_alpha is alpha^2/(alpha^2 - p^{k-1} chi(p)) = 1/(1 - beta/alpha)
  u128 pk = R.mul_p_pow(chi_p, k - 1);
  u128 a2 = R.mul(sp.alpha, sp.alpha);
  u128 tauU = R.mul(a2, R.inv_unit(R.sub(a2, pk)));
  u128 b2 = R.mul(sp.beta, sp.beta);
  // tau_k(U') on f_beta: U' f_beta = alpha f_beta, same scalar form
  u128 tauUp = tauU;  // alpha^2/(alpha^2 - p^{k-1}chi(p)) with U'-eigenvalue alpha
  // coefficient of f_alpha: -p^{k-1} chi(p) / alpha^2 * tauU = -(beta/alpha) tauU
  u128 coefA = R.neg(R.mul(R.mul(pk, R.inv_unit(a2)), tauU));
  u128 coefB = tauUp;
  (void)b2;
  int n = std::min({terms, f.qprec, sp.f_alpha.qprec, sp.f_beta.qprec});
  rep.checked_terms = n;
  int agree = R.prec();
  for (int i = 0; i < n; ++i) {
    u128 rhs = R.add(R.mul(coefA, sp.f_alpha.c[i]), R.mul(coefB, sp.f_beta.c[i]));
    agree = std::min(agree, R.val(R.sub(f.c[i], rhs)));
  }
  rep.agreement_val = agree;
  rep.holds = agree >= tol;
  return rep;
}

}  // namespace pmf
