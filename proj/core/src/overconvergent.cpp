#include "pmf/overconvergent.hpp"

#include <algorithm>
#include <random>

#include "pmf/ntt.hpp"
#include "pmf/slopes.hpp"

namespace pmf {

namespace {

struct ComboEchelon {
  Echelon<ZRing> ech;
  Mat<ZRing> combo;
  std::vector<int> denom;
};

// saturated unit-pivot echelon over the given rows, tracking each echelon row
// as an integral combination of the inputs divided by a p-power
ComboEchelon echelon_with_combo(const ZRing& R, const std::vector<const QSeries*>& input,
                                int prefix, const char* what) {
    // cancel common p-content of the combination against its denominator
    auto normalize_combo = [&R](std::vector<u128>& cvec, int& dv) {
      if (dv == 0) return;
      int c = R.prec();
      for (const auto& x : cvec) {
        c = std::min(c, R.val(x));
        if (c == 0) return;
      }
      c = std::min(c, dv);
      if (c == 0) return;
      for (auto& x : cvec) x = R.div_exact_p(x, c);
      dv -= c;
    };

  const int D = int(input.size());
  std::vector<std::vector<u128>> rows, combos;
  std::vector<int> pivots, denoms;
  int sat_loss = 0;
  for (int t = 0; t < D; ++t) {
    if (input[t]->qprec < prefix) throw InsufficientQPrecision(std::string(what) + ": short row");
    std::vector<u128> v(input[t]->c.begin(), input[t]->c.begin() + prefix);
    std::vector<u128> cb(D, 0);
    cb[t] = R.one();
    int dn = 0;
    for (std::size_t s = 0; s < rows.size(); ++s) {
      u128 c = v[pivots[s]];
      if (R.is_zero(c)) continue;
      for (int j = 0; j < prefix; ++j) v[j] = R.sub(v[j], R.mul(c, rows[s][j]));
      int d2 = std::max(dn, denoms[s]);
      if (d2 > dn)
        for (auto& x : cb) x = R.mul_p_pow(x, d2 - dn);
      for (int j = 0; j < D; ++j)
        cb[j] = R.sub(cb[j], R.mul(c, R.mul_p_pow(combos[s][j], d2 - denoms[s])));
      dn = d2;
    }
    int cv = R.prec();
    for (int j = 0; j < prefix && cv > 0; ++j) cv = std::min(cv, R.val(v[j]));
    if (cv >= R.prec())
      throw SystemSingularAtPrecision(std::string(what) + ": dependent row at this precision");
    if (cv > 0) {
      for (int j = 0; j < prefix; ++j) v[j] = R.div_exact_p(v[j], cv);
      dn += cv;
      sat_loss = std::max(sat_loss, cv);
    }
    if (dn >= R.prec()) throw PrecisionExhausted("saturation denominators reached the precision");
    int pj = -1;
    for (int j = 0; j < prefix; ++j)
      if (R.val(v[j]) == 0) {
        pj = j;
        break;
      }
    u128 inv = R.inv_unit(v[pj]);
    for (int j = 0; j < prefix; ++j) v[j] = R.mul(v[j], inv);
    for (auto& x : cb) x = R.mul(x, inv);
    for (std::size_t s = 0; s < rows.size(); ++s) {
      u128 c = rows[s][pj];
      if (R.is_zero(c)) continue;
      for (int j = 0; j < prefix; ++j) rows[s][j] = R.sub(rows[s][j], R.mul(c, v[j]));
      int d2 = std::max(denoms[s], dn);
      if (d2 > denoms[s])
        for (auto& x : combos[s]) x = R.mul_p_pow(x, d2 - denoms[s]);
      for (int j = 0; j < D; ++j)
        combos[s][j] = R.sub(combos[s][j], R.mul(c, R.mul_p_pow(cb[j], d2 - dn)));
      denoms[s] = d2;
      normalize_combo(combos[s], denoms[s]);
    }
    normalize_combo(cb, dn);
    rows.push_back(std::move(v));
    combos.push_back(std::move(cb));
    pivots.push_back(pj);
    denoms.push_back(dn);
  }
  ComboEchelon out;
  out.ech.rows = Mat<ZRing>(R, D, prefix);
  out.ech.sat_loss = sat_loss;
  out.combo = Mat<ZRing>(R, D, D);
  out.denom = denoms;
  for (int i = 0; i < D; ++i) {
    out.ech.pivot_col.push_back(pivots[i]);
    for (int j = 0; j < prefix; ++j) out.ech.rows.at(i, j) = rows[i][j];
    for (int j = 0; j < D; ++j) out.combo.at(i, j) = combos[i][j];
  }
  return out;
}

// U-matrix in echelon-basis coordinates: apply U to element series, read
// coordinates, then conjugate by the element->echelon transform
Mat<ZRing> assemble_u(const ZRing& R, const std::vector<const QSeries*>& series,
                      const Echelon<ZRing>& ech, const Mat<ZRing>& combo,
                      const std::vector<int>& denom, int tol, u64 p) {
  const int D = int(series.size());
  Mat<ZRing> M(R, D, D);  // column t = ech-coords of U(element_t)
  for (int t = 0; t < D; ++t) {
    auto uf = qs_map_Up(*series[t], p);
    if (uf.qprec < ech.rows.nc)
      throw InsufficientQPrecision("assemble_u: qprec below p * prefix");
    int rv = 0;
    std::vector<u128> v(uf.c.begin(), uf.c.begin() + ech.rows.nc);
    auto coords = coords_in_echelon(ech, std::move(v), tol, &rv);
    if (!coords)
      throw SystemSingularAtPrecision("U image escapes the Katz span (residue valuation " +
                                      std::to_string(rv) + ")");
    for (int i = 0; i < D; ++i) M.at(i, t) = (*coords)[i];
  }
  // U_ech column i = sum_t combo[i][t]/p^{denom_i} * M col t
  Mat<ZRing> U(R, D, D);
  for (int i = 0; i < D; ++i) {
    std::vector<u128> acc(D, 0);
    for (int t = 0; t < D; ++t) {
      u128 c = combo.at(i, t);
      if (R.is_zero(c)) continue;
      for (int r = 0; r < D; ++r) acc[r] = R.add(acc[r], R.mul(c, M.at(r, t)));
    }
    for (int r = 0; r < D; ++r) U.at(r, i) = R.div_exact_p(acc[r], denom[i]);
  }
  return U;
}

}  // namespace

QSeries KatzBasis::series_of(const std::vector<u128>& coords, int len) const {
  const ZRing& r = *R;
  int dmax = 0;
  for (std::size_t i = 0; i < coords.size(); ++i)
    if (!r.is_zero(coords[i])) dmax = std::max(dmax, denom[i]);
  std::vector<u128> elem(elements.size(), 0);
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (r.is_zero(coords[i])) continue;
    u128 ci = r.mul_p_pow(coords[i], dmax - denom[i]);
    for (std::size_t t = 0; t < elem.size(); ++t)
      elem[t] = r.add(elem[t], r.mul(ci, combo.at(int(i), int(t))));
  }
  QSeries out(r, len);
  out.padic_prec = cert_prec;
  for (int li = i_min; li <= i_max; ++li) {
    const auto& sp = layer_space[li - i_min];
    std::vector<u128> layer_coords(sp->dim, 0);
    bool any = false;
    for (std::size_t t = 0; t < elements.size(); ++t) {
      if (elements[t].layer != li || r.is_zero(elem[t])) continue;
      layer_coords[elements[t].space_row] = r.add(layer_coords[elements[t].space_row], elem[t]);
      any = true;
    }
    if (!any) continue;
    auto w_series = sp->series_of(layer_coords, len);
    QSeries term = (li == 0) ? w_series
                             : qs_mul_trunc(w_series, qs_truncate(einv_pow[li], len), len);
    for (int n = 0; n < len; ++n) out.c[n] = r.add(out.c[n], term.c[n]);
  }
  if (dmax > 0)
    for (int n = 0; n < len; ++n) out.c[n] = r.div_exact_p(out.c[n], dmax);
  return out;
}

QSeries KatzBasis::diamond_series_of(const std::vector<u128>& coords, u64 d, int len) const {
  const ZRing& r = *R;
  int dmax = 0;
  for (std::size_t i = 0; i < coords.size(); ++i)
    if (!r.is_zero(coords[i])) dmax = std::max(dmax, denom[i]);
  std::vector<u128> elem(elements.size(), 0);
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (r.is_zero(coords[i])) continue;
    u128 ci = r.mul_p_pow(coords[i], dmax - denom[i]);
    for (std::size_t t = 0; t < elem.size(); ++t)
      elem[t] = r.add(elem[t], r.mul(ci, combo.at(int(i), int(t))));
  }
  QSeries out(r, len);
  out.padic_prec = cert_prec;
  for (int li = i_min; li <= i_max; ++li) {
    const auto& sp = layer_space[li - i_min];
    std::vector<u128> layer_coords(sp->dim, 0);
    bool any = false;
    for (std::size_t t = 0; t < elements.size(); ++t) {
      if (elements[t].layer != li || r.is_zero(elem[t])) continue;
      layer_coords[elements[t].space_row] = r.add(layer_coords[elements[t].space_row], elem[t]);
      any = true;
    }
    if (!any) continue;
    auto w_series = sp->diamond_series(layer_coords, d, len);
    QSeries term = (li == 0) ? w_series
                             : qs_mul_trunc(w_series, qs_truncate(einv_pow[li], len), len);
    for (int n = 0; n < len; ++n) out.c[n] = r.add(out.c[n], term.c[n]);
  }
  if (dmax > 0)
    for (int n = 0; n < len; ++n) out.c[n] = r.div_exact_p(out.c[n], dmax);
  return out;
}

std::optional<std::vector<u128>> KatzBasis::coords_of(const QSeries& f, int* residue_val) const {
  if (f.qprec < prefix) throw InsufficientQPrecision("katz coords need the full prefix");
  std::vector<u128> v(f.c.begin(), f.c.begin() + prefix);
  return coords_in_echelon(ech, std::move(v), std::min(cert_prec, f.padic_prec), residue_val);
}

KatzBasis katz_basis(const ZRing& R, u64 N, u64 p, int w, int i_max, int qprec,
                     const SpaceProvider& provider, u64 complement_seed) {
  if (p < 5 || N < 5 || N % p == 0) throw ConfigError("katz_basis needs p >= 5, N >= 5, p∤N");
  KatzBasis B;
  B.R = &R;
  B.N = N;
  B.p = p;
  B.w = w;
  B.i_min = w >= 2 ? 0 : int(((2 - (long long)w) + (long long)(p - 1) - 1) / (long long)(p - 1));
  B.i_max = i_max;
  B.qprec = qprec;
  if (B.i_min > B.i_max) throw ConfigError("katz_basis: i_max below i_min");

  QSeries Einv = qs_invert(eis_weight_p_minus_1(R, qprec));
  B.einv_pow.resize(i_max + 1, QSeries(R, 1));
  B.einv_pow[0] = QSeries(R, qprec);
  B.einv_pow[0].c[0] = R.one();
  if (i_max >= 1) B.einv_pow[1] = Einv;
  for (int i = 2; i <= i_max; ++i) B.einv_pow[i] = qs_mul(B.einv_pow[i - 1], Einv);

  int top_weight = w + i_max * int(p - 1);
  B.prefix = row_prefix_len(N, std::max(top_weight, 2)) + 8;
  if (qprec < int(p) * B.prefix)
    throw InsufficientQPrecision("katz_basis: qprec below p * prefix");

  int cert = R.prec();
  std::mt19937_64 rng(complement_seed);
  for (int i = B.i_min; i <= i_max; ++i) {
    int wi = w + i * int(p - 1);
    auto sp = provider(wi, qprec);
    B.layer_space.push_back(sp);
    cert = std::min(cert, sp->cert_prec);
    int wprev = wi - int(p - 1);
    std::vector<int> prev_pivots;
    if (wprev == 0)
      prev_pivots = {0};
    else if (wprev >= 1)
      prev_pivots = provider(wprev, 0)->pivots();
    for (int row = 0; row < sp->dim; ++row) {
      if (std::find(prev_pivots.begin(), prev_pivots.end(), sp->pivots()[row]) !=
          prev_pivots.end())
        continue;
      KatzBasis::Element el;
      el.layer = i;
      el.space_row = row;
      B.elements.push_back(el);
    }
  }

  B.series.resize(B.elements.size(), QSeries(R, 1));
  for (std::size_t t = 0; t < B.elements.size(); ++t) {
    const auto& el = B.elements[t];
    const auto& sp = B.layer_space[el.layer - B.i_min];
    QSeries wrow = sp->basis_series(el.space_row, qprec);
    B.series[t] =
        (el.layer == 0) ? wrow : qs_mul_trunc(wrow, qs_truncate(B.einv_pow[el.layer], qprec), qprec);
    B.series[t].padic_prec = std::min(B.series[t].padic_prec, sp->cert_prec);
  }
  if (complement_seed != 0) {
    // complement freedom: shift each element by elements of lower layers,
    // which is a shift by E_{p-1} * (previous-weight span)
    for (std::size_t t = 0; t < B.elements.size(); ++t) {
      std::vector<std::size_t> lower;
      for (std::size_t s = 0; s < B.elements.size(); ++s)
        if (B.elements[s].layer < B.elements[t].layer) lower.push_back(s);
      if (lower.empty()) continue;
      std::size_t s = lower[rng() % lower.size()];
      u128 c = R.from_plain(rng() % 4096);
      for (int n = 0; n < qprec; ++n)
        B.series[t].c[n] = R.add(B.series[t].c[n], R.mul(c, B.series[s].c[n]));
    }
  }

  std::vector<const QSeries*> ptrs;
  for (const auto& s : B.series) ptrs.push_back(&s);
  auto ce = echelon_with_combo(R, ptrs, B.prefix, "katz basis");
  B.ech = std::move(ce.ech);
  B.combo = std::move(ce.combo);
  B.denom = std::move(ce.denom);
  B.cert_prec = cert - B.ech.sat_loss;
  return B;
}

int OverconvergentSpace::certified_slope_mult(int s) const {
  // a certified answer needs either a fully certified polygon or a certified
  // slope strictly above the target (the uncertified block holds only larger
  // valuations)
  bool dominated = np.fully_certified;
  for (const auto& seg : np.segments)
    if (!seg.ambiguous && seg.num > (long long)s * seg.den) dominated = true;
  if (!dominated) return -1;
  for (const auto& seg : np.segments)
    if (!seg.ambiguous && seg.den == 1 && seg.num == s) return seg.mult;
  return 0;
}

int OverconvergentSpace::ordinary_rank() const {
  for (const auto& seg : np.segments)
    if (!seg.ambiguous && seg.num == 0) return seg.mult;
  return 0;
}

int katz_layer_budget(u64 p, int target_prec) {
  // decay-rate budget with slack so the assembly tolerance clears the
  // truncation residues
  return int((u64(target_prec + 4) * (p + 1) + p - 1) / p) + 3;
}

int katz_top_weight(u64 N, u64 p, int w, int target_prec) {
  (void)N;
  return w + (katz_layer_budget(p, target_prec) + 2) * int(p - 1);
}

int katz_min_qprec(u64 N, u64 p, int w, int target_prec) {
  int top = std::max(katz_top_weight(N, p, w, target_prec), 2);
  return int(p) * (row_prefix_len(N, top) + 8) + 1;
}

OverconvergentSpace u_matrix(const ZRing& R, u64 N, u64 p, int w, int target_prec, int qprec,
                             const SpaceProvider& provider, u64 complement_seed) {
  OverconvergentSpace S;
  int i_base = katz_layer_budget(p, target_prec);
  S.basis = katz_basis(R, N, p, w, i_base + 2, qprec, provider, complement_seed);

  std::vector<const QSeries*> full_ptrs;
  for (const auto& s : S.basis.series) full_ptrs.push_back(&s);
  int tol = std::min(target_prec, S.basis.cert_prec);
  S.U = assemble_u(R, full_ptrs, S.basis.ech, S.basis.combo, S.basis.denom, tol, p);
  auto cp_full = charpoly_hessenberg(S.U);
  S.charpoly_spent = cp_full.precision_spent;
  std::vector<u128> rev(cp_full.coeffs.rbegin(), cp_full.coeffs.rend());

  // truncated comparison space (two fewer layers)
  {
    std::vector<const QSeries*> ptr2;
    for (std::size_t t = 0; t < S.basis.elements.size(); ++t)
      if (S.basis.elements[t].layer <= i_base) ptr2.push_back(&S.basis.series[t]);
    auto ce2 = echelon_with_combo(R, ptr2, S.basis.prefix, "katz truncation");
    auto U2 = assemble_u(R, ptr2, ce2.ech, ce2.combo, ce2.denom, tol, p);
    auto cp2 = charpoly_hessenberg(U2);
    std::vector<u128> rev2(cp2.coeffs.rbegin(), cp2.coeffs.rend());
    int agree = R.prec();
    for (std::size_t j = 0; j < std::min(rev.size(), rev2.size()); ++j)
      agree = std::min(agree, R.val(R.sub(rev[j], rev2[j])));
    S.m_cert = std::min({agree, target_prec, S.basis.cert_prec});
  }
  if (S.m_cert <= 0)
    throw CertificationFailed("characteristic series unstable under i_max growth");
  S.rev_charpoly = rev;
  {
    std::vector<int> vals(cp_full.coeffs.size());
    for (std::size_t i = 0; i < cp_full.coeffs.size(); ++i)
      vals[i] = std::min(R.val(cp_full.coeffs[i]), S.m_cert);
    S.np = newton_polygon_from_vals(vals, S.m_cert);
  }
  return S;
}

Mat<ZRing> ordinary_part(const OverconvergentSpace& space, int* cert) {
  const ZRing& R = space.ring();
  std::vector<u128> cp(space.rev_charpoly.rbegin(), space.rev_charpoly.rend());
  auto sf = slope_factor(R, cp, 0, 1, space.m_cert);
  if (int(sf.h_s.size()) <= 1) {
    if (cert) *cert = space.m_cert;
    return Mat<ZRing>(R, 0, space.dim());
  }
  auto H = poly_at_matrix(sf.h_s, space.U);
  auto K = kernel_saturated(H);
  if (K.nr != int(sf.h_s.size()) - 1)
    throw SegmentNotSeparated("ordinary kernel rank mismatch");
  if (cert) *cert = space.m_cert;
  return K;
}

}  // namespace pmf
