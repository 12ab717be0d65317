#include "pmf/biordinary.hpp"

#include <algorithm>
#include <numeric>

#include "pmf/lattice.hpp"

namespace pmf {

Mat<ZRing> restrict_to_rows(const Mat<ZRing>& op, const Mat<ZRing>& rows, const char* what) {
  const ZRing& R = *op.ring;
  if (rows.nr == 0) return Mat<ZRing>(R, 0, 0);
  auto snf = smith_normal_form(mat_transpose(rows));
  Mat<ZRing> M(R, rows.nr, rows.nr);
  for (int i = 0; i < rows.nr; ++i) {
    auto sol = solve_via_snf(snf, mat_apply(op, rows.row(i)));
    if (!sol.solvable)
      throw MembershipFailedAtPrecision(std::string(what) + ": sublattice not stable");
    for (int j = 0; j < rows.nr; ++j) M.at(j, i) = sol.x[j];
  }
  return M;
}

BOComplex build_complex(const OcLattice& crit, const Mat<ZRing>& Uprime_crit,
                        const Mat<ZRing>& U_crit, const OcLattice& ao, const OcLattice& to_sub,
                        int k, bool cuspidal) {
  const ZRing& R = *crit.rows.ring;
  BOComplex c;
  c.k = k;
  c.cuspidal = cuspidal;
  c.crit = crit;
  c.Uprime_crit = Uprime_crit;
  c.U_crit = U_crit;
  c.cert = std::min({crit.cert, ao.cert, to_sub.cert});

  auto embed = [&](const OcLattice& L, const char* what) {
    auto snf = smith_normal_form(mat_transpose(crit.rows));
    Mat<ZRing> M(R, L.rank(), crit.rank());
    int worst = 0;
    for (int i = 0; i < L.rank(); ++i) {
      auto sol = solve_via_snf(snf, L.rows.row(i));
      if (!sol.solvable)
        throw PrecisionMismatch(std::string(what) + " does not embed into the critical lattice");
      worst = std::max(worst, sol.denominator_val);
      for (int j = 0; j < crit.rank(); ++j) M.at(i, j) = sol.x[j];
    }
    c.cert = std::min(c.cert, R.prec() - worst);
    // injectivity with unit pivots
    auto s = smith_normal_form(M);
    if (s.rank_units != L.rank())
      throw PrecisionMismatch(std::string(what) + " inclusion is not saturated-injective");
    return M;
  };
  c.ao_in_crit = embed(ao, "anti-ordinary lattice");
  c.to_in_crit = embed(to_sub, "twist-ordinary lattice");
  return c;
}

int euler_characteristic(const BOComplex& c) {
  return (c.ao_in_crit.nr + c.to_in_crit.nr) - c.crit.rank();
}

CohomologyResult cohomology(const BOComplex& c) {
  const ZRing& R = *c.crit.rows.ring;
  CohomologyResult out;
  out.cert = c.cert;
  // H^0: kernel of the sum map = intersection of the sublattices (saturated)
  out.H0 = lattice_intersect(c.ao_in_crit, c.to_in_crit);
  out.H0_rank = out.H0.nr;
  // H^1: crit / (ao + to)
  auto sum = lattice_sum(c.ao_in_crit, c.to_in_crit);
  auto q = quotient_divisors(sum, c.crit.rank());
  out.H1_free_rank = q.free_rank;
  out.H1_torsion = q.torsion_exponents;
  out.torsion_trusted = true;
  for (int e : out.H1_torsion)
    if (e >= c.cert - 2) out.torsion_trusted = false;
  return out;
}

HeckeAlgebraData hecke_algebra(const BOComplex& c, LatticeOps& crit_ops, int bound) {
  const ZRing& R = *c.crit.rows.ring;
  const u64 N = c.crit.space->basis.N;
  const int r = c.crit.rank();
  HeckeAlgebraData out;
  out.bound = bound;

  std::vector<u64> dreps;
  for (u64 d = 1; d < N; ++d)
    if (std::gcd(d, N) == 1) dreps.push_back(d);

  auto build_gens = [&](int nb, std::vector<std::pair<u64, u64>>* labels,
                        std::vector<Mat<ZRing>>* mats) {
    for (int n = 1; n <= nb; ++n) {
      auto Tn = crit_ops.hecke_Tn(u64(n), c.Uprime_crit);
      for (u64 d : dreps) {
        if (labels) labels->emplace_back(d, u64(n));
        mats->push_back(mat_mul(crit_ops.diamond(d), Tn));
      }
    }
  };
  std::vector<Mat<ZRing>> mats1, mats2;
  build_gens(bound, &out.generators, &mats1);
  out.generator_mats = mats1;
  mats2 = mats1;
  {
    std::vector<std::pair<u64, u64>> dummy;
    std::vector<Mat<ZRing>> extra;
    for (int n = bound + 1; n <= 2 * bound; ++n) {
      auto Tn = crit_ops.hecke_Tn(u64(n), c.Uprime_crit);
      for (u64 d : dreps) extra.push_back(mat_mul(crit_ops.diamond(d), Tn));
    }
    for (auto& m : extra) mats2.push_back(m);
  }
  auto divisors_of = [&](const std::vector<Mat<ZRing>>& mats) {
    Mat<ZRing> V(R, int(mats.size()), r * r);
    for (std::size_t i = 0; i < mats.size(); ++i)
      for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) V.at(int(i), a * r + b) = mats[i].at(a, b);
    return smith_normal_form(V);
  };
  auto s1 = divisors_of(mats1);
  auto s2 = divisors_of(mats2);
  std::vector<int> d1, d2;
  for (int e : s1.exponents)
    if (e < R.prec()) d1.push_back(e);
  for (int e : s2.exponents)
    if (e < R.prec()) d2.push_back(e);
  if (d1 != d2) throw NotConverged("critical hecke algebra span still growing");

  // module basis from the saturated row space of the vectorized span
  Mat<ZRing> V(R, int(mats2.size()), r * r);
  for (std::size_t i = 0; i < mats2.size(); ++i)
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b) V.at(int(i), a * r + b) = mats2[i].at(a, b);
  auto ve = echelonize(V, true);
  for (int i = 0; i < ve.rank(); ++i) {
    Mat<ZRing> t(R, r, r);
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b) t.at(a, b) = ve.rows.at(i, a * r + b);
    out.module_basis.push_back(std::move(t));
  }
  // a1-pairing gram matrix between the module basis and the lattice basis
  const int s = int(out.module_basis.size());
  out.gram = Mat<ZRing>(R, s, r);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < r; ++j) {
      std::vector<u128> col(r);
      for (int t = 0; t < r; ++t) col[t] = out.module_basis[i].at(t, j);
      out.gram.at(i, j) = crit_ops.a1_of(col);
    }
  auto gs = smith_normal_form(out.gram);
  out.gram_divisors = gs.exponents;
  out.unimodular = (s == r) && (gs.rank_units == r);
  return out;
}

PsiData psi_map(const BOComplex& c, const HeckeAlgebraData& alg) {
  const ZRing& R = *c.crit.rows.ring;
  PsiData out;
  const int s = int(alg.module_basis.size());
  const int ra = c.ao_in_crit.nr, rt = c.to_in_crit.nr;
  Mat<ZRing> Psi(R, s, ra * ra + rt * rt);
  for (int i = 0; i < s; ++i) {
    auto Ma = restrict_to_rows(alg.module_basis[i], c.ao_in_crit, "psi/ao");
    auto Mt = restrict_to_rows(alg.module_basis[i], c.to_in_crit, "psi/to");
    for (int a = 0; a < ra; ++a)
      for (int b = 0; b < ra; ++b) Psi.at(i, a * ra + b) = Ma.at(a, b);
    for (int a = 0; a < rt; ++a)
      for (int b = 0; b < rt; ++b) Psi.at(i, ra * ra + a * rt + b) = Mt.at(a, b);
  }
  // kernel of psi on the module span: rows x with x . Psi = 0
  out.kernel = kernel_saturated(mat_transpose(Psi));
  out.kernel_rank = out.kernel.nr;
  // cokernel rank: rank of the span of images = s - kernel rank
  out.cokernel_rank = s - out.kernel_rank;
  for (int i = 0; i < out.kernel.nr; ++i) {
    Mat<ZRing> T(R, c.crit.rank(), c.crit.rank());
    for (int t = 0; t < s; ++t) {
      u128 x = out.kernel.at(i, t);
      if (R.is_zero(x)) continue;
      for (int a = 0; a < c.crit.rank(); ++a)
        for (int b = 0; b < c.crit.rank(); ++b)
          T.at(a, b) = R.add(T.at(a, b), R.mul(x, alg.module_basis[t].at(a, b)));
    }
    out.kernel_mats.push_back(std::move(T));
  }
  return out;
}

DegreeShiftReport degree_shift_check(const BOComplex& c, const CohomologyResult& coh,
                                     const PsiData& psi, LatticeOps& crit_ops) {
  const ZRing& R = *c.crit.rows.ring;
  DegreeShiftReport rep;
  auto sum = lattice_sum(c.ao_in_crit, c.to_in_crit);
  auto sum_snf = smith_normal_form(mat_transpose(sum));
  auto h0_snf = coh.H0.nr > 0 ? smith_normal_form(mat_transpose(coh.H0))
                              : smith_normal_form(Mat<ZRing>(R, c.crit.rank(), 0));
  for (const auto& T : psi.kernel_mats) {
    ++rep.checked;
    // zero operator trivially passes
    if (mat_is_zero(T)) continue;
    for (int j = 0; j < c.crit.rank(); ++j) {
      std::vector<u128> e(c.crit.rank(), 0);
      e[j] = R.one();
      auto img = mat_apply(T, e);
      auto sol = solve_via_snf(sum_snf, img);
      if (!sol.solvable) rep.contained = false;
      if (coh.H0.nr > 0) {
        auto sol0 = solve_via_snf(h0_snf, img);
        if (!sol0.solvable) rep.lands_in_H0 = false;
      } else {
        int v = R.prec();
        for (auto& x : img) v = std::min(v, R.val(x));
        if (v < std::max(0, c.cert - 2)) rep.lands_in_H0 = false;
      }
    }
    // induced map H1 -> H0 on the free part, T_2-equivariance
    if (coh.H0.nr > 0 && coh.H1_free_rank > 0) {
      // free H1 representatives: complement of sum inside crit
      auto ssnf = smith_normal_form(sum);
      // columns of Vinv at zero-at-precision positions span the cokernel
      std::vector<int> pos;
      const int steps = std::min(sum.nr, sum.nc);
      for (int i = 0; i < steps; ++i)
        if (ssnf.exponents[i] >= R.prec()) pos.push_back(i);
      for (int i = steps; i < sum.nc; ++i) pos.push_back(i);
      Mat<ZRing> reps(R, int(pos.size()), c.crit.rank());
      for (std::size_t t = 0; t < pos.size(); ++t)
        for (int j = 0; j < c.crit.rank(); ++j) reps.at(int(t), j) = ssnf.Vinv.at(j, pos[t]);
      // delta(T): reps -> H0 coordinates
      Mat<ZRing> delta(R, coh.H0.nr, reps.nr);
      bool ok = true;
      for (int i = 0; i < reps.nr && ok; ++i) {
        auto img = mat_apply(T, reps.row(i));
        auto sol = solve_via_snf(h0_snf, img);
        if (!sol.solvable) {
          ok = false;
          break;
        }
        for (int j = 0; j < coh.H0.nr; ++j) delta.at(j, i) = sol.x[j];
      }
      if (ok) {
        auto T2 = crit_ops.hecke_Tn(2, c.Uprime_crit);
        auto T2_H0 = restrict_to_rows(T2, coh.H0, "degree shift/H0");
        // T2 on the representatives modulo the sum lattice
        Mat<ZRing> T2reps(R, reps.nr, reps.nr);
        auto rep_snf = smith_normal_form(mat_transpose(reps));
        bool ok2 = true;
        for (int i = 0; i < reps.nr && ok2; ++i) {
          auto img = mat_apply(T2, reps.row(i));
          // reduce modulo sum: subtract the sum-part
          auto sol_sum = solve_via_snf(sum_snf, img);
          std::vector<u128> residue = img;
          if (sol_sum.solvable) {
            // img lies entirely in the sum: class is zero
            for (auto& x : residue) x = R.zero();
          } else {
            // project: solve img = a*reps + b*sum jointly
            Mat<ZRing> joint(R, c.crit.rank(), reps.nr + sum.nr);
            for (int a = 0; a < reps.nr; ++a)
              for (int j = 0; j < c.crit.rank(); ++j) joint.at(j, a) = reps.at(a, j);
            for (int b = 0; b < sum.nr; ++b)
              for (int j = 0; j < c.crit.rank(); ++j) joint.at(j, reps.nr + b) = sum.at(b, j);
            auto js = solve_linear(joint, img);
            if (!js.solvable) {
              ok2 = false;
              break;
            }
            for (int a = 0; a < reps.nr; ++a) T2reps.at(a, i) = js.x[a];
            continue;
          }
          for (int a = 0; a < reps.nr; ++a) T2reps.at(a, i) = R.zero();
        }
        if (ok2) {
          auto lhs = mat_mul(delta, T2reps);
          auto rhs = mat_mul(T2_H0, delta);
          int agree = mat_agree_val(lhs, rhs);
          if (agree < std::max(0, c.cert - 2)) rep.equivariant = false;
        }
      }
    }
  }
  return rep;
}

}  // namespace pmf
