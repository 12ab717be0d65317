#include "doctest.h"
#include "pmf/overconvergent.hpp"

#include <map>

using namespace pmf;

namespace {

// ladder provider: each weight is generated from E_{p-1} times the previous
// one plus weight-1 monomials, with full rows materialized
SpaceProvider make_provider(const ZRing& R, u64 N) {
  auto cache = std::make_shared<std::map<int, std::shared_ptr<ClassicalSpace>>>();
  auto self = std::make_shared<SpaceProvider>();
  const ZRing* rp = &R;
  *self = [cache, rp, N, self](int weight, int minq) -> std::shared_ptr<ClassicalSpace> {
    int want = std::max(minq, row_prefix_len(N, std::max(weight, 2)) + 16);
    auto it = cache->find(weight);
    if (it != cache->end() && it->second->ops_len >= std::min(want, minq == 0 ? 0 : want))
      if (minq == 0 || it->second->ops_len >= minq) return it->second;
    SpaceBuildOptions opt;
    opt.materialize_full = true;
    opt.full_len = want;
    int wprev = weight - int(rp->p() - 1);
    if (wprev >= 2) opt.predecessor = (*self)(wprev, want);
    auto sp = ClassicalSpace::build(*rp, N, weight, opt);
    (*cache)[weight] = sp;
    return sp;
  };
  return [self](int weight, int minq) { return (*self)(weight, minq); };
}

}  // namespace

TEST_CASE("inverse of E_{p-1} starts 1 - a_1 q") {
  ZRing R(7, 8);
  auto E = eis_weight_p_minus_1(R, 50);
  CHECK(R.to_plain(E.c[0]) == 1);
  CHECK(R.val(E.c[1]) >= 1);  // higher coefficients vanish mod p
  auto Einv = qs_invert(E);
  CHECK(R.to_plain(Einv.c[0]) == 1);
  CHECK(R.eq(Einv.c[1], R.neg(E.c[1])));
}

TEST_CASE("degenerate truncation recovers the classical space") {
  ZRing R(7, 8);
  auto provider = make_provider(R, 5);
  auto B = katz_basis(R, 5, 7, 4, 0, 7 * (row_prefix_len(5, 4) + 8) + 4, provider);
  CHECK(B.i_min == 0);
  CHECK(B.dim() == DimensionOracle(5).dim_Mk(4));
}

TEST_CASE("negative weight first layer") {
  ZRing R(11, 12);
  auto provider = make_provider(R, 7);
  // (N=7, p=11, w=-1): i_min = ceil(3/10) = 1, first layer from weight 9
  auto B = katz_basis(R, 7, 11, -1, 2, 11 * (row_prefix_len(7, 19) + 8) + 4, provider);
  CHECK(B.i_min == 1);
  CHECK(B.elements.front().layer == 1);
  CHECK(B.layer_space.front()->k == 9);
}

TEST_CASE("weight 3 overconvergent space at N=5, p=7") {
  ZRing R(7, 30);
  auto provider = make_provider(R, 5);
  int target = 20;  // enough to certify the slope-2 segment of the polygon
  int qprec = katz_min_qprec(5, 7, 3, target);
  auto S = u_matrix(R, 5, 7, 3, target, qprec, provider);
  CHECK(S.m_cert >= 8);

  // ordinary rank equals the classical T_p-ordinary rank (stabilization)
  ZRing R2(7, 10);
  auto cls = ClassicalSpace::build(R2, 5, 3, 0, true, 10 * row_prefix_len(5, 3));
  auto ord_cls = cls->ordinary_sublattice(cls->hecke_prime(7), nullptr);
  CHECK(S.ordinary_rank() == ord_cls.nr);

  // the slope multiset contains the stabilization slopes {0, k-1}
  CHECK(S.ordinary_rank() > 0);
  int crit_mult = S.certified_slope_mult(2);
  CHECK(crit_mult >= DimensionOracle(5).dim_Eis(3));  // critical Eisenstein stabilizations
  {
    // rank exactness: critical rank = ordinary rank at weight 2-k plus cusp rank
    auto Sneg = u_matrix(R, 5, 7, -1, 8, qprec, provider);
    CHECK(crit_mult == Sneg.ordinary_rank() + DimensionOracle(5).dim_Sk(3));
  }

  auto ord = ordinary_part(S, nullptr);
  CHECK(ord.nr == S.ordinary_rank());
  // U restricted to the ordinary part has unit determinant
  Mat<ZRing> Uo(R, ord.nr, ord.nr);
  {
    // restriction: solve U * ord_i in the ord basis
    auto ordT = mat_transpose(ord);
    auto snf = smith_normal_form(ordT);
    for (int i = 0; i < ord.nr; ++i) {
      auto img = mat_apply(S.U, ord.row(i));
      auto sol = solve_via_snf(snf, img);
      REQUIRE(sol.solvable);
      for (int j = 0; j < ord.nr; ++j) Uo.at(j, i) = sol.x[j];
    }
  }
  auto cp = charpoly_berkowitz(Uo);
  CHECK(R.val(cp[0]) == 0);  // unit determinant

  // charpoly independent of the complement choice
  auto S2 = u_matrix(R, 5, 7, 3, target, qprec, provider, 12345);
  int agree = R.prec();
  for (std::size_t j = 0; j < std::min(S.rev_charpoly.size(), S2.rev_charpoly.size()); ++j)
    agree = std::min(agree, R.val(R.sub(S.rev_charpoly[j], S2.rev_charpoly[j])));
  CHECK(agree >= S.m_cert);
}

TEST_CASE("hida control for the ordinary rank at weight -1") {
  ZRing R(7, 12);
  auto provider = make_provider(R, 5);
  int target = 4;
  int qprec = katz_min_qprec(5, 7, -1, target);
  auto S = u_matrix(R, 5, 7, -1, target, qprec, provider);
  // -1 = 5 mod (p-1): rank of the ordinary part matches weight 5 classically
  ZRing R2(7, 10);
  auto cls = ClassicalSpace::build(R2, 5, 5, 0, true, 10 * row_prefix_len(5, 5));
  auto ord_cls = cls->ordinary_sublattice(cls->hecke_prime(7), nullptr);
  CHECK(S.ordinary_rank() == ord_cls.nr);
}
