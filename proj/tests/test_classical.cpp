#include "doctest.h"
#include "pmf/classical.hpp"

using namespace pmf;

TEST_CASE("dimension oracle at small levels") {
  DimensionOracle d5(5);
  CHECK(d5.genus == 0);
  CHECK(d5.num_cusps == 4);
  CHECK(d5.dim_Mk(2) == 3);  // genus 0, 4 cusps, no cusp forms
  CHECK(d5.dim_Sk(2) == 0);
  CHECK(d5.dim_Mk(3) == 4);
  CHECK(d5.dim_Mk(1) == 2);
  CHECK(d5.dim_Mk(5) == 6);
  DimensionOracle d7(7);
  CHECK(d7.genus == 0);
  CHECK(d7.num_cusps == 6);
  CHECK(d7.dim_Mk(2) == 5);
  CHECK(d7.dim_Mk(3) == 7);
  CHECK(d7.dim_Sk(3) == 1);  // the CM eta-product form
  CHECK(d7.dim_Mk(9) == 19);
  CHECK(sturm_bound(5, 7, 3) == 48);
}

TEST_CASE("classical space of weight 2 level 5") {
  ZRing R(7, 8);
  auto S = ClassicalSpace::build(R, 5, 2, 0, false, 0);
  CHECK(S->dim == 3);
  for (int i = 0; i < S->dim; ++i) CHECK(R.val(S->ech.rows.at(i, S->ech.pivot_col[i])) == 0);
}

static const DirichletChar& quad_char_mod7(const LevelData& L) {
  for (const auto& c : L.chars) {
    auto v3 = c.value_exp(3);
    if (!c.trivial() && v3 && (*v3 * 2) % L.group.exponent == 0 && *v3 != 0) return c;
  }
  throw Error("quadratic character not found");
}

TEST_CASE("weight 3 level 7: cusp form is the eta product") {
  ZRing R(11, 10);
  int prefix = row_prefix_len(7, 3);
  auto S = ClassicalSpace::build(R, 7, 3, 0, true, 12 * prefix);
  REQUIRE(S->dim == 7);
  int cert = 0;
  auto cusp = S->cusp_sublattice(&cert);
  REQUIRE(cusp.nr == 1);
  CHECK(cert >= 8);
  auto f = S->series_of(cusp.row(0), 40);
  CHECK(R.val(f.c[0]) >= cert);  // cusp rows have a_0 = 0
  auto eta = eta_product(R, {{1, 3}, {7, 3}}, 40);
  auto scale = f.c[1];
  CHECK(R.val(scale) == 0);
  for (int n = 0; n < 40; ++n)
    CHECK(R.val(R.sub(f.c[n], R.mul(scale, eta.c[n]))) >= cert);
  auto T2 = S->hecke_prime(2);
  auto img = mat_apply(T2, cusp.row(0));
  for (int j = 0; j < S->dim; ++j)
    CHECK(R.val(R.sub(img[j], R.mul(R.from_int(-3), cusp.at(0, j)))) >= cert);
}

TEST_CASE("diamond operators compose and commute with hecke") {
  ZRing R(11, 8);
  auto S = ClassicalSpace::build(R, 7, 3, 0, true, 3 * row_prefix_len(7, 3));
  auto d2 = S->diamond(2), d3 = S->diamond(3), d6 = S->diamond(6);
  CHECK(mat_agree_val(mat_mul(d2, d3), d6) >= S->cert_prec);
  auto T2 = S->hecke_prime(2);
  CHECK(mat_agree_val(mat_mul(T2, d3), mat_mul(d3, T2)) >= S->cert_prec);
  auto T3 = S->hecke_prime(3);
  CHECK(mat_agree_val(mat_mul(T2, T3), mat_mul(T3, T2)) >= S->cert_prec);
}

TEST_CASE("eisenstein eigenvector of T_2 at weight 3 level 7") {
  ZRing R(11, 8);
  auto S = ClassicalSpace::build(R, 7, 3, 0, true, 3 * row_prefix_len(7, 3));
  const auto& quad = quad_char_mod7(*S->level);
  auto E = eisenstein_qexp(S->level->cyclo, S->level->chars[0], quad, 3, 1, S->prefix);
  QSeries q(R, S->prefix);
  for (int n = 0; n < S->prefix; ++n) q.c[n] = R.from_big(E.coords[0][n]);
  {
    bigint num = boost::multiprecision::numerator(E.a0[0]);
    bigint den = boost::multiprecision::denominator(E.a0[0]);
    REQUIRE(val_of_big(den, 11, 8) == 0);
    q.c[0] = R.mul(R.from_big(num), R.inv_unit(R.from_big(den)));
  }
  auto coords = S->coords_of(q);
  REQUIRE(coords.has_value());
  auto T2 = S->hecke_prime(2);
  auto img = mat_apply(T2, *coords);
  for (int j = 0; j < S->dim; ++j)
    CHECK(R.val(R.sub(img[j], R.mul(R.from_int(5), (*coords)[j]))) >= S->cert_prec);
}

TEST_CASE("T_11-ordinary rank of weight 3 level 7 is full") {
  ZRing R(11, 10);
  int prefix = row_prefix_len(7, 3);
  auto S = ClassicalSpace::build(R, 7, 3, 0, true, 12 * prefix);
  auto Tp = S->hecke_prime(11);
  int cert = 0;
  auto ord = S->ordinary_sublattice(Tp, &cert);
  CHECK(ord.nr == 7);  // a_11(eta) = -6 is a unit, Eisenstein eigenvalues are units
}

TEST_CASE("stabilized pair of the eta product at p = 11") {
  ZRing R(11, 10);
  auto f = eta_product(R, {{1, 3}, {7, 3}}, 400);
  CHECK(R.eq(f.c[11], R.from_int(-6)));  // a_11 = -6; 11 splits (square mod 7)
  auto sp = stabilized_pair(R, f, R.from_int(-6), R.one(), 3, 11);
  CHECK(R.val(sp.alpha) == 0);
  CHECK(R.val(sp.beta) == 2);  // val(alpha) + val(beta) = k - 1
  CHECK(R.eq(R.add(sp.alpha, sp.beta), R.from_int(-6)));
  CHECK(R.eq(R.mul(sp.alpha, sp.beta), R.from_int(121)));
  for (int n = 1; n < 30; ++n)
    CHECK(R.eq(sp.f_beta.c[11 * n], R.mul(sp.beta, sp.f_beta.c[n])));
  auto det = R.sub(R.mul(sp.u_matrix.at(0, 0), sp.u_matrix.at(1, 1)),
                   R.mul(sp.u_matrix.at(0, 1), sp.u_matrix.at(1, 0)));
  CHECK(R.val(det) == 2);
}

TEST_CASE("non-ordinary input is rejected") {
  ZRing R(11, 6);
  QSeries f(R, 10);
  CHECK_THROWS_AS(stabilized_pair(R, f, R.from_int(11), R.one(), 3, 11), NotOrdinary);
}
