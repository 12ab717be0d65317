#include "doctest.h"
#include "pmf/dirichlet.hpp"

using namespace pmf;

TEST_CASE("unit group structure of small moduli") {
  UnitGroup G5(5);
  CHECK(G5.exponent == 4);
  CHECK(DirichletChar::all_characters(&G5).size() == 4);
  UnitGroup G7(7);
  CHECK(G7.exponent == 6);
  CHECK(DirichletChar::all_characters(&G7).size() == 6);
}

TEST_CASE("quadratic character mod 7") {
  UnitGroup G(7);
  auto chars = DirichletChar::all_characters(&G);
  const DirichletChar* quad = nullptr;
  for (const auto& c : chars) {
    if (c.trivial()) continue;
    auto v2 = c.value_exp(2);
    bool squares_one = v2 && *v2 % G.exponent == 0;
    auto v3 = c.value_exp(3);
    bool order2 = v3 && (*v3 * 2) % G.exponent == 0 && *v3 % G.exponent != 0;
    if (squares_one && order2) quad = &c;
  }
  REQUIRE(quad != nullptr);
  CHECK(quad->odd());  // chi_{-7}
  CHECK(quad->conductor() == 7);
  // squares mod 7 are {1,2,4}
  for (long long n : {1, 2, 4}) CHECK(*quad->value_exp(n) == 0);
  for (long long n : {3, 5, 6}) CHECK(*quad->value_exp(n) != 0);
  CHECK_FALSE(quad->value_exp(7).has_value());
  CHECK_FALSE(quad->value_exp(14).has_value());
}

TEST_CASE("bernoulli numbers") {
  CHECK(bernoulli_number(6) == bigrat(1, 42));
  CHECK(bernoulli_number(10) == bigrat(5, 66));
  CHECK(bernoulli_number(12) == bigrat(-691, 2730));
  CHECK(bernoulli_number(3) == 0);
}

TEST_CASE("eisenstein divisor sums for trivial characters") {
  UnitGroup G(5);
  CycloRing C(G.exponent);
  auto chars = DirichletChar::all_characters(&G);
  const DirichletChar* triv = nullptr;
  for (const auto& c : chars)
    if (c.trivial()) triv = &c;
  REQUIRE(triv);
  auto E4 = eisenstein_qexp(C, *triv, *triv, 4, 1, 10);
  CHECK(E4.coords[0][1] == 1);
  CHECK(E4.coords[0][2] == 9);    // sigma_3(2)
  CHECK(E4.coords[0][3] == 28);   // sigma_3(3)
  CHECK(E4.coords[0][4] == 73);
  // a_0 = -B_4/8 = 1/240
  CHECK(E4.a0[0] == bigrat(1, 240));
}

TEST_CASE("weight 3 with the odd quadratic character mod 7") {
  UnitGroup G(7);
  CycloRing C(G.exponent);
  auto chars = DirichletChar::all_characters(&G);
  const DirichletChar *triv = nullptr, *quad = nullptr;
  for (const auto& c : chars) {
    if (c.trivial()) triv = &c;
    auto v3 = c.value_exp(3);
    if (!c.trivial() && v3 && (*v3 * 2) % G.exponent == 0) quad = &c;
  }
  REQUIRE((triv && quad));
  auto E = eisenstein_qexp(C, *triv, *quad, 3, 1, 10);
  // a_2 = 1 + chi(2) * 4 = 5 since 2 is a square mod 7
  CHECK(E.coords[0][2] == 5);
  CHECK(E.coords[0][1] == 1);
  // nontrivial psi kills the constant term
  auto E2 = eisenstein_qexp(C, *quad, *triv, 3, 1, 10);
  for (const auto& x : E2.a0) CHECK(x == 0);
}

TEST_CASE("parity mismatch is rejected") {
  UnitGroup G(7);
  CycloRing C(G.exponent);
  auto chars = DirichletChar::all_characters(&G);
  const DirichletChar* triv = nullptr;
  for (const auto& c : chars)
    if (c.trivial()) triv = &c;
  CHECK_THROWS_AS(eisenstein_qexp(C, *triv, *triv, 3, 1, 10), ParityMismatch);
}

TEST_CASE("hecke eigenvalue identity on an eisenstein series") {
  // T_ell on E_k^{psi,phi}: a_{n ell} + psi phi(ell) ell^{k-1} a_{n/ell}
  //                       = (psi(ell) + phi(ell) ell^{k-1}) a_n  for ell prime to N
  UnitGroup G(7);
  CycloRing C(G.exponent);
  auto chars = DirichletChar::all_characters(&G);
  const DirichletChar *triv = nullptr, *quad = nullptr;
  for (const auto& c : chars) {
    if (c.trivial()) triv = &c;
    auto v3 = c.value_exp(3);
    if (!c.trivial() && v3 && (*v3 * 2) % G.exponent == 0) quad = &c;
  }
  int k = 3;
  auto E = eisenstein_qexp(C, *triv, *quad, k, 1, 64);
  auto chi = triv->product(*quad);
  for (long long ell : {2, 3, 5}) {
    auto lam = C.zeta_pow(*triv->value_exp_primitive(ell));
    auto phl = C.zeta_pow(*quad->value_exp_primitive(ell));
    bigint lk = 1;
    for (int i = 0; i + 1 < k; ++i) lk *= ell;
    auto eig = C.add(lam, C.scale(phl, lk));
    for (int n = 1; n * ell < 64; ++n) {
      std::vector<bigint> an(C.deg()), anl(C.deg()), andiv(C.deg(), 0);
      for (int i = 0; i < C.deg(); ++i) {
        an[i] = E.coords[i][n];
        anl[i] = E.coords[i][n * ell];
        if (n % ell == 0) andiv[i] = E.coords[i][n / ell];
      }
      auto chiv = chi.value_exp_primitive(ell);
      REQUIRE(chiv.has_value());
      auto tl = C.add(anl, C.scale(C.mul(C.zeta_pow(*chiv), andiv), lk));
      auto rhs = C.mul(eig, an);
      for (int i = 0; i < C.deg(); ++i) CHECK(tl[i] == rhs[i]);
    }
  }
}

TEST_CASE("galois traces are rational") {
  CycloRing C(4);
  auto tr0 = C.trace_row(0);
  CHECK(tr0[0] == 2);  // trace(1) over Q(i)
  CHECK(tr0[1] == 0);  // trace(i)
  CycloRing C6(6);
  auto t = C6.trace_row(0);
  CHECK(t[0] == 2);   // trace(1)
  CHECK(t[1] == 1);   // trace(zeta_6) = zeta_6 + zeta_6^5 = 1
}
