#include "doctest.h"
#include "pmf/slopes.hpp"

#include <random>

using namespace pmf;

namespace {
std::vector<ZRing::Elem> poly_from_ints(const ZRing& R, std::vector<long long> v) {
  std::vector<ZRing::Elem> f(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) f[i] = R.from_int(v[i]);
  return f;
}
}  // namespace

TEST_CASE("newton polygon of a distinct-slope quadratic") {
  ZRing R(7, 5);
  // X^2 - (1+p) X + p: hull (0,1),(1,0),(2,0) -> slopes {0,1}
  auto np = newton_polygon(R, poly_from_ints(R, {7, -8, 1}));
  REQUIRE(np.segments.size() == 2);
  CHECK(np.segments[0].num == 0);
  CHECK(np.segments[0].mult == 1);
  CHECK(np.segments[1].num == 1);
  CHECK(np.segments[1].den == 1);
  CHECK(np.segments[1].mult == 1);
  CHECK(np.fully_certified);
}

TEST_CASE("newton polygon of X^3 is ambiguous at precision") {
  ZRing R(7, 5);
  auto np = newton_polygon(R, poly_from_ints(R, {0, 0, 0, 1}));
  REQUIRE(np.segments.size() == 1);
  CHECK(np.segments[0].ambiguous);
  CHECK(np.segments[0].mult == 3);
  CHECK_FALSE(np.fully_certified);
}

TEST_CASE("hecke polynomial at p has slopes {0, k-1}") {
  ZRing R(7, 8);
  int k = 3;
  long long pk = 49;  // p^{k-1}
  // X^2 - a_p X + <p> p^{k-1}, a_p a unit
  auto np = newton_polygon(R, poly_from_ints(R, {3 * pk, -5, 1}));
  REQUIRE(np.segments.size() == 2);
  CHECK(np.segments[0].num == 0);
  CHECK(np.segments[1].num == k - 1);
  CHECK(np.segments[1].den == 1);
}

TEST_CASE("slopes of charpoly of diagonal matrix match entry valuations") {
  ZRing R(7, 9);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    int n = 4;
    Mat<ZRing> D(R, n, n);
    std::vector<int> vals;
    for (int i = 0; i < n; ++i) {
      int e = int(rng() % 3);
      long long u = 1 + (long long)(rng() % 341);
      while (u % 7 == 0) u += 1;
      long long entry = u;
      for (int j = 0; j < e; ++j) entry *= 7;
      D.at(i, i) = R.from_int(entry);
      vals.push_back(e);
    }
    std::sort(vals.begin(), vals.end());
    auto np = newton_polygon(R, charpoly_berkowitz(D));
    auto slopes = np.slope_list();
    REQUIRE(int(slopes.size()) == n);
    for (int i = 0; i < n; ++i) {
      CHECK(slopes[i].second == 1);
      CHECK(slopes[i].first == vals[i]);
    }
  }
}

TEST_CASE("slope factorization of the distinct-slope quadratic is exact") {
  ZRing R(7, 5);
  auto f = poly_from_ints(R, {7, -8, 1});  // (X-1)(X-7)
  auto sf = slope_factor(R, f, 0);
  REQUIRE(sf.h_s.size() == 2);
  CHECK(R.eq(sf.h_s[0], R.from_int(-1)));  // h_s = X - 1 exactly
  CHECK(R.to_plain(sf.h_s[1]) == 1);
  CHECK(R.eq(sf.h_rest[0], R.from_int(-7)));  // h_rest = X - 7
  CHECK(sf.resultant_val == 0);  // distinct slopes 0 vs 1: unit resultant
  auto prod = poly_mul(R, sf.h_s, sf.h_rest);
  CHECK(poly_agree_val(R, prod, f) == R.prec());
}

TEST_CASE("missing slope gives trivial factor") {
  ZRing R(7, 5);
  auto f = poly_from_ints(R, {3, -5, 1});  // two unit roots
  auto sf = slope_factor(R, f, 2);
  CHECK(sf.h_s.size() == 1);
  CHECK(poly_agree_val(R, sf.h_rest, f) == R.prec());
}

TEST_CASE("critical factor of a stabilization matrix") {
  // U on span(f(q), f(q^p)) for a T_p-ordinary eigenform: [[a_p, 1], [-chi(p) p^{k-1}, 0]]
  ZRing R(11, 10);
  int k = 3;
  long long ap = -6, chi = 1, pk1 = 121;
  Mat<ZRing> U(R, 2, 2);
  U.at(0, 0) = R.from_int(ap);
  U.at(0, 1) = R.one();
  U.at(1, 0) = R.from_int(-chi * pk1);
  auto cp = charpoly_berkowitz(U);  // X^2 - a_p X + chi p^{k-1}
  CHECK(R.eq(cp[0], R.from_int(chi * pk1)));
  CHECK(R.eq(cp[1], R.from_int(-ap)));
  auto sf = slope_factor(R, cp, k - 1);
  REQUIRE(sf.h_s.size() == 2);  // degree-1 critical factor
  // Hensel-lifted root cross-check: beta = -h_s[0], alpha = -h_rest[0],
  // alpha beta = chi p^{k-1}, alpha + beta = a_p
  auto beta = R.neg(sf.h_s[0]);
  auto alpha = R.neg(sf.h_rest[0]);
  CHECK(R.val(beta) == k - 1);
  CHECK(R.val(alpha) == 0);
  CHECK(R.eq(R.mul(alpha, beta), R.from_int(chi * pk1)));
  CHECK(R.eq(R.add(alpha, beta), R.from_int(ap)));
}

TEST_CASE("random multi-slope products refactor correctly") {
  ZRing R(7, 12);
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 10; ++trial) {
    // build f = prod (X - u_i p^{e_i}) with unit u_i and e in {0,1,2}
    std::vector<std::vector<ZRing::Elem>> lin;
    std::vector<int> es = {0, 0, 1, 2};
    std::vector<ZRing::Elem> f = {R.one()};
    std::vector<int> count(3, 0);
    for (int e : es) {
      long long u = 1 + (long long)(rng() % 341);
      while (u % 7 == 0) u += 1;
      long long root = u;
      for (int j = 0; j < e; ++j) root *= 7;
      f = poly_mul(R, f, poly_from_ints(R, {-root, 1}));
      count[e]++;
    }
    for (int s = 0; s <= 2; ++s) {
      auto sf = slope_factor(R, f, s);
      CHECK(int(sf.h_s.size()) - 1 == count[s]);
      auto prod = poly_mul(R, sf.h_s, sf.h_rest);
      // product reproduces f modulo the separation certificate
      CHECK(poly_agree_val(R, prod, f) >= R.prec() - sf.resultant_val);
      CHECK(sf.resultant_val < R.prec());
    }
  }
}
