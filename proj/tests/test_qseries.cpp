#include "doctest.h"
#include "pmf/qseries.hpp"

#include <random>

using namespace pmf;

TEST_CASE("ntt product agrees with naive product") {
  ZRing R(11, 30);
  std::mt19937_64 rng(99);
  QSeries a(R, 700), b(R, 700);
  for (int i = 0; i < 700; ++i) {
    bigint x = 0, y = 0;
    for (int j = 0; j < 4; ++j) {
      x = (x << 32) + rng() % (1ULL << 32);
      y = (y << 32) + rng() % (1ULL << 32);
    }
    a.c[i] = R.from_big(x);
    b.c[i] = R.from_big(y);
  }
  QSeries fast = qs_mul(a, b);
  // naive reference
  QSeries slow(R, 700);
  for (int i = 0; i < 700; ++i) {
    if (R.is_zero(a.c[i])) continue;
    for (int j = 0; i + j < 700; ++j)
      slow.c[i + j] = R.add(slow.c[i + j], R.mul(a.c[i], b.c[j]));
  }
  for (int i = 0; i < 700; ++i) CHECK(fast.c[i] == slow.c[i]);
}

TEST_CASE("unit series inversion") {
  ZRing R(7, 12);
  QSeries f(R, 300);
  std::mt19937_64 rng(7);
  f.c[0] = R.one();
  for (int i = 1; i < 300; ++i) f.c[i] = R.from_plain(rng() % 823543);
  QSeries g = qs_invert(f);
  QSeries prod = qs_mul(f, g);
  CHECK(R.to_plain(prod.c[0]) == 1);
  for (int i = 1; i < 300; ++i) CHECK(R.is_zero(prod.c[i]));
}

TEST_CASE("theta operator scales coefficients by n^j") {
  ZRing R(7, 8);
  QSeries f(R, 4);
  f.c[1] = R.one();
  f.c[2] = R.one();  // q + q^2
  QSeries t = qs_theta(f, 2);
  CHECK(R.to_plain(t.c[1]) == 1);
  CHECK(R.to_plain(t.c[2]) == 4);  // theta^2(q + q^2) = q + 4 q^2
  QSeries c(R, 4);
  c.c[0] = R.from_int(5);
  QSeries tc = qs_theta(c, 3);
  for (int i = 0; i < 4; ++i) CHECK(R.is_zero(tc.c[i]));  // constants die
}

TEST_CASE("U_p reads every p-th coefficient") {
  ZRing R(7, 8);
  QSeries f(R, 50);
  for (int i = 0; i < 50; ++i) f.c[i] = R.from_int(i);
  QSeries u = qs_map_Up(f, 7);
  CHECK(u.qprec == 8);
  for (int i = 0; i < 8; ++i) CHECK(R.to_plain(u.c[i]) == u128(7 * i));
}

TEST_CASE("cube of the Euler product is the Jacobi series") {
  auto f = eta_power_series(3, 25);
  // 1 - 3q + 5q^3 - 7q^6 + 9q^10 - 11q^15 + 13q^21 - ...
  std::vector<std::pair<int, long long>> expected = {
      {0, 1}, {1, -3}, {3, 5}, {6, -7}, {10, 9}, {15, -11}, {21, 13}};
  std::vector<bigint> full(25, 0);
  for (auto [i, v] : expected) full[i] = v;
  for (int i = 0; i < 25; ++i) CHECK(f[i] == full[i]);
}

TEST_CASE("level-7 eta product expansion") {
  int shift = 0;
  auto f = eta_product_series({{1, 3}, {7, 3}}, 12, &shift);
  CHECK(shift == 1);
  // q * prod (1-q^n)^3 (1-q^{7n})^3 = q - 3q^2 + 5q^4 - 7q^7 - 3q^8 + 9q^9 - 6q^11 ...
  // stored unshifted: coefficient of q^{n} in the product is a_{n+1}
  std::vector<long long> want = {1, -3, 0, 5, 0, 0, -7, -3, 9, 0, -6, 0};
  for (int i = 0; i < 12; ++i) CHECK(f[i] == bigint(want[i]));
}

TEST_CASE("precision metadata propagates pessimistically") {
  ZRing R(7, 10);
  QSeries a(R, 20), b(R, 30);
  a.padic_prec = 9;
  b.padic_prec = 7;
  auto s = qs_add(a, b);
  CHECK(s.qprec == 20);
  CHECK(s.padic_prec == 7);
  auto m = qs_mul(a, b);
  CHECK(m.qprec == 20);
  CHECK(m.padic_prec == 7);
}
