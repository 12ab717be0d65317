#include "doctest.h"
#include "pmf/zring.hpp"

#include <random>

using namespace pmf;

TEST_CASE("montgomery arithmetic matches big-integer reference") {
  for (auto [p, m] : {std::pair<u64, int>{7, 5}, {11, 17}, {7, 26}, {11, 30}, {13, 10}}) {
    ZRing R(p, m);
    BigRing B(p, m);
    std::mt19937_64 rng(12345 + p + m);
    bigint mod = B.modulus();
    for (int t = 0; t < 200; ++t) {
      bigint a = 0, b = 0;
      for (int i = 0; i < 4; ++i) {
        a = (a << 32) + rng() % (1ULL << 32);
        b = (b << 32) + rng() % (1ULL << 32);
      }
      a %= mod;
      b %= mod;
      auto am = R.from_big(a), bm = R.from_big(b);
      CHECK(R.to_big(R.add(am, bm)) == B.add(a, b));
      CHECK(R.to_big(R.sub(am, bm)) == B.sub(a, b));
      CHECK(R.to_big(R.mul(am, bm)) == B.mul(a, b));
      CHECK(R.val(am) == B.val(a));
      if (R.val(am) == 0) {
        CHECK(R.to_big(R.inv_unit(am)) == B.inv_unit(a));
        CHECK(R.to_plain(R.mul(R.inv_unit(am), am)) == 1);
      }
    }
  }
}

TEST_CASE("valuation conventions") {
  ZRing R(7, 5);
  CHECK(R.val(R.zero()) == 5);  // zero class reports the precision floor
  CHECK(R.val(R.from_int(7)) == 1);
  CHECK(R.val(R.from_int(49 * 3)) == 2);
  CHECK(R.val(R.one()) == 0);
  CHECK(R.to_plain(R.div_exact_p(R.from_int(98), 1)) == 14);
  CHECK(R.to_plain(R.unit_part(R.from_int(49 * 3))) == 3);
  CHECK(R.to_big(R.from_int(-1)) == bigint(16806));  // 7^5 - 1
}

TEST_CASE("big ring exact division and powers") {
  BigRing B(11, 120);
  bigint x = B.p_pow(17) * 12345;
  CHECK(B.val(x) == 17);
  CHECK(B.div_exact_p(x, 17) == 12345);
  CHECK(B.val(B.zero()) == 120);
}
