#include "doctest.h"
#include "pmf/lattice.hpp"
#include "pmf/linalg.hpp"

#include <random>

using namespace pmf;

namespace {

Mat<ZRing> from_ints(const ZRing& R, int nr, int nc, std::vector<long long> v) {
  Mat<ZRing> M(R, nr, nc);
  for (int i = 0; i < nr * nc; ++i) M.a[i] = R.from_int(v[i]);
  return M;
}

// independent oracle: Faddeev-LeVerrier, valid when p > n
template <class R>
std::vector<typename R::Elem> charpoly_fl(const Mat<R>& A) {
  const R& r = *A.ring;
  int n = A.nr;
  Mat<R> M(r, n, n);
  std::vector<typename R::Elem> c(n + 1, r.zero());
  c[n] = r.one();
  Mat<R> AM = M;
  for (int k = 1; k <= n; ++k) {
    // M_k = A*M_{k-1} + c_{n-k+1} I
    AM = mat_mul(A, M);
    for (int i = 0; i < n; ++i) AM.at(i, i) = r.add(AM.at(i, i), c[n - k + 1]);
    auto tr = r.zero();
    Mat<R> AAM = mat_mul(A, AM);
    for (int i = 0; i < n; ++i) tr = r.add(tr, AAM.at(i, i));
    // c_{n-k} = -tr/k
    auto kinv = r.inv_unit(r.from_int(k));
    c[n - k] = r.neg(r.mul(tr, kinv));
    M = AM;
  }
  return c;
}

}  // namespace

TEST_CASE("smith form of diagonal and degenerate matrices") {
  ZRing R(7, 5);
  auto S1 = smith_normal_form(from_ints(R, 2, 2, {1, 0, 0, 7}));
  CHECK(S1.exponents == std::vector<int>{0, 1});
  CHECK(S1.rank == 2);
  CHECK(S1.rank_units == 1);

  auto S0 = smith_normal_form(from_ints(R, 2, 2, {0, 0, 0, 0}));
  CHECK(S0.exponents == std::vector<int>{5, 5});  // zero at this precision
  CHECK(S0.rank == 0);

  // second row is 3x the first: divisors (unit, zero-at-precision)
  auto S2 = smith_normal_form(from_ints(R, 2, 2, {2, 4, 6, 12}));
  CHECK(S2.exponents == std::vector<int>{0, 5});
  CHECK(S2.rank == 1);
}

TEST_CASE("smith form roundtrip on random matrices") {
  ZRing R(7, 9);
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 20; ++trial) {
    int nr = 1 + int(rng() % 6), nc = 1 + int(rng() % 6);
    Mat<ZRing> A(R, nr, nc);
    for (auto& x : A.a) {
      long long v = (long long)(rng() % 40353607);
      if (rng() % 3 == 0) v *= 7 * 7;
      A.a[&x - A.a.data()] = R.from_int(v);
    }
    auto S = smith_normal_form(A);
    // rebuild D and check A = U D V
    Mat<ZRing> D(R, nr, nc);
    for (int i = 0; i < std::min(nr, nc); ++i)
      if (S.exponents[i] < R.prec()) D.at(i, i) = R.from_big(bigint(1) << 0), D.at(i, i) = R.mul_p_pow(R.one(), S.exponents[i]);
    auto A2 = mat_mul(S.U, mat_mul(D, S.V));
    CHECK(mat_agree_val(A, A2) == R.prec());
    // U, V unimodular
    CHECK(mat_agree_val(mat_mul(S.U, S.Uinv), Mat<ZRing>::identity(R, nr)) == R.prec());
    CHECK(mat_agree_val(mat_mul(S.V, S.Vinv), Mat<ZRing>::identity(R, nc)) == R.prec());
  }
}

TEST_CASE("characteristic polynomials with an independent oracle") {
  ZRing R(7, 5);
  auto I2 = Mat<ZRing>::identity(R, 2);
  auto cp = charpoly_berkowitz(I2);  // X^2 - 2X + 1
  CHECK(R.to_plain(cp[0]) == 1);
  CHECK(R.to_big(cp[1]) == bigint(16805));  // -2 mod 7^5
  CHECK(R.to_plain(cp[2]) == 1);

  auto D = from_ints(R, 2, 2, {3, 0, 0, 11});
  auto cpd = charpoly_berkowitz(D);  // X^2 - 14X + 33
  CHECK(R.to_big(cpd[1]) == R.to_big(R.from_int(-14)));
  CHECK(R.to_plain(cpd[0]) == 33);

  std::mt19937_64 rng(777);
  for (int trial = 0; trial < 15; ++trial) {
    Mat<ZRing> A(R, 3, 3);
    for (auto& x : A.a) x = R.from_plain(rng() % 16807);
    auto b = charpoly_berkowitz(A);
    auto f = charpoly_fl(A);  // independent second algorithm
    auto h = charpoly_hessenberg(A);
    REQUIRE(b.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(b[i] == f[i]);
    CHECK(h.precision_spent >= 0);
    CHECK(poly_agree_val(R, b, h.coeffs) >= R.prec() - h.precision_spent);
    // trace / determinant cross-check
    auto tr = R.zero();
    for (int i = 0; i < 3; ++i) tr = R.add(tr, A.at(i, i));
    CHECK(R.eq(b[2], R.neg(tr)));
  }
}

TEST_CASE("solve and kernel behave at precision limits") {
  ZRing R(7, 5);
  auto A = from_ints(R, 2, 2, {1, 0, 0, 7});
  auto s1 = solve_linear(A, {R.from_int(3), R.from_int(14)});
  REQUIRE(s1.solvable);
  CHECK(R.to_plain(s1.x[0]) == 3);
  CHECK(R.to_plain(s1.x[1]) == 2);
  CHECK(s1.denominator_val == 1);
  auto s2 = solve_linear(A, {R.from_int(3), R.from_int(3)});  // 3 not divisible by 7
  CHECK_FALSE(s2.solvable);

  auto K = kernel_saturated(from_ints(R, 1, 2, {1, 1}));
  REQUIRE(K.nr == 1);
  // kernel of (1 1) is spanned by (1, -1) up to unit
  auto x0 = K.at(0, 0), x1 = K.at(0, 1);
  CHECK(R.val(R.add(x0, x1)) == R.prec());
  CHECK(R.val(x0) == 0);
}

TEST_CASE("lattice operations") {
  ZRing R(7, 5);
  auto L1 = from_ints(R, 1, 2, {1, 0});
  auto L2 = from_ints(R, 1, 2, {0, 1});
  auto I = lattice_intersect(L1, L2);
  CHECK(I.nr == 0);  // zero lattice

  auto Q = quotient_divisors(from_ints(R, 1, 2, {7, 0}), 2);
  CHECK(Q.free_rank == 1);
  CHECK(Q.torsion_exponents == std::vector<int>{1});

  auto Sat = lattice_saturate(from_ints(R, 1, 2, {7, 7}));
  REQUIRE(Sat.nr == 1);
  CHECK(R.val(Sat.at(0, 0)) == 0);
  CHECK(R.eq(Sat.at(0, 0), Sat.at(0, 1)));

  // rank(L1)+rank(L2) = rank(L1 cap L2) + rank(L1 + L2) on random saturated inputs
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 10; ++trial) {
    int n = 4;
    Mat<ZRing> A(R, 2, n), B(R, 2, n);
    for (auto& x : A.a) x = R.from_plain(rng() % 16807);
    for (auto& x : B.a) x = R.from_plain(rng() % 16807);
    auto As = lattice_saturate(A), Bs = lattice_saturate(B);
    int r1 = lattice_rank(As), r2 = lattice_rank(Bs);
    int ri = lattice_rank(lattice_intersect(As, Bs));
    int rs = lattice_rank(lattice_sum(As, Bs));
    CHECK(r1 + r2 == ri + rs);
  }
}

TEST_CASE("membership is an snf solvability test") {
  ZRing R(7, 5);
  auto L = from_ints(R, 2, 3, {1, 0, 3, 0, 7, 1});
  CHECK(lattice_member(L, {R.from_int(1), R.from_int(7), R.from_int(4)}));
  CHECK(lattice_member(L, {R.from_int(0), R.from_int(7), R.from_int(1)}));
  CHECK_FALSE(lattice_member(L, {R.from_int(0), R.from_int(1), R.from_int(0)}));
}

TEST_CASE("results stable under recomputation at higher precision") {
  // same integer matrix read mod 7^9 and mod 7^11: exponents below 9 agree
  std::mt19937_64 rng(5150);
  for (int trial = 0; trial < 8; ++trial) {
    std::vector<long long> v(16);
    for (auto& x : v) {
      x = (long long)(rng() % 40353607);
      if (rng() % 4 == 0) x *= 343;
    }
    ZRing R1(7, 9), R2(7, 11);
    auto S1 = smith_normal_form(from_ints(R1, 4, 4, v));
    auto S2 = smith_normal_form(from_ints(R2, 4, 4, v));
    for (int i = 0; i < 4; ++i) {
      if (S1.exponents[i] < 9) CHECK(S1.exponents[i] == S2.exponents[i]);
    }
  }
}
