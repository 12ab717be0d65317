#pragma once

// Arithmetic in Z/p^m at two scales: a Montgomery ring on unsigned __int128
// for the bulk linear algebra (p^m < 2^126), and a boost::cpp_int ring for
// the precision-hungry steps (lattice dualization, U' inversion) where the
// modulus can be a few hundred p-adic digits.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>
#include <boost/multiprecision/cpp_int.hpp>

namespace pmf {

using u64 = std::uint64_t;
using u128 = unsigned __int128;
using bigint = boost::multiprecision::cpp_int;
using bigrat = boost::multiprecision::cpp_rational;

struct Error : std::runtime_error {
  explicit Error(const std::string& w) : std::runtime_error(w) {}
};
#define PMF_ERROR(name)                                   \
  struct name : Error {                                   \
    explicit name(const std::string& w) : Error(#name ": " + w) {} \
  }
PMF_ERROR(AmbiguousAtPrecision);
PMF_ERROR(SegmentNotSeparated);
PMF_ERROR(IncompatibleAmbient);
PMF_ERROR(ParityMismatch);
PMF_ERROR(LevelMismatch);
PMF_ERROR(SpanDeficient);
PMF_ERROR(InsufficientQPrecision);
PMF_ERROR(NotOrdinary);
PMF_ERROR(MalformedBasisFile);
PMF_ERROR(DimensionMismatch);
PMF_ERROR(SystemSingularAtPrecision);
PMF_ERROR(CertificationFailed);
PMF_ERROR(PairingDegenerate);
PMF_ERROR(NotContained);
PMF_ERROR(PrecisionMismatch);
PMF_ERROR(TorsionAtPrecisionLimit);
PMF_ERROR(NotConverged);
PMF_ERROR(MembershipFailedAtPrecision);
PMF_ERROR(EigenspaceNotTwoDimensional);
PMF_ERROR(PrecisionExhausted);
PMF_ERROR(RankMismatch);
PMF_ERROR(CongruenceFailure);
PMF_ERROR(ConfigError);
PMF_ERROR(CacheError);
#undef PMF_ERROR

u128 parse_u128(const std::string& s);
std::string to_string_u128(u128 v);
bigint u128_to_big(u128 v);
u128 big_to_u128(const bigint& v);

// Z/p^prec with p odd prime, p^prec < 2^126. Elements are kept in Montgomery
// form (x * 2^128 mod n); to_plain/from_plain convert at the boundaries.
class ZRing {
 public:
  using Elem = u128;

  ZRing() = default;
  ZRing(u64 p, int prec);

  u64 p() const { return p_; }
  int prec() const { return prec_; }
  u128 modulus() const { return n_; }
  u128 p_pow(int e) const { return p_pows_.at(e); }

  Elem zero() const { return 0; }
  Elem one() const { return one_; }
  Elem from_plain(u128 v) const;
  u128 to_plain(Elem a) const;
  Elem from_int(long long v) const;
  Elem from_big(const bigint& v) const;
  bigint to_big(Elem a) const { return u128_to_big(to_plain(a)); }

  Elem add(Elem a, Elem b) const {
    u128 s = a + b;
    if (s >= n_ || s < a) s -= n_;
    return s;
  }
  Elem sub(Elem a, Elem b) const { return a >= b ? a - b : a + (n_ - b); }
  Elem neg(Elem a) const { return a ? n_ - a : 0; }
  Elem mul(Elem a, Elem b) const { return mont_mul(a, b); }
  Elem mul_small(Elem a, u64 k) const { return mont_mul(a, from_plain(k)); }

  bool is_zero(Elem a) const { return a == 0; }
  bool eq(Elem a, Elem b) const { return a == b; }

  // valuation in [0, prec]; the zero class reports prec ("zero at this precision")
  int val(Elem a) const;
  // a = p^val * unit; returns the unit part (valid when val(a) < prec)
  Elem unit_part(Elem a) const;
  // exact division by p^e; caller must have val(a) >= e
  Elem div_exact_p(Elem a, int e) const;
  Elem mul_p_pow(Elem a, int e) const { return mont_mul(a, from_plain(p_pow(e))); }
  // inverse of a unit
  Elem inv_unit(Elem a) const;
  Elem pow(Elem a, u128 e) const;

  // reduce to lower precision ring (same p)
  u128 plain_mod(Elem a, int lower_prec) const;

  bool operator==(const ZRing& o) const { return p_ == o.p_ && prec_ == o.prec_; }

 private:
  u64 p_ = 0;
  int prec_ = 0;
  u128 n_ = 0;      // p^prec
  u128 ninv_ = 0;   // -n^{-1} mod 2^128
  u128 r2_ = 0;     // 2^256 mod n
  u128 one_ = 0;    // mont(1)
  std::vector<u128> p_pows_;

  Elem mont_mul(Elem a, Elem b) const;
  u128 redc(u128 hi, u128 lo) const;
};

// Z/p^prec on arbitrary-precision integers, for deep intermediate precision.
class BigRing {
 public:
  using Elem = bigint;

  BigRing() = default;
  BigRing(u64 p, int prec);

  u64 p() const { return p_; }
  int prec() const { return prec_; }
  const bigint& modulus() const { return n_; }
  bigint p_pow(int e) const;

  Elem zero() const { return 0; }
  Elem one() const { return 1; }
  Elem from_plain(const bigint& v) const { return mod(v); }
  bigint to_plain(const Elem& a) const { return a; }
  Elem from_int(long long v) const { return mod(bigint(v)); }
  Elem from_big(const bigint& v) const { return mod(v); }

  Elem add(const Elem& a, const Elem& b) const {
    bigint s = a + b;
    if (s >= n_) s -= n_;
    return s;
  }
  Elem sub(const Elem& a, const Elem& b) const {
    bigint s = a - b;
    if (s < 0) s += n_;
    return s;
  }
  Elem neg(const Elem& a) const { return a == 0 ? Elem(0) : Elem(n_ - a); }
  Elem mul(const Elem& a, const Elem& b) const { return (a * b) % n_; }

  bool is_zero(const Elem& a) const { return a == 0; }
  bool eq(const Elem& a, const Elem& b) const { return a == b; }

  int val(const Elem& a) const;
  Elem unit_part(const Elem& a) const;
  Elem div_exact_p(const Elem& a, int e) const;
  Elem mul_p_pow(const Elem& a, int e) const { return mod(a * p_pow(e)); }
  Elem inv_unit(const Elem& a) const;
  Elem pow(const Elem& a, const bigint& e) const;

 private:
  u64 p_ = 0;
  int prec_ = 0;
  bigint n_ = 0;

  Elem mod(const bigint& v) const {
    bigint r = v % n_;
    if (r < 0) r += n_;
    return r;
  }
};

// p-adic valuation of an exact integer (cap at `cap` for 0 or deep values)
int val_of_big(const bigint& v, u64 p, int cap);

}  // namespace pmf
