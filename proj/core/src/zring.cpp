#include "pmf/zring.hpp"

namespace pmf {

u128 parse_u128(const std::string& s) {
  u128 v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') throw Error("bad u128 literal: " + s);
    v = v * 10 + u128(c - '0');
  }
  return v;
}

std::string to_string_u128(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v) {
    s.push_back(char('0' + int(v % 10)));
    v /= 10;
  }
  return std::string(s.rbegin(), s.rend());
}

bigint u128_to_big(u128 v) {
  bigint hi = u64(v >> 64);
  return (hi << 64) + u64(v);
}

u128 big_to_u128(const bigint& v) {
  bigint m = v & ((bigint(1) << 128) - 1);
  u64 lo = (m & 0xffffffffffffffffULL).convert_to<u64>();
  u64 hi = (m >> 64).convert_to<u64>();
  return (u128(hi) << 64) | lo;
}

namespace {

struct U256 {
  u128 lo, hi;
};

U256 mul_128_full(u128 a, u128 b) {
  u64 a0 = u64(a), a1 = u64(a >> 64);
  u64 b0 = u64(b), b1 = u64(b >> 64);
  u128 p00 = u128(a0) * b0;
  u128 p01 = u128(a0) * b1;
  u128 p10 = u128(a1) * b0;
  u128 p11 = u128(a1) * b1;
  u128 mid = p01 + p10;
  u128 carry_mid = (mid < p01) ? (u128(1) << 64) : 0;
  u128 lo = p00 + (mid << 64);
  u128 carry_lo = (lo < p00) ? 1 : 0;
  u128 hi = p11 + (mid >> 64) + carry_mid + carry_lo;
  return {lo, hi};
}

}  // namespace

ZRing::ZRing(u64 p, int prec) : p_(p), prec_(prec) {
  if (p < 3 || prec < 1) throw Error("ZRing: need odd prime p and prec >= 1");
  n_ = 1;
  p_pows_.assign(prec + 1, 1);
  for (int i = 1; i <= prec; ++i) {
    u128 next = n_ * p;
    if (next / p != n_ || next >= (u128(1) << 126))
      throw Error("ZRing: p^prec exceeds 2^126, use BigRing");
    n_ = next;
    p_pows_[i] = n_;
  }
  // -n^{-1} mod 2^128 by Newton iteration
  u128 inv = n_;  // correct mod 2^3 for odd n... start with n (n*n ≡ 1 mod 8 fails); use standard seed
  inv = 1;
  for (int i = 0; i < 7; ++i) inv *= 2 - n_ * inv;  // n*inv ≡ 1 mod 2^128
  ninv_ = ~inv + 1;  // -inv
  // r2 = 2^256 mod n via repeated doubling of 2^128 mod n
  u128 r = (~n_ + 1) % n_;  // 2^128 mod n
  u128 acc = r;
  for (int i = 0; i < 128; ++i) {
    acc += acc;
    if (acc >= n_ || acc < r) acc -= n_;  // acc < 2n always since n < 2^126
    r = acc;
  }
  r2_ = r;  // (2^128 mod n) * 2^128 mod n = 2^256 mod n
  one_ = from_plain(1);
}

u128 ZRing::redc(u128 hi, u128 lo) const {
  u128 m = lo * ninv_;
  U256 mn = mul_128_full(m, n_);
  // t = (input + m*n) >> 128; low half cancels by construction
  u128 carry = (lo + mn.lo < lo) ? 1 : 0;
  u128 t = hi + mn.hi + carry;
  if (t >= n_ || t < hi) t -= n_;
  return t;
}

ZRing::Elem ZRing::mont_mul(Elem a, Elem b) const {
  U256 t = mul_128_full(a, b);
  return redc(t.hi, t.lo);
}

ZRing::Elem ZRing::from_plain(u128 v) const {
  v %= n_;
  U256 t = mul_128_full(v, r2_);
  return redc(t.hi, t.lo);
}

u128 ZRing::to_plain(Elem a) const { return redc(0, a); }

ZRing::Elem ZRing::from_int(long long v) const {
  if (v >= 0) return from_plain(u128(v));
  return neg(from_plain(u128(-(v + 1)) + 1));
}

ZRing::Elem ZRing::from_big(const bigint& v) const {
  bigint r = v % u128_to_big(n_);
  if (r < 0) r += u128_to_big(n_);
  return from_plain(big_to_u128(r));
}

int ZRing::val(Elem a) const {
  if (a == 0) return prec_;
  u128 v = to_plain(a);
  int e = 0;
  while (v % p_ == 0) {
    v /= p_;
    ++e;
  }
  return e;
}

ZRing::Elem ZRing::unit_part(Elem a) const {
  u128 v = to_plain(a);
  if (v == 0) return one_;
  while (v % p_ == 0) v /= p_;
  return from_plain(v);
}

ZRing::Elem ZRing::div_exact_p(Elem a, int e) const {
  if (e == 0) return a;
  u128 v = to_plain(a);
  u128 q = p_pows_.at(e);
  if (v % q != 0) throw Error("div_exact_p: value not divisible");
  return from_plain(v / q);
}

ZRing::Elem ZRing::pow(Elem a, u128 e) const {
  Elem r = one_, b = a;
  while (e) {
    if (e & 1) r = mont_mul(r, b);
    b = mont_mul(b, b);
    e >>= 1;
  }
  return r;
}

ZRing::Elem ZRing::inv_unit(Elem a) const {
  if (val(a) != 0) throw Error("inv_unit: not a unit");
  // a^(phi(n)-1), phi(p^m) = p^(m-1)(p-1)
  u128 phi = p_pows_.at(prec_ - 1) * (p_ - 1);
  return pow(a, phi - 1);
}

u128 ZRing::plain_mod(Elem a, int lower_prec) const {
  return to_plain(a) % p_pows_.at(lower_prec);
}

BigRing::BigRing(u64 p, int prec) : p_(p), prec_(prec) {
  if (p < 3 || prec < 1) throw Error("BigRing: need odd prime p and prec >= 1");
  n_ = 1;
  for (int i = 0; i < prec; ++i) n_ *= p;
}

bigint BigRing::p_pow(int e) const {
  bigint r = 1;
  for (int i = 0; i < e; ++i) r *= p_;
  return r;
}

int BigRing::val(const Elem& a) const { return val_of_big(a, p_, prec_); }

BigRing::Elem BigRing::unit_part(const Elem& a) const {
  if (a == 0) return 1;
  bigint v = a;
  while (v % p_ == 0) v /= p_;
  return v;
}

BigRing::Elem BigRing::div_exact_p(const Elem& a, int e) const {
  if (e == 0) return a;
  bigint q = p_pow(e);
  if (a % q != 0) throw Error("BigRing::div_exact_p: value not divisible");
  return a / q;
}

BigRing::Elem BigRing::pow(const Elem& a, const bigint& e) const {
  bigint r = 1, b = a, k = e;
  while (k > 0) {
    if ((k & 1) != 0) r = (r * b) % n_;
    b = (b * b) % n_;
    k >>= 1;
  }
  return r;
}

BigRing::Elem BigRing::inv_unit(const Elem& a) const {
  if (a % p_ == 0) throw Error("BigRing::inv_unit: not a unit");
  bigint phi = p_pow(prec_ - 1) * (p_ - 1);
  return pow(a, phi - 1);
}

int val_of_big(const bigint& v, u64 p, int cap) {
  if (v == 0) return cap;
  bigint w = v < 0 ? bigint(-v) : v;
  int e = 0;
  while (e < cap && w % p == 0) {
    w /= p;
    ++e;
  }
  return e;
}

}  // namespace pmf
