#pragma once

// Dirichlet characters mod N with exact cyclotomic values, the cyclotomic
// integer ring Z[x]/Phi_E(x), Galois traces, and Eisenstein q-expansions.
// Everything here is exact (bigint/bigrat); p-adic reduction happens at the
// classical-space layer.

#include <map>
#include <optional>
#include <vector>

#include "pmf/zring.hpp"

namespace pmf {

std::vector<bigint> cyclotomic_polynomial(u64 n);  // coeffs low-to-high

// Z[x]/Phi_E(x); elements are integer coefficient vectors of length deg.
class CycloRing {
 public:
  explicit CycloRing(u64 E);
  u64 order() const { return E_; }
  int deg() const { return deg_; }

  std::vector<bigint> zero() const { return std::vector<bigint>(deg_, 0); }
  std::vector<bigint> one() const;
  std::vector<bigint> zeta_pow(u64 t) const;  // x^t mod Phi_E
  std::vector<bigint> add(const std::vector<bigint>& a, const std::vector<bigint>& b) const;
  std::vector<bigint> mul(const std::vector<bigint>& a, const std::vector<bigint>& b) const;
  std::vector<bigint> scale(const std::vector<bigint>& a, const bigint& c) const;
  bool is_zero(const std::vector<bigint>& a) const;

  // integer matrix of multiplication by x^t on coordinates (deg x deg)
  std::vector<std::vector<bigint>> zeta_mult_matrix(u64 t) const;
  // trace row: trace(zeta^j * x^i) over Gal(Q(zeta_E)/Q), for i < deg
  std::vector<bigint> trace_row(u64 j) const;

 private:
  u64 E_;
  int deg_;
  std::vector<bigint> phi_;  // Phi_E, monic
  std::vector<bigint> reduce(std::vector<bigint> a) const;
};

struct UnitGroup {
  u64 N = 1;
  std::vector<u64> gens;
  std::vector<u64> orders;
  u64 exponent = 1;  // lcm of orders: character values lie in mu_exponent
  // dlog[r] = exponent tuple of r for units, empty marker for non-units
  std::vector<std::vector<u64>> dlog;

  explicit UnitGroup(u64 N);
  bool is_unit(u64 r) const { return !dlog[r % N].empty() || (N == 1); }
};

class DirichletChar {
 public:
  DirichletChar() = default;
  DirichletChar(const UnitGroup* G, std::vector<u64> exps);

  u64 modulus() const { return G_->N; }
  u64 conductor() const { return conductor_; }
  bool odd() const { return odd_; }
  bool trivial() const { return trivial_; }
  // value chi(n) as a power of zeta_E (E = group exponent); nullopt when
  // gcd(n, N) > 1
  std::optional<u64> value_exp(long long n) const;
  // value of the primitive character mod conductor inducing chi
  std::optional<u64> value_exp_primitive(long long n) const;
  const std::vector<u64>& exps() const { return exps_; }

  static std::vector<DirichletChar> all_characters(const UnitGroup* G);
  DirichletChar product(const DirichletChar& other) const;

 private:
  const UnitGroup* G_ = nullptr;
  std::vector<u64> exps_;  // chi(gens[i]) = zeta_E^{exps_[i]}, exps in units of E/order_i
  u64 conductor_ = 1;
  bool odd_ = false;
  bool trivial_ = true;
};

// Bernoulli numbers and generalized Bernoulli B_{k,chi} (exact rationals;
// the chi-version returns cyclotomic coordinates with a common denominator)
bigrat bernoulli_number(int n);
std::vector<bigrat> generalized_bernoulli(const CycloRing& C, const DirichletChar& chi, int k);

// Eisenstein series data: cyclotomic coordinate q-expansion of E_k^{psi,phi}(q^t)
// (constant term included when psi is trivial). The k=2, both-trivial case is
// the standard t-stabilized series (t > 1 required there).
struct EisensteinSeries {
  const CycloRing* C;
  int k = 0;
  u64 t = 1;
  DirichletChar psi, phi;
  std::vector<bigrat> a0;                     // cyclotomic coords of constant term
  std::vector<std::vector<bigint>> coords;    // coords[i][n]: i < deg, integer a_n parts
  int qprec = 0;
};

EisensteinSeries eisenstein_qexp(const CycloRing& C, const DirichletChar& psi,
                                 const DirichletChar& phi, int k, u64 t, int qprec);

}  // namespace pmf
