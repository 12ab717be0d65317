#pragma once

// The theta-power map and the distinguished sublattices of the critical
// overconvergent space: anti-ordinary (theta image of the weight 2-k ordinary
// part), twist-ordinary (critical classical stabilizations), and the critical
// lattice itself, cut out by a1-duality against the Hecke algebra.

#include "pmf/overconvergent.hpp"

namespace pmf {

// lattice inside an overconvergent space: rows are integral coordinates in
// the space's echelon basis
struct OcLattice {
  const OverconvergentSpace* space = nullptr;
  Mat<ZRing> rows;
  int cert = 0;

  int rank() const { return rows.nr; }
  QSeries row_series(int i, int len) const;
  QSeries series_of(const std::vector<u128>& coords, int len) const;
};

// operator matrices restricted to a lattice, with the composite T_n of the
// abstract Hecke algebra (U- or U'-flavored at p)
class LatticeOps {
 public:
  LatticeOps(const OcLattice& L, int window_len, int tol);

  const OcLattice& lattice() const { return *L_; }
  int window() const { return window_; }
  int tol() const { return tol_; }

  Mat<ZRing> U() const;                 // U restricted to the lattice
  Mat<ZRing> diamond(u64 d) const;
  Mat<ZRing> hecke_prime(u64 ell) const;  // ell != p, including ell | N
  // T_n per the multiplicative convention; p-power part routed to U or U'
  Mat<ZRing> hecke_Tn(u64 n, const Mat<ZRing>& at_p) const;
  // coordinates of an external q-series in the lattice row basis
  std::optional<std::vector<u128>> coords_of(const QSeries& f, int* rv = nullptr) const;
  // a1 functional of a coordinate vector
  u128 a1_of(const std::vector<u128>& coords) const;

 private:
  const OcLattice* L_;
  int window_, tol_;
  Echelon<ZRing> row_ech_;
  std::vector<QSeries> row_q_;  // cached series, length >= needed reads
  mutable std::map<u64, Mat<ZRing>> dia_cache_, hecke_cache_;
  mutable std::optional<Mat<ZRing>> u_cache_;
  Mat<ZRing> from_images(const std::vector<QSeries>& images, const char* what) const;
  friend struct LatticeOpsAccess;
};

// scaled inverse via exact lifting: <p>_N p^{k-1} U^{-1} on a lattice whose
// U-restriction has pure slope k-1; returns the certified precision through
// `cert` (the intrinsic loss is k-1)
Mat<ZRing> scaled_inverse_uprime(const ZRing& R, const Mat<ZRing>& U_restr,
                                 const Mat<ZRing>& diamond_p, int k, int in_cert, int* cert);

// Hecke-algebra module span and a1-dual lattice machinery
struct HeckeDualResult {
  OcLattice dual;              // the a1-dual lattice (integral coords, checked)
  int algebra_rank = 0;
  std::vector<int> gram_divisors;  // SNF exponents of the pairing Gram matrix
  bool gram_unimodular = false;
  int used_bound = 0;
};

// computes the Z_p-span of {<d> T_n : n <= bound} acting on L (p-part of T_n
// given by `at_p`), doubles the bound until the span's SNF stabilizes, and
// returns the a1-dual lattice with its pairing certificate
HeckeDualResult hecke_dual_lattice(const OcLattice& L, LatticeOps& ops, const Mat<ZRing>& at_p,
                                   int bound, int window_len);

// anti-ordinary: theta^{k-1} image of the weight-(2-k) ordinary dual lattice
struct AoData {
  OcLattice lattice;       // inside the weight-k space
  Mat<ZRing> U_source;     // U on the weight-(2-k) ordinary dual lattice
  Mat<ZRing> diamond_p_source;
  OcLattice source;        // the weight-(2-k) lattice itself
  int cert = 0;
};
AoData anti_ordinary_lattice(const OverconvergentSpace& space_k,
                             const OverconvergentSpace& space_2k, int k, int bound,
                             int window_len);

// twist-ordinary: critical stabilizations of the classical ordinary part,
// built on the q-series lattice of the Gamma0(p)-old space
struct ToData {
  Mat<ZRing> old_rows_q;     // saturated old-space lattice (rows = q-series prefix)
  OcLattice lattice;         // embedded in the weight-k overconvergent space
  Mat<ZRing> U_to;           // U restricted (slope k-1)
  Mat<ZRing> Uprime_to;      // <p> p^{k-1} U^{-1}
  Mat<ZRing> diamond_p_to;
  bool cuspidal = false;
  int cert = 0;
};
ToData twist_ordinary_lattice(const OverconvergentSpace& space_k,
                              const ClassicalSpace& classical_k, bool cuspidal, int qlen);

// critical subspace: saturated span of ao + to closed under generalized
// U-eigenvectors above the twist-ordinary eigenvalues
struct CriticalSubspace {
  OcLattice V;
  int defect = 0;          // directions beyond span(ao + to)
  int cert = 0;
};
CriticalSubspace critical_subspace(const OverconvergentSpace& space_k, const AoData& ao,
                                   const ToData& to, int k);

// theta^{j} on q-series is qs_theta; the matrix of theta^{k-1} from source
// coordinates to target lattice coordinates
Mat<ZRing> theta_matrix(const OcLattice& source, const OcLattice& target, int k, int len,
                        int tol);

// Hodge decomposition identity for a stabilized eigenform:
// f = [-p^{k-1} <p> U^{-2} tau_k(U) f_alpha] + [tau_k(U') f_beta]
struct HodgeReport {
  bool holds = false;
  int checked_terms = 0;
  int agreement_val = 0;
};
HodgeReport hodge_identity_check(const ZRing& R, const QSeries& f, const StabilizedPair& sp,
                                 u128 chi_p, int k, int terms, int tol);

}  // namespace pmf
