#pragma once

// CM detection on Hecke eigensystem components, the generalized-eigenform
// q-series law for split-CM critical forms, and the theta-image/bi-ordinary
// equivalence checks.

#include "pmf/biordinary.hpp"

namespace pmf {

// Kronecker symbol (D/n)
int kronecker_symbol(long long D, long long n);

struct CMProfile {
  long long D = 0;            // fundamental discriminant < 0
  bool p_split = false;
  std::vector<u64> inert_primes;  // inert primes up to the scan bound
  std::vector<u64> split_primes;
};
CMProfile cm_profile(long long D, u64 p, u64 prime_bound);
bool is_fundamental_discriminant(long long D);
std::vector<long long> discriminant_scan_list(u64 N);

// finest joint generalized-eigenspace decomposition of a lattice under the
// given commuting operators, via idempotents lifted from the mod-p splitting;
// rows of each block are coordinates in the ambient lattice basis
std::vector<Mat<ZRing>> eigen_components(const ZRing& R,
                                         const std::vector<Mat<ZRing>>& ops_list,
                                         int ambient_rank, int cert);

// true iff charpoly(T_ell | component) == X^dim for every inert ell <= bound,
// i.e. a_ell = 0 mod p^tol at all inert primes
bool is_cm_component(const ZRing& R, const std::vector<Mat<ZRing>>& tell_on_comp,
                     const std::vector<u64>& ells, const CMProfile& cm, int tol);

// convenience for plain eigenvalue tables
bool is_cm_eigensystem(const ZRing& R, const std::map<u64, u128>& a_ell, long long D, int tol);

struct EigenSystem {
  std::map<u64, u128> a_ell;  // prime eigenvalues away from p
  u128 at_p = 0;              // U'-eigenvalue on the critical side
};

struct HsuReport {
  int eigenspace_dim = 0;
  bool two_dimensional = false;
  bool b1_zero = false;
  bool bp_zero = false;
  bool split_coeffs_vanish = false;
  int first_nonzero_index = -1;  // of the strictly generalized vector (inert expected)
  int checked_to = 0;
  bool inert_nilpotent = true;
  bool split_semisimple = true;
  int tol = 0;
};

// the generalized U'-eigenspace of the given eigensystem inside the cuspidal
// critical lattice; when 2-dimensional, verifies the coefficient law
// b_n = 0 at chi_D(n) = +1 indices and the inert/split dichotomy
HsuReport hsu_check(const BOComplex& c, LatticeOps& crit_ops, const HeckeAlgebraData& alg,
                    const EigenSystem& f, const CMProfile& cm, int qprec);

struct BeSplitReport {
  bool in_theta_image = false;
  bool in_bo_cohomology = false;
  bool agree = false;
  bool torsion_inconclusive = false;
};

BeSplitReport be_split_check(const BOComplex& c, const CohomologyResult& coh,
                             LatticeOps& crit_ops, const EigenSystem& f);

struct GWComponent {
  int dim = 0;
  bool cm = false;
  long long cm_discriminant = 0;
  std::vector<std::string> eigen_print;  // charpoly digests for the report
};

struct GhateVatsalReport {
  int k = 0;
  std::vector<GWComponent> components;
  bool all_cm = true;   // vacuous pass when no components
};

// classifies every eigensystem component of H^0(SBO_k) as CM or not, scanning
// fundamental discriminants up to the level-derived bound
GhateVatsalReport ghate_vatsal_check(const BOComplex& c, const CohomologyResult& coh,
                                     LatticeOps& crit_ops, u64 prime_bound);

// cuspidal sublattice of an operator-equipped lattice: elements whose whole
// Hecke orbit has vanishing constant term
Mat<ZRing> cuspidal_kernel(const ZRing& R, const std::vector<Mat<ZRing>>& module_basis,
                           const std::vector<u128>& a0_of_basis, int rank);

// alternate (U'-based) q-series of an element given in lattice coordinates
QSeries alternate_series(const OcLattice& L, const Mat<ZRing>& Uprime,
                         const std::vector<u128>& coords, int len);

}  // namespace pmf
