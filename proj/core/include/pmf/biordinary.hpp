#pragma once

// The bi-ordinary complex BO_k (and its cuspidal variant): the two-term
// complex [ao ⊕ to -> crit] whose differential is the sum of the inclusions,
// its H^0/H^1, the Hecke algebras with their a1 pairings, the map psi to the
// product of the two sublattice algebras, and the degree-shifting action of
// its kernel.

#include "pmf/theta.hpp"

namespace pmf {

struct BOComplex {
  int k = 0;
  bool cuspidal = false;
  OcLattice crit;          // M_k^{dagger,crit} in ambient coordinates
  Mat<ZRing> Uprime_crit;  // U' on the critical lattice basis
  Mat<ZRing> U_crit;       // U restricted
  Mat<ZRing> ao_in_crit;   // rows: ao basis in crit-lattice coordinates
  Mat<ZRing> to_in_crit;   // rows: (S-)to basis in crit-lattice coordinates
  int cert = 0;
};

// expresses the two sublattices inside the critical lattice; inclusions are
// checked injective with unit pivots
BOComplex build_complex(const OcLattice& crit, const Mat<ZRing>& Uprime_crit,
                        const Mat<ZRing>& U_crit, const OcLattice& ao, const OcLattice& to_sub,
                        int k, bool cuspidal);

struct CohomologyResult {
  Mat<ZRing> H0;                   // rows in crit coordinates (saturated)
  int H0_rank = 0;
  int H1_free_rank = 0;
  std::vector<int> H1_torsion;     // elementary divisor exponents
  bool torsion_trusted = false;    // all exponents < cert - 2
  int cert = 0;
};

CohomologyResult cohomology(const BOComplex& c);

// euler characteristic bookkeeping: rank BO^0 - rank BO^1
int euler_characteristic(const BOComplex& c);

struct HeckeAlgebraData {
  std::vector<Mat<ZRing>> module_basis;  // Z_p-module basis of the operator span
  std::vector<std::pair<u64, u64>> generators;  // (d, n) labels used
  std::vector<Mat<ZRing>> generator_mats;       // <d> T_n as matrices
  Mat<ZRing> gram;
  std::vector<int> gram_divisors;
  bool unimodular = false;
  int bound = 0;
};

// operator algebra of the critical lattice with the common generator labeling
// (p-part of T_n acts through U'); gram entries are a1(t_i . f_j)
HeckeAlgebraData hecke_algebra(const BOComplex& c, LatticeOps& crit_ops, int bound);

struct PsiData {
  Mat<ZRing> kernel;        // rows: ker psi in module-basis coordinates
  int kernel_rank = 0;
  int cokernel_rank = 0;    // rank of the pushout algebra T^ao (x) T^to
  std::vector<Mat<ZRing>> kernel_mats;  // the kernel operators on crit
};

// psi sends each operator on crit to its pair of restrictions to ao and to
PsiData psi_map(const BOComplex& c, const HeckeAlgebraData& alg);

struct DegreeShiftReport {
  bool contained = true;          // T . crit lies in ao + S^to
  bool lands_in_H0 = true;        // values lie in the intersection lattice
  bool equivariant = true;        // induced map commutes with T_2
  int checked = 0;
};

DegreeShiftReport degree_shift_check(const BOComplex& c, const CohomologyResult& coh,
                                     const PsiData& psi, LatticeOps& crit_ops);

// restriction of an operator matrix on crit to a sublattice given by rows in
// crit coordinates; throws if the sublattice is not stable at this precision
Mat<ZRing> restrict_to_rows(const Mat<ZRing>& op, const Mat<ZRing>& rows, const char* what);

}  // namespace pmf
