#pragma once

// Katz-style bases of overconvergent forms of any integer weight: layers
// E_{p-1}^{-i} W_i with W_i a complement of E_{p-1} M_{w+(i-1)(p-1)} inside
// M_{w+i(p-1)}, the U-operator matrix, and the empirically certified
// precision of its characteristic data.

#include <functional>
#include <memory>

#include "pmf/classical.hpp"

namespace pmf {

struct KatzBasis {
  const ZRing* R = nullptr;
  u64 N = 0, p = 0;
  int w = 0;
  int i_min = 0, i_max = 0;
  int qprec = 0;
  int prefix = 0;
  int cert_prec = 0;

  // elements: per layer i, the complement rows of the layer space
  struct Element {
    int layer = 0;
    int space_row = 0;  // row index in the layer classical space
  };
  std::vector<Element> elements;
  std::vector<QSeries> series;                    // element q-expansions (length qprec)
  std::vector<std::shared_ptr<ClassicalSpace>> layer_space;  // indexed by i - i_min
  std::vector<QSeries> einv_pow;                  // E_{p-1}^{-i} for i = 0..i_max (length qprec)

  Echelon<ZRing> ech;      // prefix echelon of element series
  Mat<ZRing> combo;        // echelon row = combo * elements / p^{denom}
  std::vector<int> denom;

  int dim() const { return int(elements.size()); }
  // q-expansion of a vector given in echelon-basis coordinates
  QSeries series_of(const std::vector<u128>& coords, int len) const;
  // diamond action on the same data (acts layer-wise; E_{p-1} has level 1)
  QSeries diamond_series_of(const std::vector<u128>& coords, u64 d, int len) const;
  std::optional<std::vector<u128>> coords_of(const QSeries& f, int* residue_val = nullptr) const;
};

// layer budget and minimum q-length needed for a target certification
int katz_layer_budget(u64 p, int target_prec);
int katz_top_weight(u64 N, u64 p, int w, int target_prec);
int katz_min_qprec(u64 N, u64 p, int w, int target_prec);

// layer spaces are pulled from a caller-provided cache so towers that share a
// weight residue share the classical work
using SpaceProvider =
    std::function<std::shared_ptr<ClassicalSpace>(int weight, int min_qlen)>;

KatzBasis katz_basis(const ZRing& R, u64 N, u64 p, int w, int i_max, int qprec,
                     const SpaceProvider& provider, u64 complement_seed = 0);

struct OverconvergentSpace {
  KatzBasis basis;
  Mat<ZRing> U;                   // in echelon-basis coordinates
  std::vector<u128> rev_charpoly; // det(1 - X U), low-to-high, certified part
  int charpoly_spent = 0;
  int m_cert = 0;                 // empirical certificate from the i_max+2 comparison
  NewtonPolygon np;               // of det(XI - U), certified segments only

  const ZRing& ring() const { return *basis.R; }
  int dim() const { return basis.dim(); }
  // multiplicity of integer slope s among certified segments (-1: not certified)
  int certified_slope_mult(int s) const;
  int ordinary_rank() const;  // multiplicity of slope 0
};

// Builds the space with certification: assembles U at i_max and i_max+2 and
// compares characteristic data; m_cert is the agreement valuation (capped at
// the ring precision).
OverconvergentSpace u_matrix(const ZRing& R, u64 N, u64 p, int w, int target_prec, int qprec,
                             const SpaceProvider& provider, u64 complement_seed = 0);

// slope-0 sublattice (rows in echelon-basis coordinates) via the unit-root
// factor of the characteristic polynomial
Mat<ZRing> ordinary_part(const OverconvergentSpace& space, int* cert = nullptr);

}  // namespace pmf
