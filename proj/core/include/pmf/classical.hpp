#pragma once

// Classical spaces M_k(Gamma1(N)) over Z_p, built from Galois-traced
// Eisenstein series and products of two Eisenstein series, held as saturated
// unit-pivot echelon bases of q-expansions. The character-value problem is
// avoided by keeping the full Gamma1(N)-module with explicit diamond
// matrices; no eigenspace splitting over Z_p is attempted.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "pmf/dirichlet.hpp"
#include "pmf/lattice.hpp"
#include "pmf/linalg.hpp"
#include "pmf/qseries.hpp"
#include "pmf/slopes.hpp"

namespace pmf {

struct DimensionOracle {
  u64 N = 0;
  u64 sl2_index = 0;   // [SL2(Z) : Gamma1(N)]
  u64 psl_index = 0;   // index of the image in PSL2(Z)
  u64 num_cusps = 0;
  long long genus = 0;

  explicit DimensionOracle(u64 N);
  int dim_Mk(int k) const;
  int dim_Sk(int k) const;
  int dim_Eis(int k) const;
  int weight1_eis_count() const;
};

int sturm_bound(u64 N, u64 p, int k);   // ceil(k*[SL2:Gamma1(N) cap Gamma0(p)]/12)
int row_prefix_len(u64 N, int k);       // q-coefficients that pin down a form in M_k

// E_{p-1} normalized to constant term 1
QSeries eis_weight_p_minus_1(const ZRing& R, int qprec);

// shared per-level character data
struct LevelData {
  u64 N;
  UnitGroup group;
  CycloRing cyclo;
  std::vector<DirichletChar> chars;
  explicit LevelData(u64 N);
  static std::shared_ptr<const LevelData> get(u64 N);
};

class ClassicalSpace;

struct SpaceBuildOptions {
  int prefix_slack = 0;
  bool materialize_full = false;  // build full basis rows at full_len
  int full_len = 0;
  bool keep_operators = false;    // retain candidate data for hecke/diamond matrices
  // ladder mode: same level, weight k - (p-1), with full rows still materialized
  std::shared_ptr<const ClassicalSpace> predecessor;
};

class ClassicalSpace {
 public:
  static std::shared_ptr<ClassicalSpace> build(const ZRing& R, u64 N, int k,
                                               const SpaceBuildOptions& opt);
  // convenience: grid spaces with operator matrices
  static std::shared_ptr<ClassicalSpace> build(const ZRing& R, u64 N, int k, int prefix_slack,
                                               bool need_ops, int ops_len);
  // drop full-length bulk data (basis_full, candidate rows beyond the prefix)
  void release_bulk() const;
  // keep only the listed rows of the materialized basis (ladder memory control)
  void retain_only_rows(const std::vector<int>& rows) const;

  const ZRing* R = nullptr;
  std::shared_ptr<const LevelData> level;
  u64 N = 0;
  int k = 0;
  int dim = 0;
  int prefix = 0;
  int cert_prec = 0;  // certified p-adic precision of basis data
  int sturm = 0;

  // prefix echelon with unit pivots
  Echelon<ZRing> ech;

  // full q-expansions of the echelon basis rows (materialize_full case)
  mutable int ops_len = 0;

  // operator matrices (rows: image of basis element i in basis coordinates)
  Mat<ZRing> diamond(u64 d) const;
  Mat<ZRing> hecke_prime(u64 ell) const;  // T_ell (ell prime to N), U_ell (ell | N), incl. ell = p
  // all cached operators pairwise commute; checked cheaply on first use
  QSeries basis_series(int i, int len) const;
  QSeries series_of(const std::vector<u128>& coords, int len) const;
  // q-expansion of <d> applied to the element with the given coordinates
  QSeries diamond_series(const std::vector<u128>& coords, u64 d, int len) const;
  std::optional<std::vector<u128>> coords_of(const QSeries& f, int* residue_val = nullptr) const;

  // cuspidal sublattice in basis coordinates (Hecke-stable complement of the
  // Eisenstein span over Q_p, intersected with integral rows, saturated)
  Mat<ZRing> cusp_sublattice(int* cert = nullptr) const;
  // Eisenstein span in basis coordinates
  Mat<ZRing> eisenstein_sublattice() const;
  // slope-0 sublattice of a cached operator (T_p-ordinary part etc.)
  Mat<ZRing> ordinary_sublattice(const Mat<ZRing>& op, int* cert = nullptr) const;

  // W-layer extraction for Katz towers: full-length q-series of candidates
  // whose prefix classes complement `prev_pivots` inside this space
  std::vector<QSeries> complement_candidates(const std::vector<int>& prev_pivots, int len,
                                             u64 seed = 0) const;
  const std::vector<int>& pivots() const { return ech.pivot_col; }

  // interchange (self-describing text; strict parse)
  void export_basis(const std::string& path) const;
  static std::shared_ptr<ClassicalSpace> ingest_basis(const ZRing& R, const std::string& path);

 private:
  struct Parent {
    int kind = 0;  // 0 = eisenstein triple, 1 = product of two parents, 2 = E_{p-1} * predecessor row
    int psi = 0, phi = 0;
    u64 t = 1;
    int weight = 0;
    int left = -1, right = -1;  // product factor parent indices
    int pred_row = -1;          // kind 2
    int scale_exp = 0;          // stored series = p^{scale} * true series
    std::vector<u64> chi_exps;  // nebentypus for kinds 0/1 (drives the diamond action)
    std::vector<std::vector<u128>> series;  // cyclotomic coordinate series (kind 2: one row)
    int series_len = 0;
  };

  mutable std::vector<Parent> parents_;
  struct Recipe {
    int parent;
    int coord;
  };
  std::vector<Recipe> kept_;
  Mat<ZRing> combo_;  // echelon row i = (combo_ row i) . kept-candidates / p^{denom_[i]}
  std::vector<int> denom_;
  mutable std::vector<std::vector<u128>> kept_full_;
  std::shared_ptr<const ClassicalSpace> predecessor_;
  mutable Mat<ZRing> basis_full_store_;
  mutable std::vector<int> retained_rows_;  // empty: all rows stored

  mutable std::map<u64, Mat<ZRing>> diamond_cache_, hecke_cache_;
  mutable std::mutex cache_mu_;

  void ensure_parent_series(int idx, int len) const;
  void materialize_eis_(Parent& P, int len) const;
  void materialize_product_(Parent& P, int len) const;
  void materialize_epred_(Parent& P, int len) const;
  std::vector<u128> candidate_prefix(const Recipe& rc, int len) const;
  Mat<ZRing> op_matrix_from_rows(const std::vector<std::vector<u128>>& image_prefix_rows,
                                 const char* what) const;
};

// p-stabilization of a single T_p-eigenform (2-dimensional old space)
struct StabilizedPair {
  u128 alpha, beta;      // U_p-eigenvalues, val(alpha)=0, val(beta)=k-1
  QSeries f_alpha, f_beta;  // f(q) - beta f(q^p), f(q) - alpha f(q^p)
  Mat<ZRing> u_matrix;      // [[a_p, 1], [-<p>chi p^{k-1}, 0]] in basis f(q), f(q^p)
};

StabilizedPair stabilized_pair(const ZRing& R, const QSeries& f, u128 ap_mont,
                               u128 chi_p_mont, int k, u64 p);

// eta products: exact integer expansion of prod eta(d z)^{e_d} (q-shift folded in)
QSeries eta_product(const ZRing& R, const std::vector<std::pair<int, int>>& exps, int qprec);

}  // namespace pmf
