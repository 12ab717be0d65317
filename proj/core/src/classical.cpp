#include "pmf/classical.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "pmf/ntt.hpp"

namespace pmf {

DimensionOracle::DimensionOracle(u64 n) : N(n) {
  if (N < 5) throw ConfigError("tame level must be at least 5");
  sl2_index = N * N;
  u64 m = N;
  for (u64 q = 2; q * q <= m; ++q)
    if (m % q == 0) {
      sl2_index = sl2_index / (q * q) * (q * q - 1);
      while (m % q == 0) m /= q;
    }
  if (m > 1) sl2_index = sl2_index / (m * m) * (m * m - 1);
  psl_index = sl2_index / 2;  // -I is not in Gamma1(N) for N > 2
  auto phi = [](u64 x) {
    u64 r = x, y = x;
    for (u64 q = 2; q * q <= y; ++q)
      if (y % q == 0) {
        r -= r / q;
        while (y % q == 0) y /= q;
      }
    if (y > 1) r -= r / y;
    return r;
  };
  u64 twice = 0;
  for (u64 d = 1; d <= N; ++d)
    if (N % d == 0) twice += phi(d) * phi(N / d);
  num_cusps = twice / 2;
  // no elliptic points for N >= 4
  genus = 1 + ((long long)psl_index - 6 * (long long)num_cusps) / 12;
}

int DimensionOracle::weight1_eis_count() const {
  auto level = LevelData::get(N);
  int count = 0;
  const auto& chars = level->chars;
  for (std::size_t a = 0; a < chars.size(); ++a)
    for (std::size_t b = a; b < chars.size(); ++b) {
      if (!(chars[a].odd() != chars[b].odd())) continue;
      u64 c = chars[a].conductor() * chars[b].conductor();
      if (c == 0) continue;
      for (u64 t = 1; t * c <= N; ++t)
        if (N % (t * c) == 0) ++count;
    }
  return count;
}

int DimensionOracle::dim_Mk(int k) const {
  if (k < 0) return 0;
  if (k == 0) return 1;
  if (k == 1) return weight1_eis_count();  // no weight-1 cusp forms below level 23
  return int((long long)(k - 1) * (genus - 1) + (long long)k * num_cusps / 2);
}

int DimensionOracle::dim_Eis(int k) const {
  if (k < 0) return 0;
  if (k == 0) return 1;
  if (k == 1) return weight1_eis_count();
  if (k == 2) return int(num_cusps) - 1;
  return int(num_cusps);
}

int DimensionOracle::dim_Sk(int k) const {
  if (k < 2) {
    if (k == 1 && N >= 23)
      throw ConfigError("weight-1 cusp dimension not available for N >= 23");
    return 0;
  }
  return dim_Mk(k) - dim_Eis(k);
}

int sturm_bound(u64 N, u64 p, int k) {
  DimensionOracle dim(N);
  u64 idx = dim.sl2_index * (p + 1);
  return int((u64(k) * idx + 11) / 12);
}

int row_prefix_len(u64 N, int k) {
  DimensionOracle dim(N);
  return int(u64(k) * dim.psl_index / 12) + 1 + 8;
}

LevelData::LevelData(u64 n) : N(n), group(n), cyclo(group.exponent) {
  chars = DirichletChar::all_characters(&group);
}

std::shared_ptr<const LevelData> LevelData::get(u64 N) {
  static std::mutex mu;
  static std::map<u64, std::shared_ptr<const LevelData>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(N);
  if (it != cache.end()) return it->second;
  auto ld = std::make_shared<const LevelData>(N);
  cache[N] = ld;
  return ld;
}

QSeries eis_weight_p_minus_1(const ZRing& R, int qprec) {
  const u64 p = R.p();
  // a_0 = -B_{p-1}/(2(p-1)) has valuation -1; normalized to a_0 = 1 the
  // higher coefficients all gain a factor of p
  bigrat B = bernoulli_number(int(p) - 1);
  bigrat a0 = -B / bigrat(2 * (bigint(p) - 1));
  bigrat cinv = 1 / a0;
  bigint num = boost::multiprecision::numerator(cinv);
  bigint den = boost::multiprecision::denominator(cinv);
  if (val_of_big(den, p, 2) != 0 || val_of_big(num, p, 2) != 1)
    throw Error("eis_weight_p_minus_1: unexpected p-content of the constant");
  u128 c = R.mul(R.from_big(num), R.inv_unit(R.from_big(den)));
  QSeries E(R, qprec);
  for (int d = 1; d < qprec; ++d) {
    u128 dk = R.pow(R.from_int(d), u128(p - 2));
    for (int n = d; n < qprec; n += d) E.c[n] = R.add(E.c[n], dk);
  }
  for (int n = 1; n < qprec; ++n) E.c[n] = R.mul(E.c[n], c);
  E.c[0] = R.one();
  return E;
}

// ---------------------------------------------------------------------------
// parent series materialization
// ---------------------------------------------------------------------------

namespace {

std::vector<bigint> reduce_xt_mod_phi(u64 E, int t) {
  auto phi = cyclotomic_polynomial(E);
  int d = int(phi.size()) - 1;
  std::vector<bigint> a(t + 1, 0);
  a[t] = 1;
  for (int i = int(a.size()) - 1; i >= d; --i) {
    bigint c = a[i];
    if (c == 0) continue;
    a[i] = 0;
    for (int j = 0; j < d; ++j) a[i - d + j] -= c * phi[j];
  }
  a.resize(d, 0);
  return a;
}

}  // namespace

void ClassicalSpace::materialize_eis_(Parent& P, int len) const {
  const int deg = level->cyclo.deg();
  const auto& psi = level->chars[P.psi];
  const auto& phi = level->chars[P.phi];
  P.series.assign(deg, std::vector<u128>(len, 0));
  const bool both_trivial = psi.conductor() == 1 && phi.conductor() == 1;
  if (P.weight == 2 && both_trivial) {
    u128 inv24 = R->inv_unit(R->from_int(24));
    P.series[0][0] = R->mul(R->from_int((long long)P.t - 1), inv24);
    std::vector<u128> sig(len, 0);
    for (int d = 1; d < len; ++d) {
      u128 dm = R->from_int(d);
      for (int n = d; n < len; n += d) sig[n] = R->add(sig[n], dm);
    }
    for (int n = 1; n < len; ++n) {
      u128 x = sig[n];
      if (n % int(P.t) == 0) x = R->sub(x, R->mul_small(sig[n / int(P.t)], u64(P.t)));
      P.series[0][n] = x;
    }
    P.scale_exp = 0;
    return;
  }
  std::vector<std::vector<u128>> zeta_red;
  for (u64 t = 0; t < level->group.exponent; ++t) {
    auto z = level->cyclo.zeta_pow(t);
    std::vector<u128> v(deg);
    for (int i = 0; i < deg; ++i) v[i] = R->from_big(z[i]);
    zeta_red.push_back(std::move(v));
  }
  const int nmax = std::max<int>(1, int((u64(len) + P.t - 1) / P.t));
  std::vector<std::vector<u128>> an(deg, std::vector<u128>(nmax, 0));
  for (int d = 1; d < nmax; ++d) {
    auto pv = phi.value_exp_primitive(d);
    if (!pv) continue;
    u128 dk = R->pow(R->from_int(d), u128(P.weight - 1));
    for (int n = d; n < nmax; n += d) {
      auto sv = psi.value_exp_primitive(n / d);
      if (!sv) continue;
      const auto& z = zeta_red[(*pv + *sv) % level->group.exponent];
      for (int i = 0; i < deg; ++i)
        if (!R->is_zero(z[i])) an[i][n] = R->add(an[i][n], R->mul(dk, z[i]));
    }
  }
  for (int n = 1; n < nmax; ++n) {
    if (u64(n) * P.t >= u64(len)) break;
    for (int i = 0; i < deg; ++i) P.series[i][std::size_t(n) * P.t] = an[i][n];
  }
  P.scale_exp = 0;
  if (psi.conductor() == 1) {
    auto B = generalized_bernoulli(level->cyclo, phi, P.weight);
    const u64 p = R->p();
    int worst = 0;
    std::vector<bigrat> a0(deg);
    for (int i = 0; i < deg; ++i) {
      a0[i] = -B[i] / bigrat(2 * P.weight);
      worst = std::max(worst,
                       val_of_big(boost::multiprecision::denominator(a0[i]), p, R->prec()));
    }
    P.scale_exp = worst;
    if (worst > 0)
      for (int i = 0; i < deg; ++i)
        for (int n = 1; n < len; ++n) P.series[i][n] = R->mul_p_pow(P.series[i][n], worst);
    for (int i = 0; i < deg; ++i) {
      bigint num = boost::multiprecision::numerator(a0[i]);
      bigint den = boost::multiprecision::denominator(a0[i]);
      int dv = val_of_big(den, p, R->prec());
      for (int s = 0; s < dv; ++s) den /= p;
      for (int s = dv; s < worst; ++s) num *= p;
      P.series[i][0] = R->mul(R->from_big(num), R->inv_unit(R->from_big(den)));
    }
  }
}

void ClassicalSpace::materialize_product_(Parent& P, int len) const {
  const int deg = level->cyclo.deg();
  ensure_parent_series(P.left, len);
  ensure_parent_series(P.right, len);
  const auto& A = parents_[P.left];
  const auto& B = parents_[P.right];
  std::vector<std::vector<u128>> acc(2 * deg - 1);
  for (int i = 0; i < deg; ++i)
    for (int j = 0; j < deg; ++j) {
      auto prod = ntt_multiply(*R, A.series[i], B.series[j], len);
      auto& dst = acc[i + j];
      if (dst.empty())
        dst = std::move(prod);
      else
        for (int n = 0; n < len; ++n) dst[n] = R->add(dst[n], prod[n]);
    }
  P.series.assign(deg, std::vector<u128>(len, 0));
  for (int t = 0; t < 2 * deg - 1; ++t) {
    if (acc[t].empty()) continue;
    auto red = reduce_xt_mod_phi(level->group.exponent, t);
    for (int r = 0; r < deg; ++r) {
      if (red[r] == 0) continue;
      u128 c = R->from_big(red[r]);
      for (int n = 0; n < len; ++n)
        P.series[r][n] = R->add(P.series[r][n], R->mul(c, acc[t][n]));
    }
  }
  P.scale_exp = A.scale_exp + B.scale_exp;
}

void ClassicalSpace::materialize_epred_(Parent& P, int len) const {
  if (!predecessor_)
    throw PrecisionExhausted("ladder candidate needs its released predecessor");
  auto E = eis_weight_p_minus_1(*R, len);
  auto g = predecessor_->basis_series(P.pred_row, len);
  QSeries prod = qs_mul_trunc(E, g, len);
  P.series.assign(1, std::vector<u128>(len, 0));
  for (int n = 0; n < len; ++n) P.series[0][n] = prod.c[n];
  P.scale_exp = 0;
}

void ClassicalSpace::ensure_parent_series(int idx, int len) const {
  auto& P = parents_[idx];
  if (P.series_len >= len) return;
  if (P.kind == 0)
    materialize_eis_(P, len);
  else if (P.kind == 1)
    materialize_product_(P, len);
  else
    materialize_epred_(P, len);
  P.series_len = len;
}

std::vector<u128> ClassicalSpace::candidate_prefix(const Recipe& rc, int len) const {
  ensure_parent_series(rc.parent, len);
  const auto& s = parents_[rc.parent].series[rc.coord];
  return std::vector<u128>(s.begin(), s.begin() + len);
}

// ---------------------------------------------------------------------------
// construction
// ---------------------------------------------------------------------------

std::shared_ptr<ClassicalSpace> ClassicalSpace::build(const ZRing& R, u64 N, int k,
                                                      int prefix_slack, bool need_ops,
                                                      int ops_len) {
  SpaceBuildOptions opt;
  opt.prefix_slack = prefix_slack;
  opt.materialize_full = need_ops;
  opt.full_len = ops_len;
  opt.keep_operators = need_ops;
  return build(R, N, k, opt);
}

std::shared_ptr<ClassicalSpace> ClassicalSpace::build(const ZRing& R, u64 N, int k,
                                                      const SpaceBuildOptions& opt) {
  auto sp = std::make_shared<ClassicalSpace>();
  ClassicalSpace& S = *sp;
  S.R = &R;
  S.N = N;
  S.k = k;
  S.level = LevelData::get(N);
  S.predecessor_ = opt.predecessor;
  DimensionOracle oracle(N);
  const int target = oracle.dim_Mk(k);
  S.prefix = row_prefix_len(N, k) + opt.prefix_slack;
  S.sturm = int(u64(k) * oracle.psl_index / 12) + 1;
  const int deg = S.level->cyclo.deg();
  const auto& chars = S.level->chars;

  if (opt.predecessor) {
    if (opt.predecessor->k != k - int(R.p() - 1))
      throw ConfigError("ladder predecessor weight mismatch");
    if (opt.predecessor->ops_len < S.prefix)
      throw PrecisionExhausted("ladder predecessor lacks materialized rows");
  }

  auto add_eis_parents = [&](int w) {
    std::vector<int> idxs;
    for (std::size_t a = 0; a < chars.size(); ++a)
      for (std::size_t b = 0; b < chars.size(); ++b) {
        bool odd = chars[a].odd() != chars[b].odd();
        if ((odd ? 1 : 0) != (w % 2)) continue;
        u64 c = chars[a].conductor() * chars[b].conductor();
        if (c == 0 || N % c != 0) continue;
        bool both_trivial = chars[a].conductor() == 1 && chars[b].conductor() == 1;
        if (w == 1 && a > b) continue;  // E_1^{psi,phi} = E_1^{phi,psi}
        for (u64 t = 1; t * c <= N; ++t) {
          if (N % (t * c) != 0) continue;
          if (w == 2 && both_trivial && t == 1) continue;
          Parent P;
          P.kind = 0;
          P.psi = int(a);
          P.phi = int(b);
          P.t = t;
          P.weight = w;
          P.chi_exps = chars[a].product(chars[b]).exps();
          S.parents_.push_back(std::move(P));
          idxs.push_back(int(S.parents_.size()) - 1);
        }
      }
    return idxs;
  };

  auto make_product_parent = [&](int a, int b) {
    Parent P;
    P.kind = 1;
    P.left = a;
    P.right = b;
    P.weight = S.parents_[a].weight + S.parents_[b].weight;
    DirichletChar ca(&S.level->group, S.parents_[a].chi_exps);
    DirichletChar cb(&S.level->group, S.parents_[b].chi_exps);
    P.chi_exps = ca.product(cb).exps();
    S.parents_.push_back(std::move(P));
    return int(S.parents_.size()) - 1;
  };

  std::vector<std::vector<u128>> rows, combos;
  std::vector<int> pivots, denoms;
  std::vector<Recipe> kept;
  int sat_loss = 0;

  auto normalize_combo = [&R](std::vector<u128>& cvec, int& dv) {
    if (dv == 0) return;
    int c = R.prec();
    for (const auto& x : cvec) {
      c = std::min(c, R.val(x));
      if (c == 0) return;
    }
    c = std::min(c, dv);
    if (c == 0) return;
    for (auto& x : cvec) x = R.div_exact_p(x, c);
    dv -= c;
  };

  // returns: 0 dependent, 1 accepted, 2 would need a division (stash, when
  // divisions are disallowed)
  auto feed_vector = [&](std::vector<u128> v, Recipe rc, bool allow_division) -> int {
    std::vector<u128> cb(kept.size() + 1, 0);
    cb.back() = R.one();
    int dn = 0;
    for (std::size_t t = 0; t < rows.size(); ++t) {
      u128 c = v[pivots[t]];
      if (R.is_zero(c)) continue;
      for (int j = 0; j < S.prefix; ++j) v[j] = R.sub(v[j], R.mul(c, rows[t][j]));
      int d2 = std::max(dn, denoms[t]);
      if (d2 > dn)
        for (auto& x : cb) x = R.mul_p_pow(x, d2 - dn);
      for (std::size_t j = 0; j < combos[t].size(); ++j)
        cb[j] = R.sub(cb[j], R.mul(c, R.mul_p_pow(combos[t][j], d2 - denoms[t])));
      dn = d2;
    }
    int cv = R.prec();
    for (int j = 0; j < S.prefix && cv > 0; ++j) cv = std::min(cv, R.val(v[j]));
    if (cv >= R.prec()) return 0;
    if (cv > 0 && !allow_division) return 2;
    if (cv > 0) {
      for (int j = 0; j < S.prefix; ++j) v[j] = R.div_exact_p(v[j], cv);
      dn += cv;
      sat_loss = std::max(sat_loss, cv);
    }
    if (dn >= R.prec())
      throw PrecisionExhausted("saturation denominators reached the precision");
    int pj = -1;
    for (int j = 0; j < S.prefix; ++j)
      if (R.val(v[j]) == 0) {
        pj = j;
        break;
      }
    if (pj < 0) throw Error("classical build: no unit pivot after saturation");
    u128 inv = R.inv_unit(v[pj]);
    for (int j = 0; j < S.prefix; ++j) v[j] = R.mul(v[j], inv);
    for (auto& x : cb) x = R.mul(x, inv);
    for (std::size_t t = 0; t < rows.size(); ++t) {
      u128 c = rows[t][pj];
      if (R.is_zero(c)) continue;
      for (int j = 0; j < S.prefix; ++j) rows[t][j] = R.sub(rows[t][j], R.mul(c, v[j]));
      int d2 = std::max(denoms[t], dn);
      if (d2 > denoms[t])
        for (auto& x : combos[t]) x = R.mul_p_pow(x, d2 - denoms[t]);
      combos[t].resize(kept.size() + 1, 0);
      for (std::size_t j = 0; j < cb.size(); ++j)
        combos[t][j] = R.sub(combos[t][j], R.mul(c, R.mul_p_pow(cb[j], d2 - dn)));
      denoms[t] = d2;
      normalize_combo(combos[t], denoms[t]);
    }
    normalize_combo(cb, dn);
    kept.push_back(rc);
    for (auto& cvec : combos) cvec.resize(kept.size(), 0);
    cb.resize(kept.size(), 0);
    rows.push_back(std::move(v));
    combos.push_back(std::move(cb));
    pivots.push_back(pj);
    denoms.push_back(dn);
    return 1;
  };

  std::vector<Recipe> stash;
  auto feed_candidate = [&](int parent, int coord, bool allow_division = false) -> bool {
    Recipe rc{parent, coord};
    int res = feed_vector(S.candidate_prefix(rc, S.prefix), rc, allow_division);
    if (res == 2) stash.push_back(rc);
    return res == 1;
  };
  auto drain_stash = [&]() {
    // second pass: pay the saturation divisions only when no unit-content
    // candidate covered the direction
    for (std::size_t i = 0; i < stash.size() && int(rows.size()) < target; ++i)
      feed_vector(S.candidate_prefix(stash[i], S.prefix), stash[i], true);
  };

  // pool A: E_{p-1} times the predecessor basis (inherits its saturation)
  if (opt.predecessor && target > 0) {
    for (int row = 0; row < opt.predecessor->dim && int(rows.size()) < target; ++row) {
      Parent P;
      P.kind = 2;
      P.weight = k;
      P.pred_row = row;
      S.parents_.push_back(std::move(P));
      feed_candidate(int(S.parents_.size()) - 1, 0, true);
    }
  }

  // pool B: monomials in the weight-1 Eisenstein series (graded-ring
  // generators at small level), fed by ascending leading exponent
  std::map<std::vector<int>, int> mono_cache;
  std::vector<int> w1;
  if (int(rows.size()) < target && k >= 2) {
    w1 = add_eis_parents(1);
    for (int pid : w1) mono_cache[{pid}] = pid;  // degree-1 monomials
    std::function<int(std::vector<int>&)> mono_parent = [&](std::vector<int>& key) -> int {
      auto it = mono_cache.find(key);
      if (it != mono_cache.end()) return it->second;
      std::vector<int> sub(key.begin(), key.end() - 1);
      int left = mono_parent(sub);
      int pid = make_product_parent(left, key.back());
      mono_cache[key] = pid;
      return pid;
    };
    const int g = int(w1.size());
    if (g > 0) {
      // exponent vectors (e_0..e_{g-1}) of total k, enumerated by e_0 asc, etc.
      std::function<void(int, int, std::vector<int>&)> enumerate =
          [&](int pos, int left, std::vector<int>& exps) {
            if (int(rows.size()) >= target) return;
            if (pos == g - 1) {
              exps[pos] = left;
              std::vector<int> key;
              for (int i = 0; i < g; ++i)
                for (int t = 0; t < exps[i]; ++t) key.push_back(w1[i]);
              if (key.empty()) return;
              int pid = mono_parent(key);
              for (int c = 0; c < deg && int(rows.size()) < target; ++c)
                feed_candidate(pid, c);
              return;
            }
            for (int e = 0; e <= left && int(rows.size()) < target; ++e) {
              exps[pos] = e;
              enumerate(pos + 1, left - e, exps);
            }
          };
      std::vector<int> exps(g, 0);
      // ascending first-exponent order: permute so the first generator varies
      // slowest (few x-powers needed when a weight-2 relation eliminates x^2)
      enumerate(0, k, exps);
    }
  }

  // pool C: weight-k Eisenstein series and products of two Eisenstein series
  if (int(rows.size()) < target) {
    std::map<int, std::vector<int>> eis_by_weight;
    eis_by_weight[k] = add_eis_parents(k);
    for (int pid : eis_by_weight[k]) {
      for (int c = 0; c < deg && int(rows.size()) < target; ++c) feed_candidate(pid, c);
      if (int(rows.size()) >= target) break;
    }
    for (int k1 = 1; int(rows.size()) < target && k1 <= k / 2; ++k1) {
      int k2 = k - k1;
      if (!eis_by_weight.count(k1)) eis_by_weight[k1] = add_eis_parents(k1);
      if (!eis_by_weight.count(k2)) eis_by_weight[k2] = add_eis_parents(k2);
      for (int a : eis_by_weight[k1]) {
        for (int b : eis_by_weight[k2]) {
          if (int(rows.size()) >= target) break;
          int pid = make_product_parent(a, b);
          for (int c = 0; c < deg && int(rows.size()) < target; ++c) feed_candidate(pid, c);
        }
        if (int(rows.size()) >= target) break;
      }
    }
  }
  if (int(rows.size()) < target) drain_stash();
  if (int(rows.size()) != target)
    throw SpanDeficient("dim found " + std::to_string(rows.size()) + ", expected " +
                        std::to_string(target) + " at N=" + std::to_string(N) +
                        " k=" + std::to_string(k));

  S.dim = target;
  std::vector<int> order(target);
  for (int i = 0; i < target; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int x, int y) { return pivots[x] < pivots[y]; });
  S.kept_ = kept;
  S.combo_ = Mat<ZRing>(R, target, int(kept.size()));
  S.denom_.resize(target);
  S.ech.rows = Mat<ZRing>(R, target, S.prefix);
  S.ech.sat_loss = sat_loss;
  for (int i = 0; i < target; ++i) {
    int src = order[i];
    S.ech.pivot_col.push_back(pivots[src]);
    for (int j = 0; j < S.prefix; ++j) S.ech.rows.at(i, j) = rows[src][j];
    for (std::size_t j = 0; j < kept.size(); ++j) S.combo_.at(i, int(j)) = combos[src][j];
    S.denom_[i] = denoms[src];
  }
  int maxden = 0;
  for (int d : S.denom_) maxden = std::max(maxden, d);
  int pred_cert = opt.predecessor ? opt.predecessor->cert_prec : R.prec();
  S.cert_prec = std::min(R.prec() - maxden, pred_cert);

  if (opt.materialize_full) {
    int flen = std::max(opt.full_len, S.prefix);
    S.ops_len = flen;
    S.basis_full_store_ = Mat<ZRing>(R, target, flen);
    for (std::size_t t = 0; t < kept.size(); ++t) S.ensure_parent_series(kept[t].parent, flen);
    for (int i = 0; i < target; ++i) {
      std::vector<u128> acc(flen, 0);
      for (std::size_t t = 0; t < kept.size(); ++t) {
        u128 c = S.combo_.at(i, int(t));
        if (R.is_zero(c)) continue;
        const auto& src = S.parents_[S.kept_[t].parent].series[S.kept_[t].coord];
        for (int n = 0; n < flen; ++n) acc[n] = R.add(acc[n], R.mul(c, src[n]));
      }
      for (int n = 0; n < flen; ++n)
        S.basis_full_store_.at(i, n) = R.div_exact_p(acc[n], S.denom_[i]);
    }
    if (!opt.keep_operators) {
      // trim parent series back to the prefix
      for (auto& P : S.parents_)
        if (P.series_len > S.prefix) {
          for (auto& row : P.series) row.resize(S.prefix);
          P.series_len = S.prefix;
        }
    }
  }
  return sp;
}

void ClassicalSpace::retain_only_rows(const std::vector<int>& rows) const {
  if (ops_len == 0) return;
  Mat<ZRing> slim(*R, int(rows.size()), ops_len);
  for (std::size_t t = 0; t < rows.size(); ++t)
    for (int n = 0; n < ops_len; ++n) slim.at(int(t), n) = basis_full_store_.at(rows[t], n);
  basis_full_store_ = std::move(slim);
  retained_rows_ = rows;
  for (auto& P : parents_)
    if (P.series_len > prefix) {
      for (auto& row : P.series) row.resize(prefix);
      P.series_len = prefix;
    }
}

void ClassicalSpace::release_bulk() const {
  basis_full_store_ = Mat<ZRing>();
  ops_len = 0;
  retained_rows_.clear();
  for (auto& P : parents_)
    if (P.series_len > prefix) {
      for (auto& row : P.series) row.resize(prefix);
      P.series_len = prefix;
    }
}

QSeries ClassicalSpace::basis_series(int i, int len) const {
  QSeries f(*R, len);
  f.padic_prec = cert_prec;
  if (len <= ops_len) {
    int row = i;
    if (!retained_rows_.empty()) {
      auto it = std::find(retained_rows_.begin(), retained_rows_.end(), i);
      if (it == retained_rows_.end()) row = -1;
      else row = int(it - retained_rows_.begin());
    }
    if (row >= 0) {
      for (int n = 0; n < len; ++n) f.c[n] = basis_full_store_.at(row, n);
      return f;
    }
  }
  if (len > prefix && !kept_.empty() && parents_.empty())
    throw PrecisionExhausted("basis row data released");
  std::vector<u128> acc(len, 0);
  for (std::size_t t = 0; t < kept_.size(); ++t) {
    u128 c = combo_.at(i, int(t));
    if (R->is_zero(c)) continue;
    ensure_parent_series(kept_[t].parent, len);
    const auto& src = parents_[kept_[t].parent].series[kept_[t].coord];
    for (int n = 0; n < len; ++n) acc[n] = R->add(acc[n], R->mul(c, src[n]));
  }
  for (int n = 0; n < len; ++n) f.c[n] = R->div_exact_p(acc[n], denom_[i]);
  return f;
}

QSeries ClassicalSpace::series_of(const std::vector<u128>& coords, int len) const {
  QSeries f(*R, len);
  f.padic_prec = cert_prec;
  for (int i = 0; i < dim; ++i) {
    if (R->is_zero(coords[i])) continue;
    auto b = basis_series(i, len);
    for (int n = 0; n < len; ++n) f.c[n] = R->add(f.c[n], R->mul(coords[i], b.c[n]));
  }
  return f;
}

QSeries ClassicalSpace::diamond_series(const std::vector<u128>& coords, u64 d, int len) const {
  const int degc = level->cyclo.deg();
  d %= N;
  QSeries out(*R, len);
  out.padic_prec = cert_prec;
  int dmax = 0;
  for (int i = 0; i < dim; ++i)
    if (!R->is_zero(coords[i])) dmax = std::max(dmax, denom_[i]);
  std::vector<u128> cand_coeff(kept_.size(), 0);
  for (int i = 0; i < dim; ++i) {
    if (R->is_zero(coords[i])) continue;
    u128 ci = R->mul_p_pow(coords[i], dmax - denom_[i]);
    for (std::size_t t = 0; t < kept_.size(); ++t)
      cand_coeff[t] = R->add(cand_coeff[t], R->mul(ci, combo_.at(i, int(t))));
  }
  std::vector<u128> acc(len, 0);
  std::vector<u128> pred_coords;
  for (std::size_t t = 0; t < kept_.size(); ++t) {
    if (R->is_zero(cand_coeff[t])) continue;
    const auto& P = parents_[kept_[t].parent];
    if (P.kind == 2) {
      if (pred_coords.empty()) pred_coords.assign(predecessor_ ? predecessor_->dim : 0, 0);
      pred_coords[P.pred_row] = R->add(pred_coords[P.pred_row], cand_coeff[t]);
      continue;
    }
    DirichletChar chi(&level->group, P.chi_exps);
    auto ve = chi.value_exp((long long)d);
    if (!ve) throw Error("diamond_series: character undefined at d");
    auto Z = level->cyclo.zeta_mult_matrix(*ve);
    ensure_parent_series(kept_[t].parent, len);
    int rr = kept_[t].coord;
    for (int j = 0; j < degc; ++j) {
      if (Z[rr][j] == 0) continue;
      u128 cc = R->mul(cand_coeff[t], R->from_big(Z[rr][j]));
      const auto& src = parents_[kept_[t].parent].series[j];
      for (int n = 0; n < len; ++n) acc[n] = R->add(acc[n], R->mul(cc, src[n]));
    }
  }
  if (!pred_coords.empty()) {
    // <d>(E_{p-1} g) = E_{p-1} <d>g since E_{p-1} has level 1
    auto dg = predecessor_->diamond_series(pred_coords, d, len);
    auto E = eis_weight_p_minus_1(*R, len);
    auto prod = qs_mul_trunc(E, dg, len);
    for (int n = 0; n < len; ++n) acc[n] = R->add(acc[n], prod.c[n]);
  }
  for (int n = 0; n < len; ++n) out.c[n] = R->div_exact_p(acc[n], dmax);
  return out;
}

std::optional<std::vector<u128>> ClassicalSpace::coords_of(const QSeries& f,
                                                           int* residue_val) const {
  if (f.qprec < prefix) throw InsufficientQPrecision("coords_of needs the full prefix");
  std::vector<u128> v(f.c.begin(), f.c.begin() + prefix);
  return coords_in_echelon(ech, std::move(v), std::min(cert_prec, f.padic_prec), residue_val);
}

Mat<ZRing> ClassicalSpace::op_matrix_from_rows(
    const std::vector<std::vector<u128>>& image_prefix_rows, const char* what) const {
  Mat<ZRing> M(*R, dim, dim);
  for (int i = 0; i < dim; ++i) {
    int rv = 0;
    auto coords = coords_in_echelon(ech, image_prefix_rows[i], cert_prec, &rv);
    if (!coords)
      throw InsufficientQPrecision(std::string(what) +
                                   ": image escapes the space (residue valuation " +
                                   std::to_string(rv) + ")");
    for (int j = 0; j < dim; ++j) M.at(j, i) = (*coords)[j];
  }
  return M;  // columns are images: M * x acts on coordinate vectors
}

Mat<ZRing> ClassicalSpace::diamond(u64 d) const {
  d %= N;
  {
    std::lock_guard<std::mutex> lock(cache_mu_);
    auto it = diamond_cache_.find(d);
    if (it != diamond_cache_.end()) return it->second;
  }
  if (std::gcd(d, N) != 1) throw ConfigError("diamond index not prime to N");
  std::vector<std::vector<u128>> images(dim);
  for (int i = 0; i < dim; ++i) {
    std::vector<u128> coords(dim, 0);
    coords[i] = R->one();
    auto s = diamond_series(coords, d, prefix);
    images[i].assign(s.c.begin(), s.c.end());
  }
  auto M = op_matrix_from_rows(images, "diamond");
  std::lock_guard<std::mutex> lock(cache_mu_);
  diamond_cache_.emplace(d, M);
  return M;
}

Mat<ZRing> ClassicalSpace::hecke_prime(u64 ell) const {
  {
    std::lock_guard<std::mutex> lock(cache_mu_);
    auto it = hecke_cache_.find(ell);
    if (it != hecke_cache_.end()) return it->second;
  }
  if (ops_len < int(ell) * prefix)
    throw InsufficientQPrecision("hecke_prime needs qprec >= ell * prefix");
  std::vector<std::vector<u128>> images(dim, std::vector<u128>(prefix, 0));
  if (N % ell == 0) {
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < prefix; ++j) images[i][j] = basis_full_store_.at(i, j * int(ell));
  } else {
    u128 lk = R->pow(R->from_int((long long)ell), u128(k - 1));
    for (int i = 0; i < dim; ++i) {
      std::vector<u128> coords(dim, 0);
      coords[i] = R->one();
      auto dseries = diamond_series(coords, ell % N, prefix / int(ell) + 1);
      for (int j = 0; j < prefix; ++j) {
        u128 x = basis_full_store_.at(i, j * int(ell));
        if (j % int(ell) == 0) x = R->add(x, R->mul(lk, dseries.c[j / int(ell)]));
        images[i][j] = x;
      }
    }
  }
  auto M = op_matrix_from_rows(images, "hecke");
  std::lock_guard<std::mutex> lock(cache_mu_);
  hecke_cache_.emplace(ell, M);
  return M;
}

Mat<ZRing> ClassicalSpace::eisenstein_sublattice() const {
  std::vector<std::vector<u128>> rows;
  const ZRing& R0 = *R;
  auto ld = level;
  const auto& chars = ld->chars;
  const int deg = ld->cyclo.deg();
  // weight-k Eisenstein triples evaluated directly
  for (std::size_t a = 0; a < chars.size(); ++a)
    for (std::size_t b = 0; b < chars.size(); ++b) {
      bool odd = chars[a].odd() != chars[b].odd();
      if ((odd ? 1 : 0) != (k % 2)) continue;
      u64 c = chars[a].conductor() * chars[b].conductor();
      if (c == 0 || N % c != 0) continue;
      bool both_trivial = chars[a].conductor() == 1 && chars[b].conductor() == 1;
      if (k == 1 && a > b) continue;
      for (u64 t = 1; t * c <= N; ++t) {
        if (N % (t * c) != 0) continue;
        if (k == 2 && both_trivial && t == 1) continue;
        Parent P;
        P.kind = 0;
        P.psi = int(a);
        P.phi = int(b);
        P.t = t;
        P.weight = k;
        P.chi_exps = chars[a].product(chars[b]).exps();
        materialize_eis_(P, prefix);
        for (int cd = 0; cd < deg; ++cd) {
          std::vector<u128> v(P.series[cd].begin(), P.series[cd].begin() + prefix);
          auto coords = coords_in_echelon(ech, std::move(v), cert_prec);
          if (!coords) throw Error("eisenstein_sublattice: series escapes the space");
          rows.push_back(*coords);
        }
      }
    }
  Mat<ZRing> M(R0, int(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < dim; ++j) M.at(int(i), j) = rows[i][j];
  auto sat = lattice_saturate(M);
  DimensionOracle oracle(N);
  if (sat.nr != oracle.dim_Eis(k))
    throw SpanDeficient("eisenstein span rank " + std::to_string(sat.nr) + " != " +
                        std::to_string(oracle.dim_Eis(k)));
  return sat;
}

Mat<ZRing> ClassicalSpace::cusp_sublattice(int* cert) const {
  DimensionOracle oracle(N);
  const int target = oracle.dim_Sk(k);
  if (target == 0) {
    if (cert) *cert = cert_prec;
    return Mat<ZRing>(*R, 0, dim);
  }
  auto E = eisenstein_sublattice();
  std::vector<u64> ells;
  for (u64 ell : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL})
    if (N % ell != 0 && R->p() != ell) ells.push_back(ell);
  auto Esnf = smith_normal_form(mat_transpose(E));
  for (int attempt = 0; attempt < int(ells.size()); ++attempt) {
    Mat<ZRing> T = hecke_prime(ells[0]);
    for (int j = 1; j <= attempt; ++j)
      T = mat_add(T, mat_scale(hecke_prime(ells[j]), R->from_int(j + 1)));
    auto cp = charpoly_auto(T);
    Mat<ZRing> X(*R, E.nr, E.nr);
    bool ok = true;
    for (int i = 0; i < E.nr && ok; ++i) {
      auto sol = solve_via_snf(Esnf, mat_apply(T, E.row(i)));
      if (!sol.solvable)
        ok = false;
      else
        for (int j = 0; j < E.nr; ++j) X.at(i, j) = sol.x[j];
    }
    if (!ok) continue;
    std::vector<u128> fE = charpoly_berkowitz(mat_transpose(X));
    std::vector<u128> fS;
    try {
      fS = poly_div_exact_monic(*R, cp.coeffs, fE);
    } catch (const Error&) {
      continue;
    }
    auto K = poly_at_matrix(fS, T);
    auto snf = smith_normal_form(K);
    std::vector<int> pos;
    const int steps = std::min(K.nr, K.nc);
    int worst = 0;
    for (int i = 0; i < steps; ++i) {
      if (snf.exponents[i] >= R->prec())
        pos.push_back(i);
      else
        worst = std::max(worst, snf.exponents[i]);
    }
    if (int(pos.size()) != target) continue;
    Mat<ZRing> Kb(*R, target, dim);
    for (std::size_t t = 0; t < pos.size(); ++t)
      for (int j = 0; j < dim; ++j) Kb.at(int(t), j) = snf.Vinv.at(j, pos[t]);
    auto sat = lattice_saturate(Kb);
    if (cert) *cert = std::min(cert_prec, R->prec() - worst - cp.precision_spent);
    return sat;
  }
  throw NotConverged("cusp_sublattice: no separating Hecke combination found");
}

Mat<ZRing> ClassicalSpace::ordinary_sublattice(const Mat<ZRing>& op, int* cert) const {
  auto cp = charpoly_auto(op);
  auto sf = slope_factor(*R, cp.coeffs, 0);
  if (int(sf.h_s.size()) <= 1) {
    if (cert) *cert = cert_prec;
    return Mat<ZRing>(*R, 0, op.nr);
  }
  auto H = poly_at_matrix(sf.h_s, op);
  auto K = kernel_saturated(H);
  if (cert) *cert = std::min(cert_prec, R->prec() - cp.precision_spent);
  return K;
}

std::vector<QSeries> ClassicalSpace::complement_candidates(const std::vector<int>& prev_pivots,
                                                           int len, u64 seed) const {
  std::vector<QSeries> out;
  std::vector<int> old_rows, new_rows;
  for (int i = 0; i < dim; ++i) {
    bool in_prev = std::find(prev_pivots.begin(), prev_pivots.end(), ech.pivot_col[i]) !=
                   prev_pivots.end();
    (in_prev ? old_rows : new_rows).push_back(i);
  }
  std::mt19937_64 rng(seed);
  for (int i : new_rows) {
    auto f = basis_series(i, len);
    if (seed != 0) {
      for (int t = 0; t < 2 && !old_rows.empty(); ++t) {
        int j = old_rows[rng() % old_rows.size()];
        auto g = basis_series(j, len);
        u128 c = R->from_plain(rng() % 1024);
        for (int n = 0; n < len; ++n) f.c[n] = R->add(f.c[n], R->mul(c, g.c[n]));
      }
    }
    out.push_back(std::move(f));
  }
  return out;
}

void ClassicalSpace::export_basis(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw CacheError("cannot open " + path);
  int len = ops_len > 0 ? ops_len : prefix;
  out << "pmf-basis v1\n";
  out << "N " << N << "\n";
  out << "k " << k << "\n";
  out << "p " << R->p() << "\n";
  out << "m " << R->prec() << "\n";
  out << "qprec " << len << "\n";
  out << "dim " << dim << "\n";
  for (int i = 0; i < dim; ++i) {
    out << "row";
    auto f = basis_series(i, len);
    for (int n = 0; n < len; ++n) out << " " << to_string_u128(R->to_plain(f.c[n]));
    out << "\n";
  }
  out << "end\n";
}

std::shared_ptr<ClassicalSpace> ClassicalSpace::ingest_basis(const ZRing& R,
                                                             const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedBasisFile("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "pmf-basis v1") throw MalformedBasisFile("bad header");
  u64 N = 0, p = 0;
  int k = -1, qprec = 0, dim = -1, m = 0;
  std::vector<std::vector<u128>> rows;
  while (std::getline(in, line)) {
    if (line == "end") break;
    std::istringstream ss(line);
    std::string field;
    ss >> field;
    if (field == "N")
      ss >> N;
    else if (field == "k")
      ss >> k;
    else if (field == "p")
      ss >> p;
    else if (field == "m")
      ss >> m;
    else if (field == "qprec")
      ss >> qprec;
    else if (field == "dim")
      ss >> dim;
    else if (field == "row") {
      std::vector<u128> row;
      std::string tok;
      while (ss >> tok) row.push_back(R.from_big(bigint(tok)));
      if (int(row.size()) != qprec) throw MalformedBasisFile("row length mismatch");
      rows.push_back(std::move(row));
    } else {
      throw MalformedBasisFile("unknown field: " + field);
    }
  }
  if (N == 0 || k < 0 || dim < 0 || qprec <= 0) throw MalformedBasisFile("missing fields");
  if (p != R.p()) throw MalformedBasisFile("prime mismatch");
  if (int(rows.size()) != dim) throw MalformedBasisFile("row count mismatch");
  DimensionOracle oracle(N);
  if (dim != oracle.dim_Mk(k)) throw DimensionMismatch("ingested dim disagrees with the oracle");

  auto sp = std::make_shared<ClassicalSpace>();
  ClassicalSpace& S = *sp;
  S.R = &R;
  S.N = N;
  S.k = k;
  S.level = LevelData::get(N);
  S.dim = dim;
  S.prefix = std::min(qprec, row_prefix_len(N, k));
  S.sturm = int(u64(k) * oracle.psl_index / 12) + 1;
  S.ops_len = qprec;
  Mat<ZRing> pre(R, dim, S.prefix);
  for (int i = 0; i < dim; ++i)
    for (int n = 0; n < S.prefix; ++n) pre.at(i, n) = rows[i][n];
  auto e = echelonize(pre, true);
  if (e.rank() != dim) throw DimensionMismatch("ingested rows are not independent");
  S.ech = e;
  S.cert_prec = R.prec() - e.sat_loss;
  auto snf = smith_normal_form(mat_transpose(pre));
  S.basis_full_store_ = Mat<ZRing>(R, dim, qprec);
  for (int i = 0; i < dim; ++i) {
    auto sol = solve_via_snf(snf, e.rows.row(i));
    if (!sol.solvable) throw MalformedBasisFile("ingest: echelon reconstruction failed");
    for (int n = 0; n < qprec; ++n) {
      u128 acc = 0;
      for (int t = 0; t < dim; ++t) acc = R.add(acc, R.mul(sol.x[t], rows[t][n]));
      S.basis_full_store_.at(i, n) = acc;
    }
    S.cert_prec = std::min(S.cert_prec, R.prec() - sol.denominator_val);
  }
  return sp;
}

StabilizedPair stabilized_pair(const ZRing& R, const QSeries& f, u128 ap_mont, u128 chi_p_mont,
                               int k, u64 p) {
  StabilizedPair out;
  if (R.val(ap_mont) != 0) throw NotOrdinary("T_p eigenvalue is not a unit");
  u128 cst = R.mul_p_pow(chi_p_mont, k - 1);
  std::vector<u128> hecke_poly = {cst, R.neg(ap_mont), R.one()};
  auto sf = slope_factor(R, hecke_poly, 0);
  if (int(sf.h_s.size()) != 2) throw SegmentNotSeparated("stabilization quadratic");
  out.alpha = R.neg(sf.h_s[0]);
  out.beta = R.neg(sf.h_rest[0]);
  out.u_matrix = Mat<ZRing>(R, 2, 2);
  out.u_matrix.at(0, 0) = ap_mont;
  out.u_matrix.at(0, 1) = R.one();
  out.u_matrix.at(1, 0) = R.neg(cst);
  auto fqp = qs_expand_t(f, p);
  auto build = [&](u128 other) {
    auto g = qs_truncate(f, std::min<int>(f.qprec, fqp.qprec));
    auto h = qs_truncate(fqp, g.qprec);
    return qs_sub(g, qs_scale(h, other));
  };
  out.f_alpha = build(out.beta);
  out.f_beta = build(out.alpha);
  return out;
}

QSeries eta_product(const ZRing& R, const std::vector<std::pair<int, int>>& exps, int qprec) {
  int shift = 0;
  auto f = eta_product_series(exps, qprec, &shift);
  QSeries out(R, qprec);
  for (int n = shift; n < qprec; ++n) out.c[n] = R.from_big(f[n - shift]);
  return out;
}

}  // namespace pmf
