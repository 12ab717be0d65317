#include "pmf/slopes.hpp"

#include <numeric>

namespace pmf {

std::vector<std::pair<long long, long long>> NewtonPolygon::slope_list() const {
  std::vector<std::pair<long long, long long>> out;
  for (const auto& s : segments)
    for (int i = 0; i < s.mult; ++i) out.emplace_back(s.num, s.den);
  return out;
}

namespace {

struct HullPoint {
  long long x, y;
  bool exact;
};

// lower convex hull, left to right; flagged coefficients participate at their
// minimal possible height prec, which is the sound floor for certification
std::vector<HullPoint> lower_hull(const std::vector<int>& vals, int prec) {
  std::vector<HullPoint> pts;
  for (int i = 0; i < int(vals.size()); ++i)
    pts.push_back({i, std::min(vals[i], prec), vals[i] < prec});
  std::vector<HullPoint> h;
  for (auto& pt : pts) {
    while (h.size() >= 2) {
      auto& a = h[h.size() - 2];
      auto& b = h[h.size() - 1];
      __int128 lhs = __int128(b.y - a.y) * (pt.x - a.x);
      __int128 rhs = __int128(pt.y - a.y) * (b.x - a.x);
      if (lhs >= rhs)
        h.pop_back();
      else
        break;
    }
    h.push_back(pt);
  }
  return h;
}

}  // namespace

NewtonPolygon newton_polygon_from_vals(const std::vector<int>& vals, int prec) {
  const int n = int(vals.size()) - 1;
  NewtonPolygon np;
  np.degree = n;
  if (n <= 0) return np;

  auto hull = lower_hull(vals, prec);
  std::vector<NPSegment> segs;  // built small-valuation-first (right to left)
  int covered_left = n;
  long long bound_num = prec, bound_den = 1;
  for (int t = int(hull.size()) - 1; t > 0; --t) {
    const auto& rightp = hull[t];
    const auto& leftp = hull[t - 1];
    if (!leftp.exact) {
      covered_left = int(rightp.x);
      // adjacent hull segment through the flagged point gives the lower bound
      // for every valuation hidden in the block
      bound_num = leftp.y - rightp.y;
      bound_den = rightp.x - leftp.x;
      break;
    }
    NPSegment s;
    s.num = leftp.y - rightp.y;
    s.den = rightp.x - leftp.x;
    long long g = std::gcd(s.num, s.den);
    if (g > 1) {
      s.num /= g;
      s.den /= g;
    }
    s.mult = int(rightp.x - leftp.x);
    segs.push_back(s);
    covered_left = int(leftp.x);
  }
  if (covered_left > 0) {
    NPSegment amb;
    amb.ambiguous = true;
    amb.mult = covered_left;
    amb.num = bound_num;  // every hidden valuation is >= num/den
    amb.den = bound_den;
    long long g = std::gcd(amb.num, amb.den);
    if (g > 1) {
      amb.num /= g;
      amb.den /= g;
    }
    segs.push_back(amb);
    np.fully_certified = false;
  }
  np.segments = std::move(segs);  // already nondecreasing by valuation
  return np;
}

SegmentRange np_segment_range(const std::vector<int>& vals, int prec, long long num,
                              long long den) {
  auto hull = lower_hull(vals, prec);
  SegmentRange out;
  for (int t = int(hull.size()) - 1; t > 0; --t) {
    const auto& rightp = hull[t];
    const auto& leftp = hull[t - 1];
    if (!leftp.exact) break;
    long long snum = leftp.y - rightp.y, sden = rightp.x - leftp.x;
    if (snum * den == num * sden) {
      out.i_lo = int(leftp.x);
      out.i_hi = int(rightp.x);
      out.found = true;
      return out;
    }
  }
  return out;
}

}  // namespace pmf
