#pragma once

#include <optional>
#include <string>
#include <vector>

#include "exactpl/construction.hpp"

namespace exactpl {

// A point of the contracting construction's limit that avoids every interval
// of increase is pinned by a walk of decreasing-piece choices, one digit in
// 1..6 per level; the final digit repeats forever.  The named walk "central"
// is the canonical one: the first decreasing piece at every level.
struct FloorPath {
  std::vector<int> digits;

  int digit_at(size_t level) const {  // 0-based level index
    return digits[level < digits.size() ? level : digits.size() - 1];
  }
};

inline FloorPath parse_floor_path(const std::string& text) {
  if (text == "central") return FloorPath{{1}};
  FloorPath p;
  for (char ch : text) {
    if (ch < '1' || ch > '6')
      throw parse_error("floor path must be 'central' or digits 1..6, got '" + text + "'");
    p.digits.push_back(ch - '0');
  }
  if (p.digits.empty()) throw parse_error("empty floor path");
  return p;
}

// Affine frame of one walk level: on the interval, the depth-n function is
// value_base + drop * seed(t) with t the relative coordinate.  Level 0 is the
// identity frame over [0,1].
struct FloorFrame {
  Interval interval;
  Rat value_base;
  Rat drop;
};

inline std::vector<FloorFrame> floor_frames(const FloorPath& path, int count) {
  const PLFunction& h = SeedFunction::contracting().base();
  std::vector<FloorFrame> frames;
  frames.push_back({Interval(Rat(0), Rat(1)), Rat(0), Rat(1)});
  for (int k = 0; k < count; k++) {
    const FloorFrame& s = frames.back();
    int c = path.digit_at(static_cast<size_t>(k));
    Rat w = s.interval.length();
    Interval next(s.interval.lo + w * rat(2 * c - 1, 13), s.interval.lo + w * rat(2 * c, 13));
    Rat v_base = s.value_base + s.drop * h(rat(2 * c, 13));
    Rat drop = s.drop * (h(rat(2 * c - 1, 13)) - h(rat(2 * c, 13)));
    frames.push_back({next, v_base, drop});
  }
  return frames;
}

// Certified subset of the level-n difference-quotient set: only the x values
// on increasing pieces of the level-n function count (the limit equals the
// level-n function there), and a point enters only when its exact value
// clears the whole value enclosure of the walk point in the favorable
// direction.  Never guesses at a case boundary.
struct FloorLevel {
  int n;
  Interval interval;
  IntervalSet certified;
  Rat bound;        // certified density in the interval
  bool conclusive;  // bound >= 1/26
};

inline FloorLevel certify_floor_level(int n, const FloorFrame& frame, int digit,
                                      const Rat& y_lo, const Rat& y_hi) {
  const PLFunction& h = SeedFunction::contracting().base();
  Rat w = frame.interval.length();
  std::vector<Interval> certified;
  for (int j = 0; j <= 6; j++) {
    Rat tx_lo = rat(2 * j, 13), tx_hi = rat(2 * j + 1, 13);
    Interval X(frame.interval.lo + w * tx_lo, frame.interval.lo + w * tx_hi);
    Rat A = frame.value_base + frame.drop * h(tx_lo);
    Rat B = frame.value_base + frame.drop * h(tx_hi);
    if (j <= digit - 1) {
      // entirely left of the walk point: need value <= y_lo
      if (y_lo >= B) certified.push_back(X);
      else if (y_lo > A)
        certified.emplace_back(X.lo, X.lo + (y_lo - A) / (B - A) * X.length());
    } else {
      // entirely right of the walk point: need value >= y_hi
      if (y_hi <= A) certified.push_back(X);
      else if (y_hi < B)
        certified.emplace_back(X.hi - (B - y_hi) / (B - A) * X.length(), X.hi);
    }
  }
  FloorLevel lv{n, frame.interval, IntervalSet::from_parts(std::move(certified)), Rat(0), false};
  lv.bound = lv.certified.measure() / frame.interval.length();
  lv.conclusive = lv.bound >= rat(1, 26);
  return lv;
}

struct DensityFloorCertificate {
  FloorPath path;
  int levels;
  int enclosure_depth;
  Interval value_enclosure;           // contains the limit value at the walk point
  std::vector<FloorLevel> per_level;  // n = 0..levels
  bool all_conclusive;
  std::optional<int> sufficient_depth;  // suggested depth when inconclusive
};

// For each level n <= n_max, certifies a lower bound on the density of the
// level-n difference-quotient set within the level-n walk interval, using the
// depth-N value enclosure of the limit at the walk point.  The enclosure
// derives from the overshoot bound: on a decreasing piece with endpoint
// values va >= vb and drop d, every deeper value stays within
// [vb - 2d, va + 2d] (the per-level overshoot halves the current drop and the
// drops contract by 3/4, so the total overshoot is d/2 * (1 + 3/4 + ...)).
namespace detail {

inline DensityFloorCertificate floor_certificate_at_depth(const FloorPath& path, int n_max,
                                                          int depth) {
  auto frames = floor_frames(path, depth);
  const FloorFrame& deep = frames.back();
  Rat y_lo = deep.value_base - 2 * deep.drop;
  Rat y_hi = deep.value_base + 3 * deep.drop;  // top value plus overshoot

  DensityFloorCertificate cert{path,  n_max, depth, Interval(y_lo, y_hi), {}, true,
                               std::nullopt};
  for (int n = 0; n <= n_max; n++) {
    FloorLevel lv = certify_floor_level(n, frames[static_cast<size_t>(n)],
                                        path.digit_at(static_cast<size_t>(n)), y_lo, y_hi);
    if (!lv.conclusive) cert.all_conclusive = false;
    cert.per_level.push_back(std::move(lv));
  }
  return cert;
}

}  // namespace detail

inline DensityFloorCertificate dq_density_floor(const FloorPath& path, int n_max, int depth) {
  if (n_max < 0) throw precondition_error("dq_density_floor: need n_max >= 0");
  if (depth < n_max + 1)
    throw precondition_error("dq_density_floor: enclosure depth must exceed the last level");
  DensityFloorCertificate cert = detail::floor_certificate_at_depth(path, n_max, depth);
  if (!cert.all_conclusive) {
    for (int deeper = depth + 1; deeper <= depth + 64; deeper++) {
      if (detail::floor_certificate_at_depth(path, n_max, deeper).all_conclusive) {
        cert.sufficient_depth = deeper;
        break;
      }
    }
  }
  return cert;
}

}  // namespace exactpl
