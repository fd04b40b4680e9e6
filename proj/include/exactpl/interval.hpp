#pragma once

#include <algorithm>
#include <vector>

#include "exactpl/rational.hpp"

namespace exactpl {

// Closed rational interval.  Openness is deliberately not represented: every
// set handled here differs from its closure by finitely many points, and all
// downstream quantities are measures and densities.
struct Interval {
  Rat lo, hi;

  Interval(Rat lo_, Rat hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
    if (hi < lo) throw precondition_error("interval with hi < lo");
  }

  Rat length() const { return hi - lo; }
  bool contains(const Rat& x) const { return lo <= x && x <= hi; }
  Rat midpoint() const { return (lo + hi) / 2; }

  friend bool operator==(const Interval& a, const Interval& b) {
    return a.lo == b.lo && a.hi == b.hi;
  }
};

// Finite disjoint union of intervals, kept sorted with strictly positive gaps
// between consecutive parts (touching or overlapping parts are merged).
// Degenerate single-point parts are permitted; they carry no measure.
class IntervalSet {
 public:
  IntervalSet() = default;

  static IntervalSet from_parts(std::vector<Interval> parts) {
    std::sort(parts.begin(), parts.end(),
              [](const Interval& a, const Interval& b) {
                return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
              });
    IntervalSet s;
    for (auto& p : parts) {
      if (!s.parts_.empty() && p.lo <= s.parts_.back().hi) {
        if (p.hi > s.parts_.back().hi) s.parts_.back().hi = p.hi;
      } else {
        s.parts_.push_back(p);
      }
    }
    return s;
  }

  const std::vector<Interval>& parts() const& { return parts_; }
  std::vector<Interval> parts() && { return std::move(parts_); }
  bool empty() const { return parts_.empty(); }

  Rat measure() const {
    Rat m(0);
    for (const auto& p : parts_) m += p.length();
    return m;
  }

  bool contains(const Rat& x) const {
    for (const auto& p : parts_)
      if (p.contains(x)) return true;
    return false;
  }

  IntervalSet intersect(const Interval& window) const {
    std::vector<Interval> out;
    for (const auto& p : parts_) {
      Rat lo = rat_max(p.lo, window.lo);
      Rat hi = rat_min(p.hi, window.hi);
      if (lo <= hi) out.emplace_back(lo, hi);
    }
    return from_parts(std::move(out));
  }

  // Closure of window \ this.
  IntervalSet complement_within(const Interval& window) const {
    std::vector<Interval> out;
    Rat cursor = window.lo;
    for (const auto& p : parts_) {
      if (p.hi < window.lo || p.lo > window.hi) continue;
      Rat lo = rat_max(p.lo, window.lo);
      Rat hi = rat_min(p.hi, window.hi);
      if (cursor < lo) out.emplace_back(cursor, lo);
      if (hi > cursor) cursor = hi;
    }
    if (cursor < window.hi) out.emplace_back(cursor, window.hi);
    return from_parts(std::move(out));
  }

  IntervalSet unite(const IntervalSet& other) const {
    std::vector<Interval> all = parts_;
    all.insert(all.end(), other.parts_.begin(), other.parts_.end());
    return from_parts(std::move(all));
  }

  // Point-set containment of closures (exact; both sides normalized).
  bool subset_of(const IntervalSet& other) const {
    size_t j = 0;
    for (const auto& p : parts_) {
      while (j < other.parts_.size() && other.parts_[j].hi < p.lo) j++;
      if (j == other.parts_.size() || other.parts_[j].lo > p.lo || other.parts_[j].hi < p.hi)
        return false;
    }
    return true;
  }

  // Measure of this ∩ (-inf, x].
  Rat measure_below(const Rat& x) const {
    Rat m(0);
    for (const auto& p : parts_) {
      if (p.lo >= x) break;
      m += rat_min(p.hi, x) - p.lo;
    }
    return m;
  }

  friend bool operator==(const IntervalSet& a, const IntervalSet& b) {
    return a.parts_ == b.parts_;
  }

 private:
  std::vector<Interval> parts_;
};

// Δ(E, I) = λ(E ∩ I) / λ(I).  Degenerate query intervals are rejected; the
// ratio is never formed with a zero denominator.
inline Rat density(const IntervalSet& set, const Interval& window) {
  if (window.length() == 0)
    throw precondition_error("density over a degenerate interval");
  return set.intersect(window).measure() / window.length();
}

// Δ(E, (x-r, x+r)) for each radius, exact.  Radii must be positive and
// strictly decreasing; the sequence exhibits (it cannot prove) a density
// limit at x.
inline std::vector<Rat> density_sequence(const IntervalSet& set, const Rat& x,
                                         const std::vector<Rat>& radii) {
  for (size_t i = 0; i < radii.size(); i++) {
    if (radii[i] <= 0) throw precondition_error("density_sequence: radii must be positive");
    if (i > 0 && radii[i] >= radii[i - 1])
      throw precondition_error("density_sequence: radii must be strictly decreasing");
  }
  std::vector<Rat> out;
  out.reserve(radii.size());
  for (const auto& r : radii) out.push_back(density(set, Interval(x - r, x + r)));
  return out;
}

}  // namespace exactpl
