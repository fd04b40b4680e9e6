#pragma once

#include <utility>
#include <vector>

#include "exactpl/interval.hpp"

namespace exactpl {

// Connected components of the union of all open subintervals J of a window I
// with density(H, J) > eps.  Stored as closures of the open components.
struct ComponentList {
  std::vector<Interval> components;

  Rat total_measure() const {
    Rat m(0);
    for (const auto& c : components) m += c.length();
    return m;
  }

  IntervalSet as_set() const { return IntervalSet::from_parts(components); }
};

namespace detail {

// Piecewise-linear graph as a breakpoint list (x strictly increasing).
using Polyline = std::vector<std::pair<Rat, Rat>>;

inline Rat polyline_value(const Polyline& p, size_t seg, const Rat& x) {
  const auto& [ax, av] = p[seg];
  const auto& [bx, bv] = p[seg + 1];
  if (x == ax) return av;
  if (x == bx) return bv;
  return av + (bv - av) * (x - ax) / (bx - ax);
}

// Running minimum of a polyline, left to right.  Breakpoints are the input
// nodes plus the exact points where the running minimum re-attaches to the
// falling graph.
inline Polyline running_min(const Polyline& f) {
  Polyline m;
  m.push_back(f.front());
  Rat cur = f.front().second;
  for (size_t i = 0; i + 1 < f.size(); i++) {
    const auto& [ax, av] = f[i];
    const auto& [bx, bv] = f[i + 1];
    if (av > cur) {
      if (bv < cur) {
        // falls through the running minimum: constant until the crossing
        Rat u = ax + (cur - av) * (bx - ax) / (bv - av);
        m.emplace_back(u, cur);
        m.emplace_back(bx, bv);
        cur = bv;
      } else {
        m.emplace_back(bx, cur);
      }
    } else {  // av == cur
      if (bv < cur) {
        m.emplace_back(bx, bv);
        cur = bv;
      } else {
        m.emplace_back(bx, cur);
      }
    }
  }
  return m;
}

inline Polyline running_max_from_right(const Polyline& f) {
  Polyline rev(f.rbegin(), f.rend());
  for (auto& [x, v] : rev) { x = -x; v = -v; }
  Polyline m = running_min(rev);
  Polyline out(m.rbegin(), m.rend());
  for (auto& [x, v] : out) { x = -x; v = -v; }
  return out;
}

}  // namespace detail

// Exact component extraction via the prefix-extremum characterization: with
// F(t) = measure(H ∩ [I.lo, t]) - eps * (t - I.lo), a point x is covered by
// some admissible open interval iff the running minimum of F on [I.lo, x]
// lies strictly below the running maximum of F on [x, I.hi].
inline ComponentList high_density_components(const IntervalSet& H, const Interval& I,
                                             const Rat& eps) {
  if (!(eps > 0 && eps < 1))
    throw precondition_error("high_density_components: eps must lie in (0,1)");
  ComponentList out;
  IntervalSet HI = H.intersect(I);
  if (HI.measure() == 0) return out;

  // nodes of F
  std::vector<Rat> xs;
  xs.push_back(I.lo);
  for (const auto& p : HI.parts()) {
    if (p.lo > I.lo && p.lo < I.hi) xs.push_back(p.lo);
    if (p.hi > I.lo && p.hi < I.hi) xs.push_back(p.hi);
  }
  xs.push_back(I.hi);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  detail::Polyline F;
  F.reserve(xs.size());
  for (const auto& x : xs)
    F.emplace_back(x, HI.measure_below(x) - eps * (x - I.lo));

  detail::Polyline lower = detail::running_min(F);
  detail::Polyline upper = detail::running_max_from_right(F);

  // gap D = upper - lower on the merged breakpoint set
  std::vector<Rat> merged;
  for (const auto& [x, v] : lower) merged.push_back(x);
  for (const auto& [x, v] : upper) merged.push_back(x);
  std::sort(merged.begin(), merged.end());
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

  detail::Polyline D;
  D.reserve(merged.size());
  size_t li = 0, ui = 0;
  for (const auto& x : merged) {
    while (li + 2 < lower.size() && lower[li + 1].first <= x) li++;
    while (ui + 2 < upper.size() && upper[ui + 1].first <= x) ui++;
    D.emplace_back(x, detail::polyline_value(upper, ui, x) - detail::polyline_value(lower, li, x));
  }

  // closures of {D > 0}
  std::vector<Interval> parts;
  for (size_t i = 0; i + 1 < D.size(); i++) {
    const auto& [ax, av] = D[i];
    const auto& [bx, bv] = D[i + 1];
    bool sa = av > 0, sb = bv > 0;
    if (sa && sb) {
      parts.emplace_back(ax, bx);
    } else if (sa != sb) {
      Rat cross = ax + (Rat(0) - av) * (bx - ax) / (bv - av);
      if (sa) parts.emplace_back(ax, cross);
      else parts.emplace_back(cross, bx);
    }
  }
  IntervalSet merged_parts = IntervalSet::from_parts(std::move(parts));
  for (const auto& p : merged_parts.parts())
    if (p.length() > 0) out.components.push_back(p);
  return out;
}

// Both sides of the covering-measure bound: total component measure against
// 2 * measure(H ∩ I) / eps.
struct MeasureBoundCheck {
  Rat lhs, rhs;
  bool ok;
};

inline MeasureBoundCheck component_measure_bound(const IntervalSet& H, const Interval& I,
                                                 const Rat& eps) {
  ComponentList comps = high_density_components(H, I, eps);
  MeasureBoundCheck r{comps.total_measure(), Rat(2) * H.intersect(I).measure() / eps, false};
  r.ok = r.lhs <= r.rhs;
  return r;
}

// Exact supremum of density(H, (u,v)) over open intervals (u,v) ⊆ I that
// contain p strictly.  Returns 0 when no such interval exists (p at or
// outside the window boundary).  The supremum is the maximum of the chord
// slopes of the cumulative-measure graph over breakpoint candidates, together
// with the one-sided density limits at p (chords can degenerate toward p).
inline Rat max_straddling_density(const IntervalSet& H, const Interval& I, const Rat& p) {
  if (!(I.lo < p && p < I.hi)) return Rat(0);
  IntervalSet HI = H.intersect(I);

  std::vector<Rat> bps;
  bps.push_back(I.lo);
  bps.push_back(I.hi);
  bps.push_back(p);
  for (const auto& part : HI.parts()) {
    if (part.lo >= I.lo && part.lo <= I.hi) bps.push_back(part.lo);
    if (part.hi >= I.lo && part.hi <= I.hi) bps.push_back(part.hi);
  }
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());

  Rat best(0);
  // one-sided density limits at p
  for (const auto& part : HI.parts()) {
    if (part.lo < p && p <= part.hi) best = Rat(1);
    if (part.lo <= p && p < part.hi) best = Rat(1);
  }
  std::vector<Rat> masses;
  masses.reserve(bps.size());
  for (const auto& x : bps) masses.push_back(HI.measure_below(x));
  for (size_t i = 0; i < bps.size(); i++) {
    if (bps[i] > p) break;
    for (size_t j = bps.size(); j-- > 0;) {
      if (bps[j] < p) break;
      if (bps[i] == bps[j]) continue;
      Rat d = (masses[j] - masses[i]) / (bps[j] - bps[i]);
      if (d > best) best = d;
    }
  }
  return best;
}

}  // namespace exactpl
