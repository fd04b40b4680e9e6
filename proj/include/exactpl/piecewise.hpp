#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "exactpl/interval.hpp"

namespace exactpl {

struct PLKnot {
  Rat x, y;
  friend bool operator==(const PLKnot& a, const PLKnot& b) { return a.x == b.x && a.y == b.y; }
};

struct Point {
  Rat x, y;
};

// Exact difference quotient of two planar points.
inline Rat dq(const Point& p0, const Point& p1) {
  if (p0.x == p1.x) throw precondition_error("dq: equal x coordinates");
  return (p1.y - p0.y) / (p1.x - p0.x);
}

// Continuous piecewise-linear function given by its knot sequence.
// Invariants: at least two knots, x strictly increasing.  Collinear interior
// knots are kept as constructed; simplify() removes them on request.
class PLFunction {
 public:
  explicit PLFunction(std::vector<PLKnot> knots) : knots_(std::move(knots)) {
    if (knots_.size() < 2) throw precondition_error("PLFunction needs at least 2 knots");
    for (size_t i = 1; i < knots_.size(); i++)
      if (!(knots_[i - 1].x < knots_[i].x))
        throw precondition_error("PLFunction knots must have strictly increasing x");
  }

  static PLFunction from_pairs(std::initializer_list<std::pair<Rat, Rat>> pts) {
    std::vector<PLKnot> ks;
    for (auto& p : pts) ks.push_back({p.first, p.second});
    return PLFunction(std::move(ks));
  }

  const std::vector<PLKnot>& knots() const { return knots_; }
  size_t segment_count() const { return knots_.size() - 1; }
  Interval domain() const { return {knots_.front().x, knots_.back().x}; }

  bool in_domain(const Rat& x) const {
    return knots_.front().x <= x && x <= knots_.back().x;
  }

  // Index i of the segment [x_i, x_{i+1}] containing x (ties resolve to the
  // right segment except at the last knot).
  size_t segment_index(const Rat& x) const {
    if (!in_domain(x)) throw precondition_error("x outside function domain");
    size_t lo = 0, hi = knots_.size() - 1;
    while (hi - lo > 1) {
      size_t mid = (lo + hi) / 2;
      if (knots_[mid].x <= x) lo = mid; else hi = mid;
    }
    return lo;
  }

  Rat operator()(const Rat& x) const {
    size_t i = segment_index(x);
    const PLKnot& a = knots_[i];
    const PLKnot& b = knots_[i + 1];
    if (x == a.x) return a.y;
    if (x == b.x) return b.y;
    return a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x);
  }

  Rat slope(size_t segment) const {
    const PLKnot& a = knots_[segment];
    const PLKnot& b = knots_[segment + 1];
    return (b.y - a.y) / (b.x - a.x);
  }

 private:
  std::vector<PLKnot> knots_;
};

inline Rat eval(const PLFunction& f, const Rat& x) { return f(x); }

inline void require_subdomain(const PLFunction& f, const Interval& window) {
  Interval dom = f.domain();
  if (window.lo < dom.lo || window.hi > dom.hi)
    throw precondition_error("interval outside function domain");
}

// Exact maximum of f on a closed subinterval (attained at a knot or an
// endpoint of the window).  A degenerate window returns the point value.
inline Rat sup_on(const PLFunction& f, const Interval& window) {
  require_subdomain(f, window);
  Rat best = f(window.lo);
  Rat at_hi = f(window.hi);
  if (at_hi > best) best = at_hi;
  for (const auto& k : f.knots()) {
    if (k.x <= window.lo) continue;
    if (k.x >= window.hi) break;
    if (k.y > best) best = k.y;
  }
  return best;
}

inline Rat inf_on(const PLFunction& f, const Interval& window) {
  require_subdomain(f, window);
  Rat best = f(window.lo);
  Rat at_hi = f(window.hi);
  if (at_hi < best) best = at_hi;
  for (const auto& k : f.knots()) {
    if (k.x <= window.lo) continue;
    if (k.x >= window.hi) break;
    if (k.y < best) best = k.y;
  }
  return best;
}

namespace detail {

// Closure of {x in window : f(x) > y} (above = true) or {f(x) < y}.
// Crossing points are exact rational line intersections; pieces lying on the
// level contribute nothing (the inequality is strict, and single touch points
// are measure-irrelevant).
inline IntervalSet level_set(const PLFunction& f, const Rat& y, const Interval& window,
                             bool above) {
  require_subdomain(f, window);
  std::vector<Interval> parts;
  const auto& ks = f.knots();
  auto side = [&](const Rat& v) { return above ? v > y : v < y; };
  for (size_t i = f.segment_index(window.lo); i + 1 < ks.size() && ks[i].x < window.hi; i++) {
    if (ks[i + 1].x <= window.lo) continue;
    Rat lo = rat_max(ks[i].x, window.lo);
    Rat hi = rat_min(ks[i + 1].x, window.hi);
    if (lo >= hi) continue;
    Rat vlo = f(lo), vhi = f(hi);
    bool slo = side(vlo), shi = side(vhi);
    if (slo && shi) {
      parts.emplace_back(lo, hi);
    } else if (slo != shi) {
      // one crossing on the piece
      Rat cross = lo + (y - vlo) * (hi - lo) / (vhi - vlo);
      if (slo) parts.emplace_back(lo, cross);
      else parts.emplace_back(cross, hi);
    }
    // both on the wrong side, or flat on the level: nothing
  }
  return IntervalSet::from_parts(std::move(parts));
}

}  // namespace detail

// H_y(f) within a window: closure of {x : f(x) > y}.
inline IntervalSet superlevel(const PLFunction& f, const Rat& y, const Interval& window) {
  return detail::level_set(f, y, window, true);
}

// Closure of {x in window : f(x) < y}.
inline IntervalSet sublevel(const PLFunction& f, const Rat& y, const Interval& window) {
  return detail::level_set(f, y, window, false);
}

// λ(f^{-1}(y)): total length of flat pieces of f sitting exactly at height y.
inline Rat preimage_measure(const PLFunction& f, const Rat& y) {
  Rat m(0);
  const auto& ks = f.knots();
  for (size_t i = 0; i + 1 < ks.size(); i++)
    if (ks[i].y == y && ks[i + 1].y == y) m += ks[i + 1].x - ks[i].x;
  return m;
}

inline Rat preimage_measure(const PLFunction& f, const Rat& y, const Interval& window) {
  require_subdomain(f, window);
  Rat m(0);
  const auto& ks = f.knots();
  for (size_t i = 0; i + 1 < ks.size(); i++) {
    if (ks[i].y != y || ks[i + 1].y != y) continue;
    Rat lo = rat_max(ks[i].x, window.lo);
    Rat hi = rat_min(ks[i + 1].x, window.hi);
    if (lo < hi) m += hi - lo;
  }
  return m;
}

// The set {x in window, x > x0 : f(x) >= f(x0)} ∪ {x < x0 : f(x) <= f(x0)}
// ∪ {x0}, as closures (measure-identical to the non-strict set).
inline IntervalSet diffquot_set(const PLFunction& f, const Rat& x0, const Interval& window) {
  require_subdomain(f, window);
  if (!window.contains(x0)) throw precondition_error("diffquot_set: x0 outside interval");
  Rat y0 = f(x0);
  IntervalSet right = x0 < window.hi
      ? sublevel(f, y0, Interval(x0, window.hi)).complement_within(Interval(x0, window.hi))
      : IntervalSet();
  IntervalSet left = window.lo < x0
      ? superlevel(f, y0, Interval(window.lo, x0)).complement_within(Interval(window.lo, x0))
      : IntervalSet();
  IntervalSet point = IntervalSet::from_parts({Interval(x0, x0)});
  return left.unite(right).unite(point);
}

// T(x) = t_scale*x + t_shift and S(y) = s_scale*y + s_shift.
struct AffinePair {
  Rat t_scale, t_shift, s_scale, s_shift;

  AffinePair(Rat ts, Rat tf, Rat ss, Rat sf)
      : t_scale(std::move(ts)), t_shift(std::move(tf)),
        s_scale(std::move(ss)), s_shift(std::move(sf)) {
    if (t_scale == 0) throw precondition_error("AffinePair with zero x-scale");
  }

  Rat T(const Rat& x) const { return t_scale * x + t_shift; }
  Rat S(const Rat& y) const { return s_scale * y + s_shift; }

  static AffinePair identity() { return {Rat(1), Rat(0), Rat(1), Rat(0)}; }

  // T mapping [0,1] onto [a,b] and S mapping seed values onto segment values
  // with S(1) = va, S(0) = vb: the conjugation used by every insertion.
  static AffinePair segment_embedding(const Rat& a, const Rat& b, const Rat& va, const Rat& vb) {
    return {b - a, a, va - vb, vb};
  }
};

// S ∘ f ∘ T^{-1}: every knot (x, y) maps exactly to (T(x), S(y)).
inline PLFunction affine_transform(const PLFunction& f, const AffinePair& map) {
  std::vector<PLKnot> ks;
  ks.reserve(f.knots().size());
  for (const auto& k : f.knots()) ks.push_back({map.T(k.x), map.S(k.y)});
  if (map.t_scale < 0) std::reverse(ks.begin(), ks.end());
  return PLFunction(std::move(ks));
}

// Removes interior knots that lie exactly on the segment through their
// neighbours.  Construction provenance is preserved elsewhere; this is an
// explicit pass.
inline PLFunction simplify(const PLFunction& f) {
  const auto& ks = f.knots();
  std::vector<PLKnot> out;
  out.push_back(ks.front());
  for (size_t i = 1; i + 1 < ks.size(); i++) {
    const PLKnot& a = out.back();
    const PLKnot& b = ks[i];
    const PLKnot& c = ks[i + 1];
    if ((b.y - a.y) * (c.x - b.x) == (c.y - b.y) * (b.x - a.x)) continue;
    out.push_back(b);
  }
  out.push_back(ks.back());
  return PLFunction(std::move(out));
}

// Pointwise equality, defined as knot equality after collinear simplification.
inline bool pointwise_equal(const PLFunction& f, const PLFunction& g) {
  return simplify(f).knots() == simplify(g).knots();
}

// ||f - g||_inf on the (identical) domain, exact: the difference is PL with
// breakpoints in the union of the knot sets, so the maximum is attained at a
// union knot.  Linear two-pointer walk.
inline Rat sup_dist(const PLFunction& f, const PLFunction& g) {
  if (!(f.domain() == g.domain()))
    throw precondition_error("sup_dist: domains differ");
  const auto& fk = f.knots();
  const auto& gk = g.knots();
  size_t i = 0, j = 0;  // segment cursors
  auto value_on = [](const std::vector<PLKnot>& ks, size_t seg, const Rat& x) -> Rat {
    const PLKnot& a = ks[seg];
    const PLKnot& b = ks[seg + 1];
    if (x == a.x) return a.y;
    if (x == b.x) return b.y;
    return a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x);
  };
  Rat best(0);
  size_t pi = 0, pj = 0;
  while (pi < fk.size() || pj < gk.size()) {
    Rat x = [&] {
      if (pi == fk.size()) return gk[pj].x;
      if (pj == gk.size()) return fk[pi].x;
      return rat_min(fk[pi].x, gk[pj].x);
    }();
    while (pi < fk.size() && fk[pi].x == x) pi++;
    while (pj < gk.size() && gk[pj].x == x) pj++;
    while (i + 2 < fk.size() && fk[i + 1].x <= x) i++;
    while (j + 2 < gk.size() && gk[j + 1].x <= x) j++;
    Rat d = rat_abs(value_on(fk, i, x) - value_on(gk, j, x));
    if (d > best) best = d;
  }
  return best;
}

// f + scale * g on the union knot set (domains must coincide).
inline PLFunction add_scaled(const PLFunction& f, const PLFunction& g, const Rat& scale) {
  if (!(f.domain() == g.domain()))
    throw precondition_error("add_scaled: domains differ");
  const auto& fk = f.knots();
  const auto& gk = g.knots();
  std::vector<PLKnot> out;
  out.reserve(fk.size() + gk.size());
  size_t i = 0, j = 0, pi = 0, pj = 0;
  auto value_on = [](const std::vector<PLKnot>& ks, size_t seg, const Rat& x) -> Rat {
    const PLKnot& a = ks[seg];
    const PLKnot& b = ks[seg + 1];
    if (x == a.x) return a.y;
    if (x == b.x) return b.y;
    return a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x);
  };
  while (pi < fk.size() || pj < gk.size()) {
    Rat x = [&] {
      if (pi == fk.size()) return gk[pj].x;
      if (pj == gk.size()) return fk[pi].x;
      return rat_min(fk[pi].x, gk[pj].x);
    }();
    while (pi < fk.size() && fk[pi].x == x) pi++;
    while (pj < gk.size() && gk[pj].x == x) pj++;
    while (i + 2 < fk.size() && fk[i + 1].x <= x) i++;
    while (j + 2 < gk.size() && gk[j + 1].x <= x) j++;
    out.push_back({x, value_on(fk, i, x) + scale * value_on(gk, j, x)});
  }
  return PLFunction(std::move(out));
}

// Maximal runs of constant monotonicity direction (+1 increasing, -1
// decreasing, 0 flat), as knot index ranges [first, last].
struct MonotoneRun {
  size_t first, last;
  int dir;
};

inline std::vector<MonotoneRun> monotone_runs(const PLFunction& f) {
  const auto& ks = f.knots();
  std::vector<MonotoneRun> runs;
  for (size_t i = 0; i + 1 < ks.size(); i++) {
    int d = ks[i + 1].y > ks[i].y ? 1 : (ks[i + 1].y < ks[i].y ? -1 : 0);
    if (!runs.empty() && runs.back().dir == d && runs.back().last == i)
      runs.back().last = i + 1;
    else
      runs.push_back({i, i + 1, d});
  }
  return runs;
}

inline bool has_flat_piece(const PLFunction& f, const Interval& window) {
  const auto& ks = f.knots();
  for (size_t i = 0; i + 1 < ks.size(); i++) {
    if (ks[i + 1].x <= window.lo || ks[i].x >= window.hi) continue;
    if (ks[i].y == ks[i + 1].y) return true;
  }
  return false;
}

inline bool strictly_increasing_on(const PLFunction& f, const Interval& window) {
  require_subdomain(f, window);
  const auto& ks = f.knots();
  for (size_t i = 0; i + 1 < ks.size(); i++) {
    if (ks[i + 1].x <= window.lo || ks[i].x >= window.hi) continue;
    if (!(ks[i + 1].y > ks[i].y)) return false;
  }
  return true;
}

// Largest net drop over the maximal decreasing runs of f (0 if none).
inline Rat max_decreasing_drop(const PLFunction& f) {
  Rat best(0);
  const auto& ks = f.knots();
  for (const auto& run : monotone_runs(f)) {
    if (run.dir != -1) continue;
    Rat drop = ks[run.first].y - ks[run.last].y;
    if (drop > best) best = drop;
  }
  return best;
}

}  // namespace exactpl
