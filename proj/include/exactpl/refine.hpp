#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "exactpl/components.hpp"
#include "exactpl/piecewise.hpp"

namespace exactpl {

// Exact record of the six guarantees of one refinement step.  verify() is
// called on construction and again by consumers; every quantity carries both
// sides of its inequality.
struct StepChecks {
  Rat eps;
  Rat gap_left, gap_right;      // (1) bracket strictly inside: both > 0
  Rat width, half_outer_width;  // (2) width < half_outer_width
  Rat level, level_floor;       // (3) level > max{f(a0), f(b0), y0}
  Rat bracket_value_max;        // (4) max{f(a1), f(b1)} <= level
  Rat start_density;            // (5) density of H_{y0} in the bracket > 1/2
  Rat straddle_left, straddle_right;  // (6) both <= eps

  void verify() const {
    if (!(gap_left > 0 && gap_right > 0))
      throw internal_error("refinement: bracket not strictly interior");
    if (!(width < half_outer_width))
      throw internal_error("refinement: bracket not halved");
    if (!(level > level_floor))
      throw internal_error("refinement: level does not clear the floor");
    if (!(bracket_value_max <= level))
      throw internal_error("refinement: bracket endpoint value above level");
    if (!(start_density > rat(1, 2)))
      throw internal_error("refinement: density at the base level not above 1/2");
    if (!(straddle_left <= eps && straddle_right <= eps))
      throw internal_error("refinement: straddling density above eps");
  }
};

struct RefinementStep {
  Rat y1;
  Interval bracket;
  StepChecks checks;
  int inner_stages = 0;
};

namespace detail {

// Largest delta such that every subinterval of `window` anchored at one of
// its endpoints with length < delta has density of H below `bound`.  Exact:
// the anchored density first reaches `bound` where the piecewise-linear gap
// mass(t) - bound*t returns to zero.
inline Rat anchored_density_delta(const IntervalSet& H, const Interval& window,
                                  const Rat& bound) {
  auto one_side = [&](bool from_left) -> Rat {
    Rat anchor = from_left ? window.lo : window.hi;
    // event offsets from the anchor, walking inward
    std::vector<Rat> offs;
    for (const auto& p : H.intersect(window).parts()) {
      Rat a = from_left ? p.lo - anchor : anchor - p.hi;
      Rat b = from_left ? p.hi - anchor : anchor - p.lo;
      offs.push_back(a);
      offs.push_back(b);
    }
    std::sort(offs.begin(), offs.end());
    IntervalSet HW = H.intersect(window);
    auto gap_at = [&](const Rat& off) -> Rat {  // mass(t) - bound * t at t = off
      Rat m = from_left ? HW.measure_below(anchor + off)
                        : HW.measure() - HW.measure_below(anchor - off);
      return m - bound * off;
    };
    Rat t(0), gap(0);  // gap(0) = 0; the gap is linear between events
    for (const auto& off : offs) {
      if (off <= t) continue;
      Rat gap2 = gap_at(off);
      if (gap == 0) {  // only at t = 0
        if (gap2 > 0) return Rat(0);  // mass starts at the anchor itself
      } else if (gap < 0 && gap2 >= 0) {
        Rat slope = (gap2 - gap) / (off - t);
        return t + (Rat(0) - gap) / slope;
      }
      t = off;
      gap = gap2;
    }
    return window.length();
  };
  return rat_min(one_side(true), one_side(false));
}

inline const Interval& pick_component(const ComponentList& comps) {
  if (comps.components.empty()) throw internal_error("component pick on empty cover");
  const Interval* best = &comps.components.front();
  for (const auto& c : comps.components)
    if (c.length() > best->length()) best = &c;  // ties keep the leftmost
  return *best;
}

inline void require_no_flats(const PLFunction& f, const Interval& window) {
  const auto& ks = f.knots();
  for (size_t i = 0; i + 1 < ks.size(); i++) {
    if (ks[i + 1].x <= window.lo || ks[i].x >= window.hi) continue;
    if (ks[i].y == ks[i + 1].y)
      throw precondition_error("flat segment on [" + rat_str(ks[i].x) + ", " +
                               rat_str(ks[i + 1].x) + "] at height " + rat_str(ks[i].y));
  }
}

}  // namespace detail

// One constructive step: from a window with an interior supremum and a base
// level y0 below it, produce a higher level y1 and a component bracket of the
// eps-cover of H_{y1} satisfying the six recorded guarantees.  Follows the
// recursive scheme: pick the midpoint level alpha, compute the exact anchored
// delta, raise the level until the cover is smaller than min(delta, half the
// window), descend into the largest component, and stop once the bracket is
// more than half filled by H_{y0}.
inline RefinementStep refinement_step(const PLFunction& f, const Interval& outer,
                                      const Rat& y0, const Rat& eps) {
  require_subdomain(f, outer);
  if (!(eps > 0 && eps < 1)) throw precondition_error("refinement_step: eps must be in (0,1)");
  detail::require_no_flats(f, outer);
  Rat fa = f(outer.lo), fb = f(outer.hi);
  Rat s0 = sup_on(f, outer);
  if (!(s0 > rat_max(fa, fb)))
    throw precondition_error("supremum attained at an endpoint: no interior bump "
                             "(monotone inputs have none)");
  if (!(y0 < s0)) throw precondition_error("base level y0 must lie below the supremum");

  IntervalSet base_level_set = superlevel(f, y0, outer);

  Interval cur = outer;
  Rat r = y0;
  int stages = 0;
  Rat y1(0);
  std::optional<Interval> bracket;
  Rat bracket_density(0);
  while (!bracket) {
    if (++stages > 200) throw internal_error("refinement did not localize in 200 stages");
    Rat fc = f(cur.lo), fd = f(cur.hi);
    Rat s = sup_on(f, cur);
    Rat alpha = (rat_max(rat_max(fc, fd), r) + s) / 2;
    Rat delta = detail::anchored_density_delta(superlevel(f, alpha, cur), cur, eps / 2);
    if (!(delta > 0)) throw internal_error("anchored delta degenerate");
    Rat target = rat_min(delta, cur.length() / 2);

    // monotone level raise with exact cover measures at each probe, then a
    // snap to the simplest admissible level
    Rat lo = alpha, hi = s;
    std::optional<Rat> found;
    ComponentList comps;
    for (int iter = 0; iter < 400 && !found; iter++) {
      Rat mid = (lo + hi) / 2;
      ComponentList c = high_density_components(superlevel(f, mid, cur), cur, eps);
      if (!c.components.empty() && c.total_measure() < target) {
        Rat snapped = simplest_rational_in(mid, (mid + s) / 2);
        ComponentList cs = high_density_components(superlevel(f, snapped, cur), cur, eps);
        if (!cs.components.empty() && cs.total_measure() < target) {
          found = snapped;
          comps = std::move(cs);
        } else {  // snapping is an optimization only
          found = mid;
          comps = std::move(c);
        }
      } else {
        lo = mid;
      }
    }
    if (!found) throw internal_error("level raise did not reach the cover target");
    Interval comp = detail::pick_component(comps);
    if (!(comp.lo > cur.lo && comp.hi < cur.hi))
      throw internal_error("cover component touches the window boundary");
    if (!(comp.length() < cur.length() / 2))
      throw internal_error("cover component not halved");
    if (!(rat_max(f(comp.lo), f(comp.hi)) <= *found))
      throw internal_error("component endpoint value above its level");
    cur = comp;
    r = *found;
    Rat dens = density(base_level_set, cur);
    if (dens > rat(1, 2)) {
      y1 = r;
      bracket = cur;
      bracket_density = dens;
    }
  }

  IntervalSet H1 = superlevel(f, y1, outer);
  StepChecks checks{
      eps,
      bracket->lo - outer.lo,
      outer.hi - bracket->hi,
      bracket->length(),
      outer.length() / 2,
      y1,
      rat_max(rat_max(fa, fb), y0),
      rat_max(f(bracket->lo), f(bracket->hi)),
      bracket_density,
      max_straddling_density(H1, outer, bracket->lo),
      max_straddling_density(H1, outer, bracket->hi),
  };
  checks.verify();
  return RefinementStep{y1, *bracket, std::move(checks), stages};
}

// Nested-bracket certificate of an approximate maximum: strictly nested
// brackets, widths at least halving, levels strictly increasing, with the
// full per-stage check records.
struct MaxSearchCertificate {
  Interval start;
  Rat y_start;
  std::vector<RefinementStep> stages;
  Interval enclosure;
  bool boundary_case = false;

  void verify() const {
    if (boundary_case) {
      if (!stages.empty() || enclosure.length() != 0)
        throw internal_error("boundary certificate malformed");
      return;
    }
    const Interval* prev = &start;
    const Rat* level = &y_start;
    for (const auto& st : stages) {
      if (!(st.bracket.lo > prev->lo && st.bracket.hi < prev->hi))
        throw internal_error("certificate brackets not strictly nested");
      if (!(st.bracket.length() < prev->length() / 2))
        throw internal_error("certificate widths not halving");
      if (!(st.y1 > *level)) throw internal_error("certificate levels not increasing");
      st.checks.verify();
      prev = &st.bracket;
      level = &st.y1;
    }
    if (!stages.empty() && !(enclosure == stages.back().bracket))
      throw internal_error("certificate enclosure mismatch");
  }
};

// Dichotomy outcome: nothing to search for.
struct StrictlyIncreasingResult {};

// Fallback branch for inputs with flat pieces: every interior point of a flat
// piece carries full density of the level set, so the midpoint of the largest
// one is returned directly.
struct FlatMaxResult {
  Interval flat;
  Rat level;
  Rat x0;
};

using MaxSearchResult = std::variant<StrictlyIncreasingResult, FlatMaxResult, MaxSearchCertificate>;

// Iterated refinement toward an approximate maximum on the window, with
// eps = 1/(k+1) at the k-th stage (stage one uses 1/2; the cover is empty for
// eps >= 1).  The enclosure after k_max stages has width at most
// length(window) / 2^k_max and brackets a genuine local maximum.
inline MaxSearchResult approx_max_search(const PLFunction& f, const Interval& window,
                                         int k_max) {
  require_subdomain(f, window);
  if (k_max < 1) throw precondition_error("approx_max_search: k_max must be >= 1");

  // flat fallback: midpoint of the largest flat piece (leftmost on ties)
  {
    const auto& ks = f.knots();
    std::optional<Interval> best;
    Rat level(0);
    for (size_t i = 0; i + 1 < ks.size(); i++) {
      if (ks[i + 1].x <= window.lo || ks[i].x >= window.hi) continue;
      if (ks[i].y != ks[i + 1].y) continue;
      Interval piece(rat_max(ks[i].x, window.lo), rat_min(ks[i + 1].x, window.hi));
      if (!best || piece.length() > best->length()) {
        best = piece;
        level = ks[i].y;
      }
    }
    if (best) return FlatMaxResult{*best, level, best->midpoint()};
  }

  if (strictly_increasing_on(f, window)) return StrictlyIncreasingResult{};

  // first decreasing piece within the window
  const auto& ks = f.knots();
  std::optional<size_t> first_dec;
  for (size_t i = 0; i + 1 < ks.size(); i++) {
    if (ks[i + 1].x <= window.lo || ks[i].x >= window.hi) continue;
    if (ks[i + 1].y < ks[i].y) { first_dec = i; break; }
  }
  if (!first_dec) throw internal_error("no decreasing piece in a non-increasing window");

  if (ks[*first_dec].x <= window.lo) {
    // falling away from the left edge: the edge itself is the maximum
    MaxSearchCertificate cert{window, f(window.lo), {}, Interval(window.lo, window.lo), true};
    cert.verify();
    return cert;
  }

  // end of the first maximal decreasing run, clipped to the window
  size_t j = *first_dec;
  while (j + 1 < ks.size() - 1 && ks[j + 2].y < ks[j + 1].y) j++;
  Interval start(window.lo, rat_min(ks[j + 1].x, window.hi));

  Rat y_start = rat_max(f(start.lo), f(start.hi));
  std::vector<RefinementStep> stages;
  Interval cur = start;
  Rat level = y_start;
  for (int k = 1; k <= k_max; k++) {
    RefinementStep st = refinement_step(f, cur, level, rat(1, k + 1));
    cur = st.bracket;
    level = st.y1;
    stages.push_back(std::move(st));
  }
  MaxSearchCertificate cert{start, std::move(y_start), std::move(stages), cur, false};
  cert.verify();
  if (!(cert.enclosure.length() * rat_pow(Rat(2), k_max) <= window.length()))
    throw internal_error("enclosure width bound violated");
  return cert;
}

// Interior local maxima of a flat-free PL function (knot x-coordinates).
inline std::vector<Rat> interior_local_maxima(const PLFunction& f) {
  const auto& ks = f.knots();
  std::vector<Rat> out;
  for (size_t i = 1; i + 1 < ks.size(); i++)
    if (ks[i - 1].y < ks[i].y && ks[i].y > ks[i + 1].y) out.push_back(ks[i].x);
  return out;
}

struct StrictIncreaseCertificate {
  Rat fx1, fx2;
};

struct DecreaseWitness {
  Rat x_witness;    // local maximiser inside the enclosure (window edge in the
                    // boundary case, flat midpoint in the flat fallback)
  Rat right_slope;  // <= 0 (0 only for the flat fallback)
  Interval enclosure;
  std::optional<MaxSearchCertificate> certificate;
};

using WitnessResult = std::variant<StrictIncreaseCertificate, DecreaseWitness>;

// The dichotomy for one pair x1 < x2: either f(x1) < f(x2) is certified, or
// an approximate-maximum point with nonpositive one-sided slope to its right
// is produced.
inline WitnessResult monotonicity_witness(const PLFunction& f, const Rat& x1, const Rat& x2,
                                          int k_max = 12) {
  if (!(x1 < x2)) throw precondition_error("monotonicity_witness: need x1 < x2");
  require_subdomain(f, Interval(x1, x2));
  Rat f1 = f(x1), f2 = f(x2);
  if (f1 < f2) return StrictIncreaseCertificate{f1, f2};

  MaxSearchResult res = approx_max_search(f, Interval(x1, x2), k_max);
  if (std::holds_alternative<StrictlyIncreasingResult>(res))
    throw internal_error("strictly increasing search despite f(x1) >= f(x2)");
  if (const auto* flat = std::get_if<FlatMaxResult>(&res))
    return DecreaseWitness{flat->x0, Rat(0), Interval(flat->x0, flat->x0), std::nullopt};

  MaxSearchCertificate cert = std::get<MaxSearchCertificate>(std::move(res));
  if (cert.boundary_case) {
    Rat slope = f.slope(f.segment_index(x1));  // the piece to the right of x1
    return DecreaseWitness{x1, slope, cert.enclosure, std::move(cert)};
  }
  const auto& ks = f.knots();
  std::optional<size_t> best;
  for (size_t i = 1; i + 1 < ks.size(); i++) {
    if (ks[i].x < cert.enclosure.lo || ks[i].x > cert.enclosure.hi) continue;
    if (!(ks[i - 1].y < ks[i].y && ks[i].y > ks[i + 1].y)) continue;
    if (!best || ks[i].y > ks[*best].y) best = i;
  }
  if (!best) throw internal_error("enclosure contains no local maximum knot");
  return DecreaseWitness{ks[*best].x, f.slope(*best), cert.enclosure, std::move(cert)};
}

}  // namespace exactpl
