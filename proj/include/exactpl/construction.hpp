#pragma once

#include <optional>
#include <string>
#include <vector>

#include "exactpl/piecewise.hpp"

namespace exactpl {

// The two seed shapes, both normalized to domain [0,1] with f(0) = 1 and
// f(1) = 0.  "expanding" makes every inserted copy's central drop grow by
// 5/3 per level; "contracting" shrinks every drop by 3/4 per level.
enum class SeedKind { expanding, contracting };

inline const char* seed_name(SeedKind kind) {
  return kind == SeedKind::expanding ? "expanding" : "contracting";
}

class SeedFunction {
 public:
  static const SeedFunction& get(SeedKind kind) {
    static const SeedFunction expanding_seed(make_expanding(), SeedKind::expanding);
    static const SeedFunction contracting_seed(make_contracting(), SeedKind::contracting);
    return kind == SeedKind::expanding ? expanding_seed : contracting_seed;
  }
  static const SeedFunction& expanding() { return get(SeedKind::expanding); }
  static const SeedFunction& contracting() { return get(SeedKind::contracting); }

  const PLFunction& base() const { return base_; }
  SeedKind kind() const { return kind_; }
  size_t increasing_pieces() const { return inc_; }
  size_t decreasing_pieces() const { return dec_; }

 private:
  SeedFunction(PLFunction base, SeedKind kind)
      : base_(std::move(base)), kind_(kind), inc_(0), dec_(0) {
    const auto& ks = base_.knots();
    if (!(ks.front().x == 0 && ks.back().x == 1 && ks.front().y == 1 && ks.back().y == 0))
      throw internal_error("seed must run from (0,1) to (1,0)");
    for (size_t i = 0; i + 1 < ks.size(); i++) {
      if (ks[i].y == ks[i + 1].y) throw internal_error("seed has a flat piece");
      (ks[i + 1].y > ks[i].y ? inc_ : dec_)++;
    }
  }

  static PLFunction make_expanding() {
    const long thirds[] = {3, 4, 1, 4, -1, 2, -1, 0};
    std::vector<PLKnot> ks;
    for (int i = 0; i < 8; i++) ks.push_back({rat(i, 7), rat(thirds[i], 3)});
    return PLFunction(std::move(ks));
  }

  static PLFunction make_contracting() {
    const long quarters[] = {4, 6, 3, 5, 2, 4, 1, 3, 0, 2, -1, 1, -2, 0};
    std::vector<PLKnot> ks;
    for (int i = 0; i < 14; i++) ks.push_back({rat(i, 13), rat(quarters[i], 4)});
    return PLFunction(std::move(ks));
  }

  PLFunction base_;
  SeedKind kind_;
  size_t inc_, dec_;
};

// Replaces every maximal decreasing run [a,b] of f by the affine copy of the
// seed matched to the endpoints: x -> a + (b-a) t, value -> f(b) + drop * s.
// Increasing and flat pieces are untouched; strictly increasing inputs are
// fixed points.
inline PLFunction insert_seed(const PLFunction& f, const SeedFunction& seed) {
  const auto& ks = f.knots();
  const auto& sk = seed.base().knots();
  size_t grown = ks.size();
  for (const auto& run : monotone_runs(f))
    if (run.dir == -1) grown += (sk.size() - 2) - (run.last - run.first - 1);
  std::vector<PLKnot> out;
  out.reserve(grown);
  out.push_back(ks[0]);
  size_t i = 0;
  while (i + 1 < ks.size()) {
    if (ks[i + 1].y < ks[i].y) {
      size_t j = i;
      while (j + 1 < ks.size() && ks[j + 1].y < ks[j].y) j++;
      const Rat& a = ks[i].x;
      const Rat& b = ks[j].x;
      const Rat& va = ks[i].y;
      const Rat& vb = ks[j].y;
      Rat width = b - a, drop = va - vb;
      for (size_t t = 1; t < sk.size(); t++)
        out.push_back({a + width * sk[t].x, vb + drop * sk[t].y});
      i = j;
    } else {
      out.push_back(ks[i + 1]);
      i++;
    }
  }
  return PLFunction(std::move(out));
}

inline constexpr unsigned long kDefaultSegmentCap = 10'000'000;

// A construction is a seed plus a depth; without a depth only point queries
// are meaningful (materialization grows geometrically).
struct LazyConstruction {
  SeedKind seed;
  std::optional<long> depth;
};

// Exact segment count of the depth-n construction, via the run recurrence
// inc' = inc + seed_inc * dec, dec' = seed_dec * dec.
inline mpz_class projected_segments(SeedKind kind, long depth) {
  if (depth < 0) throw precondition_error("depth must be nonnegative");
  const SeedFunction& seed = SeedFunction::get(kind);
  mpz_class inc = static_cast<long>(seed.increasing_pieces());
  mpz_class dec = static_cast<long>(seed.decreasing_pieces());
  mpz_class seed_inc = inc, seed_dec = dec;
  for (long n = 0; n < depth; n++) {
    inc += seed_inc * dec;
    dec *= seed_dec;
  }
  return inc + dec;
}

inline PLFunction materialize(SeedKind kind, long depth,
                              unsigned long cap = kDefaultSegmentCap) {
  mpz_class projected = projected_segments(kind, depth);
  if (projected > static_cast<unsigned long>(cap))
    throw resource_error("materialization of depth " + std::to_string(depth) + " needs " +
                         projected.get_str() + " segments, over the cap of " +
                         std::to_string(cap));
  const SeedFunction& seed = SeedFunction::get(kind);
  PLFunction cur = seed.base();
  for (long n = 0; n < depth; n++) cur = insert_seed(cur, seed);
  return cur;
}

inline PLFunction materialize(const LazyConstruction& c,
                              unsigned long cap = kDefaultSegmentCap) {
  if (!c.depth) throw precondition_error("cannot materialize an unbounded construction");
  return materialize(c.seed, *c.depth, cap);
}

// Value of the depth-n construction at x, by recursive descent: increasing
// pieces are final at every deeper level; decreasing pieces conjugate into a
// depth-(n-1) copy.  Runs in O(n * seed size) without materializing anything.
inline Rat lazy_eval(SeedKind kind, long depth, const Rat& x) {
  if (depth < 0) throw precondition_error("depth must be nonnegative");
  const PLFunction& base = SeedFunction::get(kind).base();
  if (!base.in_domain(x)) throw precondition_error("lazy_eval: x outside [0,1]");
  Rat cx = x;
  Rat scale(1), shift(0);
  for (long level = depth; level > 0; level--) {
    size_t seg = base.segment_index(cx);
    const PLKnot& a = base.knots()[seg];
    const PLKnot& b = base.knots()[seg + 1];
    if (b.y > a.y) break;  // settled: later insertions never touch this piece
    shift += scale * b.y;
    scale *= a.y - b.y;
    cx = (cx - a.x) / (b.x - a.x);
  }
  return shift + scale * base(cx);
}

inline Rat lazy_eval(const LazyConstruction& c, long level, const Rat& x) {
  if (c.depth && level > *c.depth)
    throw precondition_error("query level exceeds the construction depth");
  return lazy_eval(c.seed, level, x);
}

// The nested central intervals of the expanding construction: I_1 = [3/7,4/7]
// and I_k = [a_{k-1} + 3/7^k, a_{k-1} + 4/7^k] where a_{k-1} is the left
// endpoint of I_{k-1}.  Each has length 7^{-k}; I_{k+1} is the central
// decreasing interval of the depth-k function.
inline std::vector<Interval> expanding_nested_intervals(int count) {
  if (count < 1) throw precondition_error("need at least one interval");
  std::vector<Interval> out;
  Rat a = rat(3, 7);
  out.emplace_back(a, rat(4, 7));
  for (int k = 2; k <= count; k++) {
    Rat p = rat_pow(rat(1, 7), k);
    out.emplace_back(a + 3 * p, a + 4 * p);
    a = out.back().lo;
  }
  return out;
}

// Per-level record of the divergence mechanism of the expanding seed: the
// drop across the central decreasing interval, the value at its left
// endpoint against the closed-form partial sum (in both index readings), and
// the midpoint trace.
struct DivergenceLevel {
  int n;
  Interval central;                      // I_{n+1}
  Rat drop;                              // net change of level n across I_{n+1}
  std::optional<Rat> drop_ratio;         // |drop_n| / |drop_{n-1}|
  Rat left_value;                        // level-n value at I_{n+1}.lo
  Rat partial_sum;                       // 1 + sum_{i<=n} (1/3)(5/3)^i
  bool left_matches_sum;
  std::optional<Rat> left_value_at_own;  // level-n value at I_n.lo (n >= 1)
  bool own_matches_sum;                  // the other index reading
};

struct DivergenceReport {
  std::vector<DivergenceLevel> levels;  // n = 0..n_max
  std::vector<Rat> midpoint_values;     // level-n value at 1/2
  bool midpoints_strictly_increasing;
  bool drops_expand_by_five_thirds;  // every ratio equals 5/3 exactly
  bool left_values_match_sum;        // shifted reading matches at every level
};

inline DivergenceReport divergence_report(int n_max) {
  if (n_max < 1) throw precondition_error("divergence_report: need n_max >= 1");
  auto intervals = expanding_nested_intervals(n_max + 1);
  DivergenceReport rep;
  rep.drops_expand_by_five_thirds = true;
  rep.left_values_match_sum = true;
  Rat partial = Rat(1) + rat(1, 3);  // n = 0 partial sum
  std::optional<Rat> prev_drop;
  for (int n = 0; n <= n_max; n++) {
    const Interval& central = intervals[n];  // I_{n+1}
    Rat lo_val = lazy_eval(SeedKind::expanding, n, central.lo);
    Rat hi_val = lazy_eval(SeedKind::expanding, n, central.hi);
    DivergenceLevel lv{n,
                       central,
                       hi_val - lo_val,
                       std::nullopt,
                       lo_val,
                       partial,
                       lo_val == partial,
                       std::nullopt,
                       false};
    if (prev_drop) {
      lv.drop_ratio = rat_abs(lv.drop) / rat_abs(*prev_drop);
      if (*lv.drop_ratio != rat(5, 3)) rep.drops_expand_by_five_thirds = false;
    }
    if (n >= 1) {
      lv.left_value_at_own = lazy_eval(SeedKind::expanding, n, intervals[n - 1].lo);
      lv.own_matches_sum = *lv.left_value_at_own == partial;
    }
    if (!lv.left_matches_sum) rep.left_values_match_sum = false;
    prev_drop = lv.drop;
    rep.levels.push_back(std::move(lv));
    partial += rat(1, 3) * rat_pow(rat(5, 3), n + 1);
  }
  rep.midpoints_strictly_increasing = true;
  for (int n = 0; n <= n_max; n++) {
    rep.midpoint_values.push_back(lazy_eval(SeedKind::expanding, n, rat(1, 2)));
    if (n > 0 && !(rep.midpoint_values[n] > rep.midpoint_values[n - 1]))
      rep.midpoints_strictly_increasing = false;
  }
  return rep;
}

// ||h_0 - chord||_inf for the contracting seed, with the chord running from
// (0,1) to (1,0).  PL difference, so knotwise maximization is exact.
inline const Rat& contracting_chord_gap() {
  static const Rat gap = [] {
    Rat best(0);
    for (const auto& k : SeedFunction::contracting().base().knots())
      best = rat_max(best, rat_abs(k.y - (Rat(1) - k.x)));
    return best;
  }();
  return gap;
}

struct ConvergenceLevel {
  int n;
  Rat max_drop;  // largest decreasing-run drop of the depth-n function
  Rat sup_diff;  // ||level (n+1) - level n||_inf, exact
  Rat bound;     // chord_gap * (3/4)^n
};

struct ConvergenceReport {
  Rat chord_gap;
  std::vector<ConvergenceLevel> levels;  // n = 0..n_max
  bool drops_contract_by_three_quarters;  // max_drop_n == (3/4)^{n+1}
  bool diffs_within_bound;                // sup_diff <= bound at every level
};

inline ConvergenceReport convergence_report(int n_max,
                                            unsigned long cap = kDefaultSegmentCap) {
  if (n_max < 0) throw precondition_error("convergence_report: need n_max >= 0");
  ConvergenceReport rep{contracting_chord_gap(), {}, true, true};
  PLFunction cur = materialize(SeedKind::contracting, 0, cap);
  for (int n = 0; n <= n_max; n++) {
    mpz_class projected = projected_segments(SeedKind::contracting, n + 1);
    if (projected > static_cast<unsigned long>(cap))
      throw resource_error("convergence level " + std::to_string(n + 1) + " needs " +
                           projected.get_str() + " segments, over the cap");
    PLFunction next = insert_seed(cur, SeedFunction::contracting());
    ConvergenceLevel lv{n, max_decreasing_drop(cur), sup_dist(next, cur),
                        rep.chord_gap * rat_pow(rat(3, 4), n)};
    if (lv.max_drop != rat_pow(rat(3, 4), n + 1)) rep.drops_contract_by_three_quarters = false;
    if (!(lv.sup_diff <= lv.bound)) rep.diffs_within_bound = false;
    rep.levels.push_back(std::move(lv));
    cur = std::move(next);
  }
  return rep;
}

// Exact enclosure of the uniform-limit value of the contracting construction
// at x: the depth-N value plus the geometric tail bound
// sum_{k>=N} chord_gap * (3/4)^{k+1} = 4 * chord_gap * (3/4)^{N+1}.
inline Interval limit_enclosure(const Rat& x, int depth) {
  if (depth < 0) throw precondition_error("limit_enclosure: depth must be nonnegative");
  Rat v = lazy_eval(SeedKind::contracting, depth, x);
  Rat tail = Rat(4) * contracting_chord_gap() * rat_pow(rat(3, 4), depth + 1);
  return {v - tail, v + tail};
}

}  // namespace exactpl
