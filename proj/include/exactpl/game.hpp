#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "exactpl/construction.hpp"

namespace exactpl {

// Sup-metric ball in function space.
struct Ball {
  PLFunction center;
  Rat radius;

  Ball(PLFunction c, Rat r) : center(std::move(c)), radius(std::move(r)) {
    if (!(radius > 0)) throw precondition_error("ball radius must be positive");
  }
};

// One stored margin witness: x1 lies in the certified margin set of x0's
// cell, so the difference quotient stays positive under any perturbation of
// both graph points by delta.
struct DqWitnessPair {
  Rat x0, x1;
  Rat gx0, gx1;
};

struct StrategyParams {
  Rat alpha;  // certified density floor, uniform over the partition
  Rat eta;    // exclusion radius around the base point
  Rat delta;  // returned ball radius
  Rat mu;     // vertical margin of the certified sets
  Rat wiggle_amplitude;
  std::vector<Interval> partition;
  std::vector<Rat> cell_floors;          // per-interval certified min mass
  std::vector<DqWitnessPair> witnesses;  // one per partition interval

  void verify() const {
    if (!(alpha > 0)) throw internal_error("strategy alpha not positive");
    if (!(delta > 0 && delta * 2 <= mu / 2))
      throw internal_error("strategy delta too large for mu");
    if (!(mu - 2 * delta > 0)) throw internal_error("mu margin not positive");
    if (!(eta - 2 * delta > 0)) throw internal_error("eta margin not positive");
    if (partition.empty() || partition.front().lo != 0 || partition.back().hi != 1)
      throw internal_error("partition does not cover [0,1]");
    for (size_t i = 1; i < partition.size(); i++)
      if (partition[i].lo != partition[i - 1].hi)
        throw internal_error("partition has gaps");
    for (const auto& w : witnesses) {
      Rat gap = rat_abs(w.x1 - w.x0);
      if (!(gap >= eta)) throw internal_error("witness pair inside the eta ball");
      bool right = w.x1 > w.x0;
      if (right && !(w.gx1 - w.gx0 >= mu))
        throw internal_error("right witness misses the mu margin");
      if (!right && !(w.gx0 - w.gx1 >= mu))
        throw internal_error("left witness misses the mu margin");
      // all four extreme delta-perturbations of the two graph points
      for (int sy0 : {-1, 1})
        for (int sy1 : {-1, 1}) {
          Rat num = (w.gx1 + sy1 * delta) - (w.gx0 + sy0 * delta);
          for (int sx0 : {-1, 1})
            for (int sx1 : {-1, 1}) {
              Rat den = (w.x1 + sx1 * delta) - (w.x0 + sx0 * delta);
              if (!(den != 0 && num / den > 0))
                throw internal_error("perturbed difference quotient not positive");
            }
        }
    }
  }
};

namespace detail {

// The inserted wiggle: one affine copy of the contracting seed's deviation
// from its chord per partition interval, vanishing at all lattice points
// k/169 that bound the seed pieces.  Amplitude 1; max |value| equals the
// chord gap 15/26.
inline const PLFunction& strategy_wiggle() {
  static const PLFunction w = [] {
    const PLFunction& h = SeedFunction::contracting().base();
    std::vector<PLKnot> ks;
    for (long cell = 0; cell < 13; cell++) {
      for (long i = 0; i < 13; i++) {
        Rat t = rat(i, 13);
        ks.push_back({rat(13 * cell + i, 169), h(t) - (Rat(1) - t)});
      }
    }
    ks.push_back({Rat(1), Rat(0)});
    return PLFunction(std::move(ks));
  }();
  return w;
}

// Certified margin mass for every base point in one cell [p,q] with value
// range [lo,hi]: points at least eta beyond the cell whose value clears the
// whole cell range by mu, on either side.  Strict level sets keep every
// certified point usable as a witness.
struct CellCertificate {
  Rat mass;
  IntervalSet left_set, right_set;  // certified subsets (closures)
};

inline CellCertificate certify_cell(const PLFunction& g, const Interval& J, const Rat& mu,
                                    const Rat& eta, const Interval& cell, const Rat& lo,
                                    const Rat& hi) {
  CellCertificate out{Rat(0), {}, {}};
  Rat right_from = cell.hi + eta;
  if (right_from < J.hi) {
    out.right_set = superlevel(g, hi + mu, Interval(right_from, J.hi));
    out.mass += out.right_set.measure();
  }
  Rat left_to = cell.lo - eta;
  if (left_to > J.lo) {
    out.left_set = sublevel(g, lo - mu, Interval(J.lo, left_to));
    out.mass += out.left_set.measure();
  }
  return out;
}

inline uint64_t mix_seed(uint64_t seed, uint64_t k) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ull * (k + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace detail

// The responding move: adds a fixed-shape wiggle of amplitude radius/(8*gap)
// to the incoming center (one endpoint-matched seed copy per partition
// interval, laid around the chord), certifies a uniform density floor for the
// margin sets of every base point in every partition interval, and returns
// the ball of radius min(radius/2, mu/4, eta/4) around the new center.
inline std::pair<Ball, StrategyParams> p2_move(const Ball& b) {
  if (!(b.center.domain() == Interval(Rat(0), Rat(1))))
    throw precondition_error("p2_move: center must live on [0,1]");
  const Rat& r = b.radius;
  Rat amplitude = r / (4 * contracting_chord_gap());
  PLFunction g = add_scaled(b.center, detail::strategy_wiggle(), amplitude);

  Rat gmin = g.knots()[0].y, gmax = gmin;
  for (const auto& k : g.knots()) {
    if (k.y < gmin) gmin = k.y;
    if (k.y > gmax) gmax = k.y;
  }
  Rat eta = rat(1, 4) * rat(1, 169);  // quarter of the shortest inserted piece

  std::vector<Interval> partition;
  for (long i = 0; i < 13; i++) partition.emplace_back(rat(i, 13), rat(i + 1, 13));

  Rat mu = (gmax - gmin) / 16;
  std::vector<Rat> floors;
  std::vector<DqWitnessPair> witnesses;
  for (int attempt = 0;; attempt++) {
    if (attempt > 8) throw internal_error("p2_move: no positive floor at any margin");
    floors.clear();
    witnesses.clear();
    bool ok = true;
    for (const auto& J : partition) {
      std::optional<Rat> worst;
      std::optional<detail::CellCertificate> worst_cert;
      std::optional<Interval> worst_cell;
      // cells: pieces of g inside J, split so the value variation per cell
      // stays within mu
      size_t seg = g.segment_index(J.lo);
      const auto& ks = g.knots();
      for (size_t i = seg; i + 1 < ks.size() && ks[i].x < J.hi; i++) {
        Rat plo = rat_max(ks[i].x, J.lo), phi = rat_min(ks[i + 1].x, J.hi);
        if (!(plo < phi)) continue;
        Rat vlo = g(plo), vhi = g(phi);
        Rat var = rat_abs(vhi - vlo);
        long splits = 1;
        if (var > mu) {
          mpz_class q = rat_ceil(var / mu);
          splits = q.get_si();
        }
        for (long s = 0; s < splits; s++) {
          Interval cell(plo + (phi - plo) * s / splits, plo + (phi - plo) * (s + 1) / splits);
          Rat ca = g(cell.lo), cb = g(cell.hi);
          Rat clo = rat_min(ca, cb), chi = rat_max(ca, cb);
          auto cert = detail::certify_cell(g, J, mu, eta, cell, clo, chi);
          if (!worst || cert.mass < *worst) {
            worst = cert.mass;
            worst_cert = std::move(cert);
            worst_cell = cell;
          }
        }
      }
      if (!worst || !(*worst > 0)) {
        ok = false;
        break;
      }
      floors.push_back(*worst);
      // witness from the worst cell: its certified mass is positive, so one
      // side holds a positive-length part
      Rat x0 = worst_cell->midpoint();
      std::optional<Rat> x1;
      for (const auto& part : worst_cert->right_set.parts())
        if (part.length() > 0) { x1 = part.midpoint(); break; }
      if (!x1)
        for (const auto& part : worst_cert->left_set.parts())
          if (part.length() > 0) { x1 = part.midpoint(); break; }
      if (!x1) throw internal_error("positive floor without a witness part");
      witnesses.push_back({x0, *x1, g(x0), g(*x1)});
    }
    if (ok) break;
    mu /= 2;
  }

  Rat alpha = floors[0];
  for (const auto& f : floors) alpha = rat_min(alpha, f);
  alpha = alpha * rat(3, 4) * 13;  // strict floor on the density within a partition interval

  Rat delta = rat_min(rat_min(r / 2, mu / 4), eta / 4);
  StrategyParams params{alpha,  eta,    delta,     mu, amplitude,
                        std::move(partition), std::move(floors), std::move(witnesses)};
  params.verify();
  if (!(sup_dist(g, b.center) + delta < r))
    throw internal_error("p2_move: strict nesting violated");
  return {Ball(std::move(g), std::move(delta)), std::move(params)};
}

enum class AdversaryKind { random, monotone_shift };

// Random opposing move: a random-walk perturbation on a coarse grid with
// sup-norm at most radius/4 and slope at most radius/2, deterministic in the
// seed; returned radius is radius/4.
inline Ball p1_random(const Ball& b, uint64_t seed) {
  uint64_t state = seed;
  auto next = [&state] {
    state = detail::mix_seed(state, 0x6a09e667f3bcc909ull);
    return state;
  };
  std::vector<PLKnot> ks;
  long level = static_cast<long>(next() % 33) - 16;  // sixteenths of radius/4
  for (long j = 0; j <= 8; j++) {
    ks.push_back({rat(j, 8), b.radius / 4 * rat(level, 16)});
    long step = static_cast<long>(next() % 3) - 1;
    level = std::min(16L, std::max(-16L, level + step));
  }
  PLFunction perturbation(std::move(ks));
  return Ball(add_scaled(b.center, perturbation, Rat(1)), b.radius / 4);
}

// Adversarial opposing move: tilts the center toward a strictly increasing
// shape, stressing the responder's certificate.
inline Ball p1_monotone_shift(const Ball& b) {
  PLFunction tilt = PLFunction::from_pairs({{Rat(0), Rat(0)}, {Rat(1), b.radius / 4}});
  return Ball(add_scaled(b.center, tilt, Rat(1)), b.radius / 4);
}

struct GamePlay {
  bool by_responder;
  Ball ball;
  std::optional<StrategyParams> params;
};

struct SampledScale {
  size_t move_index;  // index into plays
  Rat alpha;
  Rat min_density;  // minimum exact sampled margin-set density
  bool ok;          // min_density > alpha
};

struct GameTranscript {
  int rounds = 0;
  uint64_t rng_seed = 0;
  AdversaryKind adversary = AdversaryKind::random;
  std::vector<GamePlay> plays;
  std::vector<SampledScale> final_report;

  // Strict nesting of consecutive balls and every responder's margin record.
  void verify() const {
    for (size_t i = 1; i < plays.size(); i++) {
      const Ball& outer = plays[i - 1].ball;
      const Ball& inner = plays[i].ball;
      if (!(inner.radius < outer.radius))
        throw internal_error("transcript radii not strictly decreasing");
      if (!(sup_dist(inner.center, outer.center) + inner.radius < outer.radius))
        throw internal_error("transcript balls not strictly nested");
    }
    for (const auto& p : plays) {
      if (p.by_responder && !p.params) throw internal_error("responder play without params");
      if (p.params) {
        p.params->verify();
        if (!(p.params->delta == p.ball.radius))
          throw internal_error("responder radius differs from its delta");
      }
    }
  }
};

// Exact density of the margin set of one base point within its partition
// interval: mass at distance >= eta from x0 whose value clears g(x0) by mu on
// the matching side.
inline Rat margin_set_density(const PLFunction& g, const Interval& J, const Rat& x0,
                              const Rat& mu, const Rat& eta) {
  if (J.length() == 0) throw precondition_error("margin_set_density: degenerate interval");
  Rat y0 = g(x0);
  Rat mass(0);
  if (x0 + eta < J.hi)
    mass += superlevel(g, y0 + mu, Interval(x0 + eta, J.hi)).measure();
  if (J.lo < x0 - eta)
    mass += sublevel(g, y0 - mu, Interval(J.lo, x0 - eta)).measure();
  return mass / J.length();
}

// Re-checks every responder move of a transcript: margin records, and for
// sampled base points per partition interval the exact margin-set density
// exceeds the recorded alpha.  The mu - 2delta and eta - 2delta margins carry
// the certificate to every function of the final ball.
inline std::vector<SampledScale> verify_limit_scales(const GameTranscript& t,
                                                     int samples_per_interval = 3) {
  if (samples_per_interval < 1) throw precondition_error("need at least one sample");
  t.verify();
  std::vector<SampledScale> out;
  for (size_t i = 0; i < t.plays.size(); i++) {
    const auto& play = t.plays[i];
    if (!play.by_responder) continue;
    const StrategyParams& sp = *play.params;
    std::optional<Rat> worst;
    for (const auto& J : sp.partition) {
      for (int s = 1; s <= samples_per_interval; s++) {
        Rat x0 = J.lo + J.length() * s / (samples_per_interval + 1);
        Rat d = margin_set_density(play.ball.center, J, x0, sp.mu, sp.eta);
        if (!worst || d < *worst) worst = d;
      }
    }
    SampledScale sc{i, sp.alpha, *worst, *worst > sp.alpha};
    if (!sc.ok) throw internal_error("sampled margin density at or below alpha");
    out.push_back(std::move(sc));
  }
  return out;
}

inline GameTranscript simulate(int rounds, uint64_t rng_seed,
                               AdversaryKind adversary = AdversaryKind::random) {
  if (rounds < 1) throw precondition_error("simulate: need rounds >= 1");
  GameTranscript t;
  t.rounds = rounds;
  t.rng_seed = rng_seed;
  t.adversary = adversary;
  Ball cur(PLFunction::from_pairs({{Rat(0), Rat(0)}, {Rat(1), Rat(0)}}), Rat(1));
  for (int k = 1; k <= rounds; k++) {
    Ball opposing = adversary == AdversaryKind::random
                        ? p1_random(cur, detail::mix_seed(rng_seed, static_cast<uint64_t>(k)))
                        : p1_monotone_shift(cur);
    t.plays.push_back({false, opposing, std::nullopt});
    auto [resp, params] = p2_move(opposing);
    t.plays.push_back({true, std::move(resp), std::move(params)});
    cur = t.plays.back().ball;
  }
  t.verify();
  t.final_report = verify_limit_scales(t, 3);
  return t;
}

}  // namespace exactpl
