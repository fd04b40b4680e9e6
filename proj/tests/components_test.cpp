#include "exactpl/components.hpp"

#include <gtest/gtest.h>

#include "support/gen.hpp"
#include "support/oracles.hpp"

namespace exactpl {
namespace {

IntervalSet set(std::initializer_list<std::pair<long, long>> parts, long den) {
  std::vector<Interval> v;
  for (auto& p : parts) v.emplace_back(rat(p.first, den), rat(p.second, den));
  return IntervalSet::from_parts(std::move(v));
}

TEST(Components, SingleBlockExample) {
  auto H = set({{2, 3}}, 5);
  auto comps = high_density_components(H, {Rat(0), Rat(1)}, rat(1, 2));
  ASSERT_EQ(comps.components.size(), 1u);
  EXPECT_EQ(comps.components[0], Interval(rat(1, 5), rat(4, 5)));

  auto bound = component_measure_bound(H, {Rat(0), Rat(1)}, rat(1, 2));
  EXPECT_EQ(bound.lhs, rat(3, 5));
  EXPECT_EQ(bound.rhs, rat(4, 5));
  EXPECT_TRUE(bound.ok);
}

TEST(Components, FullAndEmpty) {
  auto full = set({{0, 1}}, 1);
  for (auto eps : {rat(1, 2), rat(9, 10), rat(1, 100)}) {
    auto comps = high_density_components(full, {Rat(0), Rat(1)}, eps);
    ASSERT_EQ(comps.components.size(), 1u);
    EXPECT_EQ(comps.components[0], Interval(Rat(0), Rat(1)));
  }
  EXPECT_TRUE(high_density_components(IntervalSet(), {Rat(0), Rat(1)}, rat(1, 2))
                  .components.empty());
  auto bound = component_measure_bound(IntervalSet(), {Rat(0), Rat(1)}, rat(1, 2));
  EXPECT_EQ(bound.lhs, Rat(0));
  EXPECT_EQ(bound.rhs, Rat(0));
  EXPECT_TRUE(bound.ok);
}

TEST(Components, EpsOutOfRange) {
  auto H = set({{1, 2}}, 4);
  EXPECT_THROW(high_density_components(H, {Rat(0), Rat(1)}, Rat(1)), precondition_error);
  EXPECT_THROW(high_density_components(H, {Rat(0), Rat(1)}, Rat(0)), precondition_error);
  EXPECT_THROW(high_density_components(H, {Rat(0), Rat(1)}, rat(-1, 2)), precondition_error);
}

TEST(Components, StraddleExamples) {
  auto H = set({{2, 3}}, 5);
  Interval I{Rat(0), Rat(1)};
  // at the component endpoints of the worked example the exact sup is eps
  EXPECT_EQ(max_straddling_density(H, I, rat(1, 5)), rat(1, 2));
  EXPECT_EQ(max_straddling_density(H, I, rat(4, 5)), rat(1, 2));
  // interior of H: arbitrarily dense straddling intervals exist
  EXPECT_EQ(max_straddling_density(H, I, rat(1, 2)), Rat(1));
  // at a part endpoint the one-sided limit still gives 1
  EXPECT_EQ(max_straddling_density(H, I, rat(2, 5)), Rat(1));
  // no straddling interval at the window boundary
  EXPECT_EQ(max_straddling_density(H, I, Rat(0)), Rat(0));
  EXPECT_EQ(max_straddling_density(H, I, Rat(1)), Rat(0));
}

TEST(Components, CoveringLawsRandomized) {
  testgen::Rng rng(77);
  const Rat epses[] = {rat(1, 2), rat(1, 3), rat(1, 10)};
  for (int trial = 0; trial < 400; trial++) {
    auto H = testgen::interval_set(rng, 10);
    Interval I{Rat(0), Rat(1)};
    const Rat& eps = epses[trial % 3];
    auto comps = high_density_components(H, I, eps);
    // each component is at least eps/2 dense, and its boundary straddles at
    // most eps
    for (const auto& c : comps.components) {
      ASSERT_GE(density(H, c), eps / 2);
      ASSERT_LE(max_straddling_density(H, I, c.lo), eps);
      ASSERT_LE(max_straddling_density(H, I, c.hi), eps);
    }
    // total measure bound
    auto bound = component_measure_bound(H, I, eps);
    ASSERT_TRUE(bound.ok) << "lhs " << rat_str(bound.lhs) << " rhs " << rat_str(bound.rhs);
    // the cover contains the interior mass of H itself
    for (const auto& p : H.intersect(I).parts())
      if (p.length() > 0) ASSERT_TRUE(comps.as_set().contains(p.midpoint()));
  }
}

TEST(Components, MonotoneInEps) {
  testgen::Rng rng(88);
  for (int trial = 0; trial < 120; trial++) {
    auto H = testgen::interval_set(rng, 8);
    Interval I{Rat(0), Rat(1)};
    Rat e1 = rat(1 + static_cast<long>(rng() % 40), 100);
    Rat e2 = e1 + rat(1 + static_cast<long>(rng() % 40), 100);
    auto big = high_density_components(H, I, e1);
    auto small = high_density_components(H, I, e2);
    ASSERT_TRUE(small.as_set().subset_of(big.as_set()));
  }
}

TEST(Components, BruteForceOracleAgreement) {
  // the candidate-interval oracle classifies a grid identically except within
  // 1e-6 of exact component endpoints
  testgen::Rng rng(99);
  Rat tol = rat_pow(rat(1, 10), 6);
  for (int trial = 0; trial < 25; trial++) {
    auto H = testgen::interval_set(rng, 6);
    Interval I{Rat(0), Rat(1)};
    Rat eps = rat(1 + static_cast<long>(rng() % 8), 10);
    auto exact = high_density_components(H, I, eps).as_set();
    oracles::CoverageOracle oracle(H, I, eps);
    for (long i = 0; i <= 1000; i++) {
      Rat x = rat(i, 1000);
      bool e = exact.contains(x) && x != Rat(0) && x != Rat(1);
      bool a = oracle.covered(x);
      if (e == a) continue;
      Rat dist(2);
      for (const auto& c : exact.parts()) {
        dist = rat_min(dist, rat_abs(x - c.lo));
        dist = rat_min(dist, rat_abs(x - c.hi));
      }
      ASSERT_LE(dist, tol) << "grid point " << rat_str(x) << " disagrees far from boundaries";
    }
  }
}

}  // namespace
}  // namespace exactpl
