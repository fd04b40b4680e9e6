#include "exactpl/refine.hpp"

#include <gtest/gtest.h>

#include "support/gen.hpp"
#include "support/oracles.hpp"

namespace exactpl {
namespace {

PLFunction tent() {
  return PLFunction::from_pairs({{Rat(0), Rat(0)}, {rat(1, 2), Rat(1)}, {Rat(1), Rat(0)}});
}

PLFunction make_g() {
  std::vector<PLKnot> ks;
  const long nums[] = {3, 4, 1, 4, -1, 2, -1, 0};
  for (int i = 0; i < 8; i++) ks.push_back({rat(i, 7), rat(nums[i], 3)});
  return PLFunction(std::move(ks));
}

using oracles::naive_straddle_max;

void verify_step_independently(const PLFunction& f, const Interval& outer, const Rat& y0,
                               const Rat& eps, const RefinementStep& st) {
  // (1)
  ASSERT_GT(st.bracket.lo, outer.lo);
  ASSERT_LT(st.bracket.hi, outer.hi);
  // (2)
  ASSERT_LT(st.bracket.length(), outer.length() / 2);
  // (3)
  ASSERT_GT(st.y1, rat_max(rat_max(f(outer.lo), f(outer.hi)), y0));
  // (4)
  ASSERT_LE(rat_max(f(st.bracket.lo), f(st.bracket.hi)), st.y1);
  // (5) fresh density computation
  ASSERT_GT(density(superlevel(f, y0, outer), st.bracket), rat(1, 2));
  // (6) naive straddle maximization on the exact level set
  IntervalSet H1 = superlevel(f, st.y1, outer);
  ASSERT_LE(naive_straddle_max(H1, outer, st.bracket.lo), eps);
  ASSERT_LE(naive_straddle_max(H1, outer, st.bracket.hi), eps);
}

TEST(Refine, TentStep) {
  auto f = tent();
  Interval outer{Rat(0), Rat(1)};
  auto st = refinement_step(f, outer, Rat(0), rat(1, 10));
  EXPECT_GT(st.y1, Rat(0));
  EXPECT_LT(st.y1, Rat(1));
  EXPECT_TRUE(st.bracket.contains(rat(1, 2)));
  verify_step_independently(f, outer, Rat(0), rat(1, 10), st);
}

TEST(Refine, SeedStep) {
  auto g = make_g();
  Interval outer{Rat(0), Rat(1)};
  auto st = refinement_step(g, outer, Rat(1), rat(1, 4));
  EXPECT_GT(st.y1, Rat(1));
  verify_step_independently(g, outer, Rat(1), rat(1, 4), st);
}

TEST(Refine, PreconditionErrors) {
  auto inc = PLFunction::from_pairs({{Rat(0), Rat(0)}, {Rat(1), Rat(1)}});
  EXPECT_THROW(refinement_step(inc, {Rat(0), Rat(1)}, rat(1, 2), rat(1, 4)), precondition_error);
  auto flat = PLFunction::from_pairs(
      {{Rat(0), Rat(0)}, {rat(1, 4), Rat(1)}, {rat(1, 2), Rat(1)}, {Rat(1), Rat(0)}});
  EXPECT_THROW(refinement_step(flat, {Rat(0), Rat(1)}, Rat(0), rat(1, 4)), precondition_error);
  auto f = tent();
  EXPECT_THROW(refinement_step(f, {Rat(0), Rat(1)}, Rat(2), rat(1, 4)), precondition_error);
  EXPECT_THROW(refinement_step(f, {Rat(0), Rat(1)}, Rat(0), Rat(1)), precondition_error);
}

TEST(Refine, StepRandomized) {
  testgen::Rng rng(2024);
  int done = 0;
  const Rat epses[] = {rat(1, 4), rat(1, 10), rat(1, 3)};
  while (done < 40) {
    auto f = testgen::pl_interior_bump(rng, 5 + rng() % 8);
    Interval outer = f.domain();
    Rat y0 = rat_max(f(outer.lo), f(outer.hi));
    const Rat& eps = epses[done % 3];
    auto st = refinement_step(f, outer, y0, eps);
    verify_step_independently(f, outer, y0, eps, st);
    done++;
  }
}

TEST(Refine, TentSearch) {
  auto res = approx_max_search(tent(), {Rat(0), Rat(1)}, 20);
  auto& cert = std::get<MaxSearchCertificate>(res);
  EXPECT_TRUE(cert.enclosure.contains(rat(1, 2)));
  EXPECT_LE(cert.enclosure.length() * rat_pow(Rat(2), 20), Rat(1));
  EXPECT_EQ(cert.stages.size(), 20u);
  cert.verify();
}

TEST(Refine, SeedSearch) {
  auto g = make_g();
  auto res = approx_max_search(g, {Rat(0), Rat(1)}, 16);
  auto& cert = std::get<MaxSearchCertificate>(res);
  // encloses a maximiser of g; which of the two is construction-dependent
  bool first = cert.enclosure.contains(rat(1, 7));
  bool second = cert.enclosure.contains(rat(3, 7));
  EXPECT_TRUE(first || second);
  EXPECT_EQ(sup_on(g, cert.enclosure), rat(4, 3));
}

TEST(Refine, SearchDichotomyAndFallbacks) {
  auto inc = PLFunction::from_pairs({{Rat(0), Rat(0)}, {rat(1, 3), rat(1, 2)}, {Rat(1), Rat(2)}});
  EXPECT_TRUE(std::holds_alternative<StrictlyIncreasingResult>(
      approx_max_search(inc, {Rat(0), Rat(1)}, 8)));

  // flat fallback: midpoint of the largest flat piece
  auto flat = PLFunction::from_pairs({{Rat(0), Rat(0)},
                                      {rat(1, 8), Rat(1)},
                                      {rat(1, 4), Rat(1)},
                                      {rat(1, 2), Rat(0)},
                                      {rat(3, 4), rat(1, 2)},
                                      {Rat(1), rat(1, 2)}});
  auto res = approx_max_search(flat, {Rat(0), Rat(1)}, 8);
  auto& fm = std::get<FlatMaxResult>(res);
  EXPECT_EQ(fm.flat, Interval(rat(3, 4), Rat(1)));
  EXPECT_EQ(fm.level, rat(1, 2));
  EXPECT_EQ(fm.x0, rat(7, 8));

  // boundary case: falling away from the left edge
  auto fall = PLFunction::from_pairs({{Rat(0), Rat(1)}, {rat(1, 2), Rat(0)}, {Rat(1), rat(1, 2)}});
  auto res2 = approx_max_search(fall, {Rat(0), Rat(1)}, 8);
  auto& cert = std::get<MaxSearchCertificate>(res2);
  EXPECT_TRUE(cert.boundary_case);
  EXPECT_EQ(cert.enclosure, Interval(Rat(0), Rat(0)));
}

TEST(Refine, SearchEnclosesLocalMaxRandomized) {
  testgen::Rng rng(4096);
  int done = 0;
  while (done < 30) {
    auto f = testgen::pl_non_monotone(rng, 4 + rng() % 16);
    auto res = approx_max_search(f, f.domain(), 12);
    ASSERT_FALSE(std::holds_alternative<StrictlyIncreasingResult>(res));
    ASSERT_FALSE(std::holds_alternative<FlatMaxResult>(res));
    auto& cert = std::get<MaxSearchCertificate>(res);
    cert.verify();
    auto maxima = oracles::local_maxima(f);
    bool bracketed = false;
    for (const auto& m : maxima)
      if (cert.enclosure.contains(m)) bracketed = true;
    ASSERT_TRUE(bracketed) << "enclosure misses every knot-scan local maximum";
    done++;
  }
}

TEST(Refine, WitnessExamples) {
  auto id = PLFunction::from_pairs({{Rat(0), Rat(0)}, {Rat(1), Rat(1)}});
  auto w1 = monotonicity_witness(id, Rat(0), Rat(1));
  ASSERT_TRUE(std::holds_alternative<StrictIncreaseCertificate>(w1));

  auto w2 = monotonicity_witness(tent(), Rat(0), Rat(1));
  auto& dw = std::get<DecreaseWitness>(w2);
  EXPECT_EQ(dw.x_witness, rat(1, 2));
  EXPECT_EQ(dw.right_slope, Rat(-2));

  auto w3 = monotonicity_witness(make_g(), Rat(0), Rat(1));
  auto& dg = std::get<DecreaseWitness>(w3);
  EXPECT_TRUE(dg.right_slope == Rat(-7) || dg.right_slope == rat(-35, 3));
  EXPECT_LE(dg.right_slope, Rat(0));
}

TEST(Refine, WitnessRandomized) {
  testgen::Rng rng(555);
  for (int i = 0; i < 25; i++) {
    auto f = testgen::pl_strictly_increasing(rng, 4 + rng() % 10);
    auto w = monotonicity_witness(f, Rat(0), Rat(1));
    ASSERT_TRUE(std::holds_alternative<StrictIncreaseCertificate>(w));
  }
  int done = 0;
  while (done < 25) {
    auto f = testgen::pl_no_flat(rng, 4 + rng() % 12);
    if (f(Rat(0)) < f(Rat(1))) continue;
    auto w = monotonicity_witness(f, Rat(0), Rat(1));
    auto& dw = std::get<DecreaseWitness>(w);
    ASSERT_LE(dw.right_slope, Rat(0));
    done++;
  }
}

}  // namespace
}  // namespace exactpl
