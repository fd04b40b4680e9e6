#include "exactpl/game.hpp"

#include <gtest/gtest.h>

#include "support/gen.hpp"

namespace exactpl {
namespace {

Ball unit_zero_ball() {
  return Ball(PLFunction::from_pairs({{Rat(0), Rat(0)}, {Rat(1), Rat(0)}}), Rat(1));
}

TEST(Game, ResponderMoveOnZeroBall) {
  auto [ball, params] = p2_move(unit_zero_ball());
  EXPECT_LE(ball.radius, rat(1, 2));
  EXPECT_GT(params.alpha, Rat(0));
  EXPECT_GT(params.mu - 2 * params.delta, Rat(0));
  EXPECT_GT(params.eta - 2 * params.delta, Rat(0));
  EXPECT_EQ(params.partition.size(), 13u);
  // strict nesting inside the original ball
  auto zero = unit_zero_ball();
  EXPECT_LT(sup_dist(ball.center, zero.center) + ball.radius, zero.radius);
  params.verify();
}

TEST(Game, ZeroBallFloorsAreTranslationInvariant) {
  // the zero center makes every partition interval an exact translate, so the
  // per-interval certified floors coincide
  auto [ball, params] = p2_move(unit_zero_ball());
  ASSERT_EQ(params.cell_floors.size(), 13u);
  for (const auto& f : params.cell_floors) EXPECT_EQ(f, params.cell_floors[0]);
}

TEST(Game, WitnessQuotientsSurvivePerturbation) {
  auto [ball, params] = p2_move(unit_zero_ball());
  // beyond params.verify(): random non-extreme perturbations of the stored
  // witness pairs keep the quotient positive
  testgen::Rng rng(777);
  for (const auto& w : params.witnesses) {
    for (int i = 0; i < 25; i++) {
      Rat dx0 = params.delta * testgen::range_rat(rng, -60, 60, 61);
      Rat dy0 = params.delta * testgen::range_rat(rng, -60, 60, 61);
      Rat dx1 = params.delta * testgen::range_rat(rng, -60, 60, 61);
      Rat dy1 = params.delta * testgen::range_rat(rng, -60, 60, 61);
      Rat dq_val = dq({w.x0 + dx0, w.gx0 + dy0}, {w.x1 + dx1, w.gx1 + dy1});
      ASSERT_GT(dq_val, Rat(0));
    }
  }
}

TEST(Game, OpposingMoveIsDeterministicAndNested) {
  auto base = unit_zero_ball();
  Ball a = p1_random(base, 42);
  Ball b = p1_random(base, 42);
  EXPECT_EQ(a.radius, b.radius);
  EXPECT_TRUE(pointwise_equal(a.center, b.center));
  Ball c = p1_random(base, 43);
  EXPECT_LT(sup_dist(a.center, base.center) + a.radius, base.radius);
  EXPECT_LT(sup_dist(c.center, base.center) + c.radius, base.radius);
  // perturbation sup-norm bound is exact
  EXPECT_LE(sup_dist(a.center, base.center), base.radius / 4);
}

TEST(Game, SingleRoundTranscript) {
  auto t = simulate(1, 7);
  ASSERT_EQ(t.plays.size(), 2u);
  EXPECT_FALSE(t.plays[0].by_responder);
  EXPECT_TRUE(t.plays[1].by_responder);
  t.verify();
  ASSERT_EQ(t.final_report.size(), 1u);
  EXPECT_TRUE(t.final_report[0].ok);
}

TEST(Game, FiveRoundsSeed42) {
  auto t = simulate(5, 42);
  ASSERT_EQ(t.plays.size(), 10u);
  Rat prev(2);
  for (const auto& p : t.plays) {
    ASSERT_LT(p.ball.radius, prev);
    prev = p.ball.radius;
    if (p.params) ASSERT_GT(p.params->alpha, Rat(0));
  }
  auto scales = verify_limit_scales(t, 3);
  ASSERT_EQ(scales.size(), 5u);
  for (const auto& sc : scales) {
    ASSERT_TRUE(sc.ok);
    ASSERT_GT(sc.min_density, sc.alpha);
  }
}

TEST(Game, TranscriptsAreReproducible) {
  auto a = simulate(3, 99);
  auto b = simulate(3, 99);
  ASSERT_EQ(a.plays.size(), b.plays.size());
  for (size_t i = 0; i < a.plays.size(); i++) {
    ASSERT_EQ(a.plays[i].ball.radius, b.plays[i].ball.radius);
    ASSERT_TRUE(pointwise_equal(a.plays[i].ball.center, b.plays[i].ball.center));
    if (a.plays[i].params) {
      ASSERT_EQ(a.plays[i].params->alpha, b.plays[i].params->alpha);
      ASSERT_EQ(a.plays[i].params->delta, b.plays[i].params->delta);
    }
  }
}

TEST(Game, MonotoneShiftAdversary) {
  auto t = simulate(3, 5, AdversaryKind::monotone_shift);
  t.verify();
  for (const auto& sc : verify_limit_scales(t, 2)) ASSERT_TRUE(sc.ok);
}

TEST(Game, ResponderCenterIsNowhereMonotoneAtItsScale) {
  // the inserted copies create a decreasing piece inside every partition
  // interval of the final responder center
  auto t = simulate(2, 11);
  const auto& last = t.plays.back();
  ASSERT_TRUE(last.by_responder);
  for (const auto& J : last.params->partition)
    ASSERT_FALSE(strictly_increasing_on(last.ball.center, J));
}

TEST(Game, Preconditions) {
  EXPECT_THROW(simulate(0, 1), precondition_error);
  EXPECT_THROW(Ball(PLFunction::from_pairs({{Rat(0), Rat(0)}, {Rat(1), Rat(0)}}), Rat(0)),
               precondition_error);
  Ball off_domain(PLFunction::from_pairs({{Rat(0), Rat(0)}, {Rat(2), Rat(0)}}), Rat(1));
  EXPECT_THROW(p2_move(off_domain), precondition_error);
}

}  // namespace
}  // namespace exactpl
