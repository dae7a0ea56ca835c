#include <cmath>

#include <gtest/gtest.h>

#include "collabrec/errors.hpp"
#include "collabrec/simulator.hpp"
#include "collabrec/theory.hpp"

namespace collabrec {
namespace {

BoundInputs example_inputs() {
  BoundInputs in;
  in.n = 100;
  in.m = 8;
  in.k = 2;
  in.delta = 0.5;
  in.gamma = 0.0;
  in.alpha = 0.5;
  in.tolerance = 0.5;
  return in;
}

TEST(TLearn, WorkedExample) {
  // log(km/(delta tol)) = log 64; / delta^4 = / 0.0625; squared; plus (4/0.5)^2.
  const double first = std::pow(std::log(64.0) / 0.0625, 2.0);
  EXPECT_NEAR(first, 4428, 1);
  EXPECT_NEAR(t_learn(example_inputs()), first + 64.0, 1e-9);
  EXPECT_NEAR(t_learn(example_inputs()), 4492, 1);
}

TEST(TLearn, SmallAlphaLimitIsLinearInLog) {
  auto in = example_inputs();
  in.alpha = 1e-9;
  EXPECT_NEAR(t_learn_terms(in).clustering, std::log(64.0) / 0.0625, 1e-4);
  in.alpha = 0.5;
  const auto terms = t_learn_terms(in);
  EXPECT_DOUBLE_EQ(terms.clustering + terms.exploration, t_learn(in));
}

TEST(TLearn, Monotone) {
  auto in = example_inputs();
  const double base = t_learn(in);
  auto more_items = in;
  more_items.m *= 2;
  EXPECT_GT(t_learn(more_items), base);
  auto more_types = in;
  more_types.k = 4;
  EXPECT_GT(t_learn(more_types), base);
  auto tighter = in;
  tighter.tolerance = 0.1;
  EXPECT_GT(t_learn(tighter), base);
}

TEST(TLearn, RejectsOutOfRangeInputs) {
  auto in = example_inputs();
  in.gamma = 1.0;
  EXPECT_THROW(t_learn(in), DomainError);
  in = example_inputs();
  in.alpha = 0.6;
  EXPECT_THROW(t_learn(in), DomainError);
  in = example_inputs();
  in.tolerance = 1.0;
  EXPECT_THROW(t_learn(in), DomainError);
}

TEST(Beta, Examples) {
  const double t = std::pow(std::log(10.0) / 0.0625, 2.0);
  EXPECT_NEAR(beta(0.5, 0.0, t, 0.5), 0.1, 1e-12);
  EXPECT_NEAR(beta(0.5, 1.0 - 1e-9, 100.0, 0.5), 1.0, 1e-12);
  EXPECT_NEAR(beta(0.5, 0.0, 1e4, 0.5), std::exp(-6.25), 1e-15);
  EXPECT_NEAR(beta(0.5, 0.0, 1e4, 0.5), 1.93e-3, 5e-6);
  EXPECT_THROW(beta(0.5, 0.0, 0.5, 0.5), DomainError);
}

TEST(Beta, MonotoneInTimeAndMargin) {
  double previous = 1.0;
  for (double t = 1; t < 1e5; t *= 3) {
    const double b = beta(0.3, 0.2, t, 0.4);
    EXPECT_LE(b, previous);
    previous = b;
  }
  EXPECT_LE(beta(0.4, 0.2, 100, 0.4), beta(0.3, 0.2, 100, 0.4));
}

TEST(Bounds, ClosedForms) {
  EXPECT_NEAR(type_count_bound(200, 4), std::exp(-6.25), 1e-15);
  EXPECT_NEAR(type_count_bound(32, 4), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(joint_count_bound(100, 0.5), std::exp(-0.5), 1e-15);
  EXPECT_NEAR(three_sigma(0.25, 10000), 3 * std::sqrt(0.25 * 0.75 / 10000), 1e-15);
}

TEST(TypeCountCheck, PassesAcrossSeeds) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto check = type_count_check(200, 4, 20000, seed);
    EXPECT_TRUE(check.pass) << check.empirical << " vs " << check.bound;
    EXPECT_EQ(check.check, "lemma4");
  }
}

TEST(TypeCountCheck, SingleTypeNeverSmall) {
  const auto check = type_count_check(50, 1, 2000, 3);
  EXPECT_EQ(check.empirical, 0.0);
  EXPECT_TRUE(check.pass);
}

TEST(TypeCountCheck, BoundHoldsAtNEqualsEightK) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto check = type_count_check(32, 4, 20000, seed);
    EXPECT_NEAR(check.bound, 0.3679, 1e-4);
    EXPECT_TRUE(check.pass) << check.empirical;
  }
}

TEST(TypeCountCheck, ThreadCountDoesNotChangeResult) {
  const auto a = type_count_check(40, 4, 5000, 9, 1);
  const auto b = type_count_check(40, 4, 5000, 9, 4);
  EXPECT_EQ(a.empirical, b.empirical);
}

TEST(JointCountCheck, PassesAcrossSeeds) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto check = joint_count_check(100, 0.5, 5000, seed);
    EXPECT_NEAR(check.bound, 0.6065, 1e-4);
    EXPECT_TRUE(check.pass) << check.empirical;
    EXPECT_LT(check.empirical, 0.1);
  }
}

TEST(JointCountCheck, FirstStepAlwaysJoint) {
  const auto check = joint_count_check(1, 0.3, 1000, 1);
  EXPECT_EQ(check.empirical, 0.0);
}

TEST(JointCountCheck, LargestAlpha) {
  const auto check = joint_count_check(10000, 4.0 / 7.0, 200, 5);
  EXPECT_TRUE(check.pass);
}

TEST(JointCountCheck, JsonReport) {
  const auto doc = joint_count_check(20, 0.5, 1000, 1).to_json();
  for (const char* key : {"check", "inputs", "empirical", "bound", "slack", "pass"})
    EXPECT_TRUE(doc.contains(key)) << key;
}

TEST(GoodNeighborhood, Thresholds) {
  // n=100, k=2, delta=0.5, t=64, alpha=0.5, m=50.
  const auto pop = generate_population(2, 50, 100, 0.5, {Scheme::Noiseless, 0.5, true}, 1);
  const auto state = SessionState::create(100, 50, 1);
  AlgorithmParams p;
  p.alpha = 0.5;
  const auto stats = good_neighborhood_stats(state, 0, &pop, p, 64);
  EXPECT_DOUBLE_EQ(stats.good_threshold, 10.0);
  EXPECT_DOUBLE_EQ(stats.bad_threshold, 0.32);
  // Empty overlaps make everyone a neighbor, so the event fails.
  EXPECT_EQ(stats.n_good + stats.n_bad, 100u);
  EXPECT_FALSE(stats.event_holds);
}

TEST(GoodNeighborhood, SingleTypeHasNoBadNeighbors) {
  const auto pop = generate_population(1, 30, 20, 0.3, {Scheme::Symmetric}, 2);
  const auto env = Environment::synthetic(pop, 3);
  AlgorithmParams p;
  p.theta = 0.5;
  const CollaborativeGreedyPolicy cg(p);
  const auto result = run(env, cg, 20, 4);
  for (UserId u = 0; u < 20; ++u)
    EXPECT_EQ(good_neighborhood_stats(result.state, u, &pop, p, 20).n_bad, 0u);
}

TEST(GoodNeighborhood, ReplayIsUnsupported) {
  const auto state = SessionState::create(3, 3, 1);
  EXPECT_THROW(good_neighborhood_stats(state, 0, nullptr, AlgorithmParams{}, 1), UnsupportedModeError);
}

// Brute force on n=10, m=10: with deterministic ratings, growing the joint
// prefix never removes a same-type neighbor.
TEST(GoodNeighborhood, SameTypeNeighborsSurviveMoreJointSteps) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto pop = generate_population(2, 10, 10, 0.5, {Scheme::Noiseless}, seed);
    const auto env = Environment::synthetic(pop, seed);
    auto state = SessionState::create(10, 10, seed);
    AlgorithmParams p;
    p.theta = 0.5;
    std::size_t previous_good = 0;
    bool previous_event = false;
    for (std::size_t t = 1; t <= 10; ++t) {
      std::vector<ItemId> items(10);
      std::vector<Rating> ratings(10);
      for (UserId u = 0; u < 10; ++u) {
        items[u] = state.next_joint_item(u);
        ratings[u] = env.draw_rating(u, items[u]);
      }
      state.record_step(items, ratings, true);
      const auto stats = good_neighborhood_stats(state, 0, &pop, p, t);
      EXPECT_GE(stats.n_good, previous_good);
      previous_good = stats.n_good;
      if (previous_event && stats.bad_threshold >= 0) EXPECT_GE(stats.n_good, stats.good_threshold);
      previous_event = stats.event_holds;
    }
  }
}

TEST(GoodNeighborhood, MinTimeMatchesFormula) {
  BoundInputs in;
  in.n = 100;
  in.m = 2000;
  in.k = 2;
  in.delta = 0.5;
  in.gamma = 0.1;
  in.alpha = 0.1;
  const double expected =
      std::pow(2 * std::log(10.0 * 2 * 2000 * std::pow(100.0, 0.1) / 0.5) / (0.0625 * 0.81), 1 / 0.9);
  EXPECT_NEAR(good_neighborhood_min_time(in), expected, 1e-9);
}

TEST(GoodNeighborhood, CheckNotApplicableBelowPremise) {
  GoodNeighborhoodCheckInputs in;
  in.n = 20;
  in.m = 60;
  in.t = 30;
  in.trials = 2;
  const auto check = good_neighborhood_check(in, 1);
  EXPECT_FALSE(check.applicable);
  EXPECT_TRUE(check.pass);
}

TEST(GoodNeighborhood, CheckHoldsInsidePremise) {
  GoodNeighborhoodCheckInputs in;
  in.n = 40;
  in.m = 2500;
  in.t = 2500;
  in.trials = 2;
  const auto check = good_neighborhood_check(in, 3);
  EXPECT_TRUE(check.applicable);
  EXPECT_GT(check.bound, 0.0);
  EXPECT_TRUE(check.pass) << check.empirical << " vs " << check.bound;
}

}  // namespace
}  // namespace collabrec
