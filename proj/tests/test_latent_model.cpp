#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "collabrec/errors.hpp"
#include "collabrec/latent_model.hpp"

namespace collabrec {
namespace {

Population make(std::vector<PreferenceVector> sources, double delta,
                std::vector<std::size_t> assignment = {}) {
  if (assignment.empty()) {
    assignment.resize(sources.size());
    std::iota(assignment.begin(), assignment.end(), std::size_t{0});
  }
  return Population(std::move(sources), std::move(assignment), delta, 0);
}

TEST(GeneratePopulation, SingleTypeNoiseless) {
  const auto pop = generate_population(1, 4, 2, 0.5, {Scheme::Noiseless}, 7);
  EXPECT_EQ(pop.type_of(0), pop.type_of(1));
  for (double p : pop.sources()[0]) EXPECT_TRUE(p == 0.0 || p == 1.0);
  EXPECT_EQ(pop.delta(), 0.5);
}

TEST(GeneratePopulation, SymmetricTakesTwoValues) {
  const auto pop = generate_population(2, 8, 4, 0.3, {Scheme::Symmetric}, 3);
  for (const auto& source : pop.sources())
    for (double p : source)
      EXPECT_TRUE(std::abs(p - 0.2) < 1e-12 || std::abs(p - 0.8) < 1e-12) << p;
}

TEST(GeneratePopulation, BiasedLikableFractionConcentrates) {
  const auto pop = generate_population(2, 10000, 2, 0.25, {Scheme::Biased, 0.3}, 1);
  for (const auto& source : pop.sources()) {
    const auto likable = std::count_if(source.begin(), source.end(), [](double p) { return p > 0.5; });
    EXPECT_NEAR(static_cast<double>(likable) / 10000.0, 0.3, 0.02);
  }
}

TEST(GeneratePopulation, Deterministic) {
  const GenerationOptions opts{Scheme::Biased, 0.4};
  const auto a = generate_population(3, 50, 20, 0.2, opts, 99);
  const auto b = generate_population(3, 50, 20, 0.2, opts, 99);
  EXPECT_EQ(a.sources(), b.sources());
  EXPECT_EQ(a.assignment(), b.assignment());
  const auto c = generate_population(3, 50, 20, 0.2, opts, 100);
  EXPECT_NE(a.sources(), c.sources());
}

TEST(GeneratePopulation, BalancedAssignment) {
  GenerationOptions opts;
  opts.balanced = true;
  const auto pop = generate_population(3, 5, 7, 0.4, opts, 1);
  for (std::size_t u = 0; u < 7; ++u) EXPECT_EQ(pop.type_of(u), u % 3);
}

TEST(GeneratePopulation, RejectsBadParameters) {
  EXPECT_THROW(generate_population(2, 5, 5, 0.0, {}, 1), DomainError);
  EXPECT_THROW(generate_population(2, 5, 5, 0.6, {}, 1), DomainError);
  EXPECT_THROW(generate_population(2, 5, 5, 0.3, {Scheme::Biased, 0.0}, 1), DomainError);
  EXPECT_THROW(generate_population(2, 5, 5, 0.3, {Scheme::Biased, 0.7}, 1), DomainError);
  EXPECT_THROW(generate_population(6, 5, 5, 0.3, {}, 1), ConfigError);
}

TEST(GeneratePopulation, NoiselessAlwaysHasFullMargin) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto pop = generate_population(3, 40, 10, 0.1, {Scheme::Noiseless}, seed);
    EXPECT_TRUE(check_no_ambiguous(pop, 0.5));
  }
}

TEST(NoAmbiguous, Examples) {
  EXPECT_TRUE(check_no_ambiguous(make({{0.2, 0.8}}, 0.3), 0.3));
  EXPECT_FALSE(check_no_ambiguous(make({{0.5}}, 0.1), 1e-9));
  EXPECT_FALSE(check_no_ambiguous(make({{0.55, 0.9}}, 0.05), 0.1));
}

TEST(Population, EnforcedMarginRejectsAmbiguousEntries) {
  EXPECT_THROW(Population({{0.55, 0.9}}, {0}, 0.1, 0, true), DomainError);
  EXPECT_NO_THROW(Population({{0.2, 0.9}}, {0}, 0.3, 0, true));
  EXPECT_THROW(Population({{0.2}}, {1}, 0.3, 0), ConfigError);
  EXPECT_THROW(Population({{1.2}}, {0}, 0.3, 0), DomainError);
  EXPECT_THROW(Population({{0.2}}, {0}, 0.0, 0), DomainError);
}

TEST(GammaHat, OrthogonalSourcesGiveZero) {
  const auto pop = make({{.75, .75, .25, .25}, {.75, .25, .75, .25}}, 0.25);
  EXPECT_DOUBLE_EQ(compute_gamma_hat(pop), 0.0);
}

TEST(GammaHat, DuplicateAndAntiAlignedSources) {
  const PreferenceVector p = {0.8, 0.2, 0.2, 0.8, 0.8};
  PreferenceVector flipped(p.size());
  std::transform(p.begin(), p.end(), flipped.begin(), [](double x) { return 1.0 - x; });
  EXPECT_NEAR(compute_gamma_hat(make({p, p}, 0.3)), 1.0, 1e-12);
  EXPECT_NEAR(compute_gamma_hat(make({p, flipped}, 0.3)), -1.0, 1e-12);
}

TEST(GammaHat, SingleTypeIsZero) {
  EXPECT_EQ(compute_gamma_hat(make({{0.9, 0.1}}, 0.4)), 0.0);
}

TEST(GammaHat, InvariantUnderSourceAndItemPermutations) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pop = generate_population(4, 30, 8, 0.3, {Scheme::Symmetric}, 1000 + trial);
    const double base = compute_gamma_hat(pop);

    auto sources = pop.sources();
    std::shuffle(sources.begin(), sources.end(), rng);
    std::vector<std::size_t> items(pop.m());
    std::iota(items.begin(), items.end(), std::size_t{0});
    std::shuffle(items.begin(), items.end(), rng);
    for (auto& source : sources) {
      PreferenceVector permuted(source.size());
      for (std::size_t i = 0; i < items.size(); ++i) permuted[i] = source[items[i]];
      source = permuted;
    }
    EXPECT_NEAR(compute_gamma_hat(make(sources, pop.delta())), base, 1e-12);
  }
}

TEST(GammaHat, SymmetricSchemeScalesLikeSqrtLogMOverM) {
  const double m = 1000;
  const double tol = 5.0 * std::sqrt(std::log(m) / m);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto pop = generate_population(2, 1000, 2, 0.3, {Scheme::Symmetric, 0.5, true}, seed);
    EXPECT_LE(std::abs(compute_gamma_hat(pop)), tol);
  }
}

TEST(GammaHat, BiasedSchemeConcentratesNearSquaredBias) {
  const double m = 1000;
  const double tol = 5.0 * std::sqrt(std::log(m) / m);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto pop = generate_population(2, 1000, 2, 0.3, {Scheme::Biased, 0.3, true}, seed);
    EXPECT_NEAR(compute_gamma_hat(pop), 0.16, tol);
  }
}

TEST(Mu, Examples) {
  EXPECT_DOUBLE_EQ(compute_mu(make({{0.8, 0.8, 0.2, 0.2}}, 0.3)), 0.5);
  EXPECT_DOUBLE_EQ(compute_mu(make({{0.8, 0.2, 0.2, 0.2}, {0.8, 0.8, 0.8, 0.2}}, 0.3)), 0.25);
  EXPECT_DOUBLE_EQ(compute_mu(make({{0.1, 0.2}}, 0.3)), 0.0);
}

TEST(Mu, IgnoresUnrepresentedTypes) {
  const auto pop = make({{0.8, 0.2, 0.2, 0.2}, {0.8, 0.8, 0.8, 0.2}}, 0.3, {1, 1});
  EXPECT_DOUBLE_EQ(compute_mu(pop), 0.75);
}

TEST(Mu, ExactlyHalfIsNotLikable) {
  EXPECT_DOUBLE_EQ(compute_mu(make({{0.5, 0.9}}, 0.01)), 0.5);
}

TEST(Summary, DefaultThetaUsesGammaHat) {
  const auto pop = make({{.75, .75, .25, .25}, {.75, .25, .75, .25}}, 0.25);
  EXPECT_DOUBLE_EQ(default_theta(pop), 2 * 0.25 * 0.25);
  const auto s = summarize(pop);
  EXPECT_TRUE(s.margin_ok);
  EXPECT_DOUBLE_EQ(s.mu, 0.5);
}

TEST(PopulationJson, RoundTrip) {
  const auto pop = generate_population(3, 12, 9, 0.2, {Scheme::Biased, 0.25}, 42);
  const auto doc = to_json(pop);
  EXPECT_EQ(doc.at("k"), 3);
  EXPECT_EQ(doc.at("m"), 12);
  EXPECT_EQ(doc.at("n"), 9);
  const auto back = population_from_json(nlohmann::json::parse(doc.dump()));
  EXPECT_EQ(back.sources(), pop.sources());
  EXPECT_EQ(back.assignment(), pop.assignment());
  EXPECT_EQ(back.seed(), 42u);

  auto bad = doc;
  bad["k"] = 4;
  EXPECT_THROW(population_from_json(bad), FormatError);
}

}  // namespace
}  // namespace collabrec
