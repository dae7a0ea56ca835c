#pragma once

// Closed-form quantities from the convergence analysis and Monte Carlo checks
// that the stated tail bounds hold.

#include <cstddef>
#include <cstdint>
#include <string>

#include "collabrec/collab_greedy.hpp"
#include "collabrec/latent_model.hpp"
#include "collabrec/session.hpp"
#include "json.hpp"

namespace collabrec {

struct BoundInputs {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t k = 1;
  double delta = 0.5;      // margin, in (0, 1/2]
  double gamma = 0.0;      // incoherence, in [0, 1)
  double alpha = 0.5;      // exploration decay, in (0, 4/7]
  double tolerance = 0.1;  // target failure probability, in (0, 1)
  double t = 1.0;
  double c1 = 1.0;  // constants hidden in the Theta(.) of the learning time
  double c2 = 1.0;

  /// Throws DomainError on any out-of-range field.
  void validate() const;
};

struct LearningTime {
  double clustering;   // time for cosine similarity to separate the types
  double exploration;  // time for the exploration rates to fall below tol/4
};

LearningTime t_learn_terms(const BoundInputs& in);

/// c1 (log(km/(delta tol)) / (delta^4 (1-gamma)^2))^(1/(1-alpha)) + c2 (4/tol)^(1/alpha).
/// Defined up to the constants c1, c2.
double t_learn(const BoundInputs& in);

/// exp(-delta^4 (1-gamma)^2 t^(1-alpha)). Throws DomainError for t < 1.
double beta(double delta, double gamma, double t, double alpha);

/// exp(-n / 8k): bound on P(a user's type has <= n/2k members).
double type_count_bound(std::size_t n, std::size_t k);

/// exp(-t^(1-alpha) / 20): bound on P(fewer than t^(1-alpha)/2 joint steps by t).
double joint_count_bound(double t, double alpha);

/// Smallest t for which the good-neighborhood probability bound is stated:
/// (2 log(10 k m n^alpha / delta) / (delta^4 (1-gamma)^2))^(1/(1-alpha)).
double good_neighborhood_min_time(const BoundInputs& in);

/// 1 - exp(-n/8k) - 12 exp(-delta^4 (1-gamma)^2 t^(1-alpha) / 20).
double good_neighborhood_bound(const BoundInputs& in);

struct BoundCheck {
  std::string check;
  nlohmann::json inputs;
  double empirical = 0.0;
  double bound = 0.0;
  double slack = 0.0;  // 3 binomial standard errors at the bound
  bool applicable = true;
  bool pass = false;

  nlohmann::json to_json() const;
};

/// 3 sqrt(p (1 - p) / trials).
double three_sigma(double p, std::size_t trials);

/// Fraction of trials (fresh uniform type assignments) in which user 0's type
/// has <= n/2k members; passes if <= bound + slack.
BoundCheck type_count_check(std::size_t n, std::size_t k, std::size_t trials, std::uint64_t seed,
                            int threads = 1);

/// Fraction of trials in which sum_{s<=t} Bernoulli(s^-alpha) < t^(1-alpha)/2;
/// passes if <= bound + slack.
BoundCheck joint_count_check(std::size_t t, double alpha, std::size_t trials, std::uint64_t seed,
                             int threads = 1);

struct GoodNeighborhoodStats {
  std::size_t n_good = 0;  // neighbors of the same type (u itself included)
  std::size_t n_bad = 0;   // neighbors of other types
  double good_threshold = 0.0;
  double bad_threshold = 0.0;
  bool event_holds = false;
};

/// Splits u's neighborhood by true type and tests n_good >= n/5k and
/// n_bad <= delta t n^(1-alpha) / (10 k m). Throws UnsupportedModeError when
/// `pop` is null (replay mode has no types).
GoodNeighborhoodStats good_neighborhood_stats(const SessionState& state, UserId u,
                                              const Population* pop,
                                              const AlgorithmParams& params, std::size_t t);

struct GoodNeighborhoodCheckInputs {
  std::size_t n = 100;
  std::size_t m = 3000;
  std::size_t k = 2;
  double alpha = 0.1;
  std::size_t t = 3000;
  std::size_t trials = 10;
};

/// Runs Collaborative-Greedy on fresh noiseless populations for t steps and
/// measures how often user 0's good-neighborhood event holds. Only applicable
/// (and only checked) when t is at least good_neighborhood_min_time and the
/// bound is positive; passes if empirical >= bound - slack.
BoundCheck good_neighborhood_check(const GoodNeighborhoodCheckInputs& in, std::uint64_t seed,
                                   int threads = 1);

}  // namespace collabrec
