#include "collabrec/theory.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <vector>

#include "collabrec/environment.hpp"
#include "collabrec/errors.hpp"
#include "collabrec/omp.hpp"
#include "collabrec/policies.hpp"
#include "collabrec/random.hpp"
#include "collabrec/simulator.hpp"

namespace collabrec {

void BoundInputs::validate() const {
  if (!(delta > 0.0 && delta <= 0.5)) throw DomainError("delta must lie in (0, 1/2]");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw DomainError("gamma must lie in [0, 1)");
  if (!(alpha > 0.0 && alpha <= kMaxAlpha)) throw DomainError("alpha must lie in (0, 4/7]");
  if (!(tolerance > 0.0 && tolerance < 1.0)) throw DomainError("tolerance must lie in (0, 1)");
  if (k == 0 || m == 0) throw DomainError("k and m must be positive");
  if (!(c1 > 0.0 && c2 > 0.0)) throw DomainError("constants must be positive");
}

LearningTime t_learn_terms(const BoundInputs& in) {
  in.validate();
  const double sep = std::pow(in.delta, 4) * (1.0 - in.gamma) * (1.0 - in.gamma);
  const double km = static_cast<double>(in.k) * static_cast<double>(in.m);
  const double clustering = std::log(km / (in.delta * in.tolerance)) / sep;
  return {in.c1 * std::pow(clustering, 1.0 / (1.0 - in.alpha)),
          in.c2 * std::pow(4.0 / in.tolerance, 1.0 / in.alpha)};
}

double t_learn(const BoundInputs& in) {
  const auto terms = t_learn_terms(in);
  return terms.clustering + terms.exploration;
}

double beta(double delta, double gamma, double t, double alpha) {
  if (t < 1.0) throw DomainError("beta needs t >= 1");
  return std::exp(-std::pow(delta, 4) * (1.0 - gamma) * (1.0 - gamma) * std::pow(t, 1.0 - alpha));
}

double type_count_bound(std::size_t n, std::size_t k) {
  return std::exp(-static_cast<double>(n) / (8.0 * static_cast<double>(k)));
}

double joint_count_bound(double t, double alpha) {
  return std::exp(-std::pow(t, 1.0 - alpha) / 20.0);
}

double good_neighborhood_min_time(const BoundInputs& in) {
  in.validate();
  const double sep = std::pow(in.delta, 4) * (1.0 - in.gamma) * (1.0 - in.gamma);
  const double arg = 10.0 * static_cast<double>(in.k) * static_cast<double>(in.m) *
                     std::pow(static_cast<double>(in.n), in.alpha) / in.delta;
  return std::pow(2.0 * std::log(arg) / sep, 1.0 / (1.0 - in.alpha));
}

double good_neighborhood_bound(const BoundInputs& in) {
  in.validate();
  const double sep = std::pow(in.delta, 4) * (1.0 - in.gamma) * (1.0 - in.gamma);
  return 1.0 - type_count_bound(in.n, in.k) -
         12.0 * std::exp(-sep * std::pow(in.t, 1.0 - in.alpha) / 20.0);
}

nlohmann::json BoundCheck::to_json() const {
  return {{"check", check},     {"inputs", inputs}, {"empirical", empirical},
          {"bound", bound},     {"slack", slack},   {"applicable", applicable},
          {"pass", pass}};
}

double three_sigma(double p, std::size_t trials) {
  return 3.0 * std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(trials));
}

BoundCheck type_count_check(std::size_t n, std::size_t k, std::size_t trials, std::uint64_t seed,
                            int threads) {
  if (n == 0 || k == 0 || trials == 0) throw ConfigError("n, k and trials must be positive");
  const double limit = static_cast<double>(n) / (2.0 * static_cast<double>(k));
  long long hits = 0;
#pragma omp parallel for schedule(static) reduction(+ : hits) num_threads(threads)
  for (std::size_t trial = 0; trial < trials; ++trial) {
    Rng rng(derive_seed(seed, Stream::Trial, trial));
    const std::size_t own = rng.index(k);
    std::size_t same = 1;
    for (std::size_t u = 1; u < n; ++u)
      if (rng.index(k) == own) ++same;
    if (static_cast<double>(same) <= limit) ++hits;
  }
  BoundCheck out;
  out.check = "lemma4";
  out.inputs = {{"n", n}, {"k", k}, {"trials", trials}, {"seed", seed}};
  out.empirical = static_cast<double>(hits) / static_cast<double>(trials);
  out.bound = type_count_bound(n, k);
  out.slack = three_sigma(out.bound, trials);
  out.pass = out.empirical <= out.bound + out.slack;
  return out;
}

BoundCheck joint_count_check(std::size_t t, double alpha, std::size_t trials, std::uint64_t seed,
                             int threads) {
  if (t == 0 || trials == 0) throw ConfigError("t and trials must be positive");
  if (!(alpha > 0.0 && alpha <= kMaxAlpha)) throw DomainError("alpha must lie in (0, 4/7]");
  std::vector<double> probs(t);
  for (std::size_t s = 1; s <= t; ++s) probs[s - 1] = epsilon_j(s, alpha);
  const double limit = std::pow(static_cast<double>(t), 1.0 - alpha) / 2.0;
  long long hits = 0;
#pragma omp parallel for schedule(static) reduction(+ : hits) num_threads(threads)
  for (std::size_t trial = 0; trial < trials; ++trial) {
    Rng rng(derive_seed(seed, Stream::Trial, trial));
    std::size_t joint = 0;
    for (double p : probs)
      if (rng.bernoulli(p)) ++joint;
    if (static_cast<double>(joint) < limit) ++hits;
  }
  BoundCheck out;
  out.check = "lemma5";
  out.inputs = {{"t", t}, {"alpha", alpha}, {"trials", trials}, {"seed", seed}};
  out.empirical = static_cast<double>(hits) / static_cast<double>(trials);
  out.bound = joint_count_bound(static_cast<double>(t), alpha);
  out.slack = three_sigma(out.bound, trials);
  out.pass = out.empirical <= out.bound + out.slack;
  return out;
}

GoodNeighborhoodStats good_neighborhood_stats(const SessionState& state, UserId u,
                                              const Population* pop,
                                              const AlgorithmParams& params, std::size_t t) {
  if (pop == nullptr)
    throw UnsupportedModeError("good-neighborhood statistics need ground-truth user types");
  if (pop->n() != state.n() || pop->m() != state.m())
    throw ConfigError("population does not match the session");
  GoodNeighborhoodStats stats;
  for (UserId v : neighborhood(state, u, params.theta, params.exclude_empty_overlap)) {
    if (pop->type_of(v) == pop->type_of(u))
      ++stats.n_good;
    else
      ++stats.n_bad;
  }
  const double n = static_cast<double>(pop->n());
  const double k = static_cast<double>(pop->k());
  const double m = static_cast<double>(pop->m());
  stats.good_threshold = n / (5.0 * k);
  stats.bad_threshold =
      pop->delta() * static_cast<double>(t) * std::pow(n, 1.0 - params.alpha) / (10.0 * k * m);
  stats.event_holds = static_cast<double>(stats.n_good) >= stats.good_threshold &&
                      static_cast<double>(stats.n_bad) <= stats.bad_threshold;
  return stats;
}

BoundCheck good_neighborhood_check(const GoodNeighborhoodCheckInputs& in, std::uint64_t seed,
                                   int threads) {
  if (in.trials == 0 || in.t == 0) throw ConfigError("t and trials must be positive");
  if (in.t > in.m) throw ConfigError("t must not exceed m");

  std::vector<Population> pops;
  pops.reserve(in.trials);
  double gamma = 0.0;
  for (std::size_t trial = 0; trial < in.trials; ++trial) {
    pops.push_back(generate_population(in.k, in.m, in.n, 0.5, {Scheme::Noiseless},
                                       derive_seed(seed, Stream::Trial, trial, Stream::Population)));
    gamma = std::max(gamma, compute_gamma_hat(pops.back()));
  }

  BoundInputs bound_in;
  bound_in.n = in.n;
  bound_in.m = in.m;
  bound_in.k = in.k;
  bound_in.delta = 0.5;
  bound_in.gamma = gamma;
  bound_in.alpha = in.alpha;
  bound_in.t = static_cast<double>(in.t);

  BoundCheck out;
  out.check = "egood";
  out.bound = good_neighborhood_bound(bound_in);
  out.slack = three_sigma(std::clamp(out.bound, 0.0, 1.0), in.trials);
  const double min_time = good_neighborhood_min_time(bound_in);
  out.inputs = {{"n", in.n},         {"m", in.m},         {"k", in.k},
                {"alpha", in.alpha}, {"t", in.t},         {"trials", in.trials},
                {"seed", seed},      {"gamma", gamma},    {"min_time", min_time}};
  out.applicable = static_cast<double>(in.t) >= min_time && out.bound > 0.0;

  long long holds = 0;
  std::vector<std::exception_ptr> errors(in.trials);
#pragma omp parallel for schedule(dynamic, 1) reduction(+ : holds) num_threads(threads)
  for (std::size_t trial = 0; trial < in.trials; ++trial) {
    try {
      const auto& pop = pops[trial];
      AlgorithmParams params;
      params.alpha = in.alpha;
      params.theta = std::clamp(default_theta(pop), 0.0, 1.0);
      const auto env = Environment::synthetic(pop, derive_seed(seed, Stream::Trial, trial,
                                                               Stream::Ratings));
      const CollaborativeGreedyPolicy policy(params);
      const auto result = run(env, policy, in.t, derive_seed(seed, Stream::Trial, trial), 1);
      if (good_neighborhood_stats(result.state, 0, &pop, params, in.t).event_holds) ++holds;
    } catch (...) {
      errors[trial] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  out.empirical = static_cast<double>(holds) / static_cast<double>(in.trials);
  out.pass = !out.applicable || out.empirical >= out.bound - out.slack;
  return out;
}

}  // namespace collabrec
