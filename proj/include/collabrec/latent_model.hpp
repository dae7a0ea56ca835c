#pragma once

// Latent source populations: k preference vectors over m items and a
// user -> type assignment for n users.

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace collabrec {

/// Like-probabilities p_i for one user type, one entry per item.
using PreferenceVector = std::vector<double>;

enum class Scheme { Noiseless, Symmetric, Biased };

std::string_view to_string(Scheme scheme);
Scheme parse_scheme(std::string_view text);

class Population {
 public:
  /// Validates entries in [0,1], type indices < k and delta > 0. With
  /// enforce_margin every entry must also satisfy |p - 1/2| >= delta.
  Population(std::vector<PreferenceVector> sources, std::vector<std::size_t> assignment,
             double delta, std::uint64_t seed, bool enforce_margin = false);

  std::size_t k() const { return sources_.size(); }
  std::size_t m() const { return sources_.empty() ? 0 : sources_.front().size(); }
  std::size_t n() const { return assignment_.size(); }
  double delta() const { return delta_; }
  std::uint64_t seed() const { return seed_; }

  const std::vector<PreferenceVector>& sources() const { return sources_; }
  const std::vector<std::size_t>& assignment() const { return assignment_; }

  std::size_t type_of(std::size_t user) const { return assignment_[user]; }
  double prob(std::size_t user, std::size_t item) const {
    return sources_[assignment_[user]][item];
  }
  bool likable(std::size_t user, std::size_t item) const { return prob(user, item) > 0.5; }

  /// Number of likable items for each type.
  std::vector<std::size_t> likable_counts() const;

 private:
  std::vector<PreferenceVector> sources_;
  std::vector<std::size_t> assignment_;
  double delta_;
  std::uint64_t seed_;
};

struct GenerationOptions {
  Scheme scheme = Scheme::Symmetric;
  double mu_target = 0.5;  // only shapes the Biased scheme
  bool balanced = false;   // user u gets type u % k instead of a uniform draw
};

/// Noiseless: entries are Bernoulli(1/2) in {0,1} and the population's
/// margin is 1/2 regardless of `delta`. Symmetric: 1/2 +- delta with equal
/// probability. Biased: 1/2 + delta with probability mu_target.
Population generate_population(std::size_t k, std::size_t m, std::size_t n, double delta,
                               const GenerationOptions& options, std::uint64_t seed);

bool check_no_ambiguous(const Population& pop, double delta);

/// Smallest gamma for which the incoherence condition holds:
/// max over source pairs of <2p_u - 1, 2p_v - 1> / (4 m delta^2). Zero when k = 1.
double compute_gamma_hat(const Population& pop);

/// Minimum over represented types of the fraction of entries > 1/2.
double compute_mu(const Population& pop);

struct ModelSummary {
  double mu = 0.0;
  double gamma_hat = 0.0;
  bool margin_ok = false;
};

ModelSummary summarize(const Population& pop);

/// Neighborhood threshold 2 delta^2 (1 + gamma_hat) for a known model.
double default_theta(const Population& pop);

nlohmann::json to_json(const Population& pop);
Population population_from_json(const nlohmann::json& doc);

}  // namespace collabrec
