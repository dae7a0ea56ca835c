#include "collabrec/latent_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "collabrec/errors.hpp"
#include "collabrec/random.hpp"

namespace collabrec {

namespace {
// 1/2 - delta is not exact in binary; margins are compared up to rounding.
constexpr double kMarginSlack = 1e-12;
}  // namespace

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Noiseless: return "noiseless";
    case Scheme::Symmetric: return "symmetric";
    case Scheme::Biased: return "biased";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view text) {
  if (text == "noiseless") return Scheme::Noiseless;
  if (text == "symmetric") return Scheme::Symmetric;
  if (text == "biased") return Scheme::Biased;
  throw ConfigError("unknown scheme '" + std::string(text) + "'");
}

Population::Population(std::vector<PreferenceVector> sources, std::vector<std::size_t> assignment,
                       double delta, std::uint64_t seed, bool enforce_margin)
    : sources_(std::move(sources)), assignment_(std::move(assignment)), delta_(delta),
      seed_(seed) {
  if (sources_.empty()) throw ConfigError("population needs at least one source");
  if (!(delta_ > 0.0 && delta_ <= 0.5)) throw DomainError("delta must lie in (0, 1/2]");
  const std::size_t items = sources_.front().size();
  if (items == 0) throw ConfigError("population needs at least one item");
  for (const auto& source : sources_) {
    if (source.size() != items) throw ConfigError("sources differ in length");
    for (double p : source) {
      if (!(p >= 0.0 && p <= 1.0)) throw DomainError("preference entries must lie in [0,1]");
      if (enforce_margin && std::abs(p - 0.5) < delta_ - kMarginSlack)
        throw DomainError("entry violates the no-ambiguous-items margin");
    }
  }
  for (std::size_t type : assignment_)
    if (type >= sources_.size()) throw ConfigError("type index out of range");
}

std::vector<std::size_t> Population::likable_counts() const {
  std::vector<std::size_t> counts;
  counts.reserve(k());
  for (const auto& source : sources_)
    counts.push_back(static_cast<std::size_t>(
        std::count_if(source.begin(), source.end(), [](double p) { return p > 0.5; })));
  return counts;
}

Population generate_population(std::size_t k, std::size_t m, std::size_t n, double delta,
                               const GenerationOptions& options, std::uint64_t seed) {
  if (k == 0 || m == 0) throw ConfigError("k and m must be positive");
  if (k > n) throw ConfigError("k must not exceed n");
  if (!(delta > 0.0 && delta <= 0.5)) throw DomainError("delta must lie in (0, 1/2]");
  if (!(options.mu_target > 0.0 && options.mu_target <= 0.5))
    throw DomainError("mu_target must lie in (0, 1/2]");

  Rng rng(seed);
  const double margin = options.scheme == Scheme::Noiseless ? 0.5 : delta;
  const double like_prob = options.scheme == Scheme::Biased ? options.mu_target : 0.5;

  std::vector<PreferenceVector> sources(k, PreferenceVector(m));
  for (auto& source : sources)
    for (auto& p : source) p = rng.bernoulli(like_prob) ? 0.5 + margin : 0.5 - margin;

  std::vector<std::size_t> assignment(n);
  for (std::size_t u = 0; u < n; ++u) assignment[u] = options.balanced ? u % k : rng.index(k);

  return Population(std::move(sources), std::move(assignment), margin, seed, true);
}

bool check_no_ambiguous(const Population& pop, double delta) {
  for (const auto& source : pop.sources())
    for (double p : source)
      if (std::abs(p - 0.5) < delta - kMarginSlack) return false;
  return true;
}

double compute_gamma_hat(const Population& pop) {
  if (pop.delta() <= 0.0) throw DomainError("gamma_hat needs delta > 0");
  if (pop.k() < 2) return 0.0;
  const auto& sources = pop.sources();
  const double scale = 4.0 * pop.delta() * pop.delta() * static_cast<double>(pop.m());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < sources.size(); ++a) {
    for (std::size_t b = a + 1; b < sources.size(); ++b) {
      double dot = 0.0;
      for (std::size_t i = 0; i < pop.m(); ++i)
        dot += (2.0 * sources[a][i] - 1.0) * (2.0 * sources[b][i] - 1.0);
      best = std::max(best, dot / scale);
    }
  }
  return best;
}

double compute_mu(const Population& pop) {
  std::vector<bool> represented(pop.k(), false);
  for (std::size_t type : pop.assignment()) represented[type] = true;
  const auto counts = pop.likable_counts();
  double mu = 1.0;
  bool any = false;
  for (std::size_t type = 0; type < pop.k(); ++type) {
    if (!represented[type]) continue;
    any = true;
    mu = std::min(mu, static_cast<double>(counts[type]) / static_cast<double>(pop.m()));
  }
  return any ? mu : 0.0;
}

ModelSummary summarize(const Population& pop) {
  return {compute_mu(pop), compute_gamma_hat(pop), check_no_ambiguous(pop, pop.delta())};
}

double default_theta(const Population& pop) {
  return 2.0 * pop.delta() * pop.delta() * (1.0 + compute_gamma_hat(pop));
}

nlohmann::json to_json(const Population& pop) {
  return {{"k", pop.k()},           {"m", pop.m()},
          {"n", pop.n()},           {"delta", pop.delta()},
          {"sources", pop.sources()}, {"assignment", pop.assignment()},
          {"seed", pop.seed()}};
}

Population population_from_json(const nlohmann::json& doc) {
  try {
    Population pop(doc.at("sources").get<std::vector<PreferenceVector>>(),
                   doc.at("assignment").get<std::vector<std::size_t>>(),
                   doc.at("delta").get<double>(), doc.at("seed").get<std::uint64_t>());
    if (pop.k() != doc.at("k").get<std::size_t>() || pop.m() != doc.at("m").get<std::size_t>() ||
        pop.n() != doc.at("n").get<std::size_t>())
      throw FormatError("population document: k/m/n disagree with sources/assignment");
    return pop;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("population document: ") + e.what());
  }
}

}  // namespace collabrec
