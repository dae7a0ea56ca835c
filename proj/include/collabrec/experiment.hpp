#pragma once

// Batch experiment driver: policy x seed grids over one environment
// definition, per-run metric CSVs, cross-seed aggregates, and the
// (theta, alpha) sweep.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "collabrec/environment.hpp"
#include "collabrec/latent_model.hpp"
#include "collabrec/policies.hpp"

namespace collabrec {

/// Flat `key = value` text, '#' starts a comment. Duplicate keys are errors.
/// Errors carry "<source>:<line>:" prefixes.
class KeyValueFile {
 public:
  struct Entry {
    std::string value;
    std::size_t line;
  };

  static KeyValueFile parse(std::istream& in, std::string source);
  static KeyValueFile load(const std::filesystem::path& path);

  bool has(const std::string& key) const;
  std::optional<std::string> get(const std::string& key) const;
  std::size_t line_of(const std::string& key) const;
  const std::string& source() const { return source_; }
  std::vector<std::string> keys() const;

  /// ConfigError with the key's location prefixed.
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

 private:
  std::string source_;
  std::vector<std::pair<std::string, Entry>> entries_;
};

struct SyntheticSpec {
  std::size_t k = 2;
  std::size_t m = 100;
  std::size_t n = 100;
  double delta = 0.5;
  double mu = 0.5;
  Scheme scheme = Scheme::Symmetric;
  bool balanced = false;
};

struct ExperimentConfig {
  enum class EnvKind { Synthetic, Replay };

  EnvKind env_kind = EnvKind::Synthetic;
  SyntheticSpec synthetic;
  std::filesystem::path matrix;  // replay only, resolved against the config dir

  std::vector<PolicyKind> policies;
  std::optional<double> theta;  // nullopt: 2 delta^2 (1 + gamma_hat) per population
  double alpha = 0.5;
  std::optional<double> alpha_joint;
  bool exclude_empty_overlap = false;
  double popularity_epsilon = 0.05;
  std::size_t paf_friends = 10;
  double paf_epsilon = 0.05;

  std::size_t T = 100;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path output_dir = "out";
  int jobs = 1;

  /// Every setting that affects results, one `key=value` per line in a fixed
  /// order. output_dir and jobs are excluded.
  std::string canonical() const;
  /// FNV-1a 64 of canonical() (plus the replay matrix bytes), 16 hex digits.
  std::string hash() const;

  /// Item count of the environment (loads the manifest in replay mode).
  std::size_t item_count() const;

  /// Throws ConfigError for T > m, an empty seed list, etc.
  void validate() const;
};

ExperimentConfig parse_config(const KeyValueFile& kv, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Environment for one seed: population from (seed, Population), ratings
/// from (seed, Ratings). Replay ignores the seed.
Environment make_environment(const ExperimentConfig& config, std::uint64_t seed,
                             const std::shared_ptr<const RatingMatrix>& matrix = nullptr);

PolicyOptions make_policy_options(const ExperimentConfig& config, const Environment& env);

struct ExperimentOutputs {
  std::vector<std::filesystem::path> run_csvs;
  std::filesystem::path aggregate_csv;
  std::filesystem::path manifest;
};

/// For each (policy, seed): <policy>_seed<seed>.csv and .json; plus
/// aggregate.csv and manifest.json. Files are staged and only moved into
/// output_dir once everything succeeded.
ExperimentOutputs run_experiment(const ExperimentConfig& config);

/// Rebuilds aggregate.csv from the run files in `dir`. Throws ConfigError if
/// any run summary carries a different config hash.
std::filesystem::path aggregate_directory(const std::filesystem::path& dir,
                                          const std::string& config_hash);

/// Trapezoidal area of the curve (0, 0), (1, y_1), ..., (T, y_T).
double trapezoid_area(std::span<const double> values);

struct Grid {
  std::vector<double> thetas;
  std::vector<double> alphas;

  /// theta in {0.0, 0.1, ..., 1.0}, alpha in {0.1, ..., 0.5}.
  static Grid default_grid();
  std::size_t size() const { return thetas.size() * alphas.size(); }
};

/// Lists ("0.1, 0.2") or ranges ("0.0:1.0:0.1"); a missing key takes the
/// default axis.
Grid load_grid(const std::filesystem::path& path);
Grid parse_grid(const KeyValueFile& kv);

struct SweepCell {
  double theta = 0.0;
  double alpha = 0.0;
  double area = 0.0;
  std::optional<std::string> error;
};

struct SweepResult {
  std::vector<SweepCell> cells;  // sorted by (theta, alpha)
  std::optional<std::size_t> best;
};

/// Runs Collaborative-Greedy for every grid cell over the config's seeds and
/// ranks cells by the area under the seed-mean average cumulative reward
/// curve. Equal areas go to the lower (theta, alpha). A failing cell is
/// recorded and skipped. Writes sweep.csv and best.json to output_dir.
SweepResult sweep(const ExperimentConfig& config, const Grid& grid);

}  // namespace collabrec
