// collabrec: experiment driver for Collaborative-Greedy and its baselines.
//
//   collabrec simulate --config FILE
//   collabrec sweep --config FILE --grid FILE
//   collabrec check-bounds --which lemma4|lemma5|egood --params FILE
//   collabrec ingest --input FILE --format comma|double-colon --n-top N --m-top M --out DIR
//   collabrec population --config FILE
//
// --seed and --jobs are accepted by every subcommand.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "collabrec/data_ingest.hpp"
#include "collabrec/errors.hpp"
#include "collabrec/experiment.hpp"
#include "collabrec/theory.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace collabrec;

namespace {

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
};

ExperimentConfig load_with_overrides(const fs::path& path, const GlobalOptions& global) {
  ExperimentConfig config = load_config(path);
  if (global.seed) config.seeds = {*global.seed};
  if (global.jobs) config.jobs = *global.jobs;
  config.validate();
  return config;
}

int simulate(const fs::path& config_path, const GlobalOptions& global) {
  const auto config = load_with_overrides(config_path, global);
  const auto outputs = run_experiment(config);
  std::cout << "wrote " << outputs.run_csvs.size() << " runs, " << outputs.aggregate_csv.string()
            << " (config " << config.hash() << ")\n";
  return 0;
}

int run_sweep(const fs::path& config_path, const fs::path& grid_path, const GlobalOptions& global) {
  const auto config = load_with_overrides(config_path, global);
  const Grid grid = load_grid(grid_path);
  const auto result = sweep(config, grid);
  std::size_t failed = 0;
  for (const auto& cell : result.cells) failed += cell.error ? 1 : 0;
  std::cout << result.cells.size() << " cells, " << failed << " failed\n";
  if (result.best) {
    const auto& best = result.cells[*result.best];
    std::cout << "best theta=" << best.theta << " alpha=" << best.alpha << " area=" << best.area
              << '\n';
  }
  return result.best ? 0 : 1;
}

int check_bounds(const std::string& which, const std::optional<fs::path>& params_path,
                 const GlobalOptions& global) {
  std::istringstream no_params;
  const KeyValueFile kv =
      params_path ? KeyValueFile::load(*params_path) : KeyValueFile::parse(no_params, "<defaults>");
  auto number = [&](const std::string& key, double fallback) {
    const auto raw = kv.get(key);
    if (!raw) return fallback;
    try {
      return std::stod(*raw);
    } catch (const std::exception&) {
      kv.fail(key, "expected a number");
    }
  };
  auto count = [&](const std::string& key, double fallback) {
    return static_cast<std::size_t>(number(key, fallback));
  };
  const std::uint64_t seed = global.seed.value_or(count("seed", 1));
  const int jobs = global.jobs.value_or(static_cast<int>(count("jobs", 1)));

  BoundCheck check;
  if (which == "lemma4") {
    check = type_count_check(count("n", 200), count("k", 4), count("trials", 100000), seed, jobs);
  } else if (which == "lemma5") {
    check = joint_count_check(count("t", 100), number("alpha", 0.5), count("trials", 10000), seed,
                              jobs);
  } else if (which == "egood") {
    GoodNeighborhoodCheckInputs in;
    in.n = count("n", static_cast<double>(in.n));
    in.m = count("m", static_cast<double>(in.m));
    in.k = count("k", static_cast<double>(in.k));
    in.alpha = number("alpha", in.alpha);
    in.t = count("t", static_cast<double>(in.t));
    in.trials = count("trials", static_cast<double>(in.trials));
    check = good_neighborhood_check(in, seed, jobs);
  } else {
    throw ConfigError("--which must be lemma4, lemma5 or egood");
  }
  std::cout << check.to_json().dump(2) << '\n';
  return check.pass ? 0 : 1;
}

int ingest(const fs::path& input, const std::string& format, std::size_t n_top, std::size_t m_top,
           double threshold, const fs::path& out_dir) {
  const auto report = parse_ratings_csv(input, parse_triple_format(format));
  const auto sub = dense_submatrix(report.triples, n_top, m_top, threshold);
  const auto csv = write_matrix(sub.matrix, out_dir, threshold, file_hash(input));
  std::cout << "parsed " << report.triples.size() << " ratings (" << report.malformed
            << " malformed, " << sub.duplicates << " duplicates)\n"
            << "wrote " << csv.string() << ": " << sub.matrix.n() << " x " << sub.matrix.m()
            << ", density " << sub.matrix.density() << '\n';
  return 0;
}

int population(const fs::path& config_path, const GlobalOptions& global) {
  const auto config = load_with_overrides(config_path, global);
  if (config.env_kind != ExperimentConfig::EnvKind::Synthetic)
    throw ConfigError("population needs a synthetic environment");
  const Environment env = make_environment(config, config.seeds.front());
  std::cout << to_json(*env.population()).dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online collaborative filtering simulator"};
  app.require_subcommand(1);
  GlobalOptions global;
  std::uint64_t seed = 0;
  int jobs = 1;
  auto* seed_opt = app.add_option("--seed", seed, "Override the seed list with one seed");
  auto* jobs_opt = app.add_option("--jobs", jobs, "Parallel jobs")->check(CLI::PositiveNumber);
  seed_opt->configurable(false);
  app.fallthrough();

  fs::path config_path, grid_path, input_path, out_dir;
  std::optional<fs::path> params_path;
  std::string which, format = "comma";
  std::size_t n_top = 200, m_top = 500;
  double threshold = 4.0;

  auto* sim = app.add_subcommand("simulate", "Run every policy x seed and aggregate");
  sim->add_option("--config", config_path)->required()->check(CLI::ExistingFile);

  auto* sw = app.add_subcommand("sweep", "Grid-search theta and alpha");
  sw->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
  sw->add_option("--grid", grid_path)->required()->check(CLI::ExistingFile);

  auto* cb = app.add_subcommand("check-bounds", "Monte Carlo check of a tail bound");
  cb->add_option("--which", which)->required()->check(CLI::IsMember({"lemma4", "lemma5", "egood"}));
  cb->add_option("--params", params_path)->check(CLI::ExistingFile);

  auto* ing = app.add_subcommand("ingest", "Build a dense replay matrix from a rating dump");
  ing->add_option("--input", input_path)->required()->check(CLI::ExistingFile);
  ing->add_option("--format", format)->check(CLI::IsMember({"comma", "double-colon"}));
  ing->add_option("--n-top", n_top);
  ing->add_option("--m-top", m_top);
  ing->add_option("--threshold", threshold);
  ing->add_option("--out", out_dir)->required();

  auto* pop = app.add_subcommand("population", "Print the population of the first seed as JSON");
  pop->add_option("--config", config_path)->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  if (*seed_opt) global.seed = seed;
  if (*jobs_opt) global.jobs = jobs;

  try {
    if (*sim) return simulate(config_path, global);
    if (*sw) return run_sweep(config_path, grid_path, global);
    if (*cb) return check_bounds(which, params_path, global);
    if (*ing) return ingest(input_path, format, n_top, m_top, threshold, out_dir);
    if (*pop) return population(config_path, global);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
