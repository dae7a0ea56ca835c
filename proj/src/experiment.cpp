#include "collabrec/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "collabrec/data_ingest.hpp"
#include "collabrec/errors.hpp"
#include "collabrec/omp.hpp"
#include "collabrec/simulator.hpp"
#include "json.hpp"

namespace collabrec {
namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ','))
    if (auto t = trim(item); !t.empty()) out.push_back(std::move(t));
  return out;
}

template <class T>
std::optional<T> parse_number(const std::string& text) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t hash = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string num(double v) { return fmt::format("{}", v); }

// Typed accessors that report the offending config line.
struct Reader {
  const KeyValueFile& kv;

  template <class T>
  T number(const std::string& key, T fallback) const {
    const auto raw = kv.get(key);
    if (!raw) return fallback;
    const auto value = parse_number<T>(*raw);
    if (!value) kv.fail(key, "expected a number, got '" + *raw + "'");
    return *value;
  }
  template <class T>
  T required_number(const std::string& key) const {
    if (!kv.has(key)) throw ConfigError(kv.source() + ": missing required key '" + key + "'");
    return number<T>(key, T{});
  }
  bool boolean(const std::string& key, bool fallback) const {
    const auto raw = kv.get(key);
    if (!raw) return fallback;
    if (*raw == "true" || *raw == "1" || *raw == "yes") return true;
    if (*raw == "false" || *raw == "0" || *raw == "no") return false;
    kv.fail(key, "expected true or false, got '" + *raw + "'");
  }
  std::string required(const std::string& key) const {
    auto raw = kv.get(key);
    if (!raw || raw->empty())
      throw ConfigError(kv.source() + ": missing required key '" + key + "'");
    return *raw;
  }
};

std::vector<double> parse_axis(const KeyValueFile& kv, const std::string& key,
                               std::vector<double> fallback) {
  const auto raw = kv.get(key);
  if (!raw) return fallback;
  std::vector<double> values;
  if (raw->find(':') != std::string::npos) {
    std::stringstream in(*raw);
    std::string part;
    std::vector<double> bounds;
    while (std::getline(in, part, ':')) {
      const auto v = parse_number<double>(trim(part));
      if (!v) kv.fail(key, "bad range '" + *raw + "'");
      bounds.push_back(*v);
    }
    if (bounds.size() != 3 || bounds[2] <= 0.0 || bounds[1] < bounds[0])
      kv.fail(key, "range must be start:stop:step with step > 0");
    const auto count = static_cast<std::size_t>(std::floor((bounds[1] - bounds[0]) / bounds[2] + 1e-9));
    for (std::size_t j = 0; j <= count; ++j)
      values.push_back(std::round((bounds[0] + static_cast<double>(j) * bounds[2]) * 1e9) / 1e9);
  } else {
    for (const auto& item : split_list(*raw)) {
      const auto v = parse_number<double>(item);
      if (!v) kv.fail(key, "bad value '" + item + "'");
      values.push_back(*v);
    }
  }
  if (values.empty()) kv.fail(key, "axis is empty");
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

std::string run_stem(PolicyKind policy, std::uint64_t seed) {
  return fmt::format("{}_seed{}", to_string(policy), seed);
}

nlohmann::json params_json(const ExperimentConfig& config, const PolicyOptions& options,
                           PolicyKind policy) {
  switch (policy) {
    case PolicyKind::CollaborativeGreedy: {
      nlohmann::json j = {{"theta", options.greedy.theta},
                          {"alpha", options.greedy.alpha},
                          {"exclude_empty_overlap", options.greedy.exclude_empty_overlap}};
      if (options.greedy.alpha_joint) j["alpha_joint"] = *options.greedy.alpha_joint;
      j["theta_source"] = config.theta ? "config" : "auto";
      return j;
    }
    case PolicyKind::GlobalPopularity: return {{"epsilon", options.popularity_epsilon}};
    case PolicyKind::PafLite: return {{"W", options.paf_friends}, {"epsilon", options.paf_epsilon}};
    default: return nlohmann::json::object();
  }
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << contents;
  if (!out) throw IoError("write failed for " + path.string());
}

// Column values of a run CSV written by MetricsSeries::write_csv.
struct RunColumns {
  std::vector<double> sum_reward, sum_likable, cum_reward, cum_likable;
};

RunColumns read_run_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  RunColumns cols;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream row(line);
    std::string f;
    while (std::getline(row, f, ',')) fields.push_back(f);
    if (fields.size() != 6) throw FormatError("bad run row in " + path.string());
    auto as_double = [&](const std::string& s) {
      const auto v = parse_number<long long>(s);
      if (!v) throw FormatError("bad number in " + path.string());
      return static_cast<double>(*v);
    };
    cols.sum_reward.push_back(as_double(fields[2]));
    cols.sum_likable.push_back(as_double(fields[3]));
    cols.cum_reward.push_back(as_double(fields[4]));
    cols.cum_likable.push_back(as_double(fields[5]));
  }
  return cols;
}

std::pair<double, double> mean_sd(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

// Runs fn(job) for every job index, `jobs` at a time; rethrows the first error.
template <class Fn>
void run_jobs(std::size_t count, int jobs, Fn&& fn) {
  std::vector<std::exception_ptr> errors(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
  for (std::size_t j = 0; j < count; ++j) {
    try {
      fn(j);
    } catch (...) {
      errors[j] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

KeyValueFile KeyValueFile::parse(std::istream& in, std::string source) {
  KeyValueFile kv;
  kv.source_ = std::move(source);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(fmt::format("{}:{}: expected 'key = value'", kv.source_, line_no));
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(fmt::format("{}:{}: empty key", kv.source_, line_no));
    if (kv.has(key))
      throw ConfigError(fmt::format("{}:{}: duplicate key '{}'", kv.source_, line_no, key));
    kv.entries_.push_back({std::move(key), {trim(line.substr(eq + 1)), line_no}});
  }
  return kv;
}

KeyValueFile KeyValueFile::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse(in, path.string());
}

bool KeyValueFile::has(const std::string& key) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first == key; });
}

std::optional<std::string> KeyValueFile::get(const std::string& key) const {
  for (const auto& [k, entry] : entries_)
    if (k == key) return entry.value;
  return std::nullopt;
}

std::size_t KeyValueFile::line_of(const std::string& key) const {
  for (const auto& [k, entry] : entries_)
    if (k == key) return entry.line;
  return 0;
}

std::vector<std::string> KeyValueFile::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, entry] : entries_) out.push_back(k);
  return out;
}

void KeyValueFile::fail(const std::string& key, const std::string& message) const {
  throw ConfigError(fmt::format("{}:{}: {}: {}", source_, line_of(key), key, message));
}

ExperimentConfig parse_config(const KeyValueFile& kv, const fs::path& base_dir) {
  static const std::set<std::string> known = {
      "environment",     "synthetic.k",      "synthetic.m",
      "synthetic.n",     "synthetic.delta",  "synthetic.mu",
      "synthetic.scheme", "synthetic.balanced", "replay.matrix",
      "policies",        "theta",            "alpha",
      "alpha_joint",     "exclude_empty_overlap", "global_popularity.epsilon",
      "paf.W",           "paf.epsilon",      "T",
      "seeds",           "output_dir",       "jobs"};
  for (const auto& key : kv.keys())
    if (!known.contains(key)) kv.fail(key, "unknown key");

  const Reader r{kv};
  ExperimentConfig c;
  const std::string env = r.required("environment");
  if (env == "synthetic") {
    c.env_kind = ExperimentConfig::EnvKind::Synthetic;
    c.synthetic.k = r.required_number<std::size_t>("synthetic.k");
    c.synthetic.m = r.required_number<std::size_t>("synthetic.m");
    c.synthetic.n = r.required_number<std::size_t>("synthetic.n");
    c.synthetic.delta = r.number<double>("synthetic.delta", 0.5);
    c.synthetic.mu = r.number<double>("synthetic.mu", 0.5);
    if (const auto scheme = kv.get("synthetic.scheme")) {
      try {
        c.synthetic.scheme = parse_scheme(*scheme);
      } catch (const ConfigError& e) {
        kv.fail("synthetic.scheme", e.what());
      }
    }
    c.synthetic.balanced = r.boolean("synthetic.balanced", false);
  } else if (env == "replay") {
    c.env_kind = ExperimentConfig::EnvKind::Replay;
    c.matrix = base_dir / r.required("replay.matrix");
  } else {
    kv.fail("environment", "expected synthetic or replay");
  }

  for (const auto& name : split_list(r.required("policies"))) {
    try {
      c.policies.push_back(parse_policy_kind(name));
    } catch (const ConfigError& e) {
      kv.fail("policies", e.what());
    }
  }
  if (c.policies.empty()) kv.fail("policies", "no policy listed");

  if (const auto theta = kv.get("theta"); theta && *theta != "auto") {
    const auto v = parse_number<double>(*theta);
    if (!v) kv.fail("theta", "expected a number or 'auto'");
    c.theta = *v;
  }
  c.alpha = r.number<double>("alpha", 0.5);
  if (kv.has("alpha_joint")) c.alpha_joint = r.number<double>("alpha_joint", 0.5);
  c.exclude_empty_overlap = r.boolean("exclude_empty_overlap", false);
  c.popularity_epsilon = r.number<double>("global_popularity.epsilon", 0.05);
  c.paf_friends = r.number<std::size_t>("paf.W", 10);
  c.paf_epsilon = r.number<double>("paf.epsilon", 0.05);

  c.T = r.required_number<std::size_t>("T");
  for (const auto& item : split_list(r.required("seeds"))) {
    const auto v = parse_number<std::uint64_t>(item);
    if (!v) kv.fail("seeds", "bad seed '" + item + "'");
    c.seeds.push_back(*v);
  }
  c.output_dir = base_dir / kv.get("output_dir").value_or("out");
  c.jobs = r.number<int>("jobs", 1);

  try {
    c.validate();
    AlgorithmParams probe{c.theta.value_or(0.5), c.alpha, c.alpha_joint, c.exclude_empty_overlap};
    probe.validate();
  } catch (const std::exception& e) {
    throw ConfigError(kv.source() + ": " + e.what());
  }
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  return parse_config(KeyValueFile::load(path), path.parent_path());
}

std::size_t ExperimentConfig::item_count() const {
  if (env_kind == EnvKind::Synthetic) return synthetic.m;
  std::ifstream in(manifest_path_for(matrix));
  if (!in) throw ConfigError("cannot open matrix manifest for " + matrix.string());
  try {
    return nlohmann::json::parse(in).at("m").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("matrix manifest: ") + e.what());
  }
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw ConfigError("seed list is empty");
  if (policies.empty()) throw ConfigError("no policy listed");
  if (T == 0) throw ConfigError("T must be positive");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  if (env_kind == EnvKind::Synthetic) {
    if (synthetic.k == 0 || synthetic.m == 0 || synthetic.n == 0)
      throw ConfigError("synthetic k, m, n must be positive");
    if (synthetic.k > synthetic.n) throw ConfigError("synthetic.k must not exceed synthetic.n");
  } else if (!theta) {
    throw ConfigError("theta = auto needs a synthetic environment");
  }
  const std::size_t m = item_count();
  if (T > m) throw ConfigError(fmt::format("T={} exceeds the number of items m={}", T, m));
}

std::string ExperimentConfig::canonical() const {
  std::string out;
  auto line = [&](std::string_view key, const std::string& value) {
    out += fmt::format("{}={}\n", key, value);
  };
  if (env_kind == EnvKind::Synthetic) {
    line("environment", "synthetic");
    line("synthetic.k", std::to_string(synthetic.k));
    line("synthetic.m", std::to_string(synthetic.m));
    line("synthetic.n", std::to_string(synthetic.n));
    line("synthetic.delta", num(synthetic.delta));
    line("synthetic.mu", num(synthetic.mu));
    line("synthetic.scheme", std::string(to_string(synthetic.scheme)));
    line("synthetic.balanced", synthetic.balanced ? "true" : "false");
  } else {
    line("environment", "replay");
    line("replay.matrix", matrix.filename().string());
  }
  std::string names;
  for (auto p : policies) names += (names.empty() ? "" : ",") + std::string(to_string(p));
  line("policies", names);
  line("theta", theta ? num(*theta) : "auto");
  line("alpha", num(alpha));
  line("alpha_joint", alpha_joint ? num(*alpha_joint) : "none");
  line("exclude_empty_overlap", exclude_empty_overlap ? "true" : "false");
  line("global_popularity.epsilon", num(popularity_epsilon));
  line("paf.W", std::to_string(paf_friends));
  line("paf.epsilon", num(paf_epsilon));
  line("T", std::to_string(T));
  std::string seed_list;
  for (auto s : seeds) seed_list += (seed_list.empty() ? "" : ",") + std::to_string(s);
  line("seeds", seed_list);
  return out;
}

std::string ExperimentConfig::hash() const {
  std::uint64_t h = fnv1a(canonical());
  if (env_kind == EnvKind::Replay) h = fnv1a(file_hash(matrix), h);
  return fmt::format("{:016x}", h);
}

Environment make_environment(const ExperimentConfig& config, std::uint64_t seed,
                             const std::shared_ptr<const RatingMatrix>& matrix) {
  if (config.env_kind == ExperimentConfig::EnvKind::Replay) {
    if (matrix) return Environment::replay(matrix);
    return Environment::replay(std::make_shared<const RatingMatrix>(load_matrix(config.matrix)));
  }
  const auto& s = config.synthetic;
  GenerationOptions options{s.scheme, s.mu, s.balanced};
  return Environment::synthetic(
      generate_population(s.k, s.m, s.n, s.delta, options, derive_seed(seed, Stream::Population)),
      derive_seed(seed, Stream::Ratings));
}

PolicyOptions make_policy_options(const ExperimentConfig& config, const Environment& env) {
  PolicyOptions options;
  options.greedy.alpha = config.alpha;
  options.greedy.alpha_joint = config.alpha_joint;
  options.greedy.exclude_empty_overlap = config.exclude_empty_overlap;
  if (config.theta) {
    options.greedy.theta = *config.theta;
  } else {
    const Population* pop = env.population();
    if (!pop) throw ConfigError("theta = auto needs a synthetic environment");
    options.greedy.theta = default_theta(*pop);
  }
  options.popularity_epsilon = config.popularity_epsilon;
  options.paf_friends = config.paf_friends;
  options.paf_epsilon = config.paf_epsilon;
  return options;
}

ExperimentOutputs run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::string hash = config.hash();
  std::shared_ptr<const RatingMatrix> matrix;
  if (config.env_kind == ExperimentConfig::EnvKind::Replay)
    matrix = std::make_shared<const RatingMatrix>(load_matrix(config.matrix));

  struct Job {
    PolicyKind policy;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (auto policy : config.policies)
    for (auto seed : config.seeds) jobs.push_back({policy, seed});
  const int inner_threads = jobs.size() == 1 ? config.jobs : 1;

  fs::create_directories(config.output_dir);
  const fs::path staging = config.output_dir / (".staging-" + hash);
  fs::remove_all(staging);
  fs::create_directories(staging);

  try {
    run_jobs(jobs.size(), config.jobs, [&](std::size_t j) {
      const auto& job = jobs[j];
      const Environment env = make_environment(config, job.seed, matrix);
      const PolicyOptions options = make_policy_options(config, env);
      const auto policy = make_policy(job.policy, options, env);
      const RunResult result = run(env, *policy, config.T, job.seed, inner_threads);

      std::ostringstream csv;
      result.metrics.write_csv(csv);
      const std::string stem = run_stem(job.policy, job.seed);
      write_file(staging / (stem + ".csv"), csv.str());

      const auto& metrics = result.metrics;
      const nlohmann::json summary = {
          {"policy", to_string(job.policy)},
          {"params", params_json(config, options, job.policy)},
          {"seeds",
           {{"run", job.seed},
            {"population", derive_seed(job.seed, Stream::Population)},
            {"ratings", derive_seed(job.seed, Stream::Ratings)}}},
          {"T", config.T},
          {"r_plus_fraction", metrics.likable_fraction(1, config.T)},
          {"avg_cum_reward", metrics.avg_cumulative_reward(config.T)},
          {"config_hash", hash},
          {"csv", stem + ".csv"}};
      write_file(staging / (stem + ".json"), summary.dump(2) + "\n");
    });

    aggregate_directory(staging, hash);
    const nlohmann::json manifest = {{"config_hash", hash},
                                     {"config", config.canonical()},
                                     {"runs", jobs.size()},
                                     {"aggregate", "aggregate.csv"}};
    write_file(staging / "manifest.json", manifest.dump(2) + "\n");
  } catch (...) {
    fs::remove_all(staging);
    throw;
  }

  ExperimentOutputs outputs;
  for (const auto& entry : fs::directory_iterator(staging)) {
    const fs::path target = config.output_dir / entry.path().filename();
    fs::rename(entry.path(), target);
  }
  fs::remove_all(staging);
  for (const auto& job : jobs)
    outputs.run_csvs.push_back(config.output_dir / (run_stem(job.policy, job.seed) + ".csv"));
  outputs.aggregate_csv = config.output_dir / "aggregate.csv";
  outputs.manifest = config.output_dir / "manifest.json";
  return outputs;
}

fs::path aggregate_directory(const fs::path& dir, const std::string& config_hash) {
  std::vector<fs::path> summaries;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".json" && entry.path().filename() != "manifest.json")
      summaries.push_back(entry.path());
  std::sort(summaries.begin(), summaries.end());

  std::map<std::string, std::vector<RunColumns>> by_policy;
  for (const auto& path : summaries) {
    std::ifstream in(path);
    nlohmann::json summary;
    try {
      summary = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(path.string() + ": " + e.what());
    }
    if (!summary.contains("config_hash")) continue;
    if (summary["config_hash"] != config_hash)
      throw ConfigError("run " + path.filename().string() + " has config hash " +
                        summary["config_hash"].get<std::string>() + ", expected " + config_hash);
    by_policy[summary.at("policy").get<std::string>()].push_back(
        read_run_csv(dir / summary.at("csv").get<std::string>()));
  }

  std::ostringstream out;
  out << "t,policy,runs,mean_sum_reward,sd_sum_reward,mean_sum_likable,sd_sum_likable,"
         "mean_cum_reward,sd_cum_reward,mean_cum_likable,sd_cum_likable\n";
  for (const auto& [policy, runs] : by_policy) {
    const std::size_t T = runs.front().cum_reward.size();
    for (const auto& r : runs)
      if (r.cum_reward.size() != T) throw FormatError("runs of " + policy + " differ in length");
    for (std::size_t t = 0; t < T; ++t) {
      auto column = [&](auto member) {
        std::vector<double> xs;
        for (const auto& r : runs) xs.push_back((r.*member)[t]);
        return mean_sd(xs);
      };
      const auto [sr, sr_sd] = column(&RunColumns::sum_reward);
      const auto [sl, sl_sd] = column(&RunColumns::sum_likable);
      const auto [cr, cr_sd] = column(&RunColumns::cum_reward);
      const auto [cl, cl_sd] = column(&RunColumns::cum_likable);
      out << fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", t + 1, policy, runs.size(), sr,
                         sr_sd, sl, sl_sd, cr, cr_sd, cl, cl_sd);
    }
  }
  const fs::path path = dir / "aggregate.csv";
  write_file(path, out.str());
  return path;
}

double trapezoid_area(std::span<const double> values) {
  double area = 0.0;
  double prev = 0.0;
  for (double v : values) {
    area += 0.5 * (prev + v);
    prev = v;
  }
  return area;
}

Grid Grid::default_grid() {
  Grid grid;
  for (int j = 0; j <= 10; ++j) grid.thetas.push_back(j / 10.0);
  for (int j = 1; j <= 5; ++j) grid.alphas.push_back(j / 10.0);
  return grid;
}

Grid parse_grid(const KeyValueFile& kv) {
  for (const auto& key : kv.keys())
    if (key != "theta" && key != "alpha") kv.fail(key, "unknown grid key");
  const Grid defaults = Grid::default_grid();
  return {parse_axis(kv, "theta", defaults.thetas), parse_axis(kv, "alpha", defaults.alphas)};
}

Grid load_grid(const fs::path& path) { return parse_grid(KeyValueFile::load(path)); }

SweepResult sweep(const ExperimentConfig& config, const Grid& grid) {
  if (grid.size() == 0) throw ConfigError("sweep grid is empty");
  config.validate();
  std::shared_ptr<const RatingMatrix> matrix;
  if (config.env_kind == ExperimentConfig::EnvKind::Replay)
    matrix = std::make_shared<const RatingMatrix>(load_matrix(config.matrix));

  SweepResult result;
  auto thetas = grid.thetas;
  auto alphas = grid.alphas;
  std::sort(thetas.begin(), thetas.end());
  std::sort(alphas.begin(), alphas.end());
  for (double theta : thetas)
    for (double alpha : alphas) result.cells.push_back({theta, alpha, 0.0, std::nullopt});

  const std::size_t seeds = config.seeds.size();
  std::vector<std::vector<double>> curves(result.cells.size() * seeds);
  std::vector<std::optional<std::string>> errors(curves.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(config.jobs)
  for (std::size_t j = 0; j < curves.size(); ++j) {
    const auto& cell = result.cells[j / seeds];
    const std::uint64_t seed = config.seeds[j % seeds];
    try {
      ExperimentConfig cell_config = config;
      cell_config.theta = cell.theta;
      cell_config.alpha = cell.alpha;
      const Environment env = make_environment(cell_config, seed, matrix);
      const CollaborativeGreedyPolicy policy(make_policy_options(cell_config, env).greedy);
      const RunResult run_result = run(env, policy, config.T, seed, 1);
      auto& curve = curves[j];
      for (std::size_t t = 1; t <= config.T; ++t)
        curve.push_back(run_result.metrics.avg_cumulative_reward(t));
    } catch (const std::exception& e) {
      errors[j] = e.what();
    }
  }

  for (std::size_t c = 0; c < result.cells.size(); ++c) {
    auto& cell = result.cells[c];
    std::vector<double> mean(config.T, 0.0);
    for (std::size_t s = 0; s < seeds; ++s) {
      const std::size_t j = c * seeds + s;
      if (errors[j]) {
        cell.error = errors[j];
        break;
      }
      for (std::size_t t = 0; t < config.T; ++t) mean[t] += curves[j][t] / static_cast<double>(seeds);
    }
    if (cell.error) continue;
    cell.area = trapezoid_area(mean);
    if (!result.best || cell.area > result.cells[*result.best].area) result.best = c;
  }

  fs::create_directories(config.output_dir);
  std::ostringstream table;
  table << "theta,alpha,area,status,error\n";
  for (const auto& cell : result.cells) {
    std::string error = cell.error.value_or("");
    std::replace(error.begin(), error.end(), ',', ';');
    table << fmt::format("{},{},{},{},{}\n", cell.theta, cell.alpha, cell.area,
                         cell.error ? "failed" : "ok", error);
  }
  write_file(config.output_dir / "sweep.csv", table.str());
  nlohmann::json best = {{"config_hash", config.hash()}, {"cells", result.cells.size()}};
  if (result.best) {
    const auto& cell = result.cells[*result.best];
    best["theta"] = cell.theta;
    best["alpha"] = cell.alpha;
    best["area"] = cell.area;
  }
  write_file(config.output_dir / "best.json", best.dump(2) + "\n");
  return result;
}

}  // namespace collabrec
