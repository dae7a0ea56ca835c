#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "collabrec/errors.hpp"
#include "collabrec/experiment.hpp"

namespace collabrec {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("collabrec_exp_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path path = dir / "experiment.cfg";
  std::ofstream(path) << text;
  return path;
}

const char* kSmallSynthetic =
    "# two-type synthetic run\n"
    "environment = synthetic\n"
    "synthetic.k = 2\n"
    "synthetic.m = 30\n"
    "synthetic.n = 40\n"
    "synthetic.delta = 0.3\n"
    "policies = collaborative_greedy, random\n"
    "theta = auto\n"
    "alpha = 0.4\n"
    "T = 20\n"
    "seeds = 1, 2, 3\n"
    "output_dir = out\n";

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

TEST(KeyValueFile, ParsesAndReportsLines) {
  std::istringstream in("a = 1\n# comment\n\n  b=two words  \n");
  const auto kv = KeyValueFile::parse(in, "mem");
  EXPECT_EQ(kv.get("a"), "1");
  EXPECT_EQ(kv.get("b"), "two words");
  EXPECT_EQ(kv.line_of("b"), 4u);
  EXPECT_FALSE(kv.has("c"));
}

TEST(KeyValueFile, ErrorsCarryLocation) {
  std::istringstream dup("a = 1\na = 2\n");
  try {
    KeyValueFile::parse(dup, "cfg");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("cfg:2"), std::string::npos) << e.what();
  }
  std::istringstream no_equals("a = 1\nnonsense\n");
  EXPECT_THROW(KeyValueFile::parse(no_equals, "cfg"), ConfigError);
}

TEST(Config, ParsesSyntheticExample) {
  const auto dir = scratch("parse");
  const auto config = load_config(write_config(dir, kSmallSynthetic));
  EXPECT_EQ(config.env_kind, ExperimentConfig::EnvKind::Synthetic);
  EXPECT_EQ(config.synthetic.k, 2u);
  EXPECT_EQ(config.policies.size(), 2u);
  EXPECT_FALSE(config.theta.has_value());
  EXPECT_EQ(config.seeds, (std::vector<std::uint64_t>{1, 2, 3}));
  EXPECT_EQ(config.output_dir, dir / "out");
  EXPECT_EQ(config.hash().size(), 16u);
}

TEST(Config, HashIgnoresOutputLocationAndJobs) {
  const auto dir = scratch("hash");
  auto a = load_config(write_config(dir, kSmallSynthetic));
  auto b = a;
  b.output_dir = "/elsewhere";
  b.jobs = 8;
  EXPECT_EQ(a.hash(), b.hash());
  b.alpha = 0.41;
  EXPECT_NE(a.hash(), b.hash());
}

TEST(Config, LineLevelErrors) {
  const auto dir = scratch("errors");
  std::string text = kSmallSynthetic;
  text += "unknown.key = 4\n";
  try {
    load_config(write_config(dir, text));
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(":13:"), std::string::npos) << e.what();
  }
  text = kSmallSynthetic;
  text.replace(text.find("alpha = 0.4"), 11, "alpha = 0.9");
  EXPECT_THROW(load_config(write_config(dir, text)), std::exception);
  text = kSmallSynthetic;
  text.replace(text.find("T = 20"), 6, "T = 31");
  EXPECT_THROW(load_config(write_config(dir, text)), ConfigError);
  text = kSmallSynthetic;
  text.replace(text.find("random"), 6, "bandit");
  EXPECT_THROW(load_config(write_config(dir, text)), ConfigError);
}

TEST(Config, ReplayHorizonBeyondItemsRejectedBeforeRunning) {
  const auto dir = scratch("replay");
  const RatingMatrix mat(3, 4, std::vector<Rating>(12, 1), {"a", "b", "c"}, {"w", "x", "y", "z"});
  write_matrix(mat, dir / "data", 4.0, "h");
  const std::string text =
      "environment = replay\n"
      "replay.matrix = data/matrix.csv\n"
      "policies = collaborative_greedy\n"
      "theta = 0.5\n"
      "T = 5\n"
      "seeds = 1\n";
  EXPECT_THROW(load_config(write_config(dir, text)), ConfigError);
  EXPECT_FALSE(fs::exists(dir / "out"));

  std::string ok = text;
  ok.replace(ok.find("T = 5"), 5, "T = 4");
  const auto config = load_config(write_config(dir, ok));
  const auto outputs = run_experiment(config);
  EXPECT_EQ(outputs.run_csvs.size(), 1u);
}

TEST(Config, ReplayNeedsExplicitTheta) {
  const auto dir = scratch("replay_theta");
  const RatingMatrix mat(2, 2, {1, 1, 1, 1}, {"a", "b"}, {"x", "y"});
  write_matrix(mat, dir / "data", 4.0, "h");
  EXPECT_THROW(load_config(write_config(dir,
                                        "environment = replay\nreplay.matrix = data/matrix.csv\n"
                                        "policies = random\nT = 2\nseeds = 1\n")),
               ConfigError);
}

TEST(RunExperiment, FileCountContract) {
  const auto dir = scratch("files");
  const auto config = load_config(write_config(dir, kSmallSynthetic));
  const auto outputs = run_experiment(config);
  EXPECT_EQ(outputs.run_csvs.size(), 6u);
  std::size_t csvs = 0;
  for (const auto& entry : fs::directory_iterator(config.output_dir))
    csvs += entry.path().extension() == ".csv";
  EXPECT_EQ(csvs, 7u);
  EXPECT_TRUE(fs::exists(config.output_dir / "aggregate.csv"));
  EXPECT_TRUE(fs::exists(config.output_dir / "manifest.json"));
  for (const auto& entry : fs::directory_iterator(dir))
    EXPECT_EQ(entry.path().filename().string().rfind(".staging", 0), std::string::npos);

  const auto summary = nlohmann::json::parse(slurp(config.output_dir / "collaborative_greedy_seed2.json"));
  EXPECT_EQ(summary.at("config_hash"), config.hash());
  EXPECT_EQ(summary.at("T"), 20);
  EXPECT_EQ(summary.at("seeds").at("run"), 2);
}

TEST(RunExperiment, RerunIsByteIdenticalForAnyJobCount) {
  const auto dir = scratch("rerun");
  auto config = load_config(write_config(dir, kSmallSynthetic));
  run_experiment(config);
  std::map<std::string, std::string> first;
  for (const auto& entry : fs::directory_iterator(config.output_dir))
    first[entry.path().filename().string()] = slurp(entry.path());
  fs::remove_all(config.output_dir);
  config.jobs = 4;
  run_experiment(config);
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(config.output_dir)) {
    EXPECT_EQ(slurp(entry.path()), first.at(entry.path().filename().string()))
        << entry.path().filename();
    ++compared;
  }
  EXPECT_EQ(compared, first.size());
}

TEST(RunExperiment, AggregateMeansMatchRunFiles) {
  const auto dir = scratch("aggregate");
  const auto config = load_config(write_config(dir, kSmallSynthetic));
  run_experiment(config);
  const auto aggregate = read_csv(config.output_dir / "aggregate.csv");
  ASSERT_EQ(aggregate.front()[0], "t");
  for (const char* policy : {"collaborative_greedy", "random"}) {
    std::vector<std::vector<std::vector<std::string>>> runs;
    for (int seed = 1; seed <= 3; ++seed)
      runs.push_back(read_csv(config.output_dir / (std::string(policy) + "_seed" + std::to_string(seed) + ".csv")));
    std::size_t rows = 0;
    for (const auto& row : aggregate) {
      if (row[1] != policy) continue;
      const std::size_t t = std::stoul(row[0]);
      EXPECT_EQ(row[2], "3");
      // Columns in the run CSV: sum_reward=2, sum_likable=3, cum_reward=4, cum_likable=5.
      for (int col = 2; col <= 5; ++col) {
        std::vector<double> xs;
        for (const auto& run : runs) xs.push_back(std::stod(run[t][col]));
        const double mean = (xs[0] + xs[1] + xs[2]) / 3.0;
        double ss = 0;
        for (double x : xs) ss += (x - mean) * (x - mean);
        EXPECT_NEAR(std::stod(row[3 + 2 * (col - 2)]), mean, 1e-9);
        EXPECT_NEAR(std::stod(row[4 + 2 * (col - 2)]), std::sqrt(ss / 2.0), 1e-9);
      }
      ++rows;
    }
    EXPECT_EQ(rows, 20u);
  }
}

TEST(RunExperiment, MismatchedHashesAreNotAggregated) {
  const auto dir = scratch("mismatch");
  const auto config = load_config(write_config(dir, kSmallSynthetic));
  run_experiment(config);
  const auto path = config.output_dir / "random_seed1.json";
  auto summary = nlohmann::json::parse(slurp(path));
  summary["config_hash"] = "ffffffffffffffff";
  std::ofstream(path) << summary.dump(2);
  EXPECT_THROW(aggregate_directory(config.output_dir, config.hash()), ConfigError);
}

TEST(RunExperiment, FailureLeavesNoPartialOutput) {
  const auto dir = scratch("failure");
  const RatingMatrix mat(2, 3, {1, 1, 1, 1, 1, 1}, {"a", "b"}, {"x", "y", "z"});
  write_matrix(mat, dir / "data", 4.0, "h");
  auto config = load_config(write_config(dir,
                                         "environment = replay\nreplay.matrix = data/matrix.csv\n"
                                         "policies = collaborative_greedy, oracle\ntheta = 0.5\n"
                                         "T = 3\nseeds = 1\n"));
  fs::remove(dir / "data" / "matrix.csv");
  EXPECT_ANY_THROW(run_experiment(config));
  EXPECT_FALSE(fs::exists(config.output_dir));
  for (const auto& entry : fs::directory_iterator(dir))
    EXPECT_EQ(entry.path().filename().string().rfind(".staging", 0), std::string::npos);
}

TEST(Trapezoid, Area) {
  const std::vector<double> ys = {1.0, 2.0, 2.0};
  // (0+1)/2 + (1+2)/2 + (2+2)/2
  EXPECT_DOUBLE_EQ(trapezoid_area(ys), 4.0);
  EXPECT_EQ(trapezoid_area(std::vector<double>{}), 0.0);
}

TEST(Grid, DefaultHas55Cells) {
  const auto grid = Grid::default_grid();
  EXPECT_EQ(grid.thetas.size(), 11u);
  EXPECT_EQ(grid.alphas.size(), 5u);
  EXPECT_EQ(grid.size(), 55u);
  EXPECT_DOUBLE_EQ(grid.thetas.back(), 1.0);
  EXPECT_DOUBLE_EQ(grid.alphas.front(), 0.1);
}

TEST(Grid, ListsAndRanges) {
  std::istringstream in("theta = 0.0:1.0:0.25\nalpha = 0.2, 0.4\n");
  const auto grid = parse_grid(KeyValueFile::parse(in, "grid"));
  EXPECT_EQ(grid.thetas.size(), 5u);
  EXPECT_DOUBLE_EQ(grid.thetas[2], 0.5);
  EXPECT_EQ(grid.alphas, (std::vector<double>{0.2, 0.4}));
  std::istringstream partial("alpha = 0.3\n");
  EXPECT_EQ(parse_grid(KeyValueFile::parse(partial, "grid")).thetas.size(), 11u);
}

const char* kTinySweep =
    "environment = synthetic\n"
    "synthetic.k = 1\n"
    "synthetic.m = 12\n"
    "synthetic.n = 8\n"
    "synthetic.scheme = noiseless\n"
    "policies = collaborative_greedy\n"
    "T = 10\n"
    "seeds = 1, 2\n";

TEST(Sweep, SinglePointIsBest) {
  const auto dir = scratch("sweep1");
  const auto config = load_config(write_config(dir, kTinySweep));
  const auto result = sweep(config, Grid{{0.3}, {0.2}});
  ASSERT_EQ(result.cells.size(), 1u);
  ASSERT_TRUE(result.best.has_value());
  EXPECT_EQ(*result.best, 0u);
  const auto best = nlohmann::json::parse(slurp(config.output_dir / "best.json"));
  EXPECT_DOUBLE_EQ(best.at("theta").get<double>(), 0.3);
  EXPECT_DOUBLE_EQ(best.at("alpha").get<double>(), 0.2);
}

TEST(Sweep, DefaultGridEvaluatesAllCells) {
  const auto dir = scratch("sweep55");
  const auto config = load_config(write_config(dir, kTinySweep));
  const auto result = sweep(config, Grid::default_grid());
  EXPECT_EQ(result.cells.size(), 55u);
  EXPECT_EQ(read_csv(config.output_dir / "sweep.csv").size(), 56u);
  for (const auto& cell : result.cells) EXPECT_FALSE(cell.error.has_value());
}

TEST(Sweep, EqualAreasGoToLowerTheta) {
  // One noiseless type: every pair agrees on every joint item, so any
  // theta <= 1 yields the same neighborhoods and the same trajectory.
  const auto dir = scratch("sweeptie");
  const auto config = load_config(write_config(dir, kTinySweep));
  const auto result = sweep(config, Grid{{0.7, 0.2}, {0.3}});
  ASSERT_EQ(result.cells.size(), 2u);
  EXPECT_EQ(result.cells[0].area, result.cells[1].area);
  ASSERT_TRUE(result.best.has_value());
  EXPECT_DOUBLE_EQ(result.cells[*result.best].theta, 0.2);
}

TEST(Sweep, FailingCellIsRecordedAndSkipped) {
  const auto dir = scratch("sweepfail");
  const auto config = load_config(write_config(dir, kTinySweep));
  const auto result = sweep(config, Grid{{0.5}, {0.3, 0.9}});
  ASSERT_EQ(result.cells.size(), 2u);
  EXPECT_FALSE(result.cells[0].error.has_value());
  EXPECT_TRUE(result.cells[1].error.has_value());
  EXPECT_EQ(*result.best, 0u);
}

}  // namespace
}  // namespace collabrec
