#pragma once

// The time-stepped loop: plan recommendations, look up ratings, record them,
// and accumulate reward / likable counts per step.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "collabrec/collab_greedy.hpp"
#include "collabrec/environment.hpp"
#include "collabrec/policies.hpp"
#include "collabrec/session.hpp"

namespace collabrec {

struct StepMetrics {
  ActionKind action = ActionKind::Exploit;
  long long sum_reward = 0;   // sum over users of the rating received
  long long sum_likable = 0;  // number of users given a likable item
  long long cum_reward = 0;
  long long cum_likable = 0;

  friend bool operator==(const StepMetrics&, const StepMetrics&) = default;
};

class MetricsSeries {
 public:
  explicit MetricsSeries(std::size_t n = 0) : n_(n) {}

  std::size_t n() const { return n_; }
  std::size_t steps() const { return steps_.size(); }
  /// Metrics of step t (1-based).
  const StepMetrics& at(std::size_t t) const { return steps_.at(t - 1); }
  const std::vector<StepMetrics>& all() const { return steps_; }

  void append(ActionKind action, long long sum_reward, long long sum_likable);

  /// Likable recommendations over steps [from, to] divided by n * (to - from + 1).
  /// Throws DomainError unless 1 <= from <= to <= steps().
  double likable_fraction(std::size_t from, std::size_t to) const;

  /// Cumulative reward up to step T divided by n; 0 for T = 0.
  double avg_cumulative_reward(std::size_t T) const;

  /// Header t,action,sum_reward,sum_likable,cum_reward,cum_likable.
  void write_csv(std::ostream& out) const;

  friend bool operator==(const MetricsSeries&, const MetricsSeries&) = default;

 private:
  std::size_t n_;
  std::vector<StepMetrics> steps_;
};

/// Drives one session. All randomness is keyed by `seed`: sigma from
/// (seed, Sigma), step t's draws from (seed, Step, t).
class Simulator {
 public:
  Simulator(const Environment& env, const Policy& policy, std::uint64_t seed, int threads = 1);

  /// Continue from a checkpoint taken by an earlier simulator with the same
  /// environment, policy and seed.
  Simulator(const Environment& env, const Policy& policy, std::uint64_t seed, int threads,
            SessionState resume_state, MetricsSeries resume_metrics);

  /// Runs one step. Throws ExhaustedError once t == m.
  ActionKind advance();

  /// Steps until state().t() == T. Throws ConfigError if T > m.
  void run_until(std::size_t T);

  const SessionState& state() const { return state_; }
  const MetricsSeries& metrics() const { return metrics_; }

  static std::uint64_t step_seed(std::uint64_t seed, std::size_t t) {
    return derive_seed(seed, Stream::Step, t);
  }

 private:
  const Environment* env_;
  const Policy* policy_;
  std::uint64_t seed_;
  int threads_;
  SessionState state_;
  MetricsSeries metrics_;
};

struct RunResult {
  MetricsSeries metrics;
  SessionState state;
};

/// Runs T steps. Throws ConfigError if T > m.
RunResult run(const Environment& env, const Policy& policy, std::size_t T, std::uint64_t seed,
              int threads = 1);

}  // namespace collabrec
