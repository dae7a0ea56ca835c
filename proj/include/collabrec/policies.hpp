#pragma once

// Recommendation policies behind one interface: Collaborative-Greedy and the
// comparison baselines (oracle, uniform random, popularity voting).

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "collabrec/collab_greedy.hpp"
#include "collabrec/environment.hpp"
#include "collabrec/random.hpp"
#include "collabrec/session.hpp"

namespace collabrec {

enum class PolicyKind { CollaborativeGreedy, Oracle, Random, GlobalPopularity, PafLite };

std::string_view to_string(PolicyKind kind);
PolicyKind parse_policy_kind(std::string_view text);

/// Policies hold no per-session state; everything they need is in the
/// SessionState, so a session can be checkpointed and resumed.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual PolicyKind kind() const = 0;
  /// One unconsumed item per user for step t + 1. Baselines report their
  /// steps as Exploit.
  virtual StepPlan plan(const SessionState& state, std::uint64_t step_seed,
                        int threads) const = 0;
};

/// Any unconsumed likable item (uniformly), else any unconsumed item.
ItemId oracle_recommend(const SessionState& state, UserId u, const Environment& truth, Rng& rng);

ItemId random_recommend(const SessionState& state, UserId u, Rng& rng);

struct PopularityMode {
  /// 0 means every user votes (global popularity); otherwise the W users most
  /// cosine-similar to u on co-rated items vote.
  std::size_t friends = 0;
};

/// Users (excluding u) ranked by cosine similarity on items both rated;
/// returns the first `count`. Similarity is 0 with no co-rated item; ties go
/// to the smaller user index.
std::vector<UserId> most_similar_users(const SessionState& state, UserId u, std::size_t count);

/// With probability epsilon a uniform unconsumed item; otherwise the
/// unconsumed item with the most +1 votes among the voters, ties uniform.
ItemId popularity_recommend(const SessionState& state, UserId u, PopularityMode mode,
                            double epsilon, Rng& rng);

class CollaborativeGreedyPolicy final : public Policy {
 public:
  explicit CollaborativeGreedyPolicy(AlgorithmParams params);
  PolicyKind kind() const override { return PolicyKind::CollaborativeGreedy; }
  StepPlan plan(const SessionState& state, std::uint64_t step_seed, int threads) const override;
  const AlgorithmParams& params() const { return params_; }

 private:
  AlgorithmParams params_;
};

class OraclePolicy final : public Policy {
 public:
  /// `truth` must outlive the policy.
  explicit OraclePolicy(const Environment& truth) : truth_(&truth) {}
  PolicyKind kind() const override { return PolicyKind::Oracle; }
  StepPlan plan(const SessionState& state, std::uint64_t step_seed, int threads) const override;

 private:
  const Environment* truth_;
};

class RandomPolicy final : public Policy {
 public:
  PolicyKind kind() const override { return PolicyKind::Random; }
  StepPlan plan(const SessionState& state, std::uint64_t step_seed, int threads) const override;
};

class PopularityPolicy final : public Policy {
 public:
  PopularityPolicy(PopularityMode mode, double epsilon);
  PolicyKind kind() const override {
    return mode_.friends == 0 ? PolicyKind::GlobalPopularity : PolicyKind::PafLite;
  }
  StepPlan plan(const SessionState& state, std::uint64_t step_seed, int threads) const override;

 private:
  PopularityMode mode_;
  double epsilon_;
};

struct PolicyOptions {
  AlgorithmParams greedy;
  double popularity_epsilon = 0.05;
  std::size_t paf_friends = 10;
  double paf_epsilon = 0.05;
};

/// `truth` is only used by the oracle and must outlive the returned policy.
std::unique_ptr<Policy> make_policy(PolicyKind kind, const PolicyOptions& options,
                                    const Environment& truth);

}  // namespace collabrec
