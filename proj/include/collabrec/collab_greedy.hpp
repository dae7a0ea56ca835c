#pragma once

// Collaborative-Greedy: each step either explores (random item per user, or
// the next item of the shared ordering sigma) or exploits a plurality vote
// among cosine-similar neighbors.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "collabrec/random.hpp"
#include "collabrec/session.hpp"

namespace collabrec {

inline constexpr double kMaxAlpha = 4.0 / 7.0;

struct AlgorithmParams {
  double theta = 0.5;  // neighborhood threshold in [0,1]
  double alpha = 0.5;  // exploration decay in (0, 4/7]
  /// Separate decay for joint exploration; falls back to alpha.
  std::optional<double> alpha_joint;
  /// Drop pairs with no jointly rated item from neighborhoods.
  bool exclude_empty_overlap = false;

  double joint_alpha() const { return alpha_joint.value_or(alpha); }

  /// Throws DomainError when theta or alpha is out of range.
  void validate() const;
};

enum class ActionKind { RandomExplore, JointExplore, Exploit };

std::string_view to_string(ActionKind kind);

double epsilon_r(std::size_t n, double alpha);

/// 1 / t^alpha; t is the 1-based step index. Throws DomainError for t = 0.
double epsilon_j(std::size_t t, double alpha);

struct ActionProbabilities {
  double random_explore;
  double joint_explore;
  double exploit;
};

/// Joint exploration is clipped to 1 - epsilon_r so the three masses sum to
/// one; random exploration keeps its exact rate.
ActionProbabilities action_probabilities(std::size_t t, std::size_t n,
                                         const AlgorithmParams& params);

/// One uniform draw decides the action shared by every user at step t.
ActionKind sample_action(std::size_t t, std::size_t n, const AlgorithmParams& params, Rng& rng);

/// Plurality score as an exact fraction; 1/2 when no neighbor rated the item.
struct Score {
  std::size_t likes = 0;
  std::size_t raters = 0;

  double value() const {
    return raters == 0 ? 0.5 : static_cast<double>(likes) / static_cast<double>(raters);
  }
  friend bool operator==(const Score&, const Score&) = default;
};

/// Exact comparison of likes/raters fractions (1/2 for an empty denominator).
int compare(const Score& a, const Score& b);

/// Users v with <Y~_u, Y~_v> >= theta * |overlap|, where Y~ are ratings
/// restricted to jointly explored items. Includes u itself; an empty overlap
/// passes (0 >= 0) unless exclude_empty_overlap is set.
std::vector<UserId> neighborhood(const SessionState& state, UserId u, double theta,
                                 bool exclude_empty_overlap = false);

/// Fraction of neighbors who liked item i among those who rated it, using
/// all revealed ratings (not just jointly explored ones).
Score score(const SessionState& state, ItemId i, std::span<const UserId> neighbors);

/// Unconsumed item with the highest score; ties are broken uniformly with
/// `rng`. Throws ExhaustedError.
ItemId exploit_recommend(const SessionState& state, UserId u, const AlgorithmParams& params,
                         Rng& rng);

struct StepPlan {
  ActionKind kind = ActionKind::Exploit;
  std::vector<ItemId> items;  // one per user
};

/// Plans the next time step (t + 1) for every user. All randomness derives
/// from step_seed, so the plan is identical for any thread count.
StepPlan step(const SessionState& state, const AlgorithmParams& params, std::uint64_t step_seed,
              int threads = 1);

}  // namespace collabrec
