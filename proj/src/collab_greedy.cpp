#include "collabrec/collab_greedy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "collabrec/errors.hpp"
#include "collabrec/kernels.hpp"
#include "collabrec/omp.hpp"

namespace collabrec {

void AlgorithmParams::validate() const {
  if (!(theta >= 0.0 && theta <= 1.0)) throw DomainError("theta must lie in [0,1]");
  if (!(alpha > 0.0 && alpha <= kMaxAlpha)) throw DomainError("alpha must lie in (0, 4/7]");
  if (alpha_joint && !(*alpha_joint > 0.0 && *alpha_joint <= kMaxAlpha))
    throw DomainError("alpha_joint must lie in (0, 4/7]");
}

std::string_view to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::RandomExplore: return "random_explore";
    case ActionKind::JointExplore: return "joint_explore";
    case ActionKind::Exploit: return "exploit";
  }
  return "unknown";
}

double epsilon_r(std::size_t n, double alpha) {
  if (n == 0) throw DomainError("epsilon_r needs n >= 1");
  return std::pow(static_cast<double>(n), -alpha);
}

double epsilon_j(std::size_t t, double alpha) {
  if (t == 0) throw DomainError("epsilon_j needs t >= 1");
  return std::pow(static_cast<double>(t), -alpha);
}

ActionProbabilities action_probabilities(std::size_t t, std::size_t n,
                                         const AlgorithmParams& params) {
  const double random = epsilon_r(n, params.alpha);
  const double joint = std::min(epsilon_j(t, params.joint_alpha()), 1.0 - random);
  return {random, joint, std::max(0.0, 1.0 - random - joint)};
}

ActionKind sample_action(std::size_t t, std::size_t n, const AlgorithmParams& params, Rng& rng) {
  const auto probs = action_probabilities(t, n, params);
  const double draw = rng.uniform();
  if (draw < probs.random_explore) return ActionKind::RandomExplore;
  if (draw < probs.random_explore + probs.joint_explore) return ActionKind::JointExplore;
  return ActionKind::Exploit;
}

int compare(const Score& a, const Score& b) {
  // likes/raters with 0/0 read as 1/2; cross-multiply to stay exact.
  const unsigned long long an = a.raters == 0 ? 1 : a.likes;
  const unsigned long long ad = a.raters == 0 ? 2 : a.raters;
  const unsigned long long bn = b.raters == 0 ? 1 : b.likes;
  const unsigned long long bd = b.raters == 0 ? 2 : b.raters;
  const auto lhs = an * bd;
  const auto rhs = bn * ad;
  return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

std::vector<UserId> neighborhood(const SessionState& state, UserId u, double theta,
                                 bool exclude_empty_overlap) {
  const auto row = kernels::neighbor_row(state, u, theta, exclude_empty_overlap);
  std::vector<UserId> out;
  for (UserId v = 0; v < state.n(); ++v)
    if ((row[v / BitRows::kWordBits] >> (v % BitRows::kWordBits)) & 1U) out.push_back(v);
  return out;
}

Score score(const SessionState& state, ItemId i, std::span<const UserId> neighbors) {
  Score s;
  for (UserId v : neighbors) {
    const Rating r = state.rating(v, i);
    if (r == 0) continue;
    ++s.raters;
    if (r > 0) ++s.likes;
  }
  return s;
}

ItemId exploit_recommend(const SessionState& state, UserId u, const AlgorithmParams& params,
                         Rng& rng) {
  const auto row = kernels::neighbor_row(state, u, params.theta, params.exclude_empty_overlap);
  return kernels::best_item(state, u, row, rng);
}

StepPlan step(const SessionState& state, const AlgorithmParams& params, std::uint64_t step_seed,
              int threads) {
  if (state.t() >= state.m()) throw ExhaustedError("every item has been consumed");
  Rng action_rng(derive_seed(step_seed, Stream::Action));
  StepPlan plan;
  plan.kind = sample_action(state.t() + 1, state.n(), params, action_rng);
  const std::size_t n = state.n();

  switch (plan.kind) {
    case ActionKind::RandomExplore:
      plan.items.resize(n);
#pragma omp parallel for schedule(static) num_threads(threads)
      for (std::size_t u = 0; u < n; ++u) {
        Rng rng(derive_seed(step_seed, Stream::User, u));
        plan.items[u] = random_unconsumed(state, u, rng);
      }
      break;
    case ActionKind::JointExplore:
      plan.items.resize(n);
      for (std::size_t u = 0; u < n; ++u) plan.items[u] = state.next_joint_item(u);
      break;
    case ActionKind::Exploit:
      plan.items = kernels::exploit_all(state, params, step_seed, threads);
      break;
  }
  return plan;
}

}  // namespace collabrec
