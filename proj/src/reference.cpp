#include "collabrec/reference.hpp"

#include <string>

#include "collabrec/errors.hpp"

namespace collabrec::reference {

bool are_neighbors(const SessionState& state, UserId u, UserId v, double theta,
                   bool exclude_empty_overlap) {
  const auto yu = state.revealed_joint_vector(u);
  const auto yv = state.revealed_joint_vector(v);
  long long inner = 0;
  std::size_t overlap = 0;
  for (ItemId i = 0; i < state.m(); ++i) {
    inner += static_cast<long long>(yu[i]) * yv[i];
    if (yu[i] != 0 && yv[i] != 0) ++overlap;
  }
  if (exclude_empty_overlap && overlap == 0) return false;
  return static_cast<double>(inner) >= theta * static_cast<double>(overlap);
}

std::vector<UserId> neighborhood(const SessionState& state, UserId u, double theta,
                                 bool exclude_empty_overlap) {
  std::vector<UserId> out;
  for (UserId v = 0; v < state.n(); ++v)
    if (are_neighbors(state, u, v, theta, exclude_empty_overlap)) out.push_back(v);
  return out;
}

Score score(const SessionState& state, ItemId i, std::span<const UserId> neighbors) {
  Score s;
  for (UserId v : neighbors) {
    if (state.rating(v, i) != 0) ++s.raters;
    if (state.rating(v, i) == 1) ++s.likes;
  }
  return s;
}

ItemId exploit_recommend(const SessionState& state, UserId u, const AlgorithmParams& params,
                         Rng& rng) {
  const auto neighbors = reference::neighborhood(state, u, params.theta, params.exclude_empty_overlap);
  std::vector<ItemId> ties;
  double best = -1.0;
  Score best_score;
  for (ItemId i = 0; i < state.m(); ++i) {
    if (state.consumed(u, i)) continue;
    const Score s = reference::score(state, i, neighbors);
    const int cmp = best < 0.0 ? 1 : compare(s, best_score);
    if (cmp > 0) {
      best = s.value();
      best_score = s;
      ties.clear();
    }
    if (cmp >= 0) ties.push_back(i);
  }
  if (ties.empty()) throw ExhaustedError("user " + std::to_string(u) + " has consumed every item");
  return ties.size() == 1 ? ties.front() : ties[rng.index(ties.size())];
}

std::vector<ItemId> exploit_all(const SessionState& state, const AlgorithmParams& params,
                                std::uint64_t step_seed) {
  std::vector<ItemId> items(state.n());
  for (UserId u = 0; u < state.n(); ++u) {
    Rng rng(derive_seed(step_seed, Stream::User, u));
    items[u] = reference::exploit_recommend(state, u, params, rng);
  }
  return items;
}

}  // namespace collabrec::reference
