#include "collabrec/kernels.hpp"

#include <string>

#include "collabrec/errors.hpp"
#include "collabrec/omp.hpp"

namespace collabrec::kernels {

PairStats joint_pair_stats(const SessionState& state, UserId u, UserId v) {
  const std::size_t prefix = state.joint_count();
  const auto lu = state.likes_by_position(u);
  const auto du = state.dislikes_by_position(u);
  const auto lv = state.likes_by_position(v);
  const auto dv = state.dislikes_by_position(v);
  const std::size_t agree = and_count(lu, lv, prefix) + and_count(du, dv, prefix);
  const std::size_t disagree = and_count(lu, dv, prefix) + and_count(du, lv, prefix);
  return {static_cast<long long>(agree) - static_cast<long long>(disagree), agree + disagree};
}

std::vector<BitRows::Word> neighbor_row(const SessionState& state, UserId u, double theta,
                                        bool exclude_empty_overlap) {
  std::vector<BitRows::Word> row((state.n() + BitRows::kWordBits - 1) / BitRows::kWordBits, 0);
  for (UserId v = 0; v < state.n(); ++v)
    if (passes_threshold(joint_pair_stats(state, u, v), theta, exclude_empty_overlap))
      row[v / BitRows::kWordBits] |= BitRows::Word{1} << (v % BitRows::kWordBits);
  return row;
}

BitRows neighbor_sets(const SessionState& state, double theta, bool exclude_empty_overlap,
                      int threads) {
  const std::size_t n = state.n();
  BitRows sets(n, n);
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::size_t u = 0; u < n; ++u) {
    auto row = sets.row(u);
    for (std::size_t v = 0; v < n; ++v)
      if (passes_threshold(joint_pair_stats(state, u, v), theta, exclude_empty_overlap))
        row[v / BitRows::kWordBits] |= BitRows::Word{1} << (v % BitRows::kWordBits);
  }
  return sets;
}

ItemId best_item(const SessionState& state, UserId u, std::span<const BitRows::Word> neighbors,
                 Rng& rng) {
  std::vector<ItemId> ties;
  Score best;
  bool have_best = false;
  for (ItemId i = 0; i < state.m(); ++i) {
    if (state.consumed(u, i)) continue;
    const Score s{and_count(neighbors, state.users_liking(i)),
                  and_count(neighbors, state.users_rating(i))};
    const int cmp = have_best ? compare(s, best) : 1;
    if (cmp > 0) {
      best = s;
      have_best = true;
      ties.clear();
    }
    if (cmp >= 0) ties.push_back(i);
  }
  if (ties.empty()) throw ExhaustedError("user " + std::to_string(u) + " has consumed every item");
  return ties.size() == 1 ? ties.front() : ties[rng.index(ties.size())];
}

std::vector<ItemId> exploit_all(const SessionState& state, const AlgorithmParams& params,
                                std::uint64_t step_seed, int threads) {
  const BitRows sets = neighbor_sets(state, params.theta, params.exclude_empty_overlap, threads);
  const std::size_t n = state.n();
  std::vector<ItemId> items(n);
  // Exceptions must not escape an OpenMP region; exhaustion is checked first.
  for (std::size_t u = 0; u < n; ++u)
    if (state.consumed_count(u) == state.m())
      throw ExhaustedError("user " + std::to_string(u) + " has consumed every item");
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
  for (std::size_t u = 0; u < n; ++u) {
    Rng rng(derive_seed(step_seed, Stream::User, u));
    items[u] = best_item(state, u, sets.row(u), rng);
  }
  return items;
}

std::vector<std::size_t> like_votes(const SessionState& state,
                                    std::span<const BitRows::Word> voters) {
  std::vector<std::size_t> votes(state.m());
  for (ItemId i = 0; i < state.m(); ++i) votes[i] = and_count(voters, state.users_liking(i));
  return votes;
}

}  // namespace collabrec::kernels
