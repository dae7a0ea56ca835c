#include "collabrec/policies.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "collabrec/errors.hpp"
#include "collabrec/kernels.hpp"
#include "collabrec/omp.hpp"

namespace collabrec {
namespace {

std::vector<BitRows::Word> all_users(std::size_t n) {
  std::vector<BitRows::Word> row((n + BitRows::kWordBits - 1) / BitRows::kWordBits, ~BitRows::Word{0});
  if (const std::size_t rem = n % BitRows::kWordBits; rem != 0)
    row.back() = (BitRows::Word{1} << rem) - 1;
  return row;
}

ItemId most_voted(const SessionState& state, UserId u, const std::vector<std::size_t>& votes,
                  Rng& rng) {
  std::vector<ItemId> ties;
  std::size_t best = 0;
  for (ItemId i = 0; i < state.m(); ++i) {
    if (state.consumed(u, i)) continue;
    if (ties.empty() || votes[i] > best) {
      best = votes[i];
      ties.assign(1, i);
    } else if (votes[i] == best) {
      ties.push_back(i);
    }
  }
  if (ties.empty()) throw ExhaustedError("user " + std::to_string(u) + " has consumed every item");
  return ties.size() == 1 ? ties.front() : ties[rng.index(ties.size())];
}

void check_not_exhausted(const SessionState& state) {
  for (UserId u = 0; u < state.n(); ++u)
    if (state.consumed_count(u) == state.m())
      throw ExhaustedError("user " + std::to_string(u) + " has consumed every item");
}

// Per-user fan-out shared by the baselines. Exhaustion is checked up front so
// nothing throws inside the parallel region.
template <class PerUser>
StepPlan plan_each(const SessionState& state, std::uint64_t step_seed, int threads,
                   PerUser&& per_user) {
  check_not_exhausted(state);
  StepPlan plan;
  plan.kind = ActionKind::Exploit;
  plan.items.resize(state.n());
  const std::size_t n = state.n();
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
  for (std::size_t u = 0; u < n; ++u) {
    Rng rng(derive_seed(step_seed, Stream::User, u));
    plan.items[u] = per_user(u, rng);
  }
  return plan;
}

}  // namespace

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::CollaborativeGreedy: return "collaborative_greedy";
    case PolicyKind::Oracle: return "oracle";
    case PolicyKind::Random: return "random";
    case PolicyKind::GlobalPopularity: return "global_popularity";
    case PolicyKind::PafLite: return "paf_lite";
  }
  return "unknown";
}

PolicyKind parse_policy_kind(std::string_view text) {
  for (auto kind : {PolicyKind::CollaborativeGreedy, PolicyKind::Oracle, PolicyKind::Random,
                    PolicyKind::GlobalPopularity, PolicyKind::PafLite})
    if (to_string(kind) == text) return kind;
  throw ConfigError("unknown policy '" + std::string(text) + "'");
}

ItemId oracle_recommend(const SessionState& state, UserId u, const Environment& truth,
                        Rng& rng) {
  std::vector<ItemId> likable;
  for (ItemId i = 0; i < state.m(); ++i)
    if (!state.consumed(u, i) && truth.likable(u, i)) likable.push_back(i);
  if (likable.empty()) return random_unconsumed(state, u, rng);
  return likable[rng.index(likable.size())];
}

ItemId random_recommend(const SessionState& state, UserId u, Rng& rng) {
  return random_unconsumed(state, u, rng);
}

std::vector<UserId> most_similar_users(const SessionState& state, UserId u, std::size_t count) {
  struct Candidate {
    UserId v;
    long long inner;
    long long overlap;  // 1 stands in for an empty overlap (similarity 0)
  };
  std::vector<Candidate> candidates;
  candidates.reserve(state.n());
  const auto lu = state.likes_by_item(u);
  const auto du = state.dislikes_by_item(u);
  for (UserId v = 0; v < state.n(); ++v) {
    if (v == u) continue;
    const auto lv = state.likes_by_item(v);
    const auto dv = state.dislikes_by_item(v);
    const auto agree = static_cast<long long>(and_count(lu, lv) + and_count(du, dv));
    const auto disagree = static_cast<long long>(and_count(lu, dv) + and_count(du, lv));
    const long long overlap = agree + disagree;
    candidates.push_back({v, agree - disagree, overlap == 0 ? 1 : overlap});
  }
  const std::size_t keep = std::min(count, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                    candidates.end(), [](const Candidate& a, const Candidate& b) {
                      const long long lhs = a.inner * b.overlap;
                      const long long rhs = b.inner * a.overlap;
                      return lhs != rhs ? lhs > rhs : a.v < b.v;
                    });
  std::vector<UserId> out;
  out.reserve(keep);
  for (std::size_t j = 0; j < keep; ++j) out.push_back(candidates[j].v);
  return out;
}

ItemId popularity_recommend(const SessionState& state, UserId u, PopularityMode mode,
                            double epsilon, Rng& rng) {
  if (rng.bernoulli(epsilon)) return random_unconsumed(state, u, rng);
  std::vector<BitRows::Word> voters;
  if (mode.friends == 0) {
    voters = all_users(state.n());
  } else {
    voters.assign((state.n() + BitRows::kWordBits - 1) / BitRows::kWordBits, 0);
    for (UserId v : most_similar_users(state, u, mode.friends))
      voters[v / BitRows::kWordBits] |= BitRows::Word{1} << (v % BitRows::kWordBits);
  }
  return most_voted(state, u, kernels::like_votes(state, voters), rng);
}

CollaborativeGreedyPolicy::CollaborativeGreedyPolicy(AlgorithmParams params)
    : params_(std::move(params)) {
  params_.validate();
}

StepPlan CollaborativeGreedyPolicy::plan(const SessionState& state, std::uint64_t step_seed,
                                         int threads) const {
  return step(state, params_, step_seed, threads);
}

StepPlan OraclePolicy::plan(const SessionState& state, std::uint64_t step_seed,
                            int threads) const {
  return plan_each(state, step_seed, threads, [&](UserId u, Rng& rng) {
    return oracle_recommend(state, u, *truth_, rng);
  });
}

StepPlan RandomPolicy::plan(const SessionState& state, std::uint64_t step_seed,
                            int threads) const {
  return plan_each(state, step_seed, threads,
                   [&](UserId u, Rng& rng) { return random_recommend(state, u, rng); });
}

PopularityPolicy::PopularityPolicy(PopularityMode mode, double epsilon)
    : mode_(mode), epsilon_(epsilon) {
  if (!(epsilon_ >= 0.0 && epsilon_ <= 1.0)) throw DomainError("epsilon must lie in [0,1]");
}

StepPlan PopularityPolicy::plan(const SessionState& state, std::uint64_t step_seed,
                                int threads) const {
  if (mode_.friends != 0)
    return plan_each(state, step_seed, threads, [&](UserId u, Rng& rng) {
      return popularity_recommend(state, u, mode_, epsilon_, rng);
    });
  // Global votes are the same for every user; count them once.
  const auto votes = kernels::like_votes(state, all_users(state.n()));
  return plan_each(state, step_seed, threads, [&](UserId u, Rng& rng) {
    if (rng.bernoulli(epsilon_)) return random_unconsumed(state, u, rng);
    return most_voted(state, u, votes, rng);
  });
}

std::unique_ptr<Policy> make_policy(PolicyKind kind, const PolicyOptions& options,
                                    const Environment& truth) {
  switch (kind) {
    case PolicyKind::CollaborativeGreedy:
      return std::make_unique<CollaborativeGreedyPolicy>(options.greedy);
    case PolicyKind::Oracle: return std::make_unique<OraclePolicy>(truth);
    case PolicyKind::Random: return std::make_unique<RandomPolicy>();
    case PolicyKind::GlobalPopularity:
      return std::make_unique<PopularityPolicy>(PopularityMode{0}, options.popularity_epsilon);
    case PolicyKind::PafLite:
      if (options.paf_friends == 0) throw ConfigError("paf.W must be positive");
      return std::make_unique<PopularityPolicy>(PopularityMode{options.paf_friends},
                                                options.paf_epsilon);
  }
  throw ConfigError("unknown policy kind");
}

}  // namespace collabrec
