#pragma once

// Batched, OpenMP-parallel kernels behind Collaborative-Greedy and the
// popularity baselines. The serial definitions in reference.hpp compute the
// same quantities straight from the dense rating vectors and are used to
// check these.

#include <cstdint>
#include <span>
#include <vector>

#include "collabrec/bits.hpp"
#include "collabrec/collab_greedy.hpp"
#include "collabrec/session.hpp"

namespace collabrec::kernels {

/// Inner product and overlap size of two users' jointly explored ratings.
struct PairStats {
  long long inner = 0;
  std::size_t overlap = 0;
};

PairStats joint_pair_stats(const SessionState& state, UserId u, UserId v);

inline bool passes_threshold(const PairStats& s, double theta, bool exclude_empty_overlap) {
  if (exclude_empty_overlap && s.overlap == 0) return false;
  return static_cast<double>(s.inner) >= theta * static_cast<double>(s.overlap);
}

/// Row u holds the neighborhood of user u as a bit set over users.
BitRows neighbor_sets(const SessionState& state, double theta, bool exclude_empty_overlap,
                      int threads);

/// Bit set (over users) of u's neighborhood.
std::vector<BitRows::Word> neighbor_row(const SessionState& state, UserId u, double theta,
                                        bool exclude_empty_overlap);

/// Highest-scoring unconsumed item for u given a neighbor bit set; ties are
/// broken with a single rng.index() draw over the ties in item order.
ItemId best_item(const SessionState& state, UserId u, std::span<const BitRows::Word> neighbors,
                 Rng& rng);

/// Exploitation recommendations for all users. User u's tie-break stream is
/// derive_seed(step_seed, Stream::User, u).
std::vector<ItemId> exploit_all(const SessionState& state, const AlgorithmParams& params,
                                std::uint64_t step_seed, int threads);

/// Number of +1 ratings per item among the users in `voters` (bit set).
std::vector<std::size_t> like_votes(const SessionState& state,
                                    std::span<const BitRows::Word> voters);

}  // namespace collabrec::kernels
