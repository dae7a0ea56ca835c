#pragma once

#include <cstdint>
#include <vector>

#include "collabrec/random.hpp"
#include "collabrec/session.hpp"

namespace collabrec::testing {

/// Applies one step in which user u consumes items[u] and rates it ratings[u].
inline void apply(SessionState& state, const std::vector<ItemId>& items,
                  const std::vector<Rating>& ratings, bool joint) {
  state.record_step(items, ratings, joint);
}

/// A state after `steps` random joint / random-exploration steps with random
/// ratings. Roughly `zero_rate` of ratings are 0 (missing).
inline SessionState random_state(std::size_t n, std::size_t m, std::size_t steps,
                                  std::uint64_t seed, double zero_rate = 0.0) {
  Rng rng(seed);
  auto state = SessionState::create(n, m, seed ^ 0x5eedULL);
  for (std::size_t s = 0; s < steps; ++s) {
    const bool joint = rng.bernoulli(0.5);
    std::vector<ItemId> items(n);
    std::vector<Rating> ratings(n);
    for (UserId u = 0; u < n; ++u) {
      items[u] = joint ? state.next_joint_item(u) : random_unconsumed(state, u, rng);
      ratings[u] = rng.bernoulli(zero_rate) ? 0 : (rng.bernoulli(0.5) ? 1 : -1);
    }
    state.record_step(items, ratings, joint);
  }
  return state;
}

}  // namespace collabrec::testing
