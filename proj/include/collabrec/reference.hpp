#pragma once

// Serial reference implementations written directly from the definitions.
// Slow; kept for tests and the benchmark.

#include <cstdint>
#include <span>
#include <vector>

#include "collabrec/collab_greedy.hpp"
#include "collabrec/session.hpp"

namespace collabrec::reference {

bool are_neighbors(const SessionState& state, UserId u, UserId v, double theta,
                   bool exclude_empty_overlap);

std::vector<UserId> neighborhood(const SessionState& state, UserId u, double theta,
                                 bool exclude_empty_overlap);

Score score(const SessionState& state, ItemId i, std::span<const UserId> neighbors);

ItemId exploit_recommend(const SessionState& state, UserId u, const AlgorithmParams& params,
                         Rng& rng);

std::vector<ItemId> exploit_all(const SessionState& state, const AlgorithmParams& params,
                                std::uint64_t step_seed);

}  // namespace collabrec::reference
