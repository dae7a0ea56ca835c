#include "collabrec/session.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "collabrec/errors.hpp"
#include "collabrec/random.hpp"

namespace collabrec {

SessionState SessionState::create(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (n == 0 || m == 0) throw ConfigError("session needs at least one user and one item");
  std::vector<ItemId> sigma(m);
  std::iota(sigma.begin(), sigma.end(), ItemId{0});
  Rng rng(seed);
  std::shuffle(sigma.begin(), sigma.end(), rng.engine());
  return SessionState(n, std::move(sigma));
}

SessionState::SessionState(std::size_t n, std::vector<ItemId> sigma)
    : n_(n), m_(sigma.size()), sigma_(std::move(sigma)), sigma_pos_(m_, m_),
      ratings_(n_ * m_, 0), consumed_count_(n_, 0), consumed_(n_, m_), like_pos_(n_, m_),
      dislike_pos_(n_, m_), like_item_(n_, m_), dislike_item_(n_, m_), item_likers_(m_, n_),
      item_raters_(m_, n_) {
  if (n_ == 0 || m_ == 0) throw ConfigError("session needs at least one user and one item");
  for (std::size_t pos = 0; pos < m_; ++pos) {
    const ItemId item = sigma_[pos];
    if (item >= m_ || sigma_pos_[item] != m_) throw ConfigError("sigma is not a permutation");
    sigma_pos_[item] = pos;
  }
}

std::vector<ItemId> SessionState::unconsumed_items(UserId u) const {
  std::vector<ItemId> items;
  items.reserve(m_ - consumed_count_[u]);
  for (ItemId i = 0; i < m_; ++i)
    if (!consumed_.test(u, i)) items.push_back(i);
  return items;
}

void SessionState::store(UserId u, ItemId i, Rating r) {
  consumed_.set(u, i);
  ++consumed_count_[u];
  if (r == 0) return;
  ratings_[u * m_ + i] = r;
  const std::size_t pos = sigma_pos_[i];
  item_raters_.set(i, u);
  if (r > 0) {
    like_pos_.set(u, pos);
    like_item_.set(u, i);
    item_likers_.set(i, u);
  } else {
    dislike_pos_.set(u, pos);
    dislike_item_.set(u, i);
  }
}

void SessionState::record_step(std::span<const ItemId> recommendations,
                               std::span<const Rating> ratings, bool was_joint) {
  if (recommendations.size() != n_ || ratings.size() != n_)
    throw ContractViolation("record_step needs exactly one item and rating per user");
  for (UserId u = 0; u < n_; ++u) {
    const ItemId item = recommendations[u];
    if (item >= m_) throw ContractViolation("recommended item out of range");
    if (consumed_.test(u, item))
      throw ContractViolation("item " + std::to_string(item) + " re-recommended to user " +
                              std::to_string(u));
    if (ratings[u] < -1 || ratings[u] > 1) throw ContractViolation("rating must be -1, 0 or +1");
  }
  for (UserId u = 0; u < n_; ++u) store(u, recommendations[u], ratings[u]);
  ++t_;
  if (was_joint) ++joint_count_;
}

std::vector<ItemId> SessionState::jointly_explored_items() const {
  return {sigma_.begin(), sigma_.begin() + static_cast<std::ptrdiff_t>(joint_count_)};
}

std::vector<Rating> SessionState::revealed_joint_vector(UserId u) const {
  std::vector<Rating> out(m_, 0);
  for (std::size_t pos = 0; pos < joint_count_; ++pos) {
    const ItemId item = sigma_[pos];
    out[item] = rating(u, item);
  }
  return out;
}

ItemId SessionState::next_joint_item(UserId u) const {
  for (ItemId item : sigma_)
    if (!consumed_.test(u, item)) return item;
  throw ExhaustedError("user " + std::to_string(u) + " has consumed every item");
}

nlohmann::json SessionState::to_json() const {
  nlohmann::json ratings = nlohmann::json::array();
  nlohmann::json consumed = nlohmann::json::array();
  for (UserId u = 0; u < n_; ++u) {
    std::vector<ItemId> items;
    for (ItemId i = 0; i < m_; ++i) {
      if (!consumed_.test(u, i)) continue;
      items.push_back(i);
      if (const Rating r = rating(u, i); r != 0) ratings.push_back({u, i, r});
    }
    consumed.push_back(std::move(items));
  }
  return {{"n", n_},         {"m", m_},           {"t", t_},
          {"joint_count", joint_count_}, {"sigma", sigma_}, {"ratings", std::move(ratings)},
          {"consumed", std::move(consumed)}};
}

SessionState SessionState::from_json(const nlohmann::json& doc) {
  try {
    SessionState state(doc.at("n").get<std::size_t>(), doc.at("sigma").get<std::vector<ItemId>>());
    if (state.m_ != doc.at("m").get<std::size_t>()) throw FormatError("snapshot: m mismatch");
    state.t_ = doc.at("t").get<std::size_t>();
    state.joint_count_ = doc.at("joint_count").get<std::size_t>();
    if (state.joint_count_ > state.t_) throw FormatError("snapshot: joint_count exceeds t");

    std::vector<Rating> pending(state.n_ * state.m_, 0);
    for (const auto& triple : doc.at("ratings")) {
      const auto u = triple.at(0).get<std::size_t>();
      const auto i = triple.at(1).get<std::size_t>();
      const auto r = triple.at(2).get<int>();
      if (u >= state.n_ || i >= state.m_ || (r != 1 && r != -1))
        throw FormatError("snapshot: bad rating triple");
      pending[u * state.m_ + i] = static_cast<Rating>(r);
    }
    const auto& consumed = doc.at("consumed");
    if (consumed.size() != state.n_) throw FormatError("snapshot: consumed list per user");
    for (UserId u = 0; u < state.n_; ++u) {
      for (const auto& entry : consumed[u]) {
        const auto i = entry.get<std::size_t>();
        if (i >= state.m_ || state.consumed_.test(u, i))
          throw FormatError("snapshot: bad consumed entry");
        state.store(u, i, pending[u * state.m_ + i]);
        pending[u * state.m_ + i] = 0;
      }
      if (state.consumed_count_[u] != state.t_)
        throw FormatError("snapshot: consumed count differs from t");
    }
    if (std::any_of(pending.begin(), pending.end(), [](Rating r) { return r != 0; }))
      throw FormatError("snapshot: rating for an unconsumed item");
    return state;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("snapshot: ") + e.what());
  }
}

ItemId random_unconsumed(const SessionState& state, UserId u, Rng& rng) {
  const std::size_t left = state.m() - state.consumed_count(u);
  if (left == 0) throw ExhaustedError("user " + std::to_string(u) + " has consumed every item");
  std::size_t target = rng.index(left);
  for (ItemId i = 0; i < state.m(); ++i) {
    if (state.consumed(u, i)) continue;
    if (target == 0) return i;
    --target;
  }
  throw ExhaustedError("unconsumed count out of sync");
}

}  // namespace collabrec
