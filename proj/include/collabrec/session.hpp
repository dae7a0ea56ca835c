#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "collabrec/bits.hpp"
#include "collabrec/random.hpp"
#include "json.hpp"

namespace collabrec {

using UserId = std::size_t;
using ItemId = std::size_t;
/// -1 dislike, +1 like, 0 no rating (unrated, or missing in replay data).
using Rating = std::int8_t;

/// Mutable state of one online session: revealed ratings, consumed items,
/// the shared joint-exploration ordering sigma and the joint-step counter.
///
/// An item is "jointly explored" once it lies in the sigma-prefix of length
/// joint_count(). The prefix is global, not per user.
///
/// Besides the dense rating table the state keeps bit indexes used by the
/// parallel kernels: per-user like/dislike sets keyed by sigma position and by
/// item, and per-item sets of users who liked / rated it.
class SessionState {
 public:
  /// Throws ConfigError for zero users or items.
  static SessionState create(std::size_t n, std::size_t m, std::uint64_t seed);

  /// A session with an explicit ordering (must be a permutation of [m]).
  SessionState(std::size_t n, std::vector<ItemId> sigma);

  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }
  std::size_t t() const { return t_; }
  std::size_t joint_count() const { return joint_count_; }
  std::span<const ItemId> sigma() const { return sigma_; }
  std::size_t sigma_position(ItemId item) const { return sigma_pos_[item]; }

  Rating rating(UserId u, ItemId i) const { return ratings_[u * m_ + i]; }
  std::span<const Rating> ratings_of(UserId u) const { return {ratings_.data() + u * m_, m_}; }
  bool consumed(UserId u, ItemId i) const { return consumed_.test(u, i); }
  std::size_t consumed_count(UserId u) const { return consumed_count_[u]; }
  std::vector<ItemId> unconsumed_items(UserId u) const;

  /// Applies one time step: user u consumes recommendations[u] and gives
  /// ratings[u]. A zero rating marks the item consumed without storing a
  /// rating. Throws ContractViolation (and leaves the state untouched) if any
  /// recommended item was already consumed or an argument is malformed.
  void record_step(std::span<const ItemId> recommendations, std::span<const Rating> ratings,
                   bool was_joint);

  bool jointly_explored(ItemId i) const { return sigma_pos_[i] < joint_count_; }
  std::vector<ItemId> jointly_explored_items() const;

  /// Ratings of u masked to jointly explored items, indexed by item.
  std::vector<Rating> revealed_joint_vector(UserId u) const;

  /// The sigma-earliest item u has not consumed. Throws ExhaustedError.
  ItemId next_joint_item(UserId u) const;

  // Bit indexes for the kernels.
  std::span<const BitRows::Word> likes_by_position(UserId u) const { return like_pos_.row(u); }
  std::span<const BitRows::Word> dislikes_by_position(UserId u) const {
    return dislike_pos_.row(u);
  }
  std::span<const BitRows::Word> likes_by_item(UserId u) const { return like_item_.row(u); }
  std::span<const BitRows::Word> dislikes_by_item(UserId u) const {
    return dislike_item_.row(u);
  }
  std::span<const BitRows::Word> consumed_row(UserId u) const { return consumed_.row(u); }
  std::span<const BitRows::Word> users_liking(ItemId i) const { return item_likers_.row(i); }
  std::span<const BitRows::Word> users_rating(ItemId i) const { return item_raters_.row(i); }

  nlohmann::json to_json() const;
  static SessionState from_json(const nlohmann::json& doc);

 private:
  void store(UserId u, ItemId i, Rating r);

  std::size_t n_;
  std::size_t m_;
  std::size_t t_ = 0;
  std::size_t joint_count_ = 0;
  std::vector<ItemId> sigma_;
  std::vector<std::size_t> sigma_pos_;
  std::vector<Rating> ratings_;
  std::vector<std::size_t> consumed_count_;
  BitRows consumed_;      // n x m
  BitRows like_pos_;      // n x m, keyed by sigma position
  BitRows dislike_pos_;   // n x m, keyed by sigma position
  BitRows like_item_;     // n x m
  BitRows dislike_item_;  // n x m
  BitRows item_likers_;   // m x n
  BitRows item_raters_;   // m x n
};

/// Uniformly random unconsumed item of u. Throws ExhaustedError.
ItemId random_unconsumed(const SessionState& state, UserId u, Rng& rng);

}  // namespace collabrec
