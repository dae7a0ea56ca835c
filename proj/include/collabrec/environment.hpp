#pragma once

#include <cstdint>
#include <memory>
#include <variant>

#include "collabrec/data_ingest.hpp"
#include "collabrec/latent_model.hpp"
#include "collabrec/session.hpp"

namespace collabrec {

/// Rating source for a simulation: Bernoulli draws from a latent population,
/// or lookups in a fixed quantized matrix.
class Environment {
 public:
  /// Rating of (u, i) is +1 with probability p_ui, drawn from a stream keyed
  /// by (rating_seed, u, i), so it does not depend on when it is requested.
  static Environment synthetic(Population population, std::uint64_t rating_seed);
  static Environment replay(std::shared_ptr<const RatingMatrix> matrix);

  std::size_t n() const;
  std::size_t m() const;
  bool is_synthetic() const { return std::holds_alternative<Synthetic>(source_); }

  /// nullptr in replay mode.
  const Population* population() const;

  /// +-1 in synthetic mode; -1/0/+1 in replay mode (0 = missing entry).
  Rating draw_rating(UserId u, ItemId i) const;

  /// Ground-truth likability: p_ui > 1/2, or matrix entry == +1 in replay.
  bool likable(UserId u, ItemId i) const;

 private:
  struct Synthetic {
    Population population;
    std::uint64_t rating_seed;
  };
  using Replay = std::shared_ptr<const RatingMatrix>;

  explicit Environment(std::variant<Synthetic, Replay> source) : source_(std::move(source)) {}

  std::variant<Synthetic, Replay> source_;
};

}  // namespace collabrec
