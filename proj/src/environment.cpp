#include "collabrec/environment.hpp"

#include "collabrec/errors.hpp"
#include "collabrec/random.hpp"

namespace collabrec {

Environment Environment::synthetic(Population population, std::uint64_t rating_seed) {
  return Environment(Synthetic{std::move(population), rating_seed});
}

Environment Environment::replay(std::shared_ptr<const RatingMatrix> matrix) {
  if (!matrix || matrix->n() == 0 || matrix->m() == 0)
    throw ConfigError("replay needs a non-empty rating matrix");
  return Environment(std::move(matrix));
}

std::size_t Environment::n() const {
  if (const auto* s = std::get_if<Synthetic>(&source_)) return s->population.n();
  return std::get<Replay>(source_)->n();
}

std::size_t Environment::m() const {
  if (const auto* s = std::get_if<Synthetic>(&source_)) return s->population.m();
  return std::get<Replay>(source_)->m();
}

const Population* Environment::population() const {
  const auto* s = std::get_if<Synthetic>(&source_);
  return s ? &s->population : nullptr;
}

Rating Environment::draw_rating(UserId u, ItemId i) const {
  if (const auto* s = std::get_if<Synthetic>(&source_)) {
    const double draw = to_unit(derive_seed(s->rating_seed, u, i));
    return draw < s->population.prob(u, i) ? Rating{1} : Rating{-1};
  }
  return std::get<Replay>(source_)->at(u, i);
}

bool Environment::likable(UserId u, ItemId i) const {
  if (const auto* s = std::get_if<Synthetic>(&source_)) return s->population.likable(u, i);
  return std::get<Replay>(source_)->at(u, i) == 1;
}

}  // namespace collabrec
