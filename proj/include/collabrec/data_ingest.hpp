#pragma once

// Replay matrices from raw star-rating dumps: top users x top items, ratings
// thresholded to +-1, absent entries 0.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "collabrec/session.hpp"
#include "json.hpp"

namespace collabrec {

enum class TripleFormat {
  CommaTriples,        // user,item,stars[,timestamp]
  DoubleColonTriples,  // user::item::stars[::timestamp]
};

TripleFormat parse_triple_format(std::string_view text);

struct RatingTriple {
  std::string user_id;
  std::string item_id;
  double stars = 0.0;
};

struct ParseReport {
  std::vector<RatingTriple> triples;
  std::size_t lines = 0;      // non-blank lines, header included
  std::size_t malformed = 0;  // lines that were neither a triple nor a header
};

/// A first line whose rating field is not numeric is taken as a header and
/// skipped. Throws FormatError when more than 1% of lines are malformed.
ParseReport parse_ratings(std::istream& in, TripleFormat format);

/// Throws IoError if the file cannot be opened.
ParseReport parse_ratings_csv(const std::filesystem::path& path, TripleFormat format);

inline Rating quantize(double stars, double threshold = 4.0) {
  return stars >= threshold ? Rating{1} : Rating{-1};
}

class RatingMatrix {
 public:
  RatingMatrix() = default;
  RatingMatrix(std::size_t n, std::size_t m, std::vector<Rating> values,
               std::vector<std::string> row_ids, std::vector<std::string> col_ids);

  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }
  Rating at(std::size_t u, std::size_t i) const { return values_[u * m_ + i]; }
  std::span<const Rating> values() const { return values_; }
  const std::vector<std::string>& row_ids() const { return row_ids_; }
  const std::vector<std::string>& col_ids() const { return col_ids_; }

  /// Fraction of nonzero entries.
  double density() const;

 private:
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::vector<Rating> values_;
  std::vector<std::string> row_ids_;
  std::vector<std::string> col_ids_;
};

struct SubmatrixResult {
  RatingMatrix matrix;
  std::size_t duplicates = 0;  // repeated (user, item) pairs, last one kept
};

/// Picks the m_top items with the most ratings, then the n_top users with the
/// most ratings among those items. Count ties go to the lexicographically
/// smaller id. Throws ConfigError when the data has too few users or items.
SubmatrixResult dense_submatrix(std::span<const RatingTriple> triples, std::size_t n_top,
                                std::size_t m_top, double threshold = 4.0);

/// FNV-1a 64 of a file's bytes, as 16 hex digits.
std::string file_hash(const std::filesystem::path& path);

/// Writes <dir>/matrix.csv (rows of -1/0/1) and <dir>/matrix.manifest.json.
std::filesystem::path write_matrix(const RatingMatrix& matrix, const std::filesystem::path& dir,
                                   double threshold, const std::string& source_hash);

/// Loads a matrix CSV and its sibling manifest; the density recomputed from
/// the values must match the manifest.
RatingMatrix load_matrix(const std::filesystem::path& csv_path);

std::filesystem::path manifest_path_for(const std::filesystem::path& csv_path);

}  // namespace collabrec
