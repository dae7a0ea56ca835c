#include "collabrec/data_ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>

#include "collabrec/errors.hpp"

namespace collabrec {
namespace {

std::vector<std::string_view> split(std::string_view line, std::string_view sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    parts.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + sep.size();
  }
  return parts;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::optional<double> parse_stars(std::string_view text) {
  const auto value = parse_number(text);
  if (!value || !std::isfinite(*value) || *value < 0.0) return std::nullopt;
  return value;
}

}  // namespace

TripleFormat parse_triple_format(std::string_view text) {
  if (text == "comma" || text == "csv") return TripleFormat::CommaTriples;
  if (text == "double-colon" || text == "dat" || text == "::")
    return TripleFormat::DoubleColonTriples;
  throw ConfigError("unknown rating format '" + std::string(text) +
                    "' (expected comma or double-colon)");
}

ParseReport parse_ratings(std::istream& in, TripleFormat format) {
  const std::string_view sep = format == TripleFormat::CommaTriples ? "," : "::";
  ParseReport report;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    ++report.lines;
    const auto fields = split(view, sep);
    const bool shaped = fields.size() == 3 || fields.size() == 4;
    const auto stars = shaped ? parse_stars(trim(fields[2])) : std::nullopt;
    const bool is_first = std::exchange(first, false);
    if (!stars || trim(fields[0]).empty() || trim(fields[1]).empty()) {
      const bool header = is_first && shaped && !parse_number(trim(fields[2]));
      if (!header) ++report.malformed;
      continue;
    }
    report.triples.push_back(
        {std::string(trim(fields[0])), std::string(trim(fields[1])), *stars});
  }
  if (report.malformed * 100 > report.lines)
    throw FormatError(fmt::format("{} of {} lines malformed (limit 1%)", report.malformed,
                                  report.lines));
  return report;
}

ParseReport parse_ratings_csv(const std::filesystem::path& path, TripleFormat format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_ratings(in, format);
}

RatingMatrix::RatingMatrix(std::size_t n, std::size_t m, std::vector<Rating> values,
                           std::vector<std::string> row_ids, std::vector<std::string> col_ids)
    : n_(n), m_(m), values_(std::move(values)), row_ids_(std::move(row_ids)),
      col_ids_(std::move(col_ids)) {
  if (values_.size() != n_ * m_) throw FormatError("matrix size mismatch");
  if (row_ids_.size() != n_ || col_ids_.size() != m_) throw FormatError("matrix id count mismatch");
  for (Rating r : values_)
    if (r < -1 || r > 1) throw FormatError("matrix entries must be -1, 0 or +1");
}

double RatingMatrix::density() const {
  if (values_.empty()) return 0.0;
  const auto nonzero = std::count_if(values_.begin(), values_.end(), [](Rating r) { return r; });
  return static_cast<double>(nonzero) / static_cast<double>(values_.size());
}

SubmatrixResult dense_submatrix(std::span<const RatingTriple> triples, std::size_t n_top,
                                std::size_t m_top, double threshold) {
  if (n_top == 0 || m_top == 0) throw ConfigError("n_top and m_top must be positive");

  // Dedupe (user, item), last occurrence wins.
  std::map<std::pair<std::string_view, std::string_view>, double> latest;
  SubmatrixResult result;
  for (const auto& t : triples) {
    auto [it, inserted] = latest.insert_or_assign({t.user_id, t.item_id}, t.stars);
    if (!inserted) ++result.duplicates;
  }

  auto top = [](const std::map<std::string_view, std::size_t>& counts, std::size_t want) {
    std::vector<std::pair<std::string_view, std::size_t>> ranked(counts.begin(), counts.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    ranked.resize(want);
    return ranked;
  };

  std::map<std::string_view, std::size_t> item_counts;
  for (const auto& [key, stars] : latest) ++item_counts[key.second];
  if (item_counts.size() < m_top)
    throw ConfigError(fmt::format("only {} items available, {} requested", item_counts.size(),
                                  m_top));
  const auto items = top(item_counts, m_top);
  std::unordered_map<std::string_view, std::size_t> col_of;
  for (std::size_t c = 0; c < items.size(); ++c) col_of.emplace(items[c].first, c);

  std::map<std::string_view, std::size_t> user_counts;
  for (const auto& [key, stars] : latest) {
    user_counts.try_emplace(key.first, 0);
    if (col_of.contains(key.second)) ++user_counts[key.first];
  }
  if (user_counts.size() < n_top)
    throw ConfigError(fmt::format("only {} users available, {} requested", user_counts.size(),
                                  n_top));
  const auto users = top(user_counts, n_top);
  std::unordered_map<std::string_view, std::size_t> row_of;
  for (std::size_t r = 0; r < users.size(); ++r) row_of.emplace(users[r].first, r);

  std::vector<Rating> values(n_top * m_top, 0);
  for (const auto& [key, stars] : latest) {
    const auto r = row_of.find(key.first);
    const auto c = col_of.find(key.second);
    if (r == row_of.end() || c == col_of.end()) continue;
    values[r->second * m_top + c->second] = quantize(stars, threshold);
  }
  std::vector<std::string> row_ids, col_ids;
  for (const auto& [id, count] : users) row_ids.emplace_back(id);
  for (const auto& [id, count] : items) col_ids.emplace_back(id);
  result.matrix = RatingMatrix(n_top, m_top, std::move(values), std::move(row_ids),
                               std::move(col_ids));
  return result;
}

std::string file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buffer[1 << 16];
  while (in.read(buffer, sizeof buffer) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buffer[i]);
      hash *= 0x100000001b3ULL;
    }
  }
  return fmt::format("{:016x}", hash);
}

std::filesystem::path manifest_path_for(const std::filesystem::path& csv_path) {
  auto manifest = csv_path;
  manifest.replace_extension(".manifest.json");
  return manifest;
}

std::filesystem::path write_matrix(const RatingMatrix& matrix, const std::filesystem::path& dir,
                                   double threshold, const std::string& source_hash) {
  std::filesystem::create_directories(dir);
  const auto csv_path = dir / "matrix.csv";
  {
    std::ofstream out(csv_path);
    if (!out) throw IoError("cannot write " + csv_path.string());
    for (std::size_t u = 0; u < matrix.n(); ++u) {
      for (std::size_t i = 0; i < matrix.m(); ++i) {
        if (i) out << ',';
        out << static_cast<int>(matrix.at(u, i));
      }
      out << '\n';
    }
  }
  const nlohmann::json manifest = {{"n", matrix.n()},
                                   {"m", matrix.m()},
                                   {"density", matrix.density()},
                                   {"threshold", threshold},
                                   {"source_hash", source_hash},
                                   {"row_ids", matrix.row_ids()},
                                   {"col_ids", matrix.col_ids()}};
  std::ofstream out(manifest_path_for(csv_path));
  if (!out) throw IoError("cannot write manifest in " + dir.string());
  out << manifest.dump(2) << '\n';
  return csv_path;
}

RatingMatrix load_matrix(const std::filesystem::path& csv_path) {
  std::ifstream manifest_in(manifest_path_for(csv_path));
  if (!manifest_in) throw IoError("missing manifest for " + csv_path.string());
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(manifest_in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("matrix manifest: ") + e.what());
  }
  const auto n = manifest.at("n").get<std::size_t>();
  const auto m = manifest.at("m").get<std::size_t>();

  std::ifstream in(csv_path);
  if (!in) throw IoError("cannot open " + csv_path.string());
  std::vector<Rating> values;
  values.reserve(n * m);
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto fields = split(trim(line), ",");
    if (fields.size() != m) throw FormatError(fmt::format("matrix row {} has {} columns", rows, fields.size()));
    for (auto field : fields) {
      int v = 0;
      field = trim(field);
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size() || v < -1 || v > 1)
        throw FormatError(fmt::format("matrix row {}: bad entry '{}'", rows, field));
      values.push_back(static_cast<Rating>(v));
    }
    ++rows;
  }
  if (rows != n) throw FormatError(fmt::format("matrix has {} rows, manifest says {}", rows, n));

  RatingMatrix matrix(n, m, std::move(values),
                      manifest.at("row_ids").get<std::vector<std::string>>(),
                      manifest.at("col_ids").get<std::vector<std::string>>());
  if (std::abs(matrix.density() - manifest.at("density").get<double>()) > 1e-12)
    throw FormatError("matrix density disagrees with manifest");
  return matrix;
}

}  // namespace collabrec
