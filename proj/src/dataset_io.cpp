#include <charconv>
#include <istream>
#include <string>
#include <tuple>
#include <vector>

#include "finito/io.hpp"

namespace finito::io {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

// Strips a trailing comment.
std::string_view content_of(std::string_view line) {
  const auto hash = line.find('#');
  return hash == std::string_view::npos ? line : line.substr(0, hash);
}

bool parse_number(std::string_view text, double& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

bool parse_index(std::string_view text, long long& out) {
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

Dataset parse_libsvm(std::istream& in, LibsvmOptions options) {
  struct Entry {
    Index row;
    Index col;
    double value;
  };
  std::vector<Entry> entries;
  std::vector<double> labels;
  long long max_index = 0;

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = content_of(raw);
    std::size_t pos = 0;
    auto next_token = [&](std::size_t& column) -> std::string_view {
      while (pos < line.size() && is_space(line[pos])) ++pos;
      const std::size_t start = pos;
      while (pos < line.size() && !is_space(line[pos])) ++pos;
      column = start + 1;
      return line.substr(start, pos - start);
    };

    std::size_t column = 0;
    const std::string_view label_token = next_token(column);
    if (label_token.empty()) continue;
    double label = 0.0;
    if (!parse_number(label_token, label))
      throw ParseError("malformed label '" + std::string(label_token) + "'", line_no,
                       column);
    const auto row = static_cast<Index>(labels.size());
    labels.push_back(label);

    long long previous = 0;
    for (;;) {
      const std::string_view token = next_token(column);
      if (token.empty()) break;
      const auto colon = token.find(':');
      if (colon == std::string_view::npos)
        throw ParseError("expected <index>:<value>, found '" + std::string(token) + "'",
                         line_no, column);
      long long index = 0;
      double value = 0.0;
      if (!parse_index(token.substr(0, colon), index))
        throw ParseError("malformed feature index in '" + std::string(token) + "'",
                         line_no, column);
      if (index == 0)
        throw ParseError("feature index 0 is invalid in 1-based format", line_no, column);
      if (index < 0)
        throw ParseError("negative feature index in '" + std::string(token) + "'",
                         line_no, column);
      if (index <= previous)
        throw ParseError("feature indices must be strictly ascending (" +
                             std::to_string(index) + " after " +
                             std::to_string(previous) + ")",
                         line_no, column);
      if (!parse_number(token.substr(colon + 1), value))
        throw ParseError("malformed feature value in '" + std::string(token) + "'",
                         line_no, column);
      if (options.d_hint && index > *options.d_hint)
        throw ParseError("feature index " + std::to_string(index) +
                             " exceeds declared dimension " +
                             std::to_string(*options.d_hint),
                         line_no, column);
      previous = index;
      max_index = std::max(max_index, index);
      entries.push_back({row, static_cast<Index>(index - 1), value});
    }
  }

  if (labels.empty()) throw ParseError("no data rows", line_no);
  const Index d = options.d_hint ? *options.d_hint : static_cast<Index>(max_index);
  if (d < 1) throw ParseError("dataset has no features", line_no);
  const auto n = static_cast<Index>(labels.size());

  Dataset out;
  const std::size_t bytes = static_cast<std::size_t>(n) * static_cast<std::size_t>(d) *
                            sizeof(double);
  if (bytes > options.memory_warning_bytes)
    out.warning = "dense feature matrix needs " + std::to_string(bytes >> 20) +
                  " MiB (" + std::to_string(n) + " x " + std::to_string(d) + ")";
  out.features = Matrix::Zero(n, d);
  for (const Entry& e : entries) out.features(e.row, e.col) = e.value;
  out.targets = Eigen::Map<const Vector>(labels.data(), n);
  return out;
}

Dataset parse_csv_dataset(std::istream& in) {
  std::vector<double> values;
  std::vector<double> labels;
  Index width = -1;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = content_of(raw);
    while (!line.empty() && is_space(line.back())) line.remove_suffix(1);
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    Index fields = 0;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      std::string_view field =
          line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
      while (!field.empty() && is_space(field.front())) field.remove_prefix(1);
      while (!field.empty() && is_space(field.back())) field.remove_suffix(1);
      double v = 0.0;
      if (!parse_number(field, v))
        throw ParseError("non-numeric field '" + std::string(field) + "'", line_no,
                         start + 1);
      (fields == 0 ? labels : values).push_back(v);
      ++fields;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields < 2) throw ParseError("row needs a label and at least one feature", line_no);
    if (width < 0) width = fields - 1;
    if (fields - 1 != width)
      throw ParseError("row has " + std::to_string(fields - 1) + " features, expected " +
                           std::to_string(width),
                       line_no);
  }
  if (labels.empty()) throw ParseError("no data rows", line_no);
  Dataset out;
  const auto n = static_cast<Index>(labels.size());
  out.features = Eigen::Map<const Matrix>(values.data(), n, width);
  out.targets = Eigen::Map<const Vector>(labels.data(), n);
  return out;
}

void normalize_binary_labels(Vector& targets) {
  const bool zero_one = (targets.array() == 0.0 || targets.array() == 1.0).all();
  if (zero_one && (targets.array() == 0.0).any())
    targets = (2.0 * targets.array() - 1.0).matrix();
}

}  // namespace finito::io
