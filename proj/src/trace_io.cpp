#include <charconv>
#include <istream>
#include <ostream>
#include <string>

#include "finito/io.hpp"

namespace finito::io {

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw Error("cannot format double");
  return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw InvalidArgument("not a number: '" + std::string(text) + "'");
  return v;
}

void write_trace(std::ostream& out, const std::vector<TraceRecord>& records) {
  out << kTraceHeader << '\n';
  for (const TraceRecord& r : records) {
    out << format_double(r.epoch) << ',' << format_double(r.objective) << ','
        << format_double(r.suboptimality) << ',' << format_double(r.grad_norm) << ','
        << format_double(r.wall_ms) << ',' << r.solver << ',' << r.sampling << ','
        << r.seed << '\n';
  }
}

std::vector<TraceRecord> read_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty trace file, expected header", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader)
    throw ParseError("trace header mismatch: expected '" + std::string(kTraceHeader) +
                         "', found '" + line + "'",
                     1);

  std::vector<TraceRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest = line;
    for (;;) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 8)
      throw ParseError("expected 8 fields, found " + std::to_string(fields.size()),
                       line_no);
    TraceRecord r;
    double* numeric[] = {&r.epoch, &r.objective, &r.suboptimality, &r.grad_norm,
                         &r.wall_ms};
    std::size_t column = 1;
    for (std::size_t f = 0; f < 5; ++f) {
      try {
        *numeric[f] = parse_double(fields[f]);
      } catch (const InvalidArgument&) {
        throw ParseError("non-numeric field '" + std::string(fields[f]) + "'", line_no,
                         column);
      }
      column += fields[f].size() + 1;
    }
    r.solver = std::string(fields[5]);
    r.sampling = std::string(fields[6]);
    const std::string_view seed = fields[7];
    const auto [ptr, ec] = std::from_chars(seed.data(), seed.data() + seed.size(), r.seed);
    if (ec != std::errc() || ptr != seed.data() + seed.size() || seed.empty())
      throw ParseError("non-numeric seed '" + std::string(seed) + "'", line_no);
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace finito::io
