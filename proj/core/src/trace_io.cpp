#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "frsd/engine.hpp"
#include "frsd/error.hpp"

namespace frsd {

namespace {

constexpr const char* kHeader = "k,residual,consensus_violation,grad_norm,cum_broadcast_scalars";

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
T parse_field(std::string_view text, std::size_t line) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError(line, "bad field '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << kHeader << '\n';
  for (const TracePoint& pt : trace.points) {
    out << pt.k << ',' << format_double(pt.residual) << ','
        << format_double(pt.consensus_violation) << ',' << format_double(pt.grad_norm) << ','
        << pt.cum_broadcast << '\n';
  }
}

void write_trace_csv_file(const std::string& path, const Trace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_trace_csv(out, trace);
  if (!out) throw Error("failed writing '" + path + "'");
}

std::vector<TracePoint> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw ParseError(1, "missing trace header");
  std::vector<TracePoint> points;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest = line;
    for (;;) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 5) throw ParseError(number, "expected 5 fields");
    TracePoint pt;
    pt.k = parse_field<std::size_t>(fields[0], number);
    pt.residual = parse_field<double>(fields[1], number);
    pt.consensus_violation = parse_field<double>(fields[2], number);
    pt.grad_norm = parse_field<double>(fields[3], number);
    pt.cum_broadcast = parse_field<std::uint64_t>(fields[4], number);
    points.push_back(pt);
  }
  return points;
}

}  // namespace frsd
