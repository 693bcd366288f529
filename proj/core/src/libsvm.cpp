#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>

#include "frsd/error.hpp"
#include "frsd/objectives.hpp"

namespace frsd {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::string_view next_token(std::string_view& rest) {
  std::size_t start = 0;
  while (start < rest.size() && is_space(rest[start])) ++start;
  std::size_t end = start;
  while (end < rest.size() && !is_space(rest[end])) ++end;
  const std::string_view token = rest.substr(start, end - start);
  rest.remove_prefix(end);
  return token;
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_index(std::string_view s, std::size_t& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

Dataset parse_libsvm(const std::string& text) {
  Dataset ds;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view rest(text.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;

    const std::string_view label_token = next_token(rest);
    if (label_token.empty()) continue;
    double label = 0.0;
    if (!parse_double(label_token, label)) {
      throw ParseError(line_no, "malformed label '" + std::string(label_token) + "'");
    }
    SparseRow row;
    if (label == 1.0) {
      row.label = 1;
    } else if (label == -1.0 || label == 0.0) {
      row.label = -1;
    } else {
      throw LabelError(line_no, "label must be -1, 0, +1 or 1");
    }

    std::size_t last_index = 0;
    for (std::string_view token = next_token(rest); !token.empty();
         token = next_token(rest)) {
      const auto colon = token.find(':');
      std::size_t index = 0;
      double value = 0.0;
      if (colon == std::string_view::npos || !parse_index(token.substr(0, colon), index) ||
          !parse_double(token.substr(colon + 1), value)) {
        throw ParseError(line_no, "malformed feature '" + std::string(token) + "'");
      }
      if (index == 0) throw ParseError(line_no, "feature indices start at 1");
      if (index <= last_index) {
        throw ParseError(line_no, "feature indices must strictly increase");
      }
      last_index = index;
      row.features.emplace_back(index, value);
    }
    ds.max_index = std::max(ds.max_index, last_index);
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

Dataset read_libsvm_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_libsvm(buffer.str());
}

}  // namespace frsd
