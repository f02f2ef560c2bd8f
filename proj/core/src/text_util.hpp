#pragma once

// Line/token helpers shared by the text-format readers.

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "imlg/design.hpp"

namespace imlg::detail {

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

inline std::string_view strip_comment(std::string_view line) {
  const auto hash = line.find('#');
  return hash == std::string_view::npos ? line : line.substr(0, hash);
}

inline std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <class Error = DesignError>
long long parse_integer(std::string_view tok, std::size_t line) {
  long long v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size())
    throw Error(fmt::format("syntax error: expected integer, got '{}'", tok), line);
  return v;
}

template <class Error = DesignError>
int parse_int(std::string_view tok, std::size_t line) {
  const long long v = parse_integer<Error>(tok, line);
  if (v < INT32_MIN || v > INT32_MAX)
    throw Error(fmt::format("integer out of range: '{}'", tok), line);
  return static_cast<int>(v);
}

template <class Error = DesignError>
double parse_double(std::string_view tok, std::size_t line) {
  double v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size())
    throw Error(fmt::format("syntax error: expected number, got '{}'", tok), line);
  return v;
}

}  // namespace imlg::detail
