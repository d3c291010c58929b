#include "creamkit/format.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace creamkit {

namespace {

std::string chars(double v, std::chars_format fmt) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, fmt);
  if (ec != std::errc()) return "nan";
  return std::string(buf.data(), ptr);
}

}  // namespace

std::string format_shortest(double v) { return chars(v, std::chars_format::general); }

std::string format_decimal(double v) {
  auto s = chars(v, std::chars_format::fixed);
  if (s.find('.') == std::string::npos && s != "nan" && s != "inf" && s != "-inf") s += ".0";
  return s;
}

std::string format_scientific(double v) {
  std::array<char, 64> buf{};
  const int n = std::snprintf(buf.data(), buf.size(), "%.6e", v);
  return std::string(buf.data(), static_cast<std::size_t>(n));
}

std::string format_interval(double lower, double upper) {
  return "[" + format_decimal(lower) + ", " + format_decimal(upper) + "]";
}

}  // namespace creamkit
