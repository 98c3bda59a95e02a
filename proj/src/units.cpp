#include "adcflow/units.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace adcflow {

std::optional<double> parse_eng_value(std::string_view token) {
  if (token.empty()) return std::nullopt;
  const char* exponent = nullptr;
  std::string_view body = token;
  switch (token.back()) {
    case 'k': exponent = "e3"; break;
    case 'M': exponent = "e6"; break;
    case 'm': exponent = "e-3"; break;
    case 'u': exponent = "e-6"; break;
    case 'n': exponent = "e-9"; break;
    case 'p': exponent = "e-12"; break;
    case 'f': exponent = "e-15"; break;
    default: break;
  }
  if (exponent) body.remove_suffix(1);
  if (body.empty()) return std::nullopt;
  // Splice the suffix into the decimal literal so "1.5n" parses exactly
  // like "1.5e-9"; a body that already carries an exponent cannot take a
  // suffix and is rejected by strtod below.
  std::string buf(body);
  if (exponent) buf += exponent;
  char* end = nullptr;
  double value = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size()) return std::nullopt;
  return value;
}

bool is_identifier(std::string_view token) {
  if (token.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(token[0])) && token[0] != '_')
    return false;
  for (char c : token) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  return true;
}

std::string format_eng(double value, int digits) {
  if (value == 0.0) return "0";
  if (!std::isfinite(value)) return value > 0 ? "inf" : (value < 0 ? "-inf" : "nan");
  static const struct { double scale; const char* suffix; } bands[] = {
      {1e6, "M"}, {1e3, "k"}, {1.0, ""},    {1e-3, "m"},
      {1e-6, "u"}, {1e-9, "n"}, {1e-12, "p"}, {1e-15, "f"},
  };
  double mag = std::fabs(value);
  for (const auto& b : bands) {
    if (mag >= b.scale * 0.9999999) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.*g%s", digits, value / b.scale, b.suffix);
      return buf;
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, value);
  return buf;
}

std::uint64_t fnv1a(std::string_view data, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string double_to_hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

std::optional<double> double_from_hex(std::string_view text) {
  std::string buf(text);
  char* end = nullptr;
  double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size()) return std::nullopt;
  return v;
}

}  // namespace adcflow
