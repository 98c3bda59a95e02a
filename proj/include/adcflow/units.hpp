#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace adcflow {

// Parses a numeric literal with an optional engineering suffix.
// Accepted suffixes (case sensitive): k=1e3, M=1e6, m=1e-3, u=1e-6,
// n=1e-9, p=1e-12, f=1e-15. Plain decimal/scientific forms pass through.
// Returns nullopt if the token is not a number.
std::optional<double> parse_eng_value(std::string_view token);

// True if the token looks like an identifier (parameter name): leading
// alpha or underscore, then alnum/underscore.
bool is_identifier(std::string_view token);

// Engineering-style formatting for reports ("1.234m", "56.7u", ...).
std::string format_eng(double value, int digits = 4);

// FNV-1a, used for config hashes and cache record checksums.
std::uint64_t fnv1a(std::string_view data,
                    std::uint64_t seed = 0xcbf29ce484222325ull);

// Exact double<->text round trip (hexfloat).
std::string double_to_hex(double v);
std::optional<double> double_from_hex(std::string_view text);

}  // namespace adcflow
