#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Small helpers for the line-oriented text formats.
namespace dnsbot::text {

std::vector<std::string_view> split(std::string_view s, char sep);

std::string_view trim(std::string_view s);

std::string to_lower(std::string_view s);

std::optional<std::int64_t> parse_int(std::string_view s);

/// Parses a finite double; rejects trailing garbage, NaN and infinities.
std::optional<double> parse_double(std::string_view s);

/// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double v);

/// Reads one line, dropping a trailing '\r'. Returns false at end of input.
bool read_line(std::istream& in, std::string& line);

}  // namespace dnsbot::text
