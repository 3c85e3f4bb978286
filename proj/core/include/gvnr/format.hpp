#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gvnr {

/// Shortest decimal that parses back to exactly the same double.
std::string format_double(double v);

/// Appends " v0 v1 ..." using format_double.
void append_values(std::string& out, std::span<const double> values);

/// Parses a full decimal literal; returns false on trailing garbage or overflow.
bool parse_double(std::string_view text, double& out);
bool parse_size(std::string_view text, std::size_t& out);

/// Splits on runs of ASCII whitespace.
std::vector<std::string_view> split_fields(std::string_view line);

/// Strips a trailing '\r' (files written on Windows).
std::string_view chomp(std::string_view line);

}  // namespace gvnr
