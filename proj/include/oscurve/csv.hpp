#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace oscurve {

/// Shortest round-trip decimal form, independent of the global locale.
std::string format_number(double x);
std::string format_number(long long x);

/// One CSV line from already formatted fields; quotes fields containing
/// separators or quotes.
std::string csv_line(const std::vector<std::string>& fields);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t value);

/// Writes to a temporary sibling file and renames it over `path`.
void atomic_write(const std::string& path, std::string_view content);

}  // namespace oscurve
