#pragma once

#include <string>
#include <vector>

namespace fracwave::io {

/// Shortest-form decimal with 17 significant digits, '.' radix, "nan"/"inf"
/// for non-finite values. Independent of the global locale.
std::string format_double(double v);

/// Writes text to path atomically enough for our purposes (truncate + write);
/// throws std::runtime_error on failure.
void write_file(const std::string& path, const std::string& content);

/// Creates a directory (and parents) if missing.
void ensure_dir(const std::string& path);

std::string join_path(const std::string& dir, const std::string& name);

/// 64-bit FNV-1a, printed as 16 hex digits.
std::string fnv1a_hex(const std::string& data);

/// Simple CSV writer: header plus rows of doubles.
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns);

}  // namespace fracwave::io
