#pragma once

#include <string>
#include <vector>

#include "endocapm/feasibility.hpp"

namespace endocapm {

/// Round-trip-safe decimal rendering (17 significant digits, C locale).
std::string format_double(double value);

/// Fixed dialect: comma delimiter, '.' decimal point, LF line endings,
/// mandatory header. Two runs over the same records are byte-identical.
std::string sweep_records_to_csv(const std::vector<SweepRecord>& records);

/// Writes via a temporary file in the same directory and renames it into
/// place, so a failed run never leaves a partial output file.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace endocapm
