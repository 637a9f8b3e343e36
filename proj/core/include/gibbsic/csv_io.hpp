#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gibbsic/criteria.hpp"

namespace gibbsic {

/// The exact sweep CSV header line (without the trailing newline).
std::string csv_header();

/// %.17g, which round-trips every finite double.
std::string format_double(double v);

/// Header plus one line per row, `\n` line endings. Throws std::runtime_error naming
/// the path on I/O failure.
void write_csv(const std::vector<CriterionReport>& rows, const std::filesystem::path& path);
std::string to_csv(const std::vector<CriterionReport>& rows);

/// Parses a file written by write_csv. Throws ValidationError on a wrong header or
/// malformed line (with its line number).
std::vector<CriterionReport> read_csv(const std::filesystem::path& path);
std::vector<CriterionReport> parse_csv(const std::string& text);

}  // namespace gibbsic
