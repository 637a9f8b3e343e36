#include "gibbsic/csv_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gibbsic/error.hpp"

namespace gibbsic {

std::string csv_header() {
  std::string h;
  for (std::size_t i = 0; i < kReportColumns.size(); ++i) {
    if (i) h += ',';
    h += kReportColumns[i];
  }
  return h;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_csv(const std::vector<CriterionReport>& rows) {
  std::string out = csv_header();
  out += '\n';
  for (const auto& r : rows) {
    out += std::to_string(r.p);
    out += ',';
    out += std::to_string(r.seed);
    for (std::size_t i = 2; i < kReportColumns.size(); ++i) {
      out += ',';
      out += format_double(report_field(r, kReportColumns[i]));
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::vector<CriterionReport>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << to_csv(rows);
  out.flush();
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

namespace {

template <typename T>
T parse_number(std::string_view s, std::size_t line, std::string_view column) {
  T v{};
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw ValidationError("csv line " + std::to_string(line) + ": bad value '" + std::string(s) + "' in column " +
                          std::string(column));
  return v;
}

double parse_double(std::string_view s, std::size_t line, std::string_view column) {
  // from_chars for double is missing from older libstdc++; strtod handles nan/inf too.
  std::string tmp(s);
  char* endp = nullptr;
  const double v = std::strtod(tmp.c_str(), &endp);
  if (tmp.empty() || endp != tmp.c_str() + tmp.size())
    throw ValidationError("csv line " + std::to_string(line) + ": bad value '" + tmp + "' in column " +
                          std::string(column));
  return v;
}

}  // namespace

std::vector<CriterionReport> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != csv_header())
    throw ValidationError("csv: header does not match the sweep schema");
  std::vector<CriterionReport> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string_view> cells;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      cells.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (cells.size() != kReportColumns.size())
      throw ValidationError("csv line " + std::to_string(lineno) + ": expected " +
                            std::to_string(kReportColumns.size()) + " fields, found " + std::to_string(cells.size()));
    CriterionReport r;
    r.p = parse_number<int>(cells[0], lineno, "p");
    r.seed = parse_number<std::uint64_t>(cells[1], lineno, "seed");
    for (std::size_t i = 2; i < cells.size(); ++i)
      set_report_field(r, kReportColumns[i], parse_double(cells[i], lineno, kReportColumns[i]));
    rows.push_back(r);
  }
  return rows;
}

std::vector<CriterionReport> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

}  // namespace gibbsic
