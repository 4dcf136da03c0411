#pragma once

// Convergence tables and their CSV form.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mhfie/error.hpp"

namespace mhfie {

/// Failure to read or write a report file.
class IoError : public Error {
 public:
  using Error::Error;
};

struct ConvergenceRow {
  int N = 0;
  int NI = 0;
  double alpha = 1.0;
  double err_inf = std::numeric_limits<double>::quiet_NaN();
  double err_l2chi = std::numeric_limits<double>::quiet_NaN();
  int newton_iters = -1;  // -1 when the solve failed
  double runtime_ms = std::numeric_limits<double>::quiet_NaN();
  double err_nodes = std::numeric_limits<double>::quiet_NaN();  // max error over collocation points

  bool failed() const { return std::isnan(err_inf); }
};

/// One sweep over N for a fixed problem, method and alpha.
/// Metadata lives beside the table, not in the CSV, so the file is a pure
/// function of the configuration apart from the runtime column.
struct ConvergenceReport {
  std::string problem;
  std::string method;
  double alpha = 1.0;
  std::vector<ConvergenceRow> rows;
  std::string build_id;
  std::string timestamp;

  bool any_failed() const {
    for (const auto& r : rows)
      if (r.failed()) return true;
    return false;
  }
};

inline constexpr const char* kReportHeader = "N,NI,alpha,err_inf,err_l2chi,newton_iters,runtime_ms,err_nodes";

namespace detail {

inline std::string csv_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ptr != end || ec != std::errc())
    throw IoError("report: malformed number '" + s + "'");
  return v;
}

inline int parse_int(const std::string& s) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw IoError("report: malformed integer '" + s + "'");
  return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

inline void write_csv(std::ostream& os, const ConvergenceReport& report) {
  os << kReportHeader << '\n';
  for (const auto& r : report.rows) {
    os << r.N << ',' << r.NI << ',' << detail::csv_double(r.alpha) << ',' << detail::csv_double(r.err_inf) << ','
       << detail::csv_double(r.err_l2chi) << ',' << r.newton_iters << ',' << detail::csv_double(r.runtime_ms) << ','
       << detail::csv_double(r.err_nodes) << '\n';
  }
}

inline std::string to_csv(const ConvergenceReport& report) {
  std::ostringstream os;
  write_csv(os, report);
  return os.str();
}

/// Rows of a CSV produced by write_csv. Name, method and metadata are not
/// part of the file and come back empty; alpha is taken from the first row.
inline ConvergenceReport parse_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("report: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kReportHeader) throw IoError("report: unexpected header '" + line + "'");
  ConvergenceReport report;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != 8)
      throw IoError("report: line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                    " fields, expected 8");
    ConvergenceRow r;
    r.N = detail::parse_int(cells[0]);
    r.NI = detail::parse_int(cells[1]);
    r.alpha = detail::parse_double(cells[2]);
    r.err_inf = detail::parse_double(cells[3]);
    r.err_l2chi = detail::parse_double(cells[4]);
    r.newton_iters = detail::parse_int(cells[5]);
    r.runtime_ms = detail::parse_double(cells[6]);
    r.err_nodes = detail::parse_double(cells[7]);
    report.rows.push_back(r);
  }
  if (!report.rows.empty()) report.alpha = report.rows.front().alpha;
  return report;
}

inline ConvergenceReport parse_csv(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in);
}

/// Writes text to path, throwing IoError when the file cannot be written.
inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os << text;
  os.flush();
  if (!os) throw IoError("write to '" + path + "' failed");
}

}  // namespace mhfie
