#pragma once

#include <array>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "clocksync/errors.hpp"
#include "clocksync/estimator.hpp"
#include "clocksync/exchange_sim.hpp"
#include "clocksync/matrix_forms.hpp"

namespace clocksync {

/// Shortest-safe round-trip formatting: 17 significant digits.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline double parse_double(std::string_view field, std::string_view context) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw IoError(std::string(context) + ": bad number '" + std::string(field) + "'");
  return value;
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

inline constexpr std::string_view kTimestampCsvHeader = "round,t1,t2,t3,t4";

/// `round,t1,t2,t3,t4`, rounds numbered from 1.
inline std::string timestamp_matrix_to_csv(const TimestampMatrix& g) {
  std::string out(kTimestampCsvHeader);
  out += '\n';
  for (Eigen::Index i = 0; i < g.rounds(); ++i) {
    out += std::to_string(i + 1);
    for (Eigen::Index j = 0; j < TimestampMatrix::kColumns; ++j) {
      out += ',';
      out += format_double(g.entries()(i, j));
    }
    out += '\n';
  }
  return out;
}

inline std::string exchange_log_to_csv(const ExchangeLog& log) {
  return timestamp_matrix_to_csv(build_timestamp_matrix(log));
}

inline TimestampMatrix timestamp_matrix_from_csv(std::string_view text, std::string_view source = "csv") {
  std::vector<std::array<double, 4>> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kTimestampCsvHeader)
        throw IoError(std::string(source) + ": expected header '" + std::string(kTimestampCsvHeader) + "'");
      header_seen = true;
      continue;
    }
    const auto fields = split_csv_line(line);
    const std::string context = std::string(source) + ":" + std::to_string(line_no);
    if (fields.size() != 5) throw IoError(context + ": expected 5 fields");
    std::array<double, 4> r{};
    for (std::size_t j = 0; j < 4; ++j) r[j] = parse_double(fields[j + 1], context);
    rows.push_back(r);
  }
  if (!header_seen) throw IoError(std::string(source) + ": empty file");
  if (rows.size() < 2) throw IoError(std::string(source) + ": need at least 2 rounds");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), 4);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < 4; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return TimestampMatrix(std::move(m));
}

inline TimestampMatrix read_timestamp_csv(const std::filesystem::path& path) {
  return timestamp_matrix_from_csv(read_text_file(path), path.string());
}

/// Sidecar with the ground truth that produced a simulated log.
inline nlohmann::json exchange_log_truth_json(const ExchangeLog& log) {
  return {
      {"alpha", log.clock.skew},
      {"beta", log.clock.offset},
      {"fixed_delay", log.delays.fixed_delay},
      {"processing_delay", log.delays.processing_delay},
      {"noise_std", log.delays.noise_std},
      {"distribution", std::string(to_string(log.delays.distribution))},
      {"seed", log.seed},
      {"rounds", log.rows.size()},
  };
}

inline constexpr std::string_view kEstimateCsvHeader = "method,alpha_hat,beta_hat,d_hat,residual_norm";

inline std::string estimate_report_csv_row(const EstimateReport& r) {
  return std::string(to_string(r.method)) + ',' + format_double(r.alpha_hat) + ',' + format_double(r.beta_hat) +
         ',' + format_double(r.d_hat) + ',' + format_double(r.residual_norm);
}

}  // namespace clocksync
