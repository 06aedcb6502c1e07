#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cartpole/series.hpp"

namespace cartpole {

struct CsvError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shortest decimal representation that round-trips the double exactly,
// so byte-for-byte determinism of exports is testable.
inline std::string format_double(double v) {
  std::array<char, 32> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

inline constexpr const char* kSeriesHeader =
    "t,x,v,theta,omega,theta_sp,force,disturbance,measured_x,measured_theta";

// Exported schema: the ten SI columns above plus theta repeated in
// degrees as a trailing `theta_deg` convenience column.
inline std::string series_to_csv(const TimeSeries& s) {
  std::string out;
  out.reserve(s.size() * 96 + 80);
  out += kSeriesHeader;
  out += ",theta_deg\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out += format_double(s.t[i]); out += ',';
    out += format_double(s.x[i]); out += ',';
    out += format_double(s.v[i]); out += ',';
    out += format_double(s.theta[i]); out += ',';
    out += format_double(s.omega[i]); out += ',';
    out += format_double(s.theta_sp[i]); out += ',';
    out += format_double(s.force[i]); out += ',';
    out += format_double(s.disturbance[i]); out += ',';
    out += format_double(s.measured_x[i]); out += ',';
    out += format_double(s.measured_theta[i]); out += ',';
    out += format_double(s.theta[i] * 180.0 / M_PI);
    out += '\n';
  }
  return out;
}

inline void write_series_csv(const std::string& path, const TimeSeries& s) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw CsvError("cannot open for writing: " + path);
  const std::string body = series_to_csv(s);
  f.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!f) throw CsvError("write failed: " + path);
}

namespace detail {
inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw CsvError("bad number '" + s + "' on line " + std::to_string(line_no));
  return v;
}
}  // namespace detail

// Parse an exported trace. Columns are located by header name; all ten
// schema columns must be present (extras such as theta_deg are ignored).
inline TimeSeries read_series_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw CsvError("empty csv");
  const std::vector<std::string> header = detail::split_csv_line(line);
  const std::vector<std::string> wanted = {
      "t", "x", "v", "theta", "omega", "theta_sp",
      "force", "disturbance", "measured_x", "measured_theta"};
  std::vector<std::size_t> idx;
  for (const std::string& name : wanted) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw CsvError("missing column: " + name);
    idx.push_back(static_cast<std::size_t>(it - header.begin()));
  }
  TimeSeries s;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> cells = detail::split_csv_line(line);
    if (cells.size() < header.size())
      throw CsvError("truncated row on line " + std::to_string(line_no));
    auto cell = [&](std::size_t w) { return detail::parse_double(cells[idx[w]], line_no); };
    s.push_row(cell(0), cell(1), cell(2), cell(3), cell(4), cell(5), cell(6),
               cell(7), cell(8), cell(9));
  }
  if (s.empty()) throw CsvError("csv has no data rows");
  return s;
}

inline TimeSeries read_series_csv_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CsvError("cannot open: " + path);
  return read_series_csv(f);
}

}  // namespace cartpole
