#ifndef PVFIT_DATASET_HPP
#define PVFIT_DATASET_HPP

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pvfit/model.hpp"

namespace pvfit {

class dataset_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IVPoint {
  double v;  // volts
  double i;  // amperes
};

/// An immutable I-V measurement set. Negative voltages or currents are legal
/// (reverse direction); every value must be finite.
struct IVDataset {
  std::string name;
  std::vector<IVPoint> points;
  OperatingCondition condition;

  std::size_t size() const { return points.size(); }
};

struct DatasetSummary {
  std::size_t count;
  double v_min, v_max;
  double i_min, i_max;
  double temperature;
};

namespace detail {

inline bool parse_number(std::string_view text, double& out) {
  // std::from_chars accepts no leading whitespace or '+'; trim both.
  std::size_t b = 0, e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  if (b < e && text[b] == '+') ++b;
  if (b == e) return false;
  const char* first = text.data() + b;
  const char* last = text.data() + e;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

inline std::string shortest_repr(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace detail

/// Loads a two-column CSV of voltage,current rows. A single non-numeric first
/// row is treated as a header. Errors carry the 1-based file line number.
inline IVDataset load_csv(const std::filesystem::path& path, double temperature_celsius) {
  std::ifstream in(path);
  if (!in) {
    throw dataset_error("cannot open dataset file: " + path.string());
  }

  IVDataset d;
  d.name = path.stem().string();
  d.condition.temperature = celsius_to_kelvin(temperature_celsius);

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view sv(line);
    if (sv.find_first_not_of(" \t") == std::string_view::npos) continue;

    const auto comma = sv.find(',');
    double v = 0.0, i = 0.0;
    const bool v_ok = comma != std::string_view::npos && detail::parse_number(sv.substr(0, comma), v);
    const bool i_ok = comma != std::string_view::npos && detail::parse_number(sv.substr(comma + 1), i);
    if (!v_ok && !i_ok && line_no == 1) continue;  // header row: no numeric cell at all
    if (!v_ok || !i_ok) {
      throw dataset_error(path.string() + ": row " + std::to_string(line_no) +
                          (comma == std::string_view::npos ? ": expected two comma-separated columns"
                                                           : ": non-numeric cell"));
    }
    if (!std::isfinite(v) || !std::isfinite(i)) {
      throw dataset_error(path.string() + ": row " + std::to_string(line_no) +
                          ": non-finite value");
    }
    d.points.push_back({v, i});
  }
  if (d.points.empty()) {
    throw dataset_error(path.string() + ": no data rows");
  }
  return d;
}

/// Writes the dataset back out; values use the shortest decimal text that
/// round-trips exactly.
inline void save_csv(const IVDataset& d, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw dataset_error("cannot write dataset file: " + path.string());
  }
  out << "V,I\n";
  for (const auto& pt : d.points) {
    out << detail::shortest_repr(pt.v) << ',' << detail::shortest_repr(pt.i) << '\n';
  }
}

inline DatasetSummary dataset_summary(const IVDataset& d) {
  if (d.points.empty()) {
    throw dataset_error("empty dataset");
  }
  DatasetSummary s{};
  s.count = d.points.size();
  s.temperature = d.condition.temperature;
  s.v_min = s.v_max = d.points.front().v;
  s.i_min = s.i_max = d.points.front().i;
  for (const auto& pt : d.points) {
    s.v_min = std::min(s.v_min, pt.v);
    s.v_max = std::max(s.v_max, pt.v);
    s.i_min = std::min(s.i_min, pt.i);
    s.i_max = std::max(s.i_max, pt.i);
  }
  return s;
}

}  // namespace pvfit

#endif  // PVFIT_DATASET_HPP
