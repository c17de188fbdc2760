#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "samdamp/dynamics/integrator.hpp"
#include "samdamp/errors.hpp"

namespace samdamp::io {

/// Shortest decimal that reads back to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // folds -0
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Buffered CSV builder; rows are written in one go by save().
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : columns_(header.size()) {
    append_row_raw(header);
  }

  std::size_t columns() const { return columns_; }

  void add_row(const std::vector<double>& values) {
    if (values.size() != columns_) throw StructuralError("CSV row width does not match header");
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_double(v));
    append_row_raw(cells);
  }

  void add_row_raw(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw StructuralError("CSV row width does not match header");
    append_row_raw(cells);
  }

  const std::string& str() const { return text_; }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << text_;
    if (!out.flush()) throw IoError("failed writing " + path);
  }

 private:
  void append_row_raw(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text_ += ',';
      text_ += cells[i];
    }
    text_ += '\n';
  }

  std::size_t columns_;
  std::string text_;
};

// Trajectory columns. The time column comes first and is shared in comparisons.

inline std::vector<std::string> trajectory_columns(const PlanarPlant&) {
  return {"q1", "q2", "q1dot", "q2dot", "theta", "wb", "wb_lp", "vb", "F", "T", "energy"};
}

inline std::vector<std::string> trajectory_columns(const SpatialPlant&) {
  return {"phi1x", "phi1y", "phi2x", "phi2y", "psi",
          "phi1x_dot", "phi1y_dot", "phi2x_dot", "phi2y_dot", "psi_dot",
          "roll", "pitch", "yaw",
          "wbx", "wby", "wbz", "wb_lp_x", "wb_lp_y", "wb_lp_z",
          "vbx", "vby", "vbz", "Fx", "Fy", "Fz", "Tx", "Ty", "Tz", "energy"};
}

inline void append_values(std::vector<double>& row, const TrajectorySample<PlanarPlant>& s) {
  const auto& x = s.state;
  row.insert(row.end(), {x.q1, x.q2, x.q1dot, x.q2dot, x.theta(), s.twist.w_b, s.filtered_rate, s.twist.v_b,
                         s.wrench.force, s.wrench.torque, s.energy});
}

inline void append_values(std::vector<double>& row, const TrajectorySample<SpatialPlant>& s) {
  auto put = [&row](const auto& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(v[i]);
  };
  put(s.state.q);
  put(s.state.qdot);
  put(s.imu.orientation);
  put(s.twist.w_b);
  put(s.filtered_rate);
  put(s.twist.v_b);
  put(s.wrench.force);
  put(s.wrench.torque);
  row.push_back(s.energy);
}

template <class Plant>
CsvTable trajectory_table(const Plant& plant, const Trajectory<Plant>& traj) {
  std::vector<std::string> header{"t"};
  for (auto& c : trajectory_columns(plant)) header.push_back(std::move(c));
  CsvTable table(std::move(header));
  std::vector<double> row;
  for (const auto& s : traj.samples) {
    row.assign(1, s.t);
    append_values(row, s);
    table.add_row(row);
  }
  return table;
}

}  // namespace samdamp::io
