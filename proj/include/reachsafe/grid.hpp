#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reachsafe/dynamics.hpp"

namespace reachsafe {

// Rectilinear grid, row-major node order with the last dimension fastest.
// Periodic dims keep spacing = (upper-lower)/(points-1); their first and last
// node coincide and stencils wrap with period points-1.
struct Grid {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::vector<int> points;
  std::vector<bool> periodic;
  std::vector<double> spacing;          // derived
  std::vector<std::int64_t> strides;    // derived

  static Grid create(Eigen::VectorXd lower, Eigen::VectorXd upper, std::vector<int> points,
                     std::vector<bool> periodic = {});

  int dims() const { return static_cast<int>(points.size()); }
  std::int64_t total() const;
  double coord(int dim, int i) const { return lower[dim] + spacing[dim] * i; }
  State node(std::int64_t flat) const;
  void multi_index(std::int64_t flat, int* idx) const;
  std::int64_t flat_index(const int* idx) const;

  std::string to_json_string() const;
  static Grid from_json_string(const std::string& text);
};

}  // namespace reachsafe
