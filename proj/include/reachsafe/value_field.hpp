#pragma once

#include <functional>
#include <string>
#include <vector>

#include "reachsafe/grid.hpp"

namespace reachsafe {

// Solved value function V(x, t) on a grid, times descending from 0 to -T.
// Queries interpolate multilinearly in space and linearly in time; points
// outside a non-periodic extent clamp to the boundary and set the flag.
struct ValueField {
  Grid grid;
  std::vector<double> times;
  std::vector<std::vector<double>> values;  // values[k][node], row-major nodes

  std::string scheme_kind;     // "worst-case" | "constrained" | "brake" | ...
  std::string spatial_order;   // "first" | "eno2" | "rollout"
  double cfl = 0.0;
  std::string config_hash;
  std::vector<double> dissipation;  // per-axis LF coefficients (PDE schemes)

  double value_at(const State& x, double t, bool* clamped = nullptr) const;
  Eigen::VectorXd spatial_gradient(const State& x, double t) const;
  double time_derivative(const State& x, double t) const;

  // Binary format: one JSON header line, then one little-endian f64 block per
  // stored time. store_count >= 2 decimates evenly (first and last kept);
  // 0 stores every slice.
  void save(const std::string& path, int store_count = 0) const;
  static ValueField load(const std::string& path);

  static ValueField from_function(const Grid& g, std::vector<double> times,
                                  const std::function<double(const State&, double)>& fn);

  void check() const;  // shape/monotonic-times sanity
};

}  // namespace reachsafe
