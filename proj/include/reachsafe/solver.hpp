#pragma once

#include <functional>
#include <optional>
#include <string>

#include "reachsafe/game.hpp"
#include "reachsafe/grid.hpp"
#include "reachsafe/hocbf.hpp"
#include "reachsafe/value_field.hpp"

namespace reachsafe {

// Terminal payoff l(x); the target set is {x : l(x) < 0}.
struct BoundaryFn {
  enum class Kind { coordinate, circle, ellipse, custom };
  Kind kind = Kind::coordinate;
  Eigen::VectorXd params;
  std::vector<int> dims;
  std::function<double(const State&)> custom_fn;

  double value(const State& x) const;

  static BoundaryFn coordinate(int dim, double offset);
  // Signed distance to the circle boundary.
  static BoundaryFn circle(double cx, double cy, double radius, std::vector<int> dims = {0, 1});
  // Quadratic form x^2/a^2 + y^2/b^2 - 1.
  static BoundaryFn ellipse(double semi_x, double semi_y, std::vector<int> dims = {0, 1});
  static BoundaryFn custom(std::function<double(const State&)> fn);
};

enum class HamiltonianKind { worst_case, constrained };

struct SolveOptions {
  double cfl = 0.5;
  std::string spatial_order = "first";  // "first" | "eno2"
  int threads = 0;
  std::string config_hash;
  std::optional<HocbfModel> model;  // required for the constrained Hamiltonian
};

// Lax-Friedrichs discretization of
//   dV/dt + min{0, H(x, grad V)} = 0,  V(x, 0) = l(x),
// marching from t = 0 to t = -horizon with per-axis dissipation coefficients
// bounded analytically from the control boxes. The min{0, .} form freezes
// values once they cross below zero, so V is nonincreasing in |t|.
ValueField solve(const AffinePairwiseDynamics& dyn, HamiltonianKind kind,
                 const BoundaryFn& boundary, const Grid& grid, const ControlBox& ego_box,
                 const ControlBox& contender_box, double horizon, const SolveOptions& opt);

// Numerical-slop band used when comparing two solves on a matched grid:
// 2 * sum_i(dissipation_i * spacing_i).
double dissipation_band(const ValueField& field);

}  // namespace reachsafe
