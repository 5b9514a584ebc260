#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "reachsafe/util.hpp"

namespace reachsafe {

using State = Eigen::VectorXd;
using Control = Eigen::VectorXd;

struct ControlBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  ControlBox() = default;
  ControlBox(Eigen::VectorXd lo, Eigen::VectorXd hi);

  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(const Control& u, double tol = 0.0) const;
  Control clamp(const Control& u) const;
  static ControlBox empty_dim0() { return ControlBox(Eigen::VectorXd(0), Eigen::VectorXd(0)); }
};

struct SimpleCarState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // wrapped into (-pi, pi]
  double v = 0.0;

  SimpleCarState() = default;
  SimpleCarState(double x_, double y_, double theta_, double v_)
      : x(x_), y(y_), theta(wrap_angle(theta_)), v(v_) {}
};

// Control- and disturbance-affine vector field
//   xdot = f(x) + g(x) u_A + h(x) u_B.
// Car models use s = tan(steering angle) as the steering channel so the field
// stays affine in the controls; a steering-angle box maps monotonically to an
// s-box. Single-agent systems use contender_dim = 0.
struct AffinePairwiseDynamics {
  std::string name;
  int state_dim = 0;
  int ego_dim = 0;
  int contender_dim = 0;
  double wheelbase = 0.0;

  std::function<Eigen::VectorXd(const State&)> drift;                // f
  std::function<Eigen::MatrixXd(const State&)> ego_gain;             // g, n x m_A
  std::function<Eigen::MatrixXd(const State&)> contender_gain;       // h, n x m_B
  std::function<Eigen::MatrixXd(const State&)> drift_jacobian;       // df/dx, n x n

  std::vector<bool> periodic;     // per-dim, heading dims wrap on grids
  std::vector<int> heading_dims;
  std::vector<int> speed_dims;

  Eigen::VectorXd rate(const State& x, const Control& u_ego, const Control& u_ctd) const;
};

// Literal simple car rate [v cos(theta), v sin(theta), (v/l) tan(steer), accel].
// Takes the literal steering angle; |steer| < pi/2 required.
Eigen::VectorXd eval_simple_car(const SimpleCarState& s, double steer, double accel,
                                double wheelbase);

AffinePairwiseDynamics make_simple_car(double wheelbase);
AffinePairwiseDynamics make_relative_car_6d(double wheelbase);
// Common-heading reduction (Dx, Dy, vA, vB); both headings frozen at zero and
// each agent keeps only its acceleration channel.
AffinePairwiseDynamics make_relative_car_4d();
AffinePairwiseDynamics make_double_integrator_1d();

struct RelativeSetup {
  AffinePairwiseDynamics dynamics;
  State state;  // (Dx, Dy, thetaA, thetaB, vA, vB), Dx = xB - xA in ground frame
};
RelativeSetup joint_relative_dynamics(const SimpleCarState& ego, const SimpleCarState& contender,
                                      double wheelbase);

using Policy = std::function<Control(double t, const State& x)>;

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;  // states[0] == x0
  int clamp_warnings = 0;     // stage evaluations where a policy left its box
};

// Fixed-step RK4; policies are evaluated at every integration stage and
// clamped to their boxes when boxes are given.
Trajectory rollout(const AffinePairwiseDynamics& dyn, const State& x0, const Policy& ego_policy,
                   const Policy& contender_policy, double dt, double horizon,
                   const std::optional<ControlBox>& ego_box = std::nullopt,
                   const std::optional<ControlBox>& contender_box = std::nullopt);

}  // namespace reachsafe
