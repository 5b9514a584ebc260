#include "reachsafe/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace reachsafe {

namespace {

void require_finite(const Eigen::VectorXd& v, const char* what) {
  if (!v.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite entry");
  }
}

}  // namespace

ControlBox::ControlBox(Eigen::VectorXd lo, Eigen::VectorXd hi)
    : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size()) throw std::invalid_argument("ControlBox: size mismatch");
  if (!lower.allFinite() || !upper.allFinite())
    throw std::invalid_argument("ControlBox: non-finite bound");
  for (int i = 0; i < lower.size(); ++i) {
    if (lower[i] > upper[i]) throw std::invalid_argument("ControlBox: lower > upper");
  }
}

bool ControlBox::contains(const Control& u, double tol) const {
  if (u.size() != lower.size()) return false;
  for (int i = 0; i < u.size(); ++i) {
    if (u[i] < lower[i] - tol || u[i] > upper[i] + tol) return false;
  }
  return true;
}

Control ControlBox::clamp(const Control& u) const {
  return u.cwiseMax(lower).cwiseMin(upper);
}

Eigen::VectorXd AffinePairwiseDynamics::rate(const State& x, const Control& u_ego,
                                             const Control& u_ctd) const {
  require_finite(x, "dynamics state");
  if (u_ego.size() != ego_dim || u_ctd.size() != contender_dim)
    throw std::invalid_argument("dynamics rate: control dimension mismatch");
  Eigen::VectorXd r = drift(x);
  if (ego_dim > 0) r += ego_gain(x) * u_ego;
  if (contender_dim > 0) r += contender_gain(x) * u_ctd;
  return r;
}

Eigen::VectorXd eval_simple_car(const SimpleCarState& s, double steer, double accel,
                                double wheelbase) {
  Eigen::Vector4d q(s.x, s.y, s.theta, s.v);
  require_finite(q, "simple car state");
  if (!std::isfinite(steer) || !std::isfinite(accel))
    throw std::invalid_argument("simple car control: non-finite entry");
  if (!(std::abs(steer) < M_PI / 2.0))
    throw std::invalid_argument("simple car control: |steer| must be < pi/2");
  if (!(wheelbase > 0.0)) throw std::invalid_argument("simple car: wheelbase must be > 0");
  Eigen::VectorXd r(4);
  r << s.v * std::cos(s.theta), s.v * std::sin(s.theta),
      s.v / wheelbase * std::tan(steer), accel;
  return r;
}

AffinePairwiseDynamics make_simple_car(double wheelbase) {
  if (!(wheelbase > 0.0)) throw std::invalid_argument("simple car: wheelbase must be > 0");
  AffinePairwiseDynamics d;
  d.name = "simple_car";
  d.state_dim = 4;
  d.ego_dim = 2;  // (tan steer, accel)
  d.contender_dim = 0;
  d.wheelbase = wheelbase;
  d.periodic = {false, false, true, false};
  d.heading_dims = {2};
  d.speed_dims = {3};
  d.drift = [](const State& x) {
    Eigen::VectorXd f(4);
    f << x[3] * std::cos(x[2]), x[3] * std::sin(x[2]), 0.0, 0.0;
    return f;
  };
  d.ego_gain = [wheelbase](const State& x) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(4, 2);
    g(2, 0) = x[3] / wheelbase;
    g(3, 1) = 1.0;
    return g;
  };
  d.contender_gain = [](const State&) { return Eigen::MatrixXd(4, 0); };
  d.drift_jacobian = [](const State& x) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(4, 4);
    J(0, 2) = -x[3] * std::sin(x[2]);
    J(0, 3) = std::cos(x[2]);
    J(1, 2) = x[3] * std::cos(x[2]);
    J(1, 3) = std::sin(x[2]);
    return J;
  };
  return d;
}

AffinePairwiseDynamics make_relative_car_6d(double wheelbase) {
  if (!(wheelbase > 0.0)) throw std::invalid_argument("relative car: wheelbase must be > 0");
  AffinePairwiseDynamics d;
  d.name = "relative_car_6d";
  d.state_dim = 6;  // (Dx, Dy, thetaA, thetaB, vA, vB)
  d.ego_dim = 2;
  d.contender_dim = 2;
  d.wheelbase = wheelbase;
  d.periodic = {false, false, true, true, false, false};
  d.heading_dims = {2, 3};
  d.speed_dims = {4, 5};
  d.drift = [](const State& x) {
    Eigen::VectorXd f(6);
    f << x[5] * std::cos(x[3]) - x[4] * std::cos(x[2]),
        x[5] * std::sin(x[3]) - x[4] * std::sin(x[2]), 0.0, 0.0, 0.0, 0.0;
    return f;
  };
  d.ego_gain = [wheelbase](const State& x) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(6, 2);
    g(2, 0) = x[4] / wheelbase;
    g(4, 1) = 1.0;
    return g;
  };
  d.contender_gain = [wheelbase](const State& x) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(6, 2);
    h(3, 0) = x[5] / wheelbase;
    h(5, 1) = 1.0;
    return h;
  };
  d.drift_jacobian = [](const State& x) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(6, 6);
    J(0, 2) = x[4] * std::sin(x[2]);
    J(0, 3) = -x[5] * std::sin(x[3]);
    J(0, 4) = -std::cos(x[2]);
    J(0, 5) = std::cos(x[3]);
    J(1, 2) = -x[4] * std::cos(x[2]);
    J(1, 3) = x[5] * std::cos(x[3]);
    J(1, 4) = -std::sin(x[2]);
    J(1, 5) = std::sin(x[3]);
    return J;
  };
  return d;
}

AffinePairwiseDynamics make_relative_car_4d() {
  AffinePairwiseDynamics d;
  d.name = "relative_car_4d";
  d.state_dim = 4;  // (Dx, Dy, vA, vB), both headings frozen at zero
  d.ego_dim = 1;
  d.contender_dim = 1;
  d.periodic = {false, false, false, false};
  d.heading_dims = {};
  d.speed_dims = {2, 3};
  d.drift = [](const State& x) {
    Eigen::VectorXd f(4);
    f << x[3] - x[2], 0.0, 0.0, 0.0;
    return f;
  };
  d.ego_gain = [](const State&) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(4, 1);
    g(2, 0) = 1.0;
    return g;
  };
  d.contender_gain = [](const State&) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(4, 1);
    h(3, 0) = 1.0;
    return h;
  };
  d.drift_jacobian = [](const State&) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(4, 4);
    J(0, 2) = -1.0;
    J(0, 3) = 1.0;
    return J;
  };
  return d;
}

AffinePairwiseDynamics make_double_integrator_1d() {
  AffinePairwiseDynamics d;
  d.name = "double_integrator_1d";
  d.state_dim = 2;  // (p, v)
  d.ego_dim = 1;
  d.contender_dim = 0;
  d.periodic = {false, false};
  d.heading_dims = {};
  d.speed_dims = {1};
  d.drift = [](const State& x) {
    Eigen::VectorXd f(2);
    f << x[1], 0.0;
    return f;
  };
  d.ego_gain = [](const State&) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2, 1);
    g(1, 0) = 1.0;
    return g;
  };
  d.contender_gain = [](const State&) { return Eigen::MatrixXd(2, 0); };
  d.drift_jacobian = [](const State&) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2, 2);
    J(0, 1) = 1.0;
    return J;
  };
  return d;
}

RelativeSetup joint_relative_dynamics(const SimpleCarState& ego, const SimpleCarState& contender,
                                      double wheelbase) {
  RelativeSetup rs;
  rs.dynamics = make_relative_car_6d(wheelbase);
  rs.state.resize(6);
  rs.state << contender.x - ego.x, contender.y - ego.y, ego.theta, contender.theta, ego.v,
      contender.v;
  require_finite(rs.state, "relative state");
  return rs;
}

Trajectory rollout(const AffinePairwiseDynamics& dyn, const State& x0, const Policy& ego_policy,
                   const Policy& contender_policy, double dt, double horizon,
                   const std::optional<ControlBox>& ego_box,
                   const std::optional<ControlBox>& contender_box) {
  if (!(dt > 0.0)) throw std::invalid_argument("rollout: dt must be > 0");
  if (!(horizon >= dt)) throw std::invalid_argument("rollout: horizon must be >= dt");
  if (x0.size() != dyn.state_dim) throw std::invalid_argument("rollout: state dim mismatch");
  require_finite(x0, "rollout x0");

  Trajectory traj;
  auto controls_at = [&](double t, const State& x, Control& ua, Control& ub) {
    ua = dyn.ego_dim > 0 && ego_policy ? ego_policy(t, x) : Control(dyn.ego_dim);
    ub = dyn.contender_dim > 0 && contender_policy ? contender_policy(t, x)
                                                   : Control(dyn.contender_dim);
    if (ego_box) {
      if (!ego_box->contains(ua)) ++traj.clamp_warnings;
      ua = ego_box->clamp(ua);
    }
    if (contender_box && dyn.contender_dim > 0) {
      if (!contender_box->contains(ub)) ++traj.clamp_warnings;
      ub = contender_box->clamp(ub);
    }
  };
  auto stage = [&](double t, const State& x) {
    Control ua, ub;
    controls_at(t, x, ua, ub);
    return dyn.rate(x, ua, ub);
  };

  long nsteps = std::lround(horizon / dt);
  if (nsteps < 1) nsteps = 1;
  traj.times.reserve(nsteps + 1);
  traj.states.reserve(nsteps + 1);
  State x = x0;
  traj.times.push_back(0.0);
  traj.states.push_back(x);
  for (long k = 0; k < nsteps; ++k) {
    double t = k * dt;
    Eigen::VectorXd k1 = stage(t, x);
    Eigen::VectorXd k2 = stage(t + 0.5 * dt, x + 0.5 * dt * k1);
    Eigen::VectorXd k3 = stage(t + 0.5 * dt, x + 0.5 * dt * k2);
    Eigen::VectorXd k4 = stage(t + dt, x + dt * k3);
    x += dt / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);
    if (!x.allFinite()) throw NumericalError("rollout: state became non-finite");
    traj.times.push_back((k + 1) * dt);
    traj.states.push_back(x);
  }
  return traj;
}

}  // namespace reachsafe
