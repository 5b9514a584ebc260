#include "reachsafe/concepts.hpp"

#include <algorithm>
#include <cmath>

namespace reachsafe {

std::string concept_kind_name(ConceptKind k) {
  switch (k) {
    case ConceptKind::wc_hj: return "wc-hj";
    case ConceptKind::hocbf_hj: return "hocbf-hj";
    case ConceptKind::brake: return "brake";
    case ConceptKind::constant: return "constant";
  }
  throw std::logic_error("concept: bad kind");
}

ConceptKind concept_kind_from_name(const std::string& name) {
  if (name == "wc-hj") return ConceptKind::wc_hj;
  if (name == "hocbf-hj") return ConceptKind::hocbf_hj;
  if (name == "brake") return ConceptKind::brake;
  if (name == "constant") return ConceptKind::constant;
  throw ConfigError("concept: unknown kind '" + name + "'");
}

SafetyConcept SafetyConcept::from_field(ConceptKind kind, const AffinePairwiseDynamics& dyn,
                                        BoundaryFn boundary, const ValueField& field,
                                        ControlBox ego_box, ControlBox contender_box,
                                        std::optional<HocbfModel> model) {
  if (kind == ConceptKind::hocbf_hj && !model)
    throw ConfigError("concept: hocbf-hj needs a model");
  SafetyConcept c;
  c.kind = kind;
  c.dyn = &dyn;
  c.boundary = std::move(boundary);
  c.ego_box = std::move(ego_box);
  c.contender_box = std::move(contender_box);
  c.field = &field;
  c.model = std::move(model);
  return c;
}

SafetyConcept SafetyConcept::open_loop(ConceptKind kind, const AffinePairwiseDynamics& dyn,
                                       BoundaryFn boundary, ControlBox ego_box,
                                       ControlBox contender_box, double horizon, double dt) {
  if (kind != ConceptKind::brake && kind != ConceptKind::constant)
    throw ConfigError("concept: open_loop() takes brake or constant");
  if (!(horizon > 0.0) || !(dt > 0.0))
    throw ConfigError("concept: horizon and dt must be > 0");
  SafetyConcept c;
  c.kind = kind;
  c.dyn = &dyn;
  c.boundary = std::move(boundary);
  c.ego_box = std::move(ego_box);
  c.contender_box = std::move(contender_box);
  c.horizon = horizon;
  c.dt = dt;
  return c;
}

namespace {

struct AccelChannel {
  int ctl_dim;
  int speed_dim;
};

// A control channel brakes the speed dim its gain column drives. Detection
// uses the gain at the rollout start; the models keep acceleration columns
// state-independent.
std::vector<AccelChannel> accel_channels(const AffinePairwiseDynamics& dyn, bool ego,
                                         const State& x) {
  std::vector<AccelChannel> out;
  const int m = ego ? dyn.ego_dim : dyn.contender_dim;
  if (m == 0) return out;
  Eigen::MatrixXd gain = ego ? dyn.ego_gain(x) : dyn.contender_gain(x);
  for (int j = 0; j < m; ++j) {
    for (int s : dyn.speed_dims) {
      if (std::abs(gain(s, j)) > 1e-12) {
        out.push_back({j, s});
        break;
      }
    }
  }
  return out;
}

Control brake_control(const std::vector<AccelChannel>& channels, const ControlBox& box, int m,
                      const State& x) {
  Control u = Control::Zero(m);
  for (const auto& ch : channels) {
    const double v = x[ch.speed_dim];
    if (v > 0.0)
      u[ch.ctl_dim] = box.lower[ch.ctl_dim];
    else if (v < 0.0)
      u[ch.ctl_dim] = box.upper[ch.ctl_dim];
  }
  return u;
}

}  // namespace

Control fixed_policy_control(ConceptKind kind, const AffinePairwiseDynamics& dyn, bool ego,
                             const ControlBox& box, const State& x) {
  const int m = ego ? dyn.ego_dim : dyn.contender_dim;
  if (kind == ConceptKind::constant) return Control::Zero(m);
  if (kind != ConceptKind::brake)
    throw ConfigError("concept: fixed policies exist only for brake and constant");
  return brake_control(accel_channels(dyn, ego, x), box, m, x);
}

std::vector<double> rollout_boundary_samples(ConceptKind kind, const AffinePairwiseDynamics& dyn,
                                             const BoundaryFn& boundary,
                                             const ControlBox& ego_box,
                                             const ControlBox& contender_box, const State& x0,
                                             double window, double dt_request) {
  if (window < 0.0) throw ConfigError("rollout: window must be >= 0");
  if (!(dt_request > 0.0)) throw ConfigError("rollout: dt must be > 0");
  const bool brake = kind == ConceptKind::brake;
  if (!brake && kind != ConceptKind::constant)
    throw ConfigError("rollout: only brake and constant roll out");

  std::vector<double> samples;
  samples.push_back(boundary.value(x0));
  if (window == 0.0) return samples;

  const long nsteps = std::max<long>(1, std::lround(std::ceil(window / dt_request - 1e-12)));
  const double dt = window / static_cast<double>(nsteps);
  samples.reserve(nsteps + 1);

  const auto ego_ch = brake ? accel_channels(dyn, true, x0) : std::vector<AccelChannel>{};
  const auto ctd_ch = brake ? accel_channels(dyn, false, x0) : std::vector<AccelChannel>{};
  auto control_at = [&](const State& x, bool ego) -> Control {
    const int m = ego ? dyn.ego_dim : dyn.contender_dim;
    if (!brake) return Control::Zero(m);
    return brake_control(ego ? ego_ch : ctd_ch, ego ? ego_box : contender_box, m, x);
  };
  auto rate = [&](const State& x) -> Eigen::VectorXd {
    return dyn.rate(x, control_at(x, true), control_at(x, false));
  };

  State x = x0;
  for (long k = 0; k < nsteps; ++k) {
    const Eigen::VectorXd k1 = rate(x);
    const Eigen::VectorXd k2 = rate(x + 0.5 * dt * k1);
    const Eigen::VectorXd k3 = rate(x + 0.5 * dt * k2);
    const Eigen::VectorXd k4 = rate(x + dt * k3);
    State next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (brake) {
      for (int s : dyn.speed_dims)  // standstill: braking never reverses
        if (x[s] * next[s] < 0.0) next[s] = 0.0;
    }
    if (!next.allFinite()) throw NumericalError("rollout: non-finite state");
    x = std::move(next);
    samples.push_back(boundary.value(x));
  }
  return samples;
}

double evaluate(const SafetyConcept& c, const State& x, double t) {
  if (t > 0.0) throw ConfigError("evaluate: t must be <= 0");
  if (c.field) return c.field->value_at(x, t);
  if (c.kind == ConceptKind::wc_hj || c.kind == ConceptKind::hocbf_hj)
    throw ConfigError("evaluate: HJ concept has no value field");
  const double window = std::min(-t, c.horizon);
  auto samples = rollout_boundary_samples(c.kind, *c.dyn, c.boundary, c.ego_box, c.contender_box,
                                          x, window, c.dt);
  return *std::min_element(samples.begin(), samples.end());
}

bool classify_unsafe(const SafetyConcept& c, const State& x, double t, double threshold) {
  return evaluate(c, x, t) < threshold;
}

FeasiblePolytope safe_controls(const SafetyConcept& c, const State& x, double t,
                               bool* contender_set_empty) {
  if (contender_set_empty) *contender_set_empty = false;
  switch (c.kind) {
    case ConceptKind::wc_hj:
      return safety_preserving_control_set(*c.field, x, t, *c.dyn,
                                           ContenderAssumption::worst_case, c.ego_box,
                                           c.contender_box, nullptr, contender_set_empty);
    case ConceptKind::hocbf_hj:
      return safety_preserving_control_set(*c.field, x, t, *c.dyn,
                                           ContenderAssumption::constrained, c.ego_box,
                                           c.contender_box, &*c.model, contender_set_empty);
    case ConceptKind::brake:
    case ConceptKind::constant:
      break;
  }

  // One-step surrogate: keep ego controls along which the concept value does
  // not decrease, with the contender pinned to its fixed policy.
  const int d = c.dyn->state_dim;
  Eigen::VectorXd grad(d);
  for (int i = 0; i < d; ++i) {
    const double h = 1e-4 * std::max(1.0, std::abs(x[i]));
    State xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    grad[i] = (evaluate(c, xp, t) - evaluate(c, xm, t)) / (2.0 * h);
  }
  const Control u_ctd = fixed_policy_control(c.kind, *c.dyn, false, c.contender_box, x);
  Eigen::VectorXd flow = c.dyn->drift(x);
  if (c.dyn->contender_dim > 0) flow += c.dyn->contender_gain(x) * u_ctd;
  Halfspace hs;
  hs.normal = c.dyn->ego_gain(x).transpose() * grad;
  hs.offset = grad.dot(flow);
  return box_halfspace_polytope(c.ego_box, hs);
}

ValueField rollout_field(ConceptKind kind, const AffinePairwiseDynamics& dyn,
                         const BoundaryFn& boundary, const Grid& grid, const ControlBox& ego_box,
                         const ControlBox& contender_box, double horizon, double dt_request,
                         int threads, const std::string& config_hash) {
  if (grid.dims() != dyn.state_dim) throw ConfigError("rollout_field: grid/dynamics mismatch");
  if (!(horizon > 0.0) || !(dt_request > 0.0))
    throw ConfigError("rollout_field: horizon and dt must be > 0");
  const long nsteps = std::max<long>(1, std::lround(std::ceil(horizon / dt_request - 1e-12)));

  ValueField field;
  field.grid = grid;
  field.scheme_kind = concept_kind_name(kind);
  field.spatial_order = "rollout";
  field.cfl = 0.0;
  field.config_hash = config_hash;
  field.dissipation.assign(grid.dims(), 0.0);
  for (long k = 0; k <= nsteps; ++k)
    field.times.push_back(-(horizon * static_cast<double>(k) / static_cast<double>(nsteps)));
  field.values.assign(nsteps + 1, std::vector<double>(grid.total()));

  const std::size_t workers = worker_count(threads);
  parallel_for(static_cast<std::size_t>(grid.total()), workers,
               [&](std::size_t lo, std::size_t hi) {
                 for (std::size_t I = lo; I < hi; ++I) {
                   auto samples =
                       rollout_boundary_samples(kind, dyn, boundary, ego_box, contender_box,
                                                grid.node(static_cast<std::int64_t>(I)), horizon,
                                                horizon / static_cast<double>(nsteps));
                   double running = samples[0];
                   for (long k = 0; k <= nsteps; ++k) {
                     running = std::min(running, samples[static_cast<std::size_t>(k)]);
                     field.values[static_cast<std::size_t>(k)][I] = running;
                   }
                 }
               });
  field.check();
  return field;
}

}  // namespace reachsafe
