#include "reachsafe/game.hpp"

#include <cmath>
#include <limits>

#include "reachsafe/value_field.hpp"

namespace reachsafe {

namespace {

// Separable bang-bang extremum; coefficient ties pick the lower bound.
double extremize(const Eigen::VectorXd& coeff, const ControlBox& box, bool maximize,
                 Control* arg) {
  double total = 0.0;
  if (arg) arg->resize(box.dim());
  for (int i = 0; i < box.dim(); ++i) {
    double lo = coeff[i] * box.lower[i];
    double hi = coeff[i] * box.upper[i];
    bool pick_upper = maximize ? (hi > lo) : (hi < lo);
    total += pick_upper ? hi : lo;
    if (arg) (*arg)[i] = pick_upper ? box.upper[i] : box.lower[i];
  }
  return total;
}

}  // namespace

GameSolution hamiltonian_worst_case(const LinearGameInstance& inst) {
  GameSolution s;
  s.value = inst.drift_term;
  s.value += extremize(inst.ego_lin, inst.ego_box, true, &s.u_ego);
  if (inst.contender_box.dim() > 0) {
    s.value += extremize(inst.contender_lin, inst.contender_box, false, &s.u_contender);
  } else {
    s.u_contender.resize(0);
  }
  return s;
}

Halfspace contender_safe_set_halfspace(const HocbfAffineConstraint& c,
                                       const ControlBox& ego_box) {
  double best_ego = 0.0;
  for (int i = 0; i < ego_box.dim(); ++i) {
    best_ego += std::max(c.ego_coeff[i] * ego_box.lower[i], c.ego_coeff[i] * ego_box.upper[i]);
  }
  return Halfspace{c.contender_coeff, c.offset + best_ego};
}

ConstrainedCandidates constrained_candidates(const HocbfAffineConstraint& c,
                                             const ControlBox& ego_box,
                                             const ControlBox& contender_box) {
  ConstrainedCandidates out;
  Halfspace safe = contender_safe_set_halfspace(c, ego_box);
  FeasiblePolytope ctd_poly = box_halfspace_polytope(contender_box, safe);
  if (ctd_poly.empty) return out;
  for (const auto& ub : ctd_poly.vertices) {
    // Ego faces a . u_A >= -(b . u_B + c) for this candidate.
    Halfspace ego_hs{c.ego_coeff,
                     c.offset + (c.contender_coeff.size() > 0 ? c.contender_coeff.dot(ub) : 0.0)};
    FeasiblePolytope ego_poly = box_halfspace_polytope(ego_box, ego_hs);
    if (ego_poly.empty) continue;  // only possible through rounding at the safe-set boundary
    out.candidates.push_back({ub, ego_poly.vertices});
  }
  out.infeasible = out.candidates.empty();
  return out;
}

GameSolution hamiltonian_constrained_cached(const LinearGameInstance& inst,
                                            const ConstrainedCandidates& cands) {
  if (cands.infeasible) {
    GameSolution s = hamiltonian_worst_case(inst);
    s.constraint_infeasible = true;
    return s;
  }
  GameSolution s;
  s.value = std::numeric_limits<double>::infinity();
  for (const auto& cand : cands.candidates) {
    double inner = -std::numeric_limits<double>::infinity();
    const Control* best_ego = nullptr;
    for (const auto& ua : cand.ego_vertices) {
      double v = inst.ego_lin.dot(ua);
      if (v > inner) {
        inner = v;
        best_ego = &ua;
      }
    }
    double outer = inner + (inst.contender_lin.size() > 0 ? inst.contender_lin.dot(cand.u_ctd)
                                                          : 0.0);
    if (outer < s.value) {
      s.value = outer;
      s.u_ego = *best_ego;
      s.u_contender = cand.u_ctd;
    }
  }
  s.value += inst.drift_term;
  return s;
}

GameSolution hamiltonian_constrained(const LinearGameInstance& inst) {
  return hamiltonian_constrained_cached(
      inst, constrained_candidates(inst.constraint, inst.ego_box, inst.contender_box));
}

Prop1Check check_prop1(const LinearGameInstance& inst, double tol) {
  Prop1Check pc;
  // min-max order: contender first, ego responds inside its cut box.
  ConstrainedCandidates minmax_geom =
      constrained_candidates(inst.constraint, inst.ego_box, inst.contender_box);
  if (minmax_geom.infeasible) return pc;
  pc.minmax = hamiltonian_constrained_cached(inst, minmax_geom).value;

  // max-min order: mirror the roles. The ego-safe set needs the contender's
  // best constraint contribution; candidates are vertices of the ego box cut
  // by that halfspace.
  const HocbfAffineConstraint& c = inst.constraint;
  double best_ctd = 0.0;
  for (int i = 0; i < inst.contender_box.dim(); ++i) {
    best_ctd += std::max(c.contender_coeff[i] * inst.contender_box.lower[i],
                         c.contender_coeff[i] * inst.contender_box.upper[i]);
  }
  Halfspace ego_safe{c.ego_coeff, c.offset + best_ctd};
  FeasiblePolytope ego_poly = box_halfspace_polytope(inst.ego_box, ego_safe);
  if (ego_poly.empty) return pc;
  pc.feasible = true;
  pc.maxmin = -std::numeric_limits<double>::infinity();
  for (const auto& ua : ego_poly.vertices) {
    Halfspace ctd_hs{c.contender_coeff, c.offset + c.ego_coeff.dot(ua)};
    FeasiblePolytope ctd_poly = box_halfspace_polytope(inst.contender_box, ctd_hs);
    if (ctd_poly.empty) continue;
    double inner = std::numeric_limits<double>::infinity();
    for (const auto& ub : ctd_poly.vertices) {
      inner = std::min(inner, inst.contender_lin.size() > 0 ? inst.contender_lin.dot(ub) : 0.0);
    }
    pc.maxmin = std::max(pc.maxmin, inst.ego_lin.dot(ua) + inner);
  }
  if (!std::isfinite(pc.maxmin)) {
    pc.feasible = false;
    return pc;
  }
  pc.maxmin += inst.drift_term;
  pc.holds = pc.maxmin >= pc.minmax - tol;
  return pc;
}

FeasiblePolytope safety_preserving_control_set(const ValueField& field, const State& x, double t,
                                               const AffinePairwiseDynamics& dyn,
                                               ContenderAssumption assumption,
                                               const ControlBox& ego_box,
                                               const ControlBox& contender_box,
                                               const HocbfModel* model,
                                               bool* contender_set_empty) {
  Eigen::VectorXd grad = field.spatial_gradient(x, t);
  double vt = field.time_derivative(x, t);
  Eigen::VectorXd A = dyn.ego_gain(x).transpose() * grad;
  double drift = grad.dot(dyn.drift(x));
  if (contender_set_empty) *contender_set_empty = false;

  double ctd_min = 0.0;
  if (dyn.contender_dim > 0) {
    Eigen::VectorXd B = dyn.contender_gain(x).transpose() * grad;
    if (assumption == ContenderAssumption::worst_case) {
      ctd_min = extremize(B, contender_box, false, nullptr);
    } else {
      if (!model) throw ConfigError("safety_preserving_control_set: constrained needs a model");
      HocbfAffineConstraint c = constraint_at(*model, dyn, x);
      Halfspace safe = contender_safe_set_halfspace(c, ego_box);
      FeasiblePolytope poly = box_halfspace_polytope(contender_box, safe);
      if (poly.empty) {
        // No admissible contender: fall back to the unconstrained worst case.
        if (contender_set_empty) *contender_set_empty = true;
        ctd_min = extremize(B, contender_box, false, nullptr);
      } else {
        ctd_min = std::numeric_limits<double>::infinity();
        for (const auto& ub : poly.vertices) ctd_min = std::min(ctd_min, B.dot(ub));
      }
    }
  }
  Halfspace keep{A, drift + ctd_min + vt};
  return box_halfspace_polytope(ego_box, keep);
}

}  // namespace reachsafe
