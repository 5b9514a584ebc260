#pragma once

#include <Eigen/Dense>
#include <optional>

#include "reachsafe/dynamics.hpp"
#include "reachsafe/hocbf.hpp"
#include "reachsafe/polytope.hpp"

namespace reachsafe {

struct ValueField;  // value_field.hpp

// One pointwise Hamiltonian game: objective
//   q(u_A, u_B) = drift_term + ego_lin . u_A + contender_lin . u_B
// with box controls and one affine coupling constraint on (u_A, u_B).
struct LinearGameInstance {
  Eigen::VectorXd ego_lin;        // grad V . g(x)
  Eigen::VectorXd contender_lin;  // grad V . h(x)
  double drift_term = 0.0;        // grad V . f(x)
  HocbfAffineConstraint constraint;
  ControlBox ego_box;
  ControlBox contender_box;
};

struct GameSolution {
  double value = 0.0;
  Control u_ego;
  Control u_contender;
  bool constraint_infeasible = false;  // fell back to the unconstrained game
};

// max over u_A, min over u_B of the separable objective; bang-bang with ties
// broken toward the lower box bound.
GameSolution hamiltonian_worst_case(const LinearGameInstance& inst);

// {u_B : exists u_A in ego_box with constraint satisfied}; one halfspace since
// only max_uA (ego_coeff . u_A) matters.
Halfspace contender_safe_set_halfspace(const HocbfAffineConstraint& c,
                                       const ControlBox& ego_box);

// Enumerated geometry of the constrained game at one state: outer candidates
// are the vertices of contender_box intersected with the contender-safe
// halfspace, each carrying the vertices of the ego polytope it induces. The
// geometry depends only on the constraint, so it can be cached across time
// steps of a solve.
struct ConstrainedCandidates {
  bool infeasible = true;
  struct Candidate {
    Control u_ctd;
    std::vector<Control> ego_vertices;
  };
  std::vector<Candidate> candidates;
};
ConstrainedCandidates constrained_candidates(const HocbfAffineConstraint& c,
                                             const ControlBox& ego_box,
                                             const ControlBox& contender_box);

// min over contender candidates of [contender_lin . u_B + max over the ego
// vertices]; exact because the outer objective is concave in u_B and the inner
// is linear. Falls back to the unconstrained game when no candidate exists.
GameSolution hamiltonian_constrained(const LinearGameInstance& inst);
GameSolution hamiltonian_constrained_cached(const LinearGameInstance& inst,
                                            const ConstrainedCandidates& cands);

// Both orders of the constrained game; the max-min order never exceeds the
// min-max order (up to tol).
struct Prop1Check {
  double maxmin = 0.0;  // ego commits first
  double minmax = 0.0;  // contender commits first
  bool feasible = false;
  bool holds = false;
};
Prop1Check check_prop1(const LinearGameInstance& inst, double tol = 1e-9);

enum class ContenderAssumption { worst_case, constrained };

// {u_A in ego_box : dV/dt >= 0 when the contender plays its admissible worst
// response}; returned as ego_box cut by one halfspace.
FeasiblePolytope safety_preserving_control_set(
    const ValueField& field, const State& x, double t, const AffinePairwiseDynamics& dyn,
    ContenderAssumption assumption, const ControlBox& ego_box, const ControlBox& contender_box,
    const HocbfModel* model = nullptr, bool* contender_set_empty = nullptr);

}  // namespace reachsafe
