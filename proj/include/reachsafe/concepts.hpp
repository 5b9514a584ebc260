#pragma once

#include <optional>
#include <string>

#include "reachsafe/game.hpp"
#include "reachsafe/solver.hpp"
#include "reachsafe/value_field.hpp"

namespace reachsafe {

enum class ConceptKind { wc_hj, hocbf_hj, brake, constant };

std::string concept_kind_name(ConceptKind k);  // "wc-hj", "hocbf-hj", "brake", "constant"
ConceptKind concept_kind_from_name(const std::string& name);

// A safety concept is a pair of maps from world state to (scalar safety value,
// set of allowable ego controls). HJ kinds read a solved value field; the
// open-loop kinds score fixed-policy rollouts against the boundary function.
struct SafetyConcept {
  ConceptKind kind = ConceptKind::wc_hj;
  const AffinePairwiseDynamics* dyn = nullptr;  // non-owning
  BoundaryFn boundary;
  ControlBox ego_box;
  ControlBox contender_box;

  const ValueField* field = nullptr;  // wc-hj / hocbf-hj, non-owning
  std::optional<HocbfModel> model;    // hocbf-hj

  double horizon = 2.0;  // brake / constant rollout window
  double dt = 0.02;      // rollout step request

  // Field-backed concept of any kind (HJ kinds require one; open-loop kinds
  // may use a precomputed rollout field instead of integrating per query).
  static SafetyConcept from_field(ConceptKind kind, const AffinePairwiseDynamics& dyn,
                                  BoundaryFn boundary, const ValueField& field,
                                  ControlBox ego_box, ControlBox contender_box,
                                  std::optional<HocbfModel> model = std::nullopt);
  static SafetyConcept open_loop(ConceptKind kind, const AffinePairwiseDynamics& dyn,
                                 BoundaryFn boundary, ControlBox ego_box,
                                 ControlBox contender_box, double horizon, double dt = 0.02);
};

// Fixed control for one agent under an open-loop kind: zero on every channel
// except acceleration channels (gain columns with support on a speed dim),
// which brake toward standstill. constant returns all zeros.
Control fixed_policy_control(ConceptKind kind, const AffinePairwiseDynamics& dyn, bool ego,
                             const ControlBox& box, const State& x);

// Boundary values along the fixed-policy rollout at nsteps+1 uniform samples
// over [0, window]; braking holds each speed dim at zero once it crosses.
std::vector<double> rollout_boundary_samples(ConceptKind kind, const AffinePairwiseDynamics& dyn,
                                             const BoundaryFn& boundary,
                                             const ControlBox& ego_box,
                                             const ControlBox& contender_box, const State& x0,
                                             double window, double dt_request);

// Scalar safety value. Field-backed concepts look up V(x, t); open-loop kinds
// without a field return the boundary minimum over a rollout window of
// min(|t|, horizon) seconds, so evaluate(c, x, 0) == boundary(x) everywhere.
double evaluate(const SafetyConcept& c, const State& x, double t);

// unsafe <=> evaluate < threshold.
bool classify_unsafe(const SafetyConcept& c, const State& x, double t, double threshold = 0.0);

// Allowable ego controls. HJ kinds delegate to the safety-preserving control
// set under the matching contender assumption; open-loop kinds cut the ego box
// by a one-step surrogate halfspace (finite-difference gradient of evaluate,
// contender pinned to its fixed policy).
FeasiblePolytope safe_controls(const SafetyConcept& c, const State& x, double t,
                               bool* contender_set_empty = nullptr);

// Prefix minima of the boundary along per-node rollouts, shaped like a solved
// field (times descending from 0) so open-loop concepts can be compared on the
// same grid and time axis.
ValueField rollout_field(ConceptKind kind, const AffinePairwiseDynamics& dyn,
                         const BoundaryFn& boundary, const Grid& grid, const ControlBox& ego_box,
                         const ControlBox& contender_box, double horizon, double dt_request,
                         int threads = 0, const std::string& config_hash = "");

}  // namespace reachsafe
