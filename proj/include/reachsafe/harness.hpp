#pragma once

#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "reachsafe/concepts.hpp"
#include "reachsafe/learning.hpp"

namespace reachsafe {

// ---- reach-avoid planner -----------------------------------------------

struct PlanOptions {
  double dt = 0.05;
  double horizon = 12.0;
  double heading_gain = 2.0;  // steer-channel reference = gain * heading error
  double speed_gain = 1.0;    // accel reference = gain * (target_speed - v)
  double target_speed = 1.5;
  double goal_radius = 0.3;   // episode ends inside this radius
  int max_infeasible = 25;    // abort after this many fallback steps
  double slack = 0.0;         // margin kept in reserve: QP projects onto lhs >= slack
};

struct PlanResult {
  std::vector<double> times;
  std::vector<State> states;  // one longer than controls
  std::vector<Control> controls;
  std::vector<double> barrier;  // b along states
  int infeasible_steps = 0;
  bool aborted = false;
  bool reached_goal = false;
};

// Greedy reference-tracking planner filtered through the admissible set: each
// step minimizes ||u - u_ref||^2 over the control box cut by the model's
// constraint halfspace (exact projection onto the <=6-vertex polygon).
// Infeasible steps fall back to the feasibility-maximizing box vertex.
PlanResult plan_hocbf_qp(const HocbfModel& model, const AffinePairwiseDynamics& dyn,
                         const State& x0, const Eigen::Vector2d& goal, const ControlBox& box,
                         const ContenderRule& rule, const PlanOptions& opt);

// ---- demonstration / log generation -------------------------------------

struct DemoGenConfig {
  int episodes = 50;
  std::uint64_t seed = 1;
  double wheelbase = 1.0;
  double obstacle_x = 0.0;
  double obstacle_y = 0.0;
  double obstacle_r = 1.0;
  double spawn_radius_lo = 3.0;
  double spawn_radius_hi = 4.0;
  double speed_lo = 1.0;
  double speed_hi = 2.0;
  double heading_jitter = 0.3;
  // Demonstrations keep a reserve against the constraint: a tracker that rides
  // the boundary exactly leaves half of the samples on either side of zero
  // under any refit, which no learner can score well on.
  PlanOptions plan = {.slack = 0.05};
  ControlBox ego_box;  // dim 0 selects the built-in (steer, accel) box
};

struct DemoGenResult {
  DemoDataset data;
  std::vector<PlanResult> episodes;
  int rejected_starts = 0;  // spawn draws that failed the psi-chain check
  int discarded_episodes = 0;  // plans with any infeasible step, regenerated
};

// Goal-crossing episodes around a circular obstacle, planned under the model.
// Start states are rejection-sampled until the whole psi chain is positive;
// only episodes with zero infeasible steps enter the dataset.
DemoGenResult gen_demo_corpus(const HocbfModel& model, const DemoGenConfig& cfg);

struct HighwayLogConfig {
  int samples = 10000;
  std::uint64_t seed = 7;
  int steps_per_episode = 50;
  double dt = 0.1;
  double speed_lo = 12.0;
  double speed_hi = 33.0;
  double gap_lo = 5.0;
  double gap_hi = 60.0;
  double lateral_half_width = 6.0;
  double accel_limit = 3.0;
};

// Synthetic two-car log on the common-heading reduced model (Dx, Dy, vA, vB)
// with recorded accelerations; same CSV schema as demonstration files.
DemoDataset gen_highway_log(const HighwayLogConfig& cfg);

// ---- evaluation ----------------------------------------------------------

// Node filter for grid cross-tabulation: every speed dim and every heading
// dim of the dynamics must land in its range.
struct StateFilter {
  double speed_lo = 15.0;
  double speed_hi = 30.0;
  double heading_lo = -0.4 * std::numbers::pi;
  double heading_hi = 0.4 * std::numbers::pi;
  bool accepts(const AffinePairwiseDynamics& dyn, const State& x) const;
};

struct ConfusionMatrix {
  // counts[r][c]: r/c = 0 safe, 1 unsafe; rows reference, columns candidate
  std::int64_t counts[2][2] = {{0, 0}, {0, 0}};
  std::int64_t total = 0;
  std::string reference_kind;
  std::string candidate_kind;

  double percent(int r, int c) const;
  std::string to_json() const;
};

ConfusionMatrix confusion(const SafetyConcept& reference, const SafetyConcept& candidate,
                          const Grid& grid, double t, const StateFilter& filter,
                          double threshold = 0.0, int threads = 0);

struct PercentileReport {
  double mean = 0.0;
  double p0 = 0.0;
  double p5 = 0.0;
  double p50 = 0.0;
  double p95 = 0.0;
  double p100 = 0.0;
  std::int64_t count = 0;

  std::string to_json() const;
};

// Linear-interpolated percentile of an ascending-sorted sample, q in [0,100].
double linear_percentile(const std::vector<double>& sorted, double q);

PercentileReport percentile_report(const SafetyConcept& cpt, const DemoDataset& log,
                                   double t, int threads = 0);

// ---- plot-data export ------------------------------------------------------

struct SliceSpec {
  int dim_x = 0;
  int dim_y = 1;
  State base;  // fixed coordinates; entries at dim_x/dim_y are ignored
  double t = 0.0;
};

// Marching-squares contour of a 2-D slice at the given level, chained into
// polylines. CSV columns: polyline,vertex,x,y (closed loops repeat the first
// vertex at the end). All-one-side slices produce only the header.
std::string levelset_csv(const ValueField& field, const SliceSpec& slice, double level = 0.0);
void export_levelset(const ValueField& field, const SliceSpec& slice, double level,
                     const std::string& path);

// Pointwise game read off a solved field at (x, t): optimal controls of both
// players and the Hamiltonian value.
GameSolution field_game_at(const ValueField& field, const AffinePairwiseDynamics& dyn,
                           const State& x, double t, HamiltonianKind kind,
                           const ControlBox& ego_box, const ControlBox& contender_box,
                           const HocbfModel* model = nullptr);

// Sweep of one state coordinate: per row the optimal contender control, the
// Hamiltonian value, and the ego safe-control polygon (flattened vertices).
std::string controls_csv(const SafetyConcept& cpt, const State& base, int sweep_dim,
                         const std::vector<double>& sweep_values, double t);
void export_controls(const SafetyConcept& cpt, const State& base, int sweep_dim,
                     const std::vector<double>& sweep_values, double t,
                     const std::string& path);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace reachsafe
