#pragma once

#include <optional>
#include <string>
#include <vector>

#include "reachsafe/dynamics.hpp"
#include "reachsafe/hocbf.hpp"

namespace reachsafe {

// Demonstration log. All samples share the state/control dimensions; the
// contender column block is optional and must be all-or-nothing.
struct DemoDataset {
  std::vector<double> t;
  std::vector<State> x;
  std::vector<Control> u_ego;
  std::vector<Control> u_ctd;  // empty when no contender was recorded

  std::size_t size() const { return x.size(); }
  bool has_contender() const { return !u_ctd.empty(); }
  void validate() const;
};

// CSV schema: t,x0..x{n-1},uA0..uA{mA-1}[,uB0..uB{mB-1}].
void write_demos_csv(const DemoDataset& d, const std::string& path);
DemoDataset read_demos_csv(const std::string& path);
// JSONL alternative: one {"t":..,"x":[..],"uA":[..],"uB":[..]} object per line.
void write_demos_jsonl(const DemoDataset& d, const std::string& path);
DemoDataset read_demos_jsonl(const std::string& path);

struct LossWeights {
  double beta1 = 1.0;    // constraint-violation hinge
  double beta2 = 0.001;  // saturated pressure on satisfied margins
  double beta3 = 1.0;    // effective-CBF violation hinge
  double beta4 = 0.001;  // saturated pressure on positive effective CBF
  double beta5 = 0.001;  // parameter regularizer
  void validate() const;
};

// How the contender control enters each sample's constraint margin.
struct DisturbanceProvider {
  ContenderRule::Mode mode = ContenderRule::Mode::worst_case;
  std::optional<ControlBox> interval;  // worst-case box or fixed interval
};

struct LossBreakdown {
  double total = 0.0;
  double violation = 0.0;        // beta1 term
  double saturation = 0.0;       // beta2 term
  double cbf_violation = 0.0;    // beta3 term
  double cbf_saturation = 0.0;   // beta4 term
  double regularizer = 0.0;      // beta5 term
};

// Constraint margins m_j of every sample under the model (ego and contender
// terms resolved through the provider).
std::vector<double> margins(const HocbfModel& m, const AffinePairwiseDynamics& dyn,
                            const DemoDataset& data, const DisturbanceProvider& provider);
double satisfaction_rate(const HocbfModel& m, const AffinePairwiseDynamics& dyn,
                         const DemoDataset& data, const DisturbanceProvider& provider,
                         double tol = 1e-6);

LossBreakdown loss(const HocbfModel& m, const AffinePairwiseDynamics& dyn,
                   const DemoDataset& data, const DisturbanceProvider& provider,
                   const LossWeights& w, int threads = 0);
// Exact gradient of the loss with respect to the raw (pre-softplus)
// parameters, alpha blocks concatenated in order. Kinks take the 0 branch.
Eigen::VectorXd gradient(const HocbfModel& m, const AffinePairwiseDynamics& dyn,
                         const DemoDataset& data, const DisturbanceProvider& provider,
                         const LossWeights& w, int threads = 0,
                         LossBreakdown* breakdown = nullptr);

struct FitOptions {
  LossWeights weights;
  double learning_rate = 0.001;
  long steps = 10000;
  double momentum = 0.0;
  int threads = 0;
};

struct FitResult {
  HocbfModel model;
  std::vector<double> loss_trace;  // loss at each visited iterate
  long steps_run = 0;
  bool nan_abort = false;          // model is the last finite iterate
};

// Deterministic full-batch gradient descent on the raw parameters.
FitResult fit(const HocbfModel& init, const AffinePairwiseDynamics& dyn,
              const DemoDataset& data, const DisturbanceProvider& provider,
              const FitOptions& options);

}  // namespace reachsafe
