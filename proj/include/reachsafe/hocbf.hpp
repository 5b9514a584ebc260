#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "reachsafe/dynamics.hpp"
#include "reachsafe/polytope.hpp"

namespace reachsafe {

enum class BarrierKind { circle, ellipse, halfplane };

// Barrier b with analytic gradient/Hessian; the zero super-level set is the
// region to render forward invariant.
struct BarrierSpec {
  BarrierKind kind = BarrierKind::circle;
  Eigen::VectorXd params;   // circle: (cx, cy, r); ellipse: (a, b); halfplane: (offset)
  std::vector<int> dims;    // state indices the barrier reads
  int state_dim = 0;
  int relative_degree = 2;  // only 1 and 2 are supported

  double value(const State& x) const;
  Eigen::VectorXd gradient(const State& x) const;
  Eigen::MatrixXd hessian(const State& x) const;

  static BarrierSpec circle(double cx, double cy, double radius, int state_dim,
                            std::vector<int> dims = {0, 1}, int relative_degree = 2);
  static BarrierSpec ellipse(double semi_x, double semi_y, int state_dim,
                             std::vector<int> dims = {0, 1}, int relative_degree = 2);
  static BarrierSpec halfplane(double offset, int state_dim, int dim = 0,
                               int relative_degree = 2);
};

enum class KappaKind { linear, cubic, power, linear_combination };

std::string kappa_kind_name(KappaKind k);
KappaKind kappa_kind_from_name(const std::string& name);

// Fused evaluation of a class-K function and all derivatives the learner
// needs; shares the pow/log work and never allocates.
struct KappaEval {
  double value = 0.0;
  double slope = 0.0;          // d alpha / da
  double value_pgrad[4] = {};  // d alpha / d p_eff
  double slope_pgrad[4] = {};  // d slope / d p_eff
};
void kappa_eval(KappaKind kind, const double* p_eff, double a, KappaEval& out);

// Extended class-K-infinity function family. Parameters live in an
// unconstrained raw space and map through softplus (power exponent maps to
// 1 + softplus) so gradient descent cannot leave the valid region.
//   linear:             a -> p1 a
//   cubic:              a -> p1 a^3
//   power:              a -> p1 sign(a) |a|^p2,  p2 > 1
//   linear-combination: a -> p1 a + p2 tanh(p3 a) + p4 a^3
class ClassKappaFn {
 public:
  ClassKappaFn() = default;
  static ClassKappaFn from_raw(KappaKind kind, Eigen::VectorXd raw);
  static ClassKappaFn from_effective(KappaKind kind, const Eigen::VectorXd& effective);
  static int param_count(KappaKind kind);

  KappaKind kind() const { return kind_; }
  const Eigen::VectorXd& raw() const { return raw_; }
  Eigen::VectorXd effective() const;

  double value(double a) const;
  double slope(double a) const;                      // d alpha / da
  Eigen::VectorXd value_param_grad(double a) const;  // d alpha / d effective params
  Eigen::VectorXd slope_param_grad(double a) const;  // d (d alpha/da) / d effective params
  Eigen::VectorXd raw_to_effective_jacobian() const; // diagonal chain factors

 private:
  KappaKind kind_ = KappaKind::linear;
  Eigen::VectorXd raw_;
};

struct HocbfModel {
  BarrierSpec barrier;
  std::vector<ClassKappaFn> alphas;  // one per derivative order, size == relative_degree

  int relative_degree() const { return barrier.relative_degree; }
};

std::string model_to_json(const HocbfModel& m);
HocbfModel model_from_json(const std::string& text, int state_dim_hint = -1);
void save_model(const HocbfModel& m, const std::string& path);
HocbfModel load_model(const std::string& path, int state_dim_hint = -1);

// Parameter-independent Lie-derivative chain pieces at a state.
struct ChainValues {
  double psi0 = 0.0;              // b(x)
  double lfb = 0.0;               // L_f b
  double lf2b = 0.0;              // L_f^2 b           (relative degree 2)
  Eigen::VectorXd ego_coeff;      // L_g L_f^{mr-1} b
  Eigen::VectorXd contender_coeff;
};
ChainValues lie_chain(const BarrierSpec& barrier, const AffinePairwiseDynamics& dyn,
                      const State& x);

// Constraint LHS is affine: ego_coeff . u_A + contender_coeff . u_B + offset >= 0.
struct HocbfAffineConstraint {
  Eigen::VectorXd ego_coeff;
  Eigen::VectorXd contender_coeff;
  double offset = 0.0;
  double lhs(const Control& u_ego, const Control& u_ctd) const {
    return ego_coeff.dot(u_ego) +
           (contender_coeff.size() > 0 ? contender_coeff.dot(u_ctd) : 0.0) + offset;
  }
};

std::vector<double> psi_sequence(const HocbfModel& m, const AffinePairwiseDynamics& dyn,
                                 const State& x);
double effective_cbf(const HocbfModel& m, const AffinePairwiseDynamics& dyn, const State& x);
HocbfAffineConstraint constraint_at(const HocbfModel& m, const AffinePairwiseDynamics& dyn,
                                    const State& x);

// How the contender term of the constraint is resolved when carving the ego's
// admissible set.
struct ContenderRule {
  enum class Mode { ground_truth, worst_case, fixed_interval };
  Mode mode = Mode::worst_case;
  std::optional<Control> control;      // ground_truth
  std::optional<ControlBox> interval;  // worst_case: full box; fixed_interval: sub-box
};

double contender_term(const HocbfAffineConstraint& c, const ContenderRule& rule);
FeasiblePolytope admissible_control_set(const HocbfModel& m, const AffinePairwiseDynamics& dyn,
                                        const State& x, const ControlBox& ego_box,
                                        const ContenderRule& rule);

// Probe-based configuration check: the ego must actually appear at the stated
// relative degree (and not earlier) at randomly drawn states.
void validate_relative_degree(const HocbfModel& m, const AffinePairwiseDynamics& dyn,
                              const State& probe_lo, const State& probe_hi,
                              std::uint64_t seed = 11, int probes = 32);

}  // namespace reachsafe
