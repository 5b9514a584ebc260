#include "reachsafe/hocbf.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace reachsafe {

namespace {

void check_barrier(const BarrierSpec& b) {
  if (b.relative_degree != 1 && b.relative_degree != 2)
    throw ConfigError("barrier: relative degree above 2 is not supported");
  if (b.state_dim <= 0) throw ConfigError("barrier: state_dim must be positive");
  for (int d : b.dims) {
    if (d < 0 || d >= b.state_dim) throw ConfigError("barrier: dim index out of range");
  }
}

}  // namespace

double BarrierSpec::value(const State& x) const {
  switch (kind) {
    case BarrierKind::circle: {
      double dx = x[dims[0]] - params[0];
      double dy = x[dims[1]] - params[1];
      return dx * dx + dy * dy - params[2] * params[2];
    }
    case BarrierKind::ellipse: {
      double ax = x[dims[0]] / params[0];
      double by = x[dims[1]] / params[1];
      return ax * ax + by * by - 1.0;
    }
    case BarrierKind::halfplane:
      return x[dims[0]] - params[0];
  }
  throw std::logic_error("barrier: bad kind");
}

Eigen::VectorXd BarrierSpec::gradient(const State& x) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(state_dim);
  switch (kind) {
    case BarrierKind::circle:
      g[dims[0]] = 2.0 * (x[dims[0]] - params[0]);
      g[dims[1]] = 2.0 * (x[dims[1]] - params[1]);
      break;
    case BarrierKind::ellipse:
      g[dims[0]] = 2.0 * x[dims[0]] / (params[0] * params[0]);
      g[dims[1]] = 2.0 * x[dims[1]] / (params[1] * params[1]);
      break;
    case BarrierKind::halfplane:
      g[dims[0]] = 1.0;
      break;
  }
  return g;
}

Eigen::MatrixXd BarrierSpec::hessian(const State&) const {
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(state_dim, state_dim);
  switch (kind) {
    case BarrierKind::circle:
      H(dims[0], dims[0]) = 2.0;
      H(dims[1], dims[1]) = 2.0;
      break;
    case BarrierKind::ellipse:
      H(dims[0], dims[0]) = 2.0 / (params[0] * params[0]);
      H(dims[1], dims[1]) = 2.0 / (params[1] * params[1]);
      break;
    case BarrierKind::halfplane:
      break;
  }
  return H;
}

BarrierSpec BarrierSpec::circle(double cx, double cy, double radius, int state_dim,
                                std::vector<int> dims, int relative_degree) {
  if (!(radius > 0.0)) throw ConfigError("circle barrier: radius must be > 0");
  BarrierSpec b;
  b.kind = BarrierKind::circle;
  b.params = Eigen::Vector3d(cx, cy, radius);
  b.dims = std::move(dims);
  b.state_dim = state_dim;
  b.relative_degree = relative_degree;
  check_barrier(b);
  return b;
}

BarrierSpec BarrierSpec::ellipse(double semi_x, double semi_y, int state_dim,
                                 std::vector<int> dims, int relative_degree) {
  if (!(semi_x > 0.0) || !(semi_y > 0.0))
    throw ConfigError("ellipse barrier: semi-axes must be > 0");
  BarrierSpec b;
  b.kind = BarrierKind::ellipse;
  b.params = Eigen::Vector2d(semi_x, semi_y);
  b.dims = std::move(dims);
  b.state_dim = state_dim;
  b.relative_degree = relative_degree;
  check_barrier(b);
  return b;
}

BarrierSpec BarrierSpec::halfplane(double offset, int state_dim, int dim, int relative_degree) {
  BarrierSpec b;
  b.kind = BarrierKind::halfplane;
  b.params = Eigen::VectorXd::Constant(1, offset);
  b.dims = {dim};
  b.state_dim = state_dim;
  b.relative_degree = relative_degree;
  check_barrier(b);
  return b;
}

std::string kappa_kind_name(KappaKind k) {
  switch (k) {
    case KappaKind::linear: return "linear";
    case KappaKind::cubic: return "cubic";
    case KappaKind::power: return "power";
    case KappaKind::linear_combination: return "linear-combination";
  }
  throw std::logic_error("kappa: bad kind");
}

KappaKind kappa_kind_from_name(const std::string& name) {
  if (name == "linear") return KappaKind::linear;
  if (name == "cubic") return KappaKind::cubic;
  if (name == "power") return KappaKind::power;
  if (name == "linear-combination") return KappaKind::linear_combination;
  throw ConfigError("unknown class-K kind: " + name);
}

int ClassKappaFn::param_count(KappaKind kind) {
  switch (kind) {
    case KappaKind::linear:
    case KappaKind::cubic: return 1;
    case KappaKind::power: return 2;
    case KappaKind::linear_combination: return 4;
  }
  throw std::logic_error("kappa: bad kind");
}

ClassKappaFn ClassKappaFn::from_raw(KappaKind kind, Eigen::VectorXd raw) {
  if (raw.size() != param_count(kind)) throw ConfigError("class-K: raw parameter count mismatch");
  if (!raw.allFinite()) throw ConfigError("class-K: non-finite raw parameter");
  ClassKappaFn f;
  f.kind_ = kind;
  f.raw_ = std::move(raw);
  return f;
}

ClassKappaFn ClassKappaFn::from_effective(KappaKind kind, const Eigen::VectorXd& effective) {
  if (effective.size() != param_count(kind))
    throw ConfigError("class-K: parameter count mismatch");
  Eigen::VectorXd raw(effective.size());
  for (int i = 0; i < effective.size(); ++i) {
    double p = effective[i];
    if (kind == KappaKind::power && i == 1) {
      if (!(p > 1.0)) throw ConfigError("power class-K: exponent must be > 1");
      raw[i] = softplus_inverse(p - 1.0);
    } else {
      if (!(p > 0.0)) throw ConfigError("class-K: parameters must be > 0");
      raw[i] = softplus_inverse(p);
    }
  }
  return from_raw(kind, std::move(raw));
}

Eigen::VectorXd ClassKappaFn::effective() const {
  Eigen::VectorXd p(raw_.size());
  for (int i = 0; i < raw_.size(); ++i) {
    p[i] = softplus(raw_[i]);
    if (kind_ == KappaKind::power && i == 1) p[i] += 1.0;
  }
  return p;
}

Eigen::VectorXd ClassKappaFn::raw_to_effective_jacobian() const {
  Eigen::VectorXd j(raw_.size());
  for (int i = 0; i < raw_.size(); ++i) j[i] = softplus_grad(raw_[i]);
  return j;
}

void kappa_eval(KappaKind kind, const double* p, double a, KappaEval& out) {
  switch (kind) {
    case KappaKind::linear:
      out.value = p[0] * a;
      out.slope = p[0];
      out.value_pgrad[0] = a;
      out.slope_pgrad[0] = 1.0;
      return;
    case KappaKind::cubic: {
      double a2 = a * a;
      out.value = p[0] * a2 * a;
      out.slope = 3.0 * p[0] * a2;
      out.value_pgrad[0] = a2 * a;
      out.slope_pgrad[0] = 3.0 * a2;
      return;
    }
    case KappaKind::power: {
      if (a == 0.0) {  // exponent > 1, so every piece vanishes at the origin
        out = KappaEval{};
        return;
      }
      double sgn = a > 0 ? 1.0 : -1.0;
      double am = std::abs(a);
      double lg = std::log(am);
      double magm1 = std::pow(am, p[1] - 1.0);  // |a|^{q-1}
      double mag = magm1 * am;                  // |a|^q
      out.value = p[0] * sgn * mag;
      out.slope = p[0] * p[1] * magm1;
      out.value_pgrad[0] = sgn * mag;
      out.value_pgrad[1] = p[0] * sgn * mag * lg;
      out.slope_pgrad[0] = p[1] * magm1;
      out.slope_pgrad[1] = p[0] * magm1 * (1.0 + p[1] * lg);
      return;
    }
    case KappaKind::linear_combination: {
      double a2 = a * a;
      double th = std::tanh(p[2] * a);
      double s2 = 1.0 - th * th;
      out.value = p[0] * a + p[1] * th + p[3] * a2 * a;
      out.slope = p[0] + p[1] * p[2] * s2 + 3.0 * p[3] * a2;
      out.value_pgrad[0] = a;
      out.value_pgrad[1] = th;
      out.value_pgrad[2] = p[1] * a * s2;
      out.value_pgrad[3] = a2 * a;
      out.slope_pgrad[0] = 1.0;
      out.slope_pgrad[1] = p[2] * s2;
      out.slope_pgrad[2] = p[1] * s2 * (1.0 - 2.0 * p[2] * a * th);
      out.slope_pgrad[3] = 3.0 * a2;
      return;
    }
  }
  throw std::logic_error("kappa: bad kind");
}

namespace {

KappaEval eval_of(const ClassKappaFn& f, double a) {
  Eigen::VectorXd p = f.effective();
  KappaEval e;
  kappa_eval(f.kind(), p.data(), a, e);
  return e;
}

}  // namespace

double ClassKappaFn::value(double a) const { return eval_of(*this, a).value; }

double ClassKappaFn::slope(double a) const { return eval_of(*this, a).slope; }

Eigen::VectorXd ClassKappaFn::value_param_grad(double a) const {
  KappaEval e = eval_of(*this, a);
  return Eigen::Map<Eigen::VectorXd>(e.value_pgrad, raw_.size());
}

Eigen::VectorXd ClassKappaFn::slope_param_grad(double a) const {
  KappaEval e = eval_of(*this, a);
  return Eigen::Map<Eigen::VectorXd>(e.slope_pgrad, raw_.size());
}

namespace {

nlohmann::json barrier_to_json(const BarrierSpec& b) {
  nlohmann::json j;
  switch (b.kind) {
    case BarrierKind::circle: j["kind"] = "circle"; break;
    case BarrierKind::ellipse: j["kind"] = "ellipse"; break;
    case BarrierKind::halfplane: j["kind"] = "halfplane"; break;
  }
  j["params"] = std::vector<double>(b.params.data(), b.params.data() + b.params.size());
  j["dims"] = b.dims;
  j["state_dim"] = b.state_dim;
  return j;
}

BarrierSpec barrier_from_json(const nlohmann::json& j, int relative_degree, int state_dim_hint) {
  std::string kind = j.at("kind").get<std::string>();
  std::vector<double> params = j.at("params").get<std::vector<double>>();
  int state_dim = j.contains("state_dim") ? j.at("state_dim").get<int>() : state_dim_hint;
  if (state_dim <= 0) throw ConfigError("barrier: missing state_dim");
  std::vector<int> dims = j.contains("dims") ? j.at("dims").get<std::vector<int>>()
                                             : std::vector<int>{0, 1};
  if (kind == "circle") {
    if (params.size() != 3) throw ConfigError("circle barrier: need params [cx, cy, r]");
    return BarrierSpec::circle(params[0], params[1], params[2], state_dim, dims,
                               relative_degree);
  }
  if (kind == "ellipse") {
    if (params.size() != 2) throw ConfigError("ellipse barrier: need params [a, b]");
    return BarrierSpec::ellipse(params[0], params[1], state_dim, dims, relative_degree);
  }
  if (kind == "halfplane") {
    if (params.size() != 1) throw ConfigError("halfplane barrier: need params [offset]");
    return BarrierSpec::halfplane(params[0], state_dim, dims.empty() ? 0 : dims[0],
                                  relative_degree);
  }
  throw ConfigError("unknown barrier kind: " + kind);
}

}  // namespace

std::string model_to_json(const HocbfModel& m) {
  nlohmann::json j;
  j["barrier"] = barrier_to_json(m.barrier);
  j["relative_degree"] = m.relative_degree();
  nlohmann::json alphas = nlohmann::json::array();
  for (const auto& a : m.alphas) {
    Eigen::VectorXd p = a.effective();
    nlohmann::json ja;
    ja["kind"] = kappa_kind_name(a.kind());
    ja["params"] = std::vector<double>(p.data(), p.data() + p.size());
    alphas.push_back(ja);
  }
  j["alphas"] = alphas;
  return j.dump(2) + "\n";
}

HocbfModel model_from_json(const std::string& text, int state_dim_hint) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model JSON parse failure: ") + e.what());
  }
  HocbfModel m;
  int mr = j.at("relative_degree").get<int>();
  if (mr != 1 && mr != 2)
    throw ConfigError("model: relative degree above 2 is not supported");
  m.barrier = barrier_from_json(j.at("barrier"), mr, state_dim_hint);
  for (const auto& ja : j.at("alphas")) {
    std::vector<double> p = ja.at("params").get<std::vector<double>>();
    m.alphas.push_back(ClassKappaFn::from_effective(
        kappa_kind_from_name(ja.at("kind").get<std::string>()),
        Eigen::Map<Eigen::VectorXd>(p.data(), p.size())));
  }
  if (static_cast<int>(m.alphas.size()) != mr)
    throw ConfigError("model: need one class-K function per derivative order");
  return m;
}

void save_model(const HocbfModel& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open model file for writing: " + path);
  out << model_to_json(m);
}

HocbfModel load_model(const std::string& path, int state_dim_hint) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open model file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return model_from_json(text, state_dim_hint);
}

ChainValues lie_chain(const BarrierSpec& barrier, const AffinePairwiseDynamics& dyn,
                      const State& x) {
  if (barrier.state_dim != dyn.state_dim)
    throw std::invalid_argument("lie_chain: barrier/dynamics state dim mismatch");
  ChainValues c;
  Eigen::VectorXd grad = barrier.gradient(x);
  Eigen::VectorXd f = dyn.drift(x);
  c.psi0 = barrier.value(x);
  c.lfb = grad.dot(f);
  if (barrier.relative_degree == 1) {
    c.ego_coeff = dyn.ego_gain(x).transpose() * grad;
    c.contender_coeff = dyn.contender_dim > 0
                            ? Eigen::VectorXd(dyn.contender_gain(x).transpose() * grad)
                            : Eigen::VectorXd(0);
    return c;
  }
  // grad(L_f b) = H_b f + J_f^T grad b; the chain stays exact because the
  // built-in barriers have constant Hessians and the drift Jacobian is analytic.
  Eigen::VectorXd w = barrier.hessian(x) * f + dyn.drift_jacobian(x).transpose() * grad;
  c.lf2b = w.dot(f);
  c.ego_coeff = dyn.ego_gain(x).transpose() * w;
  c.contender_coeff = dyn.contender_dim > 0
                          ? Eigen::VectorXd(dyn.contender_gain(x).transpose() * w)
                          : Eigen::VectorXd(0);
  return c;
}

std::vector<double> psi_sequence(const HocbfModel& m, const AffinePairwiseDynamics& dyn,
                                 const State& x) {
  if (static_cast<int>(m.alphas.size()) != m.relative_degree())
    throw ConfigError("model: need one class-K function per derivative order");
  ChainValues c = lie_chain(m.barrier, dyn, x);
  if (m.relative_degree() == 1) return {c.psi0};
  return {c.psi0, c.lfb + m.alphas[0].value(c.psi0)};
}

double effective_cbf(const HocbfModel& m, const AffinePairwiseDynamics& dyn, const State& x) {
  return psi_sequence(m, dyn, x).back();
}

HocbfAffineConstraint constraint_at(const HocbfModel& m, const AffinePairwiseDynamics& dyn,
                                    const State& x) {
  if (static_cast<int>(m.alphas.size()) != m.relative_degree())
    throw ConfigError("model: need one class-K function per derivative order");
  ChainValues c = lie_chain(m.barrier, dyn, x);
  HocbfAffineConstraint hc;
  hc.ego_coeff = c.ego_coeff;
  hc.contender_coeff = c.contender_coeff;
  if (m.relative_degree() == 1) {
    hc.offset = c.lfb + m.alphas[0].value(c.psi0);
  } else {
    double psi1 = c.lfb + m.alphas[0].value(c.psi0);
    // L_f^2 b + L_f(alpha_1 o psi_0) + alpha_2(psi_1)
    hc.offset = c.lf2b + m.alphas[0].slope(c.psi0) * c.lfb + m.alphas[1].value(psi1);
  }
  return hc;
}

double contender_term(const HocbfAffineConstraint& c, const ContenderRule& rule) {
  if (c.contender_coeff.size() == 0) return 0.0;
  switch (rule.mode) {
    case ContenderRule::Mode::ground_truth: {
      if (!rule.control || rule.control->size() != c.contender_coeff.size())
        throw ConfigError("contender rule: ground-truth control missing or wrong size");
      return c.contender_coeff.dot(*rule.control);
    }
    case ContenderRule::Mode::worst_case:
    case ContenderRule::Mode::fixed_interval: {
      if (!rule.interval || rule.interval->dim() != c.contender_coeff.size())
        throw ConfigError("contender rule: interval missing or wrong size");
      double t = 0.0;
      for (int i = 0; i < c.contender_coeff.size(); ++i) {
        t += std::min(c.contender_coeff[i] * rule.interval->lower[i],
                      c.contender_coeff[i] * rule.interval->upper[i]);
      }
      return t;
    }
  }
  throw std::logic_error("contender rule: bad mode");
}

FeasiblePolytope admissible_control_set(const HocbfModel& m, const AffinePairwiseDynamics& dyn,
                                        const State& x, const ControlBox& ego_box,
                                        const ContenderRule& rule) {
  HocbfAffineConstraint c = constraint_at(m, dyn, x);
  Halfspace hs{c.ego_coeff, c.offset + contender_term(c, rule)};
  return box_halfspace_polytope(ego_box, hs);
}

void validate_relative_degree(const HocbfModel& m, const AffinePairwiseDynamics& dyn,
                              const State& probe_lo, const State& probe_hi, std::uint64_t seed,
                              int probes) {
  Rng rng(seed);
  double max_ego = 0.0;
  double max_early = 0.0;
  for (int k = 0; k < probes; ++k) {
    State x(dyn.state_dim);
    for (int i = 0; i < dyn.state_dim; ++i) x[i] = rng.uniform(probe_lo[i], probe_hi[i]);
    ChainValues c = lie_chain(m.barrier, dyn, x);
    if (c.ego_coeff.size() > 0) max_ego = std::max(max_ego, c.ego_coeff.cwiseAbs().maxCoeff());
    if (m.relative_degree() == 2) {
      Eigen::VectorXd grad = m.barrier.gradient(x);
      Eigen::VectorXd lgb = dyn.ego_gain(x).transpose() * grad;
      if (lgb.size() > 0) max_early = std::max(max_early, lgb.cwiseAbs().maxCoeff());
    }
  }
  if (max_ego <= 1e-12)
    throw ConfigError("relative-degree mismatch: ego never reaches the constraint at probes");
  if (max_early > 1e-9)
    throw ConfigError("relative-degree mismatch: ego acts below the stated relative degree");
}

}  // namespace reachsafe
