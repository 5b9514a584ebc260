#include "reachsafe/learning.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace reachsafe {

void DemoDataset::validate() const {
  if (x.empty()) throw ConfigError("dataset: empty");
  if (t.size() != x.size() || u_ego.size() != x.size())
    throw ConfigError("dataset: column lengths differ");
  if (!u_ctd.empty() && u_ctd.size() != x.size())
    throw ConfigError("dataset: contender block must cover every sample or none");
  for (std::size_t j = 1; j < x.size(); ++j) {
    if (x[j].size() != x[0].size() || u_ego[j].size() != u_ego[0].size())
      throw ConfigError("dataset: ragged sample at row " + std::to_string(j));
    if (!u_ctd.empty() && u_ctd[j].size() != u_ctd[0].size())
      throw ConfigError("dataset: ragged contender sample at row " + std::to_string(j));
  }
}

void LossWeights::validate() const {
  if (!(beta1 > 0.0)) throw ConfigError("loss weights: beta1 must be > 0");
  for (double b : {beta2, beta3, beta4, beta5}) {
    if (b < 0.0) throw ConfigError("loss weights: betas must be >= 0");
  }
}

namespace {

double parse_field(const std::string& field, const std::string& path, std::size_t row) {
  double v = 0.0;
  const char* b = field.data();
  const char* e = b + field.size();
  auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e)
    throw ConfigError(path + " row " + std::to_string(row) + ": bad number '" + field + "'");
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void write_demos_csv(const DemoDataset& d, const std::string& path) {
  d.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  const int n = static_cast<int>(d.x[0].size());
  const int ma = static_cast<int>(d.u_ego[0].size());
  const int mb = d.has_contender() ? static_cast<int>(d.u_ctd[0].size()) : 0;
  out << "t";
  for (int i = 0; i < n; ++i) out << ",x" << i;
  for (int i = 0; i < ma; ++i) out << ",uA" << i;
  for (int i = 0; i < mb; ++i) out << ",uB" << i;
  out << "\n";
  for (std::size_t j = 0; j < d.size(); ++j) {
    out << format_double(d.t[j]);
    for (int i = 0; i < n; ++i) out << "," << format_double(d.x[j][i]);
    for (int i = 0; i < ma; ++i) out << "," << format_double(d.u_ego[j][i]);
    for (int i = 0; i < mb; ++i) out << "," << format_double(d.u_ctd[j][i]);
    out << "\n";
  }
}

DemoDataset read_demos_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open dataset: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path + ": missing header");
  auto header = split_csv(line);
  if (header.empty() || header[0] != "t")
    throw ConfigError(path + " row 0: header must start with 't'");
  int n = 0, ma = 0, mb = 0;
  for (std::size_t i = 1; i < header.size(); ++i) {
    const std::string& h = header[i];
    if (h == "x" + std::to_string(n) && ma == 0 && mb == 0) ++n;
    else if (h == "uA" + std::to_string(ma) && mb == 0) ++ma;
    else if (h == "uB" + std::to_string(mb)) ++mb;
    else throw ConfigError(path + " row 0: unexpected column '" + h + "'");
  }
  if (n == 0 || ma == 0) throw ConfigError(path + " row 0: need state and ego columns");
  DemoDataset d;
  std::size_t row = 1;
  const std::size_t width = 1 + n + ma + mb;
  while (std::getline(in, line)) {
    if (line.empty()) {
      ++row;
      continue;
    }
    auto fields = split_csv(line);
    if (fields.size() != width)
      throw ConfigError(path + " row " + std::to_string(row) + ": expected " +
                        std::to_string(width) + " fields, got " + std::to_string(fields.size()));
    d.t.push_back(parse_field(fields[0], path, row));
    State x(n);
    for (int i = 0; i < n; ++i) x[i] = parse_field(fields[1 + i], path, row);
    Control ua(ma);
    for (int i = 0; i < ma; ++i) ua[i] = parse_field(fields[1 + n + i], path, row);
    d.x.push_back(std::move(x));
    d.u_ego.push_back(std::move(ua));
    if (mb > 0) {
      Control ub(mb);
      for (int i = 0; i < mb; ++i) ub[i] = parse_field(fields[1 + n + ma + i], path, row);
      d.u_ctd.push_back(std::move(ub));
    }
    ++row;
  }
  d.validate();
  return d;
}

void write_demos_jsonl(const DemoDataset& d, const std::string& path) {
  d.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  for (std::size_t j = 0; j < d.size(); ++j) {
    nlohmann::json o;
    o["t"] = d.t[j];
    o["x"] = std::vector<double>(d.x[j].data(), d.x[j].data() + d.x[j].size());
    o["uA"] = std::vector<double>(d.u_ego[j].data(), d.u_ego[j].data() + d.u_ego[j].size());
    if (d.has_contender())
      o["uB"] = std::vector<double>(d.u_ctd[j].data(), d.u_ctd[j].data() + d.u_ctd[j].size());
    out << o.dump() << "\n";
  }
}

DemoDataset read_demos_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open dataset: " + path);
  DemoDataset d;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) {
      ++row;
      continue;
    }
    nlohmann::json o;
    try {
      o = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path + " row " + std::to_string(row) + ": " + e.what());
    }
    d.t.push_back(o.at("t").get<double>());
    auto xs = o.at("x").get<std::vector<double>>();
    auto ua = o.at("uA").get<std::vector<double>>();
    d.x.push_back(Eigen::Map<Eigen::VectorXd>(xs.data(), xs.size()));
    d.u_ego.push_back(Eigen::Map<Eigen::VectorXd>(ua.data(), ua.size()));
    if (o.contains("uB")) {
      auto ub = o.at("uB").get<std::vector<double>>();
      d.u_ctd.push_back(Eigen::Map<Eigen::VectorXd>(ub.data(), ub.size()));
    }
    ++row;
  }
  d.validate();
  return d;
}

namespace {

// Parameter-independent per-sample quantities.
struct SampleStatics {
  double psi0;
  double lfb;
  double lf2b;
  double gu;    // ego_coeff . u_ego
  double dist;  // resolved contender term
};

void check_inputs(const HocbfModel& m, const AffinePairwiseDynamics& dyn,
                  const DemoDataset& data, const DisturbanceProvider& provider) {
  data.validate();
  if (static_cast<int>(m.alphas.size()) != m.relative_degree())
    throw ConfigError("model: need one class-K function per derivative order");
  if (data.x[0].size() != dyn.state_dim || data.u_ego[0].size() != dyn.ego_dim)
    throw ConfigError("dataset: dimensions do not match the dynamics");
  if (dyn.contender_dim > 0) {
    if (provider.mode == ContenderRule::Mode::ground_truth) {
      if (!data.has_contender())
        throw ConfigError("ground-truth provider needs recorded contender controls");
      if (data.u_ctd[0].size() != dyn.contender_dim)
        throw ConfigError("dataset: contender control dimension mismatch");
    } else {
      if (!provider.interval || provider.interval->dim() != dyn.contender_dim)
        throw ConfigError("provider: interval missing or wrong dimension");
    }
  }
}

std::vector<SampleStatics> precompute_statics(const HocbfModel& m,
                                              const AffinePairwiseDynamics& dyn,
                                              const DemoDataset& data,
                                              const DisturbanceProvider& provider, int threads) {
  check_inputs(m, dyn, data, provider);
  const std::size_t N = data.size();
  std::vector<SampleStatics> st(N);
  std::size_t workers = worker_count(threads);
  parallel_for(N, workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t j = lo; j < hi; ++j) {
      ChainValues c = lie_chain(m.barrier, dyn, data.x[j]);
      SampleStatics s;
      s.psi0 = c.psi0;
      s.lfb = c.lfb;
      s.lf2b = c.lf2b;
      s.gu = c.ego_coeff.dot(data.u_ego[j]);
      s.dist = 0.0;
      if (dyn.contender_dim > 0) {
        if (provider.mode == ContenderRule::Mode::ground_truth) {
          s.dist = c.contender_coeff.dot(data.u_ctd[j]);
        } else {
          for (int i = 0; i < dyn.contender_dim; ++i) {
            s.dist += std::min(c.contender_coeff[i] * provider.interval->lower[i],
                               c.contender_coeff[i] * provider.interval->upper[i]);
          }
        }
      }
      st[j] = s;
    }
  });
  return st;
}

// Full-batch loss/gradient over the cached statics. Gradients land in the raw
// parameter space; the min/max kinks take the 0 branch at ties.
class BatchEvaluator {
 public:
  BatchEvaluator(const HocbfModel& model, std::vector<SampleStatics> statics,
                 const LossWeights& w, int threads)
      : mr_(model.relative_degree()), st_(std::move(statics)), w_(w) {
    w_.validate();
    kinds_[0] = model.alphas[0].kind();
    np_[0] = ClassKappaFn::param_count(kinds_[0]);
    if (mr_ == 2) {
      kinds_[1] = model.alphas[1].kind();
      np_[1] = ClassKappaFn::param_count(kinds_[1]);
    } else {
      np_[1] = 0;
    }
    nparams_ = np_[0] + np_[1];
    workers_ = worker_count(threads);
    const std::size_t N = st_.size();
    for (auto& buf : terms_) buf.assign(N, 0.0);
    gbuf_.assign(nparams_, std::vector<double>(N, 0.0));
  }

  int nparams() const { return nparams_; }

  double eval(const Eigen::VectorXd& raw, LossBreakdown* bd, Eigen::VectorXd* grad) {
    double p1[4], p2[4];
    Eigen::VectorXd eff(nparams_);
    for (int i = 0; i < np_[0]; ++i) {
      p1[i] = softplus(raw[i]);
      if (kinds_[0] == KappaKind::power && i == 1) p1[i] += 1.0;
      eff[i] = p1[i];
    }
    for (int i = 0; i < np_[1]; ++i) {
      p2[i] = softplus(raw[np_[0] + i]);
      if (kinds_[1] == KappaKind::power && i == 1) p2[i] += 1.0;
      eff[np_[0] + i] = p2[i];
    }

    const std::size_t N = st_.size();
    const bool want_grad = grad != nullptr;
    parallel_for(N, workers_, [&](std::size_t lo, std::size_t hi) {
      KappaEval e1, e2;
      for (std::size_t j = lo; j < hi; ++j) {
        const SampleStatics& s = st_[j];
        kappa_eval(kinds_[0], p1, s.psi0, e1);
        double psi_last, F;
        if (mr_ == 2) {
          psi_last = s.lfb + e1.value;
          kappa_eval(kinds_[1], p2, psi_last, e2);
          F = s.lf2b + e1.slope * s.lfb + e2.value;
        } else {
          psi_last = s.psi0;
          F = s.lfb + e1.value;
        }
        const double mj = s.gu + s.dist + F;

        double dldm = 0.0;
        if (mj < 0.0) {
          terms_[0][j] = -w_.beta1 * mj;
          terms_[1][j] = 0.0;
          dldm = -w_.beta1;
        } else {
          terms_[0][j] = 0.0;
          if (mj > 0.0) {
            double th = std::tanh(mj);
            terms_[1][j] = w_.beta2 * th;
            dldm = w_.beta2 * (1.0 - th * th);
          } else {
            terms_[1][j] = 0.0;
          }
        }
        double dldpsi = 0.0;
        if (psi_last < 0.0) {
          terms_[2][j] = -w_.beta3 * psi_last;
          terms_[3][j] = 0.0;
          dldpsi = -w_.beta3;
        } else {
          terms_[2][j] = 0.0;
          if (psi_last > 0.0) {
            double th = std::tanh(psi_last);
            terms_[3][j] = w_.beta4 * th;
            dldpsi = w_.beta4 * (1.0 - th * th);
          } else {
            terms_[3][j] = 0.0;
          }
        }

        if (!want_grad) continue;
        if (mr_ == 2) {
          for (int c = 0; c < np_[0]; ++c) {
            double dm = e1.slope_pgrad[c] * s.lfb + e2.slope * e1.value_pgrad[c];
            gbuf_[c][j] = dldm * dm + dldpsi * e1.value_pgrad[c];
          }
          for (int c = 0; c < np_[1]; ++c) {
            gbuf_[np_[0] + c][j] = dldm * e2.value_pgrad[c];
          }
        } else {
          // psi_last == psi0 carries no parameters at relative degree 1.
          for (int c = 0; c < np_[0]; ++c) gbuf_[c][j] = dldm * e1.value_pgrad[c];
        }
      }
    });

    const double invN = 1.0 / static_cast<double>(N);
    LossBreakdown b;
    b.violation = tree_sum(terms_[0]) * invN;
    b.saturation = tree_sum(terms_[1]) * invN;
    b.cbf_violation = tree_sum(terms_[2]) * invN;
    b.cbf_saturation = tree_sum(terms_[3]) * invN;
    b.regularizer = w_.beta5 * eff.squaredNorm();
    b.total = b.violation + b.saturation + b.cbf_violation + b.cbf_saturation + b.regularizer;
    if (bd) *bd = b;
    if (want_grad) {
      grad->resize(nparams_);
      for (int c = 0; c < nparams_; ++c) {
        (*grad)[c] = tree_sum(gbuf_[c]) * invN + 2.0 * w_.beta5 * eff[c];
        (*grad)[c] *= softplus_grad(raw[c]);
      }
    }
    return b.total;
  }

 private:
  int mr_;
  std::vector<SampleStatics> st_;
  LossWeights w_;
  KappaKind kinds_[2] = {KappaKind::linear, KappaKind::linear};
  int np_[2] = {0, 0};
  int nparams_ = 0;
  std::size_t workers_ = 1;
  std::vector<double> terms_[4];
  std::vector<std::vector<double>> gbuf_;
};

Eigen::VectorXd concat_raw(const HocbfModel& m) {
  int total = 0;
  for (const auto& a : m.alphas) total += static_cast<int>(a.raw().size());
  Eigen::VectorXd raw(total);
  int at = 0;
  for (const auto& a : m.alphas) {
    raw.segment(at, a.raw().size()) = a.raw();
    at += static_cast<int>(a.raw().size());
  }
  return raw;
}

HocbfModel with_raw(const HocbfModel& m, const Eigen::VectorXd& raw) {
  HocbfModel out = m;
  int at = 0;
  for (auto& a : out.alphas) {
    int n = static_cast<int>(a.raw().size());
    a = ClassKappaFn::from_raw(a.kind(), raw.segment(at, n));
    at += n;
  }
  return out;
}

}  // namespace

std::vector<double> margins(const HocbfModel& m, const AffinePairwiseDynamics& dyn,
                            const DemoDataset& data, const DisturbanceProvider& provider) {
  check_inputs(m, dyn, data, provider);
  std::vector<double> out(data.size());
  for (std::size_t j = 0; j < data.size(); ++j) {
    HocbfAffineConstraint c = constraint_at(m, dyn, data.x[j]);
    double dist = 0.0;
    if (dyn.contender_dim > 0) {
      ContenderRule rule;
      rule.mode = provider.mode;
      if (provider.mode == ContenderRule::Mode::ground_truth) rule.control = data.u_ctd[j];
      else rule.interval = provider.interval;
      dist = contender_term(c, rule);
    }
    out[j] = c.ego_coeff.dot(data.u_ego[j]) + dist + c.offset;
  }
  return out;
}

double satisfaction_rate(const HocbfModel& m, const AffinePairwiseDynamics& dyn,
                         const DemoDataset& data, const DisturbanceProvider& provider,
                         double tol) {
  auto ms = margins(m, dyn, data, provider);
  std::size_t ok = 0;
  for (double v : ms) {
    if (v >= -tol) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(ms.size());
}

LossBreakdown loss(const HocbfModel& m, const AffinePairwiseDynamics& dyn,
                   const DemoDataset& data, const DisturbanceProvider& provider,
                   const LossWeights& w, int threads) {
  BatchEvaluator ev(m, precompute_statics(m, dyn, data, provider, threads), w, threads);
  LossBreakdown bd;
  ev.eval(concat_raw(m), &bd, nullptr);
  return bd;
}

Eigen::VectorXd gradient(const HocbfModel& m, const AffinePairwiseDynamics& dyn,
                         const DemoDataset& data, const DisturbanceProvider& provider,
                         const LossWeights& w, int threads, LossBreakdown* breakdown) {
  BatchEvaluator ev(m, precompute_statics(m, dyn, data, provider, threads), w, threads);
  Eigen::VectorXd grad;
  ev.eval(concat_raw(m), breakdown, &grad);
  return grad;
}

FitResult fit(const HocbfModel& init, const AffinePairwiseDynamics& dyn, const DemoDataset& data,
              const DisturbanceProvider& provider, const FitOptions& options) {
  if (options.steps < 0) throw ConfigError("fit: steps must be >= 0");
  if (!(options.learning_rate > 0.0)) throw ConfigError("fit: learning rate must be > 0");
  BatchEvaluator ev(init, precompute_statics(init, dyn, data, provider, options.threads),
                    options.weights, options.threads);
  FitResult res;
  res.model = init;
  Eigen::VectorXd raw = concat_raw(init);
  Eigen::VectorXd prev = raw;
  Eigen::VectorXd vel = Eigen::VectorXd::Zero(ev.nparams());
  Eigen::VectorXd grad(ev.nparams());
  res.loss_trace.reserve(options.steps);
  for (long k = 0; k < options.steps; ++k) {
    double l = ev.eval(raw, nullptr, &grad);
    if (!std::isfinite(l) || !grad.allFinite()) {
      res.nan_abort = true;
      raw = prev;  // last finite iterate
      break;
    }
    res.loss_trace.push_back(l);
    prev = raw;
    vel = options.momentum * vel - options.learning_rate * grad;
    raw += vel;
    res.steps_run = k + 1;
  }
  res.model = with_raw(init, raw);
  return res;
}

}  // namespace reachsafe
