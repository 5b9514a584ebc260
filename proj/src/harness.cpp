#include "reachsafe/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace reachsafe {

PlanResult plan_hocbf_qp(const HocbfModel& model, const AffinePairwiseDynamics& dyn,
                         const State& x0, const Eigen::Vector2d& goal, const ControlBox& box,
                         const ContenderRule& rule, const PlanOptions& opt) {
  if (dyn.state_dim != 4 || dyn.ego_dim != 2)
    throw ConfigError("planner: expects the 4-state car with (steer, accel) controls");
  if (box.dim() != 2) throw ConfigError("planner: control box must be 2-D");
  if (!(opt.dt > 0.0) || !(opt.horizon > 0.0))
    throw ConfigError("planner: dt and horizon must be > 0");
  if (opt.slack < 0.0) throw ConfigError("planner: slack must be >= 0");

  PlanResult res;
  State x = x0;
  res.times.push_back(0.0);
  res.states.push_back(x);
  res.barrier.push_back(model.barrier.value(x));

  const long nsteps = std::lround(std::ceil(opt.horizon / opt.dt - 1e-12));
  for (long k = 0; k < nsteps; ++k) {
    const double dist = std::hypot(goal[0] - x[0], goal[1] - x[1]);
    if (dist <= opt.goal_radius) {
      res.reached_goal = true;
      break;
    }
    const double theta_des = std::atan2(goal[1] - x[1], goal[0] - x[0]);
    Control u_ref(2);
    u_ref << opt.heading_gain * wrap_angle(theta_des - x[2]),
        opt.speed_gain * (opt.target_speed - x[3]);

    HocbfAffineConstraint c = constraint_at(model, dyn, x);
    Halfspace hs{c.ego_coeff, c.offset + contender_term(c, rule) - opt.slack};
    FeasiblePolytope poly = box_halfspace_polytope(box, hs);
    Control u(2);
    if (poly.empty) {
      ++res.infeasible_steps;
      if (res.infeasible_steps > opt.max_infeasible) {
        res.aborted = true;
        break;
      }
      for (int j = 0; j < 2; ++j)  // feasibility-maximizing box vertex
        u[j] = hs.normal[j] > 0.0 ? box.upper[j] : box.lower[j];
    } else {
      u = project_onto(box, hs, poly, u_ref);
    }

    auto rate = [&](const State& s) { return dyn.rate(s, u, Control(0)); };
    const Eigen::VectorXd k1 = rate(x);
    const Eigen::VectorXd k2 = rate(x + 0.5 * opt.dt * k1);
    const Eigen::VectorXd k3 = rate(x + 0.5 * opt.dt * k2);
    const Eigen::VectorXd k4 = rate(x + opt.dt * k3);
    x = x + (opt.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    x[2] = wrap_angle(x[2]);
    if (!x.allFinite()) throw NumericalError("planner: non-finite state");

    res.controls.push_back(u);
    res.times.push_back(opt.dt * static_cast<double>(k + 1));
    res.states.push_back(x);
    res.barrier.push_back(model.barrier.value(x));
  }
  return res;
}

DemoGenResult gen_demo_corpus(const HocbfModel& model, const DemoGenConfig& cfg) {
  if (cfg.episodes <= 0) throw ConfigError("gen demos: episodes must be > 0");
  AffinePairwiseDynamics dyn = make_simple_car(cfg.wheelbase);
  ControlBox box = cfg.ego_box;
  if (box.dim() == 0) {
    Eigen::Vector2d lo(-1.0, -2.0), hi(1.0, 2.0);
    box = ControlBox(lo, hi);
  }
  ContenderRule rule;  // single-agent: the contender term is identically zero

  DemoGenResult out;
  for (int e = 0; e < cfg.episodes; ++e) {
    Rng rng(Rng::substream(cfg.seed, static_cast<std::uint64_t>(e)));
    bool done = false;
    for (int attempt = 0; attempt < 200 && !done; ++attempt) {
      const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double radius = rng.uniform(cfg.spawn_radius_lo, cfg.spawn_radius_hi);
      const double v0 = rng.uniform(cfg.speed_lo, cfg.speed_hi);
      const double jitter = rng.uniform(-cfg.heading_jitter, cfg.heading_jitter);
      const double goal_offset = rng.uniform(-0.5, 0.5);

      const double cx = cfg.obstacle_x, cy = cfg.obstacle_y;
      const double sx = cx + radius * std::cos(phi);
      const double sy = cy + radius * std::sin(phi);
      Eigen::Vector2d goal(cx - radius * std::cos(phi) - goal_offset * std::sin(phi),
                           cy - radius * std::sin(phi) + goal_offset * std::cos(phi));
      const double theta0 = wrap_angle(std::atan2(goal[1] - sy, goal[0] - sx) + jitter);
      State x0(4);
      x0 << sx, sy, theta0, v0;

      const std::vector<double> psi = psi_sequence(model, dyn, x0);
      if (*std::min_element(psi.begin(), psi.end()) <= 0.0) {
        ++out.rejected_starts;
        continue;
      }
      PlanResult plan = plan_hocbf_qp(model, dyn, x0, goal, box, rule, cfg.plan);
      if (plan.aborted || plan.infeasible_steps > 0) {
        ++out.discarded_episodes;
        continue;
      }
      for (std::size_t k = 0; k < plan.controls.size(); ++k) {
        out.data.t.push_back(plan.times[k]);
        out.data.x.push_back(plan.states[k]);
        out.data.u_ego.push_back(plan.controls[k]);
      }
      out.episodes.push_back(std::move(plan));
      done = true;
    }
    if (!done) throw NumericalError("gen demos: no valid episode found after 200 attempts");
  }
  out.data.validate();
  return out;
}

DemoDataset gen_highway_log(const HighwayLogConfig& cfg) {
  if (cfg.samples <= 0) throw ConfigError("highway log: samples must be > 0");
  if (!(cfg.dt > 0.0) || cfg.steps_per_episode <= 0)
    throw ConfigError("highway log: bad stepping parameters");
  DemoDataset data;
  data.t.reserve(cfg.samples);
  std::uint64_t episode = 0;
  while (static_cast<int>(data.size()) < cfg.samples) {
    Rng rng(Rng::substream(cfg.seed, episode++));
    const double sign = rng.uniform01() < 0.5 ? -1.0 : 1.0;
    double dx = sign * rng.uniform(cfg.gap_lo, cfg.gap_hi);
    const double dy = rng.uniform(-cfg.lateral_half_width, cfg.lateral_half_width);
    double va = rng.uniform(cfg.speed_lo, cfg.speed_hi);
    double vb = rng.uniform(cfg.speed_lo, cfg.speed_hi);
    double t = 0.0;
    for (int k = 0; k < cfg.steps_per_episode && static_cast<int>(data.size()) < cfg.samples;
         ++k) {
      double aa = rng.uniform(-cfg.accel_limit, cfg.accel_limit);
      double ab = rng.uniform(-cfg.accel_limit, cfg.accel_limit);
      if (va + aa * cfg.dt < 0.0) aa = -va / cfg.dt;  // no reversing
      if (vb + ab * cfg.dt < 0.0) ab = -vb / cfg.dt;
      State x(4);
      x << dx, dy, va, vb;
      Control ua(1), ub(1);
      ua << aa;
      ub << ab;
      data.t.push_back(t);
      data.x.push_back(x);
      data.u_ego.push_back(ua);
      data.u_ctd.push_back(ub);
      dx += (vb - va) * cfg.dt + 0.5 * (ab - aa) * cfg.dt * cfg.dt;
      va += aa * cfg.dt;
      vb += ab * cfg.dt;
      t += cfg.dt;
    }
  }
  data.validate();
  return data;
}

bool StateFilter::accepts(const AffinePairwiseDynamics& dyn, const State& x) const {
  for (int s : dyn.speed_dims)
    if (x[s] < speed_lo || x[s] > speed_hi) return false;
  for (int h : dyn.heading_dims)
    if (x[h] < heading_lo || x[h] > heading_hi) return false;
  return true;
}

double ConfusionMatrix::percent(int r, int c) const {
  return total == 0 ? 0.0 : 100.0 * static_cast<double>(counts[r][c]) / static_cast<double>(total);
}

std::string ConfusionMatrix::to_json() const {
  nlohmann::json j;
  j["reference"] = reference_kind;
  j["candidate"] = candidate_kind;
  j["total"] = total;
  j["counts"]["safe_safe"] = counts[0][0];
  j["counts"]["safe_unsafe"] = counts[0][1];
  j["counts"]["unsafe_safe"] = counts[1][0];
  j["counts"]["unsafe_unsafe"] = counts[1][1];
  j["percent"]["safe_safe"] = percent(0, 0);
  j["percent"]["safe_unsafe"] = percent(0, 1);
  j["percent"]["unsafe_safe"] = percent(1, 0);
  j["percent"]["unsafe_unsafe"] = percent(1, 1);
  return j.dump(2) + "\n";
}

ConfusionMatrix confusion(const SafetyConcept& reference, const SafetyConcept& candidate,
                          const Grid& grid, double t, const StateFilter& filter,
                          double threshold, int threads) {
  const std::int64_t n = grid.total();
  std::vector<std::uint8_t> cls(static_cast<std::size_t>(n), 255);
  parallel_for(static_cast<std::size_t>(n), worker_count(threads),
               [&](std::size_t lo, std::size_t hi) {
                 for (std::size_t i = lo; i < hi; ++i) {
                   State x = grid.node(static_cast<std::int64_t>(i));
                   if (!filter.accepts(*reference.dyn, x)) continue;
                   const int r = classify_unsafe(reference, x, t, threshold) ? 1 : 0;
                   const int c = classify_unsafe(candidate, x, t, threshold) ? 1 : 0;
                   cls[i] = static_cast<std::uint8_t>(r * 2 + c);
                 }
               });
  ConfusionMatrix cm;
  cm.reference_kind = concept_kind_name(reference.kind);
  cm.candidate_kind = concept_kind_name(candidate.kind);
  for (std::uint8_t v : cls) {
    if (v == 255) continue;
    ++cm.counts[v / 2][v % 2];
    ++cm.total;
  }
  return cm;
}

double linear_percentile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw ConfigError("percentile: empty sample");
  if (q < 0.0 || q > 100.0) throw ConfigError("percentile: q outside [0, 100]");
  const double pos = q / 100.0 * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::string PercentileReport::to_json() const {
  nlohmann::json j;
  j["mean"] = mean;
  j["p0"] = p0;
  j["p5"] = p5;
  j["p50"] = p50;
  j["p95"] = p95;
  j["p100"] = p100;
  j["count"] = count;
  return j.dump(2) + "\n";
}

PercentileReport percentile_report(const SafetyConcept& cpt, const DemoDataset& log,
                                   double t, int threads) {
  if (log.size() == 0) throw ConfigError("percentile report: empty log");
  std::vector<double> values(log.size());
  parallel_for(log.size(), worker_count(threads), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) values[i] = evaluate(cpt, log.x[i], t);
  });
  PercentileReport rep;
  rep.count = static_cast<std::int64_t>(values.size());
  rep.mean = tree_sum(values) / static_cast<double>(values.size());
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  rep.p0 = linear_percentile(sorted, 0.0);
  rep.p5 = linear_percentile(sorted, 5.0);
  rep.p50 = linear_percentile(sorted, 50.0);
  rep.p95 = linear_percentile(sorted, 95.0);
  rep.p100 = linear_percentile(sorted, 100.0);
  return rep;
}

namespace {

struct ContourPoint {
  double x = 0.0;
  double y = 0.0;
  bool operator<(const ContourPoint& o) const {
    return x != o.x ? x < o.x : y < o.y;
  }
  bool operator==(const ContourPoint& o) const { return x == o.x && y == o.y; }
};

// Crossing points on shared cell edges are computed from the same two node
// values in the same order, so endpoint matching can be exact.
struct Segment {
  ContourPoint a, b;
};

void emit_cell(double level, double x0, double x1, double y0, double y1, double v00, double v10,
               double v11, double v01, std::vector<Segment>& segs) {
  const bool b0 = v00 >= level, b1 = v10 >= level, b2 = v11 >= level, b3 = v01 >= level;
  const int code = (b0 ? 1 : 0) | (b1 ? 2 : 0) | (b2 ? 4 : 0) | (b3 ? 8 : 0);
  if (code == 0 || code == 15) return;

  auto lerp = [&](double a, double va, double b, double vb) {
    return a + (level - va) / (vb - va) * (b - a);
  };
  // Edge order: 0 bottom, 1 right, 2 top, 3 left.
  ContourPoint e[4];
  if (b0 != b1) e[0] = {lerp(x0, v00, x1, v10), y0};
  if (b1 != b2) e[1] = {x1, lerp(y0, v10, y1, v11)};
  if (b3 != b2) e[2] = {lerp(x0, v01, x1, v11), y1};
  if (b0 != b3) e[3] = {x0, lerp(y0, v00, y1, v01)};

  auto push = [&](int i, int j) { segs.push_back({e[i], e[j]}); };
  switch (code) {
    case 1: case 14: push(3, 0); break;
    case 2: case 13: push(0, 1); break;
    case 3: case 12: push(3, 1); break;
    case 4: case 11: push(1, 2); break;
    case 6: case 9: push(0, 2); break;
    case 7: case 8: push(3, 2); break;
    case 5: case 10: {  // saddle: the cell center picks the topology
      const bool center = 0.25 * (v00 + v10 + v11 + v01) >= level;
      const bool join_diag = (code == 5) == center;
      if (join_diag) {
        push(0, 1);
        push(2, 3);
      } else {
        push(3, 0);
        push(1, 2);
      }
      break;
    }
    default: break;
  }
}

}  // namespace

std::string levelset_csv(const ValueField& field, const SliceSpec& slice, double level) {
  const Grid& g = field.grid;
  const int dx = slice.dim_x, dy = slice.dim_y;
  if (dx < 0 || dy < 0 || dx >= g.dims() || dy >= g.dims() || dx == dy)
    throw ConfigError("levelset: bad slice dims");
  if (slice.base.size() != g.dims()) throw ConfigError("levelset: base state dimension mismatch");
  const int nx = g.points[dx], ny = g.points[dy];

  std::vector<double> vals(static_cast<std::size_t>(nx) * ny);
  State x = slice.base;
  for (int i = 0; i < nx; ++i) {
    x[dx] = g.coord(dx, i);
    for (int j = 0; j < ny; ++j) {
      x[dy] = g.coord(dy, j);
      vals[static_cast<std::size_t>(i) * ny + j] = field.value_at(x, slice.t);
    }
  }

  std::vector<Segment> segs;
  for (int i = 0; i + 1 < nx; ++i) {
    for (int j = 0; j + 1 < ny; ++j) {
      emit_cell(level, g.coord(dx, i), g.coord(dx, i + 1), g.coord(dy, j), g.coord(dy, j + 1),
                vals[static_cast<std::size_t>(i) * ny + j],
                vals[static_cast<std::size_t>(i + 1) * ny + j],
                vals[static_cast<std::size_t>(i + 1) * ny + j + 1],
                vals[static_cast<std::size_t>(i) * ny + j + 1], segs);
    }
  }

  // Chain segments into polylines through exactly-shared endpoints.
  std::map<ContourPoint, std::vector<std::size_t>> touch;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    touch[segs[s].a].push_back(s);
    touch[segs[s].b].push_back(s);
  }
  std::vector<bool> used(segs.size(), false);
  std::ostringstream out;
  out << "polyline,vertex,x,y\n";
  int polyline = 0;
  auto next_at = [&](const ContourPoint& p) -> std::size_t {
    for (std::size_t s : touch[p])
      if (!used[s]) return s;
    return segs.size();
  };
  for (std::size_t s0 = 0; s0 < segs.size(); ++s0) {
    if (used[s0]) continue;
    used[s0] = true;
    std::vector<ContourPoint> chain{segs[s0].a, segs[s0].b};
    for (int dir = 0; dir < 2; ++dir) {
      while (true) {
        const ContourPoint& tip = chain.back();
        const std::size_t s = next_at(tip);
        if (s == segs.size()) break;
        used[s] = true;
        chain.push_back(segs[s].a == tip ? segs[s].b : segs[s].a);
      }
      std::reverse(chain.begin(), chain.end());
    }
    for (std::size_t k = 0; k < chain.size(); ++k) {
      out << polyline << ',' << k << ',' << format_double(chain[k].x) << ','
          << format_double(chain[k].y) << '\n';
    }
    ++polyline;
  }
  return out.str();
}

void export_levelset(const ValueField& field, const SliceSpec& slice, double level,
                     const std::string& path) {
  write_text_file(path, levelset_csv(field, slice, level));
}

GameSolution field_game_at(const ValueField& field, const AffinePairwiseDynamics& dyn,
                           const State& x, double t, HamiltonianKind kind,
                           const ControlBox& ego_box, const ControlBox& contender_box,
                           const HocbfModel* model) {
  const Eigen::VectorXd grad = field.spatial_gradient(x, t);
  LinearGameInstance inst;
  inst.ego_lin = dyn.ego_gain(x).transpose() * grad;
  inst.contender_lin = dyn.contender_gain(x).transpose() * grad;
  inst.drift_term = grad.dot(dyn.drift(x));
  inst.ego_box = ego_box;
  inst.contender_box = contender_box;
  if (kind == HamiltonianKind::constrained) {
    if (!model) throw ConfigError("field game: constrained kind needs a model");
    inst.constraint = constraint_at(*model, dyn, x);
    return hamiltonian_constrained(inst);
  }
  return hamiltonian_worst_case(inst);
}

std::string controls_csv(const SafetyConcept& cpt, const State& base, int sweep_dim,
                         const std::vector<double>& sweep_values, double t) {
  if (!cpt.field) throw ConfigError("controls export: concept has no value field");
  if (cpt.kind != ConceptKind::wc_hj && cpt.kind != ConceptKind::hocbf_hj)
    throw ConfigError("controls export: HJ kinds only");
  if (sweep_dim < 0 || sweep_dim >= cpt.dyn->state_dim)
    throw ConfigError("controls export: bad sweep dim");
  const HamiltonianKind kind = cpt.kind == ConceptKind::wc_hj
                                   ? HamiltonianKind::worst_case
                                   : HamiltonianKind::constrained;
  const int mb = cpt.dyn->contender_dim;
  const int ma = cpt.dyn->ego_dim;
  constexpr int kMaxVerts = 6;

  std::ostringstream out;
  out << "sweep";
  for (int j = 0; j < mb; ++j) out << ",uB" << j;
  out << ",h_value,contender_infeasible,nverts";
  for (int k = 0; k < kMaxVerts; ++k)
    for (int j = 0; j < ma; ++j) out << ",v" << k << "_" << j;
  out << '\n';

  for (double sv : sweep_values) {
    State x = base;
    x[sweep_dim] = sv;
    const GameSolution sol =
        field_game_at(*cpt.field, *cpt.dyn, x, t, kind, cpt.ego_box,
                      cpt.contender_box, cpt.model ? &*cpt.model : nullptr);
    bool ctd_empty = false;
    const FeasiblePolytope poly = safe_controls(cpt, x, t, &ctd_empty);
    out << format_double(sv);
    for (int j = 0; j < mb; ++j) out << ',' << format_double(sol.u_contender[j]);
    out << ',' << format_double(sol.value) << ',' << (sol.constraint_infeasible ? 1 : 0) << ','
        << poly.vertices.size();
    for (int k = 0; k < kMaxVerts; ++k) {
      for (int j = 0; j < ma; ++j) {
        out << ',';
        if (k < static_cast<int>(poly.vertices.size())) out << format_double(poly.vertices[k][j]);
      }
    }
    out << '\n';
  }
  return out.str();
}

void export_controls(const SafetyConcept& cpt, const State& base, int sweep_dim,
                     const std::vector<double>& sweep_values, double t,
                     const std::string& path) {
  write_text_file(path, controls_csv(cpt, base, sweep_dim, sweep_values, t));
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open for writing: " + path);
  f << text;
  if (!f) throw ConfigError("write failed: " + path);
}

}  // namespace reachsafe
