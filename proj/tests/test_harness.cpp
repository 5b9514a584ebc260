#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "reachsafe/harness.hpp"
#include "reachsafe/util.hpp"

using namespace reachsafe;

namespace {

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

Eigen::VectorXd evec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

HocbfModel toy_model() {
  HocbfModel m;
  m.barrier = BarrierSpec::circle(0.0, 0.0, 1.0, 4);
  m.alphas.push_back(ClassKappaFn::from_effective(KappaKind::power, evec({0.54, 1.16})));
  m.alphas.push_back(ClassKappaFn::from_effective(KappaKind::power, evec({0.68, 1.11})));
  return m;
}

HocbfModel linear_model(double s1, double s2) {
  HocbfModel m;
  m.barrier = BarrierSpec::circle(0.0, 0.0, 1.0, 4);
  m.alphas.push_back(ClassKappaFn::from_effective(KappaKind::linear, evec({s1})));
  m.alphas.push_back(ClassKappaFn::from_effective(KappaKind::linear, evec({s2})));
  return m;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    if (first) {
      t.header = fields;
      first = false;
    } else {
      t.rows.push_back(fields);
    }
  }
  return t;
}

}  // namespace

TEST_CASE("planner validates its inputs") {
  HocbfModel m = linear_model(2.0, 2.0);
  auto car = make_simple_car(1.0);
  auto di = make_double_integrator_1d();
  ControlBox box(evec({-1.0, -2.0}), evec({1.0, 2.0}));
  ContenderRule rule;
  PlanOptions opt;
  CHECK_THROWS_AS(plan_hocbf_qp(m, di, evec({0.0, 0.0}), {0.0, 0.0},
                                ControlBox(evec({-1.0}), evec({1.0})), rule, opt),
                  ConfigError);
  CHECK_THROWS_AS(plan_hocbf_qp(m, car, evec({3.0, 0.0, 0.0, 1.0}), {0.0, 0.0},
                                ControlBox(evec({-1.0}), evec({1.0})), rule, opt),
                  ConfigError);
  PlanOptions bad = opt;
  bad.dt = 0.0;
  CHECK_THROWS_AS(plan_hocbf_qp(m, car, evec({3.0, 0.0, 0.0, 1.0}), {0.0, 0.0}, box, rule, bad),
                  ConfigError);
}

TEST_CASE("a slack constraint leaves the reference control untouched") {
  HocbfModel m = linear_model(2.0, 2.0);
  auto car = make_simple_car(1.0);
  ControlBox box(evec({-1.0, -2.0}), evec({1.0, 2.0}));
  ContenderRule rule;
  PlanOptions opt;
  opt.dt = 0.05;
  opt.horizon = 0.05;  // single step
  // Aimed at the goal at target speed: the reference control is exactly zero
  // and the constraint at (3, 0, pi, 1.5) is slack, so the step is a pure
  // constant-rate push toward the goal.
  PlanResult r = plan_hocbf_qp(m, car, evec({3.0, 0.0, std::numbers::pi, 1.5}), {-3.0, 0.0},
                               box, rule, opt);
  REQUIRE(r.controls.size() == 1);
  CHECK(r.controls[0][0] == 0.0);
  CHECK(r.controls[0][1] == 0.0);
  CHECK(r.infeasible_steps == 0);
  CHECK(!r.aborted);
  CHECK(!r.reached_goal);
  REQUIRE(r.states.size() == 2);
  CHECK(close(r.states[1][0], 2.925, 1e-12));
  CHECK(close(r.states[1][1], 0.0, 1e-15));  // sin(pi) residue only
  CHECK(r.states[1][3] == 1.5);
  CHECK(r.barrier[0] == 8.0);
  CHECK(close(r.barrier[1], 2.925 * 2.925 - 1.0, 1e-12));
  CHECK(r.times == std::vector<double>{0.0, 0.05});
}

TEST_CASE("an active constraint projects the reference onto the cut box") {
  HocbfModel m = linear_model(2.0, 2.0);
  auto car = make_simple_car(1.0);
  ControlBox box(evec({-1.0, -2.0}), evec({1.0, 2.0}));
  ContenderRule rule;
  PlanOptions opt;
  opt.dt = 0.05;
  opt.horizon = 0.05;
  // At (2, 0, pi, 1.5) toward (-3, 0) the chain gives ego_coeff (0, -4) and
  // offset -7.5, so accel <= -1.875 and the nearest admissible point to the
  // zero reference is (0, -1.875).
  State x0 = evec({2.0, 0.0, std::numbers::pi, 1.5});
  PlanResult r = plan_hocbf_qp(m, car, x0, {-3.0, 0.0}, box, rule, opt);
  REQUIRE(r.controls.size() == 1);
  CHECK(close(r.controls[0][0], 0.0, 1e-12));
  CHECK(close(r.controls[0][1], -1.875, 1e-12));
  CHECK(r.infeasible_steps == 0);

  // The projection is the closest feasible point: no random feasible control
  // beats it against the reference (which is exactly zero here).
  HocbfAffineConstraint c = constraint_at(m, car, x0);
  Halfspace hs{c.ego_coeff, c.offset};
  Rng rng(21);
  const double best = r.controls[0].norm();
  for (int k = 0; k < 200; ++k) {
    Control w(2);
    w << rng.uniform(-1.0, 1.0), rng.uniform(-2.0, 2.0);
    if (hs.eval(w) < 0.0) continue;
    CHECK(w.norm() >= best - 1e-9);
  }
}

TEST_CASE("infeasible steps fall back to the best vertex or abort") {
  HocbfModel m = linear_model(2.0, 2.0);
  auto car = make_simple_car(1.0);
  ControlBox box(evec({-1.0, -2.0}), evec({1.0, 2.0}));
  ContenderRule rule;
  State x0 = evec({1.2, 0.0, std::numbers::pi, 2.0});  // fast, close, heading in

  PlanOptions one_step;
  one_step.dt = 0.05;
  one_step.horizon = 0.05;
  PlanResult fb = plan_hocbf_qp(m, car, x0, {-3.0, 0.0}, box, rule, one_step);
  REQUIRE(fb.controls.size() == 1);
  CHECK(fb.infeasible_steps == 1);
  CHECK(!fb.aborted);
  CHECK(fb.controls[0][0] == -1.0);  // zero steer coefficient picks the lower bound
  CHECK(fb.controls[0][1] == -2.0);  // negative accel coefficient brakes hard

  PlanOptions strict = one_step;
  strict.max_infeasible = 0;
  PlanResult ab = plan_hocbf_qp(m, car, x0, {-3.0, 0.0}, box, rule, strict);
  CHECK(ab.aborted);
  CHECK(ab.infeasible_steps == 1);
  CHECK(ab.controls.empty());
  CHECK(ab.states.size() == 1);
}

TEST_CASE("a start inside the goal radius ends immediately") {
  HocbfModel m = linear_model(2.0, 2.0);
  auto car = make_simple_car(1.0);
  ControlBox box(evec({-1.0, -2.0}), evec({1.0, 2.0}));
  PlanResult r = plan_hocbf_qp(m, car, evec({3.0, 0.0, 0.0, 1.5}), {3.1, 0.0}, box,
                               ContenderRule{}, PlanOptions{});
  CHECK(r.reached_goal);
  CHECK(r.controls.empty());
  CHECK(r.states.size() == 1);
  CHECK(r.times == std::vector<double>{0.0});
}

TEST_CASE("demo corpus episodes are safe, feasible, and reproducible") {
  HocbfModel m = toy_model();
  DemoGenConfig cfg;
  cfg.episodes = 12;
  cfg.seed = 5;
  cfg.ego_box = ControlBox::empty_dim0();
  DemoGenResult r = gen_demo_corpus(m, cfg);

  REQUIRE(static_cast<int>(r.episodes.size()) == cfg.episodes);
  auto car = make_simple_car(cfg.wheelbase);
  for (const PlanResult& ep : r.episodes) {
    CHECK(!ep.aborted);
    CHECK(ep.infeasible_steps == 0);
    for (double b : ep.barrier) CHECK(b > 0.0);
  }
  REQUIRE(r.data.size() > 0);
  CHECK(r.data.u_ctd.empty());
  for (std::size_t i = 0; i < r.data.size(); ++i) {
    HocbfAffineConstraint c = constraint_at(m, car, r.data.x[i]);
    CHECK(c.ego_coeff.dot(r.data.u_ego[i]) + c.offset >= -1e-9);
  }

  DemoGenResult again = gen_demo_corpus(m, cfg);
  REQUIRE(again.data.size() == r.data.size());
  for (std::size_t i = 0; i < r.data.size(); ++i) {
    CHECK(again.data.t[i] == r.data.t[i]);
    CHECK((again.data.x[i] - r.data.x[i]).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((again.data.u_ego[i] - r.data.u_ego[i]).lpNorm<Eigen::Infinity>() == 0.0);
  }
  CHECK(again.rejected_starts == r.rejected_starts);
  CHECK(again.discarded_episodes == r.discarded_episodes);
}

TEST_CASE("highway logs respect speed and lateral limits deterministically") {
  HighwayLogConfig cfg;
  cfg.samples = 700;
  cfg.seed = 9;
  DemoDataset d = gen_highway_log(cfg);
  REQUIRE(static_cast<int>(d.size()) == 700);
  REQUIRE(d.has_contender());
  CHECK(d.t[0] == 0.0);
  int episode_starts = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(d.x[i].size() == 4);
    CHECK(d.x[i][2] >= 0.0);  // no reversing
    CHECK(d.x[i][3] >= 0.0);
    CHECK(std::abs(d.x[i][1]) <= cfg.lateral_half_width);
    CHECK(std::abs(d.u_ego[i][0]) <= cfg.accel_limit + 1e-12);
    CHECK(std::abs(d.u_ctd[i][0]) <= cfg.accel_limit + 1e-12);
    if (d.t[i] == 0.0) ++episode_starts;
  }
  CHECK(episode_starts == 14);  // 700 samples in 50-step episodes

  DemoDataset d2 = gen_highway_log(cfg);
  REQUIRE(d2.size() == d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(d2.t[i] == d.t[i]);
    CHECK((d2.x[i] - d.x[i]).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((d2.u_ego[i] - d.u_ego[i]).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((d2.u_ctd[i] - d.u_ctd[i]).lpNorm<Eigen::Infinity>() == 0.0);
  }

  HighwayLogConfig bad = cfg;
  bad.samples = 0;
  CHECK_THROWS_AS(gen_highway_log(bad), ConfigError);
}

TEST_CASE("state filters check every speed and heading dimension inclusively") {
  auto car = make_simple_car(1.0);
  StateFilter f;  // speed [15, 30], heading [-0.4 pi, 0.4 pi]
  CHECK(f.accepts(car, evec({0.0, 0.0, 0.0, 20.0})));
  CHECK(f.accepts(car, evec({0.0, 0.0, 0.4 * std::numbers::pi, 15.0})));
  CHECK(f.accepts(car, evec({0.0, 0.0, -0.4 * std::numbers::pi, 30.0})));
  CHECK(!f.accepts(car, evec({0.0, 0.0, 0.0, 14.9})));
  CHECK(!f.accepts(car, evec({0.0, 0.0, 0.0, 30.1})));
  CHECK(!f.accepts(car, evec({0.0, 0.0, 1.3, 20.0})));

  auto di = make_double_integrator_1d();  // speed dim 1, no heading dims
  CHECK(f.accepts(di, evec({500.0, 20.0})));
  CHECK(!f.accepts(di, evec({0.0, 0.0})));
}

TEST_CASE("confusion matrices tally reference rows against candidate columns") {
  auto di = make_double_integrator_1d();
  ControlBox ego(evec({-1.0}), evec({1.0}));
  BoundaryFn b = BoundaryFn::coordinate(0, 0.0);
  Grid g = Grid::create(evec({-2.0, -2.0}), evec({2.0, 2.0}), {5, 5});
  ValueField fr = ValueField::from_function(g, {0.0, -1.0},
                                            [](const State& x, double) { return x[0]; });
  ValueField fc = ValueField::from_function(g, {0.0, -1.0},
                                            [](const State& x, double) { return x[1]; });
  SafetyConcept ref = SafetyConcept::from_field(ConceptKind::wc_hj, di, b, fr, ego,
                                                ControlBox::empty_dim0());
  SafetyConcept cand = SafetyConcept::from_field(ConceptKind::wc_hj, di, b, fc, ego,
                                                 ControlBox::empty_dim0());

  StateFilter wide;
  wide.speed_lo = -10.0;
  wide.speed_hi = 10.0;
  ConfusionMatrix cm = confusion(ref, cand, g, -1.0, wide);
  CHECK(cm.total == 25);
  CHECK(cm.counts[0][0] == 9);
  CHECK(cm.counts[0][1] == 6);
  CHECK(cm.counts[1][0] == 6);
  CHECK(cm.counts[1][1] == 4);
  CHECK(cm.percent(0, 0) == 36.0);
  CHECK(cm.reference_kind == "wc-hj");
  CHECK(cm.to_json().find("\"safe_safe\": 9") != std::string::npos);

  // Same tallies regardless of worker count.
  ConfusionMatrix cm2 = confusion(ref, cand, g, -1.0, wide, 0.0, 3);
  CHECK(cm2.counts[0][0] == cm.counts[0][0]);
  CHECK(cm2.counts[1][1] == cm.counts[1][1]);
  CHECK(cm2.total == cm.total);

  // The filter drops speed nodes above 0: only x1 in {-2, -1, 0} remain.
  StateFilter half = wide;
  half.speed_hi = 0.0;
  ConfusionMatrix cmf = confusion(ref, cand, g, -1.0, half);
  CHECK(cmf.total == 15);
  CHECK(cmf.counts[0][0] == 3);
  CHECK(cmf.counts[0][1] == 6);
  CHECK(cmf.counts[1][0] == 2);
  CHECK(cmf.counts[1][1] == 4);

  // A shifted threshold reclassifies: unsafe iff value < 1.5.
  ConfusionMatrix cmt = confusion(ref, cand, g, -1.0, wide, 1.5);
  CHECK(cmt.counts[0][0] == 1);
  CHECK(cmt.counts[1][1] == 16);
}

TEST_CASE("percentiles interpolate linearly over the sorted sample") {
  std::vector<double> s{1.0, 2.0, 3.0, 4.0, 5.0};
  CHECK(linear_percentile(s, 0.0) == 1.0);
  CHECK(linear_percentile(s, 50.0) == 3.0);
  CHECK(close(linear_percentile(s, 95.0), 4.8, 1e-12));
  CHECK(linear_percentile(s, 100.0) == 5.0);
  CHECK(close(linear_percentile(s, 10.0), 1.4, 1e-12));
  CHECK(linear_percentile({7.5}, 33.0) == 7.5);
  CHECK_THROWS_AS(linear_percentile({}, 50.0), ConfigError);
  CHECK_THROWS_AS(linear_percentile(s, -1.0), ConfigError);
  CHECK_THROWS_AS(linear_percentile(s, 100.5), ConfigError);
}

TEST_CASE("percentile reports summarize concept values over a log") {
  auto di = make_double_integrator_1d();
  ControlBox ego(evec({-1.0}), evec({1.0}));
  BoundaryFn b = BoundaryFn::coordinate(0, 0.0);
  SafetyConcept c = SafetyConcept::open_loop(ConceptKind::constant, di, b, ego,
                                             ControlBox::empty_dim0(), 1.0);
  DemoDataset log;
  for (double p : {3.0, 1.0, 4.0, 1.0, 5.0}) {
    log.t.push_back(0.0);
    log.x.push_back(evec({p, 0.0}));
    log.u_ego.push_back(evec({0.0}));
  }
  PercentileReport rep = percentile_report(c, log, 0.0);  // zero window: boundary value
  CHECK(rep.count == 5);
  CHECK(rep.mean == 2.8);
  CHECK(rep.p0 == 1.0);
  CHECK(rep.p5 == 1.0);
  CHECK(rep.p50 == 3.0);
  CHECK(close(rep.p95, 4.8, 1e-12));
  CHECK(rep.p100 == 5.0);
  CHECK(rep.to_json().find("\"count\": 5") != std::string::npos);
  CHECK_THROWS_AS(percentile_report(c, DemoDataset{}, 0.0), ConfigError);
}

TEST_CASE("level sets trace the unit circle as one closed polyline") {
  Grid g = Grid::create(evec({-2.0, -2.0}), evec({2.0, 2.0}), {41, 41});
  ValueField f = ValueField::from_function(
      g, {0.0}, [](const State& x, double) { return x[0] * x[0] + x[1] * x[1] - 1.0; });
  SliceSpec slice;
  slice.base = evec({0.0, 0.0});
  CsvTable t = parse_csv(levelset_csv(f, slice));
  REQUIRE(t.header == std::vector<std::string>{"polyline", "vertex", "x", "y"});
  REQUIRE(t.rows.size() > 8);

  std::vector<std::pair<double, double>> pts;
  for (const auto& row : t.rows) {
    REQUIRE(row.size() == 4);
    CHECK(row[0] == "0");  // a single polyline
    pts.emplace_back(std::strtod(row[2].c_str(), nullptr),
                     std::strtod(row[3].c_str(), nullptr));
  }
  CHECK(pts.front() == pts.back());  // closed loop

  const double h = 0.1;
  for (const auto& [x, y] : pts) {
    CHECK(std::abs(std::hypot(x, y) - 1.0) <= h * h);
    // Every crossing lies on a grid line.
    const bool on_x = std::abs(std::remainder(x + 2.0, h)) <= 1e-9;
    const bool on_y = std::abs(std::remainder(y + 2.0, h)) <= 1e-9;
    CHECK((on_x || on_y));
    // Mirror symmetry of the even field.
    double best = 1e9;
    for (const auto& [mx, my] : pts) best = std::min(best, std::hypot(mx + x, my - y));
    CHECK(best <= 1e-9);
  }
}

TEST_CASE("level-set extraction refines and degenerates cleanly") {
  auto max_radial_err = [](int n) {
    Grid g = Grid::create(evec({-2.0, -2.0}), evec({2.0, 2.0}), {n, n});
    ValueField f = ValueField::from_function(
        g, {0.0}, [](const State& x, double) { return x[0] * x[0] + x[1] * x[1] - 1.0; });
    SliceSpec slice;
    slice.base = evec({0.0, 0.0});
    CsvTable t = parse_csv(levelset_csv(f, slice));
    double worst = 0.0;
    for (const auto& row : t.rows) {
      const double x = std::strtod(row[2].c_str(), nullptr);
      const double y = std::strtod(row[3].c_str(), nullptr);
      worst = std::max(worst, std::abs(std::hypot(x, y) - 1.0));
    }
    return worst;
  };
  const double coarse = max_radial_err(21);
  const double fine = max_radial_err(81);
  CHECK(coarse <= 0.02);
  CHECK(fine <= 0.002);
  CHECK(fine < coarse);

  Grid g = Grid::create(evec({-2.0, -2.0}), evec({2.0, 2.0}), {21, 21});
  ValueField pos = ValueField::from_function(
      g, {0.0}, [](const State& x, double) { return x.squaredNorm() + 1.0; });
  SliceSpec slice;
  slice.base = evec({0.0, 0.0});
  CHECK(levelset_csv(pos, slice) == "polyline,vertex,x,y\n");

  SliceSpec bad = slice;
  bad.dim_y = 0;
  CHECK_THROWS_AS(levelset_csv(pos, bad), ConfigError);
  SliceSpec wrong = slice;
  wrong.base = evec({0.0});
  CHECK_THROWS_AS(levelset_csv(pos, wrong), ConfigError);
}

TEST_CASE("the pointwise field game reports the maximizing ego control") {
  auto di = make_double_integrator_1d();
  ControlBox ego(evec({-1.0}), evec({1.0}));
  Grid g = Grid::create(evec({-2.0, -2.0}), evec({2.0, 2.0}), {41, 41});
  ValueField f = ValueField::from_function(
      g, {0.0, -1.0}, [](const State& x, double) { return 2.0 * x[0] + x[1]; });
  GameSolution sol = field_game_at(f, di, evec({0.0, 0.5}), -0.5, HamiltonianKind::worst_case,
                                   ego, ControlBox::empty_dim0());
  CHECK(close(sol.value, 2.0, 1e-9));  // drift 2 v plus the unit ego gain
  CHECK(sol.u_ego[0] == 1.0);
  CHECK(!sol.constraint_infeasible);
  CHECK_THROWS_AS(field_game_at(f, di, evec({0.0, 0.5}), -0.5, HamiltonianKind::constrained,
                                ego, ControlBox::empty_dim0()),
                  ConfigError);
}

TEST_CASE("control sweeps export the game row by row") {
  auto di = make_double_integrator_1d();
  ControlBox ego(evec({-1.0}), evec({1.0}));
  BoundaryFn b = BoundaryFn::coordinate(0, 0.0);
  Grid g = Grid::create(evec({-2.0, -2.0}), evec({2.0, 2.0}), {41, 41});
  ValueField f = ValueField::from_function(
      g, {0.0, -1.0}, [](const State& x, double) { return x[0] + x[1]; });
  SafetyConcept c = SafetyConcept::from_field(ConceptKind::wc_hj, di, b, f, ego,
                                              ControlBox::empty_dim0());
  CsvTable t = parse_csv(controls_csv(c, evec({0.0, 0.0}), 1, {-0.5, 0.0, 0.5}, -0.5));
  REQUIRE(t.header.size() == 10);
  CHECK(t.header[0] == "sweep");
  CHECK(t.header[1] == "h_value");
  CHECK(t.header[2] == "contender_infeasible");
  CHECK(t.header[3] == "nverts");
  CHECK(t.header[4] == "v0_0");
  CHECK(t.header[9] == "v5_0");
  REQUIRE(t.rows.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    const double sweep = std::strtod(t.rows[i][0].c_str(), nullptr);
    const double hval = std::strtod(t.rows[i][1].c_str(), nullptr);
    CHECK(close(hval, sweep + 1.0, 1e-9));  // H = v + max_u u
    CHECK(t.rows[i][2] == "0");
    CHECK(t.rows[i][3] == "2");
    const double lo = std::strtod(t.rows[i][4].c_str(), nullptr);
    const double hi = std::strtod(t.rows[i][5].c_str(), nullptr);
    CHECK(close(std::min(lo, hi), -sweep, 1e-9));  // cut u >= -v
    CHECK(close(std::max(lo, hi), 1.0, 1e-9));
    CHECK(t.rows[i][6].empty());
    CHECK(t.rows[i][9].empty());
  }

  SafetyConcept open = SafetyConcept::open_loop(ConceptKind::brake, di, b, ego,
                                                ControlBox::empty_dim0(), 1.0);
  CHECK_THROWS_AS(controls_csv(open, evec({0.0, 0.0}), 1, {0.0}, -0.5), ConfigError);
  SafetyConcept stored_brake = SafetyConcept::from_field(ConceptKind::brake, di, b, f, ego,
                                                         ControlBox::empty_dim0());
  CHECK_THROWS_AS(controls_csv(stored_brake, evec({0.0, 0.0}), 1, {0.0}, -0.5), ConfigError);
  CHECK_THROWS_AS(controls_csv(c, evec({0.0, 0.0}), 7, {0.0}, -0.5), ConfigError);
}

TEST_CASE("text files are written atomically or fail loudly") {
  const std::string path = "harness_write_tmp.txt";
  write_text_file(path, "alpha\nbeta\n");
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == "alpha\nbeta\n");
  std::remove(path.c_str());
  CHECK_THROWS_AS(write_text_file("no_such_dir_zz/x.txt", "y"), ConfigError);
}
