// Acceptance gate: one independently checkable criterion per numbered block,
// each reported as a single [PASS]/[FAIL] line. The process exit code is the
// number of failed criteria. argv[1] is the CLI binary, argv[2] a scratch dir.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "reachsafe/game.hpp"
#include "reachsafe/harness.hpp"
#include "reachsafe/solver.hpp"
#include "reachsafe/util.hpp"

using namespace reachsafe;

namespace {

Eigen::VectorXd evec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

HocbfModel toy_gt_model() {
  HocbfModel m;
  m.barrier = BarrierSpec::circle(0.0, 0.0, 1.0, 4);
  m.alphas.push_back(ClassKappaFn::from_effective(KappaKind::power, evec({0.54, 1.16})));
  m.alphas.push_back(ClassKappaFn::from_effective(KappaKind::power, evec({0.68, 1.11})));
  return m;
}

Eigen::VectorXd rand_vec(Rng& rng, int n, double lo, double hi) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(lo, hi);
  return v;
}

Eigen::VectorXd concat_raw_params(const HocbfModel& m) {
  int n = 0;
  for (const auto& a : m.alphas) n += static_cast<int>(a.raw().size());
  Eigen::VectorXd raw(n);
  int at = 0;
  for (const auto& a : m.alphas) {
    raw.segment(at, a.raw().size()) = a.raw();
    at += static_cast<int>(a.raw().size());
  }
  return raw;
}

HocbfModel model_with_raw(const HocbfModel& m, const Eigen::VectorXd& raw) {
  HocbfModel out = m;
  int at = 0;
  for (auto& a : out.alphas) {
    int n = static_cast<int>(a.raw().size());
    a = ClassKappaFn::from_raw(a.kind(), raw.segment(at, n));
    at += n;
  }
  return out;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <cli-binary> <scratch-dir>\n";
    return 64;
  }
  const std::string cli = argv[1];
  const std::filesystem::path scratch = argv[2];
  std::filesystem::create_directories(scratch);
  unsetenv("REACHSAFE_THREADS");

  int failures = 0;
  auto report = [&](int n, bool pass, const std::string& detail) {
    std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << n << ": " << detail
              << std::endl;
    if (!pass) ++failures;
  };

  // ---- 1. Stopping-distance front against the closed form -----------------
  try {
    const auto t0 = std::chrono::steady_clock::now();
    auto di = make_double_integrator_1d();
    Grid g = Grid::create(evec({-1.0, -2.0}), evec({3.0, 2.0}), {161, 161});
    SolveOptions opt;
    opt.threads = 1;  // single-threaded budget
    ValueField f = solve(di, HamiltonianKind::worst_case, BoundaryFn::coordinate(0, 0.0), g,
                         ControlBox(evec({-1.0}), evec({1.0})), ControlBox::empty_dim0(), 1.0,
                         opt);
    const double secs = seconds_since(t0);

    const double hp = g.spacing[0];  // 0.025
    const std::vector<double>& V = f.values.back();
    double worst = 0.0;
    int rows = 0;
    bool all_crossed = true;
    for (int j = 0; j < g.points[1]; ++j) {
      const double v = g.coord(1, j);
      if (v < -0.95 - 1e-12 || v > -0.05 + 1e-12) continue;
      ++rows;
      bool crossed = false;
      for (int i = 0; i + 1 < g.points[0]; ++i) {
        const double a = V[static_cast<std::size_t>(i) * g.points[1] + j];
        const double b = V[static_cast<std::size_t>(i + 1) * g.points[1] + j];
        if (a < 0.0 && b >= 0.0) {
          const double p = g.coord(0, i) + hp * (0.0 - a) / (b - a);
          worst = std::max(worst, std::abs(p - 0.5 * v * v));
          crossed = true;
          break;
        }
      }
      if (!crossed) all_crossed = false;
    }
    const bool pass = all_crossed && rows == 37 && worst <= 2.0 * hp && secs <= 30.0;
    std::ostringstream msg;
    msg << "front error " << worst << " (limit " << 2.0 * hp << " = 2 cells) over " << rows
        << " speed rows, solve took " << secs << " s (limit 30)";
    report(1, pass, msg.str());
  } catch (const std::exception& e) {
    report(1, false, std::string("exception: ") + e.what());
  }

  // ---- 2. Commitment-order inequality and brute-force Hamiltonian ---------
  try {
    Rng rng(331);
    int feasible = 0, holds = 0, trials = 0;
    while (feasible < 1000 && trials < 20000) {
      ++trials;
      const int ma = 1 + (trials % 2), mb = 1 + ((trials / 3) % 2);
      LinearGameInstance inst;
      inst.ego_lin = rand_vec(rng, ma, -2.0, 2.0);
      inst.contender_lin = rand_vec(rng, mb, -2.0, 2.0);
      inst.drift_term = rng.uniform(-1.0, 1.0);
      inst.ego_box =
          ControlBox(Eigen::VectorXd::Constant(ma, -1.0), Eigen::VectorXd::Constant(ma, 1.0));
      inst.contender_box =
          ControlBox(Eigen::VectorXd::Constant(mb, -1.0), Eigen::VectorXd::Constant(mb, 1.0));
      inst.constraint.ego_coeff = rand_vec(rng, ma, -2.0, 2.0);
      inst.constraint.contender_coeff = rand_vec(rng, mb, -2.0, 2.0);
      inst.constraint.offset = rng.uniform(-1.0, 2.0);
      Prop1Check r = check_prop1(inst);
      if (!r.feasible) continue;
      ++feasible;
      if (r.holds) ++holds;
    }

    // Brute-force agreement: exact inner maximization, dense contender sweep.
    Rng rng2(77);
    int checked = 0, agreed = 0;
    double worst_gap = 0.0;
    for (int trial = 0; trial < 4000 && checked < 500; ++trial) {
      const double A = rng2.uniform(-2.0, 2.0);
      const double B = rng2.uniform(-2.0, 2.0);
      const double a = (rng2.uniform01() < 0.5 ? -1.0 : 1.0) * rng2.uniform(0.5, 2.0);
      const double b = (rng2.uniform01() < 0.5 ? -1.0 : 1.0) * rng2.uniform(0.5, 2.0);
      const double cofs = rng2.uniform(-0.5, 1.5);

      LinearGameInstance inst;
      inst.ego_lin = evec({A});
      inst.contender_lin = evec({B});
      inst.drift_term = rng2.uniform(-1.0, 1.0);
      inst.ego_box = ControlBox(evec({-1.0}), evec({1.0}));
      inst.contender_box = ControlBox(evec({-1.0}), evec({1.0}));
      inst.constraint.ego_coeff = evec({a});
      inst.constraint.contender_coeff = evec({b});
      inst.constraint.offset = cofs;

      auto inner_max = [&](double ub, bool* ok) {
        const double tau = b * ub + cofs;
        double lo = -1.0, hi = 1.0;
        const double cut = -tau / a;
        if (a > 0.0) lo = std::max(lo, cut);
        else hi = std::min(hi, cut);
        if (lo > hi + 1e-15) {
          *ok = false;
          return 0.0;
        }
        *ok = true;
        return A >= 0.0 ? A * hi : A * lo;
      };

      std::vector<double> ubs;
      const int nb = 2000;
      const double hb = 2.0 / nb;
      for (int i = 0; i <= nb; ++i) ubs.push_back(-1.0 + hb * i);
      const double best_ego = std::max(a * -1.0, a * 1.0);
      if (std::abs(b) > 0.0) ubs.push_back(-(cofs + best_ego) / b);

      double oracle = std::numeric_limits<double>::infinity();
      double feas_len = 0.0;
      for (double ub : ubs) {
        if (ub < -1.0 - 1e-15 || ub > 1.0 + 1e-15) continue;
        bool ok = false;
        const double im = inner_max(std::clamp(ub, -1.0, 1.0), &ok);
        if (!ok) continue;
        feas_len += hb;
        oracle = std::min(oracle, B * std::clamp(ub, -1.0, 1.0) + im);
      }
      if (!std::isfinite(oracle) || feas_len < 0.1) continue;
      ++checked;
      oracle += inst.drift_term;

      GameSolution sol = hamiltonian_constrained(inst);
      const double bound = 4.0 * (std::abs(B) + std::abs(A * b / a)) * hb + 1e-9;
      const double gap = std::abs(sol.value - oracle);
      worst_gap = std::max(worst_gap, gap / bound);
      if (!sol.constraint_infeasible && gap <= bound) ++agreed;
    }

    const bool pass = feasible == 1000 && holds == 1000 && checked == 500 && agreed == 500;
    std::ostringstream msg;
    msg << "first-mover advantage " << holds << "/" << feasible
        << " feasible instances, sweep-oracle agreement " << agreed << "/" << checked
        << " (worst gap " << worst_gap << " of the resolution bound)";
    report(2, pass, msg.str());
  } catch (const std::exception& e) {
    report(2, false, std::string("exception: ") + e.what());
  }

  // ---- 3. Toy recovery from demonstrations --------------------------------
  try {
    const auto t0 = std::chrono::steady_clock::now();
    HocbfModel gt = toy_gt_model();
    DemoGenConfig dc;
    dc.episodes = 40;
    dc.seed = 17;
    DemoGenResult corpus = gen_demo_corpus(gt, dc);
    auto car = make_simple_car(dc.wheelbase);

    HocbfModel init;
    init.barrier = gt.barrier;
    init.alphas.push_back(ClassKappaFn::from_effective(KappaKind::power, evec({1.0, 1.5})));
    init.alphas.push_back(ClassKappaFn::from_effective(KappaKind::power, evec({1.0, 1.5})));

    DisturbanceProvider provider;  // single agent: no contender term
    FitOptions fo;
    fo.learning_rate = 0.001;
    fo.steps = 150000;
    fo.threads = 1;
    FitResult res = fit(init, car, corpus.data, provider, fo);
    const double sat = satisfaction_rate(res.model, car, corpus.data, provider);

    // IoU of the positive effective-CBF regions over the sampled state box,
    // with a +/-5 % parameter jitter of the ground truth as the baseline.
    HocbfModel jit = gt;
    jit.alphas[0] = ClassKappaFn::from_effective(KappaKind::power, evec({0.54 * 1.05, 1.16 * 0.95}));
    jit.alphas[1] = ClassKappaFn::from_effective(KappaKind::power, evec({0.68 * 0.95, 1.11 * 1.05}));
    auto iou_against_gt = [&](const HocbfModel& m) {
      std::int64_t inter = 0, uni = 0;
      State x(4);
      for (int ix = 0; ix < 41; ++ix) {
        x[0] = -4.2 + 8.4 * ix / 40.0;
        for (int iy = 0; iy < 41; ++iy) {
          x[1] = -4.2 + 8.4 * iy / 40.0;
          for (int it = 0; it < 9; ++it) {
            x[2] = -std::numbers::pi + 2.0 * std::numbers::pi * (it + 1) / 9.0;
            for (int iv = 0; iv < 5; ++iv) {
              x[3] = 1.0 + 0.25 * iv;
              const bool pg = effective_cbf(gt, car, x) >= 0.0;
              const bool pm = effective_cbf(m, car, x) >= 0.0;
              if (pg && pm) ++inter;
              if (pg || pm) ++uni;
            }
          }
        }
      }
      return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
    };
    const double iou_fit = iou_against_gt(res.model);
    const double iou_baseline = iou_against_gt(jit);
    const double secs = seconds_since(t0);

    const bool pass = !res.nan_abort && sat >= 0.99 && iou_fit >= 0.85 && secs <= 600.0;
    std::ostringstream msg;
    msg << "satisfaction " << sat << " (need 0.99), IoU " << iou_fit
        << " (need 0.85; 5 % GT jitter scores " << iou_baseline << ") on "
        << corpus.data.size() << " samples in " << secs << " s (limit 600)";
    report(3, pass, msg.str());
  } catch (const std::exception& e) {
    report(3, false, std::string("exception: ") + e.what());
  }

  // ---- 4. Conservatism ordering of the two HJ assumptions -----------------
  try {
    auto rel = make_relative_car_4d();
    Grid g = Grid::create(evec({-6.0, -6.0, 0.0, 0.0}), evec({6.0, 6.0, 3.0, 3.0}),
                          {17, 17, 9, 9});
    BoundaryFn boundary = BoundaryFn::ellipse(5.4, 2.4);
    ControlBox ego(evec({-2.0}), evec({2.0}));
    ControlBox ctd(evec({-1.0}), evec({1.0}));
    HocbfModel model;
    model.barrier = BarrierSpec::circle(0.0, 0.0, 3.0, 4);
    model.alphas.push_back(ClassKappaFn::from_effective(KappaKind::power, evec({0.54, 1.16})));
    model.alphas.push_back(ClassKappaFn::from_effective(KappaKind::power, evec({0.68, 1.11})));

    SolveOptions ow;
    ow.threads = 1;
    ValueField wc = solve(rel, HamiltonianKind::worst_case, boundary, g, ego, ctd, 0.8, ow);
    SolveOptions oc = ow;
    oc.model = model;
    ValueField hc = solve(rel, HamiltonianKind::constrained, boundary, g, ego, ctd, 0.8, oc);

    const double band = std::max(dissipation_band(wc), dissipation_band(hc));
    const std::vector<double>& vw = wc.values.back();
    const std::vector<double>& vc = hc.values.back();
    std::int64_t bad = 0;
    for (std::int64_t i = 0; i < g.total(); ++i) {
      if (vc[static_cast<std::size_t>(i)] < vw[static_cast<std::size_t>(i)] - band) ++bad;
    }
    const double frac = static_cast<double>(bad) / static_cast<double>(g.total());
    const bool pass = frac <= 0.005;
    std::ostringstream msg;
    msg << "restricted-contender value below worst-case minus the " << band
        << " dissipation band at " << 100.0 * frac << " % of nodes (limit 0.5 %)";
    report(4, pass, msg.str());
  } catch (const std::exception& e) {
    report(4, false, std::string("exception: ") + e.what());
  }

  // ---- 5. Analytic gradients against central differences ------------------
  try {
    auto rel = make_relative_car_4d();
    ControlBox ctd_box(evec({-0.4}), evec({0.4}));
    LossWeights w;
    w.beta2 = 0.01;
    w.beta4 = 0.02;
    w.beta5 = 0.005;
    const KappaKind kinds[] = {KappaKind::linear, KappaKind::cubic, KappaKind::power,
                               KappaKind::linear_combination};
    int draws = 0;
    double worst_rel = 0.0;
    bool all_ok = true;
    std::uint64_t seed = 500;
    while (draws < 50 && seed < 2000) {
      const KappaKind kind = kinds[draws % 4];
      HocbfModel m;
      m.barrier = BarrierSpec::circle(0.0, 0.0, 1.0, 4);
      Rng prng(seed);
      Eigen::VectorXd eff;
      switch (kind) {
        case KappaKind::linear: eff = evec({prng.uniform(0.3, 1.5)}); break;
        case KappaKind::cubic: eff = evec({prng.uniform(0.3, 1.5)}); break;
        case KappaKind::power:
          eff = evec({prng.uniform(0.3, 1.5), prng.uniform(1.1, 1.9)});
          break;
        default:
          eff = evec({prng.uniform(0.2, 1.0), prng.uniform(0.2, 1.0), prng.uniform(0.2, 1.0),
                      prng.uniform(0.2, 1.0)});
          break;
      }
      m.alphas = {ClassKappaFn::from_effective(kind, eff),
                  ClassKappaFn::from_effective(kind, eff)};

      DemoDataset d;
      Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
      for (int j = 0; j < 6; ++j) {
        d.t.push_back(0.1 * j);
        d.x.push_back(evec({rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0),
                            rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)}));
        d.u_ego.push_back(evec({rng.uniform(-1.0, 1.0)}));
        d.u_ctd.push_back(evec({rng.uniform(ctd_box.lower[0], ctd_box.upper[0])}));
      }
      DisturbanceProvider provider;
      provider.mode = ContenderRule::Mode::ground_truth;
      ++seed;

      // Stay clear of the hinge kinks so the stencil samples one branch.
      bool clean = true;
      for (double mj : margins(m, rel, d, provider)) {
        if (std::abs(mj) < 1e-3) clean = false;
      }
      for (std::size_t j = 0; j < d.size() && clean; ++j) {
        if (std::abs(psi_sequence(m, rel, d.x[j]).back()) < 1e-3) clean = false;
      }
      if (!clean) continue;
      ++draws;

      Eigen::VectorXd grad = gradient(m, rel, d, provider, w);
      Eigen::VectorXd raw = concat_raw_params(m);
      const double h = 1e-5;
      for (int i = 0; i < raw.size(); ++i) {
        Eigen::VectorXd rp = raw, rm = raw;
        rp[i] += h;
        rm[i] -= h;
        const double lp = loss(model_with_raw(m, rp), rel, d, provider, w).total;
        const double lm = loss(model_with_raw(m, rm), rel, d, provider, w).total;
        const double fd = (lp - lm) / (2.0 * h);
        const double rel_err = std::abs(grad[i] - fd) / (1.0 + std::abs(fd));
        worst_rel = std::max(worst_rel, rel_err);
        if (rel_err > 1e-4) all_ok = false;
      }
    }
    const bool pass = draws == 50 && all_ok;
    std::ostringstream msg;
    msg << draws << "/50 kink-free draws, worst relative error " << worst_rel
        << " (limit 1e-4, h = 1e-5)";
    report(5, pass, msg.str());
  } catch (const std::exception& e) {
    report(5, false, std::string("exception: ") + e.what());
  }

  // ---- 6. Forward-invariance smoke suite -----------------------------------
  try {
    HocbfModel gt = toy_gt_model();
    DemoGenConfig dc;
    dc.episodes = 100;
    dc.seed = 29;
    DemoGenResult corpus = gen_demo_corpus(gt, dc);
    int collisions = 0;
    double min_b = std::numeric_limits<double>::infinity();
    for (const PlanResult& ep : corpus.episodes) {
      const double eb = *std::min_element(ep.barrier.begin(), ep.barrier.end());
      min_b = std::min(min_b, eb);
      if (eb <= 0.0) ++collisions;
    }
    const bool pass = corpus.episodes.size() == 100 && collisions == 0;
    std::ostringstream msg;
    msg << corpus.episodes.size() << " planner episodes, " << collisions
        << " collisions, worst min-barrier " << min_b << " (must stay > 0)";
    report(6, pass, msg.str());
  } catch (const std::exception& e) {
    report(6, false, std::string("exception: ") + e.what());
  }

  // ---- 7. CLI determinism across reruns and worker counts -----------------
  try {
    namespace fs = std::filesystem;
    const fs::path c7 = scratch / "c7";
    fs::remove_all(c7);
    fs::create_directories(c7);
    auto dirq = [](const fs::path& p) { return "\"" + p.string() + "\""; };

    struct CommandSpec {
      std::string name;
      nlohmann::json cfg;
      std::vector<std::string> outputs;
    };
    std::vector<CommandSpec> specs;

    {
      nlohmann::json j;
      j["output_dir"] = (c7 / "demos").string();
      j["episodes"] = 6;
      j["seed"] = 3;
      specs.push_back({"gen-demos", j, {"demos.csv", "gt_model.json", "manifest.json"}});
    }
    {
      nlohmann::json j;
      j["output_dir"] = (c7 / "learn").string();
      j["demos"] = (c7 / "demos" / "demos.csv").string();
      j["dynamics"] = {{"kind", "simple-car"}, {"wheelbase", 1.0}};
      j["barrier"] = {{"kind", "circle"}, {"params", {0.0, 0.0, 1.0}}};
      j["alpha_kind"] = "power";
      j["steps"] = 250;
      j["learning_rate"] = 0.001;
      specs.push_back({"learn", j, {"model.json", "loss_trace.csv", "manifest.json"}});
    }
    {
      nlohmann::json j;
      j["output_dir"] = (c7 / "solve").string();
      j["kind"] = "wc-hj";
      j["dynamics"] = {{"kind", "double-integrator"}};
      j["boundary"] = {{"kind", "coordinate"}, {"dim", 0}, {"offset", 0.0}};
      j["ego_box"] = {{"lower", {-1.0}}, {"upper", {1.0}}};
      j["grid"] = {{"lower", {-1.0, -2.0}}, {"upper", {3.0, 2.0}}, {"points", {41, 41}}};
      j["horizon"] = 0.4;
      j["store_count"] = 3;
      specs.push_back({"solve", j, {"value.vf", "manifest.json"}});
    }
    {
      nlohmann::json j;
      j["output_dir"] = (c7 / "compare").string();
      j["dynamics"] = {{"kind", "double-integrator"}};
      j["boundary"] = {{"kind", "coordinate"}, {"dim", 0}, {"offset", 0.0}};
      j["ego_box"] = {{"lower", {-1.0}}, {"upper", {1.0}}};
      j["reference"] = {{"kind", "wc-hj"}, {"field", (c7 / "solve" / "value.vf").string()}};
      j["candidate"] = {{"kind", "wc-hj"}, {"field", (c7 / "solve" / "value.vf").string()}};
      j["filter"] = {{"speed_lo", -10.0}, {"speed_hi", 10.0}};
      j["levelset"] = {{"dim_x", 0}, {"dim_y", 1}};
      j["controls"] = {{"sweep_dim", 1}, {"values", {-0.5, 0.0, 0.5}}, {"base", {0.5, 0.0}}};
      specs.push_back({"compare", j,
                       {"confusion.json", "levelset_reference.csv", "levelset_candidate.csv",
                        "controls_reference.csv", "controls_candidate.csv", "manifest.json"}});
    }
    {
      nlohmann::json j;
      j["output_dir"] = (c7 / "compare2").string();
      j["dynamics"] = {{"kind", "double-integrator"}};
      j["boundary"] = {{"kind", "coordinate"}, {"dim", 0}, {"offset", 0.0}};
      j["ego_box"] = {{"lower", {-1.0}}, {"upper", {1.0}}};
      j["reference"] = {{"kind", "wc-hj"}, {"field", (c7 / "solve" / "value.vf").string()}};
      j["candidate"] = {{"kind", "brake"}, {"horizon", 0.4}, {"dt", 0.02}};
      j["filter"] = {{"speed_lo", -10.0}, {"speed_hi", 10.0}};
      j["levelset"] = {{"dim_x", 0}, {"dim_y", 1}};
      specs.push_back({"compare", j,
                       {"confusion.json", "levelset_reference.csv", "manifest.json"}});
    }
    {
      nlohmann::json j;
      j["output_dir"] = (c7 / "eval").string();
      j["dynamics"] = {{"kind", "relative-car-4d"}};
      j["boundary"] = {{"kind", "coordinate"}, {"dim", 0}, {"offset", 0.0}};
      j["ego_box"] = {{"lower", {-2.0}}, {"upper", {2.0}}};
      j["contender_box"] = {{"lower", {-2.0}}, {"upper", {2.0}}};
      j["concept"] = {{"kind", "brake"}, {"horizon", 1.0}, {"dt", 0.02}};
      j["highway"] = {{"samples", 1500}, {"seed", 11}};
      j["t"] = -1.0;
      specs.push_back({"eval", j, {"percentiles.json", "highway.csv", "manifest.json"}});
    }

    bool pass = true;
    std::string detail;
    int run_index = 0;
    for (const CommandSpec& spec : specs) {
      const fs::path cfg_path = c7 / ("cfg_" + std::to_string(run_index++) + ".json");
      write_file(cfg_path, spec.cfg.dump(2) + "\n");
      const fs::path out_dir = spec.cfg.at("output_dir").get<std::string>();
      const std::string base_cmd =
          dirq(cli) + " " + spec.name + " --config " + dirq(cfg_path) + " >/dev/null 2>&1";

      std::map<std::string, std::string> first;
      for (int rep = 0; rep < 3 && pass; ++rep) {
        const std::string cmd = rep == 2 ? "env REACHSAFE_THREADS=2 " + base_cmd : base_cmd;
        if (std::system(cmd.c_str()) != 0) {
          pass = false;
          detail = spec.name + " exited nonzero";
          break;
        }
        for (const std::string& name : spec.outputs) {
          const std::string bytes = read_file(out_dir / name);
          if (bytes.empty()) {
            pass = false;
            detail = spec.name + " missing output " + name;
            break;
          }
          if (rep == 0) {
            first[name] = bytes;
          } else if (first[name] != bytes) {
            pass = false;
            detail = spec.name + " output " + name + " differs on rerun " +
                     std::to_string(rep);
            break;
          }
        }
      }
      if (!pass) break;
    }
    if (pass) detail = "6 CLI runs byte-identical across reruns and REACHSAFE_THREADS";
    report(7, pass, detail);
  } catch (const std::exception& e) {
    report(7, false, std::string("exception: ") + e.what());
  }

  // ---- 8. Percentile pipeline against a sort-based oracle ------------------
  try {
    HighwayLogConfig hc;
    hc.samples = 10000;
    hc.seed = 23;
    DemoDataset log = gen_highway_log(hc);
    auto rel = make_relative_car_4d();
    ControlBox box(evec({-2.0}), evec({2.0}));
    SafetyConcept cpt = SafetyConcept::open_loop(ConceptKind::brake, rel,
                                                 BoundaryFn::coordinate(0, 0.0), box, box, 2.0,
                                                 0.02);
    PercentileReport rep = percentile_report(cpt, log, -2.0, 1);

    std::vector<double> vals(log.size());
    for (std::size_t i = 0; i < log.size(); ++i) vals[i] = evaluate(cpt, log.x[i], -2.0);
    std::sort(vals.begin(), vals.end());
    const double mid = 0.5 * (vals[4999] + vals[5000]);

    const bool exact_ends = rep.p0 == vals.front() && rep.p100 == vals.back();
    const bool mid_ok = close(rep.p50, mid, 1e-12 * std::max(1.0, std::abs(mid)));
    const bool p5_ok = rep.p5 >= vals[499] - 1e-15 && rep.p5 <= vals[500] + 1e-15;
    const bool p95_ok = rep.p95 >= vals[9499] - 1e-15 && rep.p95 <= vals[9500] + 1e-15;
    const double mean_oracle =
        std::accumulate(vals.begin(), vals.end(), 0.0) / static_cast<double>(vals.size());
    const bool mean_ok = close(rep.mean, mean_oracle, 1e-9 * std::max(1.0, std::abs(mean_oracle)));

    const bool pass = rep.count == 10000 && exact_ends && mid_ok && p5_ok && p95_ok && mean_ok;
    std::ostringstream msg;
    msg << "10000-sample log: p0/p100 exact, p50 " << rep.p50 << " vs midpoint " << mid
        << ", p5/p95 within one interpolation step, mean " << rep.mean;
    report(8, pass, msg.str());
  } catch (const std::exception& e) {
    report(8, false, std::string("exception: ") + e.what());
  }

  if (failures == 0) std::cout << "all 8 criteria passed" << std::endl;
  else std::cout << failures << " criteria failed" << std::endl;
  return failures;
}
