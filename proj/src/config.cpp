#include "reachsafe/config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace reachsafe {

namespace {

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

nlohmann::json parse_json(const std::string& text, const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(what + ": JSON parse failure: " + e.what());
  }
}

const nlohmann::json& require(const nlohmann::json& j, const char* key, const char* ctx) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(std::string(ctx) + ": missing field '" + key + "'");
  return *it;
}

double get_num(const nlohmann::json& j, const char* key, const char* ctx) {
  const nlohmann::json& v = require(j, key, ctx);
  if (!v.is_number()) throw ConfigError(std::string(ctx) + ": '" + key + "' must be a number");
  return v.get<double>();
}

double num_or(const nlohmann::json& j, const char* key, double fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  return it->get<double>();
}

long int_or(const nlohmann::json& j, const char* key, long fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_integer()) throw ConfigError(std::string("'") + key + "' must be an integer");
  return it->get<long>();
}

std::string str_or(const nlohmann::json& j, const char* key, const std::string& fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_string()) throw ConfigError(std::string("'") + key + "' must be a string");
  return it->get<std::string>();
}

std::string get_str(const nlohmann::json& j, const char* key, const char* ctx) {
  const nlohmann::json& v = require(j, key, ctx);
  if (!v.is_string()) throw ConfigError(std::string(ctx) + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

Eigen::VectorXd get_vector(const nlohmann::json& v, const char* ctx) {
  if (!v.is_array()) throw ConfigError(std::string(ctx) + ": expected an array of numbers");
  Eigen::VectorXd out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(std::string(ctx) + ": expected an array of numbers");
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  }
  return out;
}

std::filesystem::path prepare_output_dir(const nlohmann::json& cfg) {
  const std::string dir = get_str(cfg, "output_dir", "config");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output_dir '" + dir + "': " + ec.message());
  return dir;
}

void write_manifest(const std::filesystem::path& dir, const std::string& command,
                    const nlohmann::json& cfg, std::vector<std::string> outputs,
                    nlohmann::json summary) {
  std::sort(outputs.begin(), outputs.end());
  nlohmann::json m;
  m["command"] = command;
  m["config"] = cfg;
  m["config_hash"] = config_hash(cfg);
  m["outputs"] = outputs;
  m["summary"] = std::move(summary);
  m["toolkit_version"] = kToolkitVersion;
  write_text_file((dir / "manifest.json").string(), m.dump(2) + "\n");
}

HocbfModel default_toy_model(double cx, double cy, double r) {
  HocbfModel m;
  m.barrier = BarrierSpec::circle(cx, cy, r, 4);
  Eigen::Vector2d p1(0.54, 1.16), p2(0.68, 1.11);
  m.alphas.push_back(ClassKappaFn::from_effective(KappaKind::power, p1));
  m.alphas.push_back(ClassKappaFn::from_effective(KappaKind::power, p2));
  return m;
}

HocbfModel model_from_config(const nlohmann::json& cfg, int state_dim_hint) {
  if (cfg.contains("model")) return model_from_json(cfg.at("model").dump(), state_dim_hint);
  return load_model(get_str(cfg, "model_path", "config"), state_dim_hint);
}

}  // namespace

nlohmann::json load_config(const std::string& path, const std::vector<std::string>& overrides) {
  nlohmann::json j = parse_json(read_text_file(path), path);
  if (!j.is_object()) throw ConfigError(path + ": top-level config must be an object");
  for (const std::string& assignment : overrides) apply_override(j, assignment);
  return j;
}

void apply_override(nlohmann::json& j, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override must look like key=value: " + assignment);
  const std::string key = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);

  nlohmann::json* node = &j;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = key.find('.', start);
    const std::string part = key.substr(start, dot - start);
    if (part.empty()) throw ConfigError("override has an empty key segment: " + assignment);
    if (dot == std::string::npos) {
      nlohmann::json parsed = nlohmann::json::parse(value, nullptr, false);
      (*node)[part] = parsed.is_discarded() ? nlohmann::json(value) : parsed;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

std::string config_hash(const nlohmann::json& j) { return fnv1a_hex(j.dump()); }

AffinePairwiseDynamics dynamics_from_config(const nlohmann::json& j) {
  const std::string kind = get_str(j, "kind", "dynamics");
  if (kind == "simple-car") return make_simple_car(get_num(j, "wheelbase", "dynamics"));
  if (kind == "relative-car-6d") return make_relative_car_6d(get_num(j, "wheelbase", "dynamics"));
  if (kind == "relative-car-4d") return make_relative_car_4d();
  if (kind == "double-integrator") return make_double_integrator_1d();
  throw ConfigError("dynamics: unknown kind '" + kind + "'");
}

BoundaryFn boundary_from_config(const nlohmann::json& j) {
  const std::string kind = get_str(j, "kind", "boundary");
  std::vector<int> dims = {0, 1};
  if (j.contains("dims")) dims = j.at("dims").get<std::vector<int>>();
  if (kind == "circle")
    return BoundaryFn::circle(get_num(j, "cx", "boundary"), get_num(j, "cy", "boundary"),
                              get_num(j, "r", "boundary"), dims);
  if (kind == "ellipse")
    return BoundaryFn::ellipse(get_num(j, "semi_x", "boundary"), get_num(j, "semi_y", "boundary"),
                               dims);
  if (kind == "coordinate")
    return BoundaryFn::coordinate(static_cast<int>(int_or(j, "dim", 0)),
                                  num_or(j, "offset", 0.0));
  throw ConfigError("boundary: unknown kind '" + kind + "'");
}

ControlBox box_from_config(const nlohmann::json& j) {
  Eigen::VectorXd lo = get_vector(require(j, "lower", "control box"), "control box lower");
  Eigen::VectorXd hi = get_vector(require(j, "upper", "control box"), "control box upper");
  try {
    return ControlBox(lo, hi);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("control box: ") + e.what());
  }
}

Grid grid_from_config(const nlohmann::json& j, const AffinePairwiseDynamics& dyn) {
  Eigen::VectorXd lo = get_vector(require(j, "lower", "grid"), "grid lower");
  Eigen::VectorXd hi = get_vector(require(j, "upper", "grid"), "grid upper");
  std::vector<int> points = require(j, "points", "grid").get<std::vector<int>>();
  if (lo.size() != dyn.state_dim || hi.size() != dyn.state_dim ||
      static_cast<int>(points.size()) != dyn.state_dim)
    throw ConfigError("grid: lower/upper/points must match the state dimension");
  std::vector<bool> periodic(points.size(), false);
  if (j.contains("periodic")) {
    periodic = j.at("periodic").get<std::vector<bool>>();
    if (periodic.size() != points.size())
      throw ConfigError("grid: periodic must match the state dimension");
  } else {
    for (int h : dyn.heading_dims) {
      if (std::abs((hi[h] - lo[h]) - 2.0 * std::numbers::pi) <= 1e-9) periodic[h] = true;
    }
  }
  try {
    return Grid::create(lo, hi, points, periodic);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
}

namespace {

PlanOptions plan_from_config(const nlohmann::json& j, PlanOptions p) {
  p.dt = num_or(j, "dt", p.dt);
  p.horizon = num_or(j, "horizon", p.horizon);
  p.heading_gain = num_or(j, "heading_gain", p.heading_gain);
  p.speed_gain = num_or(j, "speed_gain", p.speed_gain);
  p.target_speed = num_or(j, "target_speed", p.target_speed);
  p.goal_radius = num_or(j, "goal_radius", p.goal_radius);
  p.max_infeasible = static_cast<int>(int_or(j, "max_infeasible", p.max_infeasible));
  p.slack = num_or(j, "slack", p.slack);
  return p;
}

}  // namespace

void run_gen_demos(const nlohmann::json& cfg) {
  const std::filesystem::path dir = prepare_output_dir(cfg);
  DemoGenConfig g;
  g.episodes = static_cast<int>(int_or(cfg, "episodes", g.episodes));
  g.seed = static_cast<std::uint64_t>(int_or(cfg, "seed", 1));
  g.wheelbase = num_or(cfg, "wheelbase", g.wheelbase);
  if (cfg.contains("obstacle")) {
    const auto& o = cfg.at("obstacle");
    g.obstacle_x = num_or(o, "x", g.obstacle_x);
    g.obstacle_y = num_or(o, "y", g.obstacle_y);
    g.obstacle_r = num_or(o, "r", g.obstacle_r);
  }
  if (cfg.contains("spawn")) {
    const auto& s = cfg.at("spawn");
    g.spawn_radius_lo = num_or(s, "radius_lo", g.spawn_radius_lo);
    g.spawn_radius_hi = num_or(s, "radius_hi", g.spawn_radius_hi);
    g.speed_lo = num_or(s, "speed_lo", g.speed_lo);
    g.speed_hi = num_or(s, "speed_hi", g.speed_hi);
    g.heading_jitter = num_or(s, "heading_jitter", g.heading_jitter);
  }
  if (cfg.contains("plan")) g.plan = plan_from_config(cfg.at("plan"), g.plan);
  if (cfg.contains("ego_box")) g.ego_box = box_from_config(cfg.at("ego_box"));

  HocbfModel model = (cfg.contains("model") || cfg.contains("model_path"))
                         ? model_from_config(cfg, 4)
                         : default_toy_model(g.obstacle_x, g.obstacle_y, g.obstacle_r);

  DemoGenResult res = gen_demo_corpus(model, g);
  write_demos_csv(res.data, (dir / "demos.csv").string());
  save_model(model, (dir / "gt_model.json").string());

  nlohmann::json summary;
  summary["episodes"] = static_cast<int>(res.episodes.size());
  summary["samples"] = static_cast<std::int64_t>(res.data.size());
  summary["rejected_starts"] = res.rejected_starts;
  summary["discarded_episodes"] = res.discarded_episodes;
  write_manifest(dir, "gen-demos", cfg, {"demos.csv", "gt_model.json"}, summary);
}

void run_learn(const nlohmann::json& cfg) {
  const std::filesystem::path dir = prepare_output_dir(cfg);
  AffinePairwiseDynamics dyn = dynamics_from_config(require(cfg, "dynamics", "learn config"));

  const std::string demos = get_str(cfg, "demos", "learn config");
  DemoDataset data = demos.size() > 6 && demos.substr(demos.size() - 6) == ".jsonl"
                         ? read_demos_jsonl(demos)
                         : read_demos_csv(demos);

  // Assemble the initial model through the model JSON reader so the barrier
  // block shares its schema with model files.
  nlohmann::json init;
  init["barrier"] = require(cfg, "barrier", "learn config");
  init["barrier"]["state_dim"] = dyn.state_dim;
  init["relative_degree"] = int_or(cfg, "relative_degree", 2);
  const std::string alpha_kind = str_or(cfg, "alpha_kind", "power");
  nlohmann::json alphas = nlohmann::json::array();
  const int mr = static_cast<int>(init["relative_degree"].get<long>());
  for (int i = 0; i < mr; ++i) {
    nlohmann::json a;
    a["kind"] = alpha_kind;
    if (cfg.contains("init_alphas")) {
      a["params"] = cfg.at("init_alphas").at(i);
    } else if (alpha_kind == "power") {
      a["params"] = std::vector<double>{1.0, 1.5};
    } else if (alpha_kind == "linear" || alpha_kind == "cubic") {
      a["params"] = std::vector<double>{1.0};
    } else {
      a["params"] = std::vector<double>{0.5, 0.5, 0.5, 0.5};
    }
    alphas.push_back(a);
  }
  init["alphas"] = alphas;
  HocbfModel init_model = model_from_json(init.dump(), dyn.state_dim);

  DisturbanceProvider provider;
  if (cfg.contains("disturbance")) {
    const auto& d = cfg.at("disturbance");
    const std::string mode = get_str(d, "mode", "disturbance");
    if (mode == "ground-truth") {
      provider.mode = ContenderRule::Mode::ground_truth;
    } else if (mode == "worst-case") {
      provider.mode = ContenderRule::Mode::worst_case;
    } else if (mode == "fixed-interval") {
      provider.mode = ContenderRule::Mode::fixed_interval;
    } else {
      throw ConfigError("disturbance: unknown mode '" + mode + "'");
    }
    if (d.contains("interval")) provider.interval = box_from_config(d.at("interval"));
  } else if (data.has_contender()) {
    provider.mode = ContenderRule::Mode::ground_truth;
  }

  FitOptions opt;
  if (cfg.contains("weights")) {
    const auto& w = cfg.at("weights");
    opt.weights.beta1 = num_or(w, "beta1", opt.weights.beta1);
    opt.weights.beta2 = num_or(w, "beta2", opt.weights.beta2);
    opt.weights.beta3 = num_or(w, "beta3", opt.weights.beta3);
    opt.weights.beta4 = num_or(w, "beta4", opt.weights.beta4);
    opt.weights.beta5 = num_or(w, "beta5", opt.weights.beta5);
  }
  opt.learning_rate = num_or(cfg, "learning_rate", opt.learning_rate);
  opt.steps = int_or(cfg, "steps", opt.steps);
  opt.threads = static_cast<int>(int_or(cfg, "threads", 0));

  FitResult res = fit(init_model, dyn, data, provider, opt);

  save_model(res.model, (dir / "model.json").string());
  std::ostringstream trace;
  trace << "step,loss\n";
  for (std::size_t i = 0; i < res.loss_trace.size(); ++i)
    trace << i << ',' << format_double(res.loss_trace[i]) << '\n';
  write_text_file((dir / "loss_trace.csv").string(), trace.str());

  nlohmann::json summary;
  summary["steps_run"] = res.steps_run;
  summary["final_loss"] = res.loss_trace.empty() ? 0.0 : res.loss_trace.back();
  summary["satisfaction_rate"] = satisfaction_rate(res.model, dyn, data, provider);
  summary["nan_abort"] = res.nan_abort;
  write_manifest(dir, "learn", cfg, {"model.json", "loss_trace.csv"}, summary);

  if (res.nan_abort)
    throw NumericalError(
        "learn: loss became non-finite; artifacts hold the last finite iterate");
}

void run_solve(const nlohmann::json& cfg) {
  const std::filesystem::path dir = prepare_output_dir(cfg);
  const std::string kind_name = get_str(cfg, "kind", "solve config");
  const ConceptKind kind = concept_kind_from_name(kind_name);
  AffinePairwiseDynamics dyn = dynamics_from_config(require(cfg, "dynamics", "solve config"));
  BoundaryFn boundary = boundary_from_config(require(cfg, "boundary", "solve config"));
  ControlBox ego_box = box_from_config(require(cfg, "ego_box", "solve config"));
  ControlBox contender_box = dyn.contender_dim == 0
                                 ? ControlBox::empty_dim0()
                                 : box_from_config(require(cfg, "contender_box", "solve config"));
  Grid grid = grid_from_config(require(cfg, "grid", "solve config"), dyn);
  const double horizon = num_or(cfg, "horizon", 2.0);
  const int threads = static_cast<int>(int_or(cfg, "threads", 0));
  const int store_count = static_cast<int>(int_or(cfg, "store_count", 0));

  ValueField field;
  if (kind == ConceptKind::wc_hj || kind == ConceptKind::hocbf_hj) {
    SolveOptions opt;
    opt.threads = threads;
    opt.config_hash = config_hash(cfg);
    if (cfg.contains("scheme")) {
      const auto& s = cfg.at("scheme");
      opt.cfl = num_or(s, "cfl", opt.cfl);
      opt.spatial_order = str_or(s, "spatial_order", opt.spatial_order);
    }
    if (kind == ConceptKind::hocbf_hj) opt.model = model_from_config(cfg, dyn.state_dim);
    field = solve(dyn, kind == ConceptKind::wc_hj ? HamiltonianKind::worst_case
                                                  : HamiltonianKind::constrained,
                  boundary, grid, ego_box, contender_box, horizon, opt);
  } else {
    field = rollout_field(kind, dyn, boundary, grid, ego_box, contender_box, horizon,
                          num_or(cfg, "rollout_dt", 0.02), threads, config_hash(cfg));
  }
  field.save((dir / "value.vf").string(), store_count);

  nlohmann::json summary;
  summary["kind"] = kind_name;
  summary["nodes"] = grid.total();
  summary["steps"] = static_cast<std::int64_t>(field.times.size()) - 1;
  summary["dissipation_band"] = dissipation_band(field);
  write_manifest(dir, "solve", cfg, {"value.vf"}, summary);
}

namespace {

// Concept assembled from a config block; owns what the view references.
struct ConceptHolder {
  ValueField field;
  std::optional<HocbfModel> model;
  SafetyConcept view;
};

ConceptHolder concept_from_config(const nlohmann::json& j, const AffinePairwiseDynamics& dyn,
                                  const BoundaryFn& boundary, const ControlBox& ego_box,
                                  const ControlBox& contender_box) {
  ConceptHolder h;
  const ConceptKind kind = concept_kind_from_name(get_str(j, "kind", "concept"));
  if (j.contains("field")) {
    h.field = ValueField::load(get_str(j, "field", "concept"));
    if (kind == ConceptKind::hocbf_hj)
      h.model = load_model(get_str(j, "model_path", "concept"), dyn.state_dim);
    h.view = SafetyConcept::from_field(kind, dyn, boundary, h.field, ego_box, contender_box,
                                       h.model);
  } else if (kind == ConceptKind::brake || kind == ConceptKind::constant) {
    h.view = SafetyConcept::open_loop(kind, dyn, boundary, ego_box, contender_box,
                                      num_or(j, "horizon", 2.0), num_or(j, "dt", 0.02));
  } else {
    throw ConfigError("concept: HJ kinds need a 'field' path");
  }
  return h;
}

}  // namespace

void run_compare(const nlohmann::json& cfg) {
  const std::filesystem::path dir = prepare_output_dir(cfg);
  AffinePairwiseDynamics dyn = dynamics_from_config(require(cfg, "dynamics", "compare config"));
  BoundaryFn boundary = boundary_from_config(require(cfg, "boundary", "compare config"));
  ControlBox ego_box = box_from_config(require(cfg, "ego_box", "compare config"));
  ControlBox contender_box =
      dyn.contender_dim == 0 ? ControlBox::empty_dim0()
                             : box_from_config(require(cfg, "contender_box", "compare config"));
  const int threads = static_cast<int>(int_or(cfg, "threads", 0));

  ConceptHolder reference = concept_from_config(require(cfg, "reference", "compare config"), dyn,
                                                boundary, ego_box, contender_box);
  ConceptHolder candidate = concept_from_config(require(cfg, "candidate", "compare config"), dyn,
                                                boundary, ego_box, contender_box);
  if (!reference.view.field) throw ConfigError("compare: reference needs a 'field'");
  const Grid& grid = reference.view.field->grid;
  const double t = num_or(cfg, "t", reference.view.field->times.back());

  StateFilter filter;
  if (cfg.contains("filter")) {
    const auto& f = cfg.at("filter");
    filter.speed_lo = num_or(f, "speed_lo", filter.speed_lo);
    filter.speed_hi = num_or(f, "speed_hi", filter.speed_hi);
    filter.heading_lo = num_or(f, "heading_lo", filter.heading_lo);
    filter.heading_hi = num_or(f, "heading_hi", filter.heading_hi);
  }

  ConfusionMatrix cm = confusion(reference.view, candidate.view, grid, t, filter,
                                 num_or(cfg, "threshold", 0.0), threads);
  write_text_file((dir / "confusion.json").string(), cm.to_json());
  std::vector<std::string> outputs = {"confusion.json"};

  if (cfg.contains("levelset")) {
    const auto& l = cfg.at("levelset");
    SliceSpec spec;
    spec.dim_x = static_cast<int>(int_or(l, "dim_x", 0));
    spec.dim_y = static_cast<int>(int_or(l, "dim_y", 1));
    spec.t = num_or(l, "t", t);
    spec.base = l.contains("base") ? get_vector(l.at("base"), "levelset base")
                                   : Eigen::VectorXd::Zero(dyn.state_dim).eval();
    const double level = num_or(l, "level", 0.0);
    export_levelset(*reference.view.field, spec, level,
                    (dir / "levelset_reference.csv").string());
    outputs.push_back("levelset_reference.csv");
    if (candidate.view.field) {
      export_levelset(*candidate.view.field, spec, level,
                      (dir / "levelset_candidate.csv").string());
      outputs.push_back("levelset_candidate.csv");
    }
  }

  if (cfg.contains("controls")) {
    const auto& c = cfg.at("controls");
    const int sweep_dim = static_cast<int>(int_or(c, "sweep_dim", 0));
    const double ct = num_or(c, "t", t);
    State base = c.contains("base") ? get_vector(c.at("base"), "controls base")
                                    : Eigen::VectorXd::Zero(dyn.state_dim).eval();
    std::vector<double> values = require(c, "values", "controls").get<std::vector<double>>();
    export_controls(reference.view, base, sweep_dim, values, ct,
                    (dir / "controls_reference.csv").string());
    export_controls(candidate.view, base, sweep_dim, values, ct,
                    (dir / "controls_candidate.csv").string());
    outputs.push_back("controls_reference.csv");
    outputs.push_back("controls_candidate.csv");
  }

  nlohmann::json summary;
  summary["total"] = cm.total;
  summary["percent"]["safe_safe"] = cm.percent(0, 0);
  summary["percent"]["safe_unsafe"] = cm.percent(0, 1);
  summary["percent"]["unsafe_safe"] = cm.percent(1, 0);
  summary["percent"]["unsafe_unsafe"] = cm.percent(1, 1);
  write_manifest(dir, "compare", cfg, outputs, summary);
}

void run_eval(const nlohmann::json& cfg) {
  const std::filesystem::path dir = prepare_output_dir(cfg);
  AffinePairwiseDynamics dyn = dynamics_from_config(require(cfg, "dynamics", "eval config"));
  BoundaryFn boundary = boundary_from_config(require(cfg, "boundary", "eval config"));
  ControlBox ego_box = box_from_config(require(cfg, "ego_box", "eval config"));
  ControlBox contender_box =
      dyn.contender_dim == 0 ? ControlBox::empty_dim0()
                             : box_from_config(require(cfg, "contender_box", "eval config"));
  const int threads = static_cast<int>(int_or(cfg, "threads", 0));

  ConceptHolder cpt = concept_from_config(require(cfg, "concept", "eval config"), dyn, boundary,
                                          ego_box, contender_box);

  DemoDataset log;
  std::vector<std::string> outputs = {"percentiles.json"};
  if (cfg.contains("log")) {
    const std::string path = get_str(cfg, "log", "eval config");
    log = path.size() > 6 && path.substr(path.size() - 6) == ".jsonl" ? read_demos_jsonl(path)
                                                                      : read_demos_csv(path);
  } else if (cfg.contains("highway")) {
    const auto& hw = cfg.at("highway");
    HighwayLogConfig hc;
    hc.samples = static_cast<int>(int_or(hw, "samples", hc.samples));
    hc.seed = static_cast<std::uint64_t>(int_or(hw, "seed", 7));
    hc.steps_per_episode = static_cast<int>(int_or(hw, "steps_per_episode", hc.steps_per_episode));
    hc.dt = num_or(hw, "dt", hc.dt);
    hc.speed_lo = num_or(hw, "speed_lo", hc.speed_lo);
    hc.speed_hi = num_or(hw, "speed_hi", hc.speed_hi);
    hc.gap_lo = num_or(hw, "gap_lo", hc.gap_lo);
    hc.gap_hi = num_or(hw, "gap_hi", hc.gap_hi);
    hc.lateral_half_width = num_or(hw, "lateral_half_width", hc.lateral_half_width);
    hc.accel_limit = num_or(hw, "accel_limit", hc.accel_limit);
    log = gen_highway_log(hc);
    write_demos_csv(log, (dir / "highway.csv").string());
    outputs.push_back("highway.csv");
  } else {
    throw ConfigError("eval config: need 'log' or 'highway'");
  }

  const double t = num_or(cfg, "t", cpt.view.field ? cpt.view.field->times.back()
                                                   : -cpt.view.horizon);
  PercentileReport rep = percentile_report(cpt.view, log, t, threads);
  write_text_file((dir / "percentiles.json").string(), rep.to_json());

  nlohmann::json summary;
  summary["count"] = rep.count;
  summary["mean"] = rep.mean;
  summary["p0"] = rep.p0;
  summary["p50"] = rep.p50;
  summary["p100"] = rep.p100;
  write_manifest(dir, "eval", cfg, outputs, summary);
}

}  // namespace reachsafe
