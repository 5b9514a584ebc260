#include "reachsafe/value_field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"

static_assert(std::endian::native == std::endian::little,
              "value-field blocks are little-endian");

namespace reachsafe {

namespace {

// Fractional cell coordinate along one dim; periodic wraps, others clamp.
double locate(const Grid& g, int dim, double x, bool* clamped) {
  double u;
  if (g.periodic[dim]) {
    double period = g.upper[dim] - g.lower[dim];
    double w = std::fmod(x - g.lower[dim], period);
    if (w < 0) w += period;
    u = w / g.spacing[dim];
  } else {
    u = (x - g.lower[dim]) / g.spacing[dim];
    if (u < 0.0) {
      u = 0.0;
      if (clamped) *clamped = true;
    }
    double umax = static_cast<double>(g.points[dim] - 1);
    if (u > umax) {
      u = umax;
      if (clamped) *clamped = true;
    }
  }
  return u;
}

double interp_slice(const Grid& g, const std::vector<double>& slice, const State& x,
                    bool* clamped) {
  const int d = g.dims();
  int base[8];
  double frac[8];
  for (int i = 0; i < d; ++i) {
    double u = locate(g, i, x[i], clamped);
    int i0 = static_cast<int>(std::floor(u));
    int imax = g.points[i] - 2;
    if (i0 > imax) i0 = imax;
    if (i0 < 0) i0 = 0;
    base[i] = i0;
    frac[i] = u - i0;
  }
  double acc = 0.0;
  const int corners = 1 << d;
  for (int mask = 0; mask < corners; ++mask) {
    double w = 1.0;
    std::int64_t flat = 0;
    for (int i = 0; i < d; ++i) {
      int bit = (mask >> i) & 1;
      w *= bit ? frac[i] : 1.0 - frac[i];
      flat += g.strides[i] * (base[i] + bit);
    }
    if (w != 0.0) acc += w * slice[flat];
  }
  return acc;
}

}  // namespace

void ValueField::check() const {
  if (times.empty() || values.size() != times.size())
    throw NumericalError("value field: time/value slice mismatch");
  for (const auto& s : values) {
    if (static_cast<std::int64_t>(s.size()) != grid.total())
      throw NumericalError("value field: slice size mismatch");
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] < times[k - 1])) throw NumericalError("value field: times must descend");
  }
}

double ValueField::value_at(const State& x, double t, bool* clamped) const {
  if (x.size() != grid.dims()) throw std::invalid_argument("value_at: state dim mismatch");
  if (clamped) *clamped = false;
  if (times.size() == 1) return interp_slice(grid, values[0], x, clamped);
  double tq = t;
  if (tq > times.front()) {
    tq = times.front();
    if (clamped) *clamped = true;
  }
  if (tq < times.back()) {
    tq = times.back();
    if (clamped) *clamped = true;
  }
  // times descend; find k with times[k] >= tq >= times[k+1]
  std::size_t k = 0;
  {
    std::size_t lo = 0, hi = times.size() - 1;
    while (hi - lo > 1) {
      std::size_t mid = (lo + hi) / 2;
      if (times[mid] >= tq) lo = mid;
      else hi = mid;
    }
    k = lo;
  }
  double v0 = interp_slice(grid, values[k], x, clamped);
  double v1 = interp_slice(grid, values[k + 1], x, clamped);
  double w = (times[k] - tq) / (times[k] - times[k + 1]);
  return v0 + w * (v1 - v0);
}

Eigen::VectorXd ValueField::spatial_gradient(const State& x, double t) const {
  Eigen::VectorXd g(grid.dims());
  for (int i = 0; i < grid.dims(); ++i) {
    double h = grid.spacing[i];
    double hi = x[i] + h;
    double lo = x[i] - h;
    if (!grid.periodic[i]) {
      hi = std::min(hi, grid.upper[i]);
      lo = std::max(lo, grid.lower[i]);
    }
    State xp = x, xm = x;
    xp[i] = hi;
    xm[i] = lo;
    g[i] = (value_at(xp, t) - value_at(xm, t)) / (hi - lo);
  }
  return g;
}

double ValueField::time_derivative(const State& x, double t) const {
  if (times.size() < 2) return 0.0;
  double tq = std::clamp(t, times.back(), times.front());
  std::size_t k = 0;
  std::size_t lo = 0, hi = times.size() - 1;
  while (hi - lo > 1) {
    std::size_t mid = (lo + hi) / 2;
    if (times[mid] >= tq) lo = mid;
    else hi = mid;
  }
  k = lo;
  double v0 = value_at(x, times[k]);
  double v1 = value_at(x, times[k + 1]);
  return (v0 - v1) / (times[k] - times[k + 1]);
}

void ValueField::save(const std::string& path, int store_count) const {
  check();
  std::vector<std::size_t> keep;
  const std::size_t K = times.size();
  if (store_count <= 0 || static_cast<std::size_t>(store_count) >= K) {
    keep.resize(K);
    for (std::size_t i = 0; i < K; ++i) keep[i] = i;
  } else {
    int sc = std::max(store_count, 2);
    for (int i = 0; i < sc; ++i) {
      std::size_t idx = static_cast<std::size_t>(
          std::llround(static_cast<double>(i) * (K - 1) / (sc - 1)));
      if (keep.empty() || idx != keep.back()) keep.push_back(idx);
    }
  }
  nlohmann::json header;
  header["format"] = "reachsafe-vf";
  header["version"] = 1;
  header["grid"] = nlohmann::json::parse(grid.to_json_string());
  nlohmann::json jt = nlohmann::json::array();
  for (std::size_t k : keep) jt.push_back(times[k]);
  header["times"] = jt;
  header["scheme"] = {{"kind", scheme_kind}, {"spatial_order", spatial_order}, {"cfl", cfl}};
  header["config_hash"] = config_hash;
  header["dissipation"] = dissipation;
  header["node_count"] = grid.total();
  header["node_order"] = "row-major-last-fastest";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << header.dump() << "\n";
  for (std::size_t k : keep) {
    out.write(reinterpret_cast<const char*>(values[k].data()),
              static_cast<std::streamsize>(values[k].size() * sizeof(double)));
  }
  if (!out) throw ConfigError("write failure: " + path);
}

ValueField ValueField::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open value field: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("value field: missing header: " + path);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("value field header parse failure: ") + e.what());
  }
  if (header.value("format", "") != "reachsafe-vf")
    throw ConfigError("value field: unrecognized format: " + path);
  ValueField f;
  f.grid = Grid::from_json_string(header.at("grid").dump());
  f.times = header.at("times").get<std::vector<double>>();
  f.scheme_kind = header.at("scheme").at("kind").get<std::string>();
  f.spatial_order = header.at("scheme").at("spatial_order").get<std::string>();
  f.cfl = header.at("scheme").at("cfl").get<double>();
  f.config_hash = header.value("config_hash", "");
  if (header.contains("dissipation"))
    f.dissipation = header.at("dissipation").get<std::vector<double>>();
  const std::int64_t n = f.grid.total();
  f.values.assign(f.times.size(), std::vector<double>(n));
  for (auto& slice : f.values) {
    in.read(reinterpret_cast<char*>(slice.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw ConfigError("value field: truncated blocks: " + path);
  }
  f.check();
  return f;
}

ValueField ValueField::from_function(const Grid& g, std::vector<double> ts,
                                     const std::function<double(const State&, double)>& fn) {
  ValueField f;
  f.grid = g;
  f.times = std::move(ts);
  f.scheme_kind = "function";
  f.spatial_order = "exact";
  f.values.assign(f.times.size(), std::vector<double>(g.total()));
  for (std::size_t k = 0; k < f.times.size(); ++k) {
    for (std::int64_t i = 0; i < g.total(); ++i) f.values[k][i] = fn(g.node(i), f.times[k]);
  }
  f.check();
  return f;
}

}  // namespace reachsafe
