#include "reachsafe/grid.hpp"

#include "json.hpp"

namespace reachsafe {

Grid Grid::create(Eigen::VectorXd lower, Eigen::VectorXd upper, std::vector<int> points,
                  std::vector<bool> periodic) {
  Grid g;
  g.lower = std::move(lower);
  g.upper = std::move(upper);
  g.points = std::move(points);
  const int d = static_cast<int>(g.points.size());
  if (g.lower.size() != d || g.upper.size() != d)
    throw ConfigError("grid: bounds/points dimension mismatch");
  if (d == 0) throw ConfigError("grid: need at least one dimension");
  g.periodic = periodic.empty() ? std::vector<bool>(d, false) : std::move(periodic);
  if (static_cast<int>(g.periodic.size()) != d)
    throw ConfigError("grid: periodic flags dimension mismatch");
  g.spacing.resize(d);
  for (int i = 0; i < d; ++i) {
    if (g.points[i] < 3) throw ConfigError("grid: need at least 3 points per dimension");
    if (!(g.upper[i] > g.lower[i])) throw ConfigError("grid: upper must exceed lower");
    g.spacing[i] = (g.upper[i] - g.lower[i]) / (g.points[i] - 1);
  }
  g.strides.assign(d, 1);
  for (int i = d - 2; i >= 0; --i) g.strides[i] = g.strides[i + 1] * g.points[i + 1];
  return g;
}

std::int64_t Grid::total() const {
  std::int64_t n = 1;
  for (int p : points) n *= p;
  return n;
}

State Grid::node(std::int64_t flat) const {
  State x(dims());
  for (int i = 0; i < dims(); ++i) {
    std::int64_t q = flat / strides[i];
    flat -= q * strides[i];
    x[i] = coord(i, static_cast<int>(q));
  }
  return x;
}

void Grid::multi_index(std::int64_t flat, int* idx) const {
  for (int i = 0; i < dims(); ++i) {
    std::int64_t q = flat / strides[i];
    flat -= q * strides[i];
    idx[i] = static_cast<int>(q);
  }
}

std::int64_t Grid::flat_index(const int* idx) const {
  std::int64_t f = 0;
  for (int i = 0; i < dims(); ++i) f += strides[i] * idx[i];
  return f;
}

std::string Grid::to_json_string() const {
  nlohmann::json j;
  j["lower"] = std::vector<double>(lower.data(), lower.data() + lower.size());
  j["upper"] = std::vector<double>(upper.data(), upper.data() + upper.size());
  j["points"] = points;
  j["periodic"] = std::vector<int>(periodic.begin(), periodic.end());
  return j.dump();
}

Grid Grid::from_json_string(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  auto lo = j.at("lower").get<std::vector<double>>();
  auto hi = j.at("upper").get<std::vector<double>>();
  auto pts = j.at("points").get<std::vector<int>>();
  std::vector<bool> per;
  if (j.contains("periodic")) {
    for (int v : j.at("periodic").get<std::vector<int>>()) per.push_back(v != 0);
  }
  return Grid::create(Eigen::Map<Eigen::VectorXd>(lo.data(), lo.size()),
                      Eigen::Map<Eigen::VectorXd>(hi.data(), hi.size()), pts, per);
}

}  // namespace reachsafe
