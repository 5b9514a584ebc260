#include "reachsafe/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace reachsafe {

namespace {

// CCW sort around the centroid; input points are distinct.
void sort_ccw(std::vector<Control>& pts) {
  if (pts.size() < 3) return;
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (const auto& p : pts) c += Eigen::Vector2d(p[0], p[1]);
  c /= static_cast<double>(pts.size());
  std::sort(pts.begin(), pts.end(), [&c](const Control& a, const Control& b) {
    return std::atan2(a[1] - c[1], a[0] - c[0]) < std::atan2(b[1] - c[1], b[0] - c[0]);
  });
}

void push_unique(std::vector<Control>& pts, const Control& p, double scale) {
  for (const auto& q : pts) {
    if ((q - p).lpNorm<Eigen::Infinity>() <= 1e-12 * scale) return;
  }
  pts.push_back(p);
}

}  // namespace

bool FeasiblePolytope::contains(const ControlBox& box, const Halfspace& hs, const Control& u,
                                double tol) const {
  if (empty) return false;
  return box.contains(u, tol) && hs.eval(u) >= -tol;
}

double FeasiblePolytope::area() const {
  if (empty || vertices.empty()) return 0.0;
  if (vertices[0].size() == 1) {
    double lo = vertices[0][0], hi = vertices[0][0];
    for (const auto& v : vertices) {
      lo = std::min(lo, v[0]);
      hi = std::max(hi, v[0]);
    }
    return hi - lo;
  }
  double twice = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const auto& a = vertices[i];
    const auto& b = vertices[(i + 1) % vertices.size()];
    twice += a[0] * b[1] - b[0] * a[1];
  }
  return 0.5 * std::abs(twice);
}

FeasiblePolytope box_halfspace_polytope(const ControlBox& box, const Halfspace& hs, double tol) {
  const int dim = box.dim();
  if (hs.normal.size() != dim)
    throw std::invalid_argument("box_halfspace_polytope: dimension mismatch");
  if (dim != 1 && dim != 2)
    throw std::invalid_argument("box_halfspace_polytope: only 1-D and 2-D supported");

  FeasiblePolytope poly;
  double scale = 1.0 + box.upper.cwiseAbs().maxCoeff() + box.lower.cwiseAbs().maxCoeff();
  double slack = tol * (1.0 + std::abs(hs.offset) + hs.normal.cwiseAbs().sum() * scale);

  if (hs.normal.lpNorm<Eigen::Infinity>() <= tol) {
    // Degenerate halfspace: feasibility decided by the offset alone.
    if (hs.offset >= -slack) {
      poly.empty = false;
      if (dim == 1) {
        poly.vertices = {box.lower, box.upper};
      } else {
        Control a(2), b(2), c(2), d(2);
        a << box.lower[0], box.lower[1];
        b << box.upper[0], box.lower[1];
        c << box.upper[0], box.upper[1];
        d << box.lower[0], box.upper[1];
        poly.vertices = {a, b, c, d};
      }
    }
    return poly;
  }

  if (dim == 1) {
    double a = hs.normal[0];
    double cut = -hs.offset / a;
    double lo = box.lower[0], hi = box.upper[0];
    if (a > 0.0) lo = std::max(lo, cut);
    else hi = std::min(hi, cut);
    if (lo <= hi + slack) {
      lo = std::min(lo, hi);
      poly.empty = false;
      Control l(1), h(1);
      l << lo;
      h << hi;
      poly.vertices = {l, h};
    }
    return poly;
  }

  std::vector<Control> pts;
  const double xl = box.lower[0], xu = box.upper[0];
  const double yl = box.lower[1], yu = box.upper[1];
  const double corners[4][2] = {{xl, yl}, {xu, yl}, {xu, yu}, {xl, yu}};
  for (const auto& c : corners) {
    Control p(2);
    p << c[0], c[1];
    if (hs.eval(p) >= -slack) push_unique(pts, p, scale);
  }
  // Boundary line n.u + offset = 0 against the four edges.
  auto add_cut = [&](int fixed_axis, double fixed_val) {
    int free_axis = 1 - fixed_axis;
    double nf = hs.normal[free_axis];
    if (std::abs(nf) <= tol) return;
    double val = -(hs.offset + hs.normal[fixed_axis] * fixed_val) / nf;
    if (val >= box.lower[free_axis] - slack && val <= box.upper[free_axis] + slack) {
      Control p(2);
      p[fixed_axis] = fixed_val;
      p[free_axis] = std::clamp(val, box.lower[free_axis], box.upper[free_axis]);
      push_unique(pts, p, scale);
    }
  };
  add_cut(0, xl);
  add_cut(0, xu);
  add_cut(1, yl);
  add_cut(1, yu);

  if (pts.empty()) return poly;
  if (pts.size() <= 2) {
    // A single touching corner or edge sliver still counts as feasible.
    poly.empty = false;
    poly.vertices = pts;
    return poly;
  }
  sort_ccw(pts);
  poly.empty = false;
  poly.vertices = std::move(pts);
  return poly;
}

Control project_onto(const ControlBox& box, const Halfspace& hs, const FeasiblePolytope& poly,
                     const Control& point) {
  if (poly.empty) throw std::invalid_argument("project_onto: empty polytope");
  const int dim = box.dim();
  if (dim == 1) {
    double lo = poly.vertices.front()[0], hi = lo;
    for (const auto& v : poly.vertices) {
      lo = std::min(lo, v[0]);
      hi = std::max(hi, v[0]);
    }
    Control r(1);
    r << std::clamp(point[0], lo, hi);
    return r;
  }
  if (poly.contains(box, hs, point, 1e-12)) return point;
  if (poly.vertices.size() == 1) return poly.vertices[0];
  // Closest point over boundary segments of the CCW polygon.
  double best = std::numeric_limits<double>::infinity();
  Control best_pt = poly.vertices[0];
  const std::size_t n = poly.vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Control& a = poly.vertices[i];
    const Control& b = poly.vertices[(i + 1) % n];
    Eigen::VectorXd ab = b - a;
    double len2 = ab.squaredNorm();
    double t = len2 > 0.0 ? std::clamp((point - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    Control cand = a + t * ab;
    double d = (point - cand).squaredNorm();
    if (d < best) {
      best = d;
      best_pt = cand;
    }
  }
  return best_pt;
}

}  // namespace reachsafe
