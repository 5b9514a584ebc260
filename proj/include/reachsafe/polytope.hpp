#pragma once

#include <Eigen/Dense>
#include <vector>

#include "reachsafe/dynamics.hpp"

namespace reachsafe {

// Satisfied iff normal . u + offset >= 0.
struct Halfspace {
  Eigen::VectorXd normal;
  double offset = 0.0;
  double eval(const Control& u) const { return normal.dot(u) + offset; }
};

// Convex polytope given by explicit vertices; 2-D vertex lists are CCW.
struct FeasiblePolytope {
  std::vector<Control> vertices;
  bool empty = true;

  bool contains(const ControlBox& box, const Halfspace& hs, const Control& u,
                double tol = 1e-9) const;
  double area() const;  // shoelace, 2-D only; 1-D returns interval length
};

// Exact vertex enumeration of box (dim 1 or 2) intersected with one halfspace:
// box corners that satisfy the halfspace plus boundary-line intersections with
// the box edges. Vertex count is at most corners + 2*dim.
FeasiblePolytope box_halfspace_polytope(const ControlBox& box, const Halfspace& hs,
                                        double tol = 1e-12);

// Euclidean projection onto the polytope (dim 1 or 2); polytope must be
// non-empty and built from box_halfspace_polytope of (box, hs).
Control project_onto(const ControlBox& box, const Halfspace& hs, const FeasiblePolytope& poly,
                     const Control& point);

}  // namespace reachsafe
