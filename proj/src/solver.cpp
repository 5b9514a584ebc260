#include "reachsafe/solver.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

namespace reachsafe {

double BoundaryFn::value(const State& x) const {
  switch (kind) {
    case Kind::coordinate:
      return x[dims[0]] - params[0];
    case Kind::circle: {
      double dx = x[dims[0]] - params[0];
      double dy = x[dims[1]] - params[1];
      return std::sqrt(dx * dx + dy * dy) - params[2];
    }
    case Kind::ellipse: {
      double ax = x[dims[0]] / params[0];
      double by = x[dims[1]] / params[1];
      return ax * ax + by * by - 1.0;
    }
    case Kind::custom:
      return custom_fn(x);
  }
  throw std::logic_error("boundary: bad kind");
}

BoundaryFn BoundaryFn::coordinate(int dim, double offset) {
  BoundaryFn b;
  b.kind = Kind::coordinate;
  b.params = Eigen::VectorXd::Constant(1, offset);
  b.dims = {dim};
  return b;
}

BoundaryFn BoundaryFn::circle(double cx, double cy, double radius, std::vector<int> dims) {
  if (!(radius > 0.0)) throw ConfigError("boundary circle: radius must be > 0");
  BoundaryFn b;
  b.kind = Kind::circle;
  b.params = Eigen::Vector3d(cx, cy, radius);
  b.dims = std::move(dims);
  return b;
}

BoundaryFn BoundaryFn::ellipse(double semi_x, double semi_y, std::vector<int> dims) {
  if (!(semi_x > 0.0) || !(semi_y > 0.0))
    throw ConfigError("boundary ellipse: semi-axes must be > 0");
  BoundaryFn b;
  b.kind = Kind::ellipse;
  b.params = Eigen::Vector2d(semi_x, semi_y);
  b.dims = std::move(dims);
  return b;
}

BoundaryFn BoundaryFn::custom(std::function<double(const State&)> fn) {
  BoundaryFn b;
  b.kind = Kind::custom;
  b.custom_fn = std::move(fn);
  return b;
}

namespace {

// Neighbor lookup along one dim: periodic dims wrap with period n-1 (first and
// last node coincide); non-periodic dims extrapolate linearly past the edge so
// one-sided differences degrade gracefully.
inline double fetch(const std::vector<double>& v, std::int64_t flat, int i, int off, int n,
                    std::int64_t stride, bool periodic) {
  int j = i + off;
  if (j >= 0 && j < n) return v[flat + static_cast<std::int64_t>(off) * stride];
  if (periodic) {
    int period = n - 1;
    int w = (j % period + period) % period;
    return v[flat + static_cast<std::int64_t>(w - i) * stride];
  }
  if (j < 0) {
    double v0 = v[flat - static_cast<std::int64_t>(i) * stride];
    double v1 = v[flat + static_cast<std::int64_t>(1 - i) * stride];
    return v0 + j * (v1 - v0);
  }
  double vn = v[flat + static_cast<std::int64_t>(n - 1 - i) * stride];
  double vm = v[flat + static_cast<std::int64_t>(n - 2 - i) * stride];
  return vn + (j - (n - 1)) * (vn - vm);
}

inline double smaller_magnitude(double a, double b) { return std::abs(a) <= std::abs(b) ? a : b; }

// Force duplicated periodic nodes to stay bitwise equal (trig at +/-pi is not
// exactly symmetric).
void sync_periodic(const Grid& g, std::vector<double>& v) {
  for (int d = 0; d < g.dims(); ++d) {
    if (!g.periodic[d]) continue;
    const int n = g.points[d];
    const std::int64_t stride = g.strides[d];
    const std::int64_t total = g.total();
    for (std::int64_t flat = 0; flat < total; ++flat) {
      std::int64_t q = (flat / stride) % n;
      if (q == static_cast<std::int64_t>(n - 1)) v[flat] = v[flat - (n - 1) * stride];
    }
  }
}

}  // namespace

ValueField solve(const AffinePairwiseDynamics& dyn, HamiltonianKind kind,
                 const BoundaryFn& boundary, const Grid& grid, const ControlBox& ego_box,
                 const ControlBox& contender_box, double horizon, const SolveOptions& opt) {
  const int d = grid.dims();
  if (d != dyn.state_dim) throw ConfigError("solve: grid/dynamics dimension mismatch");
  if (d > 8) throw ConfigError("solve: at most 8 state dimensions supported");
  if (ego_box.dim() != dyn.ego_dim || contender_box.dim() != dyn.contender_dim)
    throw ConfigError("solve: control box dimension mismatch");
  if (dyn.ego_dim > 4 || dyn.contender_dim > 4)
    throw ConfigError("solve: at most 4 control dimensions per agent supported");
  if (!(horizon > 0.0)) throw ConfigError("solve: horizon must be > 0");
  if (!(opt.cfl > 0.0) || opt.cfl > 1.0) throw ConfigError("solve: cfl must be in (0, 1]");
  const bool eno2 = opt.spatial_order == "eno2";
  if (!eno2 && opt.spatial_order != "first")
    throw ConfigError("solve: spatial_order must be 'first' or 'eno2'");
  if (kind == HamiltonianKind::constrained) {
    if (!opt.model) throw ConfigError("solve: constrained Hamiltonian needs a model");
    if (opt.model->barrier.state_dim != d)
      throw ConfigError("solve: model state dimension mismatch");
  }

  const std::int64_t N = grid.total();
  const int ma = dyn.ego_dim;
  const int mb = dyn.contender_dim;
  const std::size_t workers = worker_count(opt.threads);

  // Static per-node dynamics coefficients (the field is time-invariant).
  std::vector<double> fbuf(N * d), gbuf(N * d * ma), hbuf(N * d * mb);
  parallel_for(N, workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t I = lo; I < hi; ++I) {
      State x = grid.node(static_cast<std::int64_t>(I));
      Eigen::VectorXd f = dyn.drift(x);
      std::memcpy(&fbuf[I * d], f.data(), d * sizeof(double));
      if (ma > 0) {
        Eigen::MatrixXd g = dyn.ego_gain(x);
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < ma; ++j) gbuf[(I * d + i) * ma + j] = g(i, j);
      }
      if (mb > 0) {
        Eigen::MatrixXd h = dyn.contender_gain(x);
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < mb; ++j) hbuf[(I * d + i) * mb + j] = h(i, j);
      }
    }
  });

  // Per-axis |dH/dp_i| bounds from the control boxes.
  std::vector<double> amax(ma), bmax(mb);
  for (int j = 0; j < ma; ++j)
    amax[j] = std::max(std::abs(ego_box.lower[j]), std::abs(ego_box.upper[j]));
  for (int j = 0; j < mb; ++j)
    bmax[j] = std::max(std::abs(contender_box.lower[j]), std::abs(contender_box.upper[j]));
  std::vector<double> alpha(d, 0.0);
  for (std::int64_t I = 0; I < N; ++I) {
    for (int i = 0; i < d; ++i) {
      double a = std::abs(fbuf[I * d + i]);
      for (int j = 0; j < ma; ++j) a += std::abs(gbuf[(I * d + i) * ma + j]) * amax[j];
      for (int j = 0; j < mb; ++j) a += std::abs(hbuf[(I * d + i) * mb + j]) * bmax[j];
      alpha[i] = std::max(alpha[i], a);
    }
  }

  // Constrained-game geometry is time-invariant as well: cache it per node.
  std::vector<ConstrainedCandidates> cache;
  if (kind == HamiltonianKind::constrained) {
    cache.resize(N);
    parallel_for(N, workers, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t I = lo; I < hi; ++I) {
        HocbfAffineConstraint c =
            constraint_at(*opt.model, dyn, grid.node(static_cast<std::int64_t>(I)));
        cache[I] = constrained_candidates(c, ego_box, contender_box);
      }
    });
  }

  double rate = 0.0;
  for (int i = 0; i < d; ++i) rate += alpha[i] / grid.spacing[i];
  long nsteps;
  double dt;
  if (rate <= 1e-300) {  // frozen dynamics: V(x, t) = l(x)
    nsteps = 1;
    dt = horizon;
  } else {
    nsteps = static_cast<long>(std::ceil(horizon * rate / opt.cfl - 1e-12));
    nsteps = std::max<long>(nsteps, 1);
    dt = horizon / static_cast<double>(nsteps);
  }

  ValueField field;
  field.grid = grid;
  field.scheme_kind = kind == HamiltonianKind::worst_case ? "worst-case" : "constrained";
  field.spatial_order = opt.spatial_order;
  field.cfl = opt.cfl;
  field.config_hash = opt.config_hash;
  field.dissipation = alpha;

  std::vector<double> cur(N);
  for (std::int64_t I = 0; I < N; ++I) cur[I] = boundary.value(grid.node(I));
  sync_periodic(grid, cur);
  field.times.push_back(0.0);
  field.values.push_back(cur);

  std::vector<double> next(N);
  for (long step = 1; step <= nsteps; ++step) {
    parallel_for(N, workers, [&](std::size_t lo, std::size_t hi) {
      int idx[8];
      double A[4], B[4];
      for (std::size_t Iu = lo; Iu < hi; ++Iu) {
        const std::int64_t I = static_cast<std::int64_t>(Iu);
        grid.multi_index(I, idx);
        const double vI = cur[I];
        double drift = 0.0, dissip = 0.0;
        for (int j = 0; j < ma; ++j) A[j] = 0.0;
        for (int j = 0; j < mb; ++j) B[j] = 0.0;
        for (int i = 0; i < d; ++i) {
          const double h = grid.spacing[i];
          const int n = grid.points[i];
          const std::int64_t s = grid.strides[i];
          const bool per = grid.periodic[i];
          const double vm1 = fetch(cur, I, idx[i], -1, n, s, per);
          const double vp1 = fetch(cur, I, idx[i], +1, n, s, per);
          double dm = (vI - vm1) / h;
          double dp = (vp1 - vI) / h;
          if (eno2) {
            const double vm2 = fetch(cur, I, idx[i], -2, n, s, per);
            const double vp2 = fetch(cur, I, idx[i], +2, n, s, per);
            const double ddm = (vI - 2.0 * vm1 + vm2) / (h * h);
            const double dd0 = (vp1 - 2.0 * vI + vm1) / (h * h);
            const double ddp = (vp2 - 2.0 * vp1 + vI) / (h * h);
            dm += 0.5 * h * smaller_magnitude(ddm, dd0);
            dp -= 0.5 * h * smaller_magnitude(dd0, ddp);
          }
          const double pbar = 0.5 * (dm + dp);
          drift += pbar * fbuf[I * d + i];
          for (int j = 0; j < ma; ++j) A[j] += pbar * gbuf[(I * d + i) * ma + j];
          for (int j = 0; j < mb; ++j) B[j] += pbar * hbuf[(I * d + i) * mb + j];
          dissip += alpha[i] * 0.5 * (dp - dm);
        }

        double H = drift;
        if (kind == HamiltonianKind::worst_case || cache.empty() || cache[I].infeasible) {
          for (int j = 0; j < ma; ++j)
            H += std::max(A[j] * ego_box.lower[j], A[j] * ego_box.upper[j]);
          for (int j = 0; j < mb; ++j)
            H += std::min(B[j] * contender_box.lower[j], B[j] * contender_box.upper[j]);
        } else {
          double outer = std::numeric_limits<double>::infinity();
          for (const auto& cand : cache[I].candidates) {
            double inner = -std::numeric_limits<double>::infinity();
            for (const auto& ua : cand.ego_vertices) {
              double v = 0.0;
              for (int j = 0; j < ma; ++j) v += A[j] * ua[j];
              inner = std::max(inner, v);
            }
            for (int j = 0; j < mb; ++j) inner += B[j] * cand.u_ctd[j];
            outer = std::min(outer, inner);
          }
          H += outer;
        }

        // Restricted update: dissipation is part of the numerical Hamiltonian
        // (W_tau = min(0, H) marched forward in pseudo-time needs +dissip to be
        // monotone under the CFL bound), and the outer min keeps every slice
        // pointwise nonincreasing.
        next[Iu] = vI + dt * std::min(0.0, H + dissip);
      }
    });
    sync_periodic(grid, next);
    for (std::int64_t I = 0; I < N; ++I) {
      if (!std::isfinite(next[I])) {
        int idx[8];
        grid.multi_index(I, idx);
        std::ostringstream msg;
        msg << "solve: non-finite value at step " << step << " (t=" << -(horizon * step / nsteps)
            << "), node";
        for (int i = 0; i < d; ++i) msg << " " << idx[i];
        msg << ", coords";
        State x = grid.node(I);
        for (int i = 0; i < d; ++i) msg << " " << x[i];
        throw NumericalError(msg.str());
      }
    }
    field.times.push_back(-(horizon * static_cast<double>(step) / static_cast<double>(nsteps)));
    field.values.push_back(next);
    std::swap(cur, next);
  }
  field.check();
  return field;
}

double dissipation_band(const ValueField& field) {
  double band = 0.0;
  for (std::size_t i = 0; i < field.dissipation.size(); ++i) {
    band += field.dissipation[i] * field.grid.spacing[i];
  }
  return 2.0 * band;
}

}  // namespace reachsafe
