#include "cwing/solver.hpp"

#include <Eigen/SparseLU>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>

#ifdef CWING_HAVE_OPENMP
#include <omp.h>
#endif

namespace cwing {

namespace {

struct MapDerivs {
  Vector2d x_s, x_t, x_ss, x_st;  // x_tt = 0 for the fan map
  Eigen::Matrix2d Jinv;
};

MapDerivs map_derivs(const Grid& g, int i, double t) {
  const double theta = g.theta(g.s[i]);
  const double tp = -(std::numbers::pi / 2 - g.domain.beta);  // d theta / d s
  double R, Rq, Rqq;
  g.domain.radius3(theta, R, Rq, Rqq);
  const double Rs = Rq * tp, Rss = Rqq * tp * tp;
  const Vector2d d(std::cos(theta), std::sin(theta));
  const Vector2d dp(-d[1], d[0]);

  MapDerivs md;
  md.x_s = t * (Rs * d + R * tp * dp);
  md.x_t = R * d;
  md.x_st = Rs * d + R * tp * dp;
  md.x_ss = t * (Rss * d + 2.0 * Rs * tp * dp - R * tp * tp * d);
  Eigen::Matrix2d J;
  J.col(0) = md.x_s;
  J.col(1) = md.x_t;
  md.Jinv = J.inverse();
  return md;
}

// Nonuniform three-point weights for f' and f'' at the middle node.
void center_t_weights(double hm, double hp, double a[3], double b[3]) {
  a[0] = -hp / (hm * (hm + hp));
  a[1] = (hp - hm) / (hm * hp);
  a[2] = hm / (hp * (hm + hp));
  b[0] = 2.0 / (hm * (hm + hp));
  b[1] = -2.0 / (hm * hp);
  b[2] = 2.0 / (hp * (hm + hp));
}

// Second-order one-sided weights for f' at the first of three nodes.
void onesided_weights(double h1, double h2, double c[3]) {
  c[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2));
  c[1] = (h1 + h2) / (h1 * h2);
  c[2] = -h1 / (h2 * (h1 + h2));
}

}  // namespace

Discretization::Discretization(const Grid& grid, BCMode mode)
    : grid_(&grid), mode_(mode), ns_(grid.Ns), nt_(grid.Nt) {
  n_ = 1 + ns_ * (nt_ - 1);
  const double hs = 1.0 / (ns_ - 1);
  rows_.reserve(n_);

  // Corner row.
  {
    Row row;
    row.i = 0;
    row.j = 0;
    row.xi = Vector2d::Zero();
    if (mode_ == BCMode::AllDirichlet) {
      row.kind = RowKind::Dirichlet;
      row.linear.emplace_back(0, 1.0);
    } else {
      // Average over the rays of the one-sided radial derivative: D phi = 0
      // at O reduces to D psi = 0 there.
      row.kind = RowKind::Corner;
      double c[3];
      onesided_weights(grid.t[1] - grid.t[0], grid.t[2] - grid.t[1], c);
      row.linear.emplace_back(0, c[0]);
      for (int i = 0; i < ns_; ++i) {
        row.linear.emplace_back(unknown_of(i, 1), c[1] / ns_);
        row.linear.emplace_back(unknown_of(i, 2), c[2] / ns_);
      }
    }
    rows_.push_back(std::move(row));
  }

  for (int i = 0; i < ns_; ++i) {
    for (int j = 1; j < nt_; ++j) {
      Row row;
      row.i = i;
      row.j = j;
      row.xi = grid.xi[grid.idx(i, j)];
      const bool dir = (j == nt_ - 1) ||
                       (mode_ == BCMode::AllDirichlet && (i == 0 || i == ns_ - 1));
      if (dir) {
        row.kind = RowKind::Dirichlet;
        row.linear.emplace_back(unknown_of(i, j), 1.0);
        rows_.push_back(std::move(row));
        continue;
      }
      row.kind = RowKind::Pde;

      const MapDerivs md = map_derivs(grid, i, grid.t[j]);
      double a[3], b[3];
      center_t_weights(grid.t[j] - grid.t[j - 1], grid.t[j + 1] - grid.t[j], a, b);

      // Physical sample coordinates of the 3x3 stencil, with ghost points
      // reflected across the straight sides. Using coordinate differences
      // for the second map derivatives keeps the truncation consistent
      // where the outer boundary is only C^1 (the conic-arc junction).
      Vector2d xc[3][3];
      const Vector2d uw(-std::sin(grid.domain.beta), std::cos(grid.domain.beta));
      for (int di = -1; di <= 1; ++di) {
        int im = i + di;
        const bool refl_sym = im < 0;
        const bool refl_wing = im > ns_ - 1;
        if (refl_sym) im = 1;
        if (refl_wing) im = ns_ - 2;
        for (int dj = -1; dj <= 1; ++dj) {
          Vector2d p = grid.xi[grid.idx(im, j + dj)];
          if (refl_sym) p[1] = -p[1];
          if (refl_wing) p = 2.0 * p.dot(uw) * uw - p;
          xc[di + 1][dj + 1] = p;
        }
      }
      Vector2d xss_fd = Vector2d::Zero(), xst_fd = Vector2d::Zero();
      for (int di = -1; di <= 1; ++di) {
        xss_fd += ((di == 0 ? -2.0 : 1.0) / (hs * hs)) * xc[di + 1][1];
        if (di != 0) {
          for (int dj = -1; dj <= 1; ++dj) {
            xst_fd += (di * a[dj + 1] / (2.0 * hs)) * xc[di + 1][dj + 1];
          }
        }
      }

      // Accumulate (c_s, c_t, c_ss, c_st, c_tt) per stencil column, mapping
      // ghost columns by reflection across the straight sides.
      std::map<int, std::array<double, 5>> acc;
      for (int di = -1; di <= 1; ++di) {
        int im = i + di;
        if (im < 0) im = 1;            // reflection across Gamma_sym
        if (im > ns_ - 1) im = ns_ - 2;  // reflection across Gamma_wing
        for (int dj = -1; dj <= 1; ++dj) {
          const int col = unknown_of(im, j + dj);
          auto& w = acc[col];
          if (dj == 0) {
            if (di != 0) w[0] += di / (2.0 * hs);
            w[2] += (di == 0 ? -2.0 : 1.0) / (hs * hs);
          }
          if (di == 0) {
            w[1] += a[dj + 1];
            w[4] += b[dj + 1];
          } else {
            w[3] += di * a[dj + 1] / (2.0 * hs);
          }
        }
      }

      const Eigen::Matrix2d JinvT = md.Jinv.transpose();
      for (const auto& [col, w] : acc) {
        StencilEntry e;
        e.col = col;
        const Vector2d gs(w[0], w[1]);
        e.g = JinvT * gs;
        Eigen::Matrix2d M;
        M(0, 0) = w[2] - e.g.dot(xss_fd);
        M(0, 1) = M(1, 0) = w[3] - e.g.dot(xst_fd);
        M(1, 1) = w[4];
        const Eigen::Matrix2d H = JinvT * M * md.Jinv;
        e.hxx = H(0, 0);
        e.hxy = 0.5 * (H(0, 1) + H(1, 0));
        e.hyy = H(1, 1);
        const double xhx = row.xi[0] * (e.hxx * row.xi[0] + e.hxy * row.xi[1]) +
                           row.xi[1] * (e.hxy * row.xi[0] + e.hyy * row.xi[1]);
        e.s1 = e.hxx + e.hyy + xhx;
        e.gdotxi = e.g.dot(row.xi);
        row.entries.push_back(e);
      }
      // Equilibrate: near-corner rows carry O(1/(h^2 t^2)) coefficients,
      // which would otherwise push the roundoff floor above the Newton
      // tolerance. A positive per-row factor leaves the equation unchanged.
      double s1max = 0.0;
      for (const StencilEntry& e : row.entries) s1max = std::max(s1max, std::abs(e.s1));
      row.scale = std::min(1.0, (1.0 / (hs * hs)) / std::max(s1max, 1e-300));
      rows_.push_back(std::move(row));
    }
  }

  // Gradient stencils for reconstruction (per unknown; corner has D phi = 0).
  grad_.assign(n_, {});
  for (int i = 0; i < ns_; ++i) {
    for (int j = 1; j < nt_; ++j) {
      const int u = unknown_of(i, j);
      const MapDerivs md = map_derivs(grid, i, grid.t[j]);
      const Eigen::Matrix2d JinvT = md.Jinv.transpose();
      std::map<int, std::array<double, 2>> acc;  // (c_s, c_t) per column

      // s-derivative: central with reflection (Mixed); one-sided otherwise.
      if (mode_ == BCMode::Mixed || (i > 0 && i < ns_ - 1)) {
        int il = i - 1, ir = i + 1;
        if (il < 0) il = 1;
        if (ir > ns_ - 1) ir = ns_ - 2;
        acc[unknown_of(il, j)][0] += -1.0 / (2.0 * hs);
        acc[unknown_of(ir, j)][0] += 1.0 / (2.0 * hs);
      } else {
        double c[3];
        onesided_weights(hs, hs, c);
        const int dir = (i == 0) ? 1 : -1;
        for (int k = 0; k < 3; ++k) acc[unknown_of(i + dir * k, j)][0] += dir * c[k];
      }

      // t-derivative: central inside, one-sided on the degenerate boundary.
      if (j < nt_ - 1) {
        double a[3], b[3];
        center_t_weights(grid_->t[j] - grid_->t[j - 1], grid_->t[j + 1] - grid_->t[j], a, b);
        for (int dj = -1; dj <= 1; ++dj) acc[unknown_of(i, j + dj)][1] += a[dj + 1];
      } else {
        double c[3];
        onesided_weights(grid_->t[j] - grid_->t[j - 1], grid_->t[j - 1] - grid_->t[j - 2], c);
        for (int k = 0; k < 3; ++k) acc[unknown_of(i, j - k)][1] += -c[k];
      }

      auto& out = grad_[u];
      for (const auto& [col, gs] : acc) {
        out.emplace_back(col, Vector2d(JinvT * Vector2d(gs[0], gs[1])));
      }
    }
  }
}

void Discretization::set_dirichlet_data(const std::function<double(const Vector2d&)>& psi_bc) {
  psi_bc_ = psi_bc;
}

void Discretization::residual_row(const Row& row, const VectorXd& psi, double mu, double eps,
                                  double& f) const {
  switch (row.kind) {
    case RowKind::Dirichlet: {
      const double bc = (mode_ == BCMode::AllDirichlet && psi_bc_) ? (*psi_bc_)(row.xi)
                                                                   : psi_boundary(eps);
      f = psi[row.linear[0].first] - bc;
      return;
    }
    case RowKind::Corner: {
      f = 0.0;
      for (const auto& [col, cf] : row.linear) f += cf * psi[col];
      return;
    }
    case RowKind::Pde:
      break;
  }
  const double q2 = row.xi.squaredNorm();
  const double A = 1.0 + q2;
  Vector2d g = Vector2d::Zero();
  double Hxx = 0, Hxy = 0, Hyy = 0, S1 = 0;
  for (const StencilEntry& e : row.entries) {
    const double v = psi[e.col];
    g += e.g * v;
    Hxx += e.hxx * v;
    Hxy += e.hxy * v;
    Hyy += e.hyy * v;
    S1 += e.s1 * v;
  }
  const double gx = g.dot(row.xi);
  const double m = A * (g.squaredNorm() + gx * gx);
  const Vector2d P = g + gx * row.xi;
  const double S2 = P[0] * (Hxx * P[0] + Hxy * P[1]) + P[1] * (Hxy * P[0] + Hyy * P[1]);
  const double psic = psi[unknown_of(row.i, row.j)];
  const double th = std::tanh(psic);
  f = row.scale * ((1.0 + m) * S1 - mu * A * S2 + 2.0 * (1.0 + (1.0 - mu) * m) * gx +
                   (1.0 + m) * (2.0 + (1.0 - mu) * m) / (A * th));
  if (!std::isfinite(f)) {
    throw std::runtime_error("residual: non-finite value at node (" + std::to_string(row.i) +
                             "," + std::to_string(row.j) + ")");
  }
}

VectorXd Discretization::residual(const VectorXd& psi, double mu, double eps,
                                  bool parallel) const {
  VectorXd f(n_);
#ifdef CWING_HAVE_OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
  for (int r = 0; r < n_; ++r) {
    residual_row(rows_[r], psi, mu, eps, f[r]);
  }
  (void)parallel;
  return f;
}

void Discretization::jacobian_row(const Row& row, const VectorXd& psi, double mu, double eps,
                                  std::vector<Eigen::Triplet<double>>& out) const {
  (void)eps;
  const int r = (row.kind == RowKind::Pde || row.j > 0) ? unknown_of(row.i, row.j) : 0;
  if (row.kind != RowKind::Pde) {
    for (const auto& [col, cf] : row.linear) out.emplace_back(r, col, cf);
    return;
  }
  const double q2 = row.xi.squaredNorm();
  const double A = 1.0 + q2;
  Vector2d g = Vector2d::Zero();
  double Hxx = 0, Hxy = 0, Hyy = 0, S1 = 0;
  for (const StencilEntry& e : row.entries) {
    const double v = psi[e.col];
    g += e.g * v;
    Hxx += e.hxx * v;
    Hxy += e.hxy * v;
    Hyy += e.hyy * v;
    S1 += e.s1 * v;
  }
  const double gx = g.dot(row.xi);
  const double m = A * (g.squaredNorm() + gx * gx);
  const Vector2d P = g + gx * row.xi;
  const Vector2d HP(Hxx * P[0] + Hxy * P[1], Hxy * P[0] + Hyy * P[1]);
  const double S2 = P.dot(HP);
  const int center = unknown_of(row.i, row.j);
  const double psic = psi[center];
  const double th = std::tanh(psic);
  const double sh = std::sinh(psic);
  const double Z = (1.0 + m) * (2.0 + (1.0 - mu) * m);

  for (const StencilEntry& e : row.entries) {
    const double dm = A * 2.0 * (g.dot(e.g) + gx * e.gdotxi);
    const Vector2d dP = e.g + e.gdotxi * row.xi;
    const Vector2d dHP(e.hxx * P[0] + e.hxy * P[1], e.hxy * P[0] + e.hyy * P[1]);
    const double dS2 = P.dot(dHP) + 2.0 * dP.dot(HP);
    const double dZ = dm * (2.0 + (1.0 - mu) * m) + (1.0 + m) * (1.0 - mu) * dm;
    double df = (1.0 + m) * e.s1 + dm * S1 - mu * A * dS2 +
                2.0 * (1.0 + (1.0 - mu) * m) * e.gdotxi + 2.0 * (1.0 - mu) * dm * gx +
                dZ / (A * th);
    if (e.col == center) {
      const double zero_order = -Z / (A * sh * sh);
      if (!(zero_order < 0.0)) {
        throw std::logic_error("jacobian: zero-order diagonal term not negative");
      }
      df += zero_order;
    }
    out.emplace_back(r, e.col, row.scale * df);
  }
}

SparseMat Discretization::jacobian(const VectorXd& psi, double mu, double eps,
                                   bool parallel) const {
  std::vector<Eigen::Triplet<double>> trips;
#ifdef CWING_HAVE_OPENMP
  if (parallel) {
    std::vector<std::vector<Eigen::Triplet<double>>> buf;
#pragma omp parallel
    {
#pragma omp single
      buf.resize(omp_get_num_threads());
#pragma omp for schedule(static)
      for (int r = 0; r < n_; ++r) {
        jacobian_row(rows_[r], psi, mu, eps, buf[omp_get_thread_num()]);
      }
    }
    for (auto& b : buf) trips.insert(trips.end(), b.begin(), b.end());
  } else
#endif
  {
    (void)parallel;
    for (int r = 0; r < n_; ++r) jacobian_row(rows_[r], psi, mu, eps, trips);
  }
  SparseMat J(n_, n_);
  J.setFromTriplets(trips.begin(), trips.end());
  return J;
}

VectorXd Discretization::direct_linear_phi(double eps) const {
  std::vector<Eigen::Triplet<double>> trips;
  VectorXd rhs = VectorXd::Zero(n_);
  for (int r = 0; r < n_; ++r) {
    const Row& row = rows_[r];
    switch (row.kind) {
      case RowKind::Pde:
        for (const StencilEntry& e : row.entries) trips.emplace_back(r, e.col, e.s1);
        break;
      case RowKind::Corner:
        for (const auto& [col, cf] : row.linear) trips.emplace_back(r, col, cf);
        break;
      case RowKind::Dirichlet: {
        trips.emplace_back(r, row.linear[0].first, 1.0);
        const double A = 1.0 + row.xi.squaredNorm();
        double w_bc = 1.0 + eps;
        if (mode_ == BCMode::AllDirichlet && psi_bc_) w_bc = std::cosh((*psi_bc_)(row.xi));
        rhs[r] = std::sqrt(A) * w_bc;
        break;
      }
    }
  }
  SparseMat M(n_, n_);
  M.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<SparseMat> lu;
  lu.compute(M);
  if (lu.info() != Eigen::Success) {
    throw std::runtime_error("direct_linear_phi: factorization failed");
  }
  return lu.solve(rhs);
}

VectorXd initial_psi(const Discretization& disc, double eps) {
  const Grid& g = disc.grid();
  const double base = Discretization::psi_boundary(eps);
  VectorXd psi(disc.num_unknowns());
  psi[0] = base + 0.1 * eps;
  for (int i = 0; i < g.Ns; ++i) {
    for (int j = 1; j < g.Nt; ++j) {
      psi[disc.unknown_of(i, j)] = base + 0.1 * eps * (1.0 - g.t[j]);
    }
  }
  return psi;
}

NewtonResult newton_solve(const Discretization& disc, double mu, double eps,
                          const VectorXd& psi0, const NewtonOptions& opts) {
  NewtonResult res;
  res.psi = psi0;
  const double floor = 0.5 * Discretization::psi_boundary(eps);
  const auto clamp = [&](VectorXd& p) {
    for (int k = 0; k < p.size(); ++k) p[k] = std::max(p[k], floor);
  };
  clamp(res.psi);

  VectorXd f;
  try {
    f = disc.residual(res.psi, mu, eps);
  } catch (const std::exception& e) {
    res.failure = e.what();
    return res;
  }
  double fn = f.lpNorm<Eigen::Infinity>();
  res.residual_history.push_back(fn);

  for (int it = 0; it < opts.max_iter; ++it) {
    if (fn < opts.tol) {
      res.converged = true;
      return res;
    }
    SparseMat J = disc.jacobian(res.psi, mu, eps);
    Eigen::SparseLU<SparseMat> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success) {
      res.failure = "Jacobian factorization failed";
      return res;
    }
    const VectorXd delta = lu.solve(-f);
    // Backward-error normalization: near-corner rows carry O(h^-4) entries.
    const double scale =
        J.coeffs().abs().maxCoeff() * delta.lpNorm<Eigen::Infinity>() +
        f.lpNorm<Eigen::Infinity>();
    const double lin_res = (J * delta + f).lpNorm<Eigen::Infinity>() / std::max(scale, 1e-300);
    if (!(lin_res < 1e-12)) {
      res.failure = "linear solve residual above 1e-12";
      return res;
    }

    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h <= opts.max_halvings; ++h, lambda *= 0.5) {
      VectorXd trial = res.psi + lambda * delta;
      clamp(trial);
      VectorXd ft;
      try {
        ft = disc.residual(trial, mu, eps);
      } catch (const std::exception&) {
        continue;
      }
      const double ftn = ft.lpNorm<Eigen::Infinity>();
      if (ftn < fn * (1.0 - 1e-4 * lambda) || ftn < opts.tol) {
        res.psi = std::move(trial);
        f = std::move(ft);
        fn = ftn;
        accepted = true;
        break;
      }
    }
    res.residual_history.push_back(fn);
    if (!accepted) {
      res.failure = "line search failed to reduce the residual";
      return res;
    }
  }
  if (fn < opts.tol) {
    res.converged = true;
  } else {
    res.failure = "Newton did not converge within the iteration budget";
  }
  return res;
}

namespace {
double ellipticity_margin(const Discretization& disc, const VectorXd& psi) {
  const Grid& g = disc.grid();
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.Ns; ++i) {
    for (int j = 0; j < g.Nt; ++j) {
      const int u = disc.unknown_of(i, j);
      const double A = 1.0 + g.xi[g.idx(i, j)].squaredNorm();
      margin = std::min(margin, std::sqrt(A) * (std::cosh(psi[u]) - 1.0));
    }
  }
  return margin;
}
}  // namespace

ContinuationResult continuation_solve(const Discretization& disc, double eps,
                                      const SolverConfig& config, const VectorXd* warm) {
  ContinuationResult res;
  VectorXd psi = warm ? *warm : initial_psi(disc, eps);

  NewtonResult nr = newton_solve(disc, 0.0, eps, psi, config.newton);
  if (!nr.converged) {
    res.failure = "mu=0 stage failed: " + nr.failure;
    return res;
  }
  psi = nr.psi;
  res.trace.push_back({0.0, static_cast<int>(nr.residual_history.size()) - 1,
                       nr.residual_history.back(), ellipticity_margin(disc, psi)});

  double mu = 0.0, step = config.mu_step0;
  while (mu < 1.0) {
    const double mu_try = std::min(1.0, mu + step);
    nr = newton_solve(disc, mu_try, eps, psi, config.newton);
    if (nr.converged) {
      mu = mu_try;
      psi = nr.psi;
      res.trace.push_back({mu, static_cast<int>(nr.residual_history.size()) - 1,
                           nr.residual_history.back(), ellipticity_margin(disc, psi)});
    } else {
      step *= 0.5;
      if (step < config.mu_step_min) {
        res.failure = "continuation step underflow at mu=" + std::to_string(mu) + ": " +
                      nr.failure;
        return res;
      }
    }
  }
  res.completed = true;
  res.psi = std::move(psi);
  return res;
}

SolutionField reconstruct_fields(const Discretization& disc, const VectorXd& psi, double mu,
                                 double eps, const GasConstants& gas) {
  const Grid& g = disc.grid();
  SolutionField sf;
  sf.Ns = g.Ns;
  sf.Nt = g.Nt;
  sf.mu = mu;
  sf.eps = eps;
  const int nn = g.Ns * g.Nt;
  sf.psi.resize(nn);
  sf.w.resize(nn);
  sf.phi.resize(nn);
  sf.velocity.resize(nn);
  sf.c.resize(nn);
  sf.rho.resize(nn);
  sf.L2.resize(nn);

  // Potential per unknown for the gradient stencils.
  VectorXd phi_u(disc.num_unknowns());
  for (int i = 0; i < g.Ns; ++i) {
    for (int j = 0; j < g.Nt; ++j) {
      const int u = disc.unknown_of(i, j);
      const double A = 1.0 + g.xi[g.idx(i, j)].squaredNorm();
      phi_u[u] = std::sqrt(A) * std::cosh(psi[u]);
    }
  }

  sf.ellipticity_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.Ns; ++i) {
    for (int j = 0; j < g.Nt; ++j) {
      const int k = g.idx(i, j);
      const int u = disc.unknown_of(i, j);
      const Vector2d& xi = g.xi[k];
      const double A = 1.0 + xi.squaredNorm();
      sf.psi[k] = psi[u];
      sf.w[k] = std::cosh(psi[u]);
      sf.phi[k] = std::sqrt(A) * sf.w[k];
      Vector2d dphi = Vector2d::Zero();
      for (const auto& [col, gv] : disc.gradient_stencils()[u]) dphi += gv * phi_u[col];
      const Vector3d v(dphi[0], dphi[1], sf.phi[k] - dphi.dot(xi));
      const double c2 = v.squaredNorm() - 1.0;
      if (!(c2 > 0.0)) {
        throw std::runtime_error("reconstruct_fields: non-positive c^2 at node (" +
                                 std::to_string(i) + "," + std::to_string(j) + ")");
      }
      sf.velocity[k] = v;
      sf.c[k] = std::sqrt(c2);
      sf.rho[k] = gas.a / sf.c[k];
      sf.L2[k] = (c2 + 1.0 - sf.phi[k] * sf.phi[k] / A) / c2;
      sf.ellipticity_margin = std::min(sf.ellipticity_margin, sf.phi[k] - std::sqrt(A));
    }
  }
  return sf;
}

SweepResult epsilon_sweep(const Discretization& disc, const SolverConfig& config,
                          const GasConstants& gas) {
  SweepResult res;
  const VectorXd* warm = nullptr;
  VectorXd prev;
  for (double eps : config.eps_schedule) {
    ContinuationResult cr = continuation_solve(disc, eps, config, warm);
    if (!cr.completed) {
      res.failure = "eps=" + std::to_string(eps) + ": " + cr.failure;
      break;
    }
    SolutionField sf = reconstruct_fields(disc, cr.psi, 1.0, eps, gas);
    sf.trace = cr.trace;
    res.stages.push_back(std::move(sf));
    prev = std::move(cr.psi);
    warm = &prev;
  }
  res.complete = res.stages.size() == config.eps_schedule.size();

  if (res.stages.size() >= 2) {
    const SolutionField& last = res.stages.back();
    const SolutionField& before = res.stages[res.stages.size() - 2];
    const double e1 = last.eps, e0 = before.eps;
    res.phi_extrapolated.resize(last.phi.size());
    for (size_t k = 0; k < last.phi.size(); ++k) {
      res.phi_extrapolated[k] =
          last.phi[k] + (last.phi[k] - before.phi[k]) * e1 / (e0 - e1);
    }
  } else if (res.stages.size() == 1) {
    res.phi_extrapolated = res.stages.back().phi;
  }
  return res;
}

}  // namespace cwing
