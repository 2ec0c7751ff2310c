#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <optional>

#include "cwing/mesh.hpp"

namespace cwing {

using Eigen::VectorXd;
using SparseMat = Eigen::SparseMatrix<double>;

struct NewtonOptions {
  int max_iter = 30;
  double tol = 1e-10;      ///< residual infinity-norm
  int max_halvings = 20;   ///< damping by step halving
};

struct SolverConfig {
  double mu_step0 = 0.1;
  double mu_step_min = 1e-3;
  std::vector<double> eps_schedule{0.2, 0.1, 0.05, 0.025, 0.0125};
  NewtonOptions newton;
};

/// Boundary treatment: Mixed is the physical problem (Dirichlet on the
/// degenerate arc, slip via reflection on the straight sides, D phi = 0 at
/// O); AllDirichlet pins every boundary node, used for manufactured runs.
enum class BCMode { Mixed, AllDirichlet };

/// One linearized stencil contribution: the coefficient of unknown `col`
/// in D psi (g) and in the Hessian of psi (hxx, hxy, hyy) at this row's node.
struct StencilEntry {
  int col = 0;
  Vector2d g = Vector2d::Zero();
  double hxx = 0.0, hxy = 0.0, hyy = 0.0;
  double s1 = 0.0;     ///< tr(h) + xi^T h xi (coefficient in the linear part)
  double gdotxi = 0.0; ///< g . xi
};

enum class RowKind { Pde, Dirichlet, Corner };

struct Row {
  RowKind kind = RowKind::Pde;
  int i = 0, j = 0;
  double scale = 1.0;  ///< row equilibration factor (positive)
  Vector2d xi = Vector2d::Zero();
  std::vector<StencilEntry> entries;  ///< PDE rows
  std::vector<std::pair<int, double>> linear;  ///< Corner/Dirichlet rows
};

/// Precomputed curvilinear finite-difference discretization on the fan grid.
/// One unknown per physical node: index 0 is the corner O; node (i, j>=1)
/// maps to 1 + i*(Nt-1) + (j-1).
class Discretization {
 public:
  Discretization(const Grid& grid, BCMode mode);

  const Grid& grid() const { return *grid_; }
  BCMode mode() const { return mode_; }
  int num_unknowns() const { return n_; }
  int unknown_of(int i, int j) const { return j == 0 ? 0 : 1 + i * (nt_ - 1) + (j - 1); }
  const std::vector<Row>& rows() const { return rows_; }

  /// Dirichlet data in the psi variable per unknown (AllDirichlet mode).
  void set_dirichlet_data(const std::function<double(const Vector2d&)>& psi_bc);

  /// Nonlinear residual of the psi-equation; `parallel` selects the OpenMP
  /// assembly, otherwise the serial reference loop runs.
  VectorXd residual(const VectorXd& psi, double mu, double eps, bool parallel = true) const;

  /// Analytic Jacobian of residual().
  SparseMat jacobian(const VectorXd& psi, double mu, double eps, bool parallel = true) const;

  /// Dirichlet value in psi for the degenerate boundary at viscosity eps.
  static double psi_boundary(double eps) { return std::acosh(1.0 + eps); }

  /// Gradient stencils for field reconstruction, defined at every node with
  /// j >= 1 (one-sided in t on the degenerate boundary).
  const std::vector<std::vector<std::pair<int, Vector2d>>>& gradient_stencils() const {
    return grad_;
  }

  /// Direct solve of the mu=0 linear equation in phi on the same stencils.
  /// Returns phi per unknown.
  VectorXd direct_linear_phi(double eps) const;

 private:
  const Grid* grid_;
  BCMode mode_;
  int ns_, nt_, n_;
  std::vector<Row> rows_;
  std::vector<std::vector<std::pair<int, Vector2d>>> grad_;  ///< per unknown
  std::optional<std::function<double(const Vector2d&)>> psi_bc_;

  void residual_row(const Row& row, const VectorXd& psi, double mu, double eps,
                    double& f) const;
  void jacobian_row(const Row& row, const VectorXd& psi, double mu, double eps,
                    std::vector<Eigen::Triplet<double>>& out) const;
};

struct NewtonResult {
  bool converged = false;
  VectorXd psi;
  std::vector<double> residual_history;
  std::string failure;
};

NewtonResult newton_solve(const Discretization& disc, double mu, double eps,
                          const VectorXd& psi0, const NewtonOptions& opts = {});

struct ContinuationStage {
  double mu = 0.0;
  int newton_iters = 0;
  double final_residual = 0.0;
  double ellipticity_margin = 0.0;  ///< min(phi - sqrt(1+|xi|^2))
};

struct ContinuationResult {
  bool completed = false;
  VectorXd psi;  ///< at mu = 1 when completed
  std::vector<ContinuationStage> trace;
  std::string failure;
};

ContinuationResult continuation_solve(const Discretization& disc, double eps,
                                      const SolverConfig& config, const VectorXd* warm = nullptr);

struct SolutionField {
  int Ns = 0, Nt = 0;
  double mu = 1.0, eps = 0.0;
  std::vector<double> psi, w, phi;         ///< per grid node i*Nt+j
  std::vector<Vector3d> velocity;
  std::vector<double> c, rho, L2;
  double ellipticity_margin = 0.0;
  std::vector<ContinuationStage> trace;
};

SolutionField reconstruct_fields(const Discretization& disc, const VectorXd& psi, double mu,
                                 double eps, const GasConstants& gas = {});

struct SweepResult {
  std::vector<SolutionField> stages;       ///< one per completed eps
  std::vector<double> phi_extrapolated;    ///< linear-in-eps estimate, per node
  bool complete = false;                   ///< all eps stages finished
  std::string failure;
};

SweepResult epsilon_sweep(const Discretization& disc, const SolverConfig& config,
                          const GasConstants& gas = {});

/// Initial guess for the first stage: boundary value plus a small interior
/// bump vanishing on the degenerate boundary.
VectorXd initial_psi(const Discretization& disc, double eps);

}  // namespace cwing
