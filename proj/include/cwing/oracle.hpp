#pragma once

#include "cwing/solver.hpp"

namespace cwing {

/// Exact solution family of the auxiliary w-equation:
/// w^eta(xi) = eta . (xi, 1) / sqrt(1 + |xi|^2), valid for every constant eta.
double exact_w(const Vector3d& eta, const Vector2d& xi);

/// Residual of the continuous w-equation N_mu w = 0 evaluated at w^eta with
/// analytic derivatives; vanishes identically for every (eta, xi, mu).
double w_equation_residual(const Vector3d& eta, const Vector2d& xi, double mu);

enum class EnvelopeDirection { Upper, Lower };

/// One-sided envelope: per-node infimum (Upper) or supremum (Lower) of w^eta
/// over admissible eta, approximated by sampling plus per-node projected
/// coordinate descent. `samples` holds the admissible eta set used for
/// seeding (at least n_samples entries).
struct EnvelopeField {
  std::vector<double> w;          ///< per grid node i*Nt+j
  std::vector<Vector3d> samples;  ///< admissible eta sample set
};

EnvelopeField envelope(const Grid& grid, double eps, const FreeStream& fs,
                       const RegimeReport& report, EnvelopeDirection direction,
                       int n_samples);

struct EnvelopePair {
  std::vector<double> w_plus, w_minus;
  std::vector<Vector3d> samples_plus, samples_minus;
};

/// Builds both envelopes and checks w_minus <= w_plus nodewise.
EnvelopePair make_envelope_pair(const Grid& grid, double eps, const FreeStream& fs,
                                const RegimeReport& report, int n_samples);

struct BoundViolation {
  int i = 0, j = 0;
  double w = 0.0, lo = 0.0, hi = 0.0;
  double margin = 0.0;  ///< signed exceedance beyond the buffered band
};

struct BoundReport {
  int n_lower = 0, n_upper = 0;
  std::vector<BoundViolation> violations;
};

/// Flags nodes where w < w_minus - buffer or w > w_plus + buffer.
BoundReport bound_check(const SolutionField& field, const EnvelopePair& env,
                        double buffer = 5e-3);

struct MmsRow {
  int n = 0;          ///< grid size (n x n)
  double err = 0.0;   ///< infinity-norm error of w against w^eta
};

struct MmsTable {
  std::vector<MmsRow> rows;
  std::vector<double> orders;  ///< log2 ratios between successive rows
};

/// Manufactured-solution harness: all boundary rows replaced by Dirichlet
/// data from w^eta, solved per grid size, errors and observed orders
/// tabulated. Requires w^eta > 1 on the closed domain.
MmsTable mms_convergence(const DomainSpec& spec, const Vector3d& eta, double mu,
                         const std::vector<int>& sizes,
                         const NewtonOptions& opts = {});

}  // namespace cwing
