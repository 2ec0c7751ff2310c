#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cwing/gas.hpp"
#include "cwing/shock_polar.hpp"

namespace cwing {

using Eigen::Vector2d;
using Eigen::Vector3d;

/// Sweep angle sigma and anhedral angle beta of the conical wing.
struct WingAngles {
  double sigma = 0.0;  ///< in (0, pi/2)
  double beta = 0.0;   ///< in [0, pi/2)
};

/// Orthonormal frame adapted to the wing: e_i normal to the wing surface,
/// e_j along the leading edge, e_k = e_i x e_j.
struct WingBasis {
  Vector3d ei, ej, ek;
};

/// Uniform state behind the attached oblique shock, outside the Mach cone.
struct DownstreamUniform {
  double v1 = 0.0, v2 = 0.0, v3 = 0.0;
  double c = 0.0;        ///< sound speed, sqrt(v1^2+v2^2+v3^2 - 1)
  double q_j = 0.0;      ///< downstream normal-plane speed along e_k
  double q_tilde = 0.0;  ///< upstream normal-plane speed
  double theta_n = 0.0;  ///< normal-plane deflection angle

  Vector3d velocity() const { return {v1, v2, v3}; }
};

/// Uniform state behind the reflected shock (v2 = 0 by symmetry).
struct ResultingUniform {
  double v1R = 0.0, v3R = 0.0;
  double cR = 0.0;
  double q_tilde_sigma = 0.0;  ///< speed perpendicular to the shock-intersection line
  double theta_n_prime = 0.0;  ///< deflection in the perpendicular plane
  double q_jR = 0.0;           ///< downstream normal-plane speed

  Vector3d velocity() const { return {v1R, 0.0, v3R}; }
};

/// Mach-cone curve in the (xi1, xi2)-plane, stored as the linear form
/// l(xi) = p1 xi1 + p2 xi2 + p0 of the equation l(xi)^2 = 1 + |xi|^2.
struct ConicCurve {
  double p1 = 0.0, p2 = 0.0, p0 = 0.0;

  double ell(const Vector2d& xi) const { return p1 * xi[0] + p2 * xi[1] + p0; }
  /// l(xi)^2 - (1 + |xi|^2); zero on the curve, positive inside.
  double residual(const Vector2d& xi) const {
    const double l = ell(xi);
    return l * l - 1.0 - xi.squaredNorm();
  }
};

/// Shock line n1 xi1 + n2 xi2 + d = 0 in conical coordinates, plus the 3D
/// unit normal of the shock plane (proportional to the velocity jump).
struct ShockLine {
  double n1 = 0.0, n2 = 0.0, d = 0.0;
  Vector3d normal3d = Vector3d::Zero();

  double eval(const Vector2d& xi) const { return n1 * xi[0] + n2 * xi[1] + d; }
};

enum class Regime {
  DeltaWing,      ///< beta = 0
  Subcritical,    ///< 0 < beta < beta_c
  PlanarShock,    ///< beta = beta_c
  Reflected,      ///< beta_c < beta <= beta_0
  BeyondScope,    ///< beta > beta_0
  ShockDetached,  ///< sigma > sigma_0
  Concentration,  ///< alpha >= alpha_0 (or concentration condition fails)
};

std::string regime_name(Regime r);

/// Everything the exterior construction yields for one (alpha, sigma, beta).
struct RegimeReport {
  Regime regime = Regime::Concentration;
  FreeStream fs;
  WingAngles angles;

  double alpha0 = 0.0;
  std::optional<double> sigma0;
  std::optional<double> beta_c;
  std::optional<double> beta0;

  std::map<std::string, Vector2d> points;  ///< P0,P1,P2,P4,P5,P6 (+P7,PR)
  std::optional<ConicCurve> c_inf, c_sigma, c_sigma_prime;
  std::optional<ShockLine> s_ob, s_r;
  std::optional<DownstreamUniform> state;
  std::optional<ResultingUniform> resulting;

  std::string diagnostic;  ///< populated when the regime is a failure label
};

WingBasis wing_basis(const WingAngles& angles);

/// Upstream normal-plane speed and deflection seen by the leading edge.
std::pair<double, double> normal_plane_decomposition(const FreeStream& fs,
                                                     const WingAngles& angles);

DownstreamUniform downstream_state(const FreeStream& fs, const WingAngles& angles);

double critical_alpha(const FreeStream& fs);
double critical_sigma(const FreeStream& fs);

/// True iff c_inf < q_tilde < c_inf / sin(theta_n) (no concentration).
bool concentration_check(const FreeStream& fs, const WingAngles& angles);

ConicCurve mach_cone_inf(const FreeStream& fs);
ConicCurve mach_cone_downstream(const DownstreamUniform& st);

ShockLine shock_line_ob(const FreeStream& fs, const DownstreamUniform& st);

struct TangencyResult {
  Vector2d point;
  double residual;  ///< relative discriminant magnitude
};

/// Double root of the line substituted into the conic; hard error when the
/// discriminant is not (relatively) small.
TangencyResult tangency_point(const ShockLine& line, const ConicCurve& conic);

/// Smallest positive t with xi = t*dir on the conic. Throws when the ray
/// never reaches the curve.
double ray_root(const ConicCurve& conic, const Vector2d& dir);

std::map<std::string, Vector2d> key_points(const FreeStream& fs, const WingAngles& angles,
                                           const DownstreamUniform& st);

double critical_beta_c(const FreeStream& fs, double sigma);

struct ReflectedConstruction {
  ResultingUniform state;
  ShockLine s_r;
  ConicCurve c_sigma_prime;
};

/// State behind the reflected shock for beta > beta_c, built from the
/// oblique-shock intersection line on the symmetry plane.
ReflectedConstruction resulting_shock_state(const FreeStream& fs, const DownstreamUniform& st);

struct Beta0Result {
  bool found = false;
  double beta0 = 0.0;
  std::vector<double> roots;                        ///< all bracketed roots, ascending
  std::vector<std::pair<double, double>> g_trace;   ///< (beta, g(beta)) scan samples
};

/// Smallest beta in (beta_c, pi/2) with beta = arcsin(|OP4|/|OP6|), located
/// by a sign-change scan followed by bisection.
Beta0Result critical_beta_0(const FreeStream& fs, double sigma, double scan_step = 1e-3);

/// Total classification: every failure mode becomes a regime label.
RegimeReport classify_regime(const FreeStream& fs, const WingAngles& angles);

}  // namespace cwing
