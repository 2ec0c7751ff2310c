#pragma once

#include <iosfwd>
#include <numbers>
#include <vector>

#include "cwing/geometry.hpp"

namespace cwing {

/// One outer-boundary arc, parameterized by polar angle about O on
/// [theta_lo, theta_hi] with theta_hi > theta_lo.
struct ArcSegment {
  ConicCurve conic;
  double theta_lo = 0.0;
  double theta_hi = 0.0;
};

/// The elliptic region Omega: a curved triangle with vertex O, straight
/// sides on the symmetry axis (theta = pi) and the wing ray
/// (theta = pi/2 + beta), and a C^1 outer boundary of conic arcs.
struct DomainSpec {
  double beta = 0.0;
  double theta_wing = 0.0;  ///< pi/2 + beta
  double wing_extent = 0.0; ///< |OP4|
  double sym_extent = 0.0;  ///< |OP2| (or |OP7| in the reflected regime)
  std::vector<ArcSegment> outer_arcs;  ///< ordered by decreasing theta from pi
  std::map<std::string, Vector2d> corners;

  /// Radial extent of Omega along polar angle theta.
  double radius(double theta) const;
  /// Radius together with its first and second theta-derivatives
  /// (piecewise-analytic; at an arc junction the higher-theta arc is used).
  void radius3(double theta, double& R, double& dR, double& d2R) const;
};

DomainSpec build_domain(const RegimeReport& report);

enum class NodeTag { Interior, Wing, Sym, Degenerate, CornerO };

std::string tag_name(NodeTag t);

/// Structured polar fan grid: s in [0,1] sweeps the angle from the symmetry
/// side (s=0) to the wing side (s=1); t in [0,1] is the radial coordinate
/// with t=0 the corner O and t=1 the degenerate (sonic) boundary.
struct Grid {
  int Ns = 0, Nt = 0;
  double stretch = 1.0;
  DomainSpec domain;
  std::vector<double> s;    ///< size Ns
  std::vector<double> t;    ///< size Nt
  std::vector<Vector2d> xi; ///< size Ns*Nt, index i*Nt + j
  std::vector<NodeTag> tags;

  int idx(int i, int j) const { return i * Nt + j; }
  double theta(double s_val) const {
    return std::numbers::pi - s_val * (std::numbers::pi / 2 - domain.beta);
  }
};

Grid generate_grid(const DomainSpec& spec, int Ns, int Nt, double stretch = 1.05);

/// CSV dump with columns (i, j, xi1, xi2, tag).
void write_grid_csv(const Grid& grid, std::ostream& os);

}  // namespace cwing
