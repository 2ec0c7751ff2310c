#pragma once

#include <iosfwd>
#include <string>

#include "cwing/oracle.hpp"

namespace cwing {

/// Fully defaulted run parameters; angles stored in radians.
struct RunConfig {
  double q_inf = 0.0;
  double alpha = 0.0;
  double sigma = 0.0;
  double beta = 0.0;
  GasConstants gas;
  int Ns = 65, Nt = 65;
  double stretch = 1.05;
  SolverConfig solver;
  std::string output_dir = ".";
  bool emit_svg = true, emit_csv = true, emit_json = true;
};

/// Strict TOML-subset parser: [section] headers, key = value lines with
/// numbers, strings, booleans, and flat numeric arrays. Unknown keys and
/// out-of-range values raise std::invalid_argument naming the key and the
/// violated constraint. Angles require an explicit _rad or _deg suffix.
RunConfig parse_config(const std::string& text);

/// Deterministic figure of the exterior construction: axes, boundary rays,
/// Mach-cone sections as sampled polylines (>= 256 points each), shock
/// lines, and labeled key points.
void emit_geometry_svg(const RegimeReport& report, std::ostream& os);

/// CSV with header i,j,xi1,xi2,psi,w,phi,v1,v2,v3,c,rho,L2,tag and one row
/// per grid node, 17 significant digits.
void emit_field_csv(const SolutionField& field, const Grid& grid, std::ostream& os);

/// JSON serialization of the classification report, keys matching the
/// field names, doubles at 17 significant digits.
std::string report_json(const RegimeReport& report);
void emit_report_json(const RegimeReport& report, std::ostream& os);

/// Inverse of report_json; used for round-trip validation.
RegimeReport report_from_json(const std::string& text);

/// Command dispatch for the cwing tool; returns the process exit code
/// (0 success, 1 validation error, 2 solver failure).
int run_cli(int argc, const char* const* argv);

}  // namespace cwing
