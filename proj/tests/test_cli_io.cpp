#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "cwing/cli_io.hpp"

using namespace cwing;
namespace {
constexpr double kPi = std::numbers::pi;

const char* kMinimal = "q_inf = 2\nalpha_deg = 30\nsigma_rad = 0.5\nbeta_rad = 0.1\n";

RegimeReport ref_report(double beta) {
  return classify_regime(normalize_freestream(2.0, kPi / 6), {0.5, beta});
}
}  // namespace

TEST_CASE("minimal config gets full defaults") {
  const RunConfig cfg = parse_config(kMinimal);
  CHECK(cfg.q_inf == 2.0);
  CHECK(cfg.alpha == doctest::Approx(kPi / 6).epsilon(1e-15));
  CHECK(cfg.sigma == 0.5);
  CHECK(cfg.beta == 0.1);
  CHECK(cfg.gas.a == 1.0);
  CHECK(cfg.gas.rho_star == 1.0);
  CHECK(cfg.Ns == 65);
  CHECK(cfg.Nt == 65);
  CHECK(cfg.stretch == 1.05);
  CHECK(cfg.solver.eps_schedule == std::vector<double>{0.2, 0.1, 0.05, 0.025, 0.0125});
  CHECK(cfg.solver.mu_step0 == 0.1);
  CHECK(cfg.emit_svg);
}

TEST_CASE("config validation names the key and the constraint") {
  auto message = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const std::invalid_argument& e) {
      return std::string(e.what());
    }
    return std::string("(no error)");
  };
  CHECK(message("q_inf = 0.9\nalpha_deg = 30\nsigma_rad = 0.5\nbeta_rad = 0.1\n")
            .find("q_inf > 1") != std::string::npos);
  CHECK(message("q_inf = 2\nalpha_deg = 30\nsigma_rad = 0.5\nbeta_deg = 95\n")
            .find("beta") != std::string::npos);
  CHECK(message("q_inf = 2\nalpha_deg = 30\nsigma_rad = 0.5\nbeta_deg = 95\n")
            .find("0 <= beta < pi/2") != std::string::npos);
  CHECK(message(std::string(kMinimal) + "typo_key = 1\n").find("unknown key") !=
        std::string::npos);
  CHECK(message("q_inf = 2\nalpha_deg = 30\nalpha_rad = 0.5\nsigma_rad = 0.5\nbeta_rad = 0\n")
            .find("mutually exclusive") != std::string::npos);
  CHECK(message("q_inf = 2\nalpha = 30\nsigma_rad = 0.5\nbeta_rad = 0\n")
            .find("unknown key") != std::string::npos);  // angle without unit suffix
  CHECK(message("q_inf = 2\nsigma_rad = 0.5\nbeta_rad = 0\n").find("alpha") !=
        std::string::npos);
}

TEST_CASE("config sections, comments, and schedules parse") {
  const RunConfig cfg = parse_config(
      "q_inf = 2  # supersonic\nalpha_deg = 30\nsigma_rad = 0.5\nbeta_rad = 0.1\n"
      "[gas]\na = 2.0\nrho_star = 0.5\n"
      "[grid]\nNs = 17\nNt = 33\nstretch = 1.1\n"
      "[solver]\neps_schedule = [0.1, 0.05]\nnewton_tol = 1e-9\n"
      "[outputs]\ndir = \"out\"\nsvg = false\n");
  CHECK(cfg.gas.a == 2.0);
  CHECK(cfg.gas.rho_star == 0.5);
  CHECK(cfg.Ns == 17);
  CHECK(cfg.Nt == 33);
  CHECK(cfg.stretch == 1.1);
  CHECK(cfg.solver.eps_schedule == std::vector<double>{0.1, 0.05});
  CHECK(cfg.solver.newton.tol == 1e-9);
  CHECK(cfg.output_dir == "out");
  CHECK(!cfg.emit_svg);
  CHECK_THROWS_WITH_AS(parse_config(std::string(kMinimal) +
                                    "[solver]\neps_schedule = [0.05, 0.1]\n"),
                       doctest::Contains("strictly decreasing"), std::invalid_argument);
}

TEST_CASE("geometry SVG is deterministic with dense labeled polylines") {
  const RegimeReport report = ref_report(0.1);
  std::ostringstream a, b;
  emit_geometry_svg(report, a);
  emit_geometry_svg(report, b);
  CHECK(a.str() == b.str());

  const std::string svg = a.str();
  CHECK(svg.find("<svg") != std::string::npos);
  // Every cone section present as a dense polyline.
  for (const char* label : {"C_inf", "C_sigma"}) {
    CHECK(svg.find(label) != std::string::npos);
  }
  size_t pos = 0;
  int dense = 0;
  while ((pos = svg.find("points=\"", pos)) != std::string::npos) {
    const size_t end = svg.find('"', pos + 8);
    const std::string body = svg.substr(pos + 8, end - pos - 8);
    const long n = std::count(body.begin(), body.end(), ',');
    if (n >= 256) ++dense;
    pos = end;
  }
  CHECK(dense >= 2);  // C_inf and C_sigma sampled with >= 256 points each
  for (const char* label : {"P1", "P2", "P4", ">O<"}) {
    CHECK(svg.find(label) != std::string::npos);
  }
}

TEST_CASE("planar-shock SVG carries the reflected topology labels") {
  const RegimeReport sub = ref_report(0.1);
  CHECK(sub.points.at("P1")[1] > 1e-6);  // P1 strictly above the axis

  const RegimeReport planar = ref_report(*sub.beta_c);
  REQUIRE(planar.regime == Regime::PlanarShock);
  std::ostringstream ss;
  emit_geometry_svg(planar, ss);
  const std::string svg = ss.str();
  CHECK(svg.find("PlanarShock") != std::string::npos);
  // The planar shock line is tangent to both cones at the xi1-axis point.
  REQUIRE(planar.s_ob);
  REQUIRE(planar.c_inf);
  REQUIRE(planar.c_sigma);
  const Vector2d p1 = planar.points.at("P1");
  CHECK(std::abs(p1[1]) < 1e-9);
  CHECK(std::abs(planar.s_ob->eval(p1)) < 1e-9);
  CHECK(std::abs(planar.c_inf->residual(p1)) < 1e-9);
  CHECK(std::abs(planar.c_sigma->residual(p1)) < 1e-9);
}

TEST_CASE("field CSV has the pinned header and one row per node") {
  const DomainSpec spec = build_domain(ref_report(0.1));
  const Grid grid = generate_grid(spec, 65, 65, 1.05);
  SolutionField field;
  field.Ns = field.Nt = 65;
  const size_t n = grid.xi.size();
  field.psi.assign(n, 0.0);
  field.w.assign(n, 1.0);
  field.phi.assign(n, 1.0);
  field.velocity.assign(n, Vector3d::Zero());
  field.c.assign(n, 1.0);
  field.rho.assign(n, 1.0);
  field.L2.assign(n, 0.0);
  std::ostringstream ss;
  emit_field_csv(field, grid, ss);
  std::istringstream in(ss.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "i,j,xi1,xi2,psi,w,phi,v1,v2,v3,c,rho,L2,tag");
  int rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 4225);
}

TEST_CASE("report JSON round-trips bit-exactly") {
  for (double beta : {0.0, 0.1, 0.4, 0.7}) {
    const RegimeReport r = ref_report(beta);
    const std::string text = report_json(r);
    const RegimeReport back = report_from_json(text);
    CHECK(text == report_json(back));  // serialization fixed point
    CHECK(back.regime == r.regime);
    CHECK(back.fs.q_inf == r.fs.q_inf);
    CHECK(back.fs.v3_inf == r.fs.v3_inf);
    CHECK(back.alpha0 == r.alpha0);
    CHECK(back.sigma0.has_value() == r.sigma0.has_value());
    if (r.beta_c) CHECK(*back.beta_c == *r.beta_c);
    if (r.beta0) CHECK(*back.beta0 == *r.beta0);
    REQUIRE(back.points.size() == r.points.size());
    for (const auto& [name, p] : r.points) {
      CHECK(back.points.at(name)[0] == p[0]);
      CHECK(back.points.at(name)[1] == p[1]);
    }
    if (r.c_sigma) {
      CHECK(back.c_sigma->p1 == r.c_sigma->p1);
      CHECK(back.c_sigma->p0 == r.c_sigma->p0);
    }
    if (r.state) CHECK(back.state->v3 == r.state->v3);
    if (r.resulting) CHECK(back.resulting->v3R == r.resulting->v3R);
    CHECK(back.diagnostic == r.diagnostic);
  }
}
