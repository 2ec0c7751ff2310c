#include "cwing/cli_io.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace cwing {

namespace {
constexpr double kPi = std::numbers::pi;

std::string fmt17(double x) {
  // "-0" would be read back as integer zero, losing the sign bit.
  if (x == 0.0 && std::signbit(x)) return "-0.0";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string fmt_svg(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", x);
  return buf;
}

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

struct TomlValue {
  enum class Kind { Number, String, Bool, Array } kind = Kind::Number;
  double num = 0.0;
  std::string str;
  bool b = false;
  std::vector<double> arr;
};

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_number(const std::string& key, const std::string& tok) {
  size_t pos = 0;
  double v;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': not a number: '" + tok + "'");
  }
  if (pos != tok.size()) {
    throw std::invalid_argument("config key '" + key + "': trailing characters in '" + tok + "'");
  }
  return v;
}

TomlValue parse_value(const std::string& key, const std::string& raw) {
  TomlValue v;
  if (raw.empty()) throw std::invalid_argument("config key '" + key + "': empty value");
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"') {
      throw std::invalid_argument("config key '" + key + "': unterminated string");
    }
    v.kind = TomlValue::Kind::String;
    v.str = raw.substr(1, raw.size() - 2);
  } else if (raw == "true" || raw == "false") {
    v.kind = TomlValue::Kind::Bool;
    v.b = raw == "true";
  } else if (raw.front() == '[') {
    if (raw.back() != ']') {
      throw std::invalid_argument("config key '" + key + "': unterminated array");
    }
    v.kind = TomlValue::Kind::Array;
    std::string body = raw.substr(1, raw.size() - 2);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) v.arr.push_back(parse_number(key, item));
    }
  } else {
    v.kind = TomlValue::Kind::Number;
    v.num = parse_number(key, raw);
  }
  return v;
}

/// Parses the supported TOML subset into section.key -> value, rejecting
/// anything outside the schema.
std::map<std::string, TomlValue> parse_toml(const std::string& text) {
  static const std::set<std::string> schema{
      "q_inf", "alpha_rad", "alpha_deg", "sigma_rad", "sigma_deg", "beta_rad", "beta_deg",
      "gas.a", "gas.rho_star",
      "grid.Ns", "grid.Nt", "grid.stretch",
      "solver.mu_step0", "solver.mu_step_min", "solver.eps_schedule",
      "solver.newton_max_iter", "solver.newton_tol", "solver.newton_max_halvings",
      "outputs.dir", "outputs.svg", "outputs.csv", "outputs.json"};

  std::map<std::string, TomlValue> out;
  std::string section;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    // Strip comments outside strings.
    bool in_str = false;
    for (size_t k = 0; k < line.size(); ++k) {
      if (line[k] == '"') in_str = !in_str;
      if (line[k] == '#' && !in_str) {
        line = line.substr(0, k);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string full = section.empty() ? key : section + "." + key;
    if (!schema.count(full)) {
      throw std::invalid_argument("config: unknown key '" + full + "'");
    }
    if (out.count(full)) {
      throw std::invalid_argument("config: duplicate key '" + full + "'");
    }
    out[full] = parse_value(full, trim(line.substr(eq + 1)));
  }
  return out;
}

double require_number(const std::map<std::string, TomlValue>& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw std::invalid_argument("config: missing required key '" + key + "'");
  if (it->second.kind != TomlValue::Kind::Number) {
    throw std::invalid_argument("config key '" + key + "': expected a number");
  }
  return it->second.num;
}

/// Reads an angle with a mandatory _rad/_deg suffix; returns radians.
double read_angle(const std::map<std::string, TomlValue>& kv, const std::string& base,
                  bool required) {
  const bool has_rad = kv.count(base + "_rad"), has_deg = kv.count(base + "_deg");
  if (has_rad && has_deg) {
    throw std::invalid_argument("config: '" + base + "_rad' and '" + base +
                                "_deg' are mutually exclusive");
  }
  if (!has_rad && !has_deg) {
    if (required) {
      throw std::invalid_argument("config: missing angle '" + base +
                                  "' (provide " + base + "_rad or " + base + "_deg)");
    }
    return 0.0;
  }
  const std::string key = base + (has_rad ? "_rad" : "_deg");
  const double v = require_number(kv, key);
  return has_rad ? v : v * kPi / 180.0;
}

void check(bool ok, const std::string& key, double value, const std::string& constraint) {
  if (!ok) {
    throw std::invalid_argument("config key '" + key + "': value " + fmt17(value) +
                                " violates constraint " + constraint);
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  const auto kv = parse_toml(text);
  RunConfig cfg;

  cfg.q_inf = require_number(kv, "q_inf");
  check(cfg.q_inf > 1.0, "q_inf", cfg.q_inf, "q_inf > 1");
  cfg.alpha = read_angle(kv, "alpha", true);
  check(cfg.alpha > 0.0 && cfg.alpha < kPi / 2, "alpha", cfg.alpha, "0 < alpha < pi/2");
  cfg.sigma = read_angle(kv, "sigma", true);
  check(cfg.sigma > 0.0 && cfg.sigma < kPi / 2, "sigma", cfg.sigma, "0 < sigma < pi/2");
  cfg.beta = read_angle(kv, "beta", true);
  check(cfg.beta >= 0.0 && cfg.beta < kPi / 2, "beta", cfg.beta, "0 <= beta < pi/2");

  auto num = [&kv](const std::string& key, double fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    if (it->second.kind != TomlValue::Kind::Number) {
      throw std::invalid_argument("config key '" + key + "': expected a number");
    }
    return it->second.num;
  };

  cfg.gas.a = num("gas.a", 1.0);
  check(cfg.gas.a > 0.0, "gas.a", cfg.gas.a, "a > 0");
  cfg.gas.rho_star = num("gas.rho_star", 1.0);
  check(cfg.gas.rho_star > 0.0, "gas.rho_star", cfg.gas.rho_star, "rho_star > 0");

  cfg.Ns = static_cast<int>(num("grid.Ns", 65));
  check(cfg.Ns >= 9, "grid.Ns", cfg.Ns, "Ns >= 9");
  cfg.Nt = static_cast<int>(num("grid.Nt", 65));
  check(cfg.Nt >= 9, "grid.Nt", cfg.Nt, "Nt >= 9");
  cfg.stretch = num("grid.stretch", 1.05);
  check(cfg.stretch >= 1.0, "grid.stretch", cfg.stretch, "stretch >= 1");

  cfg.solver.mu_step0 = num("solver.mu_step0", cfg.solver.mu_step0);
  check(cfg.solver.mu_step0 > 0.0 && cfg.solver.mu_step0 <= 1.0, "solver.mu_step0",
        cfg.solver.mu_step0, "0 < mu_step0 <= 1");
  cfg.solver.mu_step_min = num("solver.mu_step_min", cfg.solver.mu_step_min);
  check(cfg.solver.mu_step_min > 0.0, "solver.mu_step_min", cfg.solver.mu_step_min,
        "mu_step_min > 0");
  cfg.solver.newton.max_iter =
      static_cast<int>(num("solver.newton_max_iter", cfg.solver.newton.max_iter));
  cfg.solver.newton.tol = num("solver.newton_tol", cfg.solver.newton.tol);
  cfg.solver.newton.max_halvings =
      static_cast<int>(num("solver.newton_max_halvings", cfg.solver.newton.max_halvings));
  if (auto it = kv.find("solver.eps_schedule"); it != kv.end()) {
    if (it->second.kind != TomlValue::Kind::Array || it->second.arr.empty()) {
      throw std::invalid_argument("config key 'solver.eps_schedule': expected a numeric array");
    }
    for (size_t k = 0; k < it->second.arr.size(); ++k) {
      check(it->second.arr[k] > 0.0, "solver.eps_schedule", it->second.arr[k], "eps > 0");
      if (k > 0) {
        check(it->second.arr[k] < it->second.arr[k - 1], "solver.eps_schedule",
              it->second.arr[k], "strictly decreasing schedule");
      }
    }
    cfg.solver.eps_schedule = it->second.arr;
  }

  if (auto it = kv.find("outputs.dir"); it != kv.end()) {
    if (it->second.kind != TomlValue::Kind::String) {
      throw std::invalid_argument("config key 'outputs.dir': expected a string");
    }
    cfg.output_dir = it->second.str;
  }
  auto flag = [&kv](const std::string& key, bool fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    if (it->second.kind != TomlValue::Kind::Bool) {
      throw std::invalid_argument("config key '" + key + "': expected true/false");
    }
    return it->second.b;
  };
  cfg.emit_svg = flag("outputs.svg", true);
  cfg.emit_csv = flag("outputs.csv", true);
  cfg.emit_json = flag("outputs.json", true);
  return cfg;
}

// ---------------------------------------------------------------------------
// SVG emission
// ---------------------------------------------------------------------------

namespace {

struct SvgMapper {
  double xmin, xmax, ymin, ymax;
  double size = 800.0, pad = 60.0;

  double sx(double x) const {
    return pad + (x - xmin) / (xmax - xmin) * (size - 2 * pad);
  }
  double sy(double y) const {
    return size - pad - (y - ymin) / (ymax - ymin) * (size - 2 * pad);
  }
};

/// Samples one Mach-cone section as the near branch seen from O on 512 rays.
std::vector<Vector2d> sample_conic(const ConicCurve& conic, double rmax) {
  std::vector<Vector2d> pts;
  const int n = 512;
  for (int k = 0; k < n; ++k) {
    const double theta = 2.0 * kPi * k / n;
    try {
      const double r = ray_root(conic, {std::cos(theta), std::sin(theta)});
      if (r > 0.0 && r <= rmax) {
        pts.push_back(r * Vector2d(std::cos(theta), std::sin(theta)));
      }
    } catch (const std::exception&) {
      // ray misses this branch
    }
  }
  return pts;
}

void put_polyline(std::ostream& os, const SvgMapper& m, const std::vector<Vector2d>& pts,
                  const std::string& color, const std::string& dash) {
  os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
  if (!dash.empty()) os << " stroke-dasharray=\"" << dash << "\"";
  os << " points=\"";
  for (const Vector2d& p : pts) os << fmt_svg(m.sx(p[0])) << ',' << fmt_svg(m.sy(p[1])) << ' ';
  os << "\"/>\n";
}

void put_label(std::ostream& os, const SvgMapper& m, const Vector2d& p,
               const std::string& text, const std::string& color) {
  os << "<circle cx=\"" << fmt_svg(m.sx(p[0])) << "\" cy=\"" << fmt_svg(m.sy(p[1]))
     << "\" r=\"3.5\" fill=\"" << color << "\"/>\n";
  os << "<text x=\"" << fmt_svg(m.sx(p[0]) + 6) << "\" y=\"" << fmt_svg(m.sy(p[1]) - 6)
     << "\" font-family=\"sans-serif\" font-size=\"14\" fill=\"" << color << "\">" << text
     << "</text>\n";
}

std::vector<Vector2d> clip_line(const ShockLine& s, const SvgMapper& m) {
  // Segment of n1 x + n2 y + d = 0 clipped to the view rectangle.
  const Vector2d n(s.n1, s.n2);
  const double nn = n.norm();
  if (nn < 1e-14) return {};
  const Vector2d base = -s.d / (nn * nn) * n;
  const Vector2d t(-n[1] / nn, n[0] / nn);
  const double L = 2.0 * std::max(m.xmax - m.xmin, m.ymax - m.ymin);
  std::vector<Vector2d> pts;
  for (int k = 0; k <= 256; ++k) {
    const Vector2d p = base + (-L + 2.0 * L * k / 256.0) * t;
    if (p[0] >= m.xmin && p[0] <= m.xmax && p[1] >= m.ymin && p[1] <= m.ymax) {
      pts.push_back(p);
    }
  }
  return pts;
}

}  // namespace

void emit_geometry_svg(const RegimeReport& report, std::ostream& os) {
  // View box from the key points plus the origin, padded.
  double ext = 0.5;
  for (const auto& [name, p] : report.points) ext = std::max(ext, p.lpNorm<Eigen::Infinity>());
  SvgMapper m{-1.4 * ext, 1.4 * ext, -1.4 * ext, 1.4 * ext};

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << m.size << "\" height=\""
     << m.size << "\" viewBox=\"0 0 " << m.size << " " << m.size << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Axes through O.
  put_polyline(os, m, {{m.xmin, 0.0}, {m.xmax, 0.0}}, "#bbbbbb", "");
  put_polyline(os, m, {{0.0, m.ymin}, {0.0, m.ymax}}, "#bbbbbb", "");

  // Boundary rays: wing trace at angle pi/2 + beta, symmetry trace along
  // the negative xi1-axis.
  const double beta = report.angles.beta;
  const double thw = kPi / 2 + beta;
  const double ray_len = 1.35 * ext;
  put_polyline(os, m, {{0.0, 0.0}, {ray_len * std::cos(thw), ray_len * std::sin(thw)}},
               "#333333", "");
  put_polyline(os, m, {{0.0, 0.0}, {-ray_len, 0.0}}, "#333333", "6,4");

  struct ConicSpec {
    const std::optional<ConicCurve>& conic;
    const char* label;
    const char* color;
  };
  const ConicSpec conics[] = {
      {report.c_inf, "C_inf", "#1f6fb2"},
      {report.c_sigma, "C_sigma", "#b2411f"},
      {report.c_sigma_prime, "C_sigma_prime", "#6a1fb2"},
  };
  for (const ConicSpec& cs : conics) {
    if (!cs.conic) continue;
    const std::vector<Vector2d> pts = sample_conic(*cs.conic, 3.0 * ext);
    put_polyline(os, m, pts, cs.color, "");
    if (!pts.empty()) put_label(os, m, pts.front(), cs.label, cs.color);
  }

  if (report.s_ob) put_polyline(os, m, clip_line(*report.s_ob, m), "#1fa04d", "");
  if (report.s_r) put_polyline(os, m, clip_line(*report.s_r, m), "#1fa04d", "4,3");

  put_label(os, m, {0.0, 0.0}, "O", "#000000");
  for (const auto& [name, p] : report.points) put_label(os, m, p, name, "#000000");

  os << "<text x=\"" << m.pad << "\" y=\"" << m.pad / 2
     << "\" font-family=\"sans-serif\" font-size=\"16\" fill=\"#000000\">regime: "
     << regime_name(report.regime) << "</text>\n";
  os << "</svg>\n";
}

// ---------------------------------------------------------------------------
// CSV emission
// ---------------------------------------------------------------------------

void emit_field_csv(const SolutionField& field, const Grid& grid, std::ostream& os) {
  if (field.Ns != grid.Ns || field.Nt != grid.Nt) {
    throw std::invalid_argument("emit_field_csv: field and grid dimensions differ");
  }
  os << "i,j,xi1,xi2,psi,w,phi,v1,v2,v3,c,rho,L2,tag\n";
  for (int i = 0; i < grid.Ns; ++i) {
    for (int j = 0; j < grid.Nt; ++j) {
      const int k = grid.idx(i, j);
      os << i << ',' << j << ',' << fmt17(grid.xi[k][0]) << ',' << fmt17(grid.xi[k][1]) << ','
         << fmt17(field.psi[k]) << ',' << fmt17(field.w[k]) << ',' << fmt17(field.phi[k]) << ','
         << fmt17(field.velocity[k][0]) << ',' << fmt17(field.velocity[k][1]) << ','
         << fmt17(field.velocity[k][2]) << ',' << fmt17(field.c[k]) << ','
         << fmt17(field.rho[k]) << ',' << fmt17(field.L2[k]) << ','
         << tag_name(grid.tags[k]) << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// JSON emission / parsing
// ---------------------------------------------------------------------------

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

class JsonWriter {
 public:
  explicit JsonWriter(std::ostream& os) : os_(os) {}

  void obj_open() { sep(); os_ << '{'; first_ = true; }
  void obj_close() { os_ << '}'; first_ = false; }
  void key(const std::string& k) { sep(); os_ << '"' << json_escape(k) << "\":"; first_ = true; }
  void num(double v) { sep(); os_ << fmt17(v); }
  void str(const std::string& v) { sep(); os_ << '"' << json_escape(v) << '"'; }
  void null() { sep(); os_ << "null"; }
  void arr(std::initializer_list<double> vs) {
    sep();
    os_ << '[';
    bool f = true;
    for (double v : vs) {
      if (!f) os_ << ',';
      os_ << fmt17(v);
      f = false;
    }
    os_ << ']';
  }

 private:
  void sep() {
    if (!first_) os_ << ',';
    first_ = false;
  }
  std::ostream& os_;
  bool first_ = true;
};

}  // namespace

void emit_report_json(const RegimeReport& r, std::ostream& os) {
  JsonWriter w(os);
  w.obj_open();
  w.key("regime"); w.str(regime_name(r.regime));
  w.key("fs");
  w.obj_open();
  w.key("q_inf"); w.num(r.fs.q_inf);
  w.key("c_inf"); w.num(r.fs.c_inf);
  w.key("rho_inf"); w.num(r.fs.rho_inf);
  w.key("alpha"); w.num(r.fs.alpha);
  w.key("v1_inf"); w.num(r.fs.v1_inf);
  w.key("v3_inf"); w.num(r.fs.v3_inf);
  w.key("gas");
  w.obj_open();
  w.key("a"); w.num(r.fs.gas.a);
  w.key("rho_star"); w.num(r.fs.gas.rho_star);
  w.obj_close();
  w.obj_close();
  w.key("angles");
  w.obj_open();
  w.key("sigma"); w.num(r.angles.sigma);
  w.key("beta"); w.num(r.angles.beta);
  w.obj_close();
  w.key("alpha0"); w.num(r.alpha0);
  auto opt_num = [&w](const char* k, const std::optional<double>& v) {
    w.key(k);
    if (v) w.num(*v); else w.null();
  };
  opt_num("sigma0", r.sigma0);
  opt_num("beta_c", r.beta_c);
  opt_num("beta0", r.beta0);
  w.key("points");
  w.obj_open();
  for (const auto& [name, p] : r.points) {
    w.key(name);
    w.arr({p[0], p[1]});
  }
  w.obj_close();
  auto opt_conic = [&w](const char* k, const std::optional<ConicCurve>& c) {
    w.key(k);
    if (!c) { w.null(); return; }
    w.obj_open();
    w.key("p1"); w.num(c->p1);
    w.key("p2"); w.num(c->p2);
    w.key("p0"); w.num(c->p0);
    w.obj_close();
  };
  opt_conic("c_inf", r.c_inf);
  opt_conic("c_sigma", r.c_sigma);
  opt_conic("c_sigma_prime", r.c_sigma_prime);
  auto opt_shock = [&w](const char* k, const std::optional<ShockLine>& s) {
    w.key(k);
    if (!s) { w.null(); return; }
    w.obj_open();
    w.key("n1"); w.num(s->n1);
    w.key("n2"); w.num(s->n2);
    w.key("d"); w.num(s->d);
    w.key("normal3d"); w.arr({s->normal3d[0], s->normal3d[1], s->normal3d[2]});
    w.obj_close();
  };
  opt_shock("s_ob", r.s_ob);
  opt_shock("s_r", r.s_r);
  w.key("state");
  if (r.state) {
    w.obj_open();
    w.key("v1"); w.num(r.state->v1);
    w.key("v2"); w.num(r.state->v2);
    w.key("v3"); w.num(r.state->v3);
    w.key("c"); w.num(r.state->c);
    w.key("q_j"); w.num(r.state->q_j);
    w.key("q_tilde"); w.num(r.state->q_tilde);
    w.key("theta_n"); w.num(r.state->theta_n);
    w.obj_close();
  } else {
    w.null();
  }
  w.key("resulting");
  if (r.resulting) {
    w.obj_open();
    w.key("v1R"); w.num(r.resulting->v1R);
    w.key("v3R"); w.num(r.resulting->v3R);
    w.key("cR"); w.num(r.resulting->cR);
    w.key("q_tilde_sigma"); w.num(r.resulting->q_tilde_sigma);
    w.key("theta_n_prime"); w.num(r.resulting->theta_n_prime);
    w.key("q_jR"); w.num(r.resulting->q_jR);
    w.obj_close();
  } else {
    w.null();
  }
  w.key("diagnostic"); w.str(r.diagnostic);
  w.obj_close();
  os << '\n';
}

std::string report_json(const RegimeReport& report) {
  std::ostringstream ss;
  emit_report_json(report, ss);
  return ss.str();
}

RegimeReport report_from_json(const std::string& text) {
  using nlohmann::json;
  const json j = json::parse(text);
  RegimeReport r;
  const std::string name = j.at("regime").get<std::string>();
  const Regime all[] = {Regime::DeltaWing,   Regime::Subcritical,   Regime::PlanarShock,
                        Regime::Reflected,   Regime::BeyondScope,   Regime::ShockDetached,
                        Regime::Concentration};
  bool matched = false;
  for (Regime g : all) {
    if (regime_name(g) == name) {
      r.regime = g;
      matched = true;
    }
  }
  if (!matched) throw std::invalid_argument("report_from_json: unknown regime '" + name + "'");
  const json& fs = j.at("fs");
  r.fs.q_inf = fs.at("q_inf").get<double>();
  r.fs.c_inf = fs.at("c_inf").get<double>();
  r.fs.rho_inf = fs.at("rho_inf").get<double>();
  r.fs.alpha = fs.at("alpha").get<double>();
  r.fs.v1_inf = fs.at("v1_inf").get<double>();
  r.fs.v3_inf = fs.at("v3_inf").get<double>();
  r.fs.gas.a = fs.at("gas").at("a").get<double>();
  r.fs.gas.rho_star = fs.at("gas").at("rho_star").get<double>();
  r.angles.sigma = j.at("angles").at("sigma").get<double>();
  r.angles.beta = j.at("angles").at("beta").get<double>();
  r.alpha0 = j.at("alpha0").get<double>();
  auto opt_num = [&j](const char* k) -> std::optional<double> {
    if (j.at(k).is_null()) return std::nullopt;
    return j.at(k).get<double>();
  };
  r.sigma0 = opt_num("sigma0");
  r.beta_c = opt_num("beta_c");
  r.beta0 = opt_num("beta0");
  for (const auto& [name2, arr] : j.at("points").items()) {
    r.points[name2] = Vector2d(arr.at(0).get<double>(), arr.at(1).get<double>());
  }
  auto opt_conic = [&j](const char* k) -> std::optional<ConicCurve> {
    if (j.at(k).is_null()) return std::nullopt;
    const auto& c = j.at(k);
    return ConicCurve{c.at("p1").get<double>(), c.at("p2").get<double>(),
                      c.at("p0").get<double>()};
  };
  r.c_inf = opt_conic("c_inf");
  r.c_sigma = opt_conic("c_sigma");
  r.c_sigma_prime = opt_conic("c_sigma_prime");
  auto opt_shock = [&j](const char* k) -> std::optional<ShockLine> {
    if (j.at(k).is_null()) return std::nullopt;
    const auto& s = j.at(k);
    ShockLine out{s.at("n1").get<double>(), s.at("n2").get<double>(), s.at("d").get<double>()};
    out.normal3d = Vector3d(s.at("normal3d").at(0).get<double>(),
                            s.at("normal3d").at(1).get<double>(),
                            s.at("normal3d").at(2).get<double>());
    return out;
  };
  r.s_ob = opt_shock("s_ob");
  r.s_r = opt_shock("s_r");
  if (!j.at("state").is_null()) {
    const auto& s = j.at("state");
    DownstreamUniform d;
    d.v1 = s.at("v1").get<double>();
    d.v2 = s.at("v2").get<double>();
    d.v3 = s.at("v3").get<double>();
    d.c = s.at("c").get<double>();
    d.q_j = s.at("q_j").get<double>();
    d.q_tilde = s.at("q_tilde").get<double>();
    d.theta_n = s.at("theta_n").get<double>();
    r.state = d;
  }
  if (!j.at("resulting").is_null()) {
    const auto& s = j.at("resulting");
    ResultingUniform d;
    d.v1R = s.at("v1R").get<double>();
    d.v3R = s.at("v3R").get<double>();
    d.cR = s.at("cR").get<double>();
    d.q_tilde_sigma = s.at("q_tilde_sigma").get<double>();
    d.theta_n_prime = s.at("theta_n_prime").get<double>();
    d.q_jR = s.at("q_jR").get<double>();
    r.resulting = d;
  }
  r.diagnostic = j.at("diagnostic").get<std::string>();
  return r;
}

// ---------------------------------------------------------------------------
// Command dispatch
// ---------------------------------------------------------------------------

namespace {

namespace fs = std::filesystem;

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

/// Run metadata is kept out of the deterministic data files.
void write_meta(const fs::path& dir, const std::string& command) {
  const auto now = std::chrono::system_clock::now();
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch());
  std::ostringstream ss;
  ss << "{\"tool\":\"cwing\",\"command\":\"" << json_escape(command)
     << "\",\"unix_time\":" << secs.count() << "}\n";
  write_file(dir / "meta.json", ss.str());
}

int cmd_polar(const RunConfig& cfg) {
  const FreeStream fsr = normalize_freestream(cfg.q_inf, cfg.alpha, cfg.gas);
  const WingAngles angles{cfg.sigma, cfg.beta};
  const auto [q_tilde, theta_n] = normal_plane_decomposition(fsr, angles);
  const double c0 = fsr.c_inf;
  std::ostringstream ss;
  ss << "{\"u0\":" << fmt17(q_tilde) << ",\"c0\":" << fmt17(c0)
     << ",\"theta\":" << fmt17(theta_n)
     << ",\"gamma\":" << fmt17(shock_angle(q_tilde, c0))
     << ",\"admissible\":" << (admissible(q_tilde, c0, theta_n) ? "true" : "false");
  try {
    const PolarState st = polar_state(q_tilde, c0, theta_n);
    ss << ",\"u1\":" << fmt17(st.u1) << ",\"v1\":" << fmt17(st.v1)
       << ",\"c1\":" << fmt17(st.c1)
       << ",\"bernoulli_defect\":"
       << fmt17(st.u1 * st.u1 + st.v1 * st.v1 - st.c1 * st.c1 - 1.0);
  } catch (const ConcentrationError& e) {
    ss << ",\"error\":\"" << json_escape(e.what()) << "\"";
  }
  ss << "}\n";
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  write_file(dir / "polar.json", ss.str());
  write_meta(dir, "polar");
  return 0;
}

int cmd_geometry(const RunConfig& cfg) {
  const FreeStream fsr = normalize_freestream(cfg.q_inf, cfg.alpha, cfg.gas);
  const RegimeReport report = classify_regime(fsr, {cfg.sigma, cfg.beta});
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  if (cfg.emit_json) write_file(dir / "geometry.json", report_json(report));
  if (cfg.emit_svg) {
    std::ostringstream ss;
    emit_geometry_svg(report, ss);
    write_file(dir / "geometry.svg", ss.str());
  }
  write_meta(dir, "geometry");
  return 0;
}

int cmd_solve(const RunConfig& cfg) {
  const FreeStream fsr = normalize_freestream(cfg.q_inf, cfg.alpha, cfg.gas);
  const RegimeReport report = classify_regime(fsr, {cfg.sigma, cfg.beta});
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  if (cfg.emit_json) write_file(dir / "geometry.json", report_json(report));
  if (cfg.emit_svg) {
    std::ostringstream ss;
    emit_geometry_svg(report, ss);
    write_file(dir / "geometry.svg", ss.str());
  }

  DomainSpec spec;
  try {
    spec = build_domain(report);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "solve: no elliptic region for this configuration: %s\n", e.what());
    write_meta(dir, "solve");
    return 2;
  }
  const Grid grid = generate_grid(spec, cfg.Ns, cfg.Nt, cfg.stretch);
  Discretization disc(grid, BCMode::Mixed);
  const SweepResult sweep = epsilon_sweep(disc, cfg.solver, cfg.gas);
  if (!sweep.complete) {
    std::fprintf(stderr, "solve: epsilon sweep failed: %s\n", sweep.failure.c_str());
    write_meta(dir, "solve");
    return 2;
  }
  const SolutionField& fin = sweep.stages.back();
  if (cfg.emit_csv) {
    std::ostringstream ss;
    emit_field_csv(fin, grid, ss);
    write_file(dir / "field.csv", ss.str());
  }
  if (cfg.emit_json) {
    std::ostringstream ss;
    ss << "{\"stages\":[";
    for (size_t k = 0; k < sweep.stages.size(); ++k) {
      const SolutionField& s = sweep.stages[k];
      if (k) ss << ',';
      ss << "{\"eps\":" << fmt17(s.eps) << ",\"continuation_stages\":" << s.trace.size()
         << ",\"ellipticity_margin\":" << fmt17(s.ellipticity_margin) << "}";
    }
    double min_adm = 1e300;
    for (size_t k = 0; k < grid.xi.size(); ++k) {
      min_adm = std::min(min_adm, sweep.phi_extrapolated[k] -
                                      std::sqrt(1.0 + grid.xi[k].squaredNorm()));
    }
    ss << "],\"extrapolated_min_admissibility\":" << fmt17(min_adm) << "}\n";
    write_file(dir / "solution.json", ss.str());
  }
  write_meta(dir, "solve");
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  const FreeStream fsr = normalize_freestream(cfg.q_inf, cfg.alpha, cfg.gas);
  const RegimeReport report = classify_regime(fsr, {cfg.sigma, cfg.beta});
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);

  std::ostringstream ss;
  ss << "{";
  bool all_pass = true;
  bool first = true;
  auto emit_prop = [&](const std::string& name, bool pass, double margin) {
    if (!first) ss << ',';
    first = false;
    ss << "\"" << name << "\":{\"pass\":" << (pass ? "true" : "false")
       << ",\"margin\":" << fmt17(margin) << "}";
    all_pass = all_pass && pass;
  };

  // Exact-solution residual of the continuous w-equation.
  {
    double worst = 0.0;
    std::mt19937 rng(2026);
    std::uniform_real_distribution<double> U(-2.0, 2.0), M(0.0, 1.0);
    for (int k = 0; k < 20; ++k) {
      const Vector3d eta(U(rng), U(rng), U(rng));
      const Vector2d xi(U(rng), U(rng));
      worst = std::max(worst, std::abs(w_equation_residual(eta, xi, M(rng))));
    }
    emit_prop("exact_solution_residual", worst < 1e-10, worst);
  }

  DomainSpec spec;
  try {
    spec = build_domain(report);
  } catch (const std::exception& e) {
    emit_prop("elliptic_region", false, 0.0);
    ss << ",\"diagnostic\":\"" << json_escape(e.what()) << "\"}\n";
    write_file(dir / "verify.json", ss.str());
    write_meta(dir, "verify");
    return 2;
  }

  // Manufactured-solution order.
  {
    const MmsTable t = mms_convergence(spec, {0, 0, 2}, 1.0, {17, 33, 65}, cfg.solver.newton);
    bool ok = true;
    double worst = 2.0;
    for (double o : t.orders) {
      ok = ok && o > 1.5 && o < 2.5;
      if (std::abs(o - 2.0) > std::abs(worst - 2.0)) worst = o;
    }
    emit_prop("manufactured_order", ok, worst);
  }

  // Full sweep with envelope bounds.
  const Grid grid = generate_grid(spec, cfg.Ns, cfg.Nt, cfg.stretch);
  Discretization disc(grid, BCMode::Mixed);
  const SweepResult sweep = epsilon_sweep(disc, cfg.solver, cfg.gas);
  emit_prop("epsilon_sweep_complete", sweep.complete, sweep.stages.size());
  if (sweep.complete) {
    bool ok = true;
    double worst = 0.0;
    for (const SolutionField& s : sweep.stages) {
      const EnvelopePair env = make_envelope_pair(grid, s.eps, fsr, report, 256);
      const BoundReport rep = bound_check(s, env);
      ok = ok && rep.violations.empty();
      for (const BoundViolation& v : rep.violations) worst = std::max(worst, v.margin);
    }
    emit_prop("envelope_bounds", ok, worst);
  }

  ss << "}\n";
  write_file(dir / "verify.json", ss.str());
  write_meta(dir, "verify");
  return all_pass ? 0 : 2;
}

int cmd_sweep(const RunConfig& cfg, double from, double to, int steps) {
  if (steps < 1 || !(to >= from)) {
    throw std::invalid_argument("sweep: need steps >= 1 and to >= from");
  }
  const FreeStream fsr = normalize_freestream(cfg.q_inf, cfg.alpha, cfg.gas);
  std::ostringstream ss;
  ss << "beta,regime,beta_c,beta0,P1x,P1y,P2x,P2y,P4x,P4y\n";
  for (int k = 0; k <= steps; ++k) {
    const double beta = from + (to - from) * k / steps;
    const RegimeReport r = classify_regime(fsr, {cfg.sigma, beta});
    auto pt = [&r](const std::string& n, int c) {
      auto it = r.points.find(n);
      return it == r.points.end() ? std::string("nan") : fmt17(it->second[c]);
    };
    ss << fmt17(beta) << ',' << regime_name(r.regime) << ','
       << (r.beta_c ? fmt17(*r.beta_c) : "nan") << ','
       << (r.beta0 ? fmt17(*r.beta0) : "nan") << ',' << pt("P1", 0) << ',' << pt("P1", 1)
       << ',' << pt("P2", 0) << ',' << pt("P2", 1) << ',' << pt("P4", 0) << ','
       << pt("P4", 1) << '\n';
  }
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  write_file(dir / "sweep.csv", ss.str());
  write_meta(dir, "sweep");
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Self-similar Chaplygin-gas flow past a conical Lambda-wing"};
  app.require_subcommand(1);

  std::string config_path;
  std::string over = "beta";
  double from = 0.0, to = 0.0;
  int steps = 10;

  CLI::App* polar = app.add_subcommand("polar", "normal-plane shock polar state");
  CLI::App* geometry = app.add_subcommand("geometry", "regime classification and figure");
  CLI::App* solve = app.add_subcommand("solve", "full interior solve with epsilon sweep");
  CLI::App* verify = app.add_subcommand("verify", "oracle suite, emits verify.json");
  CLI::App* sweep = app.add_subcommand("sweep", "regime atlas over a parameter range");
  for (CLI::App* sub : {polar, geometry, solve, verify, sweep}) {
    sub->add_option("--config", config_path, "TOML config file")->required();
  }
  sweep->add_option("--over", over, "swept parameter (beta)");
  sweep->add_option("--from", from, "range start")->required();
  sweep->add_option("--to", to, "range end")->required();
  sweep->add_option("--steps", steps, "number of intervals");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    const RunConfig cfg = load_config(config_path);
    if (polar->parsed()) return cmd_polar(cfg);
    if (geometry->parsed()) return cmd_geometry(cfg);
    if (solve->parsed()) return cmd_solve(cfg);
    if (verify->parsed()) return cmd_verify(cfg);
    if (sweep->parsed()) {
      if (over != "beta") {
        throw std::invalid_argument("sweep: only --over beta is supported");
      }
      return cmd_sweep(cfg, from, to, steps);
    }
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "failure: %s\n", e.what());
    return 2;
  }
  return 1;
}

}  // namespace cwing
