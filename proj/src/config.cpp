#include "ddflow/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ddflow/io.hpp"

namespace ddflow {
namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1] ? 1 : 0)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// Line numbers of "section.key" entries, for error messages.
std::map<std::string, int> index_lines(const std::string& text) {
  std::map<std::string, int> lines;
  std::istringstream in(text);
  std::string line, section;
  for (int no = 1; std::getline(in, line); ++no) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == ';' || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(t.substr(1, t.size() - 2));
      lines.emplace(section, no);
      continue;
    }
    const auto eq = t.find('=');
    if (eq != std::string::npos) lines.emplace((section.empty() ? "" : section + ".") + trim(t.substr(0, eq)), no);
  }
  return lines;
}

std::string unquote(std::string v) {
  v = trim(v);
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) v = v.substr(1, v.size() - 2);
  return v;
}

class Reader {
 public:
  Reader(const std::string& origin, const std::string& text) : origin_(origin), lines_(index_lines(text)) {}

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    std::ostringstream msg;
    msg << origin_;
    auto it = lines_.find(key);
    if (it != lines_.end()) msg << ":" << it->second;
    msg << ": " << key << ": " << what;
    throw ConfigError(msg.str());
  }

  std::vector<double> numbers(const std::string& key, const std::string& raw) const {
    std::string s = unquote(raw);
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream in(s);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) {
      std::size_t pos = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos == 0 || pos != tok.size()) fail(key, "expected a number, got '" + tok + "'");
      out.push_back(v);
    }
    return out;
  }

  double number(const std::string& key, const std::string& raw) const {
    const auto v = numbers(key, raw);
    if (v.size() != 1) fail(key, "expected a single number, got '" + unquote(raw) + "'");
    return v[0];
  }

  long integer(const std::string& key, const std::string& raw) const {
    const double v = number(key, raw);
    if (v != std::floor(v) || std::abs(v) > 1e15) fail(key, "expected an integer, got '" + unquote(raw) + "'");
    return static_cast<long>(v);
  }

  bool boolean(const std::string& key, const std::string& raw) const {
    const std::string v = unquote(raw);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(key, "expected true or false, got '" + v + "'");
  }

 private:
  std::string origin_;
  std::map<std::string, int> lines_;
};

using Setter = std::function<void(RunConfig&, const Reader&, const std::string& key, const std::string& raw)>;

Mat2 matrix(const Reader& r, const std::string& key, const std::string& raw) {
  const auto v = r.numbers(key, raw);
  if (v.size() != 4) r.fail(key, "expected four numbers (row-major 2x2)");
  Mat2 m;
  m << v[0], v[1], v[2], v[3];
  return m;
}

Vec2 pair(const Reader& r, const std::string& key, const std::string& raw) {
  const auto v = r.numbers(key, raw);
  if (v.size() != 2) r.fail(key, "expected two numbers");
  return {v[0], v[1]};
}

std::string choice(const Reader& r, const std::string& key, const std::string& raw,
                   const std::vector<std::string>& allowed) {
  const std::string v = unquote(raw);
  if (std::find(allowed.begin(), allowed.end(), v) != allowed.end()) return v;
  std::string list;
  for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
  r.fail(key, "unknown value '" + v + "' (expected one of: " + list + ")");
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"mesh.n", [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.n = r.integer(k, v); }},
      {"run.seed",
       [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) {
         const long s = r.integer(k, v);
         if (s < 0) r.fail(k, "must be nonnegative");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"model.viscosity",
       [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) {
         c.model.viscosity = choice(r, k, v, viscosity_names());
       }},
      {"model.nu0", [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.model.nu0 = r.number(k, v); }},
      {"model.gamma", [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.model.gamma = r.number(k, v); }},
      {"model.buoyancy",
       [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) {
         c.model.buoyancy = choice(r, k, v, buoyancy_names());
       }},
      {"model.g_T", [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.model.g_T = r.number(k, v); }},
      {"model.g_S", [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.model.g_S = r.number(k, v); }},
      {"model.kinv", [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.model.kinv = matrix(r, k, v); }},
      {"model.diffusion",
       [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.model.diffusion = matrix(r, k, v); }},
      {"model.lambda", [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.model.lambda = r.number(k, v); }},
      {"data.yD", [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.y_boundary = choice(r, k, v, field_names()); }},
      {"data.yD_value", [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.y_boundary_value = pair(r, k, v); }},
      {"data.desired",
       [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) {
         c.desired = choice(r, k, v, {"analytic", "file", "inverse-crime"});
       }},
      {"data.u_d", [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.u_desired = choice(r, k, v, field_names()); }},
      {"data.y_d", [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.y_desired = choice(r, k, v, field_names()); }},
      {"data.y_d_value", [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.y_desired_value = pair(r, k, v); }},
      {"data.desired_file", [](RunConfig& c, const Reader&, const std::string&, const std::string& v) { c.desired_file = unquote(v); }},
      {"data.ustar", [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.ustar = choice(r, k, v, field_names()); }},
      {"data.ustar_scale", [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.ustar_scale = r.number(k, v); }},
      {"bounds.lower", [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.lower = r.number(k, v); }},
      {"bounds.upper", [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.upper = r.number(k, v); }},
      {"solver.newton_tol", [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.newton_tol = r.number(k, v); }},
      {"solver.newton_max_iterations",
       [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.newton_max_iterations = r.integer(k, v); }},
      {"solver.kkt_tol", [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.kkt_tol = r.number(k, v); }},
      {"solver.max_iterations",
       [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.max_iterations = r.integer(k, v); }},
      {"solver.armijo_c1", [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.armijo_c1 = r.number(k, v); }},
      {"solver.barzilai_borwein",
       [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.barzilai_borwein = r.boolean(k, v); }},
      {"diagnostics.C6", [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.constants.C6 = r.number(k, v); }},
      {"diagnostics.C3", [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.constants.C3 = r.number(k, v); }},
      {"diagnostics.Cgn", [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.constants.Cgn = r.number(k, v); }},
      {"diagnostics.Cp2", [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.constants.Cp2 = r.number(k, v); }},
      {"diagnostics.C4", [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.constants.C4 = r.number(k, v); }},
      {"diagnostics.C2r", [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.constants.C2r = r.number(k, v); }},
      {"diagnostics.epsilon", [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.epsilon = r.number(k, v); }},
      {"diagnostics.probe_directions",
       [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.probe_directions = r.integer(k, v); }},
      {"diagnostics.growth_radius",
       [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.growth_radius = r.number(k, v); }},
      {"diagnostics.growth_samples",
       [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.growth_samples = r.integer(k, v); }},
      {"check.directions",
       [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.check_directions = r.integer(k, v); }},
      {"check.control_scale",
       [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.control_scale = r.number(k, v); }},
      {"check.direction_scale",
       [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.direction_scale = r.number(k, v); }},
      {"check.fd_steps", [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) { c.fd_steps = r.numbers(k, v); }},
      {"mms.levels",
       [](RunConfig& c, const Reader& r, const std::string& k, const std::string& v) {
         c.mms_levels.clear();
         for (double x : r.numbers(k, v)) {
           if (x != std::floor(x)) r.fail(k, "mesh levels must be integers");
           c.mms_levels.push_back(static_cast<int>(x));
         }
       }},
  };
  return table;
}

[[noreturn]] void unknown_key(const Reader& r, const std::string& key) {
  std::string best;
  std::size_t best_d = 3;
  const auto dot = key.rfind('.');
  const std::string leaf = dot == std::string::npos ? key : key.substr(dot + 1);
  for (const auto& [known, setter] : setters()) {
    const std::string known_leaf = known.substr(known.rfind('.') + 1);
    const std::size_t d = std::min(edit_distance(key, known), edit_distance(leaf, known_leaf));
    if (d < best_d) {
      best_d = d;
      best = known;
    }
  }
  std::string msg = "unknown key";
  if (!best.empty()) msg += " (did you mean '" + best + "'?)";
  r.fail(key, msg);
}

void check(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key + ": " + what);
}

}  // namespace

void RunConfig::validate() const {
  check(n >= 1, "mesh.n", "must be at least 1");
  check(model.nu0 > 0.0, "model.nu0", "must be positive");
  check(model.gamma >= 0.0 && model.gamma < 1.0, "model.gamma", "must lie in [0, 1)");
  check(model.lambda > 0.0, "model.lambda", "must be positive");
  check(lower <= upper, "bounds.lower", "exceeds bounds.upper");
  check(lower <= 0.0 && upper >= 0.0, "bounds", "the box must contain the zero control");
  check(newton_tol > 0.0, "solver.newton_tol", "must be positive");
  check(newton_max_iterations >= 1, "solver.newton_max_iterations", "must be at least 1");
  check(kkt_tol > 0.0, "solver.kkt_tol", "must be positive");
  check(max_iterations >= 0, "solver.max_iterations", "must be nonnegative");
  check(armijo_c1 > 0.0 && armijo_c1 < 1.0, "solver.armijo_c1", "must lie in (0, 1)");
  check(epsilon >= 0.0, "diagnostics.epsilon", "must be nonnegative (0 selects the default)");
  check(probe_directions >= 1, "diagnostics.probe_directions", "must be at least 1");
  check(growth_radius > 0.0, "diagnostics.growth_radius", "must be positive");
  check(growth_samples >= 1, "diagnostics.growth_samples", "must be at least 1");
  check(check_directions >= 1, "check.directions", "must be at least 1");
  check(direction_scale > 0.0, "check.direction_scale", "must be positive");
  check(fd_steps.size() >= 2, "check.fd_steps", "needs at least two steps");
  for (std::size_t i = 0; i < fd_steps.size(); ++i)
    check(fd_steps[i] > 0.0 && (i == 0 || fd_steps[i] < fd_steps[i - 1]), "check.fd_steps",
          "must be positive and decreasing");
  check(mms_levels.size() >= 2, "mms.levels", "needs at least two mesh levels");
  for (int l : mms_levels) check(l >= 1, "mms.levels", "mesh levels must be at least 1");
  check(desired != "file" || !desired_file.empty(), "data.desired_file", "required when data.desired = file");
  try {
    constants.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("diagnostics: ") + e.what());
  }
}

RunConfig parse_config_string(const std::string& text, const std::string& origin) {
  const Reader reader(origin, text);
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    std::ostringstream msg;
    msg << origin << ":" << e.line() << ": " << e.message();
    throw ConfigError(msg.str());
  }
  RunConfig cfg;
  static const std::vector<std::string> sections = {"mesh",   "run",         "model", "data", "bounds",
                                                    "solver", "diagnostics", "check", "mms"};
  for (const auto& [section, body] : tree) {
    // a childless entry is either an empty section or a key outside any section
    if (std::find(sections.begin(), sections.end(), section) == sections.end()) {
      if (body.empty()) unknown_key(reader, section);
      reader.fail(section, "unknown section");
    }
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      auto it = setters().find(full);
      if (it == setters().end()) unknown_key(reader, full);
      it->second(cfg, reader, full, value.data());
    }
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    reader.fail(what.substr(0, what.find(':')), what.substr(what.find(':') + 2));
  }
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_string(ss.str(), path.string());
}

std::vector<std::string> field_names() { return {"zero", "constant", "linear-x", "linear-xy", "vortex"}; }

VectorFunction named_field(const std::string& name, const Vec2& value) {
  constexpr double pi = std::numbers::pi;
  if (name == "zero") return [](const Vec2&) { return Vec2::Zero(); };
  if (name == "constant") return [value](const Vec2&) { return value; };
  if (name == "linear-x") return [](const Vec2& x) { return Vec2(x.x(), x.x()); };
  if (name == "linear-xy") return [](const Vec2& x) { return Vec2(x.x(), 0.5 * x.y()); };
  if (name == "vortex")
    return [](const Vec2& x) {
      const double sx = std::sin(pi * x.x()), sy = std::sin(pi * x.y());
      return Vec2(sx * sx * std::sin(2 * pi * x.y()), -std::sin(2 * pi * x.x()) * sy * sy);
    };
  throw InvalidInput("unknown field name '" + name + "'");
}

FlowProblem build_problem(const RunConfig& config) {
  config.validate();
  PhysicalModel model = default_boussinesq_model(config.model);
  model.y_boundary = named_field(config.y_boundary, config.y_boundary_value);
  model.u_desired = named_field(config.u_desired);
  model.y_desired = named_field(config.y_desired, config.y_desired_value);
  FlowProblem problem(config.n, model);
  if (config.desired == "inverse-crime") {
    const StateSolution sol = solve_state(problem, build_ustar(problem, config), newton_options(config));
    problem.set_targets(sol.state.u, sol.state.y);
  } else if (config.desired == "file") {
    std::ifstream in(config.desired_file);
    if (!in) throw ConfigError("data.desired_file: cannot read " + config.desired_file);
    const auto [u, y] = read_state_csv(in, problem);
    problem.set_targets(u, y);
  }
  return problem;
}

Vector build_ustar(const FlowProblem& problem, const RunConfig& config) {
  const VectorFunction f = named_field(config.ustar);
  const int nc = problem.mesh().num_cells();
  Vector U(2 * nc);
  for (int c = 0; c < nc; ++c) {
    const Vec2 v = config.ustar_scale * f(problem.mesh().centroid(c));
    U[c] = v.x();
    U[nc + c] = v.y();
  }
  return U;
}

ControlField initial_control(const FlowProblem& problem, const RunConfig& config) {
  return ControlField::uniform(problem.num_controls(), 0.0, config.lower, config.upper);
}

NewtonOptions newton_options(const RunConfig& config) {
  NewtonOptions o;
  o.tol = config.newton_tol;
  o.max_iterations = config.newton_max_iterations;
  return o;
}

OptimizeOptions optimize_options(const RunConfig& config) {
  OptimizeOptions o;
  o.kkt_tol = config.kkt_tol;
  o.max_iterations = config.max_iterations;
  o.armijo_c1 = config.armijo_c1;
  o.barzilai_borwein = config.barzilai_borwein;
  o.newton = newton_options(config);
  return o;
}

}  // namespace ddflow
