#include "optbal/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace optbal::cli {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!keys.contains(key)) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
}

double number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(key + ": must be finite");
  return x;
}

long long integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError(key + ": expected an integer");
  return v.get<long long>();
}

std::string text(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError(key + ": expected a string");
  return v.get<std::string>();
}

Vec vector_of(const json& v, const std::string& key) {
  if (!v.is_array()) throw ConfigError(key + ": expected an array of numbers");
  Vec out;
  for (const auto& x : v) out.push_back(number(x, key));
  return out;
}

std::vector<double> number_or_list(const json& v, const std::string& key) {
  if (v.is_array()) return vector_of(v, key);
  return {number(v, key)};
}

Potential parse_potential(const json& v) {
  reject_unknown(v, "potential", {"kind", "d", "terms"});
  const std::string kind = v.contains("kind") ? text(v["kind"], "potential.kind") : "quartic-aniso";
  long long d = 1;
  if (v.contains("d")) {
    d = integer(v["d"], "potential.d");
    if (d < 1) throw ConfigError("potential.d: must be at least 1");
  }
  if (kind != "custom" && v.contains("terms")) {
    throw ConfigError("potential.terms: only allowed with kind 'custom'");
  }
  if (kind == "quartic-aniso") {
    if (d != 1) throw ConfigError("potential.d: quartic-aniso is defined for d = 1");
    return Potential::quartic_aniso();
  }
  if (kind == "harmonic") return Potential::harmonic(static_cast<std::size_t>(d));
  if (kind == "zero") return Potential::zero(static_cast<std::size_t>(d));
  if (kind == "custom") {
    if (!v.contains("terms") || !v["terms"].is_array()) {
      throw ConfigError("potential.terms: custom potentials need a terms array");
    }
    std::vector<Monomial> terms;
    for (const auto& t : v["terms"]) {
      reject_unknown(t, "potential.terms[]", {"coefficient", "exponents"});
      if (!t.contains("coefficient") || !t.contains("exponents")) {
        throw ConfigError("potential.terms[]: needs coefficient and exponents");
      }
      Monomial m;
      m.coefficient = number(t["coefficient"], "potential.terms[].coefficient");
      if (!t["exponents"].is_array()) {
        throw ConfigError("potential.terms[].exponents: expected an array");
      }
      for (const auto& e : t["exponents"]) {
        m.exponents.push_back(static_cast<int>(integer(e, "potential.terms[].exponents")));
      }
      terms.push_back(std::move(m));
    }
    return Potential::custom(static_cast<std::size_t>(d), std::move(terms));
  }
  throw ConfigError("potential.kind: unknown kind '" + kind + "'");
}

std::vector<double> parse_eps(const json& v, const std::string& key) {
  std::vector<double> eps;
  if (v.is_object()) {
    reject_unknown(v, key, {"lo", "hi", "count"});
    if (!v.contains("lo") || !v.contains("hi") || !v.contains("count")) {
      throw ConfigError(key + ": log grid needs lo, hi and count");
    }
    const double lo = number(v["lo"], key + ".lo");
    const double hi = number(v["hi"], key + ".hi");
    const long long n = integer(v["count"], key + ".count");
    if (n < 0) throw ConfigError(key + ".count: must be non-negative");
    if (!(lo > 0.0) || hi < lo || hi > 1.0) {
      throw ConfigError(key + ": need 0 < lo <= hi <= 1");
    }
    if (n == 0) return {};
    if (n == 1) {
      if (lo != hi) throw ConfigError(key + ": count 1 requires lo == hi");
      return {hi};
    }
    return log_spaced_descending(lo, hi, static_cast<int>(n));
  }
  eps = number_or_list(v, key);
  for (double e : eps) {
    if (!(e > 0.0) || e > 1.0) throw ConfigError(key + ": every eps must lie in (0, 1]");
  }
  std::sort(eps.begin(), eps.end(), std::greater<>());
  if (std::adjacent_find(eps.begin(), eps.end()) != eps.end()) {
    throw ConfigError(key + ": duplicate eps values");
  }
  return eps;
}

IntegratorConfig parse_integrator(const json& v, IntegratorConfig cfg, const std::string& key,
                                  bool allow_auto) {
  reject_unknown(v, key, {"scheme", "dt", "auto_tol", "sample_stride", "max_steps"});
  if (v.contains("scheme")) cfg.scheme = parse_scheme(text(v["scheme"], key + ".scheme"));
  if (v.contains("dt")) {
    if (v["dt"].is_string()) {
      if (text(v["dt"], key + ".dt") != "auto" || !allow_auto) {
        throw ConfigError(key + ".dt: expected a number" +
                          std::string(allow_auto ? " or \"auto\"" : ""));
      }
      cfg.dt = 0.1;
      if (!(cfg.auto_tol > 0.0)) cfg.auto_tol = 1e-10;
    } else {
      cfg.dt = number(v["dt"], key + ".dt");
      cfg.auto_tol = 0.0;
    }
  }
  if (v.contains("auto_tol")) {
    if (!(cfg.auto_tol > 0.0)) throw ConfigError(key + ".auto_tol requires dt = \"auto\"");
    cfg.auto_tol = number(v["auto_tol"], key + ".auto_tol");
    if (!(cfg.auto_tol > 0.0)) throw ConfigError(key + ".auto_tol must be positive");
  }
  if (v.contains("sample_stride")) {
    cfg.sample_stride = integer(v["sample_stride"], key + ".sample_stride");
  }
  if (v.contains("max_steps")) cfg.max_steps = integer(v["max_steps"], key + ".max_steps");
  cfg.validate();
  return cfg;
}

void read_solver_section(const json& v, BalanceProblem& prob) {
  reject_unknown(v, "solver",
                 {"method", "tol", "max_iterations", "jacobian", "polish_steps", "relaxation"});
  if (v.contains("method")) prob.solver = parse_solver(text(v["method"], "solver.method"));
  if (v.contains("tol")) prob.tol = number(v["tol"], "solver.tol");
  if (v.contains("max_iterations")) {
    prob.max_iterations = static_cast<int>(integer(v["max_iterations"], "solver.max_iterations"));
  }
  if (v.contains("jacobian")) {
    const std::string j = text(v["jacobian"], "solver.jacobian");
    if (j == "finite-difference") {
      prob.jacobian = JacobianUpdate::finite_difference;
    } else if (j == "broyden") {
      prob.jacobian = JacobianUpdate::broyden;
    } else {
      throw ConfigError("solver.jacobian: expected finite-difference or broyden");
    }
  }
  if (v.contains("polish_steps")) {
    prob.polish_steps = static_cast<int>(integer(v["polish_steps"], "solver.polish_steps"));
  }
  if (v.contains("relaxation")) prob.relaxation = number(v["relaxation"], "solver.relaxation");
}

FitSpec parse_fit(const json& v) {
  reject_unknown(v, "fit", {"mode", "window", "d"});
  FitSpec f;
  if (v.contains("mode")) f.mode = parse_fit_mode(text(v["mode"], "fit.mode"));
  if (v.contains("window")) {
    const Vec w = vector_of(v["window"], "fit.window");
    if (w.size() != 2 || !(w[0] > 0.0) || w[1] < w[0]) {
      throw ConfigError("fit.window: expected [lo, hi] with 0 < lo <= hi");
    }
    f.window = {w[0], w[1]};
  }
  if (v.contains("d")) {
    f.d = number(v["d"], "fit.d");
    if (!(f.d > 0.0)) throw ConfigError("fit.d: must be positive");
  }
  return f;
}

TrackingSpec parse_tracking(const json& v) {
  reject_unknown(v, "tracking", {"orders", "q0", "slow_horizon", "integrator", "eps"});
  TrackingSpec t;
  t.eps = log_spaced_descending(1e-3, std::pow(10.0, -1.5), 7);
  if (v.contains("orders")) {
    t.orders.clear();
    if (!v["orders"].is_array()) throw ConfigError("tracking.orders: expected an array");
    for (const auto& o : v["orders"]) {
      t.orders.push_back(static_cast<int>(integer(o, "tracking.orders")));
    }
  }
  if (v.contains("q0")) t.q0 = vector_of(v["q0"], "tracking.q0");
  if (v.contains("slow_horizon")) {
    t.slow_horizon = number(v["slow_horizon"], "tracking.slow_horizon");
  }
  if (v.contains("integrator")) {
    t.integrator =
        parse_integrator(v["integrator"], t.integrator, "tracking.integrator", false);
  }
  if (v.contains("eps")) t.eps = parse_eps(v["eps"], "tracking.eps");
  return t;
}

}  // namespace

FitMode parse_fit_mode(const std::string& name) {
  if (name == "order") return FitMode::order;
  if (name == "alpha") return FitMode::alpha;
  throw ConfigError("fit mode must be 'order' or 'alpha', got '" + name + "'");
}

std::string to_string(FitMode m) { return m == FitMode::order ? "order" : "alpha"; }

void RunConfig::validate() const {
  if (ramps.empty()) throw ConfigError("ramps: at least one ramp is required");
  if (slow_horizons.empty()) throw ConfigError("slow_horizon: at least one value is required");
  for (double a : slow_horizons) {
    if (!(a > 0.0)) throw ConfigError("slow_horizon: must be positive");
  }
  if (!(t1_slow > 0.0)) throw ConfigError("t1_slow: must be positive");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0) || eps[i] > 1.0) throw ConfigError("eps: values must lie in (0, 1]");
    if (i > 0 && !(eps[i] < eps[i - 1])) throw ConfigError("eps: must be strictly descending");
  }
  // Checks the shared solver and integrator fields with a representative instance.
  BalanceProblem probe = problem;
  probe.ramp = ramps.front();
  probe.slow_horizon = slow_horizons.front();
  if (!eps.empty()) probe.eps = eps.front();
  probe.validate();
  if (tracking.q0.size() != problem.potential.dim()) {
    throw ConfigError("tracking.q0: length must be 2d");
  }
  if (!(tracking.slow_horizon > 0.0)) throw ConfigError("tracking.slow_horizon: must be positive");
  for (int n : tracking.orders) {
    if (n < 0 || n > 2) throw ConfigError("tracking.orders: orders must lie in 0..2");
  }
}

RunConfig parse_config_text(const std::string& body) {
  json root;
  try {
    root = json::parse(body);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(root, "config",
                 {"potential", "ramps", "ramp", "slow_horizon", "eps", "q_star", "t1_slow",
                  "solver", "integrator", "output", "workers", "fit", "tracking"});
  RunConfig cfg;
  cfg.problem.q_star = {1.0, 0.5};
  cfg.tracking.eps = log_spaced_descending(1e-3, std::pow(10.0, -1.5), 7);
  if (root.contains("potential")) {
    cfg.problem.potential = parse_potential(root["potential"]);
    const std::size_t n = cfg.problem.potential.dim();
    cfg.problem.q_star.assign(n, 0.0);
    cfg.problem.q_star[0] = 1.0;
    if (n > 1) cfg.problem.q_star[1] = 0.5;
    cfg.tracking.q0 = cfg.problem.q_star;
  }
  if (root.contains("ramps") && root.contains("ramp")) {
    throw ConfigError("config: give either 'ramp' or 'ramps', not both");
  }
  if (root.contains("ramp")) cfg.ramps = {RampSpec::parse(text(root["ramp"], "ramp"))};
  if (root.contains("ramps")) {
    if (!root["ramps"].is_array()) throw ConfigError("ramps: expected an array of names");
    cfg.ramps.clear();
    for (const auto& r : root["ramps"]) cfg.ramps.push_back(RampSpec::parse(text(r, "ramps")));
  }
  if (root.contains("slow_horizon")) {
    cfg.slow_horizons = number_or_list(root["slow_horizon"], "slow_horizon");
  }
  if (root.contains("eps")) cfg.eps = parse_eps(root["eps"], "eps");
  if (root.contains("q_star")) cfg.problem.q_star = vector_of(root["q_star"], "q_star");
  if (root.contains("t1_slow")) cfg.t1_slow = number(root["t1_slow"], "t1_slow");
  if (root.contains("solver")) read_solver_section(root["solver"], cfg.problem);
  if (root.contains("integrator")) {
    cfg.problem.integrator = parse_integrator(root["integrator"], cfg.problem.integrator,
                                              "integrator", true);
  }
  if (root.contains("output")) cfg.output = text(root["output"], "output");
  if (root.contains("workers")) {
    const long long w = integer(root["workers"], "workers");
    if (w < 0) throw ConfigError("workers: must be non-negative");
    cfg.workers = static_cast<unsigned>(w);
  }
  if (root.contains("fit")) cfg.fit = parse_fit(root["fit"]);
  if (root.contains("tracking")) {
    TrackingSpec t = parse_tracking(root["tracking"]);
    if (!root["tracking"].contains("q0")) t.q0 = cfg.tracking.q0;
    cfg.tracking = std::move(t);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed reading config file '" + path + "'");
  return parse_config_text(buf.str());
}

}  // namespace optbal::cli
