#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "semieff/custom_model.hpp"
#include "semieff/errors.hpp"

namespace semieff::cli {

using nlohmann::json;

namespace {

// Reads fields of one JSON object and rejects whatever was not read.
class Fields {
 public:
  Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + " must be a JSON object");
  }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string path(const std::string& key) const {
    return where_.empty() ? key : where_ + "." + key;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError("unknown config key '" + path(it.key()) + "'");
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

double as_number(const json& v, const std::string& what) {
  if (!v.is_number()) throw ConfigError(what + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(what + " must be finite");
  return d;
}

double as_positive(const json& v, const std::string& what) {
  const double d = as_number(v, what);
  if (!(d > 0.0)) throw ConfigError(what + " must be > 0");
  return d;
}

std::size_t as_count(const json& v, const std::string& what) {
  if (!v.is_number_integer() || v.get<long long>() <= 0)
    throw ConfigError(what + " must be a positive integer");
  return static_cast<std::size_t>(v.get<long long>());
}

int as_int(const json& v, const std::string& what) {
  if (!v.is_number_integer()) throw ConfigError(what + " must be an integer");
  return v.get<int>();
}

std::string as_string(const json& v, const std::string& what) {
  if (!v.is_string()) throw ConfigError(what + " must be a string");
  return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& what) {
  if (!v.is_boolean()) throw ConfigError(what + " must be true or false");
  return v.get<bool>();
}

// A number is accepted as a vector of length one.
Vec as_vec(const json& v, const std::string& what) {
  if (v.is_number()) return Vec::Constant(1, as_number(v, what));
  if (!v.is_array() || v.empty()) throw ConfigError(what + " must be a number or a nonempty array");
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = as_number(v[i], what + "[" + std::to_string(i) + "]");
  return out;
}

std::vector<Vec> as_vec_list(const json& v, const std::string& what) {
  if (!v.is_array() || v.empty()) throw ConfigError(what + " must be a nonempty array");
  std::vector<Vec> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(as_vec(v[i], what + "[" + std::to_string(i) + "]"));
  return out;
}

Vec parse_vec_flag(const std::string& text, const std::string& what) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double d = std::stod(item, &used);
      if (used != item.size() || !std::isfinite(d)) throw std::invalid_argument(item);
      vals.push_back(d);
    } catch (const std::exception&) {
      throw ConfigError(what + ": cannot parse '" + item + "' as a number");
    }
  }
  if (vals.empty()) throw ConfigError(what + " is empty");
  return Eigen::Map<Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

void read_tolerances(const json& j, Tolerances& tol) {
  Fields f(j, "tolerances");
  const std::pair<const char*, double*> slots[] = {
      {"mass", &tol.mass}, {"orth", &tol.orth},   {"path", &tol.path},   {"grad", &tol.grad},
      {"sub", &tol.sub},   {"equiv", &tol.equiv}, {"root", &tol.root},   {"lowner", &tol.lowner}};
  for (auto [key, slot] : slots)
    if (auto v = f.get(key)) *slot = as_positive(*v, f.path(key));
  f.finish();
}

void read_scheme(const json& j, SchemeConfig& s) {
  Fields f(j, "scheme");
  if (auto v = f.get("kind")) s.kind = as_string(*v, "scheme.kind");
  if (s.kind != "default" && s.kind != "gauss-legendre" && s.kind != "monte-carlo")
    throw ConfigError("scheme.kind must be default, gauss-legendre or monte-carlo");
  if (auto v = f.get("panels")) s.panels = static_cast<int>(as_count(*v, "scheme.panels"));
  if (auto v = f.get("order")) s.order = static_cast<int>(as_count(*v, "scheme.order"));
  if (auto v = f.get("lo")) s.lo = as_number(*v, "scheme.lo");
  if (auto v = f.get("hi")) s.hi = as_number(*v, "scheme.hi");
  if (auto v = f.get("nodes")) s.nodes = as_count(*v, "scheme.nodes");
  f.finish();
  if (s.lo.has_value() != s.hi.has_value())
    throw ConfigError("scheme.lo and scheme.hi must be given together");
  if (s.lo && !(*s.lo < *s.hi)) throw ConfigError("scheme.lo must be below scheme.hi");
}

void read_path(const json& j, PathOptions& p) {
  Fields f(j, "path");
  if (auto v = f.get("kind")) p.kind = as_string(*v, "path.kind");
  if (p.kind != "parametric" && p.kind != "linear")
    throw ConfigError("path.kind must be parametric or linear");
  if (auto v = f.get("tangent_scale")) p.tangent_scale = as_number(*v, "path.tangent_scale");
  if (auto v = f.get("component")) p.component = as_int(*v, "path.component");
  if (auto v = f.get("k0")) p.k0 = as_int(*v, "path.k0");
  if (auto v = f.get("k1")) p.k1 = as_int(*v, "path.k1");
  f.finish();
  if (p.k0 < 0 || p.k1 < p.k0 + 4 || p.k1 > 40)
    throw ConfigError("path grid needs 0 <= k0, k0 + 4 <= k1 <= 40");
}

void read_gradient(const json& j, GradientOptions& g) {
  Fields f(j, "gradient");
  if (auto v = f.get("functional")) g.functional = as_string(*v, "gradient.functional");
  if (auto v = f.get("cone")) g.cone = as_string(*v, "gradient.cone");
  f.finish();
  if (g.functional != "mean" && g.functional != "second-moment" && g.functional != "squared-mean")
    throw ConfigError("gradient.functional must be mean, second-moment or squared-mean");
  if (g.cone != "T1" && g.cone != "T2" && g.cone != "T3")
    throw ConfigError("gradient.cone must be T1, T2 or T3");
}

void read_godambe(const json& j, GodambeOptions& g) {
  Fields f(j, "godambe");
  if (auto v = f.get("battery")) g.battery = as_string(*v, "godambe.battery");
  if (auto v = f.get("extended")) g.extended = as_bool(*v, "godambe.extended");
  f.finish();
  if (g.battery != "default" && g.battery != "location" && g.battery != "conditioning" &&
      g.battery != "score")
    throw ConfigError("godambe.battery must be default, location, conditioning or score");
}

void read_solve(const json& j, SolveConfig& s) {
  Fields f(j, "solve");
  if (auto v = f.get("psi")) s.psi = as_string(*v, "solve.psi");
  if (auto v = f.get("n")) s.n = as_count(*v, "solve.n");
  if (auto v = f.get("theta_init")) s.theta_init = as_vec(*v, "solve.theta_init");
  f.finish();
}

void read_mc(const json& j, McConfig& m) {
  Fields f(j, "mc");
  if (auto v = f.get("psi")) m.psi = as_string(*v, "mc.psi");
  if (auto v = f.get("n")) m.n = as_count(*v, "mc.n");
  if (auto v = f.get("reps")) m.reps = as_count(*v, "mc.reps");
  if (auto v = f.get("dump_estimates")) m.dump_estimates = as_bool(*v, "mc.dump_estimates");
  f.finish();
}

void read_conditioning(const json& j, ConditioningOptions& c) {
  Fields f(j, "conditioning");
  if (auto v = f.get("theta_grid")) {
    const Vec t = as_vec(*v, "conditioning.theta_grid");
    c.theta_grid.assign(t.data(), t.data() + t.size());
  }
  if (auto v = f.get("z_grid")) c.z_grid = as_vec_list(*v, "conditioning.z_grid");
  f.finish();
}

json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace

RunConfig load_config(const std::string& command, const FlagOverrides& flags) {
  RunConfig cfg;
  cfg.command = command;
  json doc = flags.config_path.empty() ? json::object() : read_file(flags.config_path);

  std::optional<Vec> theta, z;
  json model_spec = "normal-mean";
  {
    Fields f(doc, "");
    if (auto v = f.get("model")) model_spec = *v;
    if (auto v = f.get("theta")) theta = as_vec(*v, "theta");
    if (auto v = f.get("z")) z = as_vec(*v, "z");
    if (auto v = f.get("z_grid")) cfg.z_grid = as_vec_list(*v, "z_grid");
    if (auto v = f.get("scheme")) read_scheme(*v, cfg.scheme);
    if (auto v = f.get("tolerances")) read_tolerances(*v, cfg.tol);
    if (auto v = f.get("seed")) {
      if (!v->is_number_unsigned()) throw ConfigError("seed must be a nonnegative integer");
      cfg.seed = v->get<std::uint64_t>();
    }
    if (auto v = f.get("out")) cfg.out_dir = as_string(*v, "out");
    if (auto v = f.get("path")) read_path(*v, cfg.path);
    if (auto v = f.get("gradient")) read_gradient(*v, cfg.gradient);
    if (auto v = f.get("godambe")) read_godambe(*v, cfg.godambe);
    if (auto v = f.get("solve")) read_solve(*v, cfg.solve);
    if (auto v = f.get("mc")) read_mc(*v, cfg.mc);
    if (auto v = f.get("conditioning")) read_conditioning(*v, cfg.conditioning);
    f.finish();
  }

  if (flags.model) model_spec = *flags.model;
  if (flags.theta) theta = parse_vec_flag(*flags.theta, "--theta");
  if (flags.z) z = parse_vec_flag(*flags.z, "--z");
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.out) cfg.out_dir = *flags.out;

  if (model_spec.is_string()) {
    cfg.model = find_builtin_model(model_spec.get<std::string>());
  } else if (model_spec.is_object()) {
    cfg.model = custom_model(parse_custom_model_spec(model_spec.dump()));
  } else {
    throw ConfigError("model must be a builtin model name or a custom model object");
  }
  cfg.model_label = cfg.model->name();
  cfg.theta = theta ? *theta : cfg.model->default_theta();
  cfg.z = z ? *z : cfg.model->default_z();
  cfg.model->check_parameters(cfg.theta, cfg.z);
  for (const auto& zg : cfg.z_grid) cfg.model->check_parameters(cfg.theta, zg);
  return cfg;
}

std::uint64_t require_seed(const RunConfig& cfg, const std::string& what) {
  if (!cfg.seed)
    throw ConfigError(what + ": missing required field 'seed' (set \"seed\" in the config or pass --seed)");
  return *cfg.seed;
}

SchemePtr make_scheme(const RunConfig& cfg) {
  const auto& s = cfg.scheme;
  const auto& model = *cfg.model;
  if (s.kind == "default") return model.default_scheme(cfg.theta, cfg.z);
  if (model.support().kind == Support::Kind::lattice)
    throw ConfigError("scheme.kind " + s.kind + " is not available for lattice model " +
                      model.name());
  if (s.kind == "gauss-legendre") {
    Interval range;
    if (s.lo) {
      range = {*s.lo, *s.hi};
    } else {
      range = model.default_scheme(cfg.theta, cfg.z)->truncation();
    }
    return IntegrationScheme::gauss_legendre(range, s.panels, s.order);
  }
  // Monte-Carlo nodes are draws from the model itself, which is also the proposal.
  const auto seed = require_seed(cfg, "scheme.kind monte-carlo");
  PointSet nodes = model.sample(cfg.theta, cfg.z, seed, s.nodes);
  Vec q0(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t i = 0; i < nodes.size(); ++i)
    q0[static_cast<Eigen::Index>(i)] = model.density(nodes[i], cfg.theta, cfg.z);
  return IntegrationScheme::monte_carlo(std::move(nodes), std::move(q0), seed);
}

}  // namespace semieff::cli
