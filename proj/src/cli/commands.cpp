#include "commands.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "semieff/conditioning.hpp"
#include "semieff/efficiency.hpp"
#include "semieff/errors.hpp"
#include "semieff/estimate.hpp"
#include "semieff/functional.hpp"
#include "semieff/godambe.hpp"
#include "semieff/linalg.hpp"
#include "semieff/tangent.hpp"

namespace semieff::cli {

void Checks::add(const std::string& name, bool ok, double value, double threshold) {
  items_.push_back({{"name", name}, {"passed", ok}, {"value", value}, {"threshold", threshold}});
}

bool Checks::passed() const {
  return std::all_of(items_.begin(), items_.end(),
                     [](const json& c) { return c["passed"].get<bool>(); });
}

json Checks::to_json() const {
  json failed = json::array();
  for (const auto& c : items_)
    if (!c["passed"].get<bool>()) failed.push_back(c["name"]);
  return {{"passed", passed()}, {"checks", items_}, {"failed", failed}};
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"check-path", "gradient", "efficiency",
                                                 "godambe",    "solve",    "mc",
                                                 "conditioning-demo", "report-all"};
  return names;
}

namespace {

std::string file_stem(const std::string& name) {
  std::string out;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c))) out += c;
    else if (!out.empty() && out.back() != '_') out += '_';
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

double scale_of(const Mat& m) { return std::max(1.0, m.cwiseAbs().maxCoeff()); }

// ---------------------------------------------------------------- check-path

void check_path(const RunConfig& cfg, CommandOutput& out) {
  const auto& model = *cfg.model;
  const auto& opt = cfg.path;
  if (opt.component < 0 || opt.component >= model.theta_dim())
    throw ConfigError("path.component must index a component of theta");
  const auto p = materialise(model, cfg.theta, cfg.z, make_scheme(cfg), cfg.tol.mass);
  const auto l = score(model, cfg.theta, cfg.z, p);
  const L2Vec nu = opt.tangent_scale * l[static_cast<std::size_t>(opt.component)];
  const auto ts = dyadic_grid(opt.k0, opt.k1);

  PathSpec path;
  if (opt.kind == "linear") {
    path = linear_path(p, nu, ts, cfg.tol.mass);
  } else {
    Vec dtheta = Vec::Zero(model.theta_dim());
    dtheta[opt.component] = 1.0;
    path = model_path(model, cfg.theta, cfg.z, dtheta, Vec::Zero(cfg.z.size()), p, nu, ts,
                      cfg.tol.mass);
  }
  const auto d = diagnose_path(path, cfg.tol);

  CsvTable table({"t", "l1", "l2", "sup", "weak1", "weak2"});
  json rows = json::array();
  double worst_mean = 0.0;
  for (const auto& r : d.rows) {
    table.add_row({r.t, r.l1, r.l2, r.sup, r.weak1, r.weak2});
    rows.push_back({{"t", r.t}, {"l1", r.l1}, {"l2", r.l2}, {"sup", r.sup}, {"weak1", r.weak1},
                    {"weak2", r.weak2}, {"hellinger_l2", r.hellinger_l2},
                    {"mean_remainder", r.mean_remainder}});
    worst_mean = std::max(worst_mean, std::abs(r.mean_remainder));
  }
  out.tables.emplace_back("check-path.csv", std::move(table));

  out.result = {
      {"path", {{"kind", opt.kind}, {"tangent_scale", opt.tangent_scale},
                {"component", opt.component}, {"k0", opt.k0}, {"k1", opt.k1}}},
      {"verdicts", {{"l1", to_string(d.l1)}, {"l2", to_string(d.l2)}, {"sup", to_string(d.sup)},
                    {"weak", to_string(d.weak)}, {"hellinger", to_string(d.hellinger)}}},
      {"slopes", {{"l1", d.slope_l1}, {"l2", d.slope_l2}, {"sup", d.slope_sup},
                  {"weak1", d.slope_weak1}, {"weak2", d.slope_weak2},
                  {"hellinger", d.slope_hellinger}}},
      {"rows", rows},
      {"scheme", to_string(p->scheme()->kind())},
      {"nodes", p->size()}};

  auto conv = [](Verdict v) { return v == Verdict::converging; };
  const bool chain = (!conv(d.sup) || conv(d.l2)) && (!conv(d.l2) || conv(d.weak)) &&
                     (!conv(d.weak) || conv(d.l1));
  out.checks.add("implication-chain", chain, chain ? 0.0 : 1.0, 0.0);
  const bool hell = !conv(d.l2) || conv(d.hellinger);
  out.checks.add("hellinger-co-convergence", hell, hell ? 0.0 : 1.0, 0.0);
  out.checks.add("remainder-centred", worst_mean <= cfg.tol.mass, worst_mean, cfg.tol.mass);
}

// ------------------------------------------------------------------ gradient

Functional pick_functional(const std::string& name) {
  if (name == "mean") return mean_functional();
  if (name == "second-moment") return second_moment_functional();
  return compose(
      mean_functional(), [](const Vec& m) { return Vec::Constant(1, m[0] * m[0]); },
      [](const Vec& m) { return Mat::Constant(1, 1, 2.0 * m[0]); }, "squared-mean");
}

ConeKind pick_cone(const std::string& name) {
  if (name == "T1") return ConeKind::T1;
  if (name == "T2") return ConeKind::T2;
  return ConeKind::T3;
}

void gradient(const RunConfig& cfg, CommandOutput& out) {
  const auto& model = *cfg.model;
  const auto p = materialise(model, cfg.theta, cfg.z, make_scheme(cfg), cfg.tol.mass);
  const auto phi = pick_functional(cfg.gradient.functional);
  const auto cone = tangent_cone(model, cfg.theta, cfg.z, pick_cone(cfg.gradient.cone), p);
  const auto grad = phi.candidate_gradient(p);
  const auto res = verify_gradient(phi, p, cone.closed_span(), grad, cfg.tol);

  // Uniqueness: adding a direction orthogonal to the cone must not move the
  // canonical gradient.
  L2Vec xi = complement_project(
      center(L2Vec::from_function(p, [](Point x) { return x[0] * x[0] * x[0]; })),
      cone.closed_span());
  const double xi_norm = norm(xi);
  double uniqueness_gap = 0.0;
  if (xi_norm > 1e-12) {
    xi *= 1.0 / xi_norm;
    std::vector<L2Vec> shifted;
    for (const auto& g : grad) shifted.push_back(g + xi);
    const auto canon2 = canonical_gradient(shifted, cone.closed_span());
    for (std::size_t k = 0; k < canon2.size(); ++k)
      uniqueness_gap = std::max(uniqueness_gap, norm(canon2[k] - res.canonical[k]));
  }

  json table = json::array();
  for (const auto& r : res.residuals)
    table.push_back({{"direction", r.direction}, {"component", r.component},
                     {"feasible", r.feasible}, {"slope", r.slope}, {"predicted", r.predicted},
                     {"residual", r.residual}, {"note", r.note}});
  out.result = {{"functional", phi.name},
                {"cone", to_string(cone.kind)},
                {"cone_dim", cone.closed_span().dim()},
                {"value", to_json(phi.eval(*p))},
                {"residuals", table},
                {"max_residual", res.max_residual},
                {"verified", res.passed},
                {"cov_gradient", to_json(res.cov_gradient)},
                {"cov_canonical", to_json(res.cov_canonical)},
                {"uniqueness_gap", uniqueness_gap}};

  out.checks.add("gradient-verified", res.passed, res.max_residual, cfg.tol.grad);
  const double gap = min_eigenvalue(symmetrize(res.cov_gradient - res.cov_canonical));
  out.checks.add("canonical-minimal-variance", gap >= -cfg.tol.lowner, gap, -cfg.tol.lowner);
  out.checks.add("canonical-unique", uniqueness_gap <= 1e-8, uniqueness_gap, 1e-8);
}

// ---------------------------------------------------------------- efficiency

json efficiency_json(const EfficiencyReport& r) {
  json rows = json::array();
  for (const auto& a : r.attainability.rows)
    rows.push_back({{"z", to_json(a.z)}, {"cosines", to_json(a.cosines)},
                    {"deviation", a.deviation}});
  const double worst_constraint =
      r.fia.constraint_residuals.size() ? r.fia.constraint_residuals.maxCoeff() : 0.0;
  return {{"z_ref", to_json(r.z_ref)},
          {"z_grid", to_json(r.z_grid)},
          {"J_E", to_json(r.J_E)},
          {"J_E_singular", r.J_E_singular},
          {"J_I", to_json(r.J_I)},
          {"min_eig_JE_minus_JI", r.min_eig_JE_minus_JI},
          {"ambient_dim", r.ambient_dim},
          {"fia_dim", r.fia.dim()},
          {"constraint_rank", r.fia.constraint_rank},
          {"max_constraint_residual", worst_constraint},
          {"attainability", {{"attainable", r.attainability.attainable},
                             {"worst_deviation", r.attainability.worst_deviation},
                             {"worst_z", to_json(r.attainability.worst_z)},
                             {"rows", rows}}},
          {"gradient_orthogonality", r.gradient_orthogonality},
          {"gradient_identity", r.gradient_identity}};
}

void efficiency_checks(const EfficiencyReport& r, const Tolerances& tol, Checks& checks) {
  const double s = scale_of(r.J_E);
  checks.add("J_E-psd", is_symmetric_psd(r.J_E, tol.lowner * s), min_eigenvalue(symmetrize(r.J_E)),
             -tol.lowner * s);
  checks.add("J_I-below-J_E", r.min_eig_JE_minus_JI >= -tol.lowner * s, r.min_eig_JE_minus_JI,
             -tol.lowner * s);
  if (std::isfinite(r.gradient_identity)) {
    checks.add("information-gradient-identity", r.gradient_identity <= 1e-6, r.gradient_identity,
               1e-6);
    checks.add("information-gradient-orthogonality", r.gradient_orthogonality <= 1e-6,
               r.gradient_orthogonality, 1e-6);
  }
}

void efficiency(const RunConfig& cfg, CommandOutput& out) {
  const auto r = efficiency_analysis(*cfg.model, cfg.theta, cfg.z, cfg.z_grid, cfg.tol);
  out.result = efficiency_json(r);
  efficiency_checks(r, cfg.tol, out.checks);
  out.tables.emplace_back("efficiency_J_E.csv", matrix_table(r.J_E));
  out.tables.emplace_back("efficiency_J_I.csv", matrix_table(r.J_I));
}

// ------------------------------------------------------------------- godambe

bool is_pair_model(const DensityModel& m) { return m.name() == "poisson-pair"; }

std::vector<InferenceFn> battery_for(const RunConfig& cfg, std::string which) {
  const auto& model = *cfg.model;
  if (which == "default") {
    if (is_pair_model(model)) which = "conditioning";
    else if (model.name() == "normal-mean" || model.name() == "symmetric-location")
      which = "location";
    else which = "score";
  }
  std::vector<InferenceFn> out;
  if (which == "conditioning") {
    if (!is_pair_model(model))
      throw ConfigError("the conditioning battery needs the poisson-pair model");
    return conditioning_battery(poisson_pair_factorization());
  }
  out.push_back(score_function(cfg.model));
  if (which == "location") {
    if (model.sample_dim() != 1 || model.theta_dim() != 1)
      throw ConfigError("the location battery needs a univariate location model");
    for (auto& f : location_battery()) out.push_back(std::move(f));
  }
  return out;
}

InferenceFn find_inference_fn(const RunConfig& cfg, const std::string& name) {
  if (name == "score") return score_function(cfg.model);
  std::vector<std::string> known = {"score"};
  std::vector<InferenceFn> pool;
  if (is_pair_model(*cfg.model)) pool = conditioning_battery(poisson_pair_factorization());
  else if (cfg.model->sample_dim() == 1 && cfg.model->theta_dim() == 1) pool = location_battery();
  for (auto& f : pool) {
    if (f.name == name) return f;
    known.push_back(f.name);
  }
  std::string list;
  for (const auto& k : known) list += (list.empty() ? "" : ", ") + k;
  throw ConfigError("unknown estimating function '" + name + "' for model " + cfg.model->name() +
                    " (known: " + list + ")");
}

json regularity_json(const RegularityRecord& rec) {
  json out = json::object();
  for (const auto& c : rec.checks)
    out[c.condition] = {{"passed", c.passed}, {"value", c.value}, {"threshold", c.threshold}};
  return out;
}

json report_json(const GodambeReport& r) {
  json j = {{"S", to_json(r.S)},
            {"V", to_json(r.V)},
            {"J", to_json(r.J)},
            {"regular", r.regularity.passed()},
            {"regularity", regularity_json(r.regularity)}};
  if (r.has_extended) {
    j["S_ext"] = to_json(r.S_ext);
    j["J_ext"] = to_json(r.J_ext);
    j["s_ext_deviation"] = r.s_ext_deviation;
  }
  return j;
}

void dump_matrices(const std::string& prefix, const GodambeReport& r, CommandOutput& out) {
  const std::string stem = prefix + file_stem(r.name);
  out.tables.emplace_back(stem + "_S.csv", matrix_table(r.S));
  out.tables.emplace_back(stem + "_V.csv", matrix_table(r.V));
  out.tables.emplace_back(stem + "_J.csv", matrix_table(r.J));
  if (r.has_extended) out.tables.emplace_back(stem + "_J_ext.csv", matrix_table(r.J_ext));
}

void godambe(const RunConfig& cfg, CommandOutput& out, const EfficiencyReport* eff) {
  const auto& model = *cfg.model;
  const auto candidates = battery_for(cfg, cfg.godambe.battery);
  std::optional<EfficiencyReport> own;
  bool extended = cfg.godambe.extended;
  if (extended && !eff) {
    own = efficiency_analysis(model, cfg.theta, cfg.z, cfg.z_grid, cfg.tol);
    eff = &*own;
  }
  std::string note;
  if (extended && min_eigenvalue(symmetrize(eff->J_I)) <= 1e-10 * scale_of(eff->J_E)) {
    extended = false;
    note = "J_I is singular on this grid; extended sensitivities are not available";
  }

  json members = json::array();
  if (!extended) {
    const auto p = materialise(model, cfg.theta, cfg.z, model.default_scheme(cfg.theta, cfg.z),
                               cfg.tol.mass);
    for (const auto& psi : candidates) {
      auto r = godambe_information(psi, model, cfg.theta, cfg.z, p, nullptr, cfg.tol);
      r.name = psi.name;
      json j = report_json(r);
      j["name"] = psi.name;
      j["depends_on_nuisance"] = psi.depends_on_nuisance;
      members.push_back(std::move(j));
      dump_matrices("godambe_", r, out);
      if (r.regularity.passed()) {
        const bool psd = is_symmetric_psd(r.J, cfg.tol.lowner * scale_of(r.J));
        out.checks.add(psi.name + ": J psd", psd, min_eigenvalue(symmetrize(r.J)), -cfg.tol.lowner);
      }
    }
    out.result = {{"extended", false}, {"members", members}};
    if (!note.empty()) out.result["note"] = note;
    return;
  }

  const auto p = eff->l_I.front().base();
  const auto b = optimality_battery(candidates, model, cfg.theta, cfg.z, p, eff->l_I, cfg.tol);
  const double jl_scale = scale_of(b.J_l_I);
  for (std::size_t i = 0; i < b.entries.size(); ++i) {
    const auto& e = b.entries[i];
    json j = report_json(e.report);
    json order = json::array();
    for (std::size_t k = 0; k < b.entries.size(); ++k) order.push_back(to_string(b.order[i][k]));
    j["name"] = e.name;
    j["depends_on_nuisance"] = candidates[i].depends_on_nuisance;
    j["rank"] = e.rank;
    j["dominated_by"] = e.dominated_by;
    j["J_psi_I"] = to_json(e.J_psi_I);
    j["min_eig_gap"] = e.min_eig_gap;
    j["equivalence_to_l_I"] = {{"K", to_json(e.equivalence_to_l_I.K)},
                               {"residual", e.equivalence_to_l_I.residual},
                               {"full_rank", e.equivalence_to_l_I.full_rank},
                               {"equivalent", e.equivalence_to_l_I.equivalent}};
    j["order"] = order;
    members.push_back(std::move(j));
    GodambeReport named = e.report;
    named.name = e.name;
    dump_matrices("godambe_", named, out);

    if (!e.report.regularity.passed()) continue;
    out.checks.add(e.name + ": J_ext below J_psi_I", e.min_eig_gap >= -cfg.tol.lowner * jl_scale,
                   e.min_eig_gap, -cfg.tol.lowner * jl_scale);
    if (e.equivalence_to_l_I.full_rank) {
      const double d = (e.J_psi_I - b.J_l_I).cwiseAbs().maxCoeff();
      out.checks.add(e.name + ": J_psi_I equals J_l_I", d <= 1e-6 * jl_scale, d, 1e-6 * jl_scale);
    }
    // Quasi-inference functions need not lie in F_IA, so S_ext may differ from S.
    if (!candidates[i].depends_on_nuisance)
      out.checks.add(e.name + ": S_ext matches S", e.report.s_ext_deviation < 1e-4,
                     e.report.s_ext_deviation, 1e-4);
  }
  json ranking = json::array();
  std::vector<std::size_t> idx(b.entries.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t c) { return b.entries[a].rank < b.entries[c].rank; });
  for (auto i : idx) ranking.push_back({{"name", b.entries[i].name}, {"rank", b.entries[i].rank}});
  out.result = {{"extended", true},
                {"J_l_I", to_json(b.J_l_I)},
                {"J_E", to_json(eff->J_E)},
                {"members", members},
                {"ranking", ranking}};
  out.tables.emplace_back("godambe_J_l_I.csv", matrix_table(b.J_l_I));
}

// ------------------------------------------------------------- solve and mc

Vec default_init(const Vec& theta) {
  Vec init = theta;
  for (Eigen::Index i = 0; i < init.size(); ++i) init[i] += 0.05 * std::max(1.0, std::abs(init[i]));
  return init;
}

void solve_cmd(const RunConfig& cfg, CommandOutput& out) {
  const auto seed = require_seed(cfg, "solve");
  const auto psi = find_inference_fn(cfg, cfg.solve.psi);
  const auto sample = cfg.model->sample(cfg.theta, cfg.z, seed, cfg.solve.n);
  const Vec init = cfg.solve.theta_init ? *cfg.solve.theta_init : default_init(cfg.theta);
  if (init.size() != cfg.theta.size()) throw ConfigError("solve.theta_init has the wrong length");
  SolveOptions opts;
  opts.tol_root = cfg.tol.root;
  const auto tr = solve(psi, sample, init, cfg.z, opts);

  json iterates = json::array();
  for (const auto& it : tr.iterates)
    iterates.push_back({{"theta", to_json(it.theta)}, {"residual", it.residual}, {"step", it.step}});
  out.result = {{"psi", psi.name},
                {"n", cfg.solve.n},
                {"seed", seed},
                {"theta_init", to_json(init)},
                {"theta_hat", to_json(tr.theta_hat)},
                {"converged", tr.converged},
                {"method", tr.method},
                {"jacobian", to_json(tr.jacobian)},
                {"iterates", iterates}};
  const double last = tr.iterates.empty() ? NAN : tr.iterates.back().residual;
  out.checks.add("root-converged", tr.converged, last,
                 cfg.tol.root * static_cast<double>(cfg.theta.size()));
}

json mc_json(const McReport& r, const std::string& psi) {
  return {{"psi", psi},
          {"n", r.n},
          {"reps", r.reps},
          {"seed", r.seed},
          {"theta0", to_json(r.theta0)},
          {"z0", to_json(r.z0)},
          {"empirical_cov", to_json(r.empirical_cov)},
          {"target_J_inv", to_json(r.target_J_inv)},
          {"semiparametric_bound", to_json(r.semiparametric_bound)},
          {"deviation_from_target", r.deviation_from_target},
          {"ratio_to_bound", r.ratio_to_bound},
          {"median_abs_error", r.median_abs_error},
          {"failures", r.failures},
          {"valid", r.valid}};
}

void mc(const RunConfig& cfg, CommandOutput& out) {
  const auto seed = require_seed(cfg, "mc");
  const auto psi = find_inference_fn(cfg, cfg.mc.psi);
  SolveOptions opts;
  opts.tol_root = cfg.tol.root;
  const auto r = mc_study(psi, *cfg.model, cfg.theta, cfg.z, cfg.mc.n, cfg.mc.reps, seed, opts);
  out.result = mc_json(r, psi.name);
  out.checks.add("mc-valid", r.valid, static_cast<double>(r.failures),
                 0.05 * static_cast<double>(r.reps));
  if (cfg.mc.dump_estimates) {
    std::vector<std::string> header = {"rep"};
    for (Eigen::Index j = 0; j < cfg.theta.size(); ++j)
      header.push_back("theta_" + std::to_string(j + 1));
    header.push_back("converged");
    CsvTable t(header);
    for (std::size_t i = 0; i < r.estimates.size(); ++i) {
      std::vector<CsvTable::Cell> row = {static_cast<long long>(i)};
      for (Eigen::Index j = 0; j < cfg.theta.size(); ++j)
        row.push_back(r.estimates[i].size() == cfg.theta.size() ? r.estimates[i][j] : NAN);
      row.push_back(static_cast<long long>(r.converged[i] ? 1 : 0));
      t.add_row(std::move(row));
    }
    out.tables.emplace_back("mc_estimates.csv", std::move(t));
  }
}

// ---------------------------------------------------------- conditioning-demo

void conditioning_demo(const RunConfig& cfg, CommandOutput& out) {
  if (!is_pair_model(*cfg.model))
    throw ConfigError("conditioning-demo needs a factorizable model (poisson-pair), got " +
                      cfg.model->name());
  const auto fm = poisson_pair_factorization();
  auto theta_grid = cfg.conditioning.theta_grid;
  if (theta_grid.empty()) theta_grid = {cfg.theta[0]};
  auto z_grid = cfg.conditioning.z_grid;
  if (z_grid.empty())
    for (double v : {0.5, 1.0, 2.0, 4.0}) z_grid.push_back(Vec::Constant(1, v));
  const auto rep =
      conditioning_optimality_demo(fm, theta_grid, z_grid, conditioning_battery(fm), cfg.tol);

  json points = json::array();
  CsvTable table({"theta", "z", "member", "J", "J_ext", "rank"});
  for (const auto& pt : rep.points) {
    json members = json::array();
    for (const auto& m : pt.members) {
      members.push_back({{"name", m.name},
                         {"depends_on_nuisance", m.depends_on_nuisance},
                         {"regular", m.regular},
                         {"J", m.J},
                         {"J_ext", m.J_ext},
                         {"fiber_mean", m.fiber_mean},
                         {"versus_conditional", to_string(m.versus_conditional)},
                         {"tie_with_conditional", m.tie_with_conditional},
                         {"equivalent_to_conditional", m.equivalent_to_conditional},
                         {"K", m.K},
                         {"rank", m.rank}});
      table.add_row({pt.theta, pt.z[0], m.name, m.J, m.J_ext, static_cast<long long>(m.rank)});
    }
    points.push_back({{"theta", pt.theta},
                      {"z", to_json(pt.z)},
                      {"J_conditional", pt.J_conditional},
                      {"J_closed_form", pt.J_closed_form},
                      {"J_I", pt.J_I},
                      {"fiber_mean", pt.fiber_mean},
                      {"conditional_regular", pt.conditional_regular},
                      {"conditional_weakly_first", pt.conditional_weakly_first},
                      {"ties_equivalent", pt.ties_equivalent},
                      {"pythagoras_residual", pt.pythagoras_residual},
                      {"members", members}});
    const std::string at = " at theta=" + format_double(pt.theta) + " z=" + format_double(pt.z[0]);
    out.checks.add("conditional score regular" + at, pt.conditional_regular, 0.0, 0.0);
    out.checks.add("fiber mean zero" + at, pt.fiber_mean < 1e-8, pt.fiber_mean, 1e-8);
    const double dj = std::abs(pt.J_conditional - pt.J_closed_form);
    out.checks.add("J closed form" + at, dj < 1e-6, dj, 1e-6);
    out.checks.add("conditional score weakly first" + at, pt.conditional_weakly_first, 0.0, 0.0);
    out.checks.add("ties equivalent" + at, pt.ties_equivalent, 0.0, 0.0);
  }
  out.tables.emplace_back("conditioning-demo.csv", std::move(table));
  out.result = {{"model", rep.model},
                {"completeness_declared", rep.completeness_declared},
                {"passed", rep.passed},
                {"points", points}};
}

// ---------------------------------------------------------------- report-all

void merge_checks(const std::string& section, const CommandOutput& from, Checks& into) {
  const json all = from.checks.to_json();
  for (const auto& c : all["checks"])
    into.add(section + ": " + c["name"].get<std::string>(), c["passed"].get<bool>(),
             c["value"].is_number() ? c["value"].get<double>() : NAN,
             c["threshold"].is_number() ? c["threshold"].get<double>() : NAN);
}

void report_all(const RunConfig& cfg, CommandOutput& out) {
  CommandOutput eff_out;
  const auto eff = efficiency_analysis(*cfg.model, cfg.theta, cfg.z, cfg.z_grid, cfg.tol);
  eff_out.result = efficiency_json(eff);
  efficiency_checks(eff, cfg.tol, eff_out.checks);
  eff_out.tables.emplace_back("efficiency_J_E.csv", matrix_table(eff.J_E));
  eff_out.tables.emplace_back("efficiency_J_I.csv", matrix_table(eff.J_I));

  CommandOutput god_out;
  godambe(cfg, god_out, &eff);

  out.result["efficiency"] = eff_out.result;
  out.result["godambe"] = god_out.result;
  merge_checks("efficiency", eff_out, out.checks);
  merge_checks("godambe", god_out, out.checks);
  for (auto* part : {&eff_out, &god_out})
    for (auto& t : part->tables) out.tables.push_back(std::move(t));

  if (is_pair_model(*cfg.model)) {
    CommandOutput cond_out;
    conditioning_demo(cfg, cond_out);
    out.result["conditioning-demo"] = cond_out.result;
    merge_checks("conditioning-demo", cond_out, out.checks);
    for (auto& t : cond_out.tables) out.tables.push_back(std::move(t));
  }
}

}  // namespace

CommandOutput execute(const RunConfig& cfg) {
  CommandOutput out;
  const auto& c = cfg.command;
  if (c == "check-path") check_path(cfg, out);
  else if (c == "gradient") gradient(cfg, out);
  else if (c == "efficiency") efficiency(cfg, out);
  else if (c == "godambe") godambe(cfg, out, nullptr);
  else if (c == "solve") solve_cmd(cfg, out);
  else if (c == "mc") mc(cfg, out);
  else if (c == "conditioning-demo") conditioning_demo(cfg, out);
  else if (c == "report-all") report_all(cfg, out);
  else throw ConfigError("unknown subcommand '" + c + "'");
  return out;
}

}  // namespace semieff::cli
