#include "semieff/cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "semieff/errors.hpp"
#include "semieff/parallel.hpp"

namespace semieff::cli {

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kInvariantViolation = 2;

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json envelope(const RunConfig& cfg) {
  return {{"command", cfg.command},
          {"model", cfg.model_label},
          {"theta", to_json(cfg.theta)},
          {"z", to_json(cfg.z)},
          {"tolerances", {{"mass", cfg.tol.mass}, {"orth", cfg.tol.orth}, {"path", cfg.tol.path},
                          {"grad", cfg.tol.grad}, {"sub", cfg.tol.sub}, {"equiv", cfg.tol.equiv},
                          {"root", cfg.tol.root}, {"lowner", cfg.tol.lowner}}},
          {"metadata", {{"tool", "semieff"},
                        {"version", "0.1.0"},
                        {"generated_at", utc_timestamp()},
                        {"threads", thread_count()}}}};
}

void emit(const RunConfig& cfg, const json& doc, const CommandOutput* out) {
  const std::string text = doc.dump(2) + "\n";
  std::cout << text;
  if (cfg.out_dir.empty()) return;
  const std::filesystem::path dir(cfg.out_dir);
  write_atomic((dir / (cfg.command + ".json")).string(), text);
  if (out)
    for (const auto& [name, table] : out->tables) write_atomic((dir / name).string(), table.str());
}

int dispatch(const std::string& command, const FlagOverrides& flags) {
  RunConfig cfg;
  try {
    cfg = load_config(command, flags);
  } catch (const Error& e) {
    std::cerr << "semieff " << command << ": configuration error: " << e.what() << "\n";
    return kConfigError;
  }
  try {
    const CommandOutput out = execute(cfg);
    json doc = envelope(cfg);
    doc["result"] = out.result;
    doc["invariants"] = out.checks.to_json();
    emit(cfg, doc, &out);
    if (!out.checks.passed()) {
      std::cerr << "semieff " << command << ": invariant violation:";
      for (const auto& n : doc["invariants"]["failed"]) std::cerr << " [" << n.get<std::string>() << "]";
      std::cerr << "\n";
      return kInvariantViolation;
    }
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << "semieff " << command << ": configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DomainError& e) {
    std::cerr << "semieff " << command << ": configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const PreconditionError& e) {
    std::cerr << "semieff " << command << ": configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const Error& e) {
    // Numerical and model failures are reported as violated invariants.
    json doc = envelope(cfg);
    doc["error"] = e.what();
    doc["invariants"] = {{"passed", false}, {"failed", json::array({"run completed"})},
                         {"checks", json::array()}};
    try {
      emit(cfg, doc, nullptr);
    } catch (const Error& w) {
      std::cerr << "semieff " << command << ": " << w.what() << "\n";
    }
    std::cerr << "semieff " << command << ": " << e.what() << "\n";
    return kInvariantViolation;
  }
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Semiparametric inference-function toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  FlagOverrides flags;
  std::string out, model, theta, z;
  std::uint64_t seed = 0;
  app.add_option("--config", flags.config_path, "JSON run config")->check(CLI::ExistingFile);
  auto* out_opt = app.add_option("--out", out, "Output directory");
  auto* seed_opt = app.add_option("--seed", seed, "Seed for stochastic steps");
  auto* model_opt = app.add_option("--model", model, "Builtin model name");
  auto* theta_opt = app.add_option("--theta", theta, "Parameter of interest, comma separated");
  auto* z_opt = app.add_option("--z", z, "Nuisance value, comma separated");

  const std::pair<const char*, const char*> commands[] = {
      {"check-path", "Differentiability diagnostics of a path through p(theta, z)"},
      {"gradient", "Verify a functional gradient and its canonical projection"},
      {"efficiency", "Efficient and information scores, F_IA and attainability"},
      {"godambe", "Godambe information and Loewner ranking of a battery"},
      {"solve", "Root of an estimating equation on a simulated sample"},
      {"mc", "Monte-Carlo replication study of an estimating equation"},
      {"conditioning-demo", "Optimality of the conditional score (Poisson pair)"},
      {"report-all", "efficiency + godambe (+ conditioning-demo) in one report"}};
  for (auto [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  if (*out_opt) flags.out = out;
  if (*seed_opt) flags.seed = seed;
  if (*model_opt) flags.model = model;
  if (*theta_opt) flags.theta = theta;
  if (*z_opt) flags.z = z;
  return dispatch(app.get_subcommands().front()->get_name(), flags);
}

}  // namespace semieff::cli
