#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gmetric.hpp"

namespace {

using namespace gmetric;

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kInputError = 2;
constexpr int kNumericFailure = 3;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::inverse_solve_failed:
    case ErrorCode::region_violation:
    case ErrorCode::max_steps_exceeded:
    case ErrorCode::non_finite:
    case ErrorCode::division_by_zero:
    case ErrorCode::orbit_too_short:
    case ErrorCode::no_admissible_configurations:
    case ErrorCode::all_samples_degenerate:
    case ErrorCode::unbound_region_label:
      return kNumericFailure;
    default:
      return kInputError;
  }
}

Scenario resolve(const std::string& arg) {
  const auto& builtins = builtin_scenario_texts();
  if (builtins.count(arg)) return builtin_scenario(arg);
  return load_scenario(arg);
}

struct Common {
  std::string scenario;
  std::uint64_t seed = 0;
  double tol = kDefaultTol;
  std::size_t budget = 100000;
  bool timing = false;

  RunOptions options() const {
    RunOptions o;
    o.seed = seed;
    o.tol = tol;
    o.budget = budget;
    o.timing = timing;
    return o;
  }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("scenario", c.scenario, "built-in scenario name or scenario file")->required();
  cmd->add_option("--seed", c.seed, "sampling seed")->capture_default_str();
  cmd->add_option("--tol", c.tol, "relative tolerance")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--budget", c.budget, "G evaluations for the distance search")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{27}, std::numeric_limits<std::size_t>::max()));
  cmd->add_flag("--timing", c.timing, "include wall time in the report");
}

/// Stage failure first, then the expected block, then convergence, then
/// certification.
int verdict(const RunReport& rep, bool use_orbit) {
  if (rep.failure_code) return exit_code_for(*rep.failure_code);
  if (rep.expected_passed) return *rep.expected_passed ? kOk : kCheckFailed;
  if (use_orbit && rep.doc["convergence"].is_object() && rep.doc["convergence"]["status"] != "converged") {
    return kNumericFailure;
  }
  return rep.certified ? kOk : kCheckFailed;
}

int run_main(int argc, char** argv) {
  CLI::App app{"G-metric toolkit: axiom checks, contraction certificates and coincidence-point orbits"};
  app.require_subcommand(1);

  Common common;
  std::optional<double> x0;
  std::optional<std::size_t> max_steps;
  std::string format = "csv";
  std::string out_dir = ".";

  auto* check_axioms = app.add_subcommand("check-axioms", "check the G-metric axioms and derived inequalities");
  add_common(check_axioms, common);
  auto* certify = app.add_subcommand("certify", "role, contraction, anti-Lipschitz, commuting and inclusion checks");
  add_common(certify, common);
  auto* distance = app.add_subcommand("distance", "estimate G(A,B,C)");
  add_common(distance, common);
  auto* iterate = app.add_subcommand("iterate", "run the orbit and locate the coincidence-best proximity point");
  add_common(iterate, common);
  iterate->add_option("--x0", x0, "starting point in A");
  iterate->add_option("--max-steps", max_steps, "number of iterates")->check(CLI::Range(3, 1000000));
  auto* run = app.add_subcommand("run", "full pipeline");
  add_common(run, common);
  auto* list = app.add_subcommand("list-builtins", "list the compiled-in scenarios");
  auto* export_traces = app.add_subcommand("export-traces", "write the orbit traces");
  add_common(export_traces, common);
  export_traces->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  export_traces->add_option("--out", out_dir, "output directory")->capture_default_str();
  export_traces->add_option("--x0", x0, "starting point in A");
  export_traces->add_option("--max-steps", max_steps, "number of iterates")->check(CLI::Range(3, 1000000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInputError;
  }

  if (list->parsed()) {
    for (const auto& name : builtin_names()) std::cout << name << '\n';
    return kOk;
  }

  Scenario s;
  try {
    s = resolve(common.scenario);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }

  RunOptions opt = common.options();
  opt.x0 = x0;
  opt.max_steps = max_steps;
  bool use_orbit = false;
  if (check_axioms->parsed()) {
    opt.distance = opt.certify = opt.orbit = false;
  } else if (certify->parsed()) {
    opt.axioms = opt.orbit = false;
  } else if (distance->parsed()) {
    opt.axioms = opt.certify = opt.orbit = false;
  } else if (iterate->parsed() || export_traces->parsed()) {
    opt.axioms = opt.certify = false;
    opt.distance = false;
    use_orbit = true;
    if (!s.orbit.enabled) {
      std::cerr << "error: iteration is disabled for scenario " << s.name << '\n';
      return kInputError;
    }
  } else {
    use_orbit = s.orbit.enabled;
  }
  if (use_orbit && !s.orbit.enabled) use_orbit = false;
  if (iterate->parsed() || export_traces->parsed()) s.orbit.enabled = true;

  const RunReport rep = run_scenario(s, opt);

  if (export_traces->parsed()) {
    if (!rep.doc["orbit"].is_object()) {
      std::cerr << "error: " << rep.failure.value_or("no orbit") << '\n';
      return rep.failure_code ? exit_code_for(*rep.failure_code) : kNumericFailure;
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    const auto& traces = rep.doc["orbit"]["traces"];
    if (format == "json") {
      std::ofstream(std::filesystem::path(out_dir) / (s.name + "_traces.json")) << traces.dump(2) << '\n';
    } else {
      for (const auto& [name, values] : traces.items()) {
        std::vector<double> v;
        for (const auto& x : values) v.push_back(x.is_null() ? std::nan("") : x.get<double>());
        std::ofstream(std::filesystem::path(out_dir) / (s.name + "_" + name + ".csv")) << trace_csv(v);
      }
    }
    std::cout << "wrote " << traces.size() << " traces to " << out_dir << '\n';
    if (rep.failure_code) return exit_code_for(*rep.failure_code);
    return rep.doc["convergence"]["status"] == "converged" ? kOk : kNumericFailure;
  }

  std::cout << rep.dump() << '\n';
  if (rep.failure) std::cerr << "error: " << *rep.failure << '\n';
  if (check_axioms->parsed()) {
    if (rep.failure_code) return exit_code_for(*rep.failure_code);
    return rep.doc["certificates"]["g_axioms"]["passed"].get<bool>() ? kOk : kCheckFailed;
  }
  if (distance->parsed()) return rep.failure_code ? exit_code_for(*rep.failure_code) : kOk;
  if (iterate->parsed()) {
    if (rep.failure_code) return exit_code_for(*rep.failure_code);
    return rep.doc["convergence"]["status"] == "converged" ? kOk : kNumericFailure;
  }
  return verdict(rep, use_orbit);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_main(argc, argv);
  } catch (const gmetric::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericFailure;
  }
}
