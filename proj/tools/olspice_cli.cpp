// Command line harness: Monte Carlo runs of the online estimators with CSV/JSON export.
//
//   olspice run --scenario iid.json --estimators olspice:L=1,ollasso:feasible
//               --out results.csv [--trials N] [--seed S] [--zero-hold 20]
//               [--snapshots log|all] [--snr-sweep 0:30:5 --fixed-n 250]
//   olspice run --replay results.json --out again.csv
//
// Exit codes: 0 success, 2 configuration error, 3 runtime failure.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <olspice/io.hpp>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

olspice::SnrSweep parse_sweep(const std::string& text, std::int64_t fixed_n) {
  const auto parts = olspice::detail::split(text, ':');
  if (parts.size() != 3) throw olspice::ConfigError("--snr-sweep expects first:last:step");
  olspice::SnrSweep s;
  try {
    s.first = std::stod(parts[0]);
    s.last = std::stod(parts[1]);
    s.step = std::stod(parts[2]);
  } catch (const std::exception&) {
    throw olspice::ConfigError("--snr-sweep expects numeric first:last:step");
  }
  s.fixed_n = fixed_n;
  olspice::snr_range(s.first, s.last, s.step);  // validates
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online sparse estimation harness (OL-SPICE, OL-LASSO, OL-RLS)"};
  app.require_subcommand(1);

  std::string scenario_path, replay_path, estimators, out_path, snapshots = "log", sweep;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> zero_hold;
  std::int64_t fixed_n = 250;
  unsigned threads = 0;

  auto* run = app.add_subcommand("run", "Run a Monte Carlo experiment");
  auto* scen = run->add_option("--scenario", scenario_path, "Scenario config (JSON)");
  auto* rep = run->add_option("--replay", replay_path, "Re-run the request stored in a JSON sidecar");
  scen->excludes(rep);
  run->add_option("--estimators", estimators,
                  "Comma-separated list, e.g. olspice:L=1,ollasso:feasible,ollasso:infeasible,"
                  "olrls:lambda=1,olrls:oracle");
  run->add_option("--out", out_path, "Output CSV path; the JSON sidecar is written next to it")
      ->required();
  run->add_option("--trials", trials, "Monte Carlo trials (overrides the scenario)");
  run->add_option("--seed", seed, "Base seed (overrides the scenario)");
  run->add_option("--zero-hold", zero_hold, "Report zero estimates for n <= this value");
  run->add_option("--snapshots", snapshots, "Snapshot grid: log or all")
      ->check(CLI::IsMember({"log", "all"}));
  auto* sw = run->add_option("--snr-sweep", sweep, "SNR sweep first:last:step in dB");
  run->add_option("--fixed-n", fixed_n, "Sample count for the SNR sweep")->needs(sw);
  run->add_option("--threads", threads, "Worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  olspice::RunRequest req;
  try {
    if (!replay_path.empty()) {
      req = olspice::load_sidecar(replay_path);
    } else {
      if (scenario_path.empty()) throw olspice::ConfigError("run needs --scenario or --replay");
      req.scenario = olspice::load_scenario(scenario_path);
    }
    if (!estimators.empty()) req.estimators = olspice::parse_estimators(estimators);
    if (req.estimators.empty()) throw olspice::ConfigError("run needs --estimators");
    if (trials) req.options.trials = *trials;
    if (seed) req.options.seed = *seed;
    if (zero_hold) req.options.zero_hold = *zero_hold;
    if (run->count("--snapshots"))
      req.options.snapshots =
          snapshots == "all" ? olspice::SnapshotMode::all : olspice::SnapshotMode::log;
    if (!sweep.empty()) req.sweep = parse_sweep(sweep, fixed_n);
    req.options.threads = threads;
    if (req.options.trials && *req.options.trials < 1)
      throw olspice::ConfigError("--trials must be >= 1");
  } catch (const olspice::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    const auto summary = olspice::execute(req);
    const auto side = olspice::emit(summary, req, out_path);
    std::cerr << "wrote " << out_path << " and " << side.string() << " ("
              << summary.runtime_seconds << " s)\n";
  } catch (const olspice::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
