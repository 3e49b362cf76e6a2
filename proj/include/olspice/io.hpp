#pragma once
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "harness.hpp"

namespace olspice {

using json = nlohmann::json;

/// Stable CSV schema; the second column is "n" or "snr_db" depending on the run.
inline const std::vector<std::string>& csv_columns(const std::string& axis = "n") {
  static const std::vector<std::string> by_n{"estimator", "n", "nmse_db", "var", "bias2", "trials"};
  static const std::vector<std::string> by_snr{"estimator", "snr_db", "nmse_db", "var", "bias2",
                                               "trials"};
  return axis == "snr_db" ? by_snr : by_n;
}

struct SnrSweep {
  double first = 0.0;
  double last = 30.0;
  double step = 5.0;
  std::int64_t fixed_n = 250;
};

/// Everything needed to reproduce a run.
struct RunRequest {
  ScenarioSpec scenario;
  std::vector<EstimatorSpec> estimators;
  RunOptions options;
  std::optional<SnrSweep> sweep;
};

// ---------------------------------------------------------------------------
// Scenario config (JSON). Support indices are 1-based in files.

namespace detail {
inline void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                                const std::string& where) {
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

template <class V>
V get_or(const json& j, const char* key, V fallback) {
  return j.contains(key) ? j.at(key).get<V>() : fallback;
}
}  // namespace detail

inline json scenario_to_json(const ScenarioSpec& s) {
  json j;
  j["kind"] = to_string(s.kind);
  j["p"] = s.p;
  std::vector<Index> one_based;
  for (Index k : s.support) one_based.push_back(k + 1);
  j["support"] = one_based;
  j["amplitude_mode"] = to_string(s.amplitude_mode);
  if (s.amplitude_mode == AmplitudeMode::deterministic) j["amplitudes"] = s.amplitudes;
  j["snr_db"] = s.snr_db;
  j["n_max"] = s.n_max;
  j["seed"] = s.seed;
  j["trials"] = s.trials;
  if (s.kind == ScenarioKind::sar) j["grid_side"] = s.grid_side;
  return j;
}

inline ScenarioSpec scenario_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("scenario: expected a JSON object");
  detail::reject_unknown_keys(j, {"kind", "p", "support", "amplitudes", "amplitude_mode", "snr_db",
                                  "n_max", "seed", "trials", "grid_side"},
                              "scenario");
  ScenarioSpec s;
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "iid_gaussian") s.kind = ScenarioKind::iid_gaussian;
    else if (kind == "sinusoids") s.kind = ScenarioKind::sinusoids;
    else if (kind == "sar") s.kind = ScenarioKind::sar;
    else throw ConfigError("scenario: unknown kind '" + kind + "'");

    s.grid_side = detail::get_or<Index>(j, "grid_side", 0);
    if (s.kind == ScenarioKind::sar && !j.contains("p")) s.p = s.grid_side * s.grid_side;
    else s.p = j.at("p").get<Index>();

    s.support.clear();
    for (auto k : j.at("support").get<std::vector<Index>>()) s.support.push_back(k - 1);

    const auto mode = detail::get_or<std::string>(j, "amplitude_mode", "deterministic");
    if (mode == "deterministic") s.amplitude_mode = AmplitudeMode::deterministic;
    else if (mode == "gaussian") s.amplitude_mode = AmplitudeMode::gaussian;
    else throw ConfigError("scenario: unknown amplitude_mode '" + mode + "'");

    s.amplitudes = detail::get_or<std::vector<double>>(
        j, "amplitudes", std::vector<double>(s.support.size(), 1.0));
    if (s.amplitude_mode == AmplitudeMode::gaussian) s.amplitudes.clear();
    s.snr_db = j.at("snr_db").get<double>();
    s.n_max = j.at("n_max").get<std::int64_t>();
    s.seed = detail::get_or<std::uint64_t>(j, "seed", 1);
    s.trials = detail::get_or<int>(j, "trials", 100);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return s;
}

// ---------------------------------------------------------------------------
// Run requests

inline json request_to_json(const RunRequest& r) {
  json j;
  ScenarioSpec s = r.scenario;
  if (r.options.trials) s.trials = *r.options.trials;
  if (r.options.seed) s.seed = *r.options.seed;
  j["scenario"] = scenario_to_json(s);
  std::vector<std::string> ids;
  for (const auto& e : r.estimators) ids.push_back(e.id());
  j["estimators"] = ids;
  json o;
  o["zero_hold"] = r.options.zero_hold;
  o["snapshots"] = r.options.snapshots == SnapshotMode::log ? "log" : "all";
  if (r.options.grid) o["grid"] = *r.options.grid;
  j["options"] = o;
  if (r.sweep)
    j["snr_sweep"] = {{"first", r.sweep->first},
                      {"last", r.sweep->last},
                      {"step", r.sweep->step},
                      {"fixed_n", r.sweep->fixed_n}};
  return j;
}

inline RunRequest request_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("run request: expected a JSON object");
  RunRequest r;
  try {
    r.scenario = scenario_from_json(j.at("scenario"));
    for (const auto& id : j.at("estimators").get<std::vector<std::string>>())
      r.estimators.push_back(parse_estimator(id));
    const json& o = j.at("options");
    detail::reject_unknown_keys(o, {"zero_hold", "snapshots", "grid"}, "options");
    r.options.zero_hold = detail::get_or<std::int64_t>(o, "zero_hold", 0);
    const auto snaps = detail::get_or<std::string>(o, "snapshots", "log");
    if (snaps == "log") r.options.snapshots = SnapshotMode::log;
    else if (snaps == "all") r.options.snapshots = SnapshotMode::all;
    else throw ConfigError("options: unknown snapshot mode '" + snaps + "'");
    if (o.contains("grid")) r.options.grid = o.at("grid").get<std::vector<std::int64_t>>();
    if (j.contains("snr_sweep")) {
      const json& w = j.at("snr_sweep");
      r.sweep = SnrSweep{w.at("first").get<double>(), w.at("last").get<double>(),
                         w.at("step").get<double>(), w.at("fixed_n").get<std::int64_t>()};
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("run request: ") + e.what());
  }
  return r;
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("'" + path.string() + "': " + e.what());
  }
}

inline ScenarioSpec load_scenario(const std::filesystem::path& path) {
  try {
    return scenario_from_json(read_json_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

/// Reads the run request echoed into a JSON sidecar.
inline RunRequest load_sidecar(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  if (!j.contains("request")) throw ConfigError(path.string() + ": not a run sidecar");
  return request_from_json(j.at("request"));
}

inline RunSummary execute(const RunRequest& r) {
  if (r.sweep)
    return run_snr_sweep(r.scenario, r.estimators,
                         snr_range(r.sweep->first, r.sweep->last, r.sweep->step),
                         r.sweep->fixed_n, r.options);
  return run_experiment(r.scenario, r.estimators, r.options);
}

// ---------------------------------------------------------------------------
// Output

inline std::string summary_csv(const RunSummary& s) {
  std::ostringstream os;
  const auto& cols = csv_columns(s.axis);
  for (std::size_t k = 0; k < cols.size(); ++k) os << (k ? "," : "") << cols[k];
  os << '\n';
  for (std::size_t e = 0; e < s.estimators.size(); ++e)
    for (std::size_t g = 0; g < s.axis_values.size(); ++g) {
      const auto& pt = s.points[e][g];
      os << s.estimators[e] << ',' << format_number(s.axis_values[g]) << ','
         << format_number(pt.nmse_db) << ',' << format_number(pt.var) << ','
         << format_number(pt.bias2) << ',' << pt.trials << '\n';
    }
  return os.str();
}

inline std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  std::filesystem::path p = csv_path;
  if (p.extension() == ".json") return p.string() + ".sidecar.json";
  return p.replace_extension(".json");
}

inline json sidecar_json(const RunSummary& s, const RunRequest& r) {
  json j;
  j["request"] = request_to_json(r);
  j["columns"] = csv_columns(s.axis);
  std::vector<std::string> oracle;
  for (const auto& e : r.estimators)
    if (e.oracle_only()) oracle.push_back(e.id());
  j["oracle_only_estimators"] = oracle;
  const auto& sc = j["request"]["scenario"];
  j["seeds"] = {{"base", sc["seed"]}, {"trial_indices", {0, sc["trials"].get<int>() - 1}}};
  j["runtime_seconds"] = s.runtime_seconds;
  return j;
}

/// Writes the CSV and its JSON sidecar; returns the sidecar path.
inline std::filesystem::path emit(const RunSummary& s, const RunRequest& r,
                                  const std::filesystem::path& csv_path) {
  auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
  };
  write(csv_path, summary_csv(s));
  const auto side = sidecar_path(csv_path);
  write(side, sidecar_json(s, r).dump(2) + "\n");
  return side;
}

}  // namespace olspice
