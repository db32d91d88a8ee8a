#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qnet/dde_stability.hpp"
#include "qnet/io.hpp"
#include "qnet/lqg.hpp"
#include "qnet/network_params.hpp"
#include "qnet/spectra.hpp"

namespace qnet {

enum class ControllerSource {
  None,        // uncontrolled only
  Synthesize,  // design on the lossless, delay-free version of params
  File,        // controller JSON at `path`
  Scenario,    // controller.json written by scenario `path` in the same output root
};

struct ControllerSpec {
  ControllerSource source = ControllerSource::None;
  std::string path;
};

struct GridSpec {
  /// Unset means FrequencyGrid::standard (densified when delays are present).
  std::optional<double> lo, hi;
  std::size_t n = 0;

  FrequencyGrid make(bool has_delays) const;
  /// Parses "lo:hi:n".
  static GridSpec parse(const std::string& text);
};

struct Scenario {
  std::string name;
  std::string title;
  NetworkParams params;
  CostOptions cost;
  ControllerSpec controller;
  GridSpec grid;
  int stability_order = kDefaultStabilityOrder;
};

struct ScenarioSummary {
  std::string name;
  std::filesystem::path directory;
  bool controlled = false;
  /// Mean (uncontrolled − controlled) v_sum in dB over ω ≤ 1e4 rad/s.
  std::optional<double> reduction_db;
  std::optional<double> reduction_db_to_1e6;
  std::optional<double> reduction_db_1e4_1e5;
  std::vector<BandEdge> uncontrolled_bands;
  std::vector<BandEdge> controlled_bands;
  StabilityReport stability;

  json to_json() const;
};

/// The built-in figure scenarios in run order (fig1 first, since later ones
/// load its controller), each expressed as edits of `base`.
std::vector<Scenario> builtin_scenarios(const NetworkParams& base = NetworkParams::ideal(),
                                        const CostOptions& cost = {});

/// Built-ins overlaid with a config document:
///
///   { "network": {...}, "cost": {...},
///     "scenarios": [ { "name": ..., "network": {...}, "controller": ...,
///                      "grid": "lo:hi:n", "stability_order": n }, ... ] }
///
/// Top-level "network"/"cost" replace the base every built-in is derived from; a
/// scenario block whose name matches a built-in overrides it, otherwise it is
/// appended. Controller is "none", "synthesize", "scenario:<name>" or a path.
std::vector<Scenario> load_scenarios(const json& config);

/// Looks up by exact name or by "<name>-<suffix>" (e.g. "fig1-ideal").
const Scenario& find_scenario(const std::vector<Scenario>& all, const std::string& name);

ControllerSpec parse_controller_spec(const std::string& text);

/// One line per scenario with its parameter table.
std::string format_listing(const std::vector<Scenario>& all);

struct RunOptions {
  SpectraOptions spectra;
};

/// Runs build → (synthesize | load) → assemble → spectra + stability and
/// writes into <out_root>/<name>/:
///   uncontrolled.csv, controlled.csv, stability.json, controller.json,
///   model.json, summary.json
/// Files are staged in a sibling temporary directory and moved into place on
/// success; on any error nothing is left behind and the error propagates.
ScenarioSummary run_scenario(const Scenario& s, const std::filesystem::path& out_root,
                             const RunOptions& opts = {});

/// QNET_OUT_DIR if set and non-empty, otherwise `fallback`.
std::filesystem::path default_output_root(const std::filesystem::path& fallback = "results");

}  // namespace qnet
