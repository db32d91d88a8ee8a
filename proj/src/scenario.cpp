#include "qnet/scenario.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <system_error>

#include "qnet/closed_loop.hpp"
#include "qnet/quadnet.hpp"

namespace qnet {

namespace {

constexpr double kLowBand = 1e4;

Scenario make(std::string name, std::string title, const NetworkParams& p, ControllerSpec c) {
  Scenario s;
  s.name = std::move(name);
  s.title = std::move(title);
  s.params = p;
  s.controller = std::move(c);
  return s;
}

json bands_to_json(const std::vector<BandEdge>& bands) {
  json out = json::array();
  for (const auto& b : bands) out.push_back({{"low", b.low}, {"high", b.high}});
  return out;
}

LqgController obtain_controller(const Scenario& s, const std::filesystem::path& out_root,
                                std::optional<LqgController>& synthesized) {
  switch (s.controller.source) {
    case ControllerSource::Synthesize: {
      NetworkParams design = s.params;
      design.chi = 0.0;
      design.alpha = 1.0;
      design.transmission_delay = 0.0;
      design.control_delay = 0.0;
      synthesized = synthesize(build_plant(design, true), build_measurement_map(design),
                               build_cost(design, s.cost));
      return *synthesized;
    }
    case ControllerSource::File:
      return controller_from_json(read_json_file(s.controller.path));
    case ControllerSource::Scenario: {
      const auto path = out_root / s.controller.path / "controller.json";
      if (!std::filesystem::exists(path))
        throw Error(ErrorCode::Io, "scenario '" + s.name + "' needs " + path.string() +
                                       "; run scenario '" + s.controller.path +
                                       "' first or pass --controller");
      return controller_from_json(read_json_file(path));
    }
    case ControllerSource::None: break;
  }
  throw Error(ErrorCode::InvalidParams, "scenario has no controller");
}

void apply_scenario_block(Scenario& s, const json& block) {
  for (const auto& [key, value] : block.items()) {
    if (key == "name") continue;
    if (key == "title") s.title = value.get<std::string>();
    else if (key == "network") s.params = params_from_json(value, s.params);
    else if (key == "cost") s.cost = cost_from_json(value, s.cost);
    else if (key == "controller") s.controller = parse_controller_spec(value.get<std::string>());
    else if (key == "grid") s.grid = GridSpec::parse(value.get<std::string>());
    else if (key == "stability_order") s.stability_order = value.get<int>();
    else throw Error(ErrorCode::InvalidParams, "unknown key '" + key + "' in scenario block");
  }
}

}  // namespace

FrequencyGrid GridSpec::make(bool has_delays) const {
  if (!lo) return FrequencyGrid::standard(has_delays);
  return FrequencyGrid::logspace(*lo, *hi, n);
}

GridSpec GridSpec::parse(const std::string& text) {
  GridSpec g;
  double lo = 0, hi = 0;
  long long n = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lld%c", &lo, &hi, &n, &tail) != 3)
    throw Error(ErrorCode::InvalidParams, "grid must be 'lo:hi:n', got '" + text + "'");
  if (!(lo > 0.0) || !(hi > lo) || n < 2)
    throw Error(ErrorCode::InvalidParams, "grid needs 0 < lo < hi and n >= 2");
  g.lo = lo;
  g.hi = hi;
  g.n = static_cast<std::size_t>(n);
  return g;
}

ControllerSpec parse_controller_spec(const std::string& text) {
  if (text == "none") return {ControllerSource::None, {}};
  if (text == "synth" || text == "synthesize") return {ControllerSource::Synthesize, {}};
  if (text.starts_with("scenario:")) return {ControllerSource::Scenario, text.substr(9)};
  if (text.empty()) throw Error(ErrorCode::InvalidParams, "empty controller spec");
  return {ControllerSource::File, text};
}

json ScenarioSummary::to_json() const {
  json j = {{"name", name},
            {"controlled", controlled},
            {"uncontrolled_bands", bands_to_json(uncontrolled_bands)},
            {"stability_verdict", std::string(to_string(stability.verdict))},
            {"stability_converged", stability.converged}};
  if (!stability.rightmost_roots.empty()) j["spectral_abscissa"] = stability.spectral_abscissa();
  if (controlled) {
    j["controlled_bands"] = bands_to_json(controlled_bands);
    j["reduction_db"] = reduction_db ? json(*reduction_db) : json();
    j["reduction_db_to_1e6"] = reduction_db_to_1e6 ? json(*reduction_db_to_1e6) : json();
    j["reduction_db_1e4_1e5"] = reduction_db_1e4_1e5 ? json(*reduction_db_1e4_1e5) : json();
  }
  return j;
}

std::vector<Scenario> builtin_scenarios(const NetworkParams& base, const CostOptions& cost) {
  const ControllerSpec reuse{ControllerSource::Scenario, "fig1"};
  auto with = [&](auto&& edit) {
    NetworkParams p = base;
    edit(p);
    return p;
  };
  auto delays = [](NetworkParams& p) {
    p.transmission_delay = 1e-6;
    p.control_delay = 2e-6;
  };
  std::vector<Scenario> all = {
      make("fig1", "ideal", base, {ControllerSource::Synthesize, {}}),
      make("fig2", "delays", with([&](auto& p) { delays(p); }), reuse),
      make("fig3", "amploss", with([](auto& p) { p.chi = 1.3975e6; }), reuse),
      make("fig5", "loss3", with([](auto& p) { p.chi = 1.3975e6; p.alpha = 0.97; }), reuse),
      make("fig7", "loss5", with([](auto& p) { p.chi = 1.3975e6; p.alpha = 0.95; }), reuse),
      make("fig19", "heavyloss", with([](auto& p) { p.chi = 5.5902e6; p.alpha = 0.95; }), reuse),
      make("fig20", "heavyloss-delays",
           with([&](auto& p) { p.chi = 5.5902e6; p.alpha = 0.95; delays(p); }), reuse),
  };
  for (auto& s : all) s.cost = cost;
  return all;
}

namespace {

std::vector<Scenario> load_scenarios_unguarded(const json& config) {
  if (config.is_null()) return builtin_scenarios();
  if (!config.is_object()) throw Error(ErrorCode::InvalidParams, "config must be an object");
  for (const auto& [key, value] : config.items())
    if (key != "network" && key != "cost" && key != "scenarios")
      throw Error(ErrorCode::InvalidParams, "unknown top-level key '" + key + "'");

  const NetworkParams base = config.contains("network")
                                  ? params_from_json(config["network"], NetworkParams::ideal())
                                  : NetworkParams::ideal();
  const CostOptions cost = config.contains("cost") ? cost_from_json(config["cost"]) : CostOptions{};
  std::vector<Scenario> all = builtin_scenarios(base, cost);
  if (config.contains("scenarios")) {
    for (const auto& block : config["scenarios"]) {
      const auto name = block.at("name").get<std::string>();
      if (name.empty()) throw Error(ErrorCode::InvalidParams, "scenario name is empty");
      auto it = std::find_if(all.begin(), all.end(), [&](const auto& s) { return s.name == name; });
      if (it == all.end()) {
        Scenario s = all.front();
        s.name = name;
        s.title.clear();
        s.controller = {};
        all.push_back(std::move(s));
        it = std::prev(all.end());
      }
      apply_scenario_block(*it, block);
    }
  }
  return all;
}

}  // namespace

std::vector<Scenario> load_scenarios(const json& config) {
  return detail::json_guard("config", [&] { return load_scenarios_unguarded(config); });
}

const Scenario& find_scenario(const std::vector<Scenario>& all, const std::string& name) {
  for (const auto& s : all)
    if (s.name == name || (!s.title.empty() && name == s.name + "-" + s.title)) return s;
  throw Error(ErrorCode::InvalidParams, "unknown scenario '" + name + "'");
}

std::string format_listing(const std::vector<Scenario>& all) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-8s %-18s %-11s %-11s %-6s %-8s %-8s %s\n", "name", "title",
                "chi", "kappa", "alpha", "T", "Tm", "controller");
  os << line;
  for (const auto& s : all) {
    std::string ctrl;
    switch (s.controller.source) {
      case ControllerSource::None: ctrl = "none"; break;
      case ControllerSource::Synthesize: ctrl = "synthesize"; break;
      case ControllerSource::File: ctrl = "file:" + s.controller.path; break;
      case ControllerSource::Scenario: ctrl = "from " + s.controller.path; break;
    }
    std::snprintf(line, sizeof line, "%-8s %-18s %-11.5g %-11.5g %-6.3g %-8.3g %-8.3g %s\n",
                  s.name.c_str(), s.title.c_str(), s.params.chi, s.params.kappa, s.params.alpha,
                  s.params.transmission_delay, s.params.control_delay, ctrl.c_str());
    os << line;
  }
  return os.str();
}

ScenarioSummary run_scenario(const Scenario& s, const std::filesystem::path& out_root,
                             const RunOptions& opts) {
  namespace fs = std::filesystem;
  if (s.name.empty() || s.name.find('/') != std::string::npos)
    throw Error(ErrorCode::InvalidParams, "invalid scenario name '" + s.name + "'");
  s.params.validate();
  if (s.stability_order < 2 || s.stability_order > kMaxStabilityOrder)
    throw Error(ErrorCode::InvalidParams, "stability order must be in [2, 320]");

  std::error_code ec;
  fs::create_directories(out_root, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + out_root.string() + ": " + ec.message());
  const fs::path final_dir = out_root / s.name;
  const fs::path staging = out_root / ("." + s.name + ".partial");
  fs::remove_all(staging, ec);
  fs::create_directories(staging, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + staging.string() + ": " + ec.message());

  try {
    ScenarioSummary sum;
    sum.name = s.name;
    sum.directory = final_dir;

    const bool has_delays = s.params.transmission_delay > 0.0 || s.params.control_delay > 0.0;
    const FrequencyGrid grid = s.grid.make(has_delays);

    const auto open = build_uncontrolled_subsystems(s.params);
    const SpectraResult unc = compute_spectra(open.sys1, open.sys2, grid, opts.spectra);
    sum.uncontrolled_bands = unc.band_edges;
    write_spectra_csv(staging / "uncontrolled.csv", unc);
    write_json_file(staging / "model.json", model_to_json(build_plant(s.params, true)));

    if (s.controller.source == ControllerSource::None) {
      sum.stability = check_system(build_plant(s.params, false), s.stability_order);
    } else {
      std::optional<LqgController> synthesized;
      const LqgController ctrl = obtain_controller(s, out_root, synthesized);
      if (synthesized) write_json_file(staging / "controller.json", controller_to_json(ctrl));

      const auto cl = assemble(build_plant(s.params, true), build_measurement_map(s.params), ctrl,
                               s.params);
      sum.stability = check_closed_loop(cl, s.stability_order);
      const auto outs = modified_outputs(cl);
      const SpectraResult con =
          compute_spectra(select_outputs(outs, {0}), select_outputs(outs, {1}), grid, opts.spectra);
      write_spectra_csv(staging / "controlled.csv", con);
      sum.controlled = true;
      sum.controlled_bands = con.band_edges;

      auto window = [&](double lo, double hi) -> std::optional<double> {
        for (double w : grid.omegas())
          if (w > lo && w <= hi) return mean_reduction_db(unc, con, lo, hi);
        return std::nullopt;
      };
      sum.reduction_db = window(0.0, kLowBand);
      sum.reduction_db_to_1e6 = window(0.0, 1e6);
      sum.reduction_db_1e4_1e5 = window(kLowBand, 1e5);
    }
    write_json_file(staging / "stability.json", report_to_json(sum.stability));
    json summary = sum.to_json();
    summary["title"] = s.title;
    summary["network"] = params_to_json(s.params);
    summary["cost"] = cost_to_json(s.cost);
    write_json_file(staging / "summary.json", summary);

    fs::remove_all(final_dir, ec);
    fs::rename(staging, final_dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot move results to " + final_dir.string());
    return sum;
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
}

std::filesystem::path default_output_root(const std::filesystem::path& fallback) {
  const char* env = std::getenv("QNET_OUT_DIR");
  if (env != nullptr && *env != '\0') return env;
  return fallback;
}

}  // namespace qnet
