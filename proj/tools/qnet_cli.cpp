#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qnet/quadnet.hpp"
#include "qnet/scenario.hpp"

namespace {

void print_summary(const qnet::ScenarioSummary& s) {
  std::printf("%s: stability %s", s.name.c_str(), std::string(to_string(s.stability.verdict)).c_str());
  if (!s.stability.rightmost_roots.empty())
    std::printf(" (abscissa %.4g 1/s, order %d)", s.stability.spectral_abscissa(),
                s.stability.discretization_order);
  if (s.reduction_db) std::printf(", reduction %.3f dB (w <= 1e4)", *s.reduction_db);
  const auto& bands = s.uncontrolled_bands;
  if (!bands.empty())
    std::printf(", uncontrolled entangled on [%.3g, %.3g]%s", bands[0].low, bands[0].high,
                bands.size() > 1 ? (" +" + std::to_string(bands.size() - 1) + " bands").c_str() : "");
  std::printf(" -> %s\n", s.directory.string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-node quantum network: entanglement spectra under LQG control"};
  std::string config_path, scenario_name, out_dir, grid_text, controller_text, dump_name;
  int stability_order = 0;
  unsigned threads = 0;
  bool list = false;
  app.add_option("--config", config_path, "JSON config with network/cost/scenarios sections")
      ->check(CLI::ExistingFile);
  app.add_option("--scenario", scenario_name, "scenario name, or 'all'");
  app.add_option("--out", out_dir, "output root (default $QNET_OUT_DIR or ./results)");
  app.add_option("--grid", grid_text, "frequency grid lo:hi:n (rad/s)");
  app.add_option("--controller", controller_text, "controller JSON file, 'synth', 'none' or 'scenario:<name>'");
  app.add_option("--stability-order", stability_order, "initial collocation order")
      ->check(CLI::Range(2, qnet::kMaxStabilityOrder));
  app.add_option("--threads", threads, "frequency-grid worker threads (0 = all cores)");
  app.add_flag("--list", list, "list scenarios and exit");
  app.add_option("--dump-model", dump_name, "print the plant model of a scenario as JSON");
  CLI11_PARSE(app, argc, argv);

  try {
    const qnet::json config = config_path.empty() ? qnet::json() : qnet::read_json_file(config_path);
    const auto all = qnet::load_scenarios(config);
    if (list) {
      std::cout << qnet::format_listing(all);
      return 0;
    }
    if (!dump_name.empty()) {
      const auto& s = qnet::find_scenario(all, dump_name);
      std::cout << qnet::model_to_json(qnet::build_plant(s.params, true)).dump(2) << '\n';
      return 0;
    }
    if (scenario_name.empty()) {
      std::cerr << "error: --scenario is required (see --list)\n";
      return 2;
    }

    std::vector<qnet::Scenario> selected;
    if (scenario_name == "all") selected = all;
    else selected.push_back(qnet::find_scenario(all, scenario_name));
    for (auto& s : selected) {
      if (!grid_text.empty()) s.grid = qnet::GridSpec::parse(grid_text);
      if (!controller_text.empty()) s.controller = qnet::parse_controller_spec(controller_text);
      if (stability_order > 0) s.stability_order = stability_order;
    }

    const auto root = out_dir.empty() ? qnet::default_output_root() : std::filesystem::path(out_dir);
    qnet::RunOptions opts;
    opts.spectra.threads = threads;
    for (const auto& s : selected) print_summary(qnet::run_scenario(s, root, opts));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
