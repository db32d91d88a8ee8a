// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <unistd.h>

#include "oracles.hpp"
#include "qnet/closed_loop.hpp"
#include "qnet/dde_stability.hpp"
#include "qnet/lqg.hpp"
#include "qnet/quadnet.hpp"
#include "qnet/scenario.hpp"
#include "qnet/solvers.hpp"
#include "qnet/spectra.hpp"

namespace fs = std::filesystem;
using namespace qnet;
using Eigen::MatrixXd;
using Complex = std::complex<double>;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[1024];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Run {
  Scenario scenario;
  ScenarioSummary summary;
  SpectraResult unc, con;
  double seconds = 0;
};

// Output systems of a scenario: uncontrolled pair and, with a controller, the
// closed-loop pair.
struct Outputs {
  DelayedStateSpaced u1, u2, c1, c2;
};

Outputs outputs_for(const NetworkParams& p, const LqgController& ctrl) {
  Outputs o;
  const auto open = build_uncontrolled_subsystems(p);
  o.u1 = open.sys1;
  o.u2 = open.sys2;
  const auto out = modified_outputs(assemble(build_plant(p, true), build_measurement_map(p), ctrl, p));
  o.c1 = select_outputs(out, {0});
  o.c2 = select_outputs(out, {1});
  return o;
}

double at_omega(const SpectraResult& r, const std::vector<double>& v, double w) {
  const auto& g = r.grid.omegas();
  std::size_t best = 0;
  for (std::size_t i = 1; i < g.size(); ++i)
    if (std::abs(std::log(g[i] / w)) < std::abs(std::log(g[best] / w))) best = i;
  return v[best];
}

}  // namespace

int main() {
  const fs::path root = fs::temp_directory_path() / ("qnet_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);

  const auto all = builtin_scenarios();
  std::map<std::string, Run> runs;
  for (const auto& s : all) {
    Run r;
    r.scenario = s;
    const auto t0 = std::chrono::steady_clock::now();
    r.summary = run_scenario(s, root);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    runs[s.name] = std::move(r);
  }
  const LqgController ctrl = controller_from_json(read_json_file(root / "fig1" / "controller.json"));
  for (auto& [name, r] : runs) {
    const auto o = outputs_for(r.scenario.params, ctrl);
    const auto grid = r.scenario.grid.make(r.scenario.params.transmission_delay > 0 ||
                                           r.scenario.params.control_delay > 0);
    r.unc = compute_spectra(o.u1, o.u2, grid);
    r.con = compute_spectra(o.c1, o.c2, grid);
  }

  // 1. Ideal enhancement up to 1e6 rad/s.
  {
    const auto& r = runs.at("fig1");
    const double red = *r.summary.reduction_db_to_1e6;
    report(1, std::abs(red - 2.6) <= 0.5 && r.seconds < 60.0,
           fmt("ideal mean reduction over w <= 1e6 = %.4f dB (target 2.6 +/- 0.5, %s +/- 0.2); "
               "scenario runtime %.2f s (< 60 s)",
               red, std::abs(red - 2.6) <= 0.2 ? "within" : "outside", r.seconds));
  }

  // 2. Uncontrolled ideal entanglement band edge in (1e7, 1e8).
  {
    const auto& r = runs.at("fig1");
    bool found = false;
    std::string edges;
    for (double c : r.unc.crossings) {
      edges += fmt(" %.3g", c);
      found = found || (c > 1e7 && c < 1e8);
    }
    const auto max_sum = *std::max_element(r.unc.v_sum.begin(), r.unc.v_sum.end());
    report(2, found,
           fmt("uncontrolled ideal crossings of v_sum = 4:%s (edge required in (1e7, 1e8)); "
               "v_sum(1e7) = %.4f, v_sum(1e8) = %.4f, max on [1e3, 1e9] = %.7f",
               edges.empty() ? " none" : edges.c_str(), at_omega(r.unc, r.unc.v_sum, 1e7),
               at_omega(r.unc, r.unc.v_sum, 1e8), max_sum));
  }

  // 3. V±(1e10) = 2 within 0.05 dB for every scenario.
  {
    double worst = 0;
    std::string where;
    for (const auto& [name, r] : runs) {
      const auto o = outputs_for(r.scenario.params, ctrl);
      for (const auto* sys : {&o.u1, &o.u2, &o.c1, &o.c2}) {
        const double dev = std::abs(to_db(row_power(*sys, 1e10)) - to_db(2.0));
        if (dev > worst) {
          worst = dev;
          where = name;
        }
      }
    }
    report(3, worst <= 0.05,
           fmt("max |V(1e10) - 3.0103 dB| over all scenarios, both outputs, with and without "
               "control = %.2e dB (%s)",
               worst, where.c_str()));
  }

  // 4. Delay robustness.
  {
    const auto& r = runs.at("fig2");
    const bool stable = r.summary.stability.verdict == Verdict::Stable;
    const double low = *r.summary.reduction_db;
    const double mid = *r.summary.reduction_db_1e4_1e5;
    const double high = mean_reduction_db(r.unc, r.con, 1e5, 1e9);
    report(4, stable && std::abs(low - 2.6) <= 0.5 && std::abs(mid - 1.0) <= 0.5,
           fmt("delays: verdict %s (abscissa %.4g 1/s, order %d); reduction w <= 1e4 = %.4f dB "
               "(2.6 +/- 0.5); (1e4, 1e5] = %.4f dB (1 +/- 0.5); above 1e5 = %.4f dB (info)",
               std::string(to_string(r.summary.stability.verdict)).c_str(),
               r.summary.stability.spectral_abscissa(), r.summary.stability.discretization_order,
               low, mid, high));
  }

  // 5. Amplification loss.
  {
    const double red = *runs.at("fig3").summary.reduction_db;
    report(5, std::abs(red - 1.4) <= 0.5,
           fmt("chi = 1.3975e6: low-frequency reduction = %.4f dB (1.4 +/- 0.5)", red));
  }

  // 6. Loss monotonicity at 1e4 rad/s.
  {
    const char* names[] = {"fig3", "fig5", "fig7"};
    double prev = -INFINITY;
    bool mono = true, below = true;
    std::string detail;
    for (const char* n : names) {
      const auto& r = runs.at(n);
      const double u = at_omega(r.unc, r.unc.v_sum, 1e4);
      const double c = at_omega(r.con, r.con.v_sum, 1e4);
      mono = mono && u >= prev;
      below = below && c < u;
      prev = u;
      double excess = -INFINITY;
      for (std::size_t i = 0; i < r.unc.grid.size(); ++i)
        excess = std::max(excess, to_db(r.con.v_sum[i]) - to_db(r.unc.v_sum[i]));
      detail += fmt(" alpha=%.2f: unc %.4f ctrl %.4f (max ctrl - unc on grid %+.4f dB);",
                    r.scenario.params.alpha, u, c, excess);
    }
    report(6, mono && below,
           fmt("v_sum at 1e4 rad/s, chi = 1.3975e6:%s nondecreasing %s, controlled below %s",
               detail.c_str(), mono ? "yes" : "no", below ? "yes" : "no"));
  }

  // 7. Heavy loss with delays.
  {
    const auto& r = runs.at("fig20");
    const bool stable = r.summary.stability.verdict == Verdict::Stable;
    bool below = true;
    double worst = -INFINITY;
    for (std::size_t i = 0; i < r.unc.grid.size() && r.unc.grid[i] <= 1e4; ++i) {
      below = below && r.con.v_sum[i] <= r.unc.v_sum[i];
      worst = std::max(worst, to_db(r.con.v_sum[i]) - to_db(r.unc.v_sum[i]));
    }
    report(7, stable && below,
           fmt("heavy loss + delays: verdict %s (abscissa %.4g 1/s); max controlled - "
               "uncontrolled over w <= 1e4 = %.4f dB",
               std::string(to_string(r.summary.stability.verdict)).c_str(),
               r.summary.stability.spectral_abscissa(), worst));
  }

  // 8. Solver suite.
  {
    testing::Rng rng(2024);
    double worst_care = 0;
    bool hurwitz = true, solved = true;
    for (int i = 0; i < 100; ++i) {
      const auto inst = testing::random_care(rng, rng.integer(1, 8), i % 2 == 1);
      const CareProblem<double> p{inst.a, inst.b, inst.q, inst.r, inst.s};
      try {
        const auto sol = solve_care(p);
        worst_care = std::max(worst_care,
                              care_residual(p, sol.x).norm() / std::max(1.0, sol.x.norm()));
        hurwitz = hurwitz && testing::max_real_eig(p.a - p.b * sol.gain) < 0;
      } catch (const Error&) {
        solved = false;
      }
    }
    double worst_lyap = 0;
    for (int i = 0; i < 100; ++i) {
      const Eigen::Index n = rng.integer(1, 6);
      const MatrixXd a = rng.hurwitz(n);
      const MatrixXd g = rng.normal(n, n);
      const MatrixXd q = g * g.transpose();
      const MatrixXd oracle = testing::kron_lyapunov(a, q);
      worst_lyap = std::max(worst_lyap, (solve_lyapunov(a, q) - oracle).norm() / oracle.norm());
    }
    double worst_sep = 0;
    for (double alpha : {1.0, 0.97, 0.95}) {
      NetworkParams p = NetworkParams::ideal();
      p.alpha = alpha;
      p.chi = alpha < 1 ? 1.3975e6 : 0.0;
      const auto plant = build_plant(p, true);
      const auto meas = build_measurement_map(p);
      const auto d = synthesize_design(plant, meas, build_cost(p));
      auto expected = testing::eigenvalues(plant.a() - plant.b().rightCols(kControls) * d.regulator_gain);
      const auto filt = testing::eigenvalues(plant.a() - d.filter_gain * meas.c());
      expected.insert(expected.end(), filt.begin(), filt.end());
      const auto cl = assemble(plant, meas, d.controller, p);
      worst_sep = std::max(worst_sep,
                           testing::match_spectra(testing::eigenvalues(cl.sys.a()), expected));
    }
    report(8, solved && hurwitz && worst_care <= 1e-8 && worst_lyap <= 1e-9 && worst_sep <= 1e-6,
           fmt("100 random CAREs n<=8: all solved %s, max rel residual %.2e, all Hurwitz %s; "
               "Lyapunov vs Kronecker max rel %.2e; separation eigenvalues max rel %.2e",
               solved ? "yes" : "no", worst_care, hurwitz ? "yes" : "no", worst_lyap, worst_sep));
  }

  // 9. DDE oracle roots.
  {
    auto terms = [](double c) {
      return DelayTermsd{{MatrixXd::Constant(1, 1, c), 1.0}};
    };
    const Complex neg = testing::scalar_newton([](Complex s) { return s + std::exp(-s); },
                                               [](Complex s) { return 1.0 - std::exp(-s); },
                                               Complex(-0.3, 1.3));
    const Complex pos = testing::scalar_newton([](Complex s) { return s - std::exp(-s); },
                                               [](Complex s) { return 1.0 + std::exp(-s); },
                                               Complex(0.5, 0.0));
    const auto rn = rightmost_roots(terms(-1.0), 2, kDefaultStabilityOrder);
    const auto rp = rightmost_roots(terms(1.0), 1, kDefaultStabilityOrder);
    const double e1 = std::max(std::abs(rn.rightmost_roots[0] - Complex(-0.3181, 1.3372)),
                               std::abs(rn.rightmost_roots[1] - Complex(-0.3181, -1.3372)));
    const double e2 = std::abs(rp.rightmost_roots[0] - 0.5671);
    const double o1 = std::abs(rn.rightmost_roots[0] - neg), o2 = std::abs(rp.rightmost_roots[0] - pos);
    report(9, e1 <= 1e-4 && e2 <= 1e-4 && o1 <= 1e-4 && o2 <= 1e-4,
           fmt("s+e^-s: %.6f%+.6fi (|err| vs -0.3181+/-1.3372i %.1e, vs Newton %.1e); "
               "s-e^-s: %.6f (|err| vs 0.5671 %.1e, vs Newton %.1e)",
               rn.rightmost_roots[0].real(), rn.rightmost_roots[0].imag(), e1, o1,
               rp.rightmost_roots[0].real(), e2, o2));
  }

  // 10. Structural properties.
  {
    // Decoupling: no coupling between the two quadrature sets in any term.
    bool decoupled = true;
    const auto& x = labels::plant_states();
    for (const auto& [name, r] : runs) {
      const auto& p = r.scenario.params;
      const auto cl = assemble(build_plant(p, true), build_measurement_map(p), ctrl, p);
      auto terms = build_plant(p, true).a_terms;
      terms.insert(terms.end(), cl.sys.a_terms.begin(), cl.sys.a_terms.end());
      for (const auto& t : terms)
        for (const auto& a : labels::subsystem1_states())
          for (const auto& b : labels::subsystem2_states())
            decoupled = decoupled && t.matrix(labels::index_of(x, a), labels::index_of(x, b)) == 0 &&
                        t.matrix(labels::index_of(x, b), labels::index_of(x, a)) == 0;
    }

    // Zeroed controller output reproduces the open loop.
    double worst_zero = 0;
    LqgController zero = ctrl;
    zero.cc.setZero();
    for (const auto& [name, r] : runs) {
      const auto o = outputs_for(r.scenario.params, zero);
      for (double w : FrequencyGrid::logspace(1e3, 1e9, 121).omegas()) {
        const double a = row_power(o.u1, w), b = row_power(o.c1, w);
        const double c = row_power(o.u2, w), d = row_power(o.c2, w);
        worst_zero = std::max({worst_zero, std::abs(a - b) / a, std::abs(c - d) / c});
      }
    }

    // V+ = V− in the ideal case.
    double worst_sym = 0;
    {
      const auto& r = runs.at("fig1");
      for (std::size_t i = 0; i < r.unc.grid.size(); ++i) {
        worst_sym = std::max(worst_sym, std::abs(r.unc.v_plus[i] - r.unc.v_minus[i]) / r.unc.v_plus[i]);
        worst_sym = std::max(worst_sym, std::abs(r.con.v_plus[i] - r.con.v_minus[i]) / r.con.v_plus[i]);
      }
    }

    // Realness of the spectra and conjugate symmetry on every scenario grid.
    double worst_imag = 0, worst_conj = 0;
    for (const auto& [name, r] : runs) {
      const auto o = outputs_for(r.scenario.params, ctrl);
      for (double w : r.unc.grid.omegas())
        for (const auto* sys : {&o.u1, &o.u2, &o.c1, &o.c2}) {
          const auto h = freq_response(*sys, w);
          const auto hm = freq_response(*sys, -w);
          const Complex tr = (h * h.adjoint()).trace();
          worst_imag = std::max(worst_imag, std::abs(tr.imag()) / std::abs(tr));
          worst_conj = std::max(worst_conj, (hm - h.conjugate()).norm() / h.norm());
        }
    }
    report(10,
           decoupled && worst_zero <= 1e-10 && worst_sym <= 1e-6 && worst_imag <= 1e-12 &&
               worst_conj <= 1e-12,
           fmt("decoupling blocks zero %s; zeroed-controller vs open loop max rel %.2e; ideal "
               "|V+ - V-|/V+ max %.2e; max rel imag(trace) %.2e; max rel |H(-iw) - conj H(iw)| %.2e",
               decoupled ? "yes" : "no", worst_zero, worst_sym, worst_imag, worst_conj));
  }

  fs::remove_all(root);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
