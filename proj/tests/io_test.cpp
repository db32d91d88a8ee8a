#include "qnet/io.hpp"

#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qnet/quadnet.hpp"

namespace qnet {
namespace {

using Eigen::MatrixXd;

TEST(IoTest, MatrixRoundTripIsExact) {
  testing::Rng rng(81);
  const MatrixXd m = rng.normal(3, 5) * 1e7;
  const json j = matrix_to_json(m);
  EXPECT_EQ(j["rows"], 3);
  EXPECT_EQ(j["cols"], 5);
  EXPECT_EQ(matrix_from_json(json::parse(j.dump())), m);
  EXPECT_THROW(matrix_from_json(json{{"rows", 2}, {"cols", 2}, {"data", {1, 2, 3}}}), Error);
}

TEST(IoTest, ControllerRoundTripIsBitIdentical) {
  const auto p = NetworkParams::ideal();
  const auto ctrl = synthesize(build_plant(p, true), build_measurement_map(p), build_cost(p));
  const auto path = std::filesystem::temp_directory_path() / "qnet_io_controller.json";
  write_json_file(path, controller_to_json(ctrl));
  const auto back = controller_from_json(read_json_file(path));
  std::filesystem::remove(path);
  EXPECT_EQ(back.ac, ctrl.ac);
  EXPECT_EQ(back.bc, ctrl.bc);
  EXPECT_EQ(back.cc, ctrl.cc);
}

TEST(IoTest, ControllerShapeChecked) {
  json j = controller_to_json({MatrixXd::Zero(8, 8), MatrixXd::Zero(8, 3), MatrixXd::Zero(8, 8)});
  EXPECT_THROW(controller_from_json(j), Error);
  j = controller_to_json({MatrixXd::Zero(8, 8), MatrixXd::Zero(8, 4), MatrixXd::Zero(8, 8)});
  j.erase("Cc");
  EXPECT_THROW(controller_from_json(j), Error);
}

TEST(IoTest, ModelRoundTrip) {
  NetworkParams p = NetworkParams::ideal();
  p.chi = 1.3975e6;
  p.alpha = 0.95;
  p.transmission_delay = 1e-6;
  p.control_delay = 2e-6;
  const auto sys = build_plant(p, true);
  const auto back = model_from_json(json::parse(model_to_json(sys).dump()));
  EXPECT_EQ(back.state_labels, sys.state_labels);
  EXPECT_EQ(back.input_labels, sys.input_labels);
  EXPECT_EQ(back.output_labels, sys.output_labels);
  EXPECT_EQ(back.delays(), sys.delays());
  ASSERT_EQ(back.b_terms.size(), sys.b_terms.size());
  for (std::size_t i = 0; i < sys.b_terms.size(); ++i) {
    EXPECT_EQ(back.b_terms[i].delay, sys.b_terms[i].delay);
    EXPECT_EQ(back.b_terms[i].matrix, sys.b_terms[i].matrix);
  }
}

TEST(IoTest, ParamsOverlayAndValidation) {
  const auto base = NetworkParams::ideal();
  const auto p = params_from_json(json{{"alpha", 0.97}, {"T", 1e-6}}, base);
  EXPECT_EQ(p.alpha, 0.97);
  EXPECT_EQ(p.transmission_delay, 1e-6);
  EXPECT_EQ(p.kappa, base.kappa);
  EXPECT_THROW(params_from_json(json{{"alpah", 0.9}}, base), Error);
  EXPECT_THROW(params_from_json(json{{"alpha", 1.5}}, base), Error);
  EXPECT_THROW(params_from_json(json{{"T", -1.0}}, base), Error);
  EXPECT_THROW(params_from_json(json{{"kappa", "big"}}, base), Error);

  const auto again = params_from_json(params_to_json(p), {});
  EXPECT_EQ(again.epsilon, p.epsilon);
  EXPECT_EQ(again.rho, p.rho);
}

TEST(IoTest, CostOptions) {
  const auto c = cost_from_json(json{{"structure", "joint"}, {"weight", "squared"}});
  EXPECT_EQ(c.structure, CostStructure::Joint);
  EXPECT_EQ(c.weight, WeightForm::Squared);
  EXPECT_THROW(cost_from_json(json{{"structure", "diagonal"}}), Error);
  EXPECT_EQ(cost_from_json(cost_to_json(c)).structure, CostStructure::Joint);
}

TEST(IoTest, ReportJson) {
  StabilityReport rep;
  rep.rightmost_roots = {{-1.0, 2.0}, {-1.0, -2.0}};
  rep.verdict = Verdict::Stable;
  rep.converged = true;
  rep.discretization_order = 80;
  const json j = report_to_json(rep);
  EXPECT_EQ(j["verdict"], "stable");
  EXPECT_EQ(j["rightmost_roots"][1]["im"], -2.0);
  EXPECT_EQ(j["spectral_abscissa"], -1.0);
}

TEST(IoTest, SpectraCsvFormat) {
  SpectraResult res;
  res.grid = FrequencyGrid(std::vector<double>{1e3, 2e3});
  res.v_plus = {1.0, 0.0};
  res.v_minus = {3.0, 0.5};
  res.v_sum = {4.0, 0.5};
  res.entangled_mask = {false, true};
  std::ostringstream os;
  write_spectra_csv(os, res);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "omega_rad_s,v_plus_db,v_minus_db,v_sum_db,entangled");
  std::getline(is, line);
  EXPECT_EQ(line, "1.00000000e+03,0.00000000e+00,4.77121255e+00,6.02059991e+00,0");
  std::getline(is, line);
  EXPECT_EQ(line.substr(0, 19), "2.00000000e+03,nan,");
  EXPECT_EQ(line.back(), '1');
  EXPECT_FALSE(std::getline(is, line));
}

TEST(IoTest, MissingFile) {
  try {
    read_json_file("/nonexistent/qnet.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
  }
}

}  // namespace
}  // namespace qnet
