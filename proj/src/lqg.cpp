#include "qnet/lqg.hpp"

#include <cmath>

#include "qnet/quadnet.hpp"

namespace qnet {

MatrixX<double> cost_rows(CostStructure structure) {
  const auto& states = labels::plant_states();
  auto idx = [&](const char* name) { return labels::index_of(states, name); };
  if (structure == CostStructure::Joint) {
    MatrixX<double> m = MatrixX<double>::Zero(1, kPlantStates);
    m(0, idx("a1q")) = 1.0;
    m(0, idx("a2q")) = 1.0;
    m(0, idx("a1p")) = 1.0;
    m(0, idx("a2p")) = -1.0;
    return m;
  }
  MatrixX<double> m = MatrixX<double>::Zero(2, kPlantStates);
  m(0, idx("a1q")) = 1.0;
  m(0, idx("a2q")) = 1.0;
  m(1, idx("a1p")) = 1.0;
  m(1, idx("a2p")) = -1.0;
  return m;
}

LqgWeights build_cost(const NetworkParams& params, CostOptions options) {
  if (!(params.rho >= 0.0) || !std::isfinite(params.rho))
    throw Error(ErrorCode::InvalidParams, "build_cost: rho must be finite and >= 0");
  const double w = options.weight == WeightForm::Squared ? params.rho * params.rho : params.rho;
  const MatrixX<double> m = cost_rows(options.structure);
  return {w * m.transpose() * m, MatrixX<double>::Identity(kControls, kControls)};
}

LqgDesign synthesize_design(const DelayedStateSpaced& plant, const DelayedStateSpaced& meas,
                            const LqgWeights& weights) {
  if (plant.state_dim() != kPlantStates || plant.input_dim() != kPlantNoises + kControls)
    throw Error(ErrorCode::DimensionMismatch,
                "synthesize: plant must have 8 states and 20 noise + 8 control inputs");
  if (meas.state_dim() != kPlantStates || meas.output_dim() != kMeasurements ||
      meas.input_dim() != kExtendedNoises)
    throw Error(ErrorCode::DimensionMismatch,
                "synthesize: measurement map must be 4 outputs over 8 states and 24 noises");
  if (weights.state_weight.rows() != kPlantStates || weights.state_weight.cols() != kPlantStates ||
      weights.control_weight.rows() != kControls || weights.control_weight.cols() != kControls)
    throw Error(ErrorCode::DimensionMismatch, "synthesize: weight dimensions");

  const MatrixX<double> a = plant.a();
  const MatrixX<double> b_all = plant.b();
  const MatrixX<double> b_u = b_all.rightCols(kControls);
  MatrixX<double> b_w = MatrixX<double>::Zero(kPlantStates, kExtendedNoises);
  b_w.leftCols(kPlantNoises) = b_all.leftCols(kPlantNoises);
  const MatrixX<double> c = meas.c();
  const MatrixX<double> d_v = meas.d();

  const MatrixX<double> v = d_v * d_v.transpose();
  const MatrixX<double> w = b_w * b_w.transpose();
  const MatrixX<double> s = b_w * d_v.transpose();
  if (Eigen::FullPivLU<MatrixX<double>>(v).rank() < kMeasurements)
    throw Error(ErrorCode::DegenerateMeasurement, "synthesize: D_v D_vᵀ is singular");

  const double sigma = std::max(a.norm(), 1.0);
  const double root = std::sqrt(sigma);

  LqgDesign design;
  design.time_scale = sigma;
  design.regulator = solve_care<double>(
      {a / sigma, b_u / root, weights.state_weight / sigma, weights.control_weight, {}});
  design.filter = solve_care<double>(
      {a.transpose() / sigma, c.transpose() / root, w / sigma, v, s / root});

  design.regulator_gain = root * design.regulator.gain;
  design.filter_gain = root * design.filter.gain.transpose();

  const MatrixX<double>& k = design.regulator_gain;
  const MatrixX<double>& l = design.filter_gain;
  design.controller.ac = a - b_u * k - l * c;
  design.controller.bc = l;
  design.controller.cc = -k;

  if (!(spectral_abscissa(design.controller.ac) < 0.0))
    throw Error(ErrorCode::NoStabilizingSolution, "synthesize: controller Ac is not Hurwitz");
  return design;
}

}  // namespace qnet
