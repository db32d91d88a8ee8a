#include "qnet/closed_loop.hpp"

#include "qnet/quadnet.hpp"

namespace qnet {

namespace {

constexpr Eigen::Index kLoopStates = 2 * kPlantStates;

std::vector<std::string> loop_state_labels() {
  std::vector<std::string> out = labels::plant_states();
  for (Eigen::Index i = 0; i < kPlantStates; ++i) out.push_back("zc" + std::to_string(i + 1));
  return out;
}

}  // namespace

ClosedLoopSystem assemble(const DelayedStateSpaced& plant, const DelayedStateSpaced& meas,
                          const LqgController& ctrl, const NetworkParams& params) {
  if (plant.state_dim() != kPlantStates || plant.input_dim() != kPlantNoises + kControls)
    throw Error(ErrorCode::DimensionMismatch, "assemble: plant needs 20 noise + 8 control inputs");
  if (meas.state_dim() != kPlantStates || meas.output_dim() != kMeasurements ||
      meas.input_dim() != kExtendedNoises)
    throw Error(ErrorCode::DimensionMismatch, "assemble: measurement map must be 4×(8, 24)");
  if (ctrl.ac.rows() != kPlantStates || ctrl.ac.cols() != kPlantStates ||
      ctrl.bc.rows() != kPlantStates || ctrl.bc.cols() != kMeasurements ||
      ctrl.cc.rows() != kControls || ctrl.cc.cols() != kPlantStates)
    throw Error(ErrorCode::DimensionMismatch, "assemble: controller must be (8×8, 8×4, 8×8)");

  const Eigen::Index n = kPlantStates;
  DelayTermsd a_terms, b_terms, c_terms, d_terms;

  for (const auto& t : plant.a_terms) {
    MatrixX<double> m = MatrixX<double>::Zero(kLoopStates, kLoopStates);
    m.topLeftCorner(n, n) = t.matrix;
    a_terms.push_back({std::move(m), t.delay});
  }
  for (const auto& t : plant.b_terms) {
    // Noise part drives the plant rows, control part closes the loop through Cc.
    MatrixX<double> bn = MatrixX<double>::Zero(kLoopStates, kExtendedNoises);
    bn.topLeftCorner(n, kPlantNoises) = t.matrix.leftCols(kPlantNoises);
    b_terms.push_back({std::move(bn), t.delay});
    MatrixX<double> m = MatrixX<double>::Zero(kLoopStates, kLoopStates);
    m.topRightCorner(n, n) = t.matrix.rightCols(kControls) * ctrl.cc;
    a_terms.push_back({std::move(m), t.delay});
  }
  for (const auto& t : meas.c_terms) {
    MatrixX<double> m = MatrixX<double>::Zero(kLoopStates, kLoopStates);
    m.bottomLeftCorner(n, n) = ctrl.bc * t.matrix;
    a_terms.push_back({std::move(m), t.delay});
  }
  for (const auto& t : meas.d_terms) {
    MatrixX<double> m = MatrixX<double>::Zero(kLoopStates, kExtendedNoises);
    m.bottomRows(n) = ctrl.bc * t.matrix;
    b_terms.push_back({std::move(m), t.delay});
  }
  {
    MatrixX<double> m = MatrixX<double>::Zero(kLoopStates, kLoopStates);
    m.bottomRightCorner(n, n) = ctrl.ac;
    a_terms.push_back({std::move(m), 0.0});
  }

  const auto ent = entanglement_outputs(params);
  MatrixX<double> c = MatrixX<double>::Zero(2, kLoopStates);
  c.leftCols(n) = ent.c;
  c_terms.push_back({std::move(c), 0.0});
  d_terms.push_back({ent.d, 0.0});

  // What the true outputs would add: out11 += u11 (Tm), out21 += u21 (0).
  const auto& u = labels::controls();
  auto cc_row = [&](const char* name) { return ctrl.cc.row(labels::index_of(u, name)); };
  MatrixX<double> remote = MatrixX<double>::Zero(2, kLoopStates);
  MatrixX<double> local = MatrixX<double>::Zero(2, kLoopStates);
  remote.block(0, n, 1, n) = cc_row("u11.q");
  remote.block(1, n, 1, n) = cc_row("u11.p");
  local.block(0, n, 1, n) = cc_row("u21.q");
  local.block(1, n, 1, n) = -cc_row("u21.p");

  ClosedLoopSystem cl;
  cl.sys.state_labels = loop_state_labels();
  cl.sys.input_labels = labels::extended_noises();
  cl.sys.output_labels = {"x1+x2", "y1-y2"};
  cl.sys.a_terms = canonicalize(std::move(a_terms));
  cl.sys.b_terms = canonicalize(std::move(b_terms));
  cl.sys.c_terms = canonicalize(std::move(c_terms));
  cl.sys.d_terms = canonicalize(std::move(d_terms));
  cl.omitted_output_terms =
      canonicalize(DelayTermsd{{local, 0.0}, {remote, params.control_delay}});
  cl.sys.validate();
  return cl;
}

DelayedStateSpaced modified_outputs(const ClosedLoopSystem& cl) {
  for (const auto& t : cl.sys.c_terms)
    if (!t.matrix.rightCols(kPlantStates).isZero(0.0))
      throw Error(ErrorCode::InvalidParams,
                  "modified_outputs: output rows depend on controller states");
  return cl.sys;
}

}  // namespace qnet
