#pragma once

#include <string>
#include <vector>

#include "qnet/delayed_state_space.hpp"
#include "qnet/network_params.hpp"

namespace qnet {

// Quadrature model of the two-node network.
//
// Full plant state order: (a1q, a1p, b1q, b1p, a2q, a2p, b2q, b2p).
// Noise inputs are ξ1 (the 10 fields driving {a1q, a2q, b1q, b2p}) followed by
// ξ2 (the 10 fields driving {a1p, a2p, b1p, b2q}); the measurement map adds
// the four homodyne vacuum quadratures (h1.q, h1.p, h2.q, h2.p) after them.
// Control inputs follow u_c = (u11.q, u11.p, u21.q, u21.p, u12.q, u12.p,
// u22.q, u22.p).

namespace labels {

const std::vector<std::string>& plant_states();
const std::vector<std::string>& subsystem1_states();  // a1q a2q b1q b2p
const std::vector<std::string>& subsystem2_states();  // a1p a2p b1p b2q
const std::vector<std::string>& noise1();             // ξ1
const std::vector<std::string>& noise2();             // ξ2
const std::vector<std::string>& plant_noises();       // ξ = (ξ1, ξ2)
const std::vector<std::string>& extended_noises();    // ξ̃ = (ξ, h)
const std::vector<std::string>& controls();           // u_c
const std::vector<std::string>& plant_outputs();
const std::vector<std::string>& measurements();       // y_c

/// Index of `name` in `list`; throws InvalidParams if absent.
Eigen::Index index_of(const std::vector<std::string>& list, const std::string& name);

}  // namespace labels

inline constexpr Eigen::Index kPlantStates = 8;
inline constexpr Eigen::Index kPlantNoises = 20;
inline constexpr Eigen::Index kExtendedNoises = 24;
inline constexpr Eigen::Index kControls = 8;
inline constexpr Eigen::Index kMeasurements = 4;

struct SubsystemPair {
  DelayedStateSpaced sys1;  // output ξq_out,11 + ξq_out,21
  DelayedStateSpaced sys2;  // output ξp_out,11 − ξp_out,21
};

/// 8-state quadrature plant. Inputs are the 20 plant noises, followed by the 8
/// control inputs when `with_control_inputs` is set. Outputs are the
/// quadratures of ξ_out,11, ξ_out,21, ξ_out,12, ξ_out,22 in that order.
/// Interconnection terms carry delay T; u11/u12 columns carry Tm.
DelayedStateSpaced build_plant(const NetworkParams& params, bool with_control_inputs);

/// The two decoupled 4-state systems with their sum/difference outputs.
SubsystemPair build_uncontrolled_subsystems(const NetworkParams& params);

/// y_c = (y_c,11, y_c,12, y_c,21, y_c,22) from dual homodyne detection of
/// ξ_out,22 (detector 2) and ξ_out,12 (detector 1). Inputs are the 24
/// extended noises; rows y_c,21 and y_c,22 carry delay T.
DelayedStateSpaced build_measurement_map(const NetworkParams& params);

/// The 2×8 entanglement output rows over the plant states and their 2×24
/// feedthrough over ξ̃ (√γ convention; no delays).
struct EntanglementOutputs {
  MatrixX<double> c;  // 2×8
  MatrixX<double> d;  // 2×24
};
EntanglementOutputs entanglement_outputs(const NetworkParams& params);

}  // namespace qnet
