#pragma once

#include "qnet/delayed_state_space.hpp"
#include "qnet/lqg.hpp"
#include "qnet/network_params.hpp"

namespace qnet {

/// Plant + controller under measurement feedback.
///
/// States are the 8 plant quadratures followed by the 8 controller states,
/// inputs are the 24 extended noises ξ̃, and the two outputs are the modified
/// entanglement combinations (x1 + x2, y1 − y2) with the controller-state
/// contributions removed.
struct ClosedLoopSystem {
  DelayedStateSpaced sys;
  /// The 2×16 controller-state terms (C12, C22 of the unmodified outputs) that
  /// were dropped from sys's output rows, with their delay tags.
  DelayTermsd omitted_output_terms;
};

/// `plant` must carry control inputs; `meas` is the 4×24 measurement map.
/// y_c inherits its delay tags from `meas`; u11/u12 reach the plant through
/// the Tm-tagged control columns of `plant`, u21/u22 undelayed.
ClosedLoopSystem assemble(const DelayedStateSpaced& plant, const DelayedStateSpaced& meas,
                          const LqgController& ctrl, const NetworkParams& params);

/// The 2-output, 24-input system used for the controlled spectra.
DelayedStateSpaced modified_outputs(const ClosedLoopSystem& cl);

}  // namespace qnet
