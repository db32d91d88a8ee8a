#pragma once

#include "qnet/delayed_state_space.hpp"
#include "qnet/network_params.hpp"
#include "qnet/solvers.hpp"

namespace qnet {

/// How the cost term ϱ([C1 C2] z)² is read.
///  - Separate: ϱ(‖C1 z1‖² + ‖C2 z2‖²), [C1 C2] acting block-diagonally on
///    z = (z1, z2). Default.
///  - Joint: ϱ(C1 z1 + C2 z2)², a single scalar row.
enum class CostStructure { Separate, Joint };

/// Whether ϱ multiplies the square (Linear) or sits inside it (Squared, ϱ²).
enum class WeightForm { Linear, Squared };

struct CostOptions {
  CostStructure structure = CostStructure::Separate;
  WeightForm weight = WeightForm::Linear;
};

struct LqgWeights {
  MatrixX<double> state_weight;    // 8×8, symmetric ≥ 0
  MatrixX<double> control_weight;  // 8×8, symmetric > 0
};

/// Classical controller ż_c = Ac z_c + Bc y_c, u_c = Cc z_c.
struct LqgController {
  MatrixX<double> ac;  // 8×8
  MatrixX<double> bc;  // 8×4
  MatrixX<double> cc;  // 8×8
};

/// Intermediate products of synthesis, kept for diagnostics and tests.
struct LqgDesign {
  LqgController controller;
  MatrixX<double> regulator_gain;  // K, u = −K ẑ
  MatrixX<double> filter_gain;     // L
  CareSolution<double> regulator;  // in normalised time units
  CareSolution<double> filter;     // in normalised time units
  double time_scale = 1.0;         // σ: the CAREs are solved with t' = σt
};

/// The 1×8 (Joint) or 2×8 (Separate) cost row(s) over the plant state order,
/// built from C1 = (1, 1, 0, 0) on z1 and C2 = (1, −1, 0, 0) on z2.
MatrixX<double> cost_rows(CostStructure structure);

/// state_weight = w·MᵀM with w = ϱ or ϱ², control_weight = I₈. Throws
/// InvalidParams for ϱ < 0.
LqgWeights build_cost(const NetworkParams& params, CostOptions options = {});

/// LQG synthesis on the zero-delay plant (delays are summed out).
///
/// `plant` must be a plant built with control inputs (20 noises + 8 controls);
/// `meas` the 4×24 measurement map. The filter uses the correlated-noise CARE
/// with process covariance B_w B_wᵀ, measurement covariance D_v D_vᵀ and cross
/// covariance B_w D_vᵀ. Both CAREs are solved in time units 1/σ with
/// σ = ‖A‖_F, which leaves X unchanged and rescales the gains exactly.
LqgDesign synthesize_design(const DelayedStateSpaced& plant, const DelayedStateSpaced& meas,
                            const LqgWeights& weights);

inline LqgController synthesize(const DelayedStateSpaced& plant,
                                const DelayedStateSpaced& meas, const LqgWeights& weights) {
  return synthesize_design(plant, meas, weights).controller;
}

}  // namespace qnet
