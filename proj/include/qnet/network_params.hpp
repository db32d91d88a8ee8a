#pragma once

#include <cmath>

namespace qnet {

/// Physical constants of the two-node network. Rates are in rad/s, delays in
/// seconds. The beam-splitter reflectivity is derived from alpha, never stored.
struct NetworkParams {
  double kappa = 0.0;
  double gamma = 0.0;
  double kappa1 = 0.0;
  double epsilon = 0.0;
  double chi = 0.0;            // amplification loss
  double alpha = 1.0;          // channel transmissivity
  double transmission_delay = 0.0;  // T
  double control_delay = 0.0;       // Tm
  double rho = 0.0;            // cost weighting constant

  double beta() const { return std::sqrt(1.0 - alpha * alpha); }

  /// Throws InvalidParams when a rate is negative, alpha is outside [0,1] or a
  /// delay is negative/non-finite.
  void validate() const;

  /// κ = 1.8e7, γ = 1.5κ, κ1 = 10κ, ε/√2 = √(κκ1/2), χ = 0, α = 1, no delays,
  /// ϱ = 1e7.
  static NetworkParams ideal() {
    NetworkParams p;
    p.kappa = 1.8e7;
    p.gamma = 1.5 * p.kappa;
    p.kappa1 = 10.0 * p.kappa;
    p.epsilon = std::sqrt(2.0) * std::sqrt(p.kappa * p.kappa1 / 2.0);
    p.rho = 1e7;
    return p;
  }
};

}  // namespace qnet
