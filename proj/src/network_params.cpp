#include "qnet/network_params.hpp"

#include <string>

#include "qnet/error.hpp"

namespace qnet {

void NetworkParams::validate() const {
  auto rate = [](double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0)
      throw Error(ErrorCode::InvalidParams,
                  std::string(name) + " must be a finite non-negative rate");
  };
  rate(kappa, "kappa");
  rate(gamma, "gamma");
  rate(kappa1, "kappa1");
  rate(epsilon, "epsilon");
  rate(chi, "chi");
  if (!std::isfinite(alpha) || alpha < 0.0 || alpha > 1.0)
    throw Error(ErrorCode::InvalidParams, "alpha must lie in [0, 1]");
  if (!std::isfinite(transmission_delay) || transmission_delay < 0.0)
    throw Error(ErrorCode::InvalidParams, "transmission delay T must be >= 0");
  if (!std::isfinite(control_delay) || control_delay < 0.0)
    throw Error(ErrorCode::InvalidParams, "control delay Tm must be >= 0");
  if (!std::isfinite(rho) || rho < 0.0)
    throw Error(ErrorCode::InvalidParams, "rho must be finite and >= 0");
}

}  // namespace qnet
