#pragma once

// Serialisation of models, controllers, reports and spectra tables.
//
// Structured files are JSON. Doubles are written with round-trip precision so
// a controller exported and re-imported is bit-identical.

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "qnet/dde_stability.hpp"
#include "qnet/error.hpp"
#include "qnet/delayed_state_space.hpp"
#include "qnet/lqg.hpp"
#include "qnet/network_params.hpp"
#include "qnet/spectra.hpp"

namespace qnet {

using nlohmann::json;

namespace detail {
// Runs a parser and reports malformed JSON (missing keys, wrong types) as
// InvalidParams instead of leaking nlohmann exceptions.
template <typename F>
auto json_guard(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidParams, std::string(what) + ": " + e.what());
  }
}
}  // namespace detail

json matrix_to_json(const MatrixX<double>& m);
MatrixX<double> matrix_from_json(const json& j);

/// Keys: kappa, gamma, kappa1, epsilon, chi, alpha, T, Tm, rho. Missing keys
/// keep the values already in `base`; unknown keys are rejected.
NetworkParams params_from_json(const json& j, NetworkParams base = {});
json params_to_json(const NetworkParams& p);

CostOptions cost_from_json(const json& j, CostOptions base = {});
json cost_to_json(const CostOptions& c);

/// Model dump: labels plus every delay-tagged term of A, B, C, D.
json model_to_json(const DelayedStateSpaced& sys);
DelayedStateSpaced model_from_json(const json& j);

json controller_to_json(const LqgController& ctrl);
LqgController controller_from_json(const json& j);

json report_to_json(const StabilityReport& rep);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

/// Columns omega_rad_s, v_plus_db, v_minus_db, v_sum_db, entangled; values in
/// scientific notation with 9 significant digits, non-positive values as nan.
void write_spectra_csv(std::ostream& os, const SpectraResult& res);
void write_spectra_csv(const std::filesystem::path& path, const SpectraResult& res);

}  // namespace qnet
