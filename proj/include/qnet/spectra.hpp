#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qnet/delayed_state_space.hpp"
#include "qnet/error.hpp"

namespace qnet {

inline constexpr double kEntanglementThreshold = 4.0;
inline constexpr double kResolventMaxCondition = 1e14;

/// Strictly increasing, finite, positive angular frequencies (rad/s).
class FrequencyGrid {
 public:
  FrequencyGrid() = default;
  explicit FrequencyGrid(std::vector<double> omegas);

  /// n log-spaced points over [lo, hi].
  static FrequencyGrid logspace(double lo, double hi, std::size_t n);

  /// The default analysis grid: 2000 points over [1e3, 1e9] rad/s. With
  /// delays present the part above 1e5 rad/s is replaced by 8000 points.
  static FrequencyGrid standard(bool has_delays);

  const std::vector<double>& omegas() const { return omegas_; }
  std::size_t size() const { return omegas_.size(); }
  double operator[](std::size_t i) const { return omegas_[i]; }

 private:
  std::vector<double> omegas_;
};

/// H(iω) = (Σ C_k e^{−iωτ_k})(iωI − Σ A_j e^{−iωτ_j})⁻¹(Σ B_l e^{−iωτ_l})
///         + Σ D_m e^{−iωτ_m}.
/// Throws SingularResolventError when the resolvent's condition number
/// exceeds kResolventMaxCondition.
template <typename Scalar>
MatrixX<std::complex<Scalar>> freq_response(const DelayedStateSpace<Scalar>& sys,
                                            double omega) {
  using C = std::complex<Scalar>;
  const Eigen::Index n = sys.state_dim();
  const C s(0, static_cast<Scalar>(omega));
  MatrixX<C> h = evaluate_terms(sys.d_terms, sys.output_dim(), sys.input_dim(), s);
  if (n == 0) return h;

  MatrixX<C> resolvent = s * MatrixX<C>::Identity(n, n) -
                         evaluate_terms(sys.a_terms, n, n, s);
  Eigen::PartialPivLU<MatrixX<C>> lu(resolvent);
  const Scalar rcond = lu.rcond();
  if (!(rcond * kResolventMaxCondition >= 1))
    throw SingularResolventError(
        omega, "resolvent is numerically singular at omega = " + std::to_string(omega));
  const MatrixX<C> b = evaluate_terms(sys.b_terms, n, sys.input_dim(), s);
  const MatrixX<C> c = evaluate_terms(sys.c_terms, sys.output_dim(), n, s);
  h.noalias() += c * lu.solve(b);
  return h;
}

/// Tr[H*H] for a single-output system, i.e. the squared norm of its row.
/// This is the power spectral density under unit-intensity white inputs.
template <typename Scalar>
Scalar row_power(const DelayedStateSpace<Scalar>& sys, double omega) {
  if (sys.output_dim() != 1)
    throw Error(ErrorCode::DimensionMismatch, "row_power needs a single-output system");
  const auto h = freq_response(sys, omega);
  // Tr[H*H] = Σ conj(h_j) h_j; the imaginary part is identically zero.
  return h.squaredNorm();
}

struct BandEdge {
  double low = 0.0;
  double high = 0.0;
};

struct SpectraResult {
  FrequencyGrid grid;
  std::vector<double> v_plus;
  std::vector<double> v_minus;
  std::vector<double> v_sum;
  std::vector<bool> entangled_mask;
  /// Intervals where v_sum < 4. Interior ends are refined by bisection; an
  /// interval touching the grid boundary keeps the boundary frequency.
  std::vector<BandEdge> band_edges;
  /// Frequencies where v_sum − 4 changes sign, refined to 3 significant digits.
  std::vector<double> crossings;
};

struct SpectraOptions {
  /// Worker threads for grid evaluation (0 = hardware concurrency).
  unsigned threads = 0;
};

/// V± over the grid from the two single-output systems (sys1 → V+,
/// sys2 → V−), plus the entanglement mask and band edges.
SpectraResult compute_spectra(const DelayedStateSpaced& sys1, const DelayedStateSpaced& sys2,
                              const FrequencyGrid& grid, SpectraOptions options = {});

/// 10·log10(x); throws NonPositive for x ≤ 0.
double to_db(double x);

/// Mean of (reference − other) over grid points with lo < ω ≤ hi, on v_sum in
/// dB. Used as the controller "reduction" statistic.
double mean_reduction_db(const SpectraResult& reference, const SpectraResult& other,
                         double lo, double hi);

}  // namespace qnet
