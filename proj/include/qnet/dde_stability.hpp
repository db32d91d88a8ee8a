#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include "qnet/closed_loop.hpp"
#include "qnet/delayed_state_space.hpp"

namespace qnet {

enum class Verdict { Stable, Unstable, Marginal, Undetermined };

constexpr std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Stable: return "stable";
    case Verdict::Unstable: return "unstable";
    case Verdict::Marginal: return "marginal";
    case Verdict::Undetermined: return "undetermined";
  }
  return "undetermined";
}

struct StabilityReport {
  /// Rightmost characteristic roots (1/s), descending real part; complex
  /// roots appear as conjugate pairs.
  std::vector<std::complex<double>> rightmost_roots;
  int discretization_order = 0;
  bool converged = false;
  Verdict verdict = Verdict::Undetermined;
  /// Stable/marginal boundary used for the verdict (1/s).
  double abs_tol = 0.0;
  /// Candidates from the discretisation whose Newton refinement failed.
  std::vector<std::string> refinement_failures;

  double spectral_abscissa() const {
    return rightmost_roots.empty() ? -std::numeric_limits<double>::infinity()
                                   : rightmost_roots.front().real();
  }
};

inline constexpr int kDefaultStabilityOrder = 40;
inline constexpr int kMaxStabilityOrder = 320;
inline constexpr int kClosedLoopRootCount = 10;

/// det(sI − Σ A_j e^{−sτ_j}) evaluated stably as the matrix
/// sI − Σ A_j e^{−sτ_j}; exposed for residual certificates.
MatrixX<std::complex<double>> characteristic_matrix(const DelayTermsd& a_terms,
                                                    std::complex<double> s);

/// Newton's method on det(M(s)) with f'/f = tr(M⁻¹M'). Returns false when the
/// iteration fails to converge within `max_iter` steps.
bool refine_root(const DelayTermsd& a_terms, std::complex<double>& s, int max_iter = 60);

/// Rightmost `count` roots of det(sI − Σ A_j e^{−sτ_j}) = 0.
///
/// The infinitesimal generator of the solution semigroup is collocated on
/// order+1 Chebyshev points over [−τ_max, 0]; its rightmost eigenvalues are
/// refined by Newton on the exact characteristic function. The computation is
/// repeated at 2·order and `converged` is set when every reported root moves
/// by less than 1e−6 in units of 1/τ_max. Throws DegenerateDelay when all
/// delays are zero.
StabilityReport rightmost_roots(const DelayTermsd& a_terms, int count, int order);

/// Eigenvalue report for a delay-free system (Σ A_j), same conventions.
StabilityReport eigenvalue_report(const DelayTermsd& a_terms, int count);

/// Stability of the assembled closed loop: plain eigenvalues when delay-free,
/// otherwise rightmost_roots with the order doubled from `order` up to
/// kMaxStabilityOrder until converged.
StabilityReport check_closed_loop(const ClosedLoopSystem& cl, int order = kDefaultStabilityOrder);

/// Same check for any delayed state-space system's drift.
StabilityReport check_system(const DelayedStateSpaced& sys, int order = kDefaultStabilityOrder,
                             int count = kClosedLoopRootCount);

}  // namespace qnet
