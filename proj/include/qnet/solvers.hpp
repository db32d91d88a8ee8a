#pragma once

// Dense continuous-time Riccati and Lyapunov solvers.
//
// Both work on the complex Schur form: the CARE takes the stable invariant
// subspace of the Hamiltonian after reordering the Schur form with adjacent
// Givens swaps, and the Lyapunov solver is Bartels–Stewart with triangular
// back-substitution. Real inputs give real outputs up to roundoff, which is
// removed by taking the real part and symmetrising.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "qnet/delayed_state_space.hpp"
#include "qnet/error.hpp"

namespace qnet {

inline constexpr double kCareResidualTol = 1e-8;
inline constexpr double kPbhRelTol = 1e-10;

template <typename Scalar>
struct CareProblem {
  MatrixX<Scalar> a;  // n×n
  MatrixX<Scalar> b;  // n×m
  MatrixX<Scalar> q;  // n×n, symmetric ≥ 0
  MatrixX<Scalar> r;  // m×m, symmetric > 0
  MatrixX<Scalar> s;  // n×m cross weight; empty means zero
};

template <typename Scalar>
struct CareSolution {
  MatrixX<Scalar> x;
  MatrixX<Scalar> gain;  // R⁻¹(BᵀX + Sᵀ)
  Scalar residual_norm = 0;
  Scalar closed_loop_spectral_abscissa = 0;
};

template <typename Derived>
typename Derived::RealScalar spectral_abscissa(const Eigen::MatrixBase<Derived>& a) {
  using Real = typename Derived::RealScalar;
  if (a.rows() == 0) return -std::numeric_limits<Real>::infinity();
  Eigen::EigenSolver<MatrixX<Real>> es(a.eval(), false);
  return es.eigenvalues().real().maxCoeff();
}

namespace detail {

/// Complex plane rotation [c s; −conj(s) c] with [c s; −conj(s) c]·[f; g] = [r; 0].
template <typename Real>
void make_rotation(std::complex<Real> f, std::complex<Real> g, Real& c,
                   std::complex<Real>& s) {
  if (g == std::complex<Real>(0)) {
    c = 1;
    s = 0;
    return;
  }
  if (f == std::complex<Real>(0)) {
    c = 0;
    s = std::conj(g) / std::abs(g);
    return;
  }
  const Real fa = std::abs(f);
  const Real d = std::hypot(fa, std::abs(g));
  c = fa / d;
  s = (f / fa) * std::conj(g) / d;
}

/// Swaps the diagonal entries k and k+1 of the upper-triangular t, updating
/// the unitary q so that q t qᴴ is preserved.
template <typename Real>
void swap_adjacent(MatrixX<std::complex<Real>>& t, MatrixX<std::complex<Real>>& q,
                   Eigen::Index k) {
  using C = std::complex<Real>;
  const Eigen::Index n = t.rows();
  const C t11 = t(k, k);
  const C t22 = t(k + 1, k + 1);
  Real c;
  C s;
  make_rotation(t(k, k + 1), t22 - t11, c, s);

  // Rows k, k+1 from column k+2 on.
  for (Eigen::Index j = k + 2; j < n; ++j) {
    const C x = t(k, j), y = t(k + 1, j);
    t(k, j) = c * x + s * y;
    t(k + 1, j) = c * y - std::conj(s) * x;
  }
  // Columns k, k+1 above row k.
  for (Eigen::Index i = 0; i < k; ++i) {
    const C x = t(i, k), y = t(i, k + 1);
    t(i, k) = c * x + std::conj(s) * y;
    t(i, k + 1) = c * y - s * x;
  }
  t(k, k) = t22;
  t(k + 1, k + 1) = t11;
  for (Eigen::Index i = 0; i < n; ++i) {
    const C x = q(i, k), y = q(i, k + 1);
    q(i, k) = c * x + std::conj(s) * y;
    q(i, k + 1) = c * y - s * x;
  }
}

}  // namespace detail

/// Complex Schur form m = q t qᴴ with every eigenvalue satisfying `select`
/// moved to the leading diagonal positions. Returns the number selected.
template <typename Real, typename Pred>
Eigen::Index ordered_schur(const MatrixX<std::complex<Real>>& m,
                           MatrixX<std::complex<Real>>& q,
                           MatrixX<std::complex<Real>>& t, Pred select) {
  Eigen::ComplexSchur<MatrixX<std::complex<Real>>> schur(m);
  if (schur.info() != Eigen::Success)
    throw Error(ErrorCode::NoConvergence, "complex Schur decomposition failed");
  q = schur.matrixU();
  t = schur.matrixT();
  Eigen::Index placed = 0;
  for (Eigen::Index j = 0; j < t.rows(); ++j) {
    if (!select(t(j, j))) continue;
    for (Eigen::Index k = j - 1; k >= placed; --k) detail::swap_adjacent(t, q, k);
    ++placed;
  }
  return placed;
}

/// Popov–Belevitch–Hautus test: rank [A − λI, B] = n for every eigenvalue λ
/// with Re λ ≥ 0. Tolerance is kPbhRelTol·‖A‖ on the smallest singular value.
template <typename Real>
bool is_stabilizable(const MatrixX<Real>& a, const MatrixX<Real>& b) {
  using C = std::complex<Real>;
  const Eigen::Index n = a.rows();
  const Real tol = kPbhRelTol * std::max<Real>(a.norm(), 1);
  Eigen::EigenSolver<MatrixX<Real>> es(a, false);
  for (Eigen::Index i = 0; i < n; ++i) {
    const C lambda = es.eigenvalues()(i);
    if (lambda.real() < 0) continue;
    MatrixX<C> pencil(n, n + b.cols());
    pencil << a.template cast<C>() - lambda * MatrixX<C>::Identity(n, n),
        b.template cast<C>();
    Eigen::JacobiSVD<MatrixX<C>> svd(pencil);
    if (svd.singularValues()(n - 1) <= tol) return false;
  }
  return true;
}

template <typename Real>
bool is_detectable(const MatrixX<Real>& a, const MatrixX<Real>& c) {
  return is_stabilizable<Real>(a.transpose(), c.transpose());
}

/// Symmetric square root factor F with FᵀF = M for symmetric M ≥ 0 (small
/// negative eigenvalues from roundoff are clipped).
template <typename Real>
MatrixX<Real> psd_factor(const MatrixX<Real>& m) {
  Eigen::SelfAdjointEigenSolver<MatrixX<Real>> es(m);
  const VectorX<Real> ev = es.eigenvalues().cwiseMax(Real(0)).cwiseSqrt();
  return ev.asDiagonal() * es.eigenvectors().transpose();
}

template <typename Real>
MatrixX<Real> care_residual(const CareProblem<Real>& p, const MatrixX<Real>& x) {
  const MatrixX<Real> s =
      p.s.size() ? p.s : MatrixX<Real>::Zero(p.a.rows(), p.b.cols());
  const MatrixX<Real> xb_s = x * p.b + s;
  return p.a.transpose() * x + x * p.a - xb_s * p.r.ldlt().solve(xb_s.transpose()) + p.q;
}

/// AX + XAᵀ + Q = 0 for Hurwitz A.
template <typename Real>
MatrixX<Real> solve_lyapunov(const MatrixX<Real>& a, const MatrixX<Real>& q) {
  using C = std::complex<Real>;
  const Eigen::Index n = a.rows();
  if (a.cols() != n || q.rows() != n || q.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "solve_lyapunov: A and Q must be n×n");
  if (n == 0) return MatrixX<Real>(0, 0);

  Eigen::ComplexSchur<MatrixX<C>> schur(a.template cast<C>());
  if (schur.info() != Eigen::Success)
    throw Error(ErrorCode::NoConvergence, "solve_lyapunov: Schur decomposition failed");
  const MatrixX<C>& u = schur.matrixU();
  const MatrixX<C>& t = schur.matrixT();
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(t(i, i).real() < 0))
      throw Error(ErrorCode::NotHurwitz, "solve_lyapunov: A has an eigenvalue with Re >= 0");

  // T Y + Y Tᴴ = −Uᴴ Q U, solved column by column from the right.
  const MatrixX<C> rhs = -(u.adjoint() * q.template cast<C>() * u);
  MatrixX<C> y = MatrixX<C>::Zero(n, n);
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    VectorX<C> col = rhs.col(j);
    for (Eigen::Index k = j + 1; k < n; ++k) col -= std::conj(t(j, k)) * y.col(k);
    MatrixX<C> shifted = t;
    shifted.diagonal().array() += std::conj(t(j, j));
    y.col(j) = shifted.template triangularView<Eigen::Upper>().solve(col);
  }
  const MatrixX<Real> x = (u * y * u.adjoint()).real();
  return (x + x.transpose()) / Real(2);
}

/// Stabilising solution of
///   AᵀX + XA − (XB + S)R⁻¹(BᵀX + Sᵀ) + Q = 0
/// from the stable invariant subspace of the Hamiltonian matrix.
template <typename Real>
CareSolution<Real> solve_care(const CareProblem<Real>& p) {
  using C = std::complex<Real>;
  const Eigen::Index n = p.a.rows();
  const Eigen::Index m = p.b.cols();
  if (p.a.cols() != n || p.b.rows() != n || p.q.rows() != n || p.q.cols() != n ||
      p.r.rows() != m || p.r.cols() != m ||
      (p.s.size() != 0 && (p.s.rows() != n || p.s.cols() != m)))
    throw Error(ErrorCode::DimensionMismatch, "solve_care: inconsistent dimensions");
  const Real sym_tol = Real(1e-10);
  if ((p.q - p.q.transpose()).norm() > sym_tol * std::max<Real>(1, p.q.norm()) ||
      (p.r - p.r.transpose()).norm() > sym_tol * std::max<Real>(1, p.r.norm()))
    throw Error(ErrorCode::InvalidParams, "solve_care: Q and R must be symmetric");
  Eigen::LLT<MatrixX<Real>> r_chol(p.r);
  if (r_chol.info() != Eigen::Success)
    throw Error(ErrorCode::InvalidParams, "solve_care: R must be positive definite");

  const MatrixX<Real> s = p.s.size() ? p.s : MatrixX<Real>::Zero(n, m);
  // Remove the cross term: Ā = A − B R⁻¹ Sᵀ, Q̄ = Q − S R⁻¹ Sᵀ.
  const MatrixX<Real> a_bar = p.a - p.b * r_chol.solve(s.transpose());
  MatrixX<Real> q_bar = p.q - s * r_chol.solve(s.transpose());
  q_bar = (q_bar + q_bar.transpose()) / Real(2);
  const MatrixX<Real> g = p.b * r_chol.solve(p.b.transpose());

  if (!is_stabilizable<Real>(p.a, p.b))
    throw Error(ErrorCode::NotStabilizable, "solve_care: (A, B) is not stabilizable");
  if (!is_detectable<Real>(a_bar, psd_factor<Real>(q_bar)))
    throw Error(ErrorCode::NotDetectable, "solve_care: (A, Q) is not detectable");

  MatrixX<Real> h(2 * n, 2 * n);
  h << a_bar, -g, -q_bar, -a_bar.transpose();

  const Real h_norm = std::max<Real>(h.norm(), 1);
  const Real axis_tol = Real(100) * std::numeric_limits<Real>::epsilon() * h_norm;
  MatrixX<C> q_schur, t_schur;
  const Eigen::Index stable = ordered_schur<Real>(
      h.template cast<C>(), q_schur, t_schur, [](C z) { return z.real() < 0; });
  bool near_axis = false;
  for (Eigen::Index i = 0; i < 2 * n; ++i)
    near_axis = near_axis || std::abs(t_schur(i, i).real()) <= axis_tol;
  if (stable != n || near_axis)
    throw Error(ErrorCode::NoStabilizingSolution,
                "solve_care: Hamiltonian has eigenvalues on the imaginary axis");

  const MatrixX<C> u11 = q_schur.topLeftCorner(n, n);
  const MatrixX<C> u21 = q_schur.bottomLeftCorner(n, n);
  Eigen::PartialPivLU<MatrixX<C>> lu(u11.transpose());
  if (lu.rcond() < Real(100) * std::numeric_limits<Real>::epsilon())
    throw Error(ErrorCode::NoStabilizingSolution,
                "solve_care: stable subspace basis is singular");
  MatrixX<Real> x = lu.solve(u21.transpose()).transpose().real();
  x = (x + x.transpose()) / Real(2);

  auto finish = [&](const MatrixX<Real>& xs) {
    CareSolution<Real> sol;
    sol.x = xs;
    sol.gain = r_chol.solve(p.b.transpose() * xs + s.transpose());
    sol.residual_norm = care_residual(p, xs).norm() / std::max<Real>(1, xs.norm());
    sol.closed_loop_spectral_abscissa = spectral_abscissa(p.a - p.b * sol.gain);
    return sol;
  };

  CareSolution<Real> sol = finish(x);
  // One Newton correction when the Schur solution is slightly inaccurate.
  if (sol.residual_norm > kCareResidualTol * Real(1e-3) &&
      sol.closed_loop_spectral_abscissa < 0) {
    const MatrixX<Real> acl = p.a - p.b * sol.gain;
    const MatrixX<Real> dx = solve_lyapunov<Real>(acl.transpose(), care_residual(p, x));
    MatrixX<Real> refined = x + dx;
    refined = (refined + refined.transpose()) / Real(2);
    CareSolution<Real> candidate = finish(refined);
    if (candidate.residual_norm < sol.residual_norm) sol = std::move(candidate);
  }
  if (!(sol.residual_norm <= kCareResidualTol))
    throw Error(ErrorCode::IllConditioned,
                "solve_care: residual " + std::to_string(double(sol.residual_norm)) +
                    " exceeds tolerance");
  if (!(sol.closed_loop_spectral_abscissa < 0))
    throw Error(ErrorCode::NoStabilizingSolution,
                "solve_care: closed loop A − BK is not Hurwitz");
  return sol;
}

}  // namespace qnet
