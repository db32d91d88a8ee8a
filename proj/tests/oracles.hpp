#pragma once

// Independent reference computations and random generators shared by the unit
// tests and the acceptance binary. Nothing here calls the solvers under test.

#include <algorithm>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace qnet::testing {

using Eigen::MatrixXd;
using Eigen::VectorXd;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<>(lo, hi)(gen_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<>(lo, hi)(gen_); }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }

  MatrixXd normal(Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<> d;
    MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = d(gen_);
    return m;
  }

  MatrixXd hurwitz(Eigen::Index n, double margin = 0.1) {
    MatrixXd a = normal(n, n);
    Eigen::EigenSolver<MatrixXd> es(a, false);
    const double shift = es.eigenvalues().real().maxCoeff() + margin;
    a.diagonal().array() -= std::max(shift, 0.0) + uniform(0.0, 1.0);
    return a;
  }

 private:
  std::mt19937_64 gen_;
};

inline double max_real_eig(const MatrixXd& a) {
  Eigen::EigenSolver<MatrixXd> es(a, false);
  return es.eigenvalues().real().maxCoeff();
}

// A X + X Aᵀ + Q = 0 through (I⊗A + A⊗I) vec X = −vec Q.
inline MatrixXd kron_lyapunov(const MatrixXd& a, const MatrixXd& q) {
  const Eigen::Index n = a.rows();
  MatrixXd k = MatrixXd::Zero(n * n, n * n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index l = 0; l < n; ++l) {
        k(j * n + i, j * n + l) += a(i, l);  // (I⊗A)
        k(j * n + i, l * n + i) += a(j, l);  // (A⊗I)
      }
    }
  const VectorXd rhs = -Eigen::Map<const VectorXd>(q.data(), n * n);
  const VectorXd x = k.fullPivLu().solve(rhs);
  return Eigen::Map<const MatrixXd>(x.data(), n, n);
}

// Stabilising CARE solution from the stable eigenvectors of the Hamiltonian,
// X = V₂V₁⁻¹. Plain eigen-decomposition, no Schur reordering.
inline MatrixXd hamiltonian_eigvec_care(const MatrixXd& a, const MatrixXd& b, const MatrixXd& q,
                                        const MatrixXd& r, const MatrixXd& s) {
  const Eigen::Index n = a.rows();
  const MatrixXd ri = r.inverse();
  const MatrixXd abar = a - b * ri * s.transpose();
  MatrixXd h(2 * n, 2 * n);
  h << abar, -b * ri * b.transpose(), -(q - s * ri * s.transpose()), -abar.transpose();
  Eigen::ComplexEigenSolver<MatrixXd> es(h);
  Eigen::MatrixXcd v(2 * n, n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < 2 * n && k < n; ++i)
    if (es.eigenvalues()(i).real() < 0) v.col(k++) = es.eigenvectors().col(i);
  const Eigen::MatrixXcd x = v.bottomRows(n) * v.topRows(n).inverse();
  const MatrixXd xr = x.real();
  return (xr + xr.transpose()) / 2.0;
}

struct NewtonKleinman {
  MatrixXd x;
  MatrixXd gain;
  int iterations = 0;
  bool converged = false;
};

// AᵀX + XA − (XB + S)R⁻¹(BᵀX + Sᵀ) + Q = 0 by Kleinman iteration from a
// stabilising gain.
inline NewtonKleinman newton_kleinman(const MatrixXd& a, const MatrixXd& b, const MatrixXd& q,
                                      const MatrixXd& r, const MatrixXd& s, MatrixXd k,
                                      int max_iter = 200) {
  NewtonKleinman out;
  MatrixXd x_prev;
  for (int it = 0; it < max_iter; ++it) {
    const MatrixXd ak = a - b * k;
    const MatrixXd qk = q - s * k - k.transpose() * s.transpose() + k.transpose() * r * k;
    MatrixXd x = kron_lyapunov(ak.transpose(), qk);
    x = (x + x.transpose()) / 2.0;
    k = r.ldlt().solve(b.transpose() * x + s.transpose());
    out.iterations = it + 1;
    if (x_prev.size() && (x - x_prev).norm() <= 1e-11 * std::max(1.0, x.norm())) {
      out.x = x;
      out.converged = true;
      break;
    }
    x_prev = x;
    out.x = x;
  }
  out.gain = k;
  return out;
}

struct RandomCare {
  MatrixXd a, b, q, r, s;
};

// Joint weight [Q S; Sᵀ R] = MᵀM + diag(0, I) keeps Q − SR⁻¹Sᵀ ⪰ 0.
inline RandomCare random_care(Rng& rng, Eigen::Index n, bool cross) {
  RandomCare p;
  const Eigen::Index m = rng.integer(1, static_cast<int>(n));
  const Eigen::Index rows = rng.integer(1, static_cast<int>(n));
  p.a = rng.normal(n, n);
  p.b = rng.normal(n, m);
  const MatrixXd w = rng.normal(rows, n + m);
  const MatrixXd joint = w.transpose() * w;
  p.q = joint.topLeftCorner(n, n);
  p.r = joint.bottomRightCorner(m, m) + MatrixXd::Identity(m, m);
  p.s = cross ? MatrixXd(joint.topRightCorner(n, m)) : MatrixXd::Zero(n, m);
  // Guarantee detectability with a small full-rank state weight.
  p.q += 0.1 * MatrixXd::Identity(n, n);
  return p;
}

// Greedy nearest matching; returns the worst |a_i − b_π(i)| / max(1, |a_i|).
inline double match_spectra(std::vector<std::complex<double>> a,
                            std::vector<std::complex<double>> b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0.0;
  for (const auto& x : a) {
    auto it = std::min_element(b.begin(), b.end(), [&](auto u, auto v) {
      return std::abs(u - x) < std::abs(v - x);
    });
    worst = std::max(worst, std::abs(*it - x) / std::max(1.0, std::abs(x)));
    b.erase(it);
  }
  return worst;
}

inline std::vector<std::complex<double>> eigenvalues(const MatrixXd& a) {
  Eigen::EigenSolver<MatrixXd> es(a, false);
  return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

// Newton on a scalar analytic function from a starting point.
template <typename F, typename DF>
std::complex<double> scalar_newton(F f, DF df, std::complex<double> s, int iters = 100) {
  for (int i = 0; i < iters; ++i) {
    const std::complex<double> step = f(s) / df(s);
    s -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return s;
}

}  // namespace qnet::testing
