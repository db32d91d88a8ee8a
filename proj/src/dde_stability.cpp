#include "qnet/dde_stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace qnet {

namespace {

using Complex = std::complex<double>;
using MatrixXc = MatrixX<Complex>;

constexpr double kOrderDoublingTol = 1e-6;    // 1/τ_max units
constexpr double kVerdictRelTol = 1e-4;       // 1/τ_max units
constexpr double kResidualCertificate = 1e-8;

struct ScaledTerms {
  DelayTermsd terms;  // A_j·τ_max with delays τ_j/τ_max
  double tau_max = 0.0;
  Eigen::Index n = 0;
};

ScaledTerms scale_terms(const DelayTermsd& a_terms) {
  ScaledTerms out;
  for (const auto& t : a_terms) out.tau_max = std::max(out.tau_max, t.delay);
  if (out.tau_max <= 0.0)
    throw Error(ErrorCode::DegenerateDelay,
                "rightmost_roots: all delays are zero; use plain eigenvalues");
  for (const auto& t : a_terms) out.terms.push_back({t.matrix * out.tau_max, t.delay / out.tau_max});
  out.n = a_terms.front().matrix.rows();
  return out;
}

// Chebyshev–Lobatto collocation of the generator on θ ∈ [−1, 0].
MatrixX<double> collocation_matrix(const ScaledTerms& st, int order) {
  const int N = order;
  const Eigen::Index n = st.n;
  std::vector<double> x(N + 1), c(N + 1), w(N + 1);
  for (int i = 0; i <= N; ++i) {
    x[i] = std::cos(std::numbers::pi * i / N);
    c[i] = ((i == 0 || i == N) ? 2.0 : 1.0) * ((i % 2) ? -1.0 : 1.0);
    w[i] = ((i % 2) ? -1.0 : 1.0) * ((i == 0 || i == N) ? 0.5 : 1.0);
  }
  x[N] = -1.0;
  MatrixX<double> dx = MatrixX<double>::Zero(N + 1, N + 1);
  for (int i = 0; i <= N; ++i) {
    double diag = 0.0;
    for (int j = 0; j <= N; ++j) {
      if (i == j) continue;
      dx(i, j) = (c[i] / c[j]) / (x[i] - x[j]);
      diag -= dx(i, j);
    }
    dx(i, i) = diag;
  }
  // θ = (x − 1)/2, so d/dθ = 2 d/dx.
  const MatrixX<double> dtheta = 2.0 * dx;

  auto lagrange_row = [&](double theta) {
    const double xs = 2.0 * theta + 1.0;
    VectorX<double> l = VectorX<double>::Zero(N + 1);
    for (int k = 0; k <= N; ++k) {
      if (std::abs(xs - x[k]) < 1e-14) {
        l(k) = 1.0;
        return l;
      }
    }
    double denom = 0.0;
    for (int k = 0; k <= N; ++k) {
      l(k) = w[k] / (xs - x[k]);
      denom += l(k);
    }
    return VectorX<double>(l / denom);
  };

  MatrixX<double> g = MatrixX<double>::Zero((N + 1) * n, (N + 1) * n);
  for (const auto& t : st.terms) {
    const VectorX<double> l = lagrange_row(-t.delay);
    for (int k = 0; k <= N; ++k)
      if (l(k) != 0.0) g.block(0, k * n, n, n) += l(k) * t.matrix;
  }
  for (int i = 1; i <= N; ++i)
    for (int k = 0; k <= N; ++k)
      g.block(i * n, k * n, n, n).diagonal().setConstant(dtheta(i, k));
  return g;
}

// σ_min(M(s)) against the size of the terms that make up M(s); σ_max alone
// would be useless for scalar equations.
double relative_singularity(const DelayTermsd& terms, Complex s) {
  Eigen::JacobiSVD<MatrixXc> svd(characteristic_matrix(terms, s));
  const auto& sv = svd.singularValues();
  double scale = std::abs(s);
  for (const auto& t : terms)
    scale += t.matrix.norm() * std::exp(-s.real() * t.delay);
  return sv(sv.size() - 1) / std::max(scale, 1e-300);
}

// Canonical representative: real roots get im = 0, complex roots the upper one.
std::vector<Complex> upper_half_unique(const std::vector<Complex>& roots) {
  std::vector<Complex> out;
  for (Complex r : roots) {
    const double scale = std::max(1.0, std::abs(r));
    if (std::abs(r.imag()) <= 1e-9 * scale) r = {r.real(), 0.0};
    else r = {r.real(), std::abs(r.imag())};
    const bool dup = std::any_of(out.begin(), out.end(), [&](Complex o) {
      return std::abs(o - r) <= 1e-8 * scale;
    });
    if (!dup) out.push_back(r);
  }
  return out;
}

// Expands representatives into conjugate pairs and keeps the `count`
// rightmost, never splitting a pair.
std::vector<Complex> select_rightmost(std::vector<Complex> reps, int count) {
  std::sort(reps.begin(), reps.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() > b.real() : a.imag() < b.imag();
  });
  std::vector<Complex> out;
  for (Complex r : reps) {
    if (static_cast<int>(out.size()) >= count) break;
    if (r.imag() == 0.0) {
      out.push_back(r);
    } else {
      out.push_back(r);
      out.push_back(std::conj(r));
    }
  }
  return out;
}

struct OrderResult {
  std::vector<Complex> roots;  // scaled units
  std::vector<std::string> failures;
};

OrderResult roots_at_order(const ScaledTerms& st, int count, int order) {
  const MatrixX<double> g = collocation_matrix(st, order);
  Eigen::EigenSolver<MatrixX<double>> es(g, false);
  if (es.info() != Eigen::Success)
    throw Error(ErrorCode::NoConvergence, "rightmost_roots: eigenvalue solver failed");
  std::vector<Complex> eig(es.eigenvalues().data(),
                           es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(eig.begin(), eig.end(), [](Complex a, Complex b) { return a.real() > b.real(); });

  OrderResult res;
  std::vector<Complex> refined;
  const std::size_t candidates = std::min<std::size_t>(eig.size(), 4 * count + 8);
  for (std::size_t i = 0; i < candidates; ++i) {
    Complex s = eig[i];
    if (s.imag() < -1e-9 * std::max(1.0, std::abs(s))) continue;  // conjugate handled
    const Complex start = s;
    if (refine_root(st.terms, s) && relative_singularity(st.terms, s) <= kResidualCertificate) {
      refined.push_back(s);
    } else {
      std::ostringstream os;
      os << "NoConvergence: candidate (" << start.real() / st.tau_max << ", "
         << start.imag() / st.tau_max << ")";
      res.failures.push_back(os.str());
    }
  }
  res.roots = select_rightmost(upper_half_unique(refined), count);
  return res;
}

double hausdorff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  if (a.empty() || b.empty()) return a.empty() && b.empty() ? 0.0 : INFINITY;
  auto directed = [](const std::vector<Complex>& p, const std::vector<Complex>& q) {
    double worst = 0.0;
    for (Complex x : p) {
      double best = INFINITY;
      for (Complex y : q) best = std::min(best, std::abs(x - y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

Verdict verdict_for(double abscissa, double tol) {
  if (abscissa < -tol) return Verdict::Stable;
  if (std::abs(abscissa) <= tol) return Verdict::Marginal;
  return Verdict::Unstable;
}

}  // namespace

MatrixX<Complex> characteristic_matrix(const DelayTermsd& a_terms, Complex s) {
  if (a_terms.empty())
    throw Error(ErrorCode::InvalidParams, "characteristic_matrix: no terms");
  const Eigen::Index n = a_terms.front().matrix.rows();
  return s * MatrixXc::Identity(n, n) - evaluate_terms(a_terms, n, n, s);
}

bool refine_root(const DelayTermsd& a_terms, Complex& s, int max_iter) {
  const Eigen::Index n = a_terms.front().matrix.rows();
  for (int it = 0; it < max_iter; ++it) {
    MatrixXc dm = MatrixXc::Identity(n, n);
    for (const auto& t : a_terms)
      if (t.delay != 0.0)
        dm += (t.delay * std::exp(-s * t.delay)) * t.matrix.cast<Complex>();
    Eigen::PartialPivLU<MatrixXc> lu(characteristic_matrix(a_terms, s));
    const Complex trace = lu.solve(dm).trace();
    if (!std::isfinite(trace.real()) || !std::isfinite(trace.imag()) || trace == Complex(0))
      return std::abs(lu.determinant()) == 0.0;
    const Complex step = 1.0 / trace;
    s -= step;
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) return false;
    if (std::abs(step) <= 1e-13 * std::max(1.0, std::abs(s))) return true;
  }
  return false;
}

StabilityReport rightmost_roots(const DelayTermsd& a_terms, int count, int order) {
  if (a_terms.empty()) throw Error(ErrorCode::InvalidParams, "rightmost_roots: no terms");
  if (count < 1 || order < 2)
    throw Error(ErrorCode::InvalidParams, "rightmost_roots: count >= 1 and order >= 2 required");
  for (const auto& t : a_terms) {
    if (t.delay < 0.0) throw Error(ErrorCode::InvalidParams, "rightmost_roots: negative delay");
    if (t.matrix.rows() != t.matrix.cols() || t.matrix.rows() != a_terms.front().matrix.rows())
      throw Error(ErrorCode::DimensionMismatch, "rightmost_roots: terms must be square, same size");
  }
  const ScaledTerms st = scale_terms(a_terms);
  const OrderResult coarse = roots_at_order(st, count, order);
  const OrderResult fine = roots_at_order(st, count, 2 * order);

  StabilityReport rep;
  rep.discretization_order = order;
  rep.converged = !coarse.roots.empty() &&
                  hausdorff(coarse.roots, fine.roots) < kOrderDoublingTol;
  rep.refinement_failures = coarse.failures;
  for (Complex r : coarse.roots) rep.rightmost_roots.push_back(r / st.tau_max);
  rep.abs_tol = kVerdictRelTol / st.tau_max;
  rep.verdict = rep.converged ? verdict_for(rep.spectral_abscissa(), rep.abs_tol)
                              : Verdict::Undetermined;
  return rep;
}

StabilityReport eigenvalue_report(const DelayTermsd& a_terms, int count) {
  if (a_terms.empty()) throw Error(ErrorCode::InvalidParams, "eigenvalue_report: no terms");
  const Eigen::Index n = a_terms.front().matrix.rows();
  const MatrixX<double> a = sum_terms(a_terms, n, n);
  Eigen::EigenSolver<MatrixX<double>> es(a, false);
  std::vector<Complex> eig(es.eigenvalues().data(), es.eigenvalues().data() + n);
  StabilityReport rep;
  rep.rightmost_roots = select_rightmost(upper_half_unique(eig), count);
  rep.discretization_order = 0;
  rep.converged = es.info() == Eigen::Success;
  rep.abs_tol = 1e-10 * std::max(1.0, a.norm());
  rep.verdict = verdict_for(rep.spectral_abscissa(), rep.abs_tol);
  return rep;
}

StabilityReport check_system(const DelayedStateSpaced& sys, int order, int count) {
  double tau_max = 0.0;
  for (const auto& t : sys.a_terms) tau_max = std::max(tau_max, t.delay);
  if (tau_max == 0.0) return eigenvalue_report(sys.a_terms, count);
  StabilityReport rep = rightmost_roots(sys.a_terms, count, order);
  while (!rep.converged && 2 * rep.discretization_order <= kMaxStabilityOrder / 2)
    rep = rightmost_roots(sys.a_terms, count, 2 * rep.discretization_order);
  return rep;
}

StabilityReport check_closed_loop(const ClosedLoopSystem& cl, int order) {
  return check_system(cl.sys, order, kClosedLoopRootCount);
}

}  // namespace qnet
