#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qnet/error.hpp"

namespace qnet {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// One summand M·σ_τ of a delay-tagged coefficient: the matrix acts on the
/// signal delayed by `delay` seconds.
template <typename Scalar>
struct DelayTerm {
  MatrixX<Scalar> matrix;
  double delay = 0.0;
};

template <typename Scalar>
using DelayTerms = std::vector<DelayTerm<Scalar>>;

/// Σ_k M_k e^{−s τ_k}.
template <typename Scalar>
MatrixX<std::complex<Scalar>> evaluate_terms(const DelayTerms<Scalar>& terms,
                                             Eigen::Index rows,
                                             Eigen::Index cols,
                                             std::complex<Scalar> s) {
  MatrixX<std::complex<Scalar>> out =
      MatrixX<std::complex<Scalar>>::Zero(rows, cols);
  for (const auto& t : terms) {
    const std::complex<Scalar> f =
        t.delay == 0.0 ? std::complex<Scalar>(1)
                       : std::exp(-s * static_cast<Scalar>(t.delay));
    out += f * t.matrix.template cast<std::complex<Scalar>>();
  }
  return out;
}

/// Σ_k M_k, i.e. the coefficient with every delay set to zero.
template <typename Scalar>
MatrixX<Scalar> sum_terms(const DelayTerms<Scalar>& terms, Eigen::Index rows,
                          Eigen::Index cols) {
  MatrixX<Scalar> out = MatrixX<Scalar>::Zero(rows, cols);
  for (const auto& t : terms) out += t.matrix;
  return out;
}

/// Merges terms that share a delay and drops all-zero terms. Ordering is by
/// ascending delay so dumps are deterministic.
template <typename Scalar>
DelayTerms<Scalar> canonicalize(DelayTerms<Scalar> terms) {
  std::stable_sort(terms.begin(), terms.end(),
                   [](const auto& a, const auto& b) { return a.delay < b.delay; });
  DelayTerms<Scalar> out;
  for (auto& t : terms) {
    if (!out.empty() && out.back().delay == t.delay) {
      out.back().matrix += t.matrix;
    } else {
      out.push_back(std::move(t));
    }
  }
  std::erase_if(out, [](const auto& t) { return t.matrix.isZero(0.0); });
  return out;
}

/// LTI system whose A/B/C/D coefficients are sums of delay-tagged matrices:
///
///   ẋ(t) = Σ A_j x(t − τ_j) + Σ B_l w(t − τ_l)
///   y(t) = Σ C_k x(t − τ_k) + Σ D_m w(t − τ_m)
///
/// Dimensions are carried by the label lists.
template <typename Scalar>
struct DelayedStateSpace {
  std::vector<std::string> state_labels;
  std::vector<std::string> input_labels;
  std::vector<std::string> output_labels;
  DelayTerms<Scalar> a_terms;
  DelayTerms<Scalar> b_terms;
  DelayTerms<Scalar> c_terms;
  DelayTerms<Scalar> d_terms;

  Eigen::Index state_dim() const { return static_cast<Eigen::Index>(state_labels.size()); }
  Eigen::Index input_dim() const { return static_cast<Eigen::Index>(input_labels.size()); }
  Eigen::Index output_dim() const { return static_cast<Eigen::Index>(output_labels.size()); }

  MatrixX<Scalar> a() const { return sum_terms(a_terms, state_dim(), state_dim()); }
  MatrixX<Scalar> b() const { return sum_terms(b_terms, state_dim(), input_dim()); }
  MatrixX<Scalar> c() const { return sum_terms(c_terms, output_dim(), state_dim()); }
  MatrixX<Scalar> d() const { return sum_terms(d_terms, output_dim(), input_dim()); }

  double max_delay() const {
    double m = 0.0;
    for (const auto* terms : {&a_terms, &b_terms, &c_terms, &d_terms})
      for (const auto& t : *terms) m = std::max(m, t.delay);
    return m;
  }

  /// Sorted, unique delay tags appearing anywhere in the system.
  std::vector<double> delays() const {
    std::vector<double> out;
    for (const auto* terms : {&a_terms, &b_terms, &c_terms, &d_terms})
      for (const auto& t : *terms) out.push_back(t.delay);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// The same system with every delay set to zero, one term per coefficient.
  DelayedStateSpace collapsed() const {
    DelayedStateSpace out{state_labels, input_labels, output_labels, {}, {}, {}, {}};
    out.a_terms.push_back({a(), 0.0});
    out.b_terms.push_back({b(), 0.0});
    out.c_terms.push_back({c(), 0.0});
    out.d_terms.push_back({d(), 0.0});
    return out;
  }

  /// Throws DimensionMismatch / InvalidParams on an inconsistent system.
  void validate() const {
    auto check = [](const DelayTerms<Scalar>& terms, Eigen::Index r,
                    Eigen::Index c, const char* name) {
      for (const auto& t : terms) {
        if (t.matrix.rows() != r || t.matrix.cols() != c)
          throw Error(ErrorCode::DimensionMismatch,
                      std::string(name) + " term has shape " +
                          std::to_string(t.matrix.rows()) + "x" +
                          std::to_string(t.matrix.cols()) + ", expected " +
                          std::to_string(r) + "x" + std::to_string(c));
        if (!(t.delay >= 0.0) || !std::isfinite(t.delay))
          throw Error(ErrorCode::InvalidParams,
                      std::string(name) + " term has invalid delay");
        if (!t.matrix.allFinite())
          throw Error(ErrorCode::InvalidParams,
                      std::string(name) + " term has non-finite entries");
      }
    };
    check(a_terms, state_dim(), state_dim(), "A");
    check(b_terms, state_dim(), input_dim(), "B");
    check(c_terms, output_dim(), state_dim(), "C");
    check(d_terms, output_dim(), input_dim(), "D");
  }
};

using DelayedStateSpaced = DelayedStateSpace<double>;
using DelayTermd = DelayTerm<double>;
using DelayTermsd = DelayTerms<double>;

/// Rows `rows` of a system (outputs subset), keeping all states and inputs.
template <typename Scalar>
DelayedStateSpace<Scalar> select_outputs(const DelayedStateSpace<Scalar>& sys,
                                         const std::vector<Eigen::Index>& rows) {
  DelayedStateSpace<Scalar> out = sys;
  out.output_labels.clear();
  for (auto r : rows) out.output_labels.push_back(sys.output_labels.at(r));
  auto pick = [&](const DelayTerms<Scalar>& terms) {
    DelayTerms<Scalar> res;
    for (const auto& t : terms) {
      MatrixX<Scalar> m(static_cast<Eigen::Index>(rows.size()), t.matrix.cols());
      for (std::size_t i = 0; i < rows.size(); ++i) m.row(i) = t.matrix.row(rows[i]);
      res.push_back({std::move(m), t.delay});
    }
    return canonicalize(std::move(res));
  };
  out.c_terms = pick(sys.c_terms);
  out.d_terms = pick(sys.d_terms);
  return out;
}

}  // namespace qnet
