#include "qnet/spectra.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

namespace qnet {

FrequencyGrid::FrequencyGrid(std::vector<double> omegas) : omegas_(std::move(omegas)) {
  if (omegas_.empty()) throw Error(ErrorCode::InvalidParams, "frequency grid is empty");
  for (std::size_t i = 0; i < omegas_.size(); ++i) {
    if (!std::isfinite(omegas_[i]) || omegas_[i] <= 0.0)
      throw Error(ErrorCode::InvalidParams, "grid frequencies must be finite and > 0");
    if (i > 0 && !(omegas_[i] > omegas_[i - 1]))
      throw Error(ErrorCode::InvalidParams, "grid must be strictly increasing");
  }
}

FrequencyGrid FrequencyGrid::logspace(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2)
    throw Error(ErrorCode::InvalidParams, "logspace needs 0 < lo < hi and n >= 2");
  std::vector<double> w(n);
  const double l0 = std::log10(lo), l1 = std::log10(hi);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = std::pow(10.0, l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(n - 1));
  w.front() = lo;
  w.back() = hi;
  return FrequencyGrid(std::move(w));
}

FrequencyGrid FrequencyGrid::standard(bool has_delays) {
  const FrequencyGrid base = logspace(1e3, 1e9, 2000);
  if (!has_delays) return base;
  std::vector<double> w;
  for (double x : base.omegas())
    if (x < 1e5) w.push_back(x);
  const FrequencyGrid dense = logspace(1e5, 1e9, 8000);
  w.insert(w.end(), dense.omegas().begin(), dense.omegas().end());
  return FrequencyGrid(std::move(w));
}

double to_db(double x) {
  if (!(x > 0.0))
    throw Error(ErrorCode::NonPositive, "to_db: argument must be > 0, got " + std::to_string(x));
  return 10.0 * std::log10(x);
}

namespace {

template <typename F>
void parallel_for(std::size_t n, unsigned threads, F&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr first_error;
  std::size_t first_index = n;
  std::mutex mu;
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < n; i += threads) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(mu);
            if (i < first_index) {
              first_index = i;
              first_error = std::current_exception();
            }
            return;
          }
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

double vsum_minus_threshold(const DelayedStateSpaced& sys1, const DelayedStateSpaced& sys2,
                            double omega) {
  return row_power(sys1, omega) + row_power(sys2, omega) - kEntanglementThreshold;
}

// Bisection in log-frequency until the bracket agrees to 3 significant digits.
double refine_crossing(const DelayedStateSpaced& sys1, const DelayedStateSpaced& sys2,
                       double lo, double hi) {
  double f_lo = vsum_minus_threshold(sys1, sys2, lo);
  for (int it = 0; it < 200; ++it) {
    if ((hi - lo) <= 5e-4 * lo) break;
    const double mid = std::sqrt(lo * hi);
    const double f_mid = vsum_minus_threshold(sys1, sys2, mid);
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", std::sqrt(lo * hi));
  return std::strtod(buf, nullptr);
}

}  // namespace

SpectraResult compute_spectra(const DelayedStateSpaced& sys1, const DelayedStateSpaced& sys2,
                              const FrequencyGrid& grid, SpectraOptions options) {
  if (sys1.output_dim() != 1 || sys2.output_dim() != 1)
    throw Error(ErrorCode::DimensionMismatch, "compute_spectra needs single-output systems");
  SpectraResult res;
  res.grid = grid;
  const std::size_t n = grid.size();
  res.v_plus.resize(n);
  res.v_minus.resize(n);
  parallel_for(n, options.threads, [&](std::size_t i) {
    res.v_plus[i] = row_power(sys1, grid[i]);
    res.v_minus[i] = row_power(sys2, grid[i]);
  });
  res.v_sum.resize(n);
  res.entangled_mask.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    res.v_sum[i] = res.v_plus[i] + res.v_minus[i];
    res.entangled_mask[i] = res.v_sum[i] < kEntanglementThreshold;
  }

  bool inside = res.entangled_mask[0];
  double band_low = grid[0];
  for (std::size_t i = 1; i < n; ++i) {
    if (res.entangled_mask[i] == res.entangled_mask[i - 1]) continue;
    const double edge = refine_crossing(sys1, sys2, grid[i - 1], grid[i]);
    res.crossings.push_back(edge);
    if (res.entangled_mask[i]) {
      band_low = edge;
    } else {
      res.band_edges.push_back({band_low, edge});
    }
    inside = res.entangled_mask[i];
  }
  if (inside) res.band_edges.push_back({band_low, grid[n - 1]});
  return res;
}

double mean_reduction_db(const SpectraResult& reference, const SpectraResult& other,
                         double lo, double hi) {
  if (reference.grid.omegas() != other.grid.omegas())
    throw Error(ErrorCode::DimensionMismatch, "spectra were computed on different grids");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < reference.grid.size(); ++i) {
    const double w = reference.grid[i];
    if (w <= lo || w > hi) continue;
    sum += to_db(reference.v_sum[i]) - to_db(other.v_sum[i]);
    ++count;
  }
  if (count == 0)
    throw Error(ErrorCode::InvalidParams, "no grid points in the reduction window");
  return sum / static_cast<double>(count);
}

}  // namespace qnet
