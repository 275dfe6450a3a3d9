#pragma once

#include "misscusum/cusum.hpp"
#include "misscusum/errors.hpp"
#include "misscusum/projection.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace misscusum {

enum class Variant { full_data, sample_split };

inline const char* variant_name(Variant v) {
  return v == Variant::full_data ? "full" : "split";
}

/// Single-changepoint estimate. z_hat uses the paper's 1-based time
/// convention: z_hat = t means the mean changes between columns t and t+1.
struct ChangepointEstimate {
  Index z_hat = 0;            // in [1, n-1]
  Vector projected;           // (v_hat' T)_t, length n-1
  double peak_value = 0.0;    // max_t |projected(t)|
  ProjectionEstimate projection;
  Variant variant = Variant::full_data;
};

/// Lower median of the set of positions attaining max |series|. Positions are
/// 0-based; the corresponding 1-based time index is the return value plus 1.
/// Ties are resolved by exact floating-point equality of absolute values.
inline std::size_t median_argmax(const Vector& series) {
  if (series.size() == 0) {
    throw std::invalid_argument("median_argmax: empty series");
  }
  double best = -1.0;
  for (Index i = 0; i < series.size(); ++i) {
    if (!std::isfinite(series(i))) {
      throw std::invalid_argument("median_argmax: non-finite value");
    }
    best = std::max(best, std::abs(series(i)));
  }
  std::vector<std::size_t> argmax;
  for (Index i = 0; i < series.size(); ++i) {
    if (std::abs(series(i)) == best) {
      argmax.push_back(static_cast<std::size_t>(i));
    }
  }
  return argmax[(argmax.size() - 1) / 2];
}

namespace detail {

inline void require_some_valid(const CusumMatrix& t) {
  for (Index c = 0; c < t.valid.cols(); ++c) {
    for (Index j = 0; j < t.valid.rows(); ++j) {
      if (t.valid(j, c) != 0) return;
    }
  }
  throw all_invalid_error(
      "no row has observations on both sides of any split point");
}

inline ChangepointEstimate locate(const CusumMatrix& t,
                                  ProjectionEstimate proj, Variant variant,
                                  Index stride) {
  ChangepointEstimate est;
  est.projected = t.stats.transpose() * proj.v_hat;
  const std::size_t c = median_argmax(est.projected);
  est.z_hat = stride * (static_cast<Index>(c) + 1);
  est.peak_value = std::abs(est.projected(static_cast<Index>(c)));
  est.projection = std::move(proj);
  est.variant = variant;
  return est;
}

}  // namespace detail

/// The MissInspect algorithm: MissCUSUM transform, penalised projection
/// estimate, then the location of the peak of the projected series.
inline ChangepointEstimate miss_inspect(const MaskedMatrix& m, double lambda,
                                        const SolverOptions& opt = {}) {
  const CusumMatrix t = miss_cusum(m);
  detail::require_some_valid(t);
  ProjectionEstimate proj = estimate_projection(t, lambda, opt);
  return detail::locate(t, std::move(proj), Variant::full_data, 1);
}

/// Splits the columns into the first floor(n/2) odd-numbered and the first
/// floor(n/2) even-numbered time points (1-based). A trailing odd column is
/// dropped.
inline std::pair<MaskedMatrix, MaskedMatrix> split_columns(
    const MaskedMatrix& m) {
  const Index n = m.n();
  if (n < 4) {
    throw std::invalid_argument(
        "split_columns: need n >= 4 so each half spans two time points");
  }
  const Index n1 = n / 2;
  MaskedMatrix odd, even;
  odd.values.resize(m.p(), n1);
  odd.mask.resize(m.p(), n1);
  even.values.resize(m.p(), n1);
  even.mask.resize(m.p(), n1);
  for (Index i = 0; i < n1; ++i) {
    odd.values.col(i) = m.values.col(2 * i);
    odd.mask.col(i) = m.mask.col(2 * i);
    even.values.col(i) = m.values.col(2 * i + 1);
    even.mask.col(i) = m.mask.col(2 * i + 1);
  }
  return {std::move(odd), std::move(even)};
}

/// Sample-splitting variant: the projection direction is estimated on the
/// odd-numbered time points and the changepoint located on the even-numbered
/// ones; the returned z_hat is twice the half-sample peak location (always
/// even). lambda should be scaled for the half-sample length n1 = floor(n/2).
inline ChangepointEstimate miss_inspect_split(const MaskedMatrix& m,
                                              double lambda,
                                              const SolverOptions& opt = {}) {
  auto [odd, even] = split_columns(m);
  const CusumMatrix t_odd = miss_cusum(odd);
  detail::require_some_valid(t_odd);
  const CusumMatrix t_even = miss_cusum(even);
  detail::require_some_valid(t_even);
  ProjectionEstimate proj = estimate_projection(t_odd, lambda, opt);
  return detail::locate(t_even, std::move(proj), Variant::sample_split, 2);
}

namespace detail {

inline double median_of(std::vector<double> xs) {
  const std::size_t s = xs.size();
  auto mid = xs.begin() + static_cast<std::ptrdiff_t>(s / 2);
  std::nth_element(xs.begin(), mid, xs.end());
  if (s % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(xs.begin(), mid);
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Robust noise-scale estimate: per row, 1.4826 * MAD of first differences
/// of consecutively observed values, divided by sqrt(2); then the median over
/// rows with at least two observations.
inline double estimate_sigma(const MaskedMatrix& m) {
  std::vector<double> row_estimates;
  std::vector<double> diffs, dev;
  for (Index j = 0; j < m.p(); ++j) {
    diffs.clear();
    double prev = 0.0;
    bool have_prev = false;
    for (Index t = 0; t < m.n(); ++t) {
      if (m.mask(j, t) == 0) continue;
      if (have_prev) diffs.push_back(m.values(j, t) - prev);
      prev = m.values(j, t);
      have_prev = true;
    }
    if (diffs.empty()) continue;
    const double centre = detail::median_of(diffs);
    dev.clear();
    for (double d : diffs) dev.push_back(std::abs(d - centre));
    const double mad = detail::median_of(dev);
    row_estimates.push_back(1.4826 * mad / std::sqrt(2.0));
  }
  if (row_estimates.empty()) {
    throw std::invalid_argument(
        "estimate_sigma: no row has two or more observations");
  }
  return detail::median_of(row_estimates);
}

}  // namespace misscusum
