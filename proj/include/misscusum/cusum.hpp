#pragma once

#include "misscusum/masked_matrix.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace misscusum {

/// CUSUM statistics of a (possibly partially observed) p x n matrix.
/// Column c (0-based) of `stats` is the contrast at split point t = c+1 in
/// the 1-based time convention; `valid(j, c)` is 1 iff row j has at least one
/// observation on each side of the split. Invalid entries are stored as 0.
struct CusumMatrix {
  Matrix stats;     // p x (n-1)
  MaskMatrix valid; // p x (n-1)

  Index p() const noexcept { return stats.rows(); }

  /// Wraps an arbitrary dense matrix with an all-valid mask. Used by the
  /// projection solver's tests and by callers that already hold a transform.
  static CusumMatrix from_dense(const Matrix& stats) {
    CusumMatrix t;
    t.stats = stats;
    t.valid = MaskMatrix::Ones(stats.rows(), stats.cols());
    return t;
  }
};

/// The MissCUSUM transformation. For each row j and split point t, compares
/// the mean of the observed entries after t with the mean of those up to t,
/// scaled by sqrt(L*R/N) where L and R are the observation counts on the two
/// sides and N their total. Entries with an empty side are 0 and invalid.
/// Each row is evaluated in one pass with running sums.
inline CusumMatrix miss_cusum(const MaskedMatrix& m) {
  const Index p = m.p(), n = m.n();
  CusumMatrix out;
  out.stats = Matrix::Zero(p, n - 1);
  out.valid = MaskMatrix::Zero(p, n - 1);
  for (Index j = 0; j < p; ++j) {
    std::int64_t total_count = 0;
    double total_sum = 0.0;
    for (Index t = 0; t < n; ++t) {
      total_count += m.mask(j, t);
      total_sum += m.values(j, t);
    }
    if (total_count == 0) continue;
    std::int64_t left_count = 0;
    double left_sum = 0.0;
    for (Index c = 0; c < n - 1; ++c) {
      left_count += m.mask(j, c);
      left_sum += m.values(j, c);
      const std::int64_t right_count = total_count - left_count;
      if (left_count > 0 && right_count > 0) {
        const double right_sum = total_sum - left_sum;
        const double scale =
            std::sqrt(static_cast<double>(left_count) *
                      static_cast<double>(right_count) /
                      static_cast<double>(total_count));
        out.stats(j, c) = scale * (right_sum / static_cast<double>(right_count) -
                                   left_sum / static_cast<double>(left_count));
        out.valid(j, c) = 1;
      }
    }
  }
  return out;
}

/// Standard CUSUM transformation of a fully observed matrix. Equal to
/// miss_cusum with an all-ones mask; kept as a direct implementation so the
/// two can cross-check each other.
inline CusumMatrix cusum(const Matrix& values) {
  const Index p = values.rows(), n = values.cols();
  if (n < 2) {
    throw std::invalid_argument("cusum: need at least two time points");
  }
  for (Index t = 0; t < n; ++t) {
    for (Index j = 0; j < p; ++j) {
      if (!std::isfinite(values(j, t))) {
        throw std::invalid_argument("cusum: non-finite value");
      }
    }
  }
  CusumMatrix out;
  out.stats.resize(p, n - 1);
  out.valid = MaskMatrix::Ones(p, n - 1);
  const double dn = static_cast<double>(n);
  for (Index j = 0; j < p; ++j) {
    double total_sum = values.row(j).sum();
    double left_sum = 0.0;
    for (Index c = 0; c < n - 1; ++c) {
      left_sum += values(j, c);
      const double t = static_cast<double>(c + 1);
      const double scale = std::sqrt(t * (dn - t) / dn);
      out.stats(j, c) =
          scale * ((total_sum - left_sum) / (dn - t) - left_sum / t);
    }
  }
  return out;
}

/// The vector gamma(z, n): the CUSUM transform of a unit step at z. It is the
/// time profile every signal row follows under a single mean change, with a
/// strict peak sqrt(z(n-z)/n) at t = z.
struct GammaVector {
  Vector entries;  // length n-1; entries(c) is the value at t = c+1
  Index z;         // 1-based changepoint location
  Index n;
};

inline GammaVector gamma_vector(Index n, Index z) {
  if (n < 2) {
    throw std::invalid_argument("gamma_vector: need n >= 2");
  }
  if (z < 1 || z > n - 1) {
    throw std::invalid_argument("gamma_vector: z must lie in [1, n-1], got " +
                                std::to_string(z));
  }
  GammaVector g;
  g.z = z;
  g.n = n;
  g.entries.resize(n - 1);
  const double dn = static_cast<double>(n);
  const double dz = static_cast<double>(z);
  const double inv_sqrt_n = 1.0 / std::sqrt(dn);
  for (Index c = 0; c < n - 1; ++c) {
    const double t = static_cast<double>(c + 1);
    g.entries(c) = (c + 1 <= z)
                       ? inv_sqrt_n * std::sqrt(t / (dn - t)) * (dn - dz)
                       : inv_sqrt_n * std::sqrt((dn - t) / t) * dz;
  }
  return g;
}

/// Peak level of the absolute MissCUSUM series in row j for a noiseless mean
/// change of size theta_j at z: |theta_j| * sqrt(L_{j,z} R_{j,n-z} / N_j).
/// Diagnostic and test helper.
inline double noiseless_peak(double theta_j, const ObservationCounts& counts,
                             Index j, Index z) {
  if (counts.N(j) <= 0) {
    throw std::invalid_argument("noiseless_peak: row has no observations");
  }
  const Index n = counts.left.cols();
  const double l = static_cast<double>(counts.L(j, z));
  const double r = static_cast<double>(counts.R(j, n - z));
  const double total = static_cast<double>(counts.N(j));
  return std::abs(theta_j) * std::sqrt(l * r / total);
}

}  // namespace misscusum
