#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace misscusum {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using MaskMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;
using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using CountVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;
using Index = Eigen::Index;

/// A partially observed p x n data matrix. Rows are coordinates, columns are
/// time points. The mask is authoritative: values at unobserved positions are
/// stored as 0, so elementwise arithmetic never needs to branch on the mask.
struct MaskedMatrix {
  Matrix values;    // p x n, zero wherever mask is zero
  MaskMatrix mask;  // p x n, 1 = observed

  Index p() const noexcept { return values.rows(); }
  Index n() const noexcept { return values.cols(); }
};

/// Validates and assembles a MaskedMatrix, zeroing unobserved entries.
inline MaskedMatrix build_masked(const Matrix& values, const MaskMatrix& mask) {
  if (values.rows() != mask.rows() || values.cols() != mask.cols()) {
    throw std::invalid_argument(
        "build_masked: values and mask dimensions differ");
  }
  if (values.rows() < 1) {
    throw std::invalid_argument("build_masked: need at least one row");
  }
  if (values.cols() < 2) {
    throw std::invalid_argument(
        "build_masked: need at least two time points, got " +
        std::to_string(values.cols()));
  }
  MaskedMatrix out;
  out.values = Matrix::Zero(values.rows(), values.cols());
  out.mask = mask;
  for (Index t = 0; t < values.cols(); ++t) {
    for (Index j = 0; j < values.rows(); ++j) {
      if (mask(j, t) != 0) {
        if (!std::isfinite(values(j, t))) {
          throw std::invalid_argument("build_masked: non-finite observed "
                                      "value at row " +
                                      std::to_string(j + 1) + ", time " +
                                      std::to_string(t + 1));
        }
        out.values(j, t) = values(j, t);
      }
    }
  }
  return out;
}

/// Per-row observation counts. Column c (0-based) of `left` holds the count
/// of observed entries among times 1..c+1, i.e. the paper's L_{j,c+1};
/// `right` likewise holds R_{j,c+1}, the count among the last c+1 times.
struct ObservationCounts {
  CountMatrix left;   // p x n
  CountMatrix right;  // p x n
  CountVector total;  // p

  // L_{j,t} and R_{j,t} with 1-based t as written in the formulas.
  std::int64_t L(Index j, Index t) const { return left(j, t - 1); }
  std::int64_t R(Index j, Index t) const { return right(j, t - 1); }
  std::int64_t N(Index j) const { return total(j); }
};

inline ObservationCounts observation_counts(const MaskedMatrix& m) {
  const Index p = m.p(), n = m.n();
  ObservationCounts c;
  c.left.resize(p, n);
  c.right.resize(p, n);
  c.total.resize(p);
  for (Index j = 0; j < p; ++j) {
    std::int64_t acc = 0;
    for (Index t = 0; t < n; ++t) {
      acc += m.mask(j, t);
      c.left(j, t) = acc;
    }
    c.total(j) = acc;
    acc = 0;
    for (Index t = 0; t < n; ++t) {
      acc += m.mask(j, n - 1 - t);
      c.right(j, t) = acc;
    }
  }
  return c;
}

}  // namespace misscusum
