#pragma once

#include "misscusum/masked_matrix.hpp"
#include "misscusum/rng.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace misscusum {

enum class ThetaShape { flat, harmonic };

inline const char* theta_shape_name(ThetaShape s) {
  return s == ThetaShape::flat ? "flat" : "harmonic";
}

/// Mean-change vector with l2 norm vartheta supported on the first k
/// coordinates: flat puts equal weight on all k, harmonic decays like
/// j^{-1/2} across the support.
inline Vector make_theta(Index p, Index k, double vartheta, ThetaShape shape) {
  if (k < 1 || k > p) {
    throw std::invalid_argument("make_theta: need 1 <= k <= p");
  }
  if (vartheta == 0.0) {
    throw std::invalid_argument("make_theta: vartheta must be nonzero");
  }
  Vector theta = Vector::Zero(p);
  if (shape == ThetaShape::flat) {
    theta.head(k).setConstant(vartheta / std::sqrt(static_cast<double>(k)));
  } else {
    for (Index j = 0; j < k; ++j) {
      theta(j) = 1.0 / std::sqrt(static_cast<double>(j + 1));
    }
    theta *= vartheta / theta.norm();
  }
  return theta;
}

/// A single-changepoint Gaussian model with row-homogeneous missingness:
/// X_{j,t} = mu1_j + theta_j 1{t > z} + sigma Z_{j,t}, observed with
/// probability q_j, everything independent.
struct ModelSpec {
  Index n = 0;
  Index p = 0;
  Index z = 0;          // 1-based: mean changes between columns z and z+1
  Vector theta;
  Vector mu1;           // empty means zero
  double sigma = 1.0;   // 0 allowed for noiseless runs
  Vector q;             // observation rates in (0, 1]
  std::uint64_t seed = 0;

  void validate() const {
    if (n < 2 || p < 1) throw std::invalid_argument("ModelSpec: need n >= 2, p >= 1");
    if (z < 1 || z > n - 1) throw std::invalid_argument("ModelSpec: z must be in [1, n-1]");
    if (theta.size() != p) throw std::invalid_argument("ModelSpec: theta must have length p");
    if (theta.isZero(0.0)) throw std::invalid_argument("ModelSpec: theta must be nonzero");
    if (mu1.size() != 0 && mu1.size() != p) {
      throw std::invalid_argument("ModelSpec: mu1 must be empty or length p");
    }
    if (!(sigma >= 0.0)) throw std::invalid_argument("ModelSpec: sigma must be >= 0");
    if (q.size() != p) throw std::invalid_argument("ModelSpec: q must have length p");
    for (Index j = 0; j < p; ++j) {
      if (!(q(j) > 0.0 && q(j) <= 1.0)) {
        throw std::invalid_argument("ModelSpec: rates must lie in (0, 1]");
      }
    }
  }
};

/// Draws (X o Omega, Omega) from the model. The value and mask streams are
/// derived independently from the seed, so the mask is bit-identical across
/// specs that share a seed and rate vector. Entries are drawn column by
/// column (time-major), coordinates in order within a column.
inline MaskedMatrix simulate(const ModelSpec& spec) {
  spec.validate();
  Rng values_rng(substream(spec.seed, kValuesStream));
  Rng mask_rng(substream(spec.seed, kMaskStream));
  Matrix values(spec.p, spec.n);
  MaskMatrix mask(spec.p, spec.n);
  for (Index t = 0; t < spec.n; ++t) {
    const bool post = (t + 1) > spec.z;
    for (Index j = 0; j < spec.p; ++j) {
      double mean = spec.mu1.size() ? spec.mu1(j) : 0.0;
      if (post) mean += spec.theta(j);
      values(j, t) =
          spec.sigma > 0.0 ? mean + spec.sigma * values_rng.normal() : mean;
    }
  }
  for (Index t = 0; t < spec.n; ++t) {
    for (Index j = 0; j < spec.p; ++j) {
      mask(j, t) = mask_rng.bernoulli(spec.q(j)) ? 1 : 0;
    }
  }
  return build_masked(values, mask);
}

/// Unit vector along theta o sqrt(q), the direction the penalised solver
/// targets under row-homogeneous missingness.
inline Vector oracle_direction(const Vector& theta, const Vector& q) {
  if (theta.size() != q.size()) {
    throw std::invalid_argument("oracle_direction: length mismatch");
  }
  Vector dir(theta.size());
  for (Index j = 0; j < theta.size(); ++j) {
    dir(j) = theta(j) * std::sqrt(q(j));
  }
  const double norm = dir.norm();
  if (norm == 0.0) {
    throw std::invalid_argument("oracle_direction: theta o sqrt(q) is zero");
  }
  return dir / norm;
}

/// Sine of the acute angle between two nonzero vectors; invariant to the sign
/// and scale of either argument.
inline double sine_angle(const Vector& u, const Vector& v) {
  const double nu = u.norm(), nv = v.norm();
  if (nu == 0.0 || nv == 0.0) {
    throw std::invalid_argument("sine_angle: zero vector");
  }
  const double cosine = std::min(1.0, std::abs(u.dot(v)) / (nu * nv));
  return std::sqrt(std::max(0.0, 1.0 - cosine * cosine));
}

/// Acute angle in degrees, acos of the clamped absolute inner-product ratio.
inline double angle_degrees(const Vector& u, const Vector& v) {
  const double nu = u.norm(), nv = v.norm();
  if (nu == 0.0 || nv == 0.0) {
    throw std::invalid_argument("angle_degrees: zero vector");
  }
  const double cosine = std::min(1.0, std::abs(u.dot(v)) / (nu * nv));
  return std::acos(cosine) * 180.0 / M_PI;
}

/// Observation-weighted signal norm sqrt(sum_j theta_j^2 q_j).
inline double weighted_norm(const Vector& theta, const Vector& q) {
  if (theta.size() != q.size()) {
    throw std::invalid_argument("weighted_norm: length mismatch");
  }
  double acc = 0.0;
  for (Index j = 0; j < theta.size(); ++j) {
    acc += theta(j) * theta(j) * q(j);
  }
  return std::sqrt(acc);
}

}  // namespace misscusum
