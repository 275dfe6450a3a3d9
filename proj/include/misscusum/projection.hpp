#pragma once

#include "misscusum/cusum.hpp"
#include "misscusum/errors.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace misscusum {

struct SolverOptions {
  int max_iter = 100;
  double tol = 1e-8;  // stop when sin of the angle between v iterates < tol
  // Override for the initial direction; default is the leading left singular
  // vector of the transform. Exists so tests can probe sign invariance.
  std::optional<Vector> init_v;
};

/// Result of the penalised rank-one fit. v_hat is the estimated projection
/// direction, w_hat the accompanying right factor, both unit vectors.
struct ProjectionEstimate {
  Vector v_hat;
  Vector w_hat;
  double lambda = 0.0;
  int iterations = 0;
  std::vector<double> objective_trace;  // one entry per iteration, nondecreasing
  bool converged = false;
};

/// Componentwise sgn(v_j) * max(|v_j| - lambda, 0).
inline Vector soft_threshold(const Vector& v, double lambda) {
  if (lambda < 0.0) {
    throw std::invalid_argument("soft_threshold: lambda must be >= 0");
  }
  Vector out(v.size());
  for (Index j = 0; j < v.size(); ++j) {
    const double mag = std::abs(v(j)) - lambda;
    out(j) = mag > 0.0 ? (v(j) > 0.0 ? mag : -mag) : 0.0;
  }
  return out;
}

/// Maximum row l2-norm of the statistics matrix. The penalised problem has a
/// nonzero solution iff lambda is below this value.
inline double two_to_inf_norm(const CusumMatrix& t) {
  double best = 0.0;
  for (Index j = 0; j < t.stats.rows(); ++j) {
    best = std::max(best, t.stats.row(j).norm());
  }
  return best;
}

/// Penalty scale * sigma * sqrt(n * log(p*n)). scale = 0.5 is the practical
/// default; scale = 2 recovers the theoretical choice.
inline double default_lambda(Index n, Index p, double sigma,
                             double scale = 0.5) {
  if (n < 2 || p < 1) {
    throw std::invalid_argument("default_lambda: need n >= 2 and p >= 1");
  }
  if (!(sigma > 0.0) || !(scale > 0.0)) {
    throw std::invalid_argument(
        "default_lambda: sigma and scale must be positive");
  }
  const double dn = static_cast<double>(n);
  const double dp = static_cast<double>(p);
  return scale * sigma * std::sqrt(dn * std::log(dp * dn));
}

/// Leading left singular vector of the statistics matrix by power iteration
/// on T*T'. Deterministic: starts from the normalised all-ones vector
/// (perturbing the first coordinate by 1e-6 if that start is annihilated),
/// runs at most 200 iterations or until the eigenvalue estimate settles to
/// relative precision 1e-10.
inline Vector leading_left_singular_vector(const CusumMatrix& t) {
  const Matrix& m = t.stats;
  const Index p = m.rows();
  Vector u = Vector::Ones(p) / std::sqrt(static_cast<double>(p));
  const double frob = m.norm();
  if (frob == 0.0) {
    throw std::invalid_argument(
        "leading_left_singular_vector: zero matrix has no leading direction");
  }
  if ((m.transpose() * u).norm() <= 1e-12 * frob) {
    u(0) += 1e-6;
    u.normalize();
  }
  double eig = 0.0;
  for (int it = 0; it < 200; ++it) {
    Vector y = m * (m.transpose() * u);
    const double norm = y.norm();
    if (norm <= 1e-300) {
      u(0) += 1e-6;
      u.normalize();
      continue;
    }
    u = y / norm;
    if (it > 0 && std::abs(norm - eig) <= 1e-10 * norm) {
      eig = norm;
      break;
    }
    eig = norm;
  }
  return u;
}

/// Soft-thresholded power iteration for the penalised rank-one problem
///   max over unit-ball (v, w) of  <T, v w'> - lambda * |v|_1.
/// Alternates w <- T'v / |T'v| and v <- soft(Tw, lambda) / |soft(Tw, lambda)|
/// from the leading left singular vector, until the angle between successive
/// v iterates falls below tol. The objective is recorded once per iteration
/// and is nondecreasing. Throws degenerate_penalty_error when lambda is at or
/// above |T|_{2->inf} (the maximiser is then v = 0), and also if the
/// soft-threshold step ever annihilates v, which can occur numerically for
/// lambda just below the norm.
inline ProjectionEstimate estimate_projection(const CusumMatrix& t,
                                              double lambda,
                                              const SolverOptions& opt = {}) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("estimate_projection: lambda must be > 0");
  }
  if (opt.max_iter < 1) {
    throw std::invalid_argument("estimate_projection: max_iter must be >= 1");
  }
  if (!(opt.tol > 0.0)) {
    throw std::invalid_argument("estimate_projection: tol must be > 0");
  }
  const double norm = two_to_inf_norm(t);
  if (lambda >= norm) {
    throw degenerate_penalty_error(
        lambda, norm,
        "estimate_projection: lambda >= |T|_{2->inf} forces v = 0; lower "
        "lambda below " +
            std::to_string(norm));
  }
  const Matrix& m = t.stats;

  Vector v;
  if (opt.init_v) {
    if (opt.init_v->size() != m.rows()) {
      throw std::invalid_argument("estimate_projection: init_v has wrong size");
    }
    v = opt.init_v->normalized();
  } else {
    v = leading_left_singular_vector(t);
  }

  ProjectionEstimate est;
  est.lambda = lambda;
  est.objective_trace.reserve(static_cast<std::size_t>(opt.max_iter));
  Vector w;
  for (int it = 1; it <= opt.max_iter; ++it) {
    w = m.transpose() * v;
    const double wn = w.norm();
    if (wn == 0.0) {
      throw degenerate_penalty_error(
          lambda, norm, "estimate_projection: T'v vanished during iteration");
    }
    w /= wn;
    const Vector tw = m * w;
    Vector v_new = soft_threshold(tw, lambda);
    const double vn = v_new.norm();
    if (vn == 0.0) {
      throw degenerate_penalty_error(
          lambda, norm,
          "estimate_projection: soft threshold annihilated v; lambda is too "
          "close to |T|_{2->inf} = " +
              std::to_string(norm));
    }
    v_new /= vn;
    est.objective_trace.push_back(v_new.dot(tw) -
                                  lambda * v_new.lpNorm<1>());
    const double cosine = std::min(1.0, std::abs(v_new.dot(v)));
    const double sine = std::sqrt(std::max(0.0, 1.0 - cosine * cosine));
    v = v_new;
    est.iterations = it;
    if (sine < opt.tol) {
      est.converged = true;
      break;
    }
  }
  est.v_hat = v;
  est.w_hat = w;
  return est;
}

}  // namespace misscusum
