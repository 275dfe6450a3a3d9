#pragma once

#include "misscusum/inspect.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace misscusum {

/// Per-segment penalty: scale * sigma * sqrt(len * log(p * len)). sigma is
/// estimated once from the full matrix when not supplied; per_segment_sigma
/// re-estimates on each segment instead (falling back to the global value on
/// segments where estimation fails). When the rule yields a non-positive
/// penalty -- noiseless data gives a zero sigma estimate -- the penalty falls
/// back to 1e-3 times the segment's |T|_{2->inf} so the solver stays usable.
struct PenaltyRule {
  double scale = 0.5;
  std::optional<double> sigma;
  bool per_segment_sigma = false;
};

struct SegmentationOptions {
  int max_changepoints = 1;  // 0 = keep everything above the threshold
  Index min_segment = 10;    // segments shorter than twice this are not split
  std::optional<double> threshold;
  SolverOptions solver;
};

struct FoundChangepoint {
  Index z_hat = 0;         // 1-based global time index
  double prominence = 0.0; // peak of the projected series in its segment
  int depth = 0;           // 0 = full data
  Index seg_lo = 0;        // 1-based inclusive segment columns
  Index seg_hi = 0;
};

struct SegmentationResult {
  std::vector<FoundChangepoint> changepoints;  // ascending z_hat
  std::vector<std::size_t> order;              // indices by prominence, descending
  int segments_attempted = 0;
  int branches_stopped = 0;      // solver degeneracies that ended a branch
  std::string root_error;        // reason the root segment produced nothing
  double sigma_used = 0.0;
  double lambda_root = 0.0;
};

namespace detail {

inline MaskedMatrix slice_columns(const MaskedMatrix& m, Index lo, Index hi) {
  MaskedMatrix out;
  out.values = m.values.middleCols(lo - 1, hi - lo + 1);
  out.mask = m.mask.middleCols(lo - 1, hi - lo + 1);
  return out;
}

inline double segment_lambda(const PenaltyRule& rule, double sigma, Index len,
                             Index p, const CusumMatrix& t) {
  const double dl = static_cast<double>(len);
  const double dp = static_cast<double>(p);
  const double lam = rule.scale * sigma * std::sqrt(dl * std::log(dp * dl));
  if (lam > 0.0) return lam;
  return 1e-3 * two_to_inf_norm(t);
}

}  // namespace detail

/// Recursive binary segmentation around the full-data MissInspect estimator.
/// Each segment of length at least 2*min_segment is searched; a found
/// changepoint splits it and both sides are searched in turn. Branches end
/// quietly when the solver reports a degenerate penalty or an all-invalid
/// transform, or when the peak falls below the threshold. The retained set is
/// the max_changepoints most prominent (all, if 0 with a threshold set).
inline SegmentationResult binary_segmentation(
    const MaskedMatrix& m, const PenaltyRule& rule = {},
    const SegmentationOptions& opt = {}) {
  if (opt.max_changepoints < 0 ||
      (opt.max_changepoints == 0 && !opt.threshold)) {
    throw std::invalid_argument(
        "binary_segmentation: need max_changepoints >= 1 or a threshold");
  }
  if (opt.min_segment < 2) {
    throw std::invalid_argument("binary_segmentation: min_segment must be >= 2");
  }

  SegmentationResult result;
  result.sigma_used = rule.sigma ? *rule.sigma : estimate_sigma(m);

  struct Frame {
    Index lo, hi;
    int depth;
  };
  std::vector<Frame> stack{{1, m.n(), 0}};
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    const Index len = f.hi - f.lo + 1;
    if (len < 2 * opt.min_segment) continue;
    const MaskedMatrix seg = detail::slice_columns(m, f.lo, f.hi);
    result.segments_attempted += 1;
    try {
      double sigma = result.sigma_used;
      if (rule.per_segment_sigma) {
        try {
          sigma = estimate_sigma(seg);
        } catch (const std::invalid_argument&) {
        }
      }
      const CusumMatrix t = miss_cusum(seg);
      detail::require_some_valid(t);
      const double lambda = detail::segment_lambda(rule, sigma, len, m.p(), t);
      if (f.depth == 0) result.lambda_root = lambda;
      ProjectionEstimate proj = estimate_projection(t, lambda, opt.solver);
      ChangepointEstimate est =
          detail::locate(t, std::move(proj), Variant::full_data, 1);
      if (opt.threshold && est.peak_value < *opt.threshold) continue;
      const Index z_global = f.lo - 1 + est.z_hat;
      result.changepoints.push_back(
          {z_global, est.peak_value, f.depth, f.lo, f.hi});
      // right pushed first so the left child is processed next (stack order)
      stack.push_back({z_global + 1, f.hi, f.depth + 1});
      stack.push_back({f.lo, z_global, f.depth + 1});
    } catch (const degenerate_penalty_error& e) {
      result.branches_stopped += 1;
      if (f.depth == 0) result.root_error = std::string("degenerate_penalty: ") + e.what();
    } catch (const all_invalid_error& e) {
      result.branches_stopped += 1;
      if (f.depth == 0) result.root_error = std::string("all_invalid: ") + e.what();
    } catch (const std::invalid_argument& e) {
      result.branches_stopped += 1;
      if (f.depth == 0) result.root_error = std::string("invalid: ") + e.what();
    }
  }

  if (opt.max_changepoints > 0 &&
      result.changepoints.size() >
          static_cast<std::size_t>(opt.max_changepoints)) {
    std::sort(result.changepoints.begin(), result.changepoints.end(),
              [](const FoundChangepoint& a, const FoundChangepoint& b) {
                if (a.prominence != b.prominence)
                  return a.prominence > b.prominence;
                return a.z_hat < b.z_hat;
              });
    result.changepoints.resize(static_cast<std::size_t>(opt.max_changepoints));
  }
  std::sort(result.changepoints.begin(), result.changepoints.end(),
            [](const FoundChangepoint& a, const FoundChangepoint& b) {
              return a.z_hat < b.z_hat;
            });
  result.order.resize(result.changepoints.size());
  std::iota(result.order.begin(), result.order.end(), std::size_t{0});
  std::sort(result.order.begin(), result.order.end(),
            [&](std::size_t a, std::size_t b) {
              const auto& ca = result.changepoints[a];
              const auto& cb = result.changepoints[b];
              if (ca.prominence != cb.prominence)
                return ca.prominence > cb.prominence;
              return ca.z_hat < cb.z_hat;
            });
  return result;
}

}  // namespace misscusum
