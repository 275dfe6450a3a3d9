#pragma once

#include "misscusum/csv.hpp"
#include "misscusum/inspect.hpp"
#include "misscusum/simulation.hpp"

#include <atomic>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace misscusum {

/// Observation-rate law for a campaign cell: a constant rate for every row,
/// or rates drawn per replicate as Beta(10 nu, 10 (1 - nu)).
struct RateSpec {
  enum class Kind { constant, beta };
  Kind kind = Kind::constant;
  double param = 1.0;  // the constant rate, or nu

  static RateSpec constant(double q0) { return {Kind::constant, q0}; }
  static RateSpec beta(double nu) { return {Kind::beta, nu}; }
};

struct CampaignCell {
  Index n = 0, p = 0, z = 0, k = 1;
  double vartheta = 1.0;
  double sigma = 1.0;
  ThetaShape shape = ThetaShape::flat;
  RateSpec rates;
  double lambda_scale = 0.5;
  Variant variant = Variant::full_data;
};

struct CellResult {
  CampaignCell cell;
  int reps = 0;
  int failures = 0;
  double mean_abs_err = 0.0, median_abs_err = 0.0, sd_abs_err = 0.0;
  double mean_sine = 0.0, median_sine = 0.0, sd_sine = 0.0;
  double mean_angle_deg = 0.0, median_angle_deg = 0.0, sd_angle_deg = 0.0;
};

namespace detail {

struct ReplicateOutcome {
  bool ok = false;
  double abs_err = 0.0;
  double sine = 0.0;
  double angle_deg = 0.0;
};

inline ReplicateOutcome run_replicate(const CampaignCell& cell,
                                      std::uint64_t seed) {
  ModelSpec spec;
  spec.n = cell.n;
  spec.p = cell.p;
  spec.z = cell.z;
  spec.sigma = cell.sigma;
  spec.seed = seed;
  spec.theta = make_theta(cell.p, cell.k, cell.vartheta, cell.shape);
  if (cell.rates.kind == RateSpec::Kind::constant) {
    spec.q = Vector::Constant(cell.p, cell.rates.param);
  } else {
    Rng rates_rng(substream(seed, kRatesStream));
    const double nu = cell.rates.param;
    spec.q.resize(cell.p);
    for (Index j = 0; j < cell.p; ++j) {
      spec.q(j) = std::clamp(rates_rng.beta(10.0 * nu, 10.0 * (1.0 - nu)),
                             1e-12, 1.0);
    }
  }

  ReplicateOutcome out;
  try {
    const MaskedMatrix m = simulate(spec);
    ChangepointEstimate est;
    if (cell.variant == Variant::full_data) {
      const double lambda =
          default_lambda(cell.n, cell.p, cell.sigma, cell.lambda_scale);
      est = miss_inspect(m, lambda);
    } else {
      const Index n1 = cell.n / 2;
      const double lambda =
          default_lambda(n1, cell.p, cell.sigma, cell.lambda_scale);
      est = miss_inspect_split(m, lambda);
    }
    out.abs_err = std::abs(static_cast<double>(est.z_hat - spec.z));
    const Vector oracle = oracle_direction(spec.theta, spec.q);
    out.sine = sine_angle(est.projection.v_hat, oracle);
    out.angle_deg = angle_degrees(est.projection.v_hat, oracle);
    out.ok = true;
  } catch (const degenerate_penalty_error&) {
  } catch (const all_invalid_error&) {
  }
  return out;
}

inline void summarise(std::vector<double>& xs, double& mean, double& median,
                      double& sd) {
  if (xs.empty()) {
    mean = median = sd = 0.0;
    return;
  }
  double acc = 0.0;
  for (double x : xs) acc += x;
  mean = acc / static_cast<double>(xs.size());
  median = median_of(xs);
  if (xs.size() < 2) {
    sd = 0.0;
    return;
  }
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace detail

inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

/// Runs every (cell, replicate) pair, each on its own derived seed
/// derive_seed(base_seed, cell_index, rep), with up to `threads` workers
/// (0 = hardware concurrency). Replicate outcomes land in a preallocated
/// slot per pair and aggregation walks them in index order, so the result is
/// identical for any thread count.
inline std::vector<CellResult> run_campaign(
    const std::vector<CampaignCell>& cells, int reps, std::uint64_t base_seed,
    unsigned threads = 0) {
  if (reps < 1) {
    throw std::invalid_argument("run_campaign: reps must be >= 1");
  }
  const std::size_t total = cells.size() * static_cast<std::size_t>(reps);
  std::vector<detail::ReplicateOutcome> outcomes(total);
  std::atomic<std::size_t> next{0};
  const unsigned workers =
      std::min<unsigned>(resolve_threads(threads),
                         static_cast<unsigned>(std::max<std::size_t>(total, 1)));
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= total) break;
      const std::size_t cell_idx = i / static_cast<std::size_t>(reps);
      const std::size_t rep = i % static_cast<std::size_t>(reps);
      outcomes[i] = detail::run_replicate(
          cells[cell_idx], derive_seed(base_seed, cell_idx, rep));
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  std::vector<CellResult> results;
  results.reserve(cells.size());
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    CellResult r;
    r.cell = cells[ci];
    r.reps = reps;
    std::vector<double> errs, sines, angles;
    for (int rep = 0; rep < reps; ++rep) {
      const auto& o = outcomes[ci * static_cast<std::size_t>(reps) +
                               static_cast<std::size_t>(rep)];
      if (!o.ok) {
        r.failures += 1;
        continue;
      }
      errs.push_back(o.abs_err);
      sines.push_back(o.sine);
      angles.push_back(o.angle_deg);
    }
    detail::summarise(errs, r.mean_abs_err, r.median_abs_err, r.sd_abs_err);
    detail::summarise(sines, r.mean_sine, r.median_sine, r.sd_sine);
    detail::summarise(angles, r.mean_angle_deg, r.median_angle_deg,
                      r.sd_angle_deg);
    results.push_back(std::move(r));
  }
  return results;
}

inline void write_campaign_csv(std::ostream& out,
                               const std::vector<CellResult>& results) {
  out << "cell,n,p,z,k,theta_shape,vartheta,sigma,q_kind,q_param,"
         "lambda_scale,variant,reps,failures,"
         "mean_abs_err,median_abs_err,sd_abs_err,"
         "mean_sine_angle,median_sine_angle,sd_sine_angle,"
         "mean_angle_deg,median_angle_deg,sd_angle_deg\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const CellResult& r = results[i];
    const CampaignCell& c = r.cell;
    out << i << ',' << c.n << ',' << c.p << ',' << c.z << ',' << c.k << ','
        << theta_shape_name(c.shape) << ',' << format_double(c.vartheta) << ','
        << format_double(c.sigma) << ','
        << (c.rates.kind == RateSpec::Kind::constant ? "const" : "beta") << ','
        << format_double(c.rates.param) << ',' << format_double(c.lambda_scale)
        << ',' << variant_name(c.variant) << ',' << r.reps << ','
        << r.failures << ',' << format_double(r.mean_abs_err) << ','
        << format_double(r.median_abs_err) << ',' << format_double(r.sd_abs_err)
        << ',' << format_double(r.mean_sine) << ','
        << format_double(r.median_sine) << ',' << format_double(r.sd_sine)
        << ',' << format_double(r.mean_angle_deg) << ','
        << format_double(r.median_angle_deg) << ','
        << format_double(r.sd_angle_deg) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Presets

/// Tuning sweep: mean projection angle as a function of the penalty scale,
/// one cell per scale in {0.1, 0.25, 0.5, 1, 2}.
inline std::vector<CampaignCell> preset_fig2() {
  std::vector<CampaignCell> cells;
  for (double scale : {0.1, 0.25, 0.5, 1.0, 2.0}) {
    CampaignCell c;
    c.n = 1000;
    c.p = 500;
    c.z = 400;
    c.k = 3;
    c.vartheta = 2.0;
    c.sigma = 1.0;
    c.shape = ThetaShape::flat;
    c.rates = RateSpec::constant(0.2);
    c.lambda_scale = scale;
    cells.push_back(c);
  }
  return cells;
}

/// Scaling study: error against the weighted signal norm over a grid of
/// signal strength, noise scale and observation rate.
inline std::vector<CampaignCell> preset_fig3() {
  std::vector<CampaignCell> cells;
  for (double vartheta : {0.5, 1.0, 2.0}) {
    for (double sigma : {0.2, 0.4, 0.8, 1.6}) {
      for (double q : {0.1, 0.2, 0.4, 0.8}) {
        CampaignCell c;
        c.n = 1200;
        c.p = 1000;
        c.z = 400;
        c.k = 3;
        c.vartheta = vartheta;
        c.sigma = sigma;
        c.shape = ThetaShape::flat;
        c.rates = RateSpec::constant(q);
        cells.push_back(c);
      }
    }
  }
  return cells;
}

/// Heterogeneous-rate benchmark grid: Beta-distributed observation rates,
/// harmonic signal shape, sparsity in {3, floor(sqrt(p)), p}.
inline std::vector<CampaignCell> preset_table1() {
  std::vector<CampaignCell> cells;
  for (double nu : {0.1, 0.5}) {
    for (Index k : {Index{3}, Index{44}, Index{2000}}) {
      for (double vartheta : {1.0, 2.0, 3.0}) {
        CampaignCell c;
        c.n = 1200;
        c.p = 2000;
        c.z = 400;
        c.k = k;
        c.vartheta = vartheta;
        c.sigma = 1.0;
        c.shape = ThetaShape::harmonic;
        c.rates = RateSpec::beta(nu);
        cells.push_back(c);
      }
    }
  }
  return cells;
}

// ---------------------------------------------------------------------------
// Scaling slopes for the fig3 preset

/// Least-squares slope of log mean error against log weighted signal norm,
/// one fit per (vartheta, sigma) curve across the observation rates. Points
/// on the accuracy floor or the breakdown ceiling are excluded; a curve needs
/// at least three remaining points to be fitted.
struct SlopeFit {
  double vartheta = 0.0;
  double sigma = 0.0;
  int location_points = 0;
  int angle_points = 0;
  bool location_fitted = false;
  bool angle_fitted = false;
  double location_slope = 0.0;
  double angle_slope = 0.0;
};

namespace detail {

// Filter bounds for the slope fits. Location errors below the floor are
// dominated by exact recovery and integer rounding; above the ceiling the
// estimator has broken down and the error saturates near the segment scale.
inline constexpr double kLocationFloor = 0.5;
inline constexpr double kLocationCeiling = 120.0;
inline constexpr double kSineFloor = 0.02;
inline constexpr double kSineCeiling = 0.90;

inline bool fit_slope(const std::vector<double>& x,
                      const std::vector<double>& y, double& slope) {
  const std::size_t m = x.size();
  if (m < 3) return false;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double dm = static_cast<double>(m);
  const double denom = dm * sxx - sx * sx;
  if (denom <= 0.0) return false;
  slope = (dm * sxy - sx * sy) / denom;
  return true;
}

}  // namespace detail

inline std::vector<SlopeFit> fig3_slopes(const std::vector<CellResult>& results) {
  std::vector<SlopeFit> fits;
  for (const CellResult& r : results) {
    const CampaignCell& c = r.cell;
    if (c.rates.kind != RateSpec::Kind::constant) continue;
    auto it = std::find_if(fits.begin(), fits.end(), [&](const SlopeFit& f) {
      return f.vartheta == c.vartheta && f.sigma == c.sigma;
    });
    if (it == fits.end()) {
      fits.push_back({c.vartheta, c.sigma, 0, 0, false, false, 0.0, 0.0});
    }
  }
  for (SlopeFit& f : fits) {
    std::vector<double> x_loc, y_loc, x_ang, y_ang;
    for (const CellResult& r : results) {
      const CampaignCell& c = r.cell;
      if (c.vartheta != f.vartheta || c.sigma != f.sigma) continue;
      const double norm_2q = c.vartheta * std::sqrt(c.rates.param);
      if (r.mean_abs_err >= detail::kLocationFloor &&
          r.mean_abs_err <= detail::kLocationCeiling) {
        x_loc.push_back(std::log(norm_2q));
        y_loc.push_back(std::log(r.mean_abs_err));
      }
      if (r.mean_sine >= detail::kSineFloor &&
          r.mean_sine <= detail::kSineCeiling) {
        x_ang.push_back(std::log(norm_2q));
        y_ang.push_back(std::log(r.mean_sine));
      }
    }
    f.location_points = static_cast<int>(x_loc.size());
    f.angle_points = static_cast<int>(x_ang.size());
    f.location_fitted = detail::fit_slope(x_loc, y_loc, f.location_slope);
    f.angle_fitted = detail::fit_slope(x_ang, y_ang, f.angle_slope);
  }
  return fits;
}

inline void write_slopes_csv(std::ostream& out,
                             const std::vector<SlopeFit>& fits) {
  out << "vartheta,sigma,location_points,location_slope,angle_points,"
         "angle_slope\n";
  for (const SlopeFit& f : fits) {
    out << format_double(f.vartheta) << ',' << format_double(f.sigma) << ','
        << f.location_points << ','
        << (f.location_fitted ? format_double(f.location_slope) : "NA") << ','
        << f.angle_points << ','
        << (f.angle_fitted ? format_double(f.angle_slope) : "NA") << '\n';
  }
}

}  // namespace misscusum
