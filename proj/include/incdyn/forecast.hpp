#pragma once

// Posterior-predictive projection of the latent states beyond the last
// observed year, and pointwise credible bands for pdf, cdf, Lorenz and
// generalised Lorenz curves (shared with in-sample curve export).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "incdyn/dists.hpp"
#include "incdyn/dominance.hpp"
#include "incdyn/error.hpp"
#include "incdyn/mcmc.hpp"
#include "incdyn/random.hpp"
#include "incdyn/welfare.hpp"

namespace incdyn {

struct ForecastDraws {
  DistributionKind kind = DistributionKind::Dagum;
  std::vector<std::string> labels;  // one per horizon step
  std::vector<LatentPath> states;   // per kept draw, H x d

  std::size_t horizon() const { return labels.size(); }
  std::size_t num_draws() const { return states.size(); }

  ParameterVector params(std::size_t m, std::size_t h) const {
    return states_to_params(states.at(m).row(static_cast<Eigen::Index>(h)).transpose(), kind);
  }
};

/// Label of the year h steps after `last`: numeric labels are incremented,
/// anything else gets a "+h" suffix.
inline std::string horizon_label(const std::string& last, std::size_t h) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(last, &pos);
    if (pos == last.size()) return std::to_string(v + static_cast<long>(h));
  } catch (const std::exception&) {
  }
  return last + "+" + std::to_string(h);
}

/// theta_{T+h} = theta_{T+h-1} + sqrt(v) eps for each kept draw, with that
/// draw's own innovation variances v.
inline ForecastDraws forecast_states(const DrawSet& draws, std::size_t horizon, Rng& rng) {
  if (draws.model == ModelTag::independent) {
    throw UsageError("forecasting needs a transition law; fit with --model rw or --model rw-hs");
  }
  if (draws.num_draws() == 0) throw DomainError("forecast: empty draw set");
  ForecastDraws out;
  out.kind = draws.kind;
  for (std::size_t h = 1; h <= horizon; ++h) out.labels.push_back(horizon_label(draws.years.back(), h));
  const auto d = static_cast<Eigen::Index>(draws.dim());
  const auto last = static_cast<Eigen::Index>(draws.num_years() - 1);
  out.states.reserve(draws.num_draws());
  for (std::size_t m = 0; m < draws.num_draws(); ++m) {
    const Eigen::VectorXd sd = draws.variances(m).cwiseSqrt();
    LatentPath ext(static_cast<Eigen::Index>(horizon), d);
    Eigen::VectorXd theta = draws.paths[m].row(last).transpose();
    for (std::size_t h = 0; h < horizon; ++h) {
      for (Eigen::Index k = 0; k < d; ++k) theta[k] += sd[k] * std_normal(rng);
      ext.row(static_cast<Eigen::Index>(h)) = theta.transpose();
    }
    out.states.push_back(std::move(ext));
  }
  return out;
}

enum class BandCurve { pdf, cdf, lorenz, gen_lorenz };

inline std::string_view to_string(BandCurve c) {
  switch (c) {
    case BandCurve::pdf: return "pdf";
    case BandCurve::cdf: return "cdf";
    case BandCurve::lorenz: return "lorenz";
    case BandCurve::gen_lorenz: return "gen_lorenz";
  }
  return "?";
}

struct BandPoint {
  BandCurve curve = BandCurve::pdf;
  double x = 0.0;
  Summary summary;
};

/// Per-draw welfare sample of one year or horizon.
struct WelfareSample {
  std::vector<double> mean, gini, fgt0, fgt1;  // mean/gini only for draws with a finite mean
};

struct DistributionBands {
  std::string label;
  std::vector<BandPoint> points;
  WelfareSample welfare;
  std::optional<Summary> mean, gini;
  Summary fgt0, fgt1;
  double excluded_draw_fraction = 0.0;
};

/// Posterior quantile of the pooled mixture (1/M) sum_m F_m at level u,
/// found by bisection on log income.
inline double pooled_quantile(const std::vector<ParameterVector>& pars, double u) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& p : pars) {
    const double q = quantile(p, u);
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  if (!(hi > lo)) return lo;
  double llo = std::log(lo), lhi = std::log(hi);
  for (int it = 0; it < 100 && lhi - llo > 1e-12; ++it) {
    const double mid = 0.5 * (llo + lhi);
    const double y = std::exp(mid);
    double F = 0.0;
    for (const auto& p : pars) F += cdf(p, y);
    F /= static_cast<double>(pars.size());
    (F < u ? llo : lhi) = mid;
  }
  return std::exp(0.5 * (llo + lhi));
}

/// `points` log-spaced incomes between the pooled 0.1% and 99.9% quantiles
/// of all the parameter vectors supplied.
inline std::vector<double> default_y_grid(const std::vector<ParameterVector>& pooled, std::size_t points = 512) {
  if (pooled.empty()) throw DomainError("y-grid: no draws");
  if (points < 2) throw UsageError("y-grid needs at least two points");
  const double lo = std::log(pooled_quantile(pooled, 0.001));
  const double hi = std::log(pooled_quantile(pooled, 0.999));
  std::vector<double> y(points);
  for (std::size_t i = 0; i < points; ++i) {
    y[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1));
  }
  return y;
}

/// Pointwise bands and welfare summaries for one set of parameter draws.
inline DistributionBands distribution_bands(const std::string& label, const std::vector<ParameterVector>& pars,
                                            const UGrid& ugrid, const std::vector<double>& ygrid, PovertyLine line,
                                            double level) {
  if (pars.empty()) throw DomainError("bands: no draws");
  DistributionBands out;
  out.label = label;
  const std::size_t M = pars.size();
  std::vector<double> buf(M);
  for (BandCurve c : {BandCurve::pdf, BandCurve::cdf}) {
    for (double y : ygrid) {
      for (std::size_t m = 0; m < M; ++m) buf[m] = c == BandCurve::pdf ? pdf(pars[m], y) : cdf(pars[m], y);
      out.points.push_back({c, y, summarize(buf, level)});
    }
  }
  std::vector<std::optional<double>> mu(M);
  for (std::size_t m = 0; m < M; ++m) {
    mu[m] = mean(pars[m]).value;
    const auto f = draw_functionals(pars[m], line);
    if (f.mean) {
      out.welfare.mean.push_back(*f.mean);
      out.welfare.gini.push_back(*f.gini);
    }
    out.welfare.fgt0.push_back(f.fgt0);
    out.welfare.fgt1.push_back(f.fgt1);
  }
  out.excluded_draw_fraction = 1.0 - static_cast<double>(out.welfare.mean.size()) / static_cast<double>(M);
  if (!out.welfare.mean.empty()) {
    std::vector<double> lz(ugrid.size() * out.welfare.mean.size());
    std::size_t col = 0;
    const std::size_t G = ugrid.size();
    for (std::size_t m = 0; m < M; ++m) {
      if (!mu[m]) continue;
      for (std::size_t i = 0; i < G; ++i) lz[col * G + i] = lorenz(pars[m], ugrid[i]);
      ++col;
    }
    std::vector<double> l(col), gl(col);
    for (std::size_t i = 0; i < G; ++i) {
      for (std::size_t j = 0; j < col; ++j) {
        l[j] = lz[j * G + i];
        gl[j] = out.welfare.mean[j] * l[j];
      }
      out.points.push_back({BandCurve::lorenz, ugrid[i], summarize(l, level)});
      out.points.push_back({BandCurve::gen_lorenz, ugrid[i], summarize(gl, level)});
    }
    out.mean = summarize(out.welfare.mean, level);
    out.gini = summarize(out.welfare.gini, level);
  }
  // Keep curve blocks contiguous: pdf, cdf, lorenz, gen_lorenz.
  std::stable_sort(out.points.begin(), out.points.end(),
                   [](const BandPoint& a, const BandPoint& b) { return a.curve < b.curve; });
  out.fgt0 = summarize(out.welfare.fgt0, level);
  out.fgt1 = summarize(out.welfare.fgt1, level);
  return out;
}

/// Predictive bands per horizon step. An empty y-grid selects the default
/// grid pooled over every horizon, so all horizons share one x-axis.
inline std::vector<DistributionBands> predictive_summaries(const ForecastDraws& fc, const UGrid& ugrid,
                                                           std::vector<double> ygrid, PovertyLine line,
                                                           double level) {
  if (fc.num_draws() == 0) throw DomainError("forecast: no draws");
  std::vector<std::vector<ParameterVector>> per_h(fc.horizon());
  for (std::size_t h = 0; h < fc.horizon(); ++h) {
    per_h[h].reserve(fc.num_draws());
    for (std::size_t m = 0; m < fc.num_draws(); ++m) per_h[h].push_back(fc.params(m, h));
  }
  if (ygrid.empty() && fc.horizon() > 0) {
    std::vector<ParameterVector> pooled;
    for (const auto& v : per_h) pooled.insert(pooled.end(), v.begin(), v.end());
    ygrid = default_y_grid(pooled);
  }
  std::vector<DistributionBands> out;
  for (std::size_t h = 0; h < fc.horizon(); ++h) {
    out.push_back(distribution_bands(fc.labels[h], per_h[h], ugrid, ygrid, line, level));
  }
  return out;
}

/// Parameter vectors of every kept draw for year t.
inline std::vector<ParameterVector> year_params(const DrawSet& draws, std::size_t t) {
  std::vector<ParameterVector> out;
  out.reserve(draws.num_draws());
  for (std::size_t m = 0; m < draws.num_draws(); ++m) out.push_back(draws.params(m, t));
  return out;
}

}  // namespace incdyn
