#pragma once

// Latent-state parameterisation, priors and log-target densities for the
// independent, random-walk (RW) and horseshoe random-walk (RW-HS) models.
//
// A latent state theta_t holds the logs of the distribution parameters in
// storage order; a path stacks T states as the rows of a T x d matrix.

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "incdyn/dists.hpp"
#include "incdyn/error.hpp"

namespace incdyn {

using LatentState = Eigen::VectorXd;
using LatentPath = Eigen::MatrixXd;  // T x d, row t is theta_t

enum class ModelTag { independent, rw, rw_hs };

inline std::string_view to_string(ModelTag m) {
  switch (m) {
    case ModelTag::independent: return "ind";
    case ModelTag::rw: return "rw";
    case ModelTag::rw_hs: return "rw-hs";
  }
  return "?";
}

inline ModelTag parse_model(std::string_view name) {
  if (name == "ind") return ModelTag::independent;
  if (name == "rw") return ModelTag::rw;
  if (name == "rw-hs") return ModelTag::rw_hs;
  throw UsageError("unknown model '" + std::string(name) + "' (expected ind, rw or rw-hs)");
}

/// RW innovation variances sigma_k^2.
struct InnovationScales {
  Eigen::VectorXd sigma2;
};

/// Horseshoe shrinkage block with its inverse-gamma auxiliaries.
struct HorseshoeState {
  double tau2 = 1.0;
  Eigen::VectorXd lambda2;
  double xi = 1.0;
  Eigen::VectorXd nu;

  Eigen::VectorXd variances() const { return tau2 * lambda2; }
};

/// Per-year income samples.
struct Panel {
  std::vector<std::string> years;
  std::vector<std::vector<double>> incomes;

  std::size_t num_years() const { return years.size(); }
  std::size_t num_observations() const {
    std::size_t n = 0;
    for (const auto& y : incomes) n += y.size();
    return n;
  }

  /// Enforces positive finite incomes; empty years only when allowed
  /// (cross-validation training sets may leave a small year empty).
  void validate(bool allow_empty_years = false) const {
    if (years.empty()) throw DomainError("panel has no years");
    if (years.size() != incomes.size()) throw DomainError("panel: year/income size mismatch");
    for (std::size_t t = 0; t < years.size(); ++t) {
      if (incomes[t].empty() && !allow_empty_years) {
        throw DomainError("panel: year " + years[t] + " has no observations");
      }
      for (double y : incomes[t]) {
        if (!(y > 0.0) || !std::isfinite(y)) {
          std::ostringstream os;
          os << "panel: year " << years[t] << " has a non-positive or non-finite income " << y;
          throw DomainError(os.str());
        }
      }
    }
  }
};

/// Sufficient precomputation for the log-likelihood of one year.
struct YearData {
  std::vector<double> log_incomes;
  double sum_log = 0.0;

  YearData() = default;
  explicit YearData(std::span<const double> incomes) : log_incomes(incomes.size()) {
    for (std::size_t i = 0; i < incomes.size(); ++i) {
      detail::check_income("loglik_year", incomes[i]);
      log_incomes[i] = std::log(incomes[i]);
    }
    sum_log = std::accumulate(log_incomes.begin(), log_incomes.end(), 0.0);
  }
  std::size_t size() const { return log_incomes.size(); }
};

inline std::vector<YearData> prepare_years(const Panel& panel) {
  std::vector<YearData> out;
  out.reserve(panel.num_years());
  for (const auto& y : panel.incomes) out.emplace_back(y);
  return out;
}

/// Componentwise exponential of the latent state.
inline ParameterVector states_to_params(const LatentState& state, DistributionKind kind) {
  const auto d = static_cast<Eigen::Index>(parameter_count(kind));
  if (state.size() != d) {
    std::ostringstream os;
    os << "states_to_params: " << to_string(kind) << " needs " << d << " states, got " << state.size();
    throw DomainError(os.str());
  }
  std::array<double, 4> v{};
  for (Eigen::Index k = 0; k < d; ++k) {
    if (!std::isfinite(state[k]) || std::fabs(state[k]) > 700.0) {
      throw NumericError("states_to_params: latent state out of range", state[k]);
    }
    v[k] = std::exp(state[k]);
  }
  return ParameterVector(kind, std::span<const double>(v.data(), static_cast<std::size_t>(d)));
}

/// log p(theta_1): independent Half-Cauchy(0,1) on each exp(theta_k),
/// i.e. sum_k log(2/pi) - log(e^{-theta_k} + e^{theta_k}).
inline double log_prior_initial(const LatentState& state) {
  const double log_2_over_pi = std::log(2.0 / specfun::kPi);
  double out = 0.0;
  for (Eigen::Index k = 0; k < state.size(); ++k) {
    const double th = state[k];
    out += log_2_over_pi + th - detail::softplus(2.0 * th);
  }
  return out;
}

/// Diagonal Gaussian log-density log N(to | from, diag(variances)).
inline double log_transition(const LatentState& to, const LatentState& from, const Eigen::VectorXd& variances) {
  if (to.size() != from.size() || to.size() != variances.size()) {
    throw DomainError("log_transition: dimension mismatch");
  }
  constexpr double kLog2Pi = 1.8378770664093454836;
  double out = 0.0;
  for (Eigen::Index k = 0; k < to.size(); ++k) {
    const double v = variances[k];
    if (!(v > 0.0)) throw DomainError("log_transition: variances must be positive");
    const double diff = to[k] - from[k];
    out -= 0.5 * (kLog2Pi + std::log(v) + diff * diff / v);
  }
  return out;
}

/// l_t(theta) = sum_i log p(y_i | exp(theta)).
inline double loglik_year(const LatentState& state, DistributionKind kind, const YearData& year) {
  if (year.size() == 0) return 0.0;
  const auto par = states_to_params(state, kind);
  const double n = static_cast<double>(year.size());
  const double a = par.a();
  const double log_b = std::log(par.b());
  const double p = par.p();
  const double pq = p + par.q();
  double soft = 0.0;
  for (double ly : year.log_incomes) soft += detail::softplus(a * (ly - log_b));
  return n * (std::log(a) - detail::log_beta_for(par)) - year.sum_log + p * a * (year.sum_log - n * log_b) -
         pq * soft;
}

inline double loglik_year(const LatentState& state, DistributionKind kind, std::span<const double> incomes) {
  if (incomes.empty()) throw DomainError("loglik_year: no incomes");
  return loglik_year(state, kind, YearData(incomes));
}

/// Prior and transition terms of the state-t log target that involve
/// theta_t, with theta_t replaced by `theta`. t is zero-based.
inline double neighbour_terms(std::size_t t, const LatentState& theta, const LatentPath& path,
                              const Eigen::VectorXd& variances) {
  const auto T = static_cast<std::size_t>(path.rows());
  double out = 0.0;
  if (t == 0) {
    out += log_prior_initial(theta);
  } else {
    out += log_transition(theta, path.row(static_cast<Eigen::Index>(t - 1)).transpose(), variances);
  }
  if (t + 1 < T) {
    out += log_transition(path.row(static_cast<Eigen::Index>(t + 1)).transpose(), theta, variances);
  }
  return out;
}

/// log pi_t(theta_t) for the RW model (variances sigma^2) or the RW-HS
/// model (variances tau^2 lambda^2). t is zero-based.
inline double log_target_state(std::size_t t, const LatentPath& path, const Eigen::VectorXd& variances,
                               const std::vector<YearData>& years, DistributionKind kind) {
  if (t >= static_cast<std::size_t>(path.rows())) throw DomainError("log_target_state: t out of range");
  const LatentState theta = path.row(static_cast<Eigen::Index>(t)).transpose();
  return loglik_year(theta, kind, years[t]) + neighbour_terms(t, theta, path, variances);
}

inline double log_target_state(std::size_t t, const LatentPath& path, const Eigen::VectorXd& variances,
                               const Panel& panel, DistributionKind kind) {
  return log_target_state(t, path, variances, prepare_years(panel), kind);
}

/// Year-by-year model: l_t(theta) + log p(theta) with the initial-state prior.
inline double log_target_independent(const LatentState& state, DistributionKind kind, const YearData& year) {
  return loglik_year(state, kind, year) + log_prior_initial(state);
}

inline double log_target_independent(const LatentState& state, DistributionKind kind,
                                     std::span<const double> incomes) {
  return log_target_independent(state, kind, YearData(incomes));
}

/// Joint log-posterior kernel of the latent path given the variances:
/// sum_t l_t + log p(theta_1) + sum_{t>=2} log N(theta_t | theta_{t-1}, Q).
inline double log_joint_states(const LatentPath& path, const Eigen::VectorXd& variances,
                               const std::vector<YearData>& years, DistributionKind kind) {
  double out = log_prior_initial(path.row(0).transpose());
  for (Eigen::Index t = 0; t < path.rows(); ++t) {
    out += loglik_year(path.row(t).transpose(), kind, years[static_cast<std::size_t>(t)]);
    if (t > 0) out += log_transition(path.row(t).transpose(), path.row(t - 1).transpose(), variances);
  }
  return out;
}

}  // namespace incdyn
