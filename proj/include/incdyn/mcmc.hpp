#pragma once

// Metropolis-within-Gibbs samplers for the independent, RW and RW-HS
// income models.
//
// Each iteration sweeps the latent states t = 1..T with Gaussian random-walk
// Metropolis proposals N(theta_t, kappa_t Sigma_t), then refreshes the
// innovation variances (RW: independence MH with an inverse-gamma proposal;
// RW-HS: Gibbs draws of the horseshoe block). kappa_t follows a
// Robbins-Monro recursion on log kappa and Sigma_t is re-estimated from the
// chain; both adapt during burn-in only and are frozen for kept draws.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "incdyn/block.hpp"
#include "incdyn/dists.hpp"
#include "incdyn/error.hpp"
#include "incdyn/model.hpp"
#include "incdyn/random.hpp"

namespace incdyn {

struct FitConfig {
  std::size_t iterations = 10000;
  std::size_t burn_in = 5000;
  double target_acceptance = 0.2;
  std::uint64_t seed = 1;
  double initial_step = 1.0;       // kappa_0
  std::size_t adapt_window = 100;  // draws between Sigma_t refreshes
  // Leading fraction of burn-in during which the variance / shrinkage blocks
  // stay at their initial values while the states settle.
  double warmup_fraction = 0.2;
  // Whole-path translation move after each state sweep (dynamic models).
  bool path_shift_moves = true;
  // Whole-path independence proposal from a Gaussian state-space
  // approximation (dynamic models).
  bool block_moves = true;
  // Dynamic models: shape each year's proposal as the inverse of likelihood
  // curvature plus the current transition precision, instead of the burn-in
  // history covariance, so that kappa keeps its meaning as variances move.
  bool conditional_proposals = true;

  void validate() const {
    if (iterations == 0) throw UsageError("iterations must be positive");
    if (burn_in >= iterations) throw UsageError("burn-in must be smaller than the number of iterations");
    if (!(target_acceptance > 0.0 && target_acceptance < 1.0)) {
      throw UsageError("target acceptance must lie in (0,1)");
    }
    if (!(initial_step > 0.0)) throw UsageError("initial step must be positive");
    if (adapt_window == 0) throw UsageError("adapt window must be positive");
    if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) throw UsageError("warm-up fraction must lie in [0,1)");
  }
};

inline constexpr double kInitialProposalVariance = 0.01;
inline constexpr double kCovarianceJitter = 1e-6;

/// Random-walk proposal N(theta, kappa * Sigma) for one time point.
class ProposalState {
 public:
  ProposalState() = default;
  ProposalState(double kappa, const Eigen::MatrixXd& covariance) : kappa_(kappa) { set_covariance(covariance); }

  static ProposalState initial(Eigen::Index d, double kappa) {
    return ProposalState(kappa, kInitialProposalVariance * Eigen::MatrixXd::Identity(d, d));
  }

  double kappa() const { return kappa_; }
  void set_kappa(double kappa) {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("proposal scale must be positive");
    kappa_ = kappa;
  }
  const Eigen::MatrixXd& covariance() const { return cov_; }

  void set_covariance(const Eigen::MatrixXd& cov) {
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) throw DomainError("proposal covariance is not positive definite");
    cov_ = cov;
    chol_ = llt.matrixL();
  }

  LatentState propose(const LatentState& theta, Rng& rng) const {
    Eigen::VectorXd z(theta.size());
    for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = std_normal(rng);
    return theta + std::sqrt(kappa_) * (chol_ * z);
  }

 private:
  double kappa_ = 1.0;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd chol_;
};

struct MetropolisDecision {
  bool accepted = false;
  double alpha = 0.0;
};

/// Accept/reject for a symmetric proposal. A non-finite proposed log
/// target gives alpha = 0.
inline MetropolisDecision metropolis_decision(double log_target_current, double log_target_proposed, Rng& rng) {
  if (std::isnan(log_target_proposed) || log_target_proposed == -std::numeric_limits<double>::infinity()) {
    return {false, 0.0};
  }
  const double log_ratio = log_target_proposed - log_target_current;
  const double alpha = log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
  if (alpha >= 1.0) return {true, 1.0};
  return {uniform_open01(rng) < alpha, alpha};
}

struct StateUpdate {
  LatentState state;
  bool accepted = false;
  double alpha = 0.0;
};

/// Single random-walk Metropolis step on an arbitrary log target. Numeric
/// failures while evaluating the proposal count as rejections.
template <typename LogTarget>
StateUpdate rw_metropolis_step(const LatentState& theta, double log_target_current, LogTarget&& log_target,
                               const ProposalState& proposal, Rng& rng, double* log_target_out = nullptr,
                               std::size_t* failures = nullptr) {
  LatentState candidate = proposal.propose(theta, rng);
  double proposed = -std::numeric_limits<double>::infinity();
  try {
    proposed = log_target(candidate);
  } catch (const Error&) {
    if (failures) ++*failures;
  }
  const auto decision = metropolis_decision(log_target_current, proposed, rng);
  if (decision.accepted) {
    if (log_target_out) *log_target_out = proposed;
    return {std::move(candidate), true, decision.alpha};
  }
  if (log_target_out) *log_target_out = log_target_current;
  return {theta, false, decision.alpha};
}

/// State update A for time point t (zero-based) of the RW / RW-HS models.
inline StateUpdate mh_update_state(std::size_t t, const LatentPath& path, const Eigen::VectorXd& variances,
                                   const std::vector<YearData>& years, DistributionKind kind,
                                   const ProposalState& proposal, Rng& rng) {
  const LatentState theta = path.row(static_cast<Eigen::Index>(t)).transpose();
  auto target = [&](const LatentState& th) {
    return loglik_year(th, kind, years[t]) + neighbour_terms(t, th, path, variances);
  };
  return rw_metropolis_step(theta, target(theta), target, proposal, rng);
}

/// Robbins-Monro update of log kappa toward the target acceptance rate,
/// steplength constant 1 / (target (1 - target)).
inline double adapt_scale(double kappa, bool accepted, std::size_t iteration, double target) {
  if (!(kappa > 0.0)) throw DomainError("adapt_scale: kappa must be positive");
  const double c = 1.0 / (target * (1.0 - target));
  const double innovation = (accepted ? 1.0 : 0.0) - target;
  const double step = c * innovation / static_cast<double>(std::max<std::size_t>(iteration, 1));
  return std::exp(std::log(kappa) + step);
}

inline double sigma2_proposal_shape(std::size_t T) { return (static_cast<double>(T) - 2.0) / 2.0; }
inline double horseshoe_local_shape(std::size_t T) { return static_cast<double>(T) / 2.0; }
inline double horseshoe_global_shape(std::size_t T, std::size_t d) {
  return (static_cast<double>((T - 1) * d) + 1.0) / 2.0;
}

/// S_k = sum_{t>=2} (theta_{k,t} - theta_{k,t-1})^2.
inline Eigen::VectorXd increment_sums(const LatentPath& path) {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(path.cols());
  for (Eigen::Index t = 1; t < path.rows(); ++t) s += (path.row(t) - path.row(t - 1)).transpose().cwiseAbs2();
  return s;
}

/// Acceptance probability of the sigma_k^2 independence proposal.
inline double sigma2_acceptance(double current, double proposed) {
  return std::min(1.0, (1.0 + current) / (1.0 + proposed));
}

/// Update B: sigma_k^2* ~ IG((T-2)/2, S_k/2), accepted with probability
/// min{1, (1 + sigma_k^2) / (1 + sigma_k^2*)}. Targets
/// IG(sigma^2 | (T-2)/2, S_k/2) / (1 + sigma^2). A degenerate proposal
/// (S_k = 0) is rejected.
inline InnovationScales update_sigma2(const LatentPath& path, const InnovationScales& current, Rng& rng) {
  const auto T = static_cast<std::size_t>(path.rows());
  if (T < 3) {
    throw UsageError("the RW model needs at least 3 years; use --model rw-hs or --model ind for shorter panels");
  }
  const double shape = sigma2_proposal_shape(T);
  const Eigen::VectorXd S = increment_sums(path);
  InnovationScales next = current;
  for (Eigen::Index k = 0; k < S.size(); ++k) {
    const double rate = 0.5 * S[k];
    const double proposal = rate > 0.0 ? inv_gamma(shape, rate, rng) : 0.0;
    const double u = uniform_open01(rng);
    if (!(proposal > 0.0) || !std::isfinite(proposal)) continue;
    if (u < sigma2_acceptance(current.sigma2[k], proposal)) next.sigma2[k] = proposal;
  }
  return next;
}

/// Updates C-D: Gibbs draws of lambda_k^2, nu_k, then tau^2, xi.
inline HorseshoeState update_horseshoe(const LatentPath& path, const HorseshoeState& hs, Rng& rng) {
  const auto T = static_cast<std::size_t>(path.rows());
  const auto d = static_cast<std::size_t>(path.cols());
  if (T < 2) throw UsageError("the RW-HS model needs at least 2 years");
  const Eigen::VectorXd S = increment_sums(path);
  HorseshoeState next = hs;
  const double local_shape = horseshoe_local_shape(T);
  for (Eigen::Index k = 0; k < S.size(); ++k) {
    next.lambda2[k] = inv_gamma(local_shape, 1.0 / hs.nu[k] + S[k] / (2.0 * hs.tau2), rng);
    next.nu[k] = inv_gamma(1.0, 1.0 + 1.0 / next.lambda2[k], rng);
  }
  double rate = 1.0 / hs.xi;
  for (Eigen::Index k = 0; k < S.size(); ++k) rate += S[k] / (2.0 * next.lambda2[k]);
  next.tau2 = inv_gamma(horseshoe_global_shape(T, d), rate, rng);
  next.xi = inv_gamma(1.0, 1.0 + 1.0 / next.tau2, rng);
  return next;
}

/// Kept output of one fit.
struct DrawSet {
  ModelTag model = ModelTag::independent;
  DistributionKind kind = DistributionKind::Dagum;
  std::vector<std::string> years;
  FitConfig config;
  std::vector<LatentPath> paths;
  std::vector<InnovationScales> sigma2;  // RW only
  std::vector<HorseshoeState> horseshoe;  // RW-HS only
  std::vector<double> acceptance;         // per t, over kept iterations
  std::vector<double> burn_in_acceptance;  // per t, over burn-in iterations
  std::vector<double> final_kappa;         // per t
  std::optional<double> shift_acceptance;   // whole-path translation move
  std::optional<double> block_acceptance;   // whole-path independence move
  std::size_t numeric_failures = 0;

  std::size_t num_draws() const { return paths.size(); }
  std::size_t num_years() const { return years.size(); }
  std::size_t dim() const { return parameter_count(kind); }

  /// Innovation variances of draw m (RW: sigma^2, RW-HS: tau^2 lambda^2).
  Eigen::VectorXd variances(std::size_t m) const {
    if (model == ModelTag::rw) return sigma2.at(m).sigma2;
    if (model == ModelTag::rw_hs) return horseshoe.at(m).variances();
    throw UsageError("the independent model has no transition variances");
  }

  ParameterVector params(std::size_t m, std::size_t t) const {
    return states_to_params(paths.at(m).row(static_cast<Eigen::Index>(t)).transpose(), kind);
  }
};

/// Log target of a whole-path translation theta_t -> theta_t + delta for all
/// t. Transition densities depend only on increments, so only the year
/// log-likelihoods and the initial-state prior change.
inline double log_target_path_shift(const LatentPath& path, const std::vector<YearData>& years,
                                    DistributionKind kind, const LatentState& delta,
                                    std::vector<double>& loglik_out) {
  double total = log_prior_initial(path.row(0).transpose() + delta);
  for (std::size_t t = 0; t < years.size(); ++t) {
    loglik_out[t] = loglik_year(path.row(static_cast<Eigen::Index>(t)).transpose() + delta, kind, years[t]);
    total += loglik_out[t];
  }
  return total;
}

inline double log_target_path_shift(const LatentPath& path, const std::vector<double>& loglik) {
  double total = log_prior_initial(path.row(0).transpose());
  for (double l : loglik) total += l;
  return total;
}

namespace detail {

inline void check_model_horizon(ModelTag model, std::size_t T) {
  if (model == ModelTag::rw && T < 3) {
    throw UsageError("the RW model needs at least 3 years; use --model rw-hs or --model ind for shorter panels");
  }
  if (model == ModelTag::rw_hs && T < 2) {
    throw UsageError("the RW-HS model needs at least 2 years; use --model ind for a single year");
  }
}

inline double median_of(std::vector<double> v) {
  if (v.empty()) return 1.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  double m = *mid;
  if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), mid));
  return m;
}

// Sample covariance of rows [first, last) of a draw history.
inline Eigen::MatrixXd window_covariance(const std::vector<LatentState>& draws, std::size_t first,
                                         std::size_t last) {
  const auto d = draws.front().size();
  const double n = static_cast<double>(last - first);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (std::size_t i = first; i < last; ++i) mean += draws[i];
  mean /= n;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t i = first; i < last; ++i) {
    const Eigen::VectorXd c = draws[i] - mean;
    cov.noalias() += c * c.transpose();
  }
  return cov / (n - 1.0);
}

}  // namespace detail

/// Starting path: zeros except the scale coordinate, which starts at the
/// log median income of its year.
inline LatentPath initial_path(const Panel& panel, DistributionKind kind) {
  const auto T = static_cast<Eigen::Index>(panel.num_years());
  const auto d = static_cast<Eigen::Index>(parameter_count(kind));
  LatentPath path = LatentPath::Zero(T, d);
  const auto s = static_cast<Eigen::Index>(scale_index(kind));
  for (Eigen::Index t = 0; t < T; ++t) {
    const auto& y = panel.incomes[static_cast<std::size_t>(t)];
    path(t, s) = y.empty() ? 0.0 : std::log(detail::median_of(y));
  }
  // Years without data borrow the nearest earlier observed level.
  for (Eigen::Index t = 1; t < T; ++t) {
    if (panel.incomes[static_cast<std::size_t>(t)].empty()) path(t, s) = path(t - 1, s);
  }
  return path;
}

inline constexpr double kInitialInnovationVariance = 0.1;

/// Runs the Metropolis-within-Gibbs sampler and keeps the post-burn-in draws.
/// Years may be empty only when the panel was built for cross-validation.
inline DrawSet fit(const Panel& panel, DistributionKind kind, ModelTag model, const FitConfig& config,
                   bool allow_empty_years = false) {
  config.validate();
  panel.validate(allow_empty_years);
  const std::size_t T = panel.num_years();
  const std::size_t d = parameter_count(kind);
  detail::check_model_horizon(model, T);

  Rng rng(config.seed);
  const auto years = prepare_years(panel);
  LatentPath path = initial_path(panel, kind);

  InnovationScales scales{Eigen::VectorXd::Constant(static_cast<Eigen::Index>(d), kInitialInnovationVariance)};
  HorseshoeState hs;
  hs.tau2 = kInitialInnovationVariance;
  hs.lambda2 = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(d));
  hs.xi = 1.0;
  hs.nu = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(d));

  std::vector<ProposalState> proposals(T, ProposalState::initial(static_cast<Eigen::Index>(d), config.initial_step));
  std::vector<double> loglik(T);
  for (std::size_t t = 0; t < T; ++t) loglik[t] = loglik_year(path.row(static_cast<Eigen::Index>(t)).transpose(), kind, years[t]);

  // Burn-in history of each theta_t for proposal covariance estimation.
  std::vector<std::vector<LatentState>> history(T);
  for (auto& h : history) h.reserve(config.burn_in);

  DrawSet out;
  out.model = model;
  out.kind = kind;
  out.years = panel.years;
  out.config = config;
  const std::size_t kept = config.iterations - config.burn_in;
  out.paths.reserve(kept);
  std::vector<std::size_t> accepted_kept(T, 0), accepted_burn(T, 0);
  const auto warmup = static_cast<std::size_t>(config.warmup_fraction * static_cast<double>(config.burn_in));
  ProposalState shift_proposal = ProposalState::initial(static_cast<Eigen::Index>(d), config.initial_step);
  std::vector<LatentState> path_means;
  std::size_t shift_accepted_kept = 0, shift_accepted_burn = 0;

  std::vector<YearApproximation> approx;
  const bool use_block = config.block_moves && model != ModelTag::independent;
  const bool use_conditional = config.conditional_proposals && model != ModelTag::independent;
  if (use_block || use_conditional) {
    approx.reserve(T);
    for (std::size_t t = 0; t < T; ++t) {
      approx.push_back(laplace_year(path.row(static_cast<Eigen::Index>(t)).transpose(), kind, years[t]));
    }
  }
  std::size_t block_accepted_kept = 0, block_accepted_burn = 0;

  // The restarted Robbins-Monro step is large enough for kappa to chase the
  // current innovation variances, so the value frozen for sampling is the
  // geometric mean over the second half of burn-in instead of the last iterate.
  const std::size_t average_from = config.burn_in / 2;
  std::vector<double> log_kappa_sum(T, 0.0);
  double shift_log_kappa_sum = 0.0;

  for (std::size_t m = 1; m <= config.iterations; ++m) {
    const bool adapting = m <= config.burn_in;
    // The Robbins-Monro clock restarts (at one window) after every
    // covariance refresh so that kappa can follow the new proposal shape.
    const std::size_t adapt_clock = std::min(m, config.adapt_window + (m - 1) % config.adapt_window + 1);
    Eigen::VectorXd variances;
    if (model == ModelTag::rw) variances = scales.sigma2;
    if (model == ModelTag::rw_hs) variances = hs.variances();

    for (std::size_t t = 0; t < T; ++t) {
      const auto row = static_cast<Eigen::Index>(t);
      const LatentState theta = path.row(row).transpose();
      const bool conditional_shape = use_conditional && (approx[t].usable || years[t].size() == 0);
      if (conditional_shape) {
        const double neighbours = static_cast<double>((t > 0) + (t + 1 < T));
        const auto di = static_cast<Eigen::Index>(d);
        Eigen::MatrixXd precision = approx[t].usable ? approx[t].precision : Eigen::MatrixXd::Zero(di, di);
        precision.diagonal() += neighbours * variances.cwiseInverse();
        proposals[t].set_covariance(precision.inverse());
      }
      double new_loglik = loglik[t];
      auto target = [&](const LatentState& th) {
        new_loglik = loglik_year(th, kind, years[t]);
        if (model == ModelTag::independent) return new_loglik + log_prior_initial(th);
        return new_loglik + neighbour_terms(t, th, path, variances);
      };
      const double current = model == ModelTag::independent
                                 ? loglik[t] + log_prior_initial(theta)
                                 : loglik[t] + neighbour_terms(t, theta, path, variances);
      const auto step = rw_metropolis_step(theta, current, target, proposals[t], rng, nullptr, &out.numeric_failures);
      if (step.accepted) {
        path.row(row) = step.state.transpose();
        loglik[t] = new_loglik;
      }
      if (adapting) {
        accepted_burn[t] += step.accepted;
        proposals[t].set_kappa(adapt_scale(proposals[t].kappa(), step.accepted, adapt_clock, config.target_acceptance));
        if (m > average_from) log_kappa_sum[t] += std::log(proposals[t].kappa());
        history[t].push_back(path.row(row).transpose());
        if (!conditional_shape && m % config.adapt_window == 0) {
          // Covariance of the most recent half of the burn-in history.
          const std::size_t last = history[t].size();
          const std::size_t first = last / 2;
          if (last - first > d + 1) {
            Eigen::MatrixXd cov = detail::window_covariance(history[t], first, last);
            cov += kCovarianceJitter * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
            proposals[t].set_covariance(cov);
          }
        }
      } else {
        accepted_kept[t] += step.accepted;
      }
    }

    if (config.path_shift_moves && model != ModelTag::independent) {
      const double current = log_target_path_shift(path, loglik);
      std::vector<double> shifted_loglik(T);
      auto target = [&](const LatentState& delta) {
        return log_target_path_shift(path, years, kind, delta, shifted_loglik);
      };
      const LatentState zero = LatentState::Zero(static_cast<Eigen::Index>(d));
      const auto step = rw_metropolis_step(zero, current, target, shift_proposal, rng, nullptr, &out.numeric_failures);
      if (step.accepted) {
        path.rowwise() += step.state.transpose();
        loglik = shifted_loglik;
      }
      if (adapting) {
        shift_accepted_burn += step.accepted;
        shift_proposal.set_kappa(adapt_scale(shift_proposal.kappa(), step.accepted, adapt_clock, config.target_acceptance));
        if (m > average_from) shift_log_kappa_sum += std::log(shift_proposal.kappa());
        path_means.push_back(path.colwise().mean().transpose());
        if (m % config.adapt_window == 0) {
          const std::size_t last = path_means.size();
          const std::size_t first = last / 2;
          if (last - first > d + 1) {
            Eigen::MatrixXd cov = detail::window_covariance(path_means, first, last);
            cov += kCovarianceJitter * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
            shift_proposal.set_covariance(cov);
          }
        }
      } else {
        shift_accepted_kept += step.accepted;
      }
    }

    if (use_block) {
      try {
        const LatentPath candidate = sample_block_path(approx, variances, rng);
        std::vector<double> cand_loglik(T);
        for (std::size_t t = 0; t < T; ++t) {
          cand_loglik[t] = loglik_year(candidate.row(static_cast<Eigen::Index>(t)).transpose(), kind, years[t]);
        }
        const double proposed = block_log_weight(candidate, cand_loglik, approx);
        const double current = block_log_weight(path, loglik, approx);
        const auto decision = metropolis_decision(current, proposed, rng);
        if (decision.accepted) {
          path = candidate;
          loglik = std::move(cand_loglik);
        }
        (adapting ? block_accepted_burn : block_accepted_kept) += decision.accepted;
      } catch (const Error&) {
        ++out.numeric_failures;
      }
    }

    if (m == config.burn_in) {
      const auto n = static_cast<double>(config.burn_in - average_from);
      for (std::size_t t = 0; t < T; ++t) proposals[t].set_kappa(std::exp(log_kappa_sum[t] / n));
      if (config.path_shift_moves && model != ModelTag::independent) {
        shift_proposal.set_kappa(std::exp(shift_log_kappa_sum / n));
      }
    }

    if (m > warmup) {
      if (model == ModelTag::rw) scales = update_sigma2(path, scales, rng);
      if (model == ModelTag::rw_hs) hs = update_horseshoe(path, hs, rng);
    }

    if (!adapting) {
      out.paths.push_back(path);
      if (model == ModelTag::rw) out.sigma2.push_back(scales);
      if (model == ModelTag::rw_hs) out.horseshoe.push_back(hs);
    }
  }

  out.acceptance.resize(T);
  out.burn_in_acceptance.resize(T);
  out.final_kappa.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    out.acceptance[t] = static_cast<double>(accepted_kept[t]) / static_cast<double>(kept);
    out.burn_in_acceptance[t] =
        config.burn_in ? static_cast<double>(accepted_burn[t]) / static_cast<double>(config.burn_in) : 0.0;
    out.final_kappa[t] = proposals[t].kappa();
  }
  if (config.path_shift_moves && model != ModelTag::independent) {
    out.shift_acceptance = static_cast<double>(shift_accepted_kept) / static_cast<double>(kept);
  }
  if (use_block) out.block_acceptance = static_cast<double>(block_accepted_kept) / static_cast<double>(kept);
  (void)block_accepted_burn;
  return out;
}

/// Effective sample size by Geyer's initial monotone sequence estimator on
/// the autocorrelations of a scalar chain.
inline double effective_sample_size(const std::vector<double>& chain) {
  const std::size_t n = chain.size();
  if (n < 4) return static_cast<double>(n);
  double mean = 0.0;
  for (double v : chain) mean += v;
  mean /= static_cast<double>(n);
  auto autocov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += (chain[i] - mean) * (chain[i + lag] - mean);
    return s / static_cast<double>(n);
  };
  const double c0 = autocov(0);
  if (!(c0 > 0.0)) return static_cast<double>(n);
  double sum = 0.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  const std::size_t max_lag = std::min<std::size_t>(n, 4000);  // bounds the cost on very sticky chains
  for (std::size_t k = 0; 2 * k + 1 < max_lag; ++k) {
    double pair = (autocov(2 * k) + autocov(2 * k + 1)) / c0;
    if (pair <= 0.0) break;
    pair = std::min(pair, prev_pair);
    sum += pair;
    prev_pair = pair;
  }
  const double tau = std::max(2.0 * sum - 1.0, 1e-12);
  return std::min(static_cast<double>(n), static_cast<double>(n) / tau);
}

/// ESS of each latent coordinate (rows = years, columns = parameters).
inline Eigen::MatrixXd state_ess(const DrawSet& draws) {
  const auto T = static_cast<Eigen::Index>(draws.num_years());
  const auto d = static_cast<Eigen::Index>(draws.dim());
  Eigen::MatrixXd out(T, d);
  std::vector<double> chain(draws.num_draws());
  for (Eigen::Index t = 0; t < T; ++t) {
    for (Eigen::Index k = 0; k < d; ++k) {
      for (std::size_t m = 0; m < chain.size(); ++m) chain[m] = draws.paths[m](t, k);
      out(t, k) = effective_sample_size(chain);
    }
  }
  return out;
}

}  // namespace incdyn
