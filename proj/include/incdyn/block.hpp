#pragma once

// Whole-path independence proposals for the dynamic models.
//
// Each year's log-likelihood is replaced by a Gaussian in the latent state
// (mode and curvature found once per fit). Combined with the random-walk
// transitions this is a linear Gaussian state-space model, so a path can be
// drawn exactly by forward filtering, backward sampling. The transition
// terms are shared by target and proposal and cancel in the MH ratio.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "incdyn/error.hpp"
#include "incdyn/model.hpp"
#include "incdyn/random.hpp"
#include "incdyn/specfun.hpp"

namespace incdyn {

struct YearApproximation {
  bool usable = false;
  LatentState mode;
  Eigen::MatrixXd precision;  // minus the Hessian of l_t at the mode
};

namespace detail {

inline double safe_loglik(const LatentState& th, DistributionKind kind, const YearData& year) {
  try {
    const double v = loglik_year(th, kind, year);
    return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
  } catch (const Error&) {
    return -std::numeric_limits<double>::infinity();
  }
}

inline bool finite_difference_derivatives(const LatentState& x, DistributionKind kind, const YearData& year,
                                          Eigen::VectorXd& grad, Eigen::MatrixXd& hess) {
  const Eigen::Index d = x.size();
  constexpr double hg = 1e-5;
  constexpr double hh = 1e-3;
  grad.resize(d);
  hess.resize(d, d);
  const double f0 = safe_loglik(x, kind, year);
  if (!std::isfinite(f0)) return false;
  for (Eigen::Index i = 0; i < d; ++i) {
    LatentState xp = x, xm = x;
    xp[i] += hg;
    xm[i] -= hg;
    grad[i] = (safe_loglik(xp, kind, year) - safe_loglik(xm, kind, year)) / (2.0 * hg);
    xp = x;
    xm = x;
    xp[i] += hh;
    xm[i] -= hh;
    hess(i, i) = (safe_loglik(xp, kind, year) - 2.0 * f0 + safe_loglik(xm, kind, year)) / (hh * hh);
    for (Eigen::Index j = 0; j < i; ++j) {
      LatentState pp = x, pm = x, mp = x, mm = x;
      pp[i] += hh, pp[j] += hh;
      pm[i] += hh, pm[j] -= hh;
      mp[i] -= hh, mp[j] += hh;
      mm[i] -= hh, mm[j] -= hh;
      hess(i, j) = (safe_loglik(pp, kind, year) - safe_loglik(pm, kind, year) - safe_loglik(mp, kind, year) +
                    safe_loglik(mm, kind, year)) /
                   (4.0 * hh * hh);
      hess(j, i) = hess(i, j);
    }
  }
  return grad.allFinite() && hess.allFinite();
}

}  // namespace detail

/// Levenberg-damped Newton ascent on l_t from `start`. Returns an unusable
/// approximation when the year is empty or the curvature at the end point
/// is not negative definite.
inline YearApproximation laplace_year(const LatentState& start, DistributionKind kind, const YearData& year) {
  YearApproximation out;
  if (year.size() == 0) return out;
  const Eigen::Index d = start.size();
  LatentState x = start;
  double fx = detail::safe_loglik(x, kind, year);
  if (!std::isfinite(fx)) return out;
  double damping = 1e-3;
  Eigen::VectorXd g;
  Eigen::MatrixXd H;
  for (int iter = 0; iter < 200; ++iter) {
    if (!detail::finite_difference_derivatives(x, kind, year, g, H)) return out;
    const double scale = static_cast<double>(year.size());
    if (g.lpNorm<Eigen::Infinity>() < 1e-7 * scale) break;
    bool improved = false;
    for (int tries = 0; tries < 40 && !improved; ++tries) {
      Eigen::MatrixXd A = -H;
      A.diagonal().array() += damping * (1.0 + A.diagonal().array().abs());
      Eigen::LLT<Eigen::MatrixXd> llt(A);
      if (llt.info() == Eigen::Success) {
        Eigen::VectorXd step = llt.solve(g);
        const double len = step.lpNorm<Eigen::Infinity>();
        if (len > 2.0) step *= 2.0 / len;
        const LatentState y = x + step;
        const double fy = detail::safe_loglik(y, kind, year);
        if (fy >= fx) {
          x = y;
          const bool tiny = fy - fx < 1e-12 * (1.0 + std::fabs(fx));
          fx = fy;
          damping = std::max(1e-9, damping * 0.2);
          improved = true;
          if (tiny && len < 1e-9) iter = 200;
          continue;
        }
      }
      damping *= 10.0;
    }
    if (!improved) break;
  }
  if (!detail::finite_difference_derivatives(x, kind, year, g, H)) return out;
  Eigen::MatrixXd P = -0.5 * (H + H.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(P);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0) return out;
  out.usable = true;
  out.mode = x;
  out.precision = P;
  (void)d;
  return out;
}

/// Gaussian stand-in for the initial-state prior: the density sech(theta)/pi
/// has mean 0 and variance pi^2/4.
inline constexpr double kInitialPriorProxyVariance = specfun::kPi * specfun::kPi / 4.0;

/// log pi(path) - log q(path) up to a constant, for a fixed transition
/// variance vector. `loglik` holds l_t at each row of the path.
inline double block_log_weight(const LatentPath& path, const std::vector<double>& loglik,
                               const std::vector<YearApproximation>& approx) {
  double w = 0.0;
  for (std::size_t t = 0; t < approx.size(); ++t) {
    w += loglik[t];
    if (approx[t].usable) {
      const Eigen::VectorXd r = path.row(static_cast<Eigen::Index>(t)).transpose() - approx[t].mode;
      w += 0.5 * r.dot(approx[t].precision * r);
    }
  }
  const LatentState first = path.row(0).transpose();
  w += log_prior_initial(first) + 0.5 * first.squaredNorm() / kInitialPriorProxyVariance;
  return w;
}

/// Draws a path from the Gaussian state-space approximation by forward
/// filtering, backward sampling.
inline LatentPath sample_block_path(const std::vector<YearApproximation>& approx, const Eigen::VectorXd& variances,
                                    Rng& rng) {
  const auto T = approx.size();
  const Eigen::Index d = variances.size();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd Q = variances.asDiagonal();
  std::vector<Eigen::VectorXd> mean(T);
  std::vector<Eigen::MatrixXd> cov(T);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd P = kInitialPriorProxyVariance * I;
  for (std::size_t t = 0; t < T; ++t) {
    if (t > 0) P += Q;
    if (approx[t].usable) {
      const Eigen::MatrixXd prior_prec = P.llt().solve(I);
      const Eigen::MatrixXd post_prec = prior_prec + approx[t].precision;
      Eigen::LLT<Eigen::MatrixXd> llt(post_prec);
      P = llt.solve(I);
      a = P * (prior_prec * a + approx[t].precision * approx[t].mode);
    }
    P = 0.5 * (P + P.transpose());
    mean[t] = a;
    cov[t] = P;
  }
  auto draw = [&](const Eigen::VectorXd& m, const Eigen::MatrixXd& C) {
    Eigen::LLT<Eigen::MatrixXd> llt(C);
    if (llt.info() != Eigen::Success) throw NumericError("block proposal covariance is not positive definite", 0.0);
    Eigen::VectorXd z(d);
    for (Eigen::Index k = 0; k < d; ++k) z[k] = std_normal(rng);
    return Eigen::VectorXd(m + llt.matrixL() * z);
  };
  LatentPath path(static_cast<Eigen::Index>(T), d);
  Eigen::VectorXd next = draw(mean[T - 1], cov[T - 1]);
  path.row(static_cast<Eigen::Index>(T - 1)) = next.transpose();
  for (std::size_t s = T - 1; s-- > 0;) {
    // Information form; stays well conditioned when Q is tiny.
    const Eigen::MatrixXd filt_prec = cov[s].llt().solve(I);
    const Eigen::VectorXd q_inv = variances.cwiseInverse();
    Eigen::MatrixXd prec = filt_prec;
    prec.diagonal() += q_inv;
    Eigen::LLT<Eigen::MatrixXd> llt(prec);
    if (llt.info() != Eigen::Success) throw NumericError("block proposal precision is not positive definite", 0.0);
    const Eigen::VectorXd m = llt.solve(filt_prec * mean[s] + q_inv.cwiseProduct(next));
    Eigen::VectorXd z(d);
    for (Eigen::Index k = 0; k < d; ++k) z[k] = std_normal(rng);
    // prec = L L^T, so L^{-T} z has covariance prec^{-1}.
    next = m + llt.matrixU().solve(z);
    path.row(static_cast<Eigen::Index>(s)) = next.transpose();
  }
  return path;
}

}  // namespace incdyn
