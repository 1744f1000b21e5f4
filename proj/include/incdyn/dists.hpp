#pragma once

// The GB2 family of income distributions and its three nested special
// cases (Dagum, Singh-Maddala, Beta 2): densities, cdfs, quantiles, moments,
// moment distribution functions and Lorenz curves.
//
// Every kind is evaluated through its GB2 representation (a, b, p, q) with
// Dagum = GB2(a,b,p,1), Singh-Maddala = GB2(a,b,1,q), Beta2 = GB2(1,b,p,q),
// except where a closed Burr form is available and more accurate.

#include <array>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "incdyn/error.hpp"
#include "incdyn/random.hpp"
#include "incdyn/specfun.hpp"

namespace incdyn {

enum class DistributionKind { GB2, Dagum, SinghMaddala, Beta2 };

inline std::size_t parameter_count(DistributionKind kind) {
  return kind == DistributionKind::GB2 ? 4 : 3;
}

/// CLI spelling: gb2, dagum, sm, beta2.
inline std::string_view to_string(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::GB2: return "gb2";
    case DistributionKind::Dagum: return "dagum";
    case DistributionKind::SinghMaddala: return "sm";
    case DistributionKind::Beta2: return "beta2";
  }
  return "?";
}

inline DistributionKind parse_distribution(std::string_view name) {
  if (name == "gb2") return DistributionKind::GB2;
  if (name == "dagum") return DistributionKind::Dagum;
  if (name == "sm") return DistributionKind::SinghMaddala;
  if (name == "beta2") return DistributionKind::Beta2;
  throw UsageError("unknown distribution '" + std::string(name) + "' (expected dagum, sm, beta2 or gb2)");
}

/// Names of the parameters in storage order.
inline std::vector<std::string> parameter_names(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::GB2: return {"a", "b", "p", "q"};
    case DistributionKind::Dagum: return {"a", "b", "p"};
    case DistributionKind::SinghMaddala: return {"a", "b", "q"};
    case DistributionKind::Beta2: return {"b", "p", "q"};
  }
  return {};
}

/// Index of the scale parameter b in storage order.
inline std::size_t scale_index(DistributionKind kind) {
  return kind == DistributionKind::Beta2 ? 0 : 1;
}

/// Positive parameters of one income distribution.
/// GB2:(a,b,p,q)  Dagum:(a,b,p)  SinghMaddala:(a,b,q)  Beta2:(b,p,q).
class ParameterVector {
 public:
  ParameterVector(DistributionKind kind, std::span<const double> values) : kind_(kind) {
    if (values.size() != parameter_count(kind)) {
      std::ostringstream os;
      os << "ParameterVector: " << to_string(kind) << " needs " << parameter_count(kind)
         << " values, got " << values.size();
      throw DomainError(os.str());
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
        std::ostringstream os;
        os << "ParameterVector: parameter " << parameter_names(kind)[i]
           << " must be positive and finite, got " << values[i];
        throw DomainError(os.str());
      }
      values_[i] = values[i];
    }
  }
  ParameterVector(DistributionKind kind, std::initializer_list<double> values)
      : ParameterVector(kind, std::span<const double>(values.begin(), values.size())) {}

  DistributionKind kind() const { return kind_; }
  std::size_t size() const { return parameter_count(kind_); }
  std::span<const double> values() const { return {values_.data(), size()}; }
  double operator[](std::size_t i) const { return values_[i]; }

  // GB2-equivalent coordinates.
  double a() const { return kind_ == DistributionKind::Beta2 ? 1.0 : values_[0]; }
  double b() const { return values_[scale_index(kind_)]; }
  double p() const {
    switch (kind_) {
      case DistributionKind::GB2: return values_[2];
      case DistributionKind::Dagum: return values_[2];
      case DistributionKind::SinghMaddala: return 1.0;
      case DistributionKind::Beta2: return values_[1];
    }
    return 0.0;
  }
  double q() const {
    switch (kind_) {
      case DistributionKind::GB2: return values_[3];
      case DistributionKind::Dagum: return 1.0;
      case DistributionKind::SinghMaddala: return values_[2];
      case DistributionKind::Beta2: return values_[2];
    }
    return 0.0;
  }

  ParameterVector with_scale(double b) const {
    std::array<double, 4> v = values_;
    v[scale_index(kind_)] = b;
    return ParameterVector(kind_, std::span<const double>(v.data(), size()));
  }

 private:
  DistributionKind kind_;
  std::array<double, 4> values_{};
};

/// Whether E[Y^k] exists, with the margin of the strict inequality that
/// decides it (e.g. a*q - 1 for the GB2 mean). exists <=> margin > 0.
struct MomentExistence {
  bool mean_exists = false;
  double condition_margin = 0.0;
};

struct MeanResult {
  MomentExistence existence;
  std::optional<double> value;
};

namespace detail {

// log(1 + e^s) without overflow.
inline double softplus(double s) {
  return s > 0.0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
}

inline double log_beta_for(const ParameterVector& par) {
  switch (par.kind()) {
    case DistributionKind::Dagum: return -std::log(par.p());         // B(p,1) = 1/p
    case DistributionKind::SinghMaddala: return -std::log(par.q());  // B(1,q) = 1/q
    default: return specfun::log_beta(par.p(), par.q());
  }
}

inline void check_income(const char* fn, double y) {
  if (!(y > 0.0) || std::isnan(y)) {
    throw DomainError(std::string(fn) + ": income must be positive, got " + std::to_string(y));
  }
}

// w(y) = (y/b)^a / (1 + (y/b)^a) as a logistic of s = a log(y/b).
inline double w_of(const ParameterVector& par, double y) {
  const double s = par.a() * (std::log(y) - std::log(par.b()));
  return 1.0 / (1.0 + std::exp(-s));
}

// w(F^{-1}(u)) for each kind: the Beta(p,q) quantile.
inline double w_at_quantile(const ParameterVector& par, double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  switch (par.kind()) {
    case DistributionKind::Dagum: return std::exp(std::log(u) / par.p());
    case DistributionKind::SinghMaddala: return -std::expm1(std::log1p(-u) / par.q());
    default: return specfun::inv_reg_inc_beta(u, par.p(), par.q());
  }
}

}  // namespace detail

/// Margin of the existence condition for E[Y^k]: a*q - k (GB2, SM),
/// a - k (Dagum), q - k (Beta2).
inline MomentExistence moment_existence(const ParameterVector& par, double k = 1.0) {
  const double margin = par.a() * par.q() - k;
  return {margin > 0.0, margin};
}

inline double log_pdf(const ParameterVector& par, double y) {
  detail::check_income("pdf", y);
  if (std::isinf(y)) return -std::numeric_limits<double>::infinity();
  const double log_y = std::log(y);
  const double s = par.a() * (log_y - std::log(par.b()));
  return std::log(par.a()) - log_y + par.p() * s - (par.p() + par.q()) * detail::softplus(s) -
         detail::log_beta_for(par);
}

inline double pdf(const ParameterVector& par, double y) { return std::exp(log_pdf(par, y)); }

inline double cdf(const ParameterVector& par, double y) {
  detail::check_income("cdf", y);
  if (std::isinf(y)) return 1.0;
  const double s = par.a() * (std::log(y) - std::log(par.b()));
  switch (par.kind()) {
    case DistributionKind::Dagum:
      // [1 + (y/b)^{-a}]^{-p}
      return std::exp(-par.p() * detail::softplus(-s));
    case DistributionKind::SinghMaddala:
      // 1 - [1 + (y/b)^a]^{-q}
      return -std::expm1(-par.q() * detail::softplus(s));
    default:
      return specfun::reg_inc_beta(1.0 / (1.0 + std::exp(-s)), par.p(), par.q());
  }
}

inline double quantile(const ParameterVector& par, double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw DomainError("quantile: u must lie in (0,1), got " + std::to_string(u));
  }
  const double a = par.a();
  const double b = par.b();
  switch (par.kind()) {
    case DistributionKind::Dagum:
      // b (u^{-1/p} - 1)^{-1/a}
      return b * std::pow(std::expm1(-std::log(u) / par.p()), -1.0 / a);
    case DistributionKind::SinghMaddala:
      // b [(1-u)^{-1/q} - 1]^{1/a}
      return b * std::pow(std::expm1(-std::log1p(-u) / par.q()), 1.0 / a);
    default: {
      const double x = specfun::inv_reg_inc_beta(u, par.p(), par.q());
      return b * std::pow(x / (1.0 - x), 1.0 / a);
    }
  }
}

/// E[Y^k] when it exists.
inline std::optional<double> moment(const ParameterVector& par, double k) {
  if (k == 0.0) return 1.0;
  if (!moment_existence(par, k).mean_exists) return std::nullopt;
  const double a = par.a();
  const double p = par.p();
  const double q = par.q();
  using specfun::log_gamma;
  return std::pow(par.b(), k) *
         std::exp(log_gamma(p + k / a) + log_gamma(q - k / a) - log_gamma(p) - log_gamma(q));
}

inline MeanResult mean(const ParameterVector& par) {
  return {moment_existence(par, 1.0), moment(par, 1.0)};
}

/// Nonzero mode b((ap-1)/(aq+1))^{1/a}; diagnostic only. nullopt when ap <= 1.
inline std::optional<double> mode(const ParameterVector& par) {
  const double a = par.a();
  if (a * par.p() <= 1.0) return std::nullopt;
  return par.b() * std::pow((a * par.p() - 1.0) / (a * par.q() + 1.0), 1.0 / a);
}

/// k-th moment distribution function F^{(k)}(y) = B_{w(y)}(p + k/a, q - k/a).
inline double moment_cdf(const ParameterVector& par, int k, double y) {
  if (k < 0) throw DomainError("moment_cdf: order k must be nonnegative");
  detail::check_income("moment_cdf", y);
  if (k == 0) return cdf(par, y);
  const auto ex = moment_existence(par, k);
  if (!ex.mean_exists) {
    std::ostringstream os;
    os << "moment_cdf: moment of order " << k << " does not exist for " << to_string(par.kind())
       << " (requires k < a*q; margin " << ex.condition_margin << ")";
    throw DomainError(os.str());
  }
  if (std::isinf(y)) return 1.0;
  const double a = par.a();
  return specfun::reg_inc_beta(detail::w_of(par, y), par.p() + k / a, par.q() - k / a);
}

namespace detail {
inline void require_mean(const char* fn, const ParameterVector& par) {
  const auto ex = moment_existence(par, 1.0);
  if (!ex.mean_exists) {
    std::ostringstream os;
    os << fn << ": mean does not exist for " << to_string(par.kind()) << " (margin "
       << ex.condition_margin << ")";
    throw DomainError(os.str());
  }
}
}  // namespace detail

/// Lorenz curve L(u) = F^{(1)}(F^{-1}(u)), evaluated in w-coordinates so the
/// scale b never enters.
inline double lorenz(const ParameterVector& par, double u) {
  detail::require_mean("lorenz", par);
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("lorenz: u must lie in [0,1]");
  if (u == 0.0) return 0.0;
  if (u == 1.0) return 1.0;
  const double a = par.a();
  const double x = detail::w_at_quantile(par, u);
  return specfun::reg_inc_beta(x, par.p() + 1.0 / a, par.q() - 1.0 / a);
}

inline double gen_lorenz(const ParameterVector& par, double u) {
  const double l = lorenz(par, u);
  return *mean(par).value * l;
}

/// n iid draws by inverse-transform sampling.
inline std::vector<double> sample(const ParameterVector& par, std::size_t n, Rng& rng) {
  if (n == 0) throw DomainError("sample: n must be at least 1");
  std::vector<double> out(n);
  for (auto& y : out) y = quantile(par, uniform_open01(rng));
  return out;
}

}  // namespace incdyn
