#pragma once

// Special functions and adaptive quadrature used by every distribution
// formula: log-gamma, the regularised incomplete beta function and its
// inverse, and a Gauss-Kronrod integrator.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "incdyn/error.hpp"

namespace incdyn::specfun {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// ln Gamma(x) for x > 0.
inline double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("log_gamma: argument must be positive and finite, got " + std::to_string(x));
  }
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);  // reentrant: does not touch signgam
#else
  return std::lgamma(x);
#endif
}

inline double log_beta(double p, double q) {
  return log_gamma(p) + log_gamma(q) - log_gamma(p + q);
}

namespace detail {

inline void check_shapes(const char* fn, double p, double q) {
  if (!(p > 0.0) || !(q > 0.0) || !std::isfinite(p) || !std::isfinite(q)) {
    std::ostringstream os;
    os << fn << ": shape parameters must be positive and finite (p=" << p << ", q=" << q << ")";
    throw DomainError(os.str());
  }
}

// Modified Lentz evaluation of the incomplete-beta continued fraction.
inline double beta_continued_fraction(double x, double p, double q) {
  constexpr int kMaxIter = 20000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = p + q;
  const double qap = p + 1.0;
  const double qam = p - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (q - m) * x / ((qam + m2) * (p + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(p + m) * (qab + m) * x / ((p + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw NumericError("reg_inc_beta: continued fraction did not converge", h);
}

}  // namespace detail

/// Regularised incomplete beta function B_x(p, q), i.e. the Beta(p, q) cdf.
inline double reg_inc_beta(double x, double p, double q) {
  detail::check_shapes("reg_inc_beta", p, q);
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("reg_inc_beta: x must lie in [0,1], got " + std::to_string(x));
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = p * std::log(x) + q * std::log1p(-x) - log_beta(p, q);
  const double front = std::exp(log_front);
  if (x < (p + 1.0) / (p + q + 2.0)) {
    return std::clamp(front * detail::beta_continued_fraction(x, p, q) / p, 0.0, 1.0);
  }
  return std::clamp(1.0 - front * detail::beta_continued_fraction(1.0 - x, q, p) / q, 0.0, 1.0);
}

/// Beta(p, q) density, evaluated in log space.
inline double beta_pdf(double x, double p, double q) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return std::exp((p - 1.0) * std::log(x) + (q - 1.0) * std::log1p(-x) - log_beta(p, q));
}

/// Inverse of reg_inc_beta in x. Halley-corrected Newton with a bracketing
/// safeguard; iteration cap 200, tolerance 1e-12.
inline double inv_reg_inc_beta(double u, double p, double q) {
  detail::check_shapes("inv_reg_inc_beta", p, q);
  if (!(u >= 0.0 && u <= 1.0)) {
    throw DomainError("inv_reg_inc_beta: u must lie in [0,1], got " + std::to_string(u));
  }
  if (u == 0.0) return 0.0;
  if (u == 1.0) return 1.0;
  // Work in the lower tail, where x carries full relative precision.
  if (u > 0.5) return 1.0 - inv_reg_inc_beta(1.0 - u, q, p);

  // Starting value (Abramowitz & Stegun 26.5.22 / power-law tails).
  double x;
  if (p >= 1.0 && q >= 1.0) {
    const double pp = (u < 0.5) ? u : 1.0 - u;
    const double t = std::sqrt(-2.0 * std::log(pp));
    double z = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
    if (u < 0.5) z = -z;
    const double al = (z * z - 3.0) / 6.0;
    const double h = 2.0 / (1.0 / (2.0 * p - 1.0) + 1.0 / (2.0 * q - 1.0));
    const double w = z * std::sqrt(al + h) / h -
                     (1.0 / (2.0 * q - 1.0) - 1.0 / (2.0 * p - 1.0)) * (al + 5.0 / 6.0 - 2.0 / (3.0 * h));
    x = p / (p + q * std::exp(2.0 * w));
  } else {
    const double lna = std::log(p / (p + q));
    const double lnb = std::log(q / (p + q));
    const double t = std::exp(p * lna) / p;
    const double v = std::exp(q * lnb) / q;
    const double w = t + v;
    x = (u < t / w) ? std::pow(p * w * u, 1.0 / p) : 1.0 - std::pow(q * w * (1.0 - u), 1.0 / q);
  }
  if (!(x > 0.0 && x < 1.0) || !std::isfinite(x)) x = 0.5;

  const double lbeta = log_beta(p, q);
  double lo = 0.0;
  double hi = 1.0;
  constexpr int kMaxIter = 200;
  constexpr double kTol = 1e-12;
  for (int it = 0; it < kMaxIter; ++it) {
    const double err = reg_inc_beta(x, p, q) - u;
    if (err == 0.0) return x;
    if (err < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double log_dens = (p - 1.0) * std::log(x) + (q - 1.0) * std::log1p(-x) - lbeta;
    double next;
    const double dens = std::exp(log_dens);
    if (dens > 0.0 && std::isfinite(dens)) {
      double step = err / dens;
      const double curvature = step * ((p - 1.0) / x - (q - 1.0) / (1.0 - x));
      step /= (1.0 - 0.5 * std::min(1.0, curvature));
      next = x - step;
    } else {
      next = 0.5 * (lo + hi);
    }
    if (!(next > lo && next < hi)) {
      next = (next <= lo) ? 0.5 * (x + lo) : 0.5 * (x + hi);
    }
    if (std::fabs(next - x) <= kTol * std::max(x, 1e-300) || hi - lo <= kTol * std::max(lo, 1e-300)) {
      return next;
    }
    x = next;
  }
  throw NumericError("inv_reg_inc_beta: no convergence within 200 iterations", x);
}

/// Controls for the adaptive integrator.
struct QuadratureSpec {
  double absolute_tolerance = 1e-10;
  double relative_tolerance = 1e-10;
  int max_subdivisions = 500;

  void validate() const {
    if (!(absolute_tolerance > 0.0) || !(relative_tolerance > 0.0)) {
      throw DomainError("QuadratureSpec: tolerances must be positive");
    }
    if (max_subdivisions < 1) throw DomainError("QuadratureSpec: max_subdivisions must be >= 1");
  }
};

namespace detail {

// 15-point Kronrod rule with embedded 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <typename F>
Segment gauss_kronrod(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double fsum = f(center - dx) + f(center + dx);
    resk += kWgk[j] * fsum;
    if (j % 2 == 1) resg += kWg[j / 2] * fsum;
  }
  return {a, b, resk * half, std::fabs((resk - resg) * half)};
}

}  // namespace detail

/// Adaptive Gauss-Kronrod quadrature of f over [a, b]. The rule never
/// evaluates f at an endpoint, so integrable endpoint singularities are
/// tolerated. Throws NumericError (with the best estimate) when the
/// tolerance is not met within spec.max_subdivisions bisections.
template <typename F>
double integrate(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
  spec.validate();
  if (!(a <= b)) throw DomainError("integrate: require a <= b");
  if (a == b) return 0.0;

  std::priority_queue<detail::Segment> heap;
  auto first = detail::gauss_kronrod(f, a, b);
  double total = first.value;
  double total_err = first.error;
  heap.push(first);
  for (int n = 0;; ++n) {
    if (!std::isfinite(total)) {
      throw NumericError("integrate: non-finite integrand", total);
    }
    if (total_err <= std::max(spec.absolute_tolerance, spec.relative_tolerance * std::fabs(total))) {
      return total;
    }
    if (n >= spec.max_subdivisions) break;
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Interval can no longer be split in floating point; accept what we have.
      heap.push({worst.a, worst.b, worst.value, 0.0});
      total_err -= worst.error;
      continue;
    }
    const auto left = detail::gauss_kronrod(f, worst.a, mid);
    const auto right = detail::gauss_kronrod(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  std::ostringstream os;
  os << "integrate: tolerance not met after " << spec.max_subdivisions
     << " subdivisions (estimate " << total << ", error " << total_err << ")";
  throw NumericError(os.str(), total);
}

/// Integral of f over [a, inf) through the map x = a + t / (1 - t).
template <typename F>
double integrate_to_infinity(F&& f, double a, const QuadratureSpec& spec = {}) {
  auto g = [&](double t) {
    const double s = 1.0 - t;
    const double x = a + t / s;
    if (!std::isfinite(x)) return 0.0;
    return f(x) / (s * s);
  };
  return integrate(g, 0.0, 1.0, spec);
}

}  // namespace incdyn::specfun
