#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <vector>

#include "incdyn/dists.hpp"

using namespace incdyn;
using K = DistributionKind;

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) y[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1));
  return y;
}

// Direct GB2 density from its definition, written independently of the
// library's log-space form.
double gb2_pdf_reference(double a, double b, double p, double q, double y) {
  const double z = std::pow(y / b, a);
  return a * std::pow(y, a * p - 1) / (std::pow(b, a * p) * std::beta(p, q) * std::pow(1 + z, p + q));
}

}  // namespace

TEST(Parameters, Validation) {
  EXPECT_THROW(ParameterVector(K::Dagum, {1.0, 2.0}), DomainError);
  EXPECT_THROW(ParameterVector(K::Dagum, {1.0, -2.0, 1.0}), DomainError);
  EXPECT_THROW(ParameterVector(K::GB2, {1.0, 2.0, 1.0, NAN}), DomainError);
  const ParameterVector b2(K::Beta2, {7.0, 2.0, 3.0});
  EXPECT_EQ(b2.a(), 1.0);
  EXPECT_EQ(b2.b(), 7.0);
  EXPECT_EQ(b2.with_scale(3.0).b(), 3.0);
  EXPECT_EQ(parse_distribution("sm"), K::SinghMaddala);
  EXPECT_THROW(parse_distribution("lognormal"), UsageError);
}

TEST(Pdf, WorkedValues) {
  EXPECT_NEAR(pdf(ParameterVector(K::Dagum, {2, 1, 1}), 1.0), 0.5, 1e-15);
  EXPECT_NEAR(pdf(ParameterVector(K::Beta2, {1, 1, 1}), 1.0), 0.25, 1e-15);
  for (double y : log_grid(0.01, 1e4, 40)) {
    EXPECT_NEAR(pdf(ParameterVector(K::GB2, {2.3, 120, 0.8, 1.7}), y), gb2_pdf_reference(2.3, 120, 0.8, 1.7, y),
                1e-12 * gb2_pdf_reference(2.3, 120, 0.8, 1.7, y) + 1e-300);
  }
}

TEST(Pdf, IntegratesToOne) {
  boost::math::quadrature::tanh_sinh<double> ts;
  for (const auto& par : {ParameterVector(K::Dagum, {3.54, 329.58, 0.61}), ParameterVector(K::SinghMaddala, {1.7, 10, 3}),
                          ParameterVector(K::Beta2, {5, 2, 4}), ParameterVector(K::GB2, {2, 3, 0.7, 1.4})}) {
    const double total = ts.integrate([&](double t) { return pdf(par, t / (1 - t)) / ((1 - t) * (1 - t)); }, 0.0, 1.0);
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(Cdf, WorkedValues) {
  EXPECT_NEAR(cdf(ParameterVector(K::Dagum, {2, 1, 1}), 1.0), 0.5, 1e-15);
  EXPECT_NEAR(cdf(ParameterVector(K::SinghMaddala, {2, 1, 1}), 1.0), 0.5, 1e-15);
  EXPECT_EQ(cdf(ParameterVector(K::Dagum, {2, 1, 1}), INFINITY), 1.0);
  EXPECT_THROW(cdf(ParameterVector(K::Dagum, {2, 1, 1}), 0.0), DomainError);
  EXPECT_THROW(pdf(ParameterVector(K::Dagum, {2, 1, 1}), -1.0), DomainError);
}

TEST(Cdf, PdfIsNumericalDerivative) {
  for (const auto& par : {ParameterVector(K::Dagum, {3.54, 329.58, 0.61}), ParameterVector(K::GB2, {1.5, 40, 2, 0.9})}) {
    for (double y : log_grid(par.b() * 0.05, par.b() * 20, 30)) {
      const double h = 1e-5 * y;
      const double deriv = (cdf(par, y + h) - cdf(par, y - h)) / (2 * h);
      EXPECT_NEAR(deriv, pdf(par, y), 1e-5 * std::max(1.0, pdf(par, y)));
    }
  }
}

TEST(Nesting, GB2SpecialCasesAgreePointwise) {
  const auto ys = log_grid(1.0, 5000.0, 100);
  const ParameterVector dagum(K::Dagum, {3.54, 329.58, 0.61});
  const ParameterVector gb2_d(K::GB2, {3.54, 329.58, 0.61, 1.0});
  const ParameterVector sm(K::SinghMaddala, {2.1, 300.0, 1.9});
  const ParameterVector gb2_s(K::GB2, {2.1, 300.0, 1.0, 1.9});
  const ParameterVector b2(K::Beta2, {250.0, 2.5, 3.5});
  const ParameterVector gb2_b(K::GB2, {1.0, 250.0, 2.5, 3.5});
  for (double y : ys) {
    EXPECT_NEAR(pdf(dagum, y), pdf(gb2_d, y), 1e-10 * pdf(dagum, y));
    EXPECT_NEAR(cdf(dagum, y), cdf(gb2_d, y), 1e-10);
    EXPECT_NEAR(pdf(sm, y), pdf(gb2_s, y), 1e-10 * pdf(sm, y));
    EXPECT_NEAR(cdf(sm, y), cdf(gb2_s, y), 1e-10);
    EXPECT_NEAR(pdf(b2, y), pdf(gb2_b, y), 1e-10 * pdf(b2, y));
    EXPECT_NEAR(cdf(b2, y), cdf(gb2_b, y), 1e-10);
  }
  for (int i = 1; i < 100; ++i) {
    const double u = i / 100.0;
    EXPECT_NEAR(quantile(dagum, u), quantile(gb2_d, u), 1e-10 * quantile(dagum, u));
    EXPECT_NEAR(quantile(sm, u), quantile(gb2_s, u), 1e-10 * quantile(sm, u));
    EXPECT_NEAR(quantile(b2, u), quantile(gb2_b, u), 1e-10 * quantile(b2, u));
  }
}

TEST(Quantile, WorkedValuesAndRoundTrip) {
  EXPECT_NEAR(quantile(ParameterVector(K::Dagum, {2, 1, 1}), 0.5), 1.0, 1e-15);
  EXPECT_NEAR(quantile(ParameterVector(K::SinghMaddala, {2, 1, 1}), 0.5), 1.0, 1e-15);
  EXPECT_THROW(quantile(ParameterVector(K::Dagum, {2, 1, 1}), 1.0), DomainError);
  for (const auto& par : {ParameterVector(K::Dagum, {3.54, 329.58, 0.61}), ParameterVector(K::SinghMaddala, {1.2, 5, 7}),
                          ParameterVector(K::Beta2, {9, 0.6, 2}), ParameterVector(K::GB2, {4, 80, 0.3, 3})}) {
    for (int i = 1; i < 1000; ++i) {
      const double u = i / 1000.0;
      EXPECT_NEAR(cdf(par, quantile(par, u)), u, 1e-8);
    }
  }
}

TEST(Mean, WorkedValues) {
  EXPECT_NEAR(*mean(ParameterVector(K::Dagum, {2, 1, 1})).value, specfun::kPi / 2, 1e-13);
  EXPECT_FALSE(mean(ParameterVector(K::Dagum, {0.9, 1, 1})).value.has_value());
  EXPECT_FALSE(moment_existence(ParameterVector(K::Dagum, {0.9, 1, 1})).mean_exists);
  EXPECT_NEAR(moment_existence(ParameterVector(K::Dagum, {0.9, 1, 1})).condition_margin, -0.1, 1e-15);
  EXPECT_NEAR(*mean(ParameterVector(K::Beta2, {1, 2, 3})).value, 1.0, 1e-13);
}

TEST(Mean, AgreesWithQuadrature) {
  boost::math::quadrature::tanh_sinh<double> ts;
  for (const auto& par : {ParameterVector(K::Dagum, {3.54, 329.58, 0.61}), ParameterVector(K::GB2, {2.5, 10, 1.3, 2})}) {
    const double b = par.b();
    const double m = ts.integrate([&](double t) {
      const double x = t / (1 - t);
      return b * x * pdf(par, b * x) * b / ((1 - t) * (1 - t));
    }, 0.0, 1.0);
    EXPECT_NEAR(*mean(par).value, m, 1e-8 * m);
  }
}

TEST(MomentCdf, WorkedValuesAndQuadratureOracle) {
  const ParameterVector d3(K::Dagum, {3, 1, 1});
  EXPECT_NEAR(moment_cdf(d3, 1, 1.0), specfun::reg_inc_beta(0.5, 1 + 1.0 / 3, 1 - 1.0 / 3), 1e-15);
  EXPECT_EQ(moment_cdf(d3, 0, 0.7), cdf(d3, 0.7));
  EXPECT_EQ(moment_cdf(ParameterVector(K::GB2, {2, 1, 1, 2}), 1, INFINITY), 1.0);
  EXPECT_THROW(moment_cdf(ParameterVector(K::Dagum, {0.9, 1, 1}), 1, 1.0), DomainError);

  boost::math::quadrature::tanh_sinh<double> ts;
  for (const auto& par : {ParameterVector(K::Dagum, {3.54, 329.58, 0.61}), ParameterVector(K::SinghMaddala, {2, 50, 3}),
                          ParameterVector(K::GB2, {1.8, 20, 0.9, 2.2})}) {
    const double mu = *mean(par).value;
    for (double y : log_grid(par.b() * 0.1, par.b() * 10, 12)) {
      const double ref = ts.integrate([&](double t) { return t * pdf(par, t); }, 0.0, y) / mu;
      EXPECT_NEAR(moment_cdf(par, 1, y), ref, 1e-7);
    }
  }
}

TEST(Lorenz, BoundsConvexityAndClosedForm) {
  const ParameterVector d(K::Dagum, {3.54, 329.58, 0.61});
  EXPECT_EQ(lorenz(d, 0.0), 0.0);
  EXPECT_EQ(lorenz(d, 1.0), 1.0);
  std::vector<double> l(1001);
  for (int i = 0; i <= 1000; ++i) l[i] = lorenz(d, i / 1000.0);
  for (int i = 1; i < 1000; ++i) {
    const double u = i / 1000.0;
    EXPECT_LE(l[i], u);
    EXPECT_GE(l[i], l[i - 1]);
    EXPECT_GE(l[i + 1] - 2 * l[i] + l[i - 1], -1e-9);
    // Dagum closed form through the Beta(p,1) quantile u^{1/p}.
    EXPECT_NEAR(l[i], specfun::reg_inc_beta(std::pow(u, 1 / 0.61), 0.61 + 1 / 3.54, 1 - 1 / 3.54), 1e-12);
    EXPECT_NEAR(lorenz(d.with_scale(2 * d.b()), u), l[i], 1e-14);
  }
  EXPECT_THROW(lorenz(ParameterVector(K::Dagum, {0.9, 1, 1}), 0.5), DomainError);
}

TEST(GeneralisedLorenz, EndpointsAndScaling) {
  const ParameterVector d(K::Dagum, {2, 1, 1});
  EXPECT_EQ(gen_lorenz(d, 0.0), 0.0);
  EXPECT_NEAR(gen_lorenz(d, 1.0), specfun::kPi / 2, 1e-13);
  EXPECT_NEAR(gen_lorenz(d, 0.3), *mean(d).value * lorenz(d, 0.3), 1e-15);
}

TEST(Sample, EmpiricalCdfAndDeterminism) {
  const ParameterVector d(K::Dagum, {2, 1, 1});
  Rng rng(42);
  const auto y = sample(d, 100000, rng);
  for (double v : {0.5, 1.0, 2.0}) {
    double frac = 0;
    for (double x : y) frac += x <= v;
    frac /= y.size();
    const double F = cdf(d, v);
    EXPECT_NEAR(frac, F, 3 * std::sqrt(F * (1 - F) / y.size()));
  }
  Rng r1(7), r2(7);
  EXPECT_EQ(sample(d, 10, r1), sample(d, 10, r2));
  EXPECT_THROW(sample(d, 0, rng), DomainError);
}

TEST(Mode, Diagnostic) {
  const ParameterVector d(K::Dagum, {3.54, 329.58, 0.61});
  const double m = *mode(d);
  EXPECT_GT(pdf(d, m), pdf(d, m * 1.01));
  EXPECT_GT(pdf(d, m), pdf(d, m * 0.99));
  EXPECT_FALSE(mode(ParameterVector(K::Dagum, {1, 1, 0.5})).has_value());
}
