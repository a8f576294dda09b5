#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "evbayes/evd.hpp"

using namespace evbayes;

namespace {

// Test-side parameter grid spanning both tails, the Gumbel branch, and the
// near-zero shape region.
const std::vector<double> kXis = {-0.5, -0.2, -1e-9, 0.0, 1e-9, 0.18, 0.5, 1.0};
const std::vector<double> kMus = {-5.0, 0.0, 2.41};
const std::vector<double> kSigmas = {0.5, 1.0, 1.01, 2.0};

double mc_mean(std::vector<double>& draws) {
  double s = 0.0;
  for (double d : draws) s += d;
  return s / static_cast<double>(draws.size());
}

double mc_sd(const std::vector<double>& draws, double mean) {
  double s = 0.0;
  for (double d : draws) s += (d - mean) * (d - mean);
  return std::sqrt(s / static_cast<double>(draws.size() - 1));
}

}  // namespace

TEST_CASE("gev cdf known values and support clamping") {
  const GevParams gumbel(0.0, 0.0, 1.0);
  CHECK(gev_cdf(gumbel, 0.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));

  // xi > 0: lower support endpoint at mu - sigma/xi = -2
  const GevParams frechet(0.5, 0.0, 1.0);
  CHECK(gev_cdf(frechet, -2.0) == 0.0);
  CHECK(gev_cdf(frechet, -2.0000001) == 0.0);
  CHECK(gev_cdf(frechet, -1.9) > 0.0);

  // xi < 0: upper endpoint at mu - sigma/xi = 2
  const GevParams weibull(-0.5, 0.0, 1.0);
  CHECK(gev_cdf(weibull, 2.0) == 1.0);
  CHECK(gev_cdf(weibull, 5.0) == 1.0);
}

TEST_CASE("gev quantile/cdf roundtrip across the parameter grid") {
  for (double xi : kXis) {
    for (double mu : kMus) {
      for (double sigma : kSigmas) {
        const GevParams p(xi, mu, sigma);
        for (int i = 1; i <= 99; ++i) {
          const double q = i / 100.0;
          const double y = gev_quantile(p, q);
          CHECK(std::abs(gev_cdf(p, y) - q) < 1e-10);
        }
      }
    }
  }
}

TEST_CASE("gpd quantile/cdf roundtrip across the parameter grid") {
  for (double xi : kXis) {
    for (double sigma : kSigmas) {
      for (double u : {0.0, 1.4, 4.0}) {
        const GpdParams p(xi, sigma, u);
        for (int i = 1; i <= 99; ++i) {
          const double q = i / 100.0;
          const double y = gpd_quantile(p, q);
          CHECK(std::abs(gpd_cdf(p, y) - q) < 1e-10);
        }
      }
    }
  }
}

TEST_CASE("gev quantile known values") {
  // Independent high-precision arithmetic for -log(-log 0.9)
  const long double oracle = -std::log(-std::log(0.9L));
  const GevParams gumbel(0.0, 0.0, 1.0);
  CHECK(gev_quantile(gumbel, 0.9) ==
        doctest::Approx(static_cast<double>(oracle)).epsilon(1e-13));
  CHECK(gev_quantile(gumbel, 0.9) == doctest::Approx(2.250367).epsilon(1e-6));

  // -log(-log e^(-1)) = 0, so the quantile sits at mu
  const GevParams p(0.0, 5.0, 2.0);
  CHECK(gev_quantile(p, std::exp(-1.0)) == doctest::Approx(5.0).epsilon(1e-12));

  const GevParams sp(0.18, 2.41, 1.01);
  const double y = gev_quantile(sp, 0.5);
  CHECK(std::abs(gev_cdf(sp, y) - 0.5) < 1e-10);
  CHECK(std::abs(gev_cdf(sp, gev_quantile(sp, 0.9)) - 0.9) < 1e-10);

  CHECK_THROWS_AS(gev_quantile(gumbel, 0.0), Error);
  CHECK_THROWS_AS(gev_quantile(gumbel, 1.0), Error);
  CHECK_THROWS_AS(gev_quantile(gumbel, -0.2), Error);
}

TEST_CASE("gev logpdf known values and support sentinel") {
  const GevParams gumbel(0.0, 0.0, 1.0);
  CHECK(gev_logpdf(gumbel, 0.0) == doctest::Approx(-1.0).epsilon(1e-12));

  const GevParams frechet(0.5, 0.0, 1.0);
  CHECK(gev_logpdf(frechet, -2.5) == kNegInf);
  const GevParams weibull(-0.5, 0.0, 1.0);
  CHECK(gev_logpdf(weibull, 2.5) == kNegInf);
}

TEST_CASE("gev logpdf equals log of the cdf derivative") {
  // Spot case from the fitted-parameter domain
  {
    const GevParams p(-0.10, 3.33, 1.00);
    const double y = 3.33;
    const double h = 1e-5;
    const double deriv = (gev_cdf(p, y + h) - gev_cdf(p, y - h)) / (2.0 * h);
    CHECK(std::abs(gev_logpdf(p, y) - std::log(deriv)) < 1e-6);
  }
  // Relative check across the grid, away from support edges
  for (double xi : kXis) {
    const GevParams p(xi, 0.0, 1.0);
    for (double q : {0.05, 0.25, 0.5, 0.75, 0.95}) {
      const double y = gev_quantile(p, q);
      const double h = 1e-5;
      const double deriv = (gev_cdf(p, y + h) - gev_cdf(p, y - h)) / (2.0 * h);
      const double lp = gev_logpdf(p, y);
      CHECK(std::abs(std::log(deriv) - lp) < 1e-5 * std::max(1.0, std::abs(lp)));
    }
  }
}

TEST_CASE("continuity across xi = 0") {
  for (double eps : {1e-9, 1e-8}) {
    for (double sgn : {-1.0, 1.0}) {
      const GevParams p_near(sgn * eps, 0.0, 1.0);
      const GevParams p_zero(0.0, 0.0, 1.0);
      for (double y : {-1.0, 0.0, 1.0, 3.0}) {
        CHECK(std::abs(gev_cdf(p_near, y) - gev_cdf(p_zero, y)) < 1e-6);
        CHECK(std::abs(gev_logpdf(p_near, y) - gev_logpdf(p_zero, y)) < 1e-6);
      }
      for (double q : {0.1, 0.5, 0.9}) {
        CHECK(std::abs(gev_quantile(p_near, q) - gev_quantile(p_zero, q)) < 1e-6);
      }
      CHECK(std::abs(gev_mean(p_near) - gev_mean(p_zero)) < 1e-6);

      const GpdParams g_near(sgn * eps, 1.0, 0.0);
      const GpdParams g_zero(0.0, 1.0, 0.0);
      for (double y : {0.5, 1.0, 3.0}) {
        CHECK(std::abs(gpd_cdf(g_near, y) - gpd_cdf(g_zero, y)) < 1e-6);
        CHECK(std::abs(gpd_logpdf(g_near, y) - gpd_logpdf(g_zero, y)) < 1e-6);
      }
      for (double q : {0.1, 0.5, 0.9}) {
        CHECK(std::abs(gpd_quantile(g_near, q) - gpd_quantile(g_zero, q)) < 1e-6);
      }
    }
  }
}

TEST_CASE("gev logpdf near xi = 0 matches the Gumbel branch") {
  const GevParams near(1e-9, 0.0, 1.0);
  const GevParams zero(0.0, 0.0, 1.0);
  CHECK(std::abs(gev_logpdf(near, 1.0) - gev_logpdf(zero, 1.0)) < 1e-6);
}

TEST_CASE("cdf monotone on a grid across the support") {
  for (double xi : kXis) {
    const GevParams p(xi, 1.0, 0.7);
    const double lo = gev_quantile(p, 1e-6);
    const double hi = gev_quantile(p, 1.0 - 1e-6);
    double prev = -0.1;
    for (int i = 0; i < 1000; ++i) {
      const double y = lo + (hi - lo) * i / 999.0;
      const double c = gev_cdf(p, y);
      CHECK(c >= prev);
      prev = c;
    }
  }
}

TEST_CASE("gev mean") {
  CHECK(gev_mean(GevParams(0.0, 0.0, 1.0)) ==
        doctest::Approx(0.5772157).epsilon(1e-6));
  CHECK(gev_mean(GevParams(1.2, 0.0, 1.0)) == kPosInf);
  CHECK(gev_mean(GevParams(1.0, 0.0, 1.0)) == kPosInf);

  // (Gamma(1.5) - 1)/(-0.5) = 2 - 2 Gamma(1.5)
  const double analytic = 2.0 - 2.0 * std::tgamma(1.5);
  CHECK(gev_mean(GevParams(-0.5, 0.0, 1.0)) ==
        doctest::Approx(analytic).epsilon(1e-12));

  // Monte Carlo oracle, tolerance 3 standard errors
  const GevParams p(-0.5, 0.0, 1.0);
  Rng rng(1234);
  auto draws = sample_gev(p, rng, 10'000'000);
  const double m = mc_mean(draws);
  const double se = mc_sd(draws, m) / std::sqrt(static_cast<double>(draws.size()));
  CHECK(std::abs(m - gev_mean(p)) < 3.0 * se);
}

TEST_CASE("gpd cdf/logpdf/quantile/mean") {
  const GpdParams expo(0.0, 1.0, 0.0);
  CHECK(gpd_cdf(expo, 1.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  CHECK(gpd_logpdf(expo, 1.0) == doctest::Approx(-1.0).epsilon(1e-12));

  for (double xi : kXis) {
    const GpdParams p(xi, 0.7, 1.4);
    CHECK(gpd_cdf(p, p.u) == 0.0);
    CHECK(gpd_cdf(p, p.u - 1.0) == 0.0);
  }

  CHECK(gpd_mean(GpdParams(0.15, 0.58, 1.4)) ==
        doctest::Approx(1.4 + 0.58 / 0.85).epsilon(1e-12));
  CHECK(gpd_mean(GpdParams(1.0, 1.0, 0.0)) == kPosInf);

  // Monte Carlo oracle for the mean
  const GpdParams p(0.15, 0.58, 1.4);
  Rng rng(21);
  auto draws = sample_gpd(p, rng, 10'000'000);
  const double m = mc_mean(draws);
  const double se = mc_sd(draws, m) / std::sqrt(static_cast<double>(draws.size()));
  CHECK(std::abs(m - gpd_mean(p)) < 3.0 * se);
}

TEST_CASE("construction rejects invalid parameters") {
  CHECK_THROWS_AS(GevParams(0.1, 0.0, 0.0), Error);
  CHECK_THROWS_AS(GevParams(0.1, 0.0, -1.0), Error);
  CHECK_THROWS_AS(GpdParams(0.1, -0.5, 0.0), Error);
}

TEST_CASE("sampling: determinism, quantile identity, KS, moments") {
  const GevParams p(0.18, 2.41, 1.01);
  Rng a(42), b(42), c(43);
  const auto da = sample_gev(p, a, 1000);
  const auto db = sample_gev(p, b, 1000);
  const auto dc = sample_gev(p, c, 1000);
  CHECK(da == db);
  CHECK(da != dc);

  // U forced to e^(-1) maps to mu for the Gumbel case
  CHECK(gev_quantile(GevParams(0.0, 3.0, 2.0), std::exp(-1.0)) ==
        doctest::Approx(3.0).epsilon(1e-12));

  // Kolmogorov-Smirnov against the model cdf at the 1% level
  Rng rng(7);
  auto draws = sample_gev(p, rng, 100'000);
  std::sort(draws.begin(), draws.end());
  double ks = 0.0;
  const double n = static_cast<double>(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const double f = gev_cdf(p, draws[i]);
    ks = std::max(ks, std::abs(f - (i + 1) / n));
    ks = std::max(ks, std::abs(f - i / n));
  }
  CHECK(ks < 1.628 / std::sqrt(n));

  // Empirical 0.9 quantile of 10^6 Gumbel draws
  Rng rng2(11);
  auto gd = sample_gev(GevParams(0.0, 0.0, 1.0), rng2, 1'000'000);
  std::sort(gd.begin(), gd.end());
  CHECK(std::abs(gd[900'000] - 2.2504) < 0.02);

  // First two moments of 10^6 draws within 4 standard errors
  Rng rng3(13);
  auto md = sample_gev(GevParams(-0.2, 1.0, 2.0), rng3, 1'000'000);
  const double m = mc_mean(md);
  const double sd = mc_sd(md, m);
  const double se = sd / std::sqrt(1e6);
  CHECK(std::abs(m - gev_mean(GevParams(-0.2, 1.0, 2.0))) < 4.0 * se);
}

TEST_CASE("sampling: second moment matches the analytic variance") {
  // var = sigma^2 (Gamma(1-2xi) - Gamma(1-xi)^2) / xi^2 for xi < 1/2
  const GevParams p(-0.2, 1.0, 2.0);
  const double g1 = std::tgamma(1.0 - p.xi);
  const double g2 = std::tgamma(1.0 - 2.0 * p.xi);
  const double var = p.sigma * p.sigma * (g2 - g1 * g1) / (p.xi * p.xi);
  Rng rng(13);
  auto draws = sample_gev(p, rng, 1'000'000);
  const double m = mc_mean(draws);
  double m2 = 0.0;
  for (double d : draws) m2 += (d - m) * (d - m);
  m2 /= static_cast<double>(draws.size() - 1);
  // SE of the sample variance ~ sqrt((mu4 - var^2)/n); bound mu4 loosely by
  // the Monte Carlo fourth moment itself
  double mu4 = 0.0;
  for (double d : draws) {
    const double c = (d - m) * (d - m);
    mu4 += c * c;
  }
  mu4 /= static_cast<double>(draws.size());
  const double se = std::sqrt((mu4 - m2 * m2) / static_cast<double>(draws.size()));
  CHECK(std::abs(m2 - var) < 4.0 * se);
}
