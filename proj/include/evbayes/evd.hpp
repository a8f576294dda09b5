#pragma once

#include <cstddef>
#include <vector>

#include "evbayes/common.hpp"
#include "evbayes/rng.hpp"

namespace evbayes {

// Euler-Mascheroni constant; the Gumbel mean is mu + sigma * kEulerGamma.
inline constexpr double kEulerGamma = 0.57721566490153286;

// |xi| below this evaluates the xi = 0 (Gumbel / exponential) branch. The
// general formulas go through (1 + xi z)^(-1/xi) and lose every digit first.
inline constexpr double kXiZeroTol = 1e-8;

// GEV(xi, mu, sigma). Support: y > mu - sigma/xi for xi > 0,
// y < mu - sigma/xi for xi < 0, all reals for xi = 0.
struct GevParams {
  double xi;
  double mu;
  double sigma;
  GevParams(double xi_, double mu_, double sigma_);
};

// GPD(xi, sigma) for excesses over a threshold u; the location is pinned at
// the threshold, so only xi and sigma are estimable.
struct GpdParams {
  double xi;
  double sigma;
  double u;
  GpdParams(double xi_, double sigma_, double u_ = 0.0);
};

// CDF clamps to 0/1 outside the support instead of erroring, which keeps
// quantile-plot code free of special cases.
double gev_cdf(const GevParams& p, double y);

// Log density; -inf outside the support so MCMC can reject the proposal.
double gev_logpdf(const GevParams& p, double y);

// Inverse CDF; throws unless q is in (0,1).
double gev_quantile(const GevParams& p, double q);

// mu + sigma (Gamma(1-xi) - 1)/xi; +inf for xi >= 1.
double gev_mean(const GevParams& p);

double gpd_cdf(const GpdParams& p, double y);
double gpd_logpdf(const GpdParams& p, double y);
double gpd_quantile(const GpdParams& p, double q);
double gpd_mean(const GpdParams& p);  // u + sigma/(1-xi); +inf for xi >= 1

// Inverse-transform sampling. A fixed generator state yields a fixed
// sequence; callers own the generator (one per thread).
std::vector<double> sample_gev(const GevParams& p, Rng& rng, std::size_t n);
std::vector<double> sample_gpd(const GpdParams& p, Rng& rng, std::size_t n);

}  // namespace evbayes
