#include "evbayes/evd.hpp"

#include <cmath>

namespace evbayes {

GevParams::GevParams(double xi_, double mu_, double sigma_)
    : xi(xi_), mu(mu_), sigma(sigma_) {
  if (!std::isfinite(xi) || !std::isfinite(mu) || !std::isfinite(sigma) ||
      sigma <= 0.0) {
    throw Error("GevParams: parameters must be finite with sigma > 0");
  }
}

GpdParams::GpdParams(double xi_, double sigma_, double u_)
    : xi(xi_), sigma(sigma_), u(u_) {
  if (!std::isfinite(xi) || !std::isfinite(sigma) || !std::isfinite(u) ||
      sigma <= 0.0) {
    throw Error("GpdParams: parameters must be finite with sigma > 0");
  }
}

double gev_cdf(const GevParams& p, double y) {
  const double z = (y - p.mu) / p.sigma;
  if (std::abs(p.xi) < kXiZeroTol) return std::exp(-std::exp(-z));
  const double t = 1.0 + p.xi * z;
  if (t <= 0.0) return p.xi > 0.0 ? 0.0 : 1.0;
  // t^(-1/xi) via log1p keeps precision for small xi*z
  return std::exp(-std::exp(-std::log1p(p.xi * z) / p.xi));
}

double gev_logpdf(const GevParams& p, double y) {
  const double z = (y - p.mu) / p.sigma;
  const double log_sigma = std::log(p.sigma);
  if (std::abs(p.xi) < kXiZeroTol) return -z - std::exp(-z) - log_sigma;
  const double t = 1.0 + p.xi * z;
  if (t <= 0.0) return kNegInf;
  const double log_t = std::log1p(p.xi * z);
  return -std::exp(-log_t / p.xi) - (1.0 + 1.0 / p.xi) * log_t - log_sigma;
}

double gev_quantile(const GevParams& p, double q) {
  if (!(q > 0.0 && q < 1.0)) throw Error("gev_quantile: q must lie in (0,1)");
  const double w = std::log(-std::log(q));
  if (std::abs(p.xi) < kXiZeroTol) return p.mu - p.sigma * w;
  // (-log q)^(-xi) - 1 == expm1(-xi w)
  return p.mu + p.sigma / p.xi * std::expm1(-p.xi * w);
}

double gev_mean(const GevParams& p) {
  if (p.xi >= 1.0) return kPosInf;
  if (std::abs(p.xi) < kXiZeroTol) return p.mu + p.sigma * kEulerGamma;
  return p.mu + p.sigma * (std::tgamma(1.0 - p.xi) - 1.0) / p.xi;
}

double gpd_cdf(const GpdParams& p, double y) {
  const double z = (y - p.u) / p.sigma;
  if (z <= 0.0) return 0.0;
  if (std::abs(p.xi) < kXiZeroTol) return -std::expm1(-z);
  const double t = 1.0 + p.xi * z;
  if (t <= 0.0) return 1.0;  // xi < 0, beyond the upper endpoint
  return -std::expm1(-std::log1p(p.xi * z) / p.xi);
}

double gpd_logpdf(const GpdParams& p, double y) {
  const double z = (y - p.u) / p.sigma;
  if (z < 0.0) return kNegInf;
  const double log_sigma = std::log(p.sigma);
  if (std::abs(p.xi) < kXiZeroTol) return -z - log_sigma;
  const double t = 1.0 + p.xi * z;
  if (t <= 0.0) return kNegInf;
  return -(1.0 + 1.0 / p.xi) * std::log1p(p.xi * z) - log_sigma;
}

double gpd_quantile(const GpdParams& p, double q) {
  if (!(q > 0.0 && q < 1.0)) throw Error("gpd_quantile: q must lie in (0,1)");
  const double w = std::log1p(-q);  // log(1 - q)
  if (std::abs(p.xi) < kXiZeroTol) return p.u - p.sigma * w;
  return p.u + p.sigma / p.xi * std::expm1(-p.xi * w);
}

double gpd_mean(const GpdParams& p) {
  if (p.xi >= 1.0) return kPosInf;
  return p.u + p.sigma / (1.0 - p.xi);
}

std::vector<double> sample_gev(const GevParams& p, Rng& rng, std::size_t n) {
  if (n < 1) throw Error("sample_gev: n must be >= 1");
  std::vector<double> out(n);
  for (auto& v : out) v = gev_quantile(p, rng.uniform01());
  return out;
}

std::vector<double> sample_gpd(const GpdParams& p, Rng& rng, std::size_t n) {
  if (n < 1) throw Error("sample_gpd: n must be >= 1");
  std::vector<double> out(n);
  for (auto& v : out) v = gpd_quantile(p, rng.uniform01());
  return out;
}

}  // namespace evbayes
