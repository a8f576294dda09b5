#include "evbayes/model.hpp"

#include <algorithm>
#include <cmath>

#include "evbayes/quadrature.hpp"

namespace evbayes {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

double log_normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (kLog2Pi + std::log(var) + d * d / var);
}

// Log density sum for one group's maxima at location mu and scale sigma;
// avoids GevParams construction in the quadrature inner loop.
double group_loglik(double xi, double mu, double sigma,
                    const std::vector<double>& ys) {
  const double log_sigma = std::log(sigma);
  const bool gumbel = std::abs(xi) < kXiZeroTol;
  double ll = 0.0;
  for (double y : ys) {
    const double z = (y - mu) / sigma;
    if (gumbel) {
      ll += -z - std::exp(-z) - log_sigma;
      continue;
    }
    const double t = 1.0 + xi * z;
    if (t <= 0.0) return kNegInf;
    const double log_t = std::log1p(xi * z);
    ll += -std::exp(-log_t / xi) - (1.0 + 1.0 / xi) * log_t - log_sigma;
  }
  return ll;
}

// Feasible range of the location shift d for one group: every observation
// must stay inside the GEV support at location mu + d.
std::pair<double, double> delta_support(double xi, double mu, double sigma,
                                        const std::vector<double>& ys) {
  if (std::abs(xi) < kXiZeroTol) return {kNegInf, kPosInf};
  const auto [mn, mx] = std::minmax_element(ys.begin(), ys.end());
  if (xi > 0.0) return {kNegInf, *mn - mu + sigma / xi};
  return {*mx - mu + sigma / xi, kPosInf};
}

// Golden-section maximum of f on [lo, hi].
template <class F>
double golden_max(const F& f, double lo, double hi) {
  const double gr = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - gr * (b - a);
  double x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-11 * (1.0 + std::abs(a) + std::abs(b));
       ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

// Log of one group's marginal likelihood contribution (location effect).
double group_marginal(double xi, double mu, double sigma, double tau2,
                      const std::vector<double>& ys,
                      const GaussHermiteRule& rule) {
  const double tau = std::sqrt(tau2);
  const auto [d_lo, d_hi] = delta_support(xi, mu, sigma, ys);

  // Integrand on the log scale: conditional loglik plus the N(0, tau2) term.
  auto g = [&](double d) {
    const double ll = group_loglik(xi, mu + d, sigma, ys);
    return ll == kNegInf ? kNegInf : ll + log_normal_pdf(d, 0.0, tau2);
  };

  // Normal-approximation width of the conditional posterior of d; used to
  // size the search bracket and the finite-difference step.
  const double n_i = static_cast<double>(ys.size());
  const double w0 = 1.0 / std::sqrt(1.0 / tau2 + n_i / (sigma * sigma));

  double mean_y = 0.0;
  for (double y : ys) mean_y += y;
  mean_y /= n_i;
  const double center = mean_y - mu;
  double lo = std::min(0.0, center) - 12.0 * std::max(w0, std::abs(center));
  double hi = std::max(0.0, center) + 12.0 * std::max(w0, std::abs(center));
  if (std::isfinite(d_lo)) lo = std::max(lo, d_lo + 1e-9 * (1.0 + std::abs(d_lo)));
  if (std::isfinite(d_hi)) hi = std::min(hi, d_hi - 1e-9 * (1.0 + std::abs(d_hi)));

  double mode = 0.0, sd = 0.0;
  bool adaptive = lo < hi;
  if (adaptive) {
    mode = golden_max(g, lo, hi);
    const double eps = std::max(1e-7, 1e-4 * w0);
    if (mode - eps > d_lo && mode + eps < d_hi) {
      const double h =
          -(g(mode + eps) - 2.0 * g(mode) + g(mode - eps)) / (eps * eps);
      if (std::isfinite(h) && h > 0.0) {
        sd = 1.0 / std::sqrt(h);
      } else {
        adaptive = false;
      }
    } else {
      adaptive = false;
    }
  }

  const std::size_t k = rule.nodes.size();
  std::vector<double> terms(k, kNegInf);
  if (adaptive) {
    const double root2 = std::sqrt(2.0);
    for (std::size_t j = 0; j < k; ++j) {
      const double x = rule.nodes[j];
      const double d = mode + root2 * sd * x;
      const double gj = g(d);
      if (gj == kNegInf) continue;
      terms[j] = std::log(rule.weights[j]) + x * x + gj;
    }
    const double lse = log_sum_exp(terms);
    return lse == kNegInf ? kNegInf : std::log(root2 * sd) + lse;
  }

  // Plain rule centered at the random-effect distribution; the N(0, tau2)
  // factor is absorbed by the change of variables.
  for (std::size_t j = 0; j < k; ++j) {
    const double d = std::sqrt(2.0) * tau * rule.nodes[j];
    const double ll = group_loglik(xi, mu + d, sigma, ys);
    if (ll == kNegInf) continue;
    terms[j] = std::log(rule.weights[j]) + ll;
  }
  const double lse = log_sum_exp(terms);
  return lse == kNegInf ? kNegInf : -0.5 * std::log(3.141592653589793) + lse;
}

}  // namespace

std::string to_string(REKind kind) {
  switch (kind) {
    case REKind::None:
      return "none";
    case REKind::Location:
      return "location";
    case REKind::LocationScale:
      return "location-scale";
  }
  return "none";
}

REKind re_kind_from_string(const std::string& s) {
  if (s == "none") return REKind::None;
  if (s == "location") return REKind::Location;
  if (s == "location-scale") return REKind::LocationScale;
  throw Error("unknown random-effects kind '" + s + "'");
}

double gev_loglik_fixed(const GevParams& p, const ExtremesSample& sample) {
  if (sample.maxima.empty()) throw Error("gev_loglik_fixed: empty sample");
  double ll = 0.0;
  for (const auto& m : sample.maxima) {
    const double lp = gev_logpdf(p, m.value);
    if (lp == kNegInf) return kNegInf;
    ll += lp;
  }
  return ll;
}

double gev_loglik_conditional(const GevParams& p, const LatentEffects& re,
                              REKind kind, const ExtremesSample& sample) {
  if (kind == REKind::None) return gev_loglik_fixed(p, sample);
  const auto groups = sample.grouped();
  if (re.delta1.size() != groups.size() ||
      (kind == REKind::LocationScale && re.delta2.size() != groups.size())) {
    throw Error("gev_loglik_conditional: latent effects do not cover groups");
  }
  double ll = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) continue;
    const double mu_g = p.mu + re.delta1[g];
    const double sigma_g =
        kind == REKind::LocationScale ? p.sigma + re.delta2[g] : p.sigma;
    if (sigma_g <= 0.0) return kNegInf;
    const double part = group_loglik(p.xi, mu_g, sigma_g, groups[g]);
    if (part == kNegInf) return kNegInf;
    ll += part;
  }
  return ll;
}

double gev_loglik_marginal(const GevParams& p, const LocationREParams& re,
                           const ExtremesSample& sample, int quad_order) {
  if (quad_order < 5) throw Error("gev_loglik_marginal: quad_order must be >= 5");
  if (!(re.tau2 > 0.0)) throw Error("gev_loglik_marginal: tau2 must be > 0");
  const auto rule = gauss_hermite(quad_order);
  const auto groups = sample.grouped();
  double total = 0.0;
  for (const auto& ys : groups) {
    if (ys.empty()) continue;
    const double li = group_marginal(p.xi, p.mu, p.sigma, re.tau2, ys, rule);
    if (li == kNegInf) return kNegInf;
    total += li;
  }
  return total;
}

namespace {

// Log of one group's marginal contribution for correlated location-scale
// effects. Adaptive rule centered at the 2-D conditional mode; the plain
// rule centered at the random-effect distribution is the fallback.
double group_marginal_2d(const GevParams& p, const LocScaleREParams& re,
                         const std::vector<double>& ys,
                         const GaussHermiteRule& rule) {
  const double l11 = std::sqrt(re.tau1_sq);
  const double l21 = re.rho * std::sqrt(re.tau2_sq);
  const double l22 = std::sqrt(re.tau2_sq * (1.0 - re.rho * re.rho));
  const double root2 = std::sqrt(2.0);
  const std::size_t k = rule.nodes.size();
  const double log_det_sigma = std::log(re.tau1_sq) + std::log(re.tau2_sq) +
                               std::log1p(-re.rho * re.rho);

  auto log_mvn = [&](double d1, double d2) {
    const double a = d1 - re.theta1;
    const double b = d2 - re.theta2;
    const double q = (a * a / re.tau1_sq -
                      2.0 * re.rho * a * b / std::sqrt(re.tau1_sq * re.tau2_sq) +
                      b * b / re.tau2_sq) /
                     (1.0 - re.rho * re.rho);
    return -kLog2Pi - 0.5 * log_det_sigma - 0.5 * q;
  };
  auto g = [&](double d1, double d2) {
    const double sigma_g = p.sigma + d2;
    if (sigma_g <= 0.0) return kNegInf;
    const double ll = group_loglik(p.xi, p.mu + d1, sigma_g, ys);
    return ll == kNegInf ? kNegInf : ll + log_mvn(d1, d2);
  };

  // Conditional mode by cyclic golden-section sweeps from the RE mean.
  const double n_i = static_cast<double>(ys.size());
  double m1 = re.theta1;
  double m2 = std::max(re.theta2, -0.9 * p.sigma);
  if (g(m1, m2) == kNegInf) {
    double mean_y = 0.0;
    for (double y : ys) mean_y += y;
    m1 = mean_y / n_i - p.mu;
  }
  const double w1 = 1.0 / std::sqrt(1.0 / re.tau1_sq + n_i / (p.sigma * p.sigma));
  const double w2 = std::sqrt(re.tau2_sq);
  bool adaptive = g(m1, m2) != kNegInf;
  if (adaptive) {
    for (int sweep = 0; sweep < 12; ++sweep) {
      const double span1 = std::max(8.0 * w1, std::sqrt(re.tau1_sq));
      const auto [lo1, hi1] = delta_support(p.xi, p.mu, p.sigma + m2, ys);
      double a1 = m1 - span1, b1 = m1 + span1;
      if (std::isfinite(lo1)) a1 = std::max(a1, lo1 + 1e-9 * (1.0 + std::abs(lo1)));
      if (std::isfinite(hi1)) b1 = std::min(b1, hi1 - 1e-9 * (1.0 + std::abs(hi1)));
      if (a1 < b1) m1 = golden_max([&](double d) { return g(d, m2); }, a1, b1);
      const double a2 = std::max(-p.sigma + 1e-9 * (1.0 + p.sigma), m2 - 8.0 * w2);
      const double b2 = m2 + 8.0 * w2;
      if (a2 < b2) m2 = golden_max([&](double d) { return g(m1, d); }, a2, b2);
    }
    const double e1 = std::max(1e-7, 1e-4 * w1);
    const double e2 = std::max(1e-7, 1e-4 * std::min(w2, p.sigma + m2));
    const double g0 = g(m1, m2);
    const double h11 = -(g(m1 + e1, m2) - 2.0 * g0 + g(m1 - e1, m2)) / (e1 * e1);
    const double h22 = -(g(m1, m2 + e2) - 2.0 * g0 + g(m1, m2 - e2)) / (e2 * e2);
    const double h12 = -(g(m1 + e1, m2 + e2) - g(m1 + e1, m2 - e2) -
                         g(m1 - e1, m2 + e2) + g(m1 - e1, m2 - e2)) /
                       (4.0 * e1 * e2);
    const double det = h11 * h22 - h12 * h12;
    if (std::isfinite(det) && h11 > 0.0 && det > 0.0) {
      // Cholesky of H^{-1}: the quadrature covariance
      const double s11 = h22 / det, s12 = -h12 / det, s22 = h11 / det;
      const double c11 = std::sqrt(s11);
      const double c21 = s12 / c11;
      const double c22 = std::sqrt(std::max(s22 - c21 * c21, 0.0));
      if (c22 > 0.0) {
        std::vector<double> terms;
        terms.reserve(k * k);
        for (std::size_t j = 0; j < k; ++j) {
          const double xa = rule.nodes[j];
          const double lwj = std::log(rule.weights[j]);
          for (std::size_t l = 0; l < k; ++l) {
            const double xb = rule.nodes[l];
            const double d1 = m1 + root2 * c11 * xa;
            const double d2 = m2 + root2 * (c21 * xa + c22 * xb);
            const double gj = g(d1, d2);
            if (gj == kNegInf) continue;
            terms.push_back(lwj + std::log(rule.weights[l]) + xa * xa + xb * xb + gj);
          }
        }
        const double lse = log_sum_exp(terms);
        if (lse != kNegInf) return std::log(2.0 * c11 * c22) + lse;
      }
    }
  }

  // Plain tensor rule over MVN(theta, Sigma)
  std::vector<double> terms;
  terms.reserve(k * k);
  for (std::size_t j = 0; j < k; ++j) {
    const double xa = rule.nodes[j];
    const double lwj = std::log(rule.weights[j]);
    for (std::size_t l = 0; l < k; ++l) {
      const double xb = rule.nodes[l];
      const double d1 = re.theta1 + root2 * l11 * xa;
      const double d2 = re.theta2 + root2 * (l21 * xa + l22 * xb);
      const double sigma_g = p.sigma + d2;
      if (sigma_g <= 0.0) continue;
      const double ll = group_loglik(p.xi, p.mu + d1, sigma_g, ys);
      if (ll == kNegInf) continue;
      terms.push_back(lwj + std::log(rule.weights[l]) + ll);
    }
  }
  const double lse = log_sum_exp(terms);
  return lse == kNegInf ? kNegInf : lse - std::log(3.141592653589793);
}

}  // namespace

double gev_loglik_marginal_locscale(const GevParams& p,
                                    const LocScaleREParams& re,
                                    const ExtremesSample& sample,
                                    int quad_order) {
  if (quad_order < 5) {
    throw Error("gev_loglik_marginal_locscale: quad_order must be >= 5");
  }
  if (!(re.tau1_sq > 0.0) || !(re.tau2_sq > 0.0) || !(std::abs(re.rho) < 1.0)) {
    throw Error("gev_loglik_marginal_locscale: invalid covariance");
  }
  const auto rule = gauss_hermite(quad_order);
  const auto groups = sample.grouped();
  double total = 0.0;
  for (const auto& ys : groups) {
    if (ys.empty()) continue;
    const double li = group_marginal_2d(p, re, ys, rule);
    if (li == kNegInf) return kNegInf;
    total += li;
  }
  return total;
}

double gpd_loglik(const GpdParams& p, const ExceedanceSample& sample) {
  if (sample.excesses.empty()) throw Error("gpd_loglik: empty sample");
  const GpdParams on_excess(p.xi, p.sigma, 0.0);
  double ll = 0.0;
  for (double e : sample.excesses) {
    const double lp = gpd_logpdf(on_excess, e);
    if (lp == kNegInf) return kNegInf;
    ll += lp;
  }
  return ll;
}

}  // namespace evbayes
