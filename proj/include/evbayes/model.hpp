#pragma once

#include <string>
#include <vector>

#include "evbayes/evd.hpp"
#include "evbayes/extract.hpp"

namespace evbayes {

enum class REKind { None, Location, LocationScale };

std::string to_string(REKind kind);
REKind re_kind_from_string(const std::string& s);

// Which sample label defines the groups; resolved at extraction time, kept
// here so fit configurations are self-describing.
struct RandomEffectsSpec {
  REKind kind = REKind::None;
  std::string group_key;
};

struct LocationREParams {
  double tau2 = 1.0;  // variance of the per-group location shift
};

// Bivariate-normal random effects on location and scale:
// mu_i = mu + d1_i, sigma_i = sigma + d2_i, (d1,d2) ~ MVN(theta, Sigma).
struct LocScaleREParams {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double tau1_sq = 1.0;
  double tau2_sq = 1.0;
  double rho = 0.0;
};

// Per-group latent draws; delta2 is used only for location-scale models.
struct LatentEffects {
  std::vector<double> delta1;
  std::vector<double> delta2;
};

// Sum of GEV log densities over all maxima; -inf if any point falls outside
// the support.
double gev_loglik_fixed(const GevParams& p, const ExtremesSample& sample);

// Likelihood conditional on the latent effects: group i uses
// mu + delta1[i] (and sigma + delta2[i] in location-scale mode, rejected
// with -inf whenever sigma_i <= 0).
double gev_loglik_conditional(const GevParams& p, const LatentEffects& re,
                              REKind kind, const ExtremesSample& sample);

// Marginal likelihood with the location effect integrated out: for each
// group, log integral of (prod_l f(y_il | xi, mu+d, sigma)) N(d; 0, tau2) dd.
// Adaptive Gauss-Hermite centered at the group's conditional mode with
// log-sum-exp accumulation; falls back to the plain rule centered at the
// random-effect distribution when mode finding fails.
double gev_loglik_marginal(const GevParams& p, const LocationREParams& re,
                           const ExtremesSample& sample, int quad_order = 20);

// Location-scale variant: tensor-product rule over the bivariate normal.
double gev_loglik_marginal_locscale(const GevParams& p,
                                    const LocScaleREParams& re,
                                    const ExtremesSample& sample,
                                    int quad_order = 20);

// Sum of GPD log densities over the excesses (location pinned at the
// threshold, so densities are evaluated on the excess scale).
double gpd_loglik(const GpdParams& p, const ExceedanceSample& sample);

}  // namespace evbayes
