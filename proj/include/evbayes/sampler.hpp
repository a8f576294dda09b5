#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "evbayes/common.hpp"
#include "evbayes/model.hpp"
#include "evbayes/rng.hpp"

namespace evbayes {

// One parameter's prior. a/b hold (lo, hi) for uniform, (mean, sd) for
// normal, (shape, scale) for gamma and inverse-gamma.
struct Prior {
  enum class Family { Uniform, Normal, Gamma, InverseGamma };
  Family family = Family::Uniform;
  double a = 0.0;
  double b = 1.0;

  double logpdf(double x) const;

  static Prior uniform(double lo, double hi);
  static Prior normal(double mean, double sd);
  static Prior gamma(double shape, double scale);
  static Prior inverse_gamma(double shape, double scale);
};

std::string to_string(Prior::Family f);
Prior::Family prior_family_from_string(const std::string& s);

// Named prior entries; every structural (non-latent) parameter of a model
// must have exactly one.
struct PriorSpec {
  std::map<std::string, Prior> entries;

  const Prior* find(const std::string& name) const;
  void set(const std::string& name, const Prior& p) { entries[name] = p; }
};

enum class ModelKind { GevFixed, GevLocation, GevLocationScale, GpdPot };

std::string to_string(ModelKind kind);

// The paper's flat defaults: xi, mu ~ uniform(-10000, 10000),
// sigma ~ gamma(1e-4, 1e4), tau2 ~ inverse-gamma(1e-4, 1e-4). The
// location-scale hyperparameters get the same flat families, rho ~
// uniform(-1, 1).
PriorSpec default_priors(ModelKind kind);

// Sum of per-parameter log prior densities for the named coordinates;
// -inf outside any prior's support. Throws if a name lacks an entry.
double log_prior(const PriorSpec& spec, const std::vector<std::string>& names,
                 const std::vector<double>& theta);

struct SamplerConfig {
  int burn_in = 3000;
  int n_draws = 20000;  // post burn-in; must be a multiple of thin
  int thin = 5;
  std::uint64_t seed = 1;
  bool adapt = true;
  std::vector<double> proposal_sd;  // optional explicit per-coordinate scales
  int quad_order = 20;              // marginal-likelihood reporting
  bool marginal_dic = false;        // DIC from the marginal likelihood
};

// Retained draws plus per-draw data log-likelihood (the DIC deviance input)
// and per-coordinate acceptance rates.
struct Chain {
  std::vector<std::string> names;
  std::vector<std::vector<double>> draws;  // retained x parameters
  std::vector<double> loglik;              // data loglik per retained draw
  std::vector<double> acceptance;          // per coordinate, post burn-in
  std::uint64_t seed = 0;

  std::size_t index_of(const std::string& name) const;  // throws if absent
  bool has(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
};

// A posterior target split into the data likelihood (which DIC uses), the
// latent-effect density, and the prior (supplied separately). Coordinates
// [0, n_structural) require prior entries; the rest are latent.
struct Target {
  std::vector<std::string> names;
  std::size_t n_structural = 0;
  std::function<double(const std::vector<double>&)> loglik;
  std::function<double(const std::vector<double>&)> log_latent;  // optional
};

// Component-wise Gaussian random-walk Metropolis. Proposal scales adapt
// toward ~0.3 acceptance during burn-in and are frozen afterwards, so the
// retained draws target the exact posterior. Deterministic given the
// generator state.
Chain metropolis_run(const Target& target, const PriorSpec& priors,
                     const std::vector<double>& init, const SamplerConfig& cfg,
                     Rng& rng);

// Narrowest interval containing ceil(level * n) sorted draws; ties resolved
// by the first minimal window.
std::pair<double, double> hpd_interval(std::vector<double> draws, double level);

struct DicResult {
  double dic = 0.0;
  double pd = 0.0;
  int excluded = 0;  // retained draws with -inf loglik, left out of Dbar
};

// dic = Dbar + pD with D = -2 loglik, pD = Dbar - D(posterior mean).
DicResult dic(const Chain& chain,
              const std::function<double(const std::vector<double>&)>& loglik);

enum class DicVerdict { NoSeriousDifference, PreferSmaller, StronglyPreferSmaller };

std::string to_string(DicVerdict v);

// |delta| < 5: no serious difference; 5 <= |delta| <= 10: smaller preferred;
// > 10: smaller strongly preferred.
DicVerdict dic_verdict(double dic_a, double dic_b);

// Moment-match the posterior draws into closed-form priors: xi/mu/theta ->
// normal, sigma -> gamma, variances -> inverse-gamma. Throws on zero-variance
// draws.
PriorSpec posterior_to_prior(const Chain& chain);

struct ParamSummary {
  double mean = 0.0;
  double sd = 0.0;
  double hpd_lo = 0.0;
  double hpd_hi = 0.0;
};

struct PosteriorSummary {
  std::vector<std::pair<std::string, ParamSummary>> params;
  double dic = 0.0;
  double pd = 0.0;
  double loglik_at_mean = 0.0;  // marginal likelihood for RE models
  int dic_excluded = 0;

  const ParamSummary& param(const std::string& name) const;
};

struct FitResult {
  ModelKind kind = ModelKind::GevFixed;
  Chain chain;
  PosteriorSummary summary;
};

// End-to-end fits: build the target for the requested effect structure,
// choose moment-based initial values, run the sampler, and summarize.
FitResult fit_gev(const ExtremesSample& sample, REKind kind,
                  const PriorSpec& priors, const SamplerConfig& cfg);
FitResult fit_gpd(const ExceedanceSample& sample, const PriorSpec& priors,
                  const SamplerConfig& cfg);

}  // namespace evbayes
