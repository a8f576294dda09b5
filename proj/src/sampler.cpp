#include "evbayes/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace evbayes {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

double Prior::logpdf(double x) const {
  switch (family) {
    case Family::Uniform:
      return (x >= a && x <= b) ? -std::log(b - a) : kNegInf;
    case Family::Normal: {
      const double d = (x - a) / b;
      return -0.5 * (kLog2Pi + d * d) - std::log(b);
    }
    case Family::Gamma:
      if (x <= 0.0) return kNegInf;
      return (a - 1.0) * std::log(x) - x / b - std::lgamma(a) - a * std::log(b);
    case Family::InverseGamma:
      if (x <= 0.0) return kNegInf;
      return a * std::log(b) - std::lgamma(a) - (a + 1.0) * std::log(x) - b / x;
  }
  return kNegInf;
}

Prior Prior::uniform(double lo, double hi) {
  if (!(lo < hi)) throw Error("uniform prior requires a < b");
  return Prior{Family::Uniform, lo, hi};
}

Prior Prior::normal(double mean, double sd) {
  if (!(sd > 0.0)) throw Error("normal prior requires sd > 0");
  return Prior{Family::Normal, mean, sd};
}

Prior Prior::gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) {
    throw Error("gamma prior requires shape > 0 and scale > 0");
  }
  return Prior{Family::Gamma, shape, scale};
}

Prior Prior::inverse_gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) {
    throw Error("inverse-gamma prior requires shape > 0 and scale > 0");
  }
  return Prior{Family::InverseGamma, shape, scale};
}

std::string to_string(Prior::Family f) {
  switch (f) {
    case Prior::Family::Uniform:
      return "uniform";
    case Prior::Family::Normal:
      return "normal";
    case Prior::Family::Gamma:
      return "gamma";
    case Prior::Family::InverseGamma:
      return "inverse-gamma";
  }
  return "uniform";
}

Prior::Family prior_family_from_string(const std::string& s) {
  if (s == "uniform") return Prior::Family::Uniform;
  if (s == "normal") return Prior::Family::Normal;
  if (s == "gamma") return Prior::Family::Gamma;
  if (s == "inverse-gamma" || s == "igamma") return Prior::Family::InverseGamma;
  throw Error("unknown prior family '" + s + "'");
}

const Prior* PriorSpec::find(const std::string& name) const {
  auto it = entries.find(name);
  return it == entries.end() ? nullptr : &it->second;
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::GevFixed:
      return "gev-fixed";
    case ModelKind::GevLocation:
      return "gev-location";
    case ModelKind::GevLocationScale:
      return "gev-location-scale";
    case ModelKind::GpdPot:
      return "gpd-pot";
  }
  return "gev-fixed";
}

PriorSpec default_priors(ModelKind kind) {
  PriorSpec spec;
  spec.set("xi", Prior::uniform(-10000.0, 10000.0));
  spec.set("sigma", Prior::gamma(0.0001, 10000.0));
  if (kind != ModelKind::GpdPot) {
    spec.set("mu", Prior::uniform(-10000.0, 10000.0));
  }
  if (kind == ModelKind::GevLocation) {
    spec.set("tau2", Prior::inverse_gamma(0.0001, 0.0001));
  }
  if (kind == ModelKind::GevLocationScale) {
    spec.set("theta1", Prior::uniform(-10000.0, 10000.0));
    spec.set("theta2", Prior::uniform(-10000.0, 10000.0));
    spec.set("tau1_sq", Prior::inverse_gamma(0.0001, 0.0001));
    spec.set("tau2_sq", Prior::inverse_gamma(0.0001, 0.0001));
    spec.set("rho", Prior::uniform(-1.0, 1.0));
  }
  return spec;
}

double log_prior(const PriorSpec& spec, const std::vector<std::string>& names,
                 const std::vector<double>& theta) {
  if (names.size() != theta.size()) {
    throw Error("log_prior: names/theta size mismatch");
  }
  double lp = 0.0;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const Prior* p = spec.find(names[i]);
    if (p == nullptr) throw Error("log_prior: no prior for '" + names[i] + "'");
    const double v = p->logpdf(theta[i]);
    if (v == kNegInf) return kNegInf;
    lp += v;
  }
  return lp;
}

std::size_t Chain::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  throw Error("Chain: no parameter named '" + name + "'");
}

bool Chain::has(const std::string& name) const {
  return std::find(names.begin(), names.end(), name) != names.end();
}

std::vector<double> Chain::column(const std::string& name) const {
  const std::size_t j = index_of(name);
  std::vector<double> out(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) out[i] = draws[i][j];
  return out;
}

Chain metropolis_run(const Target& target, const PriorSpec& priors,
                     const std::vector<double>& init, const SamplerConfig& cfg,
                     Rng& rng) {
  const std::size_t dim = target.names.size();
  if (dim == 0 || init.size() != dim) {
    throw Error("metropolis_run: init does not match target dimension");
  }
  if (target.n_structural > dim) {
    throw Error("metropolis_run: n_structural exceeds dimension");
  }
  if (cfg.burn_in < 0 || cfg.n_draws < 1 || cfg.thin < 1 ||
      cfg.n_draws % cfg.thin != 0) {
    throw Error("metropolis_run: need burn_in >= 0 and n_draws a positive multiple of thin");
  }

  // Per-coordinate priors; latent coordinates have none (their density is
  // target.log_latent).
  std::vector<const Prior*> coord_prior(dim, nullptr);
  for (std::size_t j = 0; j < target.n_structural; ++j) {
    coord_prior[j] = priors.find(target.names[j]);
    if (coord_prior[j] == nullptr) {
      throw Error("metropolis_run: no prior for parameter '" + target.names[j] + "'");
    }
  }

  auto latent = [&](const std::vector<double>& th) {
    return target.log_latent ? target.log_latent(th) : 0.0;
  };

  std::vector<double> theta = init;
  double ll = target.loglik(theta);
  double llat = latent(theta);
  {
    double lp = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      if (coord_prior[j] != nullptr) lp += coord_prior[j]->logpdf(theta[j]);
    }
    if (!std::isfinite(ll + llat + lp)) {
      throw Error("metropolis_run: infeasible initial state");
    }
  }

  std::vector<double> step(dim);
  if (!cfg.proposal_sd.empty()) {
    if (cfg.proposal_sd.size() != dim) {
      throw Error("metropolis_run: proposal_sd size mismatch");
    }
    step = cfg.proposal_sd;
    for (double s : step) {
      if (!(s > 0.0)) throw Error("metropolis_run: proposal_sd must be > 0");
    }
  } else {
    for (std::size_t j = 0; j < dim; ++j) {
      step[j] = std::max(0.05, 0.25 * std::abs(theta[j]));
    }
  }

  const int total = cfg.burn_in + cfg.n_draws;
  const std::size_t retained = static_cast<std::size_t>(cfg.n_draws / cfg.thin);
  Chain chain;
  chain.names = target.names;
  chain.seed = cfg.seed;
  chain.draws.reserve(retained);
  chain.loglik.reserve(retained);
  chain.acceptance.assign(dim, 0.0);

  std::vector<int> batch_acc(dim, 0);
  std::vector<long> post_acc(dim, 0);
  const int batch_len = 100;
  std::vector<double> prop = theta;

  for (int it = 0; it < total; ++it) {
    const bool warming = it < cfg.burn_in;
    for (std::size_t j = 0; j < dim; ++j) {
      const double cur = theta[j];
      const double cand = cur + step[j] * rng.normal();
      double dprior = 0.0;
      if (coord_prior[j] != nullptr) {
        const double lpn = coord_prior[j]->logpdf(cand);
        if (lpn == kNegInf) continue;  // outside prior support, reject
        dprior = lpn - coord_prior[j]->logpdf(cur);
      }
      prop[j] = cand;
      const double llat_new = latent(prop);
      double accept_delta = kNegInf;
      double ll_new = kNegInf;
      if (llat_new != kNegInf) {
        ll_new = target.loglik(prop);
        if (ll_new != kNegInf) {
          accept_delta = (ll_new + llat_new) - (ll + llat) + dprior;
        }
      }
      bool accept = false;
      if (accept_delta >= 0.0) {
        accept = true;
      } else if (accept_delta != kNegInf) {
        accept = std::log(rng.uniform01()) < accept_delta;
      }
      if (accept) {
        theta[j] = cand;
        ll = ll_new;
        llat = llat_new;
        if (warming) ++batch_acc[j];
        if (!warming) ++post_acc[j];
      } else {
        prop[j] = cur;
      }
    }
    if (warming && cfg.adapt && (it + 1) % batch_len == 0) {
      for (std::size_t j = 0; j < dim; ++j) {
        const double rate = static_cast<double>(batch_acc[j]) / batch_len;
        step[j] = std::clamp(step[j] * std::exp(2.0 * (rate - 0.3)), 1e-10, 1e8);
        batch_acc[j] = 0;
      }
    }
    if (!warming && (it - cfg.burn_in + 1) % cfg.thin == 0) {
      chain.draws.push_back(theta);
      chain.loglik.push_back(ll);
    }
  }
  for (std::size_t j = 0; j < dim; ++j) {
    chain.acceptance[j] = static_cast<double>(post_acc[j]) / cfg.n_draws;
  }
  return chain;
}

std::pair<double, double> hpd_interval(std::vector<double> draws, double level) {
  if (!(level > 0.0 && level < 1.0)) throw Error("hpd_interval: level outside (0,1)");
  const std::size_t n = draws.size();
  if (n < 2) throw Error("hpd_interval: need at least 2 draws");
  std::sort(draws.begin(), draws.end());
  std::size_t m = static_cast<std::size_t>(
      std::ceil(level * static_cast<double>(n)));
  m = std::clamp<std::size_t>(m, 1, n);
  std::size_t best = 0;
  double best_width = kPosInf;
  for (std::size_t i = 0; i + m <= n; ++i) {
    const double width = draws[i + m - 1] - draws[i];
    if (width < best_width) {
      best_width = width;
      best = i;
    }
  }
  return {draws[best], draws[best + m - 1]};
}

DicResult dic(const Chain& chain,
              const std::function<double(const std::vector<double>&)>& loglik) {
  if (chain.draws.empty()) throw Error("dic: empty chain");
  std::vector<double> lls = chain.loglik;
  if (lls.size() != chain.draws.size()) {
    lls.resize(chain.draws.size());
    for (std::size_t i = 0; i < chain.draws.size(); ++i) {
      lls[i] = loglik(chain.draws[i]);
    }
  }
  DicResult out;
  double dbar = 0.0;
  std::size_t used = 0;
  for (double ll : lls) {
    if (ll == kNegInf || !std::isfinite(ll)) {
      ++out.excluded;
      continue;
    }
    dbar += -2.0 * ll;
    ++used;
  }
  if (used == 0) throw Error("dic: all retained draws have -inf log-likelihood");
  dbar /= static_cast<double>(used);

  std::vector<double> theta_bar(chain.names.size(), 0.0);
  for (const auto& row : chain.draws) {
    for (std::size_t j = 0; j < row.size(); ++j) theta_bar[j] += row[j];
  }
  for (auto& v : theta_bar) v /= static_cast<double>(chain.draws.size());
  const double ll_at_mean = loglik(theta_bar);
  if (!std::isfinite(ll_at_mean)) {
    throw Error("dic: log-likelihood at the posterior mean is not finite");
  }
  const double d_at_mean = -2.0 * ll_at_mean;
  out.pd = dbar - d_at_mean;
  out.dic = dbar + out.pd;
  return out;
}

std::string to_string(DicVerdict v) {
  switch (v) {
    case DicVerdict::NoSeriousDifference:
      return "no-serious-difference";
    case DicVerdict::PreferSmaller:
      return "prefer-smaller";
    case DicVerdict::StronglyPreferSmaller:
      return "strongly-prefer-smaller";
  }
  return "no-serious-difference";
}

DicVerdict dic_verdict(double dic_a, double dic_b) {
  const double gap = std::abs(dic_a - dic_b);
  if (gap < 5.0) return DicVerdict::NoSeriousDifference;
  if (gap <= 10.0) return DicVerdict::PreferSmaller;
  return DicVerdict::StronglyPreferSmaller;
}

PriorSpec posterior_to_prior(const Chain& chain) {
  if (!chain.has("xi") || !chain.has("sigma")) {
    throw Error("posterior_to_prior: chain must contain xi and sigma");
  }
  PriorSpec spec;
  auto moments = [&](const std::string& name) {
    const auto col = chain.column(name);
    const double m = mean_of(col);
    const double s = sd_of(col, m);
    if (!(s > 0.0)) {
      throw Error("posterior_to_prior: degenerate (zero-variance) draws for '" +
                  name + "'");
    }
    return std::pair<double, double>{m, s};
  };
  for (const auto& name : {"xi", "mu", "theta1", "theta2", "rho"}) {
    if (!chain.has(name)) continue;
    const auto [m, s] = moments(name);
    spec.set(name, Prior::normal(m, s));
  }
  {
    const auto [m, s] = moments("sigma");
    if (!(m > 0.0)) throw Error("posterior_to_prior: sigma draws not positive");
    spec.set("sigma", Prior::gamma(m * m / (s * s), s * s / m));
  }
  for (const auto& name : {"tau2", "tau1_sq", "tau2_sq"}) {
    if (!chain.has(name)) continue;
    const auto [m, s] = moments(name);
    if (!(m > 0.0)) {
      throw Error(std::string("posterior_to_prior: nonpositive mean for '") +
                  name + "'");
    }
    const double shape = m * m / (s * s) + 2.0;
    spec.set(name, Prior::inverse_gamma(shape, m * (shape - 1.0)));
  }
  return spec;
}

const ParamSummary& PosteriorSummary::param(const std::string& name) const {
  for (const auto& [n, s] : params) {
    if (n == name) return s;
  }
  throw Error("PosteriorSummary: no parameter named '" + name + "'");
}

namespace {

PosteriorSummary summarize_chain(const Chain& chain) {
  PosteriorSummary out;
  for (std::size_t j = 0; j < chain.names.size(); ++j) {
    std::vector<double> col(chain.draws.size());
    for (std::size_t i = 0; i < chain.draws.size(); ++i) col[i] = chain.draws[i][j];
    ParamSummary s;
    s.mean = mean_of(col);
    s.sd = sd_of(col, s.mean);
    std::tie(s.hpd_lo, s.hpd_hi) = hpd_interval(col, 0.95);
    out.params.emplace_back(chain.names[j], s);
  }
  return out;
}

// Moment-based starting values with a short feasibility ladder over xi.
std::vector<double> gev_moment_init(const std::vector<double>& values) {
  const double m = mean_of(values);
  const double s = std::max(1e-3, sd_of(values, m));
  return {0.1, m, s * std::sqrt(6.0) / 3.141592653589793};
}

constexpr double kXiLadder[] = {0.1, 0.01, -0.1, 0.3, -0.3, 0.5};

}  // namespace

FitResult fit_gev(const ExtremesSample& sample, REKind kind,
                  const PriorSpec& priors, const SamplerConfig& cfg) {
  if (sample.maxima.empty()) throw Error("fit_gev: empty sample");
  const auto groups = sample.grouped();
  const std::size_t n_groups = groups.size();
  if (kind != REKind::None && n_groups < 2) {
    throw Error("fit_gev: random effects need at least 2 groups");
  }

  const auto vals = sample.values();
  const auto base_init = gev_moment_init(vals);
  const double mu0 = base_init[1];
  const double sigma0 = base_init[2];

  // Between-group variance of group means seeds tau2.
  double tau2_0 = 0.01;
  if (n_groups >= 2) {
    std::vector<double> gm;
    for (const auto& g : groups) {
      if (!g.empty()) gm.push_back(mean_of(g));
    }
    const double m = mean_of(gm);
    const double s = sd_of(gm, m);
    tau2_0 = std::max(0.01, s * s);
  }

  Target target;
  std::vector<double> init;
  if (kind == REKind::None) {
    target.names = {"xi", "mu", "sigma"};
    target.n_structural = 3;
    target.loglik = [sample](const std::vector<double>& th) {
      if (th[2] <= 0.0) return kNegInf;
      return gev_loglik_fixed(GevParams(th[0], th[1], th[2]), sample);
    };
    init = {0.1, mu0, sigma0};
  } else if (kind == REKind::Location) {
    target.names = {"xi", "mu", "sigma", "tau2"};
    target.n_structural = 4;
    for (std::size_t g = 0; g < n_groups; ++g) {
      target.names.push_back("delta[" + std::to_string(g) + "]");
    }
    target.loglik = [sample, n_groups](const std::vector<double>& th) {
      if (th[2] <= 0.0) return kNegInf;
      LatentEffects re;
      re.delta1.assign(th.begin() + 4, th.begin() + 4 + n_groups);
      return gev_loglik_conditional(GevParams(th[0], th[1], th[2]), re,
                                    REKind::Location, sample);
    };
    target.log_latent = [n_groups](const std::vector<double>& th) {
      const double tau2 = th[3];
      if (tau2 <= 0.0) return kNegInf;
      double lp = 0.0;
      const double log_term = std::log(2.0 * 3.141592653589793 * tau2);
      for (std::size_t g = 0; g < n_groups; ++g) {
        const double d = th[4 + g];
        lp += -0.5 * (log_term + d * d / tau2);
      }
      return lp;
    };
    init = {0.1, mu0, sigma0, tau2_0};
    init.insert(init.end(), n_groups, 0.0);
  } else {
    target.names = {"xi", "mu", "sigma", "theta1", "theta2",
                    "tau1_sq", "tau2_sq", "rho"};
    target.n_structural = 8;
    for (std::size_t g = 0; g < n_groups; ++g) {
      target.names.push_back("delta1[" + std::to_string(g) + "]");
    }
    for (std::size_t g = 0; g < n_groups; ++g) {
      target.names.push_back("delta2[" + std::to_string(g) + "]");
    }
    target.loglik = [sample, n_groups](const std::vector<double>& th) {
      if (th[2] <= 0.0) return kNegInf;
      LatentEffects re;
      re.delta1.assign(th.begin() + 8, th.begin() + 8 + n_groups);
      re.delta2.assign(th.begin() + 8 + n_groups, th.begin() + 8 + 2 * n_groups);
      return gev_loglik_conditional(GevParams(th[0], th[1], th[2]), re,
                                    REKind::LocationScale, sample);
    };
    target.log_latent = [n_groups](const std::vector<double>& th) {
      const double t1 = th[5], t2 = th[6], rho = th[7];
      if (t1 <= 0.0 || t2 <= 0.0 || std::abs(rho) >= 1.0) return kNegInf;
      const double det = t1 * t2 * (1.0 - rho * rho);
      const double log_norm = -kLog2Pi - 0.5 * std::log(det);
      double lp = 0.0;
      for (std::size_t g = 0; g < n_groups; ++g) {
        const double a = th[8 + g] - th[3];
        const double b = th[8 + n_groups + g] - th[4];
        const double q = (a * a / t1 - 2.0 * rho * a * b / std::sqrt(t1 * t2) +
                          b * b / t2) /
                         (1.0 - rho * rho);
        lp += log_norm - 0.5 * q;
      }
      return lp;
    };
    init = {0.1, mu0, sigma0, 0.0, 0.0, tau2_0,
            std::max(0.01, 0.25 * sigma0 * sigma0), 0.0};
    init.insert(init.end(), 2 * n_groups, 0.0);
  }

  // Walk the xi ladder until the initial state is feasible.
  Rng rng(cfg.seed);
  Chain chain;
  bool started = false;
  for (double xi0 : kXiLadder) {
    init[0] = xi0;
    try {
      chain = metropolis_run(target, priors, init, cfg, rng);
      started = true;
      break;
    } catch (const Error&) {
      rng = Rng(cfg.seed);  // identical stream for the next attempt
    }
  }
  if (!started) {
    throw Error("fit_gev: no feasible initial state (all xi candidates failed)");
  }

  FitResult out;
  out.kind = kind == REKind::None            ? ModelKind::GevFixed
             : kind == REKind::Location      ? ModelKind::GevLocation
                                             : ModelKind::GevLocationScale;
  out.chain = std::move(chain);
  out.summary = summarize_chain(out.chain);

  const double xi_m = out.summary.param("xi").mean;
  const double mu_m = out.summary.param("mu").mean;
  const double sg_m = out.summary.param("sigma").mean;
  if (kind == REKind::None) {
    out.summary.loglik_at_mean =
        gev_loglik_fixed(GevParams(xi_m, mu_m, sg_m), sample);
  } else if (kind == REKind::Location) {
    out.summary.loglik_at_mean = gev_loglik_marginal(
        GevParams(xi_m, mu_m, sg_m), LocationREParams{out.summary.param("tau2").mean},
        sample, cfg.quad_order);
  } else {
    LocScaleREParams re;
    re.theta1 = out.summary.param("theta1").mean;
    re.theta2 = out.summary.param("theta2").mean;
    re.tau1_sq = out.summary.param("tau1_sq").mean;
    re.tau2_sq = out.summary.param("tau2_sq").mean;
    re.rho = out.summary.param("rho").mean;
    out.summary.loglik_at_mean = gev_loglik_marginal_locscale(
        GevParams(xi_m, mu_m, sg_m), re, sample, cfg.quad_order);
  }

  if (cfg.marginal_dic && kind == REKind::Location) {
    Chain marg = out.chain;
    marg.loglik.clear();  // force re-evaluation under the marginal likelihood
    auto marginal_fn = [sample, &cfg](const std::vector<double>& th) {
      if (th[2] <= 0.0 || th[3] <= 0.0) return kNegInf;
      return gev_loglik_marginal(GevParams(th[0], th[1], th[2]),
                                 LocationREParams{th[3]}, sample, cfg.quad_order);
    };
    const DicResult d = dic(marg, marginal_fn);
    out.summary.dic = d.dic;
    out.summary.pd = d.pd;
    out.summary.dic_excluded = d.excluded;
  } else {
    const DicResult d = dic(out.chain, target.loglik);
    out.summary.dic = d.dic;
    out.summary.pd = d.pd;
    out.summary.dic_excluded = d.excluded;
  }
  return out;
}

FitResult fit_gpd(const ExceedanceSample& sample, const PriorSpec& priors,
                  const SamplerConfig& cfg) {
  if (sample.excesses.empty()) throw Error("fit_gpd: empty sample");
  Target target;
  target.names = {"xi", "sigma"};
  target.n_structural = 2;
  target.loglik = [sample](const std::vector<double>& th) {
    if (th[1] <= 0.0) return kNegInf;
    return gpd_loglik(GpdParams(th[0], th[1], sample.u), sample);
  };

  const double mean_excess =
      std::max(1e-6, mean_of(sample.excesses));  // exponential moment start
  std::vector<double> init = {0.1, mean_excess};

  Rng rng(cfg.seed);
  Chain chain;
  bool started = false;
  for (double xi0 : kXiLadder) {
    init[0] = xi0;
    try {
      chain = metropolis_run(target, priors, init, cfg, rng);
      started = true;
      break;
    } catch (const Error&) {
      rng = Rng(cfg.seed);
    }
  }
  if (!started) {
    throw Error("fit_gpd: no feasible initial state (all xi candidates failed)");
  }

  FitResult out;
  out.kind = ModelKind::GpdPot;
  out.chain = std::move(chain);
  out.summary = summarize_chain(out.chain);
  out.summary.loglik_at_mean =
      gpd_loglik(GpdParams(out.summary.param("xi").mean,
                           out.summary.param("sigma").mean, sample.u),
                 sample);
  const DicResult d = dic(out.chain, target.loglik);
  out.summary.dic = d.dic;
  out.summary.pd = d.pd;
  out.summary.dic_excluded = d.excluded;
  return out;
}

}  // namespace evbayes
