#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "evbayes/extract.hpp"
#include "evbayes/sampler.hpp"

namespace evbayes {

// Block-maxima scenario: `periods` cycles of `years_per_period` years, each
// year holding `obs_per_year` normal draws with a per-period location shift
// e_i ~ N(0, tau^2). The base mean/sd mirror pooled daily index returns.
struct ScenarioBM {
  int periods = 10;
  int years_per_period = 5;
  int obs_per_year = 3600;
  double base_mean = 0.02;
  double base_sd = 1.24;
  double tau = 1.0;
  std::uint64_t seed = 1;
};

// Direct GEV sampling split into a "past" part and a "future" part.
struct ScenarioGevDirect {
  std::size_t n = 58;
  double xi = 0.18;
  double mu = 2.41;
  double sigma = 1.01;
  std::size_t split_first = 43;
  std::uint64_t seed = 1;
};

// POT scenario: `years` of daily normal observations; excesses over
// `threshold` are fitted for the first `split_first` years, then for the
// remaining slice and for the single year after the split.
struct ScenarioPot {
  int years = 65;
  int obs_per_year = 365;
  double mean = 2.0;
  double sd = 1.0;
  double threshold = 4.0;
  int split_first = 60;
  std::uint64_t seed = 1;
};

struct BmData {
  TimeSeries maxima_series;  // yearly maxima, dated, labeled by period
  ExtremesSample sample;
};

BmData generate_bm(const ScenarioBM& s, Rng& rng);

// Cross-replication statistic: mean, sd of the per-replication values, and a
// normal 95% CI for the mean.
struct RepStat {
  double mean = 0.0;
  double sd = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

RepStat rep_stat(const std::vector<double>& values);

struct ModelStudy {
  REKind kind = REKind::None;
  std::map<std::string, RepStat> params;
  RepStat rk;      // posterior mean of the k-period return level
  RepStat dic;
  RepStat loglik;  // marginal log-likelihood at the posterior mean
  std::vector<double> tau2_hpd_lo;  // per replication, location models only
  int failed = 0;
};

struct BmStudyReport {
  ScenarioBM scenario;
  int replications = 0;
  int k = 10;
  std::vector<ModelStudy> models;
  RepStat empirical_rk_period_mean;  // mean over periods of within-period R^k
  RepStat empirical_rk_pooled;       // R^k of all maxima pooled
  std::vector<RepStat> per_period_rk;
};

// Generate/fit/summarize `replications` times with derived sub-seeds;
// aggregation is a deterministic reduce, so reports are reproducible
// byte-for-byte. A fit whose start is infeasible is retried once under a new
// sub-seed and then counted as failed.
BmStudyReport run_bm_study(const ScenarioBM& s, const std::vector<REKind>& models,
                           int replications, int k, const SamplerConfig& cfg);

struct TauSweepRow {
  double tau = 0.0;
  RepStat empirical;
  RepStat fixed_rk;
  RepStat re_rk;
};

std::vector<TauSweepRow> run_tau_sweep(const ScenarioBM& base,
                                       const std::vector<double>& taus,
                                       int replications, int k,
                                       const SamplerConfig& cfg);

struct TransferCell {
  std::string label;
  std::map<std::string, RepStat> params;
  RepStat rk;
  RepStat dic;
  RepStat loglik;
  int failed = 0;
};

struct GevTransferReport {
  ScenarioGevDirect scenario;
  int replications = 0;
  int k = 10;
  double true_rk = 0.0;
  std::vector<TransferCell> cells;
  int informative_closer = 0;  // reps where the informative R^k sits closer
  bool part2_skipped = false;
};

// Fit the first part flat, convert the posterior into priors, then fit the
// second part under informative and uninformative priors.
GevTransferReport run_prior_transfer_gev(const ScenarioGevDirect& s,
                                         int replications, int k,
                                         const SamplerConfig& cfg);

struct Bm12TransferReport {
  ScenarioBM scenario;
  int split_first_periods = 9;
  int replications = 0;
  int k = 10;
  std::vector<TransferCell> cells;
  RepStat empirical_rk_part2;         // per-period R^k over the held-out periods
  RepStat empirical_rk_part2_pooled;  // pooled quantile over the same maxima
  bool empirical_in_informative_re_ci = false;
};

Bm12TransferReport run_prior_transfer_bm12(const ScenarioBM& s,
                                           int split_first_periods,
                                           int replications, int k,
                                           const SamplerConfig& cfg);

struct PotCell {
  std::string label;
  std::map<std::string, RepStat> params;
  RepStat var_risk;
  RepStat es_risk;
  int var_fallback = 0;  // plug-in used (per-draw transform > 1% non-finite)
  int es_fallback = 0;
  int failed = 0;
};

struct PotStudyReport {
  ScenarioPot scenario;
  int replications = 0;
  double p = 0.05;
  std::vector<PotCell> cells;
  RepStat empirical_var_last;
  RepStat empirical_es_last;
  RepStat empirical_var_year1;
  RepStat empirical_es_year1;
  int informative_closer_var_year1 = 0;
};

PotStudyReport run_pot_study(const ScenarioPot& s, int replications, double p,
                             const SamplerConfig& cfg);

}  // namespace evbayes
