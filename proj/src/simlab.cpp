#include "evbayes/simlab.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <numeric>
#include <optional>
#include <thread>

#include "evbayes/risk.hpp"

namespace evbayes {

namespace {

void parallel_for(int n, const std::function<void(int)>& fn) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int workers = static_cast<int>(std::min<unsigned>(hw, n));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex err_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (int i = w; i < n; i += workers) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Fit with one retry under a fresh sub-seed; nullopt when both fail.
std::optional<FitResult> try_fit_gev(const ExtremesSample& sample, REKind kind,
                                     const PriorSpec& priors,
                                     SamplerConfig cfg) {
  for (int attempt = 0; attempt < 2; ++attempt) {
    try {
      return fit_gev(sample, kind, priors, cfg);
    } catch (const Error&) {
      cfg.seed = Rng::derive(cfg.seed, 7777);
    }
  }
  return std::nullopt;
}

std::optional<FitResult> try_fit_gpd(const ExceedanceSample& sample,
                                     const PriorSpec& priors,
                                     SamplerConfig cfg) {
  for (int attempt = 0; attempt < 2; ++attempt) {
    try {
      return fit_gpd(sample, priors, cfg);
    } catch (const Error&) {
      cfg.seed = Rng::derive(cfg.seed, 7777);
    }
  }
  return std::nullopt;
}

// Posterior mean of the k-period return level (per-draw transform).
double posterior_rk(const FitResult& fit, int k) {
  const std::size_t i_xi = fit.chain.index_of("xi");
  const std::size_t i_mu = fit.chain.index_of("mu");
  const std::size_t i_sg = fit.chain.index_of("sigma");
  const auto d = posterior_transform(fit.chain, [&](const std::vector<double>& th) {
    return return_level(GevParams(th[i_xi], th[i_mu], th[i_sg]), k);
  });
  return d.stat.mean;
}

// Mean over groups of the within-group empirical return level.
double period_mean_rk(const ExtremesSample& sample, int k) {
  const auto groups = sample.grouped();
  double sum = 0.0;
  int used = 0;
  const double q = 1.0 - 1.0 / static_cast<double>(k);
  for (const auto& g : groups) {
    if (g.empty()) continue;
    sum += empirical_quantile(g, q);
    ++used;
  }
  if (used == 0) throw Error("period_mean_rk: no nonempty groups");
  return sum / used;
}

ExtremesSample subset_by_groups(const ExtremesSample& sample, int g_lo,
                                int g_hi) {
  ExtremesSample out;
  out.block_spec = sample.block_spec;
  out.sign = sample.sign;
  std::vector<int> remap(sample.group_labels.size(), -1);
  for (int g = g_lo; g < g_hi; ++g) {
    remap[g] = static_cast<int>(out.group_labels.size());
    out.group_labels.push_back(sample.group_labels[g]);
  }
  for (const auto& m : sample.maxima) {
    if (m.group >= g_lo && m.group < g_hi) {
      out.maxima.push_back(BlockMax{m.value, m.block_id, remap[m.group]});
    }
  }
  return out;
}

ExtremesSample sample_from_values(const std::vector<double>& values) {
  ExtremesSample out;
  out.block_spec = "direct";
  out.group_labels = {"all"};
  for (std::size_t i = 0; i < values.size(); ++i) {
    out.maxima.push_back(BlockMax{values[i], "y" + std::to_string(i), 0});
  }
  return out;
}

struct Accumulator {
  std::map<std::string, std::vector<double>> series;
  void add(const std::string& key, double v) { series[key].push_back(v); }
};

RepStat stat_of(const Accumulator& acc, const std::string& key) {
  auto it = acc.series.find(key);
  if (it == acc.series.end() || it->second.empty()) return RepStat{};
  return rep_stat(it->second);
}


}  // namespace

BmData generate_bm(const ScenarioBM& s, Rng& rng) {
  if (s.periods < 1 || s.years_per_period < 1 || s.obs_per_year < 1) {
    throw Error("generate_bm: counts must be >= 1");
  }
  if (!(s.base_sd > 0.0) || s.tau < 0.0) {
    throw Error("generate_bm: base_sd must be > 0 and tau >= 0");
  }
  BmData out;
  out.maxima_series.name = "simulated-bm";
  out.sample.block_spec = "year";
  out.sample.sign = 1;
  int year = 1960;
  for (int i = 0; i < s.periods; ++i) {
    const double shift = s.tau * rng.normal();
    const std::string label = "period" + std::to_string(i);
    out.sample.group_labels.push_back(label);
    for (int y = 0; y < s.years_per_period; ++y, ++year) {
      double mx = kNegInf;
      for (int l = 0; l < s.obs_per_year; ++l) {
        mx = std::max(mx, rng.normal(s.base_mean + shift, s.base_sd));
      }
      out.sample.maxima.push_back(BlockMax{mx, std::to_string(year), i});
      out.maxima_series.points.push_back(
          TimePoint{Date{year, 12, 31}, mx, label});
    }
  }
  return out;
}

RepStat rep_stat(const std::vector<double>& values) {
  RepStat out;
  if (values.empty()) return out;
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) /
             static_cast<double>(values.size());
  double s = 0.0;
  for (double v : values) s += (v - out.mean) * (v - out.mean);
  out.sd = values.size() > 1
               ? std::sqrt(s / static_cast<double>(values.size() - 1))
               : 0.0;
  const double half =
      1.959963984540054 * out.sd / std::sqrt(static_cast<double>(values.size()));
  out.lo = out.mean - half;
  out.hi = out.mean + half;
  return out;
}

BmStudyReport run_bm_study(const ScenarioBM& s, const std::vector<REKind>& models,
                           int replications, int k, const SamplerConfig& cfg) {
  if (replications < 1) throw Error("run_bm_study: replications must be >= 1");
  BmStudyReport report;
  report.scenario = s;
  report.replications = replications;
  report.k = k;

  struct RepOut {
    double emp_period_mean = 0.0;
    double emp_pooled = 0.0;
    std::vector<double> per_period;
    // per model: (params..., rk, dic, loglik) or failed
    std::vector<std::optional<std::map<std::string, double>>> fits;
  };
  std::vector<RepOut> reps(replications);

  parallel_for(replications, [&](int r) {
    Rng data_rng(Rng::derive(s.seed, r));
    const BmData data = generate_bm(s, data_rng);
    RepOut& out = reps[r];
    out.emp_period_mean = period_mean_rk(data.sample, k);
    out.emp_pooled = empirical_return_level(data.sample, k);
    const double q = 1.0 - 1.0 / static_cast<double>(k);
    for (const auto& g : data.sample.grouped()) {
      out.per_period.push_back(empirical_quantile(g, q));
    }
    out.fits.resize(models.size());
    for (std::size_t m = 0; m < models.size(); ++m) {
      SamplerConfig fit_cfg = cfg;
      fit_cfg.seed = Rng::derive(cfg.seed, static_cast<std::uint64_t>(r) * 16 + m);
      const PriorSpec priors = default_priors(
          models[m] == REKind::None       ? ModelKind::GevFixed
          : models[m] == REKind::Location ? ModelKind::GevLocation
                                          : ModelKind::GevLocationScale);
      auto fit = try_fit_gev(data.sample, models[m], priors, fit_cfg);
      if (!fit) continue;
      std::map<std::string, double> row;
      for (const auto& [name, ps] : fit->summary.params) {
        if (name.find("delta") == std::string::npos) row[name] = ps.mean;
      }
      row["rk"] = posterior_rk(*fit, k);
      row["dic"] = fit->summary.dic;
      row["loglik"] = fit->summary.loglik_at_mean;
      if (fit->chain.has("tau2")) {
        row["tau2_hpd_lo"] = fit->summary.param("tau2").hpd_lo;
      }
      out.fits[m] = std::move(row);
    }
  });

  Accumulator emp;
  for (const auto& rep : reps) {
    emp.add("period_mean", rep.emp_period_mean);
    emp.add("pooled", rep.emp_pooled);
  }
  report.empirical_rk_period_mean = stat_of(emp, "period_mean");
  report.empirical_rk_pooled = stat_of(emp, "pooled");
  const std::size_t n_periods = reps.front().per_period.size();
  for (std::size_t p = 0; p < n_periods; ++p) {
    std::vector<double> v;
    for (const auto& rep : reps) {
      if (p < rep.per_period.size()) v.push_back(rep.per_period[p]);
    }
    report.per_period_rk.push_back(rep_stat(v));
  }

  for (std::size_t m = 0; m < models.size(); ++m) {
    ModelStudy study;
    study.kind = models[m];
    Accumulator acc;
    for (const auto& rep : reps) {
      if (!rep.fits[m]) {
        ++study.failed;
        continue;
      }
      for (const auto& [key, value] : *rep.fits[m]) acc.add(key, value);
      auto it = rep.fits[m]->find("tau2_hpd_lo");
      if (it != rep.fits[m]->end()) study.tau2_hpd_lo.push_back(it->second);
    }
    for (const auto& [key, series] : acc.series) {
      if (key == "rk" || key == "dic" || key == "loglik") continue;
      study.params[key] = rep_stat(series);
    }
    study.rk = stat_of(acc, "rk");
    study.dic = stat_of(acc, "dic");
    study.loglik = stat_of(acc, "loglik");
    report.models.push_back(std::move(study));
  }
  return report;
}

std::vector<TauSweepRow> run_tau_sweep(const ScenarioBM& base,
                                       const std::vector<double>& taus,
                                       int replications, int k,
                                       const SamplerConfig& cfg) {
  std::vector<TauSweepRow> rows;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    ScenarioBM s = base;
    s.tau = taus[i];
    s.seed = Rng::derive(base.seed, 100 + i);
    SamplerConfig c = cfg;
    c.seed = Rng::derive(cfg.seed, 100 + i);
    const BmStudyReport rep =
        run_bm_study(s, {REKind::None, REKind::Location}, replications, k, c);
    TauSweepRow row;
    row.tau = taus[i];
    row.empirical = rep.empirical_rk_period_mean;
    row.fixed_rk = rep.models[0].rk;
    row.re_rk = rep.models[1].rk;
    rows.push_back(row);
  }
  return rows;
}

GevTransferReport run_prior_transfer_gev(const ScenarioGevDirect& s,
                                         int replications, int k,
                                         const SamplerConfig& cfg) {
  if (replications < 1) throw Error("run_prior_transfer_gev: replications >= 1");
  if (s.split_first > s.n) throw Error("run_prior_transfer_gev: bad split");
  GevTransferReport report;
  report.scenario = s;
  report.replications = replications;
  report.k = k;
  const GevParams truth(s.xi, s.mu, s.sigma);
  report.true_rk = return_level(truth, k);
  report.part2_skipped = s.split_first == s.n;

  struct RepOut {
    std::optional<std::map<std::string, double>> part1, info, flat;
  };
  std::vector<RepOut> reps(replications);

  const std::vector<std::string> gev_names = {"xi", "mu", "sigma"};
  parallel_for(replications, [&](int r) {
    Rng rng(Rng::derive(s.seed, r));
    const auto draws = sample_gev(truth, rng, s.n);
    const std::vector<double> part1_vals(draws.begin(),
                                         draws.begin() + s.split_first);
    const auto part1 = sample_from_values(part1_vals);
    auto summary_row = [&](const FitResult& fit) {
      std::map<std::string, double> row;
      for (const auto& name : gev_names) row[name] = fit.summary.param(name).mean;
      row["rk"] = posterior_rk(fit, k);
      row["dic"] = fit.summary.dic;
      row["loglik"] = fit.summary.loglik_at_mean;
      return row;
    };

    SamplerConfig c1 = cfg;
    c1.seed = Rng::derive(cfg.seed, static_cast<std::uint64_t>(r) * 16);
    auto fit1 = try_fit_gev(part1, REKind::None,
                            default_priors(ModelKind::GevFixed), c1);
    if (!fit1) return;
    reps[r].part1 = summary_row(*fit1);
    if (report.part2_skipped) return;

    const std::vector<double> part2_vals(draws.begin() + s.split_first,
                                         draws.end());
    const auto part2 = sample_from_values(part2_vals);
    const PriorSpec informative = posterior_to_prior(fit1->chain);

    SamplerConfig c2 = cfg;
    c2.seed = Rng::derive(cfg.seed, static_cast<std::uint64_t>(r) * 16 + 1);
    if (auto fit = try_fit_gev(part2, REKind::None, informative, c2)) {
      reps[r].info = summary_row(*fit);
    }
    SamplerConfig c3 = cfg;
    c3.seed = Rng::derive(cfg.seed, static_cast<std::uint64_t>(r) * 16 + 2);
    if (auto fit = try_fit_gev(part2, REKind::None,
                               default_priors(ModelKind::GevFixed), c3)) {
      reps[r].flat = summary_row(*fit);
    }
  });

  auto make_cell = [&](const std::string& label,
                       std::optional<std::map<std::string, double>> RepOut::*member) {
    TransferCell cell;
    cell.label = label;
    Accumulator acc;
    for (const auto& rep : reps) {
      const auto& row = rep.*member;
      if (!row) {
        ++cell.failed;
        continue;
      }
      for (const auto& [key, value] : *row) acc.add(key, value);
    }
    for (const auto& name : gev_names) cell.params[name] = stat_of(acc, name);
    cell.rk = stat_of(acc, "rk");
    cell.dic = stat_of(acc, "dic");
    cell.loglik = stat_of(acc, "loglik");
    return cell;
  };
  report.cells.push_back(make_cell("part1-uninformative", &RepOut::part1));
  if (!report.part2_skipped) {
    report.cells.push_back(make_cell("part2-informative", &RepOut::info));
    report.cells.push_back(make_cell("part2-uninformative", &RepOut::flat));
    for (const auto& rep : reps) {
      if (rep.info && rep.flat) {
        const double e_info = std::abs(rep.info->at("rk") - report.true_rk);
        const double e_flat = std::abs(rep.flat->at("rk") - report.true_rk);
        if (e_info < e_flat) ++report.informative_closer;
      }
    }
  }
  return report;
}

Bm12TransferReport run_prior_transfer_bm12(const ScenarioBM& s,
                                           int split_first_periods,
                                           int replications, int k,
                                           const SamplerConfig& cfg) {
  if (split_first_periods < 1 || split_first_periods >= s.periods) {
    throw Error("run_prior_transfer_bm12: split must leave periods on both sides");
  }
  Bm12TransferReport report;
  report.scenario = s;
  report.split_first_periods = split_first_periods;
  report.replications = replications;
  report.k = k;

  struct RepOut {
    double emp_part2 = 0.0;
    double emp_part2_pooled = 0.0;
    std::optional<std::map<std::string, double>> cells[6];
  };
  std::vector<RepOut> reps(replications);
  const char* labels[6] = {"part1-fixed-uninformative", "part1-re-uninformative",
                           "part2-fixed-uninformative", "part2-fixed-informative",
                           "part2-re-uninformative",    "part2-re-informative"};

  parallel_for(replications, [&](int r) {
    Rng data_rng(Rng::derive(s.seed, r));
    const BmData data = generate_bm(s, data_rng);
    const auto part1 = subset_by_groups(data.sample, 0, split_first_periods);
    const auto part2 =
        subset_by_groups(data.sample, split_first_periods, s.periods);
    reps[r].emp_part2 = period_mean_rk(part2, k);
    reps[r].emp_part2_pooled = empirical_return_level(part2, k);

    auto summary_row = [&](const FitResult& fit) {
      std::map<std::string, double> row;
      for (const auto& [name, ps] : fit.summary.params) {
        if (name.find("delta") == std::string::npos) row[name] = ps.mean;
      }
      row["rk"] = posterior_rk(fit, k);
      row["dic"] = fit.summary.dic;
      row["loglik"] = fit.summary.loglik_at_mean;
      return row;
    };
    auto sub_seed = [&](int slot) {
      SamplerConfig c = cfg;
      c.seed = Rng::derive(cfg.seed, static_cast<std::uint64_t>(r) * 16 + slot);
      return c;
    };

    auto fit_fixed1 = try_fit_gev(part1, REKind::None,
                                  default_priors(ModelKind::GevFixed), sub_seed(0));
    auto fit_re1 = try_fit_gev(part1, REKind::Location,
                               default_priors(ModelKind::GevLocation), sub_seed(1));
    if (fit_fixed1) reps[r].cells[0] = summary_row(*fit_fixed1);
    if (fit_re1) reps[r].cells[1] = summary_row(*fit_re1);

    if (auto fit = try_fit_gev(part2, REKind::None,
                               default_priors(ModelKind::GevFixed), sub_seed(2))) {
      reps[r].cells[2] = summary_row(*fit);
    }
    if (fit_fixed1) {
      PriorSpec informative = posterior_to_prior(fit_fixed1->chain);
      if (auto fit = try_fit_gev(part2, REKind::None, informative, sub_seed(3))) {
        reps[r].cells[3] = summary_row(*fit);
      }
    }
    if (auto fit = try_fit_gev(part2, REKind::Location,
                               default_priors(ModelKind::GevLocation), sub_seed(4))) {
      reps[r].cells[4] = summary_row(*fit);
    }
    if (fit_re1) {
      // tau2 comes through as an inverse-gamma entry; missing hyperpriors
      // fall back to the flat defaults.
      PriorSpec informative = default_priors(ModelKind::GevLocation);
      for (const auto& [name, prior] : posterior_to_prior(fit_re1->chain).entries) {
        informative.set(name, prior);
      }
      if (auto fit = try_fit_gev(part2, REKind::Location, informative, sub_seed(5))) {
        reps[r].cells[5] = summary_row(*fit);
      }
    }
  });

  std::vector<double> emp, emp_pooled;
  for (const auto& rep : reps) {
    emp.push_back(rep.emp_part2);
    emp_pooled.push_back(rep.emp_part2_pooled);
  }
  report.empirical_rk_part2 = rep_stat(emp);
  report.empirical_rk_part2_pooled = rep_stat(emp_pooled);

  for (int c = 0; c < 6; ++c) {
    TransferCell cell;
    cell.label = labels[c];
    Accumulator acc;
    for (const auto& rep : reps) {
      if (!rep.cells[c]) {
        ++cell.failed;
        continue;
      }
      for (const auto& [key, value] : *rep.cells[c]) acc.add(key, value);
    }
    for (const auto& [key, series] : acc.series) {
      if (key == "rk" || key == "dic" || key == "loglik") continue;
      cell.params[key] = rep_stat(series);
    }
    cell.rk = stat_of(acc, "rk");
    cell.dic = stat_of(acc, "dic");
    cell.loglik = stat_of(acc, "loglik");
    report.cells.push_back(std::move(cell));
  }
  const auto& info_re = report.cells[5];
  report.empirical_in_informative_re_ci =
      report.empirical_rk_part2.mean >= info_re.rk.lo &&
      report.empirical_rk_part2.mean <= info_re.rk.hi;
  return report;
}

PotStudyReport run_pot_study(const ScenarioPot& s, int replications, double p,
                             const SamplerConfig& cfg) {
  if (s.split_first < 1 || s.split_first >= s.years) {
    throw Error("run_pot_study: split must leave years on both sides");
  }
  PotStudyReport report;
  report.scenario = s;
  report.replications = replications;
  report.p = p;

  struct CellOut {
    std::map<std::string, double> params;
    double var = 0.0, es = 0.0;
    bool var_fb = false, es_fb = false;
  };
  struct RepOut {
    std::optional<VarEs> emp_last, emp_year1;
    std::optional<CellOut> cells[5];
  };
  const char* labels[5] = {"part1-uninformative", "last-informative",
                           "last-uninformative", "year1-informative",
                           "year1-uninformative"};
  std::vector<RepOut> reps(replications);

  parallel_for(replications, [&](int r) {
    Rng rng(Rng::derive(s.seed, r));
    const std::size_t per_year = static_cast<std::size_t>(s.obs_per_year);
    std::vector<double> all(static_cast<std::size_t>(s.years) * per_year);
    for (auto& v : all) v = rng.normal(s.mean, s.sd);

    const std::vector<double> part1(all.begin(),
                                    all.begin() + s.split_first * per_year);
    const std::vector<double> last(all.begin() + s.split_first * per_year,
                                   all.end());
    const std::vector<double> year1(all.begin() + s.split_first * per_year,
                                    all.begin() + (s.split_first + 1) * per_year);
    try {
      reps[r].emp_last = empirical_var_es(last, p);
    } catch (const Error&) {
    }
    try {
      reps[r].emp_year1 = empirical_var_es(year1, p);
    } catch (const Error&) {
    }

    auto risk_cell = [&](const FitResult& fit, const ExceedanceSample& ex) {
      CellOut cell;
      cell.params["xi"] = fit.summary.param("xi").mean;
      cell.params["sigma"] = fit.summary.param("sigma").mean;
      const std::size_t i_xi = fit.chain.index_of("xi");
      const std::size_t i_sg = fit.chain.index_of("sigma");
      const GpdParams at_mean(cell.params["xi"], cell.params["sigma"], ex.u);
      try {
        const auto d = posterior_transform(fit.chain, [&](const std::vector<double>& th) {
          return var_pot(GpdParams(th[i_xi], th[i_sg], ex.u), ex.n_total,
                         ex.n_exceed, p);
        });
        cell.var = d.stat.mean;
      } catch (const Error&) {
        cell.var = var_pot(at_mean, ex.n_total, ex.n_exceed, p);
        cell.var_fb = true;
      }
      try {
        const auto d = posterior_transform(fit.chain, [&](const std::vector<double>& th) {
          const GpdParams g(th[i_xi], th[i_sg], ex.u);
          return es_pot(var_pot(g, ex.n_total, ex.n_exceed, p), g);
        });
        cell.es = d.stat.mean;
      } catch (const Error&) {
        cell.es = es_pot(var_pot(at_mean, ex.n_total, ex.n_exceed, p), at_mean);
        cell.es_fb = true;
      }
      return cell;
    };
    auto sub_seed = [&](int slot) {
      SamplerConfig c = cfg;
      c.seed = Rng::derive(cfg.seed, static_cast<std::uint64_t>(r) * 16 + slot);
      return c;
    };

    ExceedanceSample ex1;
    try {
      ex1 = exceedances(part1, s.threshold);
    } catch (const Error&) {
      return;  // nothing exceeds in the training slice; whole rep failed
    }
    auto fit1 = try_fit_gpd(ex1, default_priors(ModelKind::GpdPot), sub_seed(0));
    if (!fit1) return;
    reps[r].cells[0] = risk_cell(*fit1, ex1);
    const PriorSpec informative = posterior_to_prior(fit1->chain);

    auto fit_slice = [&](const std::vector<double>& values, int info_slot,
                         int flat_slot, int cell_info, int cell_flat) {
      ExceedanceSample ex;
      try {
        ex = exceedances(values, s.threshold);
      } catch (const Error&) {
        return;  // empty exceedance set: slice recorded as failed
      }
      if (auto fit = try_fit_gpd(ex, informative, sub_seed(info_slot))) {
        reps[r].cells[cell_info] = risk_cell(*fit, ex);
      }
      if (auto fit = try_fit_gpd(ex, default_priors(ModelKind::GpdPot),
                                 sub_seed(flat_slot))) {
        reps[r].cells[cell_flat] = risk_cell(*fit, ex);
      }
    };
    fit_slice(last, 1, 2, 1, 2);
    fit_slice(year1, 3, 4, 3, 4);
  });

  {
    std::vector<double> v1, v2, v3, v4;
    for (const auto& rep : reps) {
      if (rep.emp_last) {
        v1.push_back(rep.emp_last->var);
        v2.push_back(rep.emp_last->es);
      }
      if (rep.emp_year1) {
        v3.push_back(rep.emp_year1->var);
        v4.push_back(rep.emp_year1->es);
      }
    }
    report.empirical_var_last = rep_stat(v1);
    report.empirical_es_last = rep_stat(v2);
    report.empirical_var_year1 = rep_stat(v3);
    report.empirical_es_year1 = rep_stat(v4);
  }

  for (int c = 0; c < 5; ++c) {
    PotCell cell;
    cell.label = labels[c];
    Accumulator acc;
    for (const auto& rep : reps) {
      if (!rep.cells[c]) {
        ++cell.failed;
        continue;
      }
      acc.add("xi", rep.cells[c]->params.at("xi"));
      acc.add("sigma", rep.cells[c]->params.at("sigma"));
      acc.add("var", rep.cells[c]->var);
      acc.add("es", rep.cells[c]->es);
      if (rep.cells[c]->var_fb) ++cell.var_fallback;
      if (rep.cells[c]->es_fb) ++cell.es_fallback;
    }
    cell.params["xi"] = stat_of(acc, "xi");
    cell.params["sigma"] = stat_of(acc, "sigma");
    cell.var_risk = stat_of(acc, "var");
    cell.es_risk = stat_of(acc, "es");
    report.cells.push_back(std::move(cell));
  }

  for (const auto& rep : reps) {
    if (rep.cells[3] && rep.cells[4] && rep.emp_year1) {
      const double e_info = std::abs(rep.cells[3]->var - rep.emp_year1->var);
      const double e_flat = std::abs(rep.cells[4]->var - rep.emp_year1->var);
      if (e_info < e_flat) ++report.informative_closer_var_year1;
    }
  }
  return report;
}

}  // namespace evbayes
