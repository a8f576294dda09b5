#include "evbayes/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace evbayes {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error("CSV line " + std::to_string(line_no) + ": bad numeric value '" +
                s + "'");
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw Error("failed writing '" + path + "'");
}

TimeSeries ingest_csv(const std::string& path, const std::string& value_col,
                      const std::string& date_col,
                      const std::string& group_col) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  std::string line;
  if (!std::getline(in, line)) throw Error("'" + path + "' is empty");
  const auto header = split_csv_line(line);
  auto col_index = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (trim(header[i]) == name) return i;
    }
    throw Error("'" + path + "': no column named '" + name + "'");
  };
  const std::size_t vi = col_index(value_col);
  const std::size_t di = col_index(date_col);
  const bool grouped = !group_col.empty();
  const std::size_t gi = grouped ? col_index(group_col) : 0;

  TimeSeries series;
  series.name = path;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw Error("CSV line " + std::to_string(line_no) + ": expected " +
                  std::to_string(header.size()) + " fields, got " +
                  std::to_string(fields.size()));
    }
    TimePoint pt;
    try {
      pt.date = parse_date(trim(fields[di]));
    } catch (const Error& e) {
      throw Error("CSV line " + std::to_string(line_no) + ": " + e.what());
    }
    pt.value = parse_double(trim(fields[vi]), line_no);
    if (grouped) pt.group = trim(fields[gi]);
    series.points.push_back(std::move(pt));
  }
  if (series.points.empty()) throw Error("'" + path + "' has no data rows");

  std::stable_sort(series.points.begin(), series.points.end(),
                   [](const TimePoint& a, const TimePoint& b) {
                     return a.date < b.date;
                   });
  std::map<std::string, Date> last_seen;
  for (const auto& pt : series.points) {
    auto it = last_seen.find(pt.group);
    if (it != last_seen.end() && !(it->second < pt.date)) {
      throw Error("duplicate timestamp " + format_date(pt.date) +
                  (pt.group.empty() ? "" : " in group '" + pt.group + "'"));
    }
    last_seen[pt.group] = pt.date;
  }
  return series;
}

Json sample_to_json(const ExtremesSample& sample, const Json& config) {
  Json j;
  j["kind"] = "block_maxima";
  j["block_spec"] = sample.block_spec;
  j["sign"] = sample.sign;
  j["group_labels"] = sample.group_labels;
  Json arr = Json::array();
  for (const auto& m : sample.maxima) {
    arr.push_back({{"value", m.value}, {"block", m.block_id}, {"group", m.group}});
  }
  j["maxima"] = arr;
  j["config"] = config;
  return j;
}

Json sample_to_json(const ExceedanceSample& sample, const Json& config) {
  Json j;
  j["kind"] = "exceedances";
  j["threshold"] = sample.u;
  j["n_total"] = sample.n_total;
  j["n_exceed"] = sample.n_exceed;
  j["excesses"] = sample.excesses;
  j["config"] = config;
  return j;
}

ExtremesSample extremes_from_json(const Json& j) {
  if (j.value("kind", "") != "block_maxima") {
    throw Error("sample file is not a block-maxima sample");
  }
  ExtremesSample out;
  out.block_spec = j.value("block_spec", "");
  out.sign = j.value("sign", 1);
  out.group_labels = j.at("group_labels").get<std::vector<std::string>>();
  for (const auto& m : j.at("maxima")) {
    out.maxima.push_back(BlockMax{m.at("value").get<double>(),
                                  m.at("block").get<std::string>(),
                                  m.at("group").get<int>()});
  }
  return out;
}

ExceedanceSample exceedance_from_json(const Json& j) {
  if (j.value("kind", "") != "exceedances") {
    throw Error("sample file is not an exceedance sample");
  }
  ExceedanceSample out;
  out.u = j.at("threshold").get<double>();
  out.n_total = j.at("n_total").get<std::size_t>();
  out.n_exceed = j.at("n_exceed").get<std::size_t>();
  out.excesses = j.at("excesses").get<std::vector<double>>();
  if (out.excesses.size() != out.n_exceed) {
    throw Error("exceedance sample: n_exceed does not match excesses");
  }
  return out;
}

Json prior_to_json(const PriorSpec& spec) {
  Json j;
  for (const auto& [name, p] : spec.entries) {
    Json e;
    e["family"] = to_string(p.family);
    switch (p.family) {
      case Prior::Family::Uniform:
        e["a"] = p.a;
        e["b"] = p.b;
        break;
      case Prior::Family::Normal:
        e["mean"] = p.a;
        e["sd"] = p.b;
        break;
      case Prior::Family::Gamma:
      case Prior::Family::InverseGamma:
        e["shape"] = p.a;
        e["scale"] = p.b;
        break;
    }
    j[name] = e;
  }
  return j;
}

PriorSpec prior_from_json(const Json& j) {
  PriorSpec spec;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() == "config") continue;
    const Json& e = it.value();
    const auto family = prior_family_from_string(e.at("family").get<std::string>());
    switch (family) {
      case Prior::Family::Uniform:
        spec.set(it.key(), Prior::uniform(e.at("a").get<double>(),
                                          e.at("b").get<double>()));
        break;
      case Prior::Family::Normal:
        spec.set(it.key(), Prior::normal(e.at("mean").get<double>(),
                                         e.at("sd").get<double>()));
        break;
      case Prior::Family::Gamma:
        spec.set(it.key(), Prior::gamma(e.at("shape").get<double>(),
                                        e.at("scale").get<double>()));
        break;
      case Prior::Family::InverseGamma:
        spec.set(it.key(), Prior::inverse_gamma(e.at("shape").get<double>(),
                                                e.at("scale").get<double>()));
        break;
    }
  }
  return spec;
}

Json sampler_config_to_json(const SamplerConfig& cfg) {
  Json j;
  j["burn_in"] = cfg.burn_in;
  j["n_draws"] = cfg.n_draws;
  j["thin"] = cfg.thin;
  j["seed"] = cfg.seed;
  j["adapt"] = cfg.adapt;
  j["quad_order"] = cfg.quad_order;
  j["marginal_dic"] = cfg.marginal_dic;
  return j;
}

SamplerConfig sampler_config_from_json(const Json& j) {
  SamplerConfig cfg;
  cfg.burn_in = j.value("burn_in", cfg.burn_in);
  cfg.n_draws = j.value("n_draws", cfg.n_draws);
  cfg.thin = j.value("thin", cfg.thin);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.adapt = j.value("adapt", cfg.adapt);
  cfg.quad_order = j.value("quad_order", cfg.quad_order);
  cfg.marginal_dic = j.value("marginal_dic", cfg.marginal_dic);
  return cfg;
}

Json summary_to_json(const PosteriorSummary& summary, ModelKind kind,
                     const Json& config) {
  Json params;
  for (const auto& [name, s] : summary.params) {
    params[name] = {{"mean", s.mean},
                    {"sd", s.sd},
                    {"hpd_lo", s.hpd_lo},
                    {"hpd_hi", s.hpd_hi}};
  }
  Json j;
  j["model"] = to_string(kind);
  j["params"] = params;
  j["dic"] = summary.dic;
  j["pd"] = summary.pd;
  j["loglik_at_mean"] = summary.loglik_at_mean;
  j["dic_excluded"] = summary.dic_excluded;
  j["config"] = config;
  return j;
}

void write_chain_csv(const std::string& path, const Chain& chain,
                     const Json& config) {
  std::ostringstream out;
  out << "# " << config.dump() << "\n";
  for (std::size_t j = 0; j < chain.names.size(); ++j) {
    out << (j ? "," : "") << chain.names[j];
  }
  out << "\n";
  for (const auto& row : chain.draws) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      out << (j ? "," : "") << format_double(row[j]);
    }
    out << "\n";
  }
  write_text_file(path, out.str());
}

ChainFile read_chain_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  ChainFile out;
  if (!std::getline(in, line)) throw Error("'" + path + "': empty chain file");
  if (line.rfind("# ", 0) == 0) {
    out.config = Json::parse(line.substr(2), nullptr, false);
    if (out.config.is_discarded()) out.config = Json::object();
    if (!std::getline(in, line)) throw Error("'" + path + "': missing header");
  }
  for (auto& name : split_csv_line(line)) out.chain.names.push_back(trim(name));
  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != out.chain.names.size()) {
      throw Error("'" + path + "' line " + std::to_string(line_no) +
                  ": wrong field count");
    }
    std::vector<double> row(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      row[j] = parse_double(fields[j], line_no);
    }
    out.chain.draws.push_back(std::move(row));
  }
  if (out.chain.draws.empty()) throw Error("'" + path + "': no draws");
  out.chain.seed = out.config.is_object() && out.config.contains("sampler")
                       ? out.config["sampler"].value("seed", std::uint64_t{0})
                       : 0;
  return out;
}

SimulateSpec simulate_spec_from_json(const Json& j) {
  SimulateSpec spec;
  spec.kind = j.at("kind").get<std::string>();
  spec.replications = j.value("replications", spec.replications);
  spec.k = j.value("k", spec.k);
  spec.p = j.value("p", spec.p);
  spec.split_first_periods = j.value("split_first_periods", spec.split_first_periods);
  if (j.contains("sampler")) spec.sampler = sampler_config_from_json(j["sampler"]);
  if (j.contains("models")) {
    spec.models.clear();
    for (const auto& m : j["models"]) {
      spec.models.push_back(re_kind_from_string(m.get<std::string>()));
    }
  }
  if (j.contains("taus")) spec.taus = j["taus"].get<std::vector<double>>();
  if (j.contains("bm")) {
    const Json& b = j["bm"];
    spec.bm.periods = b.value("periods", spec.bm.periods);
    spec.bm.years_per_period = b.value("years_per_period", spec.bm.years_per_period);
    spec.bm.obs_per_year = b.value("obs_per_year", spec.bm.obs_per_year);
    spec.bm.base_mean = b.value("base_mean", spec.bm.base_mean);
    spec.bm.base_sd = b.value("base_sd", spec.bm.base_sd);
    spec.bm.tau = b.value("tau", spec.bm.tau);
    spec.bm.seed = b.value("seed", spec.bm.seed);
  }
  if (j.contains("gev")) {
    const Json& g = j["gev"];
    spec.gev.n = g.value("n", spec.gev.n);
    spec.gev.xi = g.value("xi", spec.gev.xi);
    spec.gev.mu = g.value("mu", spec.gev.mu);
    spec.gev.sigma = g.value("sigma", spec.gev.sigma);
    spec.gev.split_first = g.value("split_first", spec.gev.split_first);
    spec.gev.seed = g.value("seed", spec.gev.seed);
  }
  if (j.contains("pot")) {
    const Json& p = j["pot"];
    spec.pot.years = p.value("years", spec.pot.years);
    spec.pot.obs_per_year = p.value("obs_per_year", spec.pot.obs_per_year);
    spec.pot.mean = p.value("mean", spec.pot.mean);
    spec.pot.sd = p.value("sd", spec.pot.sd);
    spec.pot.threshold = p.value("threshold", spec.pot.threshold);
    spec.pot.split_first = p.value("split_first", spec.pot.split_first);
    spec.pot.seed = p.value("seed", spec.pot.seed);
  }
  return spec;
}

Json simulate_spec_to_json(const SimulateSpec& spec) {
  Json j;
  j["kind"] = spec.kind;
  j["replications"] = spec.replications;
  j["k"] = spec.k;
  j["p"] = spec.p;
  j["split_first_periods"] = spec.split_first_periods;
  j["sampler"] = sampler_config_to_json(spec.sampler);
  Json models = Json::array();
  for (auto m : spec.models) models.push_back(to_string(m));
  j["models"] = models;
  j["taus"] = spec.taus;
  j["bm"] = {{"periods", spec.bm.periods},
             {"years_per_period", spec.bm.years_per_period},
             {"obs_per_year", spec.bm.obs_per_year},
             {"base_mean", spec.bm.base_mean},
             {"base_sd", spec.bm.base_sd},
             {"tau", spec.bm.tau},
             {"seed", spec.bm.seed}};
  j["gev"] = {{"n", spec.gev.n},       {"xi", spec.gev.xi},
              {"mu", spec.gev.mu},     {"sigma", spec.gev.sigma},
              {"split_first", spec.gev.split_first}, {"seed", spec.gev.seed}};
  j["pot"] = {{"years", spec.pot.years},
              {"obs_per_year", spec.pot.obs_per_year},
              {"mean", spec.pot.mean},
              {"sd", spec.pot.sd},
              {"threshold", spec.pot.threshold},
              {"split_first", spec.pot.split_first},
              {"seed", spec.pot.seed}};
  return j;
}

Json rep_stat_to_json(const RepStat& s) {
  return Json{{"mean", s.mean}, {"sd", s.sd}, {"lo", s.lo}, {"hi", s.hi}};
}

namespace {

Json params_to_json(const std::map<std::string, RepStat>& params) {
  Json j;
  for (const auto& [name, s] : params) j[name] = rep_stat_to_json(s);
  return j;
}

}  // namespace

Json bm_report_to_json(const BmStudyReport& report) {
  Json j;
  j["replications"] = report.replications;
  j["k"] = report.k;
  j["empirical_rk_period_mean"] = rep_stat_to_json(report.empirical_rk_period_mean);
  j["empirical_rk_pooled"] = rep_stat_to_json(report.empirical_rk_pooled);
  Json per_period = Json::array();
  for (const auto& s : report.per_period_rk) per_period.push_back(rep_stat_to_json(s));
  j["per_period_rk"] = per_period;
  Json models = Json::array();
  for (const auto& m : report.models) {
    Json mj;
    mj["model"] = to_string(m.kind);
    mj["params"] = params_to_json(m.params);
    mj["rk"] = rep_stat_to_json(m.rk);
    mj["dic"] = rep_stat_to_json(m.dic);
    mj["loglik"] = rep_stat_to_json(m.loglik);
    mj["failed"] = m.failed;
    models.push_back(mj);
  }
  j["models"] = models;
  return j;
}

Json tau_sweep_to_json(const std::vector<TauSweepRow>& rows) {
  Json arr = Json::array();
  for (const auto& r : rows) {
    arr.push_back({{"tau", r.tau},
                   {"empirical", rep_stat_to_json(r.empirical)},
                   {"fixed_rk", rep_stat_to_json(r.fixed_rk)},
                   {"re_rk", rep_stat_to_json(r.re_rk)}});
  }
  return Json{{"rows", arr}};
}

namespace {

Json cells_to_json(const std::vector<TransferCell>& cells) {
  Json arr = Json::array();
  for (const auto& c : cells) {
    arr.push_back({{"label", c.label},
                   {"params", params_to_json(c.params)},
                   {"rk", rep_stat_to_json(c.rk)},
                   {"dic", rep_stat_to_json(c.dic)},
                   {"loglik", rep_stat_to_json(c.loglik)},
                   {"failed", c.failed}});
  }
  return arr;
}

}  // namespace

Json gev_transfer_to_json(const GevTransferReport& report) {
  Json j;
  j["replications"] = report.replications;
  j["k"] = report.k;
  j["true_rk"] = report.true_rk;
  j["cells"] = cells_to_json(report.cells);
  j["informative_closer"] = report.informative_closer;
  j["part2_skipped"] = report.part2_skipped;
  return j;
}

Json bm12_transfer_to_json(const Bm12TransferReport& report) {
  Json j;
  j["replications"] = report.replications;
  j["k"] = report.k;
  j["split_first_periods"] = report.split_first_periods;
  j["cells"] = cells_to_json(report.cells);
  j["empirical_rk_part2"] = rep_stat_to_json(report.empirical_rk_part2);
  j["empirical_rk_part2_pooled"] = rep_stat_to_json(report.empirical_rk_part2_pooled);
  j["empirical_in_informative_re_ci"] = report.empirical_in_informative_re_ci;
  return j;
}

Json pot_report_to_json(const PotStudyReport& report) {
  Json j;
  j["replications"] = report.replications;
  j["p"] = report.p;
  Json cells = Json::array();
  for (const auto& c : report.cells) {
    cells.push_back({{"label", c.label},
                     {"params", params_to_json(c.params)},
                     {"var", rep_stat_to_json(c.var_risk)},
                     {"es", rep_stat_to_json(c.es_risk)},
                     {"var_fallback", c.var_fallback},
                     {"es_fallback", c.es_fallback},
                     {"failed", c.failed}});
  }
  j["cells"] = cells;
  j["empirical"] = {{"var_last", rep_stat_to_json(report.empirical_var_last)},
                    {"es_last", rep_stat_to_json(report.empirical_es_last)},
                    {"var_year1", rep_stat_to_json(report.empirical_var_year1)},
                    {"es_year1", rep_stat_to_json(report.empirical_es_year1)}};
  j["informative_closer_var_year1"] = report.informative_closer_var_year1;
  return j;
}

namespace {

void csv_stat_row(std::ostringstream& out, const std::string& a,
                  const std::string& b, const RepStat& s) {
  out << a << "," << b << "," << format_double(s.mean) << ","
      << format_double(s.sd) << "," << format_double(s.lo) << ","
      << format_double(s.hi) << "\n";
}

}  // namespace

std::string bm_report_to_csv(const BmStudyReport& report) {
  std::ostringstream out;
  out << "model,quantity,mean,sd,ci_lo,ci_hi\n";
  csv_stat_row(out, "empirical", "rk_period_mean", report.empirical_rk_period_mean);
  csv_stat_row(out, "empirical", "rk_pooled", report.empirical_rk_pooled);
  for (std::size_t p = 0; p < report.per_period_rk.size(); ++p) {
    csv_stat_row(out, "empirical", "rk_period" + std::to_string(p),
                 report.per_period_rk[p]);
  }
  for (const auto& m : report.models) {
    const std::string name = to_string(m.kind);
    for (const auto& [param, s] : m.params) csv_stat_row(out, name, param, s);
    csv_stat_row(out, name, "rk", m.rk);
    csv_stat_row(out, name, "dic", m.dic);
    csv_stat_row(out, name, "loglik", m.loglik);
  }
  return out.str();
}

std::string tau_sweep_to_csv(const std::vector<TauSweepRow>& rows) {
  std::ostringstream out;
  out << "tau,emp_lo,emp_hi,fixed_lo,fixed_hi,re_lo,re_hi\n";
  for (const auto& r : rows) {
    out << format_double(r.tau) << "," << format_double(r.empirical.lo) << ","
        << format_double(r.empirical.hi) << "," << format_double(r.fixed_rk.lo)
        << "," << format_double(r.fixed_rk.hi) << ","
        << format_double(r.re_rk.lo) << "," << format_double(r.re_rk.hi)
        << "\n";
  }
  return out.str();
}

}  // namespace evbayes
