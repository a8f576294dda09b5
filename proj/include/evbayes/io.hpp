#pragma once

#include <string>

#include "json.hpp"

#include "evbayes/extract.hpp"
#include "evbayes/sampler.hpp"
#include "evbayes/simlab.hpp"

namespace evbayes {

using Json = nlohmann::json;

// CSV with a header row; dates are ISO-8601. Ingest errors carry the
// offending line number. The optional group column labels points for joint
// (multi-series) modeling.
TimeSeries ingest_csv(const std::string& path, const std::string& value_col,
                      const std::string& date_col,
                      const std::string& group_col = "");

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

Json sample_to_json(const ExtremesSample& sample, const Json& config);
Json sample_to_json(const ExceedanceSample& sample, const Json& config);
ExtremesSample extremes_from_json(const Json& j);
ExceedanceSample exceedance_from_json(const Json& j);

Json prior_to_json(const PriorSpec& spec);
PriorSpec prior_from_json(const Json& j);

Json sampler_config_to_json(const SamplerConfig& cfg);
SamplerConfig sampler_config_from_json(const Json& j);

Json summary_to_json(const PosteriorSummary& summary, ModelKind kind,
                     const Json& config);

// Chain CSV: a `# {config json}` comment line, a header of parameter names,
// then one retained draw per row (%.17g, so values round-trip exactly).
void write_chain_csv(const std::string& path, const Chain& chain,
                     const Json& config);
struct ChainFile {
  Chain chain;
  Json config;
};
ChainFile read_chain_csv(const std::string& path);

// Scenario file for the `simulate` command.
struct SimulateSpec {
  std::string kind;  // bm-study | tau-sweep | gev-transfer | bm12-transfer | pot-study
  ScenarioBM bm;
  ScenarioGevDirect gev;
  ScenarioPot pot;
  std::vector<REKind> models = {REKind::None, REKind::Location};
  std::vector<double> taus = {0.0, 1.0, 2.0, 4.0};
  int replications = 5;
  int k = 10;
  double p = 0.05;
  int split_first_periods = 9;
  SamplerConfig sampler;
};
SimulateSpec simulate_spec_from_json(const Json& j);
Json simulate_spec_to_json(const SimulateSpec& spec);

Json rep_stat_to_json(const RepStat& s);
Json bm_report_to_json(const BmStudyReport& report);
Json tau_sweep_to_json(const std::vector<TauSweepRow>& rows);
Json gev_transfer_to_json(const GevTransferReport& report);
Json bm12_transfer_to_json(const Bm12TransferReport& report);
Json pot_report_to_json(const PotStudyReport& report);

// Table CSVs mirroring the study layouts (model, parameter, mean, sd, ci).
std::string bm_report_to_csv(const BmStudyReport& report);
std::string tau_sweep_to_csv(const std::vector<TauSweepRow>& rows);

std::string format_double(double v);  // %.17g

}  // namespace evbayes
