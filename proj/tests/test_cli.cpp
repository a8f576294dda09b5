#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "evbayes/evd.hpp"
#include "evbayes/io.hpp"

using namespace evbayes;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("evb_cli_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args) {
  const std::string cmd = std::string(EVB_CLI_PATH) + " " + args +
                          " >/dev/null 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

void write_daily_csv(const std::string& path, int years, std::uint64_t seed) {
  Rng rng(seed);
  std::string csv = "date,return\n";
  for (int y = 0; y < years; ++y) {
    for (int m = 1; m <= 12; ++m) {
      for (int d = 1; d <= 28; ++d) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d,", 1990 + y, m, d);
        csv += buf;
        csv += format_double(rng.normal(2.0, 1.0));
        csv += "\n";
      }
    }
  }
  write_text_file(path, csv);
}

}  // namespace

TEST_CASE("unknown flag exits nonzero") {
  CHECK(run("--definitely-not-a-flag") != 0);
  CHECK(run("fit gev --sample nope.json") != 0);  // missing --out
}

TEST_CASE("extract bm and pot on a generated csv") {
  TempDir tmp;
  const std::string csv = tmp.file("daily.csv");
  write_daily_csv(csv, 6, 404);

  CHECK(run("extract bm --input " + csv +
            " --value-col return --date-col date --block year --out " +
            tmp.file("bm")) == 0);
  const Json bm = Json::parse(read_text_file(tmp.file("bm/sample_bm.json")));
  CHECK(bm["kind"] == "block_maxima");
  CHECK(bm["maxima"].size() == 6);
  CHECK(bm["config"]["command"] == "extract bm");

  CHECK(run("extract pot --input " + csv +
            " --value-col return --date-col date --threshold 4 --out " +
            tmp.file("pot")) == 0);
  const Json pot = Json::parse(read_text_file(tmp.file("pot/sample_pot.json")));
  CHECK(pot["kind"] == "exceedances");
  CHECK(pot["threshold"] == 4.0);
  CHECK(pot["n_total"] == 6 * 12 * 28);

  // threshold above every observation is a clean failure
  CHECK(run("extract pot --input " + csv +
            " --value-col return --date-col date --threshold 50 --out " +
            tmp.file("pot2")) != 0);
}

TEST_CASE("fit gpd emits a reproducible chain and summary") {
  TempDir tmp;
  const std::string csv = tmp.file("daily.csv");
  write_daily_csv(csv, 10, 505);
  REQUIRE(run("extract pot --input " + csv +
              " --value-col return --date-col date --threshold 3.5 --out " +
              tmp.file("s")) == 0);
  const std::string fit_args = "fit gpd --sample " + tmp.file("s/sample_pot.json") +
                               " --burn-in 500 --draws 2000 --thin 5 --seed 9 "
                               "--out " +
                               tmp.file("f");
  REQUIRE(run(fit_args) == 0);
  const std::string chain1 = read_text_file(tmp.file("f/chain.csv"));
  const std::string summary1 = read_text_file(tmp.file("f/summary.json"));
  REQUIRE(run(fit_args) == 0);  // same config, same bytes
  CHECK(read_text_file(tmp.file("f/chain.csv")) == chain1);
  CHECK(read_text_file(tmp.file("f/summary.json")) == summary1);

  const auto chain = read_chain_csv(tmp.file("f/chain.csv"));
  CHECK(chain.chain.names == std::vector<std::string>{"xi", "sigma"});
  CHECK(chain.chain.draws.size() == 400);

  // risk var/es on the fitted chain
  REQUIRE(run("risk var --chain " + tmp.file("f/chain.csv") + " --sample " +
              tmp.file("s/sample_pot.json") + " --p 0.05 --out " +
              tmp.file("r")) == 0);
  const Json var = Json::parse(read_text_file(tmp.file("r/var.json")));
  CHECK(var["var"]["mean"].get<double>() > 2.0);
  REQUIRE(run("risk es --chain " + tmp.file("f/chain.csv") + " --sample " +
              tmp.file("s/sample_pot.json") + " --p 0.05 --out " +
              tmp.file("r")) == 0);
  const Json es = Json::parse(read_text_file(tmp.file("r/es.json")));
  CHECK(es["es"]["mean"].get<double>() >= var["var"]["mean"].get<double>());
}

TEST_CASE("report quantile plot hugs the diagonal on perfect-fit data") {
  // 200 draws from a known GEV, one per calendar year, so the yearly maxima
  // are the draws themselves; after fitting, model quantiles should track
  // the empirical ones up to sampling noise.
  TempDir tmp;
  Rng rng(606);
  const GevParams truth(0.1, 3.0, 1.0);
  std::string csv = "date,m\n";
  for (int y = 0; y < 200; ++y) {
    csv += std::to_string(1800 + y) + "-06-01," +
           format_double(gev_quantile(truth, rng.uniform01())) + "\n";
  }
  write_text_file(tmp.file("maxima.csv"), csv);
  REQUIRE(run("extract bm --input " + tmp.file("maxima.csv") +
              " --value-col m --date-col date --block year --out " +
              tmp.file("s")) == 0);
  REQUIRE(run("fit gev --sample " + tmp.file("s/sample_bm.json") +
              " --re none --burn-in 1000 --draws 4000 --thin 5 --seed 3 "
              "--out " +
              tmp.file("f")) == 0);
  REQUIRE(run("report --chain " + tmp.file("f/chain.csv") + " --sample " +
              tmp.file("s/sample_bm.json") + " --out " + tmp.file("r")) == 0);

  std::istringstream qq(read_text_file(tmp.file("r/qq.csv")));
  std::string line;
  std::getline(qq, line);  // config comment
  std::getline(qq, line);  // header
  std::vector<double> emp, model;
  while (std::getline(qq, line)) {
    const auto c1 = line.find(','), c2 = line.rfind(',');
    emp.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
    model.push_back(std::stod(line.substr(c2 + 1)));
  }
  REQUIRE(emp.size() == 200);
  double se = 0.0, sm = 0.0, sem = 0.0, smm = 0.0, see = 0.0;
  for (std::size_t i = 0; i < emp.size(); ++i) {
    se += emp[i];
    sm += model[i];
    sem += emp[i] * model[i];
    smm += model[i] * model[i];
    see += emp[i] * emp[i];
  }
  const double n = static_cast<double>(emp.size());
  const double slope = (sem - se * sm / n) / (smm - sm * sm / n);
  const double corr = (sem - se * sm / n) /
                      std::sqrt((smm - sm * sm / n) * (see - se * se / n));
  CHECK(slope > 0.85);
  CHECK(slope < 1.15);
  CHECK(corr > 0.98);
  // bulk of the points near the diagonal (tails are noisier)
  double max_mid_gap = 0.0;
  for (std::size_t i = 20; i < 180; ++i) {
    max_mid_gap = std::max(max_mid_gap, std::abs(emp[i] - model[i]));
  }
  CHECK(max_mid_gap < 0.5);
}

TEST_CASE("joint modeling: label column groups indexes for a random-effects fit") {
  TempDir tmp;
  Rng rng(7788);
  std::string csv = "date,ret,index\n";
  for (int y = 0; y < 12; ++y) {
    for (int m = 1; m <= 12; ++m) {
      for (int d = 1; d <= 14; ++d) {
        char date[32];
        std::snprintf(date, sizeof(date), "%04d-%02d-%02d", 1990 + y, m, d);
        csv += std::string(date) + "," + format_double(rng.normal(2.0, 1.0)) + ",SP\n";
        csv += std::string(date) + "," + format_double(rng.normal(2.6, 1.2)) + ",FTSE\n";
      }
    }
  }
  write_text_file(tmp.file("two.csv"), csv);
  REQUIRE(run("extract bm --input " + tmp.file("two.csv") +
              " --value-col ret --date-col date --group-col index "
              "--group-by col --block year --out " +
              tmp.file("s")) == 0);
  const Json sample = Json::parse(read_text_file(tmp.file("s/sample_bm.json")));
  CHECK(sample["group_labels"].size() == 2);
  CHECK(sample["maxima"].size() == 24);  // 12 yearly maxima per index

  REQUIRE(run("fit gev --sample " + tmp.file("s/sample_bm.json") +
              " --re location --burn-in 1000 --draws 3000 --thin 5 --seed 5 "
              "--out " +
              tmp.file("f")) == 0);
  const Json summary = Json::parse(read_text_file(tmp.file("f/summary.json")));
  CHECK(summary["model"] == "gev-location");
  CHECK(summary["params"].contains("tau2"));
  CHECK(summary["params"].contains("delta[1]"));

  REQUIRE(run("risk rl --chain " + tmp.file("f/chain.csv") + " --k 10 --out " +
              tmp.file("r")) == 0);
  const Json rl = Json::parse(read_text_file(tmp.file("r/rl.json")));
  CHECK(rl["hpd_lo"].get<double>() < rl["hpd_hi"].get<double>());
}

TEST_CASE("simulate honors the seed override deterministically") {
  TempDir tmp;
  const std::string scenario = std::string(EVB_DATA_DIR) + "/scenario_smoke.json";
  REQUIRE(run("simulate " + scenario + " --seed 5 --out " + tmp.file("a")) == 0);
  REQUIRE(run("simulate " + scenario + " --seed 5 --out " + tmp.file("b")) == 0);
  REQUIRE(run("simulate " + scenario + " --seed 6 --out " + tmp.file("c")) == 0);
  const std::string a = read_text_file(tmp.file("a/report.json"));
  CHECK(a == read_text_file(tmp.file("b/report.json")));
  CHECK(a != read_text_file(tmp.file("c/report.json")));
}

TEST_CASE("failures produce machine-readable error JSON on stderr") {
  TempDir tmp;
  const std::string cmd = std::string(EVB_CLI_PATH) +
                          " fit gev --sample /nonexistent.json --out " +
                          tmp.file("x") + " 2>" + tmp.file("err.txt") +
                          " >/dev/null";
  const int rc = std::system(cmd.c_str());
  CHECK(WIFEXITED(rc));
  CHECK(WEXITSTATUS(rc) != 0);
  const Json err = Json::parse(read_text_file(tmp.file("err.txt")));
  CHECK(err.contains("error"));
}
