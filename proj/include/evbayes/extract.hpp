#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "evbayes/common.hpp"
#include "evbayes/rng.hpp"

namespace evbayes {

struct Date {
  int year = 0;
  int month = 1;
  int day = 1;
  auto operator<=>(const Date&) const = default;
};

Date parse_date(const std::string& iso);  // "YYYY-MM-DD"
std::string format_date(const Date& d);

struct TimePoint {
  Date date;
  double value = 0.0;
  std::string group;  // optional label (e.g. index name); empty for none
};

// Raw observations, date-sorted; timestamps strictly increasing within each
// group label.
struct TimeSeries {
  std::string name;
  std::vector<TimePoint> points;
};

struct BlockSpec {
  enum class Kind { CalendarYear, FixedCount };
  Kind kind = Kind::CalendarYear;
  int length = 1;  // FixedCount only
  std::string to_string() const;
};

// How blocks are grouped for random-effects models: a single group, runs of
// M consecutive blocks per label ("periods"), or one group per series label.
struct GroupSpec {
  enum class Kind { None, EveryNBlocks, PerLabel };
  Kind kind = Kind::None;
  int every = 1;  // EveryNBlocks only
  std::string to_string() const;
};

struct BlockMax {
  double value = 0.0;
  std::string block_id;
  int group = 0;
};

// One maximum per nonempty block, with group ids partitioning the blocks.
struct ExtremesSample {
  std::vector<BlockMax> maxima;
  std::vector<std::string> group_labels;
  std::string block_spec;
  int sign = 1;  // -1 means minima were analyzed as negated maxima

  std::size_t group_count() const { return group_labels.size(); }
  std::vector<double> values() const;
  std::vector<std::vector<double>> grouped() const;  // values per group id
};

// Threshold excesses y = x - u for all x > u, in series order.
struct ExceedanceSample {
  std::vector<double> excesses;
  double u = 0.0;
  std::size_t n_total = 0;
  std::size_t n_exceed = 0;
};

// Max of sign*value per block; blocks with no observations simply do not
// appear. Minima are analyzed by sign = -1 (the distribution of negated
// minima matches that of maxima).
ExtremesSample block_maxima(const TimeSeries& series, const BlockSpec& block,
                            const GroupSpec& group, int sign = 1);

ExceedanceSample exceedances(const TimeSeries& series, double threshold);
ExceedanceSample exceedances(const std::vector<double>& values,
                             double threshold);

// Type-7 quantile (linear interpolation between order statistics); q in [0,1].
double empirical_quantile(std::vector<double> values, double q);

// Empirical (1 - 1/k) quantile of the block maxima.
double empirical_return_level(const ExtremesSample& sample, int k);

// Percentile bootstrap interval for the empirical return level.
std::pair<double, double> empirical_return_level_ci(
    const ExtremesSample& sample, int k, int n_boot, Rng& rng,
    double level = 0.95);

struct VarEs {
  double var = 0.0;
  double es = 0.0;
};

// var = empirical (1-p) quantile; es = mean of observations strictly above
// var. Throws when nothing exceeds var (degenerate data).
VarEs empirical_var_es(const std::vector<double>& values, double p);
VarEs empirical_var_es(const TimeSeries& series, double p);

}  // namespace evbayes
