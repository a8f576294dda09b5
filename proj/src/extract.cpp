#include "evbayes/extract.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

namespace evbayes {

Date parse_date(const std::string& iso) {
  int y = 0, m = 0, d = 0;
  char tail = '\0';
  if (std::sscanf(iso.c_str(), "%d-%d-%d%c", &y, &m, &d, &tail) != 3 ||
      iso.size() != 10 || iso[4] != '-' || iso[7] != '-') {
    throw Error("invalid date '" + iso + "' (expected YYYY-MM-DD)");
  }
  if (m < 1 || m > 12 || d < 1 || d > 31) {
    throw Error("invalid date '" + iso + "' (month/day out of range)");
  }
  return Date{y, m, d};
}

std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

std::string BlockSpec::to_string() const {
  if (kind == Kind::CalendarYear) return "year";
  return "n:" + std::to_string(length);
}

std::string GroupSpec::to_string() const {
  switch (kind) {
    case Kind::None:
      return "none";
    case Kind::EveryNBlocks:
      return "every:" + std::to_string(every);
    case Kind::PerLabel:
      return "label";
  }
  return "none";
}

std::vector<double> ExtremesSample::values() const {
  std::vector<double> out;
  out.reserve(maxima.size());
  for (const auto& m : maxima) out.push_back(m.value);
  return out;
}

std::vector<std::vector<double>> ExtremesSample::grouped() const {
  std::vector<std::vector<double>> out(group_labels.size());
  for (const auto& m : maxima) {
    if (m.group < 0 || m.group >= static_cast<int>(out.size())) {
      throw Error("ExtremesSample: group id out of range");
    }
    out[m.group].push_back(m.value);
  }
  return out;
}

namespace {

// Blocks of one label, chronological: (block id suffix, values...).
struct LabelBlocks {
  std::string label;
  std::vector<std::pair<std::string, double>> block_max;  // id, max(sign*v)
};

}  // namespace

ExtremesSample block_maxima(const TimeSeries& series, const BlockSpec& block,
                            const GroupSpec& group, int sign) {
  if (series.points.empty()) throw Error("block_maxima: empty series");
  if (sign != 1 && sign != -1) throw Error("block_maxima: sign must be +1/-1");
  if (block.kind == BlockSpec::Kind::FixedCount && block.length < 1) {
    throw Error("block_maxima: block length must be >= 1");
  }

  // Split by label, preserving first-appearance order of labels and the
  // chronological order of points within a label.
  std::vector<std::string> labels;
  std::map<std::string, std::vector<const TimePoint*>> by_label;
  for (const auto& pt : series.points) {
    auto [it, fresh] = by_label.try_emplace(pt.group);
    if (fresh) labels.push_back(pt.group);
    it->second.push_back(&pt);
  }
  for (auto& [label, pts] : by_label) {
    std::stable_sort(pts.begin(), pts.end(),
                     [](const TimePoint* a, const TimePoint* b) {
                       return a->date < b->date;
                     });
  }

  const bool multi = labels.size() > 1 || !labels.front().empty();
  std::vector<LabelBlocks> all;
  for (const auto& label : labels) {
    const auto& pts = by_label[label];
    LabelBlocks lb;
    lb.label = label;
    if (block.kind == BlockSpec::Kind::CalendarYear) {
      int cur_year = pts.front()->date.year;
      double cur_max = kNegInf;
      auto flush = [&]() {
        lb.block_max.emplace_back(std::to_string(cur_year), cur_max);
      };
      for (const TimePoint* pt : pts) {
        if (pt->date.year != cur_year) {
          flush();
          cur_year = pt->date.year;
          cur_max = kNegInf;
        }
        cur_max = std::max(cur_max, sign * pt->value);
      }
      flush();
    } else {
      for (std::size_t start = 0; start < pts.size();
           start += static_cast<std::size_t>(block.length)) {
        const std::size_t stop =
            std::min(pts.size(), start + static_cast<std::size_t>(block.length));
        double mx = kNegInf;
        for (std::size_t i = start; i < stop; ++i) {
          mx = std::max(mx, sign * pts[i]->value);
        }
        lb.block_max.emplace_back(
            "b" + std::to_string(start / block.length), mx);
      }
    }
    all.push_back(std::move(lb));
  }

  ExtremesSample out;
  out.block_spec = block.to_string();
  out.sign = sign;

  auto group_id = [&](const std::string& label) -> int {
    for (std::size_t i = 0; i < out.group_labels.size(); ++i) {
      if (out.group_labels[i] == label) return static_cast<int>(i);
    }
    out.group_labels.push_back(label);
    return static_cast<int>(out.group_labels.size()) - 1;
  };

  for (const auto& lb : all) {
    const std::string prefix = multi && !lb.label.empty() ? lb.label + ":" : "";
    for (std::size_t b = 0; b < lb.block_max.size(); ++b) {
      std::string glabel;
      switch (group.kind) {
        case GroupSpec::Kind::None:
          glabel = "all";
          break;
        case GroupSpec::Kind::PerLabel:
          glabel = lb.label.empty() ? "all" : lb.label;
          break;
        case GroupSpec::Kind::EveryNBlocks: {
          if (group.every < 1) throw Error("block_maxima: group every >= 1");
          glabel = prefix + "period" +
                   std::to_string(b / static_cast<std::size_t>(group.every));
          break;
        }
      }
      out.maxima.push_back(BlockMax{lb.block_max[b].second,
                                    prefix + lb.block_max[b].first,
                                    group_id(glabel)});
    }
  }
  return out;
}

ExceedanceSample exceedances(const std::vector<double>& values,
                             double threshold) {
  if (!std::isfinite(threshold)) throw Error("exceedances: threshold not finite");
  if (values.empty()) throw Error("exceedances: empty series");
  ExceedanceSample out;
  out.u = threshold;
  out.n_total = values.size();
  for (double x : values) {
    if (x > threshold) out.excesses.push_back(x - threshold);
  }
  out.n_exceed = out.excesses.size();
  if (out.excesses.empty()) {
    throw Error("exceedances: no observations above the threshold");
  }
  return out;
}

ExceedanceSample exceedances(const TimeSeries& series, double threshold) {
  std::vector<double> v;
  v.reserve(series.points.size());
  for (const auto& pt : series.points) v.push_back(pt.value);
  return exceedances(v, threshold);
}

double empirical_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw Error("empirical_quantile: no values");
  if (!(q >= 0.0 && q <= 1.0)) throw Error("empirical_quantile: q outside [0,1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const std::size_t i = static_cast<std::size_t>(h);
  if (i + 1 >= values.size()) return values.back();
  return values[i] + (h - static_cast<double>(i)) * (values[i + 1] - values[i]);
}

double empirical_return_level(const ExtremesSample& sample, int k) {
  if (k < 2) throw Error("empirical_return_level: k must be >= 2");
  if (sample.maxima.empty()) throw Error("empirical_return_level: empty sample");
  return empirical_quantile(sample.values(), 1.0 - 1.0 / static_cast<double>(k));
}

std::pair<double, double> empirical_return_level_ci(
    const ExtremesSample& sample, int k, int n_boot, Rng& rng, double level) {
  if (n_boot < 10) throw Error("empirical_return_level_ci: n_boot too small");
  if (!(level > 0.0 && level < 1.0)) {
    throw Error("empirical_return_level_ci: level outside (0,1)");
  }
  const auto vals = sample.values();
  const double q = 1.0 - 1.0 / static_cast<double>(k);
  std::vector<double> stats(n_boot);
  std::vector<double> resample(vals.size());
  for (int b = 0; b < n_boot; ++b) {
    for (auto& r : resample) {
      r = vals[static_cast<std::size_t>(rng.uniform01() * vals.size())];
    }
    stats[b] = empirical_quantile(resample, q);
  }
  const double a = (1.0 - level) / 2.0;
  return {empirical_quantile(stats, a), empirical_quantile(stats, 1.0 - a)};
}

VarEs empirical_var_es(const std::vector<double>& values, double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error("empirical_var_es: p outside (0,1)");
  if (values.empty()) throw Error("empirical_var_es: empty series");
  VarEs out;
  out.var = empirical_quantile(values, 1.0 - p);
  double sum = 0.0;
  std::size_t n = 0;
  for (double x : values) {
    if (x > out.var) {
      sum += x;
      ++n;
    }
  }
  if (n == 0) {
    throw Error("empirical_var_es: no observation exceeds the VaR quantile");
  }
  out.es = sum / static_cast<double>(n);
  return out;
}

VarEs empirical_var_es(const TimeSeries& series, double p) {
  std::vector<double> v;
  v.reserve(series.points.size());
  for (const auto& pt : series.points) v.push_back(pt.value);
  return empirical_var_es(v, p);
}

}  // namespace evbayes
