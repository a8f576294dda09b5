#include "evbayes/risk.hpp"

#include <cmath>
#include <numeric>

namespace evbayes {

double return_level(const GevParams& p, int k) {
  if (k < 2) throw Error("return_level: k must be >= 2");
  const double a = -std::log(1.0 - 1.0 / static_cast<double>(k));
  if (std::abs(p.xi) < kXiZeroTol) return p.mu - p.sigma * std::log(a);
  return p.mu - p.sigma / p.xi * (1.0 - std::pow(a, -p.xi));
}

double var_pot(const GpdParams& p, std::size_t n_total, std::size_t n_exceed,
               double tail_prob) {
  if (n_exceed == 0) throw Error("var_pot: no exceedances");
  if (n_exceed > n_total) throw Error("var_pot: n_exceed exceeds n_total");
  if (!(tail_prob > 0.0 && tail_prob < 1.0)) {
    throw Error("var_pot: tail probability outside (0,1)");
  }
  const double m = static_cast<double>(n_total) /
                   static_cast<double>(n_exceed) * tail_prob;
  if (std::abs(p.xi) < kXiZeroTol) return p.u - p.sigma * std::log(m);
  return p.u + p.sigma / p.xi * (std::pow(m, -p.xi) - 1.0);
}

double es_pot(double var, const GpdParams& p) {
  if (p.xi >= 1.0) return kPosInf;
  return (var + p.sigma - p.xi * p.u) / (1.0 - p.xi);
}

DerivedSummary posterior_transform(
    const Chain& chain,
    const std::function<double(const std::vector<double>&)>& map) {
  if (chain.draws.empty()) throw Error("posterior_transform: empty chain");
  std::vector<double> vals;
  vals.reserve(chain.draws.size());
  std::size_t bad = 0;
  for (const auto& row : chain.draws) {
    const double v = map(row);
    if (std::isfinite(v)) {
      vals.push_back(v);
    } else {
      ++bad;
    }
  }
  if (bad * 100 > chain.draws.size()) {
    throw Error("posterior_transform: map non-finite on " + std::to_string(bad) +
                " of " + std::to_string(chain.draws.size()) + " draws (> 1%)");
  }
  DerivedSummary out;
  out.non_finite = bad;
  out.stat.mean = std::accumulate(vals.begin(), vals.end(), 0.0) /
                  static_cast<double>(vals.size());
  double s = 0.0;
  for (double v : vals) s += (v - out.stat.mean) * (v - out.stat.mean);
  out.stat.sd = vals.size() > 1
                    ? std::sqrt(s / static_cast<double>(vals.size() - 1))
                    : 0.0;
  if (vals.size() >= 2) {
    std::tie(out.stat.hpd_lo, out.stat.hpd_hi) = hpd_interval(vals, 0.95);
  } else {
    out.stat.hpd_lo = out.stat.hpd_hi = out.stat.mean;
  }
  return out;
}

}  // namespace evbayes
