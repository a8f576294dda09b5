#pragma once

#include <cstddef>
#include <functional>

#include "evbayes/evd.hpp"
#include "evbayes/sampler.hpp"

namespace evbayes {

// k-period return level: the (1 - 1/k) quantile of the block-maxima
// distribution, written in the direct closed form (the quantile function is
// an independent code path used to cross-check it).
double return_level(const GevParams& p, int k);

// GPD-tail Value-at-Risk at tail probability p:
// u + (sigma/xi) (((n/N_u) p)^(-xi) - 1), with the analytic xi -> 0 limit.
double var_pot(const GpdParams& p, std::size_t n_total, std::size_t n_exceed,
               double tail_prob);

// Expected shortfall (VaR_p + sigma - xi u)/(1 - xi); +inf for xi >= 1.
double es_pot(double var, const GpdParams& p);

struct DerivedSummary {
  ParamSummary stat;
  std::size_t non_finite = 0;  // draws the map could not evaluate (<= 1%)
};

// Posterior of a derived quantity: apply `map` to every retained draw and
// summarize with mean/SD/HPD. More than 1% non-finite mapped values is an
// error (reported with the count).
DerivedSummary posterior_transform(
    const Chain& chain,
    const std::function<double(const std::vector<double>&)>& map);

}  // namespace evbayes
