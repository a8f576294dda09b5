#pragma once

#include <vector>

namespace evbayes {

// Gauss-Hermite rule in the physicists' convention:
//   integral of exp(-x^2) f(x) over R  ~=  sum_j weights[j] f(nodes[j]).
// Nodes are in ascending order.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussHermiteRule gauss_hermite(int order);

// log(sum(exp(v))) with the usual max shift; -inf when every entry is -inf.
double log_sum_exp(const std::vector<double>& v);

}  // namespace evbayes
