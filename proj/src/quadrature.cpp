#include "evbayes/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "evbayes/common.hpp"

namespace evbayes {

// Roots of the order-n Hermite polynomial by Newton iteration on the
// orthonormal recurrence, with the classic initial guesses for successive
// roots. Stable well past the orders used here (<= 64).
GaussHermiteRule gauss_hermite(int order) {
  if (order < 1) throw Error("gauss_hermite: order must be >= 1");
  const int n = order;
  const double eps = 3e-14;
  const int max_newton = 100;
  const double pi_m4 = 0.7511255444649425;  // pi^(-1/4)

  std::vector<double> x(n), w(n);
  const int m = (n + 1) / 2;
  double z = 0.0, pp = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) -
          1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * x[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * x[1];
    } else {
      z = 2.0 * z - x[i - 2];
    }
    for (int it = 0; it < max_newton; ++it) {
      double p1 = pi_m4;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 -
             std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;  // derivative of the orthonormal H_n
      const double z_prev = z;
      z = z_prev - p1 / pp;
      if (std::abs(z - z_prev) <= eps) break;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = 2.0 / (pp * pp);
    w[n - 1 - i] = w[i];
  }
  // x currently descends over the first half; sort ascending with weights
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return x[a] < x[b]; });
  GaussHermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = x[idx[i]];
    rule.weights[i] = w[idx[i]];
  }
  return rule;
}

double log_sum_exp(const std::vector<double>& v) {
  double mx = kNegInf;
  for (double t : v) mx = std::max(mx, t);
  if (mx == kNegInf) return kNegInf;
  double s = 0.0;
  for (double t : v) s += std::exp(t - mx);
  return mx + std::log(s);
}

}  // namespace evbayes
