#pragma once

// Shared test oracles: quadrature routines and extended-precision references
// kept independent of the library code they check.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "cibp/feature_matrix.hpp"
#include "cibp/rng.hpp"

namespace testsupport {

// Double-exponential (tanh-sinh) quadrature over (0,1); handles endpoint
// singularities such as q^(alpha-1).
inline double tanh_sinh_01(const std::function<double(double)>& f) {
  const double h = 1.0 / 128.0;
  const double pi_half = 1.5707963267948966;
  double sum = 0.0;
  for (int i = -1600; i <= 1600; ++i) {
    const double t = i * h;
    const double s = pi_half * std::sinh(t);
    // 0.5 (1 + tanh s) in logistic form, keeping full relative accuracy at
    // both endpoints (the integrands may be singular there).
    const double x = 1.0 / (1.0 + std::exp(-2.0 * s));
    const double w = 0.5 * pi_half * std::cosh(t) / (std::cosh(s) * std::cosh(s));
    if (x <= 0.0 || x >= 1.0 || w <= 0.0) continue;
    const double v = f(x);
    if (std::isfinite(v)) sum += v * w;
  }
  return sum * h;
}

// Composite Simpson rule on [a,b].
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      std::size_t intervals) {
  if (intervals % 2 != 0) ++intervals;
  const double h = (b - a) / static_cast<double>(intervals);
  double sum = f(a) + f(b);
  for (std::size_t i = 1; i < intervals; ++i)
    sum += f(a + h * static_cast<double>(i)) * (i % 2 == 1 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

// log B(a,b) for integer arguments, accumulated in extended precision:
// log Gamma(n) = sum_{k=2}^{n-1} log k.
inline long double log_beta_integer_reference(unsigned a, unsigned b) {
  auto lgamma_int = [](unsigned n) {
    long double sum = 0.0L;
    for (unsigned k = 2; k < n; ++k) sum += std::log(static_cast<long double>(k));
    return sum;
  };
  return lgamma_int(a) + lgamma_int(b) - lgamma_int(a + b);
}

// Dense Bernoulli(1/2) matrix with a Poisson(mean_columns) column count.
inline cibp::FeatureMatrix random_matrix(std::size_t rows, double mean_columns,
                                         cibp::RngStream& rng) {
  cibp::FeatureMatrix matrix(rows);
  const long k = rng.poisson(mean_columns);
  for (long c = 0; c < k; ++c) {
    const std::size_t col = matrix.append_column();
    for (std::size_t j = 0; j < rows; ++j)
      if (rng.bernoulli(0.5)) matrix.set(j, col, true);
  }
  return matrix;
}

inline std::vector<std::size_t> random_permutation(std::size_t n, cibp::RngStream& rng) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

inline double mean(const std::vector<double>& xs) {
  double sum = 0.0;
  for (const double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

inline double variance(const std::vector<double>& xs) {
  const double m = mean(xs);
  double ss = 0.0;
  for (const double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

}  // namespace testsupport
