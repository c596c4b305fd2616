#pragma once

#include <cstdint>
#include <functional>
#include <map>

namespace cibp {

/// Counts per discrete outcome key (an integer outcome or a left-ordered
/// class fingerprint). Ordered map so iteration is deterministic.
struct CountTable {
  std::map<std::uint64_t, std::uint64_t> counts;

  void add(std::uint64_t key, std::uint64_t n = 1) { counts[key] += n; }

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (const auto& [k, c] : counts) t += c;
    return t;
  }
};

/// Poisson pmf exp(k log lambda - lambda - log k!); lambda = 0 is the point
/// mass at zero.
double poisson_pmf(double lambda, unsigned long k);

/// Regularized upper incomplete gamma Q(a, x) (series / continued fraction).
double gamma_q(double a, double x);

/// Upper-tail probability of a chi-square variate with df degrees of freedom.
double chi_square_upper_tail(double statistic, unsigned long df);

struct GofResult {
  double statistic;
  double p_value;
  unsigned long df;
  unsigned long bins;
};

/// Pearson goodness-of-fit test of observed counts against the model pmf.
/// One cell per observed key plus an overflow cell for the remaining
/// probability mass; every cell whose expected count falls below
/// min_expected is pooled into that overflow cell. At least two cells must
/// survive pooling.
GofResult chisq_gof(const CountTable& observed,
                    const std::function<double(std::uint64_t)>& pmf,
                    double min_expected = 5.0);

/// Total variation distance between the normalized tables, over the union of
/// their keys. Both tables must have positive totals.
double tv_distance(const CountTable& a, const CountTable& b);

}  // namespace cibp
