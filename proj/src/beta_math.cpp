#include "cibp/beta_math.hpp"

#include <cmath>

namespace cibp {

double log_beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::domain_error("log_beta: arguments must be positive");
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double log_beta_ratio(const BetaRatioArgs& args) {
  return log_beta(args.a1 + args.a2, args.b1 + args.b2) - log_beta(args.a1, args.b1);
}

double zero_column_log_ratio(const CibpParams& params, long p) {
  if (p < 0) throw std::domain_error("zero_column_log_ratio: p must be nonnegative");
  // log((kappa+j)/(alpha+kappa+j)) = log1p(-alpha/(alpha+kappa+j)); the
  // log1p form stays accurate when alpha is many orders below kappa+j.
  double sum = 0.0;
  for (long j = 1; j <= p; ++j)
    sum += std::log1p(-params.alpha / (params.alpha + params.kappa + static_cast<double>(j)));
  return sum;
}

double new_dish_rate(const CibpParams& params, long j) {
  if (j < 1) throw std::domain_error("new_dish_rate: j must be positive");
  return params.gamma *
         std::exp(log_beta_ratio(
             {params.alpha, params.kappa + 1.0, 1.0, static_cast<double>(j - 1)}));
}

double kplus_mean(const CibpParams& params, long p) {
  // gamma * (1 - exp(s)) computed as -gamma * expm1(s): exact through the
  // regime where the ratio is within an ulp of 1.
  return -params.gamma * std::expm1(zero_column_log_ratio(params, p));
}

}  // namespace cibp
