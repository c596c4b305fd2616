#pragma once

#include <stdexcept>

namespace cibp {

/// Parameter triple of the convergent buffet process: gamma is the limiting
/// expected feature count, alpha the mass/shape parameter, kappa the decay
/// parameter.
struct CibpParams {
  double gamma;
  double alpha;
  double kappa;

  CibpParams(double gamma_, double alpha_, double kappa_)
      : gamma(gamma_), alpha(alpha_), kappa(kappa_) {
    if (!(gamma > 0.0)) throw std::domain_error("CibpParams: gamma must be positive");
    if (!(alpha > 0.0)) throw std::domain_error("CibpParams: alpha must be positive");
    if (!(kappa >= 0.0)) throw std::domain_error("CibpParams: kappa must be nonnegative");
  }
};

/// Arguments of the beta-function ratio B(a1+a2, b1+b2) / B(a1, b1).
struct BetaRatioArgs {
  double a1;
  double b1;
  double a2;
  double b2;
};

/// log B(a,b) via log-gamma. Throws std::domain_error unless a, b > 0.
double log_beta(double a, double b);

/// log of B(a1+a2, b1+b2) / B(a1, b1).
double log_beta_ratio(const BetaRatioArgs& args);

/// log of B(alpha, kappa+p+1) / B(alpha, kappa+1), evaluated through the
/// product form prod_{j=1..p} (kappa+j)/(alpha+kappa+j); equals
/// log_beta_ratio({alpha, kappa+1, 0, p}). Strictly decreasing in p, 0 at
/// p = 0.
double zero_column_log_ratio(const CibpParams& params, long p);

/// Poisson rate of dishes opened by customer j:
/// gamma * B(alpha+1, kappa+j) / B(alpha, kappa+1). Strictly decreasing in j.
double new_dish_rate(const CibpParams& params, long j);

/// Mean of the feature count after p customers:
/// gamma * (1 - B(alpha, kappa+p+1)/B(alpha, kappa+1)). Nondecreasing in p,
/// bounded by gamma, and converging to gamma as p grows. The closed form is
/// the telescoped sum of the new-dish rates for j = 1..p.
double kplus_mean(const CibpParams& params, long p);

}  // namespace cibp
