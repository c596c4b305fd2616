#pragma once

#include <stdexcept>
#include <utility>

#include "cibp/feature_matrix.hpp"
#include "cibp/rng.hpp"

namespace cibp {

/// Two-parameter buffet process: omega is the mass parameter, kappa the
/// concentration.
struct IbpParams {
  double omega;
  double kappa;

  IbpParams(double omega_, double kappa_) : omega(omega_), kappa(kappa_) {
    if (!(omega > 0.0)) throw std::domain_error("IbpParams: omega must be positive");
    if (!(kappa >= 0.0)) throw std::domain_error("IbpParams: kappa must be nonnegative");
  }
};

/// Restaurant construction of the two-parameter process: customer 1 opens
/// Poisson(omega) dishes; customer j >= 2 takes dish k with probability
/// m_jk/(j + kappa) and opens Poisson(omega kappa / (j + kappa)) dishes.
/// Its expected feature count grows without bound in p.
FeatureMatrix sample_ibp(const IbpParams& params, std::size_t p, RngStream& rng);

/// New-dish rates of the convergent process at (gamma = omega kappa / alpha,
/// alpha, kappa) and of the two-parameter process, for customer j. The two
/// agree in the alpha -> 0 limit. kappa must be strictly positive.
std::pair<double, double> ibp_limit_rates(double alpha, double omega, double kappa, long j);

}  // namespace cibp
