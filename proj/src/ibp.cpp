#include "cibp/ibp.hpp"

#include "cibp/beta_math.hpp"

namespace cibp {

FeatureMatrix sample_ibp(const IbpParams& params, std::size_t p, RngStream& rng) {
  FeatureMatrix matrix(p);
  std::vector<std::size_t> counts;
  for (std::size_t j = 1; j <= p; ++j) {
    const double denom = static_cast<double>(j) + params.kappa;
    if (j >= 2) {
      for (std::size_t k = 0; k < counts.size(); ++k) {
        if (rng.bernoulli(static_cast<double>(counts[k]) / denom)) {
          matrix.set(j - 1, k, true);
          ++counts[k];
        }
      }
    }
    const double rate = j == 1 ? params.omega : params.omega * params.kappa / denom;
    const long fresh = rng.poisson(rate);
    for (long t = 0; t < fresh; ++t) {
      const std::size_t col = matrix.append_column();
      matrix.set(j - 1, col, true);
      counts.push_back(1);
    }
  }
  return matrix;
}

std::pair<double, double> ibp_limit_rates(double alpha, double omega, double kappa, long j) {
  if (!(kappa > 0.0))
    throw std::domain_error("ibp_limit_rates: kappa must be strictly positive");
  if (j < 1) throw std::domain_error("ibp_limit_rates: j must be positive");
  const CibpParams cibp{omega * kappa / alpha, alpha, kappa};
  return {new_dish_rate(cibp, j), omega * kappa / (static_cast<double>(j) + kappa)};
}

}  // namespace cibp
