#include <doctest.h>

#include <cmath>

#include "cibp/cibp_samplers.hpp"
#include "cibp/diagnostics.hpp"
#include "cibp/ibp.hpp"

using cibp::CountTable;
using cibp::IbpParams;
using cibp::RngStream;

TEST_CASE("ibp sampler: degenerate and first-customer laws") {
  const IbpParams params{5.0, 4.0};
  RngStream rng(300, 0);
  CHECK(cibp::sample_ibp(params, 0, rng).cols() == 0);

  CountTable first;
  for (int d = 0; d < 50000; ++d) first.add(cibp::sample_ibp(params, 1, rng).cols());
  const cibp::GofResult gof = cibp::chisq_gof(first, [](std::uint64_t k) {
    return cibp::poisson_pmf(5.0, static_cast<unsigned long>(k));
  });
  CHECK(gof.p_value > 0.001);
}

TEST_CASE("ibp sampler: expected feature count matches the rate sum") {
  const IbpParams params{2.0, 3.0};
  const std::size_t p = 15;
  double expected = params.omega;
  for (std::size_t j = 2; j <= p; ++j)
    expected += params.omega * params.kappa / (static_cast<double>(j) + params.kappa);

  RngStream rng(301, 0);
  const int draws = 50000;
  double sum = 0.0;
  double sum2 = 0.0;
  for (int d = 0; d < draws; ++d) {
    const auto k = static_cast<double>(cibp::sample_ibp(params, p, rng).cols());
    sum += k;
    sum2 += k * k;
  }
  const double mean = sum / draws;
  const double sd = std::sqrt((sum2 / draws - mean * mean) / draws);
  CHECK(std::fabs(mean - expected) < 3.0 * sd);
}

TEST_CASE("limit rates converge as alpha goes to zero") {
  for (long j = 1; j <= 5; ++j) {
    const auto [cibp_rate, ibp_rate] = cibp::ibp_limit_rates(1e-3, 5.0, 4.0, j);
    CHECK(std::fabs(cibp_rate / ibp_rate - 1.0) < 0.002);
  }
  for (long j = 1; j <= 5; ++j) {
    const auto [cibp_rate, ibp_rate] = cibp::ibp_limit_rates(1e-6, 5.0, 4.0, j);
    CHECK(std::fabs(cibp_rate / ibp_rate - 1.0) < 2e-4);
  }
  // Bernoulli limit (m+alpha)/(j+kappa+alpha) -> m/(j+kappa).
  const double alpha = 1e-6;
  const double with_alpha = (2.0 + alpha) / (3.0 + 4.0 + alpha);
  CHECK(std::fabs(with_alpha - 2.0 / 7.0) < 1e-6);

  CHECK_THROWS_AS(cibp::ibp_limit_rates(1e-3, 5.0, 0.0, 1), std::domain_error);
  CHECK_THROWS_AS(cibp::ibp_limit_rates(1e-3, 5.0, 4.0, 0), std::domain_error);
}

TEST_CASE("feature growth: convergent process bounded, two-parameter not") {
  // Matched parameters omega = gamma alpha / kappa; at p=200 the
  // two-parameter process has opened clearly more features.
  const double omega = 1.0;
  const double kappa = 4.0;
  const double alpha = 2.0;
  const cibp::CibpParams cibp_params{omega * kappa / alpha, alpha, kappa};
  const IbpParams ibp_params{omega, kappa};

  RngStream rng(302, 0);
  const int draws = 2000;
  double cibp_mean = 0.0;
  double ibp_mean = 0.0;
  for (int d = 0; d < draws; ++d) {
    cibp_mean += static_cast<double>(cibp::sample_restaurant(cibp_params, 200, rng).cols());
    ibp_mean += static_cast<double>(cibp::sample_ibp(ibp_params, 200, rng).cols());
  }
  cibp_mean /= draws;
  ibp_mean /= draws;
  CHECK(cibp_mean <= cibp_params.gamma + 3.0 * std::sqrt(cibp_params.gamma / draws));
  CHECK(ibp_mean > cibp_mean);

  // The partial rate sums keep growing for the two-parameter process.
  double partial = ibp_params.omega;
  double prev = partial;
  for (std::size_t j = 2; j <= 2000; ++j) {
    partial += ibp_params.omega * ibp_params.kappa / (static_cast<double>(j) + ibp_params.kappa);
    CHECK(partial > prev);
    prev = partial;
  }
  CHECK(partial > 5.0 * cibp_params.gamma);
}
