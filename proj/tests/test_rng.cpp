#include <doctest.h>

#include <cmath>
#include <vector>

#include "cibp/diagnostics.hpp"
#include "cibp/rng.hpp"
#include "test_support.hpp"

using cibp::RngStream;

TEST_CASE("streams are reproducible and distinct") {
  RngStream a(42, 7);
  RngStream b(42, 7);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());

  RngStream c(42, 8);
  int differing = 0;
  RngStream a2(42, 7);
  for (int i = 0; i < 64; ++i) differing += a2.next_u64() != c.next_u64();
  CHECK(differing > 60);
}

TEST_CASE("uniform moments") {
  RngStream rng(1, 1);
  const int n = 200000;
  double sum = 0.0;
  double sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sum2 += u * u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(sum2 / n - (sum / n) * (sum / n) == doctest::Approx(1.0 / 12.0).epsilon(0.02));
}

TEST_CASE("normal moments") {
  RngStream rng(2, 1);
  const int n = 200000;
  std::vector<double> xs(n);
  for (double& x : xs) x = rng.normal();
  CHECK(std::fabs(testsupport::mean(xs)) < 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(testsupport::variance(xs) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("gamma and beta moments") {
  RngStream rng(3, 1);
  const int n = 200000;
  for (const double shape : {0.5, 1.0, 2.5, 11.0}) {
    std::vector<double> xs(n);
    for (double& x : xs) x = rng.gamma(shape);
    // mean = shape, var = shape
    CHECK(testsupport::mean(xs) == doctest::Approx(shape).epsilon(0.03));
    CHECK(testsupport::variance(xs) == doctest::Approx(shape).epsilon(0.05));
  }
  // Beta(1, 1) mean 1/2; Beta(10, 11) mean 10/21.
  std::vector<double> b1(n);
  std::vector<double> b2(n);
  for (double& x : b1) x = rng.beta(1.0, 1.0);
  for (double& x : b2) x = rng.beta(10.0, 11.0);
  CHECK(testsupport::mean(b1) == doctest::Approx(0.5).epsilon(0.01));
  CHECK(testsupport::mean(b2) == doctest::Approx(10.0 / 21.0).epsilon(0.01));
}

TEST_CASE("inverse gamma mean") {
  RngStream rng(4, 1);
  const int n = 200000;
  std::vector<double> xs(n);
  for (double& x : xs) x = rng.inverse_gamma(5.0, 8.0);
  // mean = scale/(shape-1) = 2
  CHECK(testsupport::mean(xs) == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("poisson sampler passes goodness of fit in both regimes") {
  for (const double lambda : {0.37, 4.2, 9.9, 15.0, 42.0}) {
    RngStream rng(5, static_cast<std::uint64_t>(lambda * 100));
    cibp::CountTable observed;
    for (int i = 0; i < 100000; ++i)
      observed.add(static_cast<std::uint64_t>(rng.poisson(lambda)));
    const auto pmf = [&](std::uint64_t k) {
      return cibp::poisson_pmf(lambda, static_cast<unsigned long>(k));
    };
    const cibp::GofResult gof = cibp::chisq_gof(observed, pmf);
    CAPTURE(lambda);
    CHECK(gof.p_value > 0.001);
  }
  RngStream rng(6, 0);
  CHECK(rng.poisson(0.0) == 0);
  CHECK_THROWS_AS(rng.poisson(-1.0), std::domain_error);
}

TEST_CASE("derive_stream separates use sites") {
  const std::uint64_t a = cibp::derive_stream(9, {1, 2, cibp::hash_label("CIBP")});
  const std::uint64_t b = cibp::derive_stream(9, {1, 2, cibp::hash_label("IBP")});
  const std::uint64_t c = cibp::derive_stream(9, {1, 3, cibp::hash_label("CIBP")});
  const std::uint64_t a2 = cibp::derive_stream(9, {1, 2, cibp::hash_label("CIBP")});
  CHECK(a == a2);
  CHECK(a != b);
  CHECK(a != c);
  CHECK(b != c);
}
