#include <doctest.h>

#include <cmath>
#include <set>
#include <map>

#include "cibp/cibp_samplers.hpp"
#include "cibp/diagnostics.hpp"
#include "test_support.hpp"

using cibp::CibpParams;
using cibp::CountTable;
using cibp::FeatureMatrix;
using cibp::LofClass;
using cibp::RngStream;

namespace {

cibp::GofResult kplus_gof(const CountTable& observed, const CibpParams& params, long p) {
  const double mean = cibp::kplus_mean(params, p);
  return cibp::chisq_gof(observed, [&](std::uint64_t k) {
    return cibp::poisson_pmf(mean, static_cast<unsigned long>(k));
  });
}

}  // namespace

TEST_CASE("restaurant: degenerate cases") {
  const CibpParams params{2.0, 1.0, 1.0};
  RngStream rng(100, 0);
  const FeatureMatrix empty = cibp::sample_restaurant(params, 0, rng);
  CHECK(empty.rows() == 0);
  CHECK(empty.cols() == 0);

  // Columns are never all-zero by construction.
  for (int rep = 0; rep < 200; ++rep) {
    const FeatureMatrix m = cibp::sample_restaurant(params, 6, rng);
    for (std::size_t k = 0; k < m.cols(); ++k) CHECK(m.column_ones(k) >= 1);
  }
}

TEST_CASE("restaurant: feature count is Poisson with the closed-form mean") {
  const CibpParams params{2.0, 1.5, 3.0};
  RngStream rng(101, 0);
  CountTable observed;
  for (int d = 0; d < 50000; ++d)
    observed.add(cibp::sample_restaurant(params, 20, rng).cols());
  CHECK(kplus_gof(observed, params, 20).p_value > 0.001);
}

TEST_CASE("restaurant: single customer rate gamma*alpha/(alpha+kappa+1)") {
  const CibpParams params{1.0, 10.0, 10.0};
  RngStream rng(102, 0);
  CountTable observed;
  for (int d = 0; d < 50000; ++d)
    observed.add(cibp::sample_restaurant(params, 1, rng).cols());
  // Poisson(10/21) by direct evaluation of the j=1 beta ratio.
  const cibp::GofResult gof = cibp::chisq_gof(observed, [](std::uint64_t k) {
    return cibp::poisson_pmf(10.0 / 21.0, static_cast<unsigned long>(k));
  });
  CHECK(gof.p_value > 0.001);
}

TEST_CASE("hierarchical: theta vector matches columns, zero-column draws occur") {
  const CibpParams params{0.7, 1.0, 1.0};
  RngStream rng(103, 0);
  bool saw_empty = false;
  for (int rep = 0; rep < 300; ++rep) {
    const cibp::HierarchicalDraw draw = cibp::sample_hierarchical(params, 4, rng);
    CHECK(draw.thetas.size() == draw.matrix.cols());
    for (const double theta : draw.thetas) {
      CHECK(theta >= 0.0);
      CHECK(theta <= 1.0);
    }
    saw_empty = saw_empty || draw.matrix.cols() == 0;
  }
  CHECK(saw_empty);
}

TEST_CASE("hierarchical vs restaurant: feature-count marginal agrees") {
  const CibpParams params{2.0, 1.5, 3.0};
  RngStream rng(104, 0);
  CountTable restaurant;
  CountTable hierarchical;
  for (int d = 0; d < 50000; ++d) {
    restaurant.add(cibp::sample_restaurant(params, 20, rng).cols());
    const cibp::HierarchicalDraw draw = cibp::sample_hierarchical(params, 20, rng);
    hierarchical.add(draw.matrix.nonzero_column_count());
  }
  CHECK(cibp::tv_distance(restaurant, hierarchical) <= 0.02);
  CHECK(kplus_gof(hierarchical, params, 20).p_value > 0.001);
}

TEST_CASE("hierarchical: full-column probability matches the quadrature oracle") {
  // P(m = p | column retained) is integral(theta^p dBeta(alpha, kappa+1))
  // over 1 - Bbar^{0,p}; all pieces evaluated by tanh-sinh quadrature.
  const double alpha = 1.5;
  const double kappa = 1.0;
  const std::size_t p = 3;
  const auto kernel = [&](double extra_a, double extra_b) {
    return testsupport::tanh_sinh_01([&](double t) {
      return std::pow(t, alpha + extra_a - 1.0) * std::pow(1.0 - t, kappa + extra_b);
    });
  };
  const double beta_norm = kernel(0.0, 0.0);
  const double numerator = kernel(static_cast<double>(p), 0.0);
  const double zero_prob = kernel(0.0, static_cast<double>(p));
  const double oracle = numerator / (beta_norm - zero_prob);

  const CibpParams params{2.0, alpha, kappa};
  RngStream rng(105, 0);
  std::size_t retained = 0;
  std::size_t full = 0;
  for (int d = 0; d < 200000; ++d) {
    const cibp::HierarchicalDraw draw = cibp::sample_hierarchical(params, p, rng);
    for (std::size_t k = 0; k < draw.matrix.cols(); ++k) {
      const std::size_t m = draw.matrix.column_ones(k);
      if (m == 0) continue;
      ++retained;
      if (m == p) ++full;
    }
  }
  const double freq = static_cast<double>(full) / static_cast<double>(retained);
  const double sigma = std::sqrt(oracle * (1.0 - oracle) / static_cast<double>(retained));
  CHECK(std::fabs(freq - oracle) < 3.0 * sigma + 1e-12);
}

TEST_CASE("sampled lof-class frequencies match the exact pmf") {
  const CibpParams params{1.0, 1.0, 1.0};
  std::map<std::uint64_t, double> pmf_by_print;
  cibp::enumerate_lof_classes(2, 12, [&](const LofClass& cls) {
    pmf_by_print[cls.fingerprint()] = std::exp(cibp::lof_log_pmf(cls, params));
  });

  RngStream rng(110, 0);
  CountTable observed;
  for (int d = 0; d < 50000; ++d)
    observed.add(cibp::left_order(cibp::sample_restaurant(params, 2, rng)).fingerprint());

  const cibp::GofResult gof = cibp::chisq_gof(observed, [&](std::uint64_t key) {
    const auto it = pmf_by_print.find(key);
    return it == pmf_by_print.end() ? 0.0 : it->second;
  });
  CHECK(gof.p_value > 0.001);
}

TEST_CASE("lof-class law agrees between the two samplers") {
  const CibpParams params{1.0, 1.0, 1.0};
  RngStream rng(106, 0);
  CountTable restaurant;
  CountTable hierarchical;
  for (int d = 0; d < 30000; ++d) {
    restaurant.add(cibp::left_order(cibp::sample_restaurant(params, 2, rng)).fingerprint());
    hierarchical.add(
        cibp::left_order(cibp::sample_hierarchical(params, 2, rng).matrix).fingerprint());
  }
  CHECK(cibp::tv_distance(restaurant, hierarchical) <= 0.03);
}

TEST_CASE("predictive row: first customer and inclusion probability") {
  const CibpParams params{1.0, 1.0, 0.0};
  RngStream rng(107, 0);

  // Empty history: new-column count is Poisson(new_dish_rate(1)) = Poisson(1/2).
  CountTable fresh;
  for (int d = 0; d < 50000; ++d)
    fresh.add(cibp::predictive_row(FeatureMatrix(0), params, rng).new_columns);
  const cibp::GofResult gof = cibp::chisq_gof(fresh, [](std::uint64_t k) {
    return cibp::poisson_pmf(0.5, static_cast<unsigned long>(k));
  });
  CHECK(gof.p_value > 0.001);

  // One full column over three history rows: inclusion probability 4/5.
  FeatureMatrix history(3);
  history.append_column();
  for (std::size_t j = 0; j < 3; ++j) history.set(j, 0, true);
  std::size_t included = 0;
  const int draws = 100000;
  for (int d = 0; d < draws; ++d)
    included += cibp::predictive_row(history, params, rng).existing[0];
  const double freq = static_cast<double>(included) / draws;
  const double sigma = std::sqrt(0.8 * 0.2 / draws);
  CHECK(std::fabs(freq - 0.8) < 3.0 * sigma);
}

TEST_CASE("chained predictive rows reproduce the restaurant law") {
  const CibpParams params{2.0, 1.5, 3.0};
  RngStream rng(108, 0);
  CountTable observed;
  for (int d = 0; d < 30000; ++d) {
    FeatureMatrix matrix(0);
    for (std::size_t p = 1; p <= 12; ++p)
      matrix = cibp::append_predictive_row(matrix, cibp::predictive_row(matrix, params, rng));
    observed.add(matrix.cols());
  }
  CHECK(kplus_gof(observed, params, 12).p_value > 0.001);
}

TEST_CASE("lof_log_pmf: empty class and single-row classes") {
  // Empty class at gamma=3, alpha=1, kappa=0, p=2: exponent -gamma(1-1/3) = -2.
  LofClass empty;
  empty.matrix = FeatureMatrix(2);
  CHECK(cibp::lof_log_pmf(empty, {3.0, 1.0, 0.0}) == doctest::Approx(-2.0).epsilon(1e-13));

  // p=1: a class of k singleton columns carries Poisson(gamma alpha/(alpha+kappa+1))
  // mass at k.
  const CibpParams params{2.0, 1.5, 0.5};
  const double rate = params.gamma * params.alpha / (params.alpha + params.kappa + 1.0);
  for (std::size_t k = 0; k <= 6; ++k) {
    LofClass cls;
    cls.matrix = FeatureMatrix(1);
    for (std::size_t c = 0; c < k; ++c) {
      const std::size_t col = cls.matrix.append_column();
      cls.matrix.set(0, col, true);
    }
    if (k > 0) cls.multiplicities = {k};
    const double pmf = std::exp(cibp::lof_log_pmf(cls, params));
    CHECK(pmf == doctest::Approx(cibp::poisson_pmf(rate, k)).epsilon(1e-12));
  }
}

TEST_CASE("lof_log_pmf normalizes over the enumeration") {
  const CibpParams params{1.0, 1.0, 1.0};
  double total = 0.0;
  std::size_t classes = 0;
  cibp::enumerate_lof_classes(2, 12, [&](const LofClass& cls) {
    total += std::exp(cibp::lof_log_pmf(cls, params));
    ++classes;
  });
  CHECK(classes == 455);  // multisets of <=12 items over 3 patterns

  double tail = 1.0;
  const double mean = cibp::kplus_mean(params, 2);
  for (unsigned long k = 0; k <= 12; ++k) tail -= cibp::poisson_pmf(mean, k);
  CHECK(total <= 1.0 + 1e-12);
  CHECK(std::fabs(1.0 - total) <= std::fabs(tail) + 1e-10);
}

TEST_CASE("row exchangeability of the left-ordered pmf") {
  const CibpParams params{3.0, 1.0, 1.0};
  RngStream rng(109, 0);
  for (int rep = 0; rep < 30; ++rep) {
    const FeatureMatrix m = cibp::sample_hierarchical(params, 5, rng).matrix;
    const double base = cibp::lof_log_pmf(cibp::left_order(m), params);
    for (int t = 0; t < 5; ++t) {
      const auto perm = testsupport::random_permutation(5, rng);
      const double permuted =
          cibp::lof_log_pmf(cibp::left_order(cibp::permute_rows(m, perm)), params);
      CHECK(std::fabs(permuted - base) <= 1e-12);
    }
  }
}

TEST_CASE("enumerate_lof_classes counts and guard") {
  CHECK(cibp::enumerate_lof_classes(1, 2).size() == 3);
  CHECK(cibp::enumerate_lof_classes(2, 1).size() == 4);
  CHECK(cibp::enumerate_lof_classes(2, 2).size() == 10);
  CHECK_THROWS_AS(cibp::enumerate_lof_classes(5, 2), std::length_error);
  CHECK_THROWS_AS(cibp::enumerate_lof_classes(2, 13), std::length_error);

  // Classes come out exactly once, left-ordered, and with distinct
  // fingerprints (the injectivity check backing TV comparisons).
  const auto classes = cibp::enumerate_lof_classes(3, 4);
  std::set<std::uint64_t> prints;
  for (const LofClass& cls : classes) {
    CHECK(cibp::left_order(cls.matrix) == cls);
    prints.insert(cls.fingerprint());
  }
  CHECK(prints.size() == classes.size());

  const auto classes4 = cibp::enumerate_lof_classes(4, 3);
  std::set<std::uint64_t> prints4;
  for (const LofClass& cls : classes4) prints4.insert(cls.fingerprint());
  CHECK(prints4.size() == classes4.size());
}
