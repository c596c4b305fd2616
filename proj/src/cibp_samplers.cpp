#include "cibp/cibp_samplers.hpp"

#include <cmath>
#include <stdexcept>

namespace cibp {

FeatureMatrix sample_restaurant(const CibpParams& params, std::size_t p, RngStream& rng) {
  FeatureMatrix matrix(p);
  std::vector<std::size_t> counts;  // customers so far at each dish
  for (std::size_t j = 1; j <= p; ++j) {
    const double denom = static_cast<double>(j) + params.kappa + params.alpha;
    for (std::size_t k = 0; k < counts.size(); ++k) {
      const double prob = (static_cast<double>(counts[k]) + params.alpha) / denom;
      if (rng.bernoulli(prob)) {
        matrix.set(j - 1, k, true);
        ++counts[k];
      }
    }
    const long fresh = rng.poisson(new_dish_rate(params, static_cast<long>(j)));
    for (long t = 0; t < fresh; ++t) {
      const std::size_t col = matrix.append_column();
      matrix.set(j - 1, col, true);
      counts.push_back(1);
    }
  }
  return matrix;
}

HierarchicalDraw sample_hierarchical(const CibpParams& params, std::size_t p, RngStream& rng) {
  HierarchicalDraw draw;
  draw.matrix = FeatureMatrix(p);
  const long k = rng.poisson(params.gamma);
  draw.thetas.reserve(static_cast<std::size_t>(k));
  for (long c = 0; c < k; ++c) {
    const double theta = rng.beta(params.alpha, params.kappa + 1.0);
    draw.thetas.push_back(theta);
    const std::size_t col = draw.matrix.append_column();
    for (std::size_t j = 0; j < p; ++j)
      if (rng.bernoulli(theta)) draw.matrix.set(j, col, true);
  }
  return draw;
}

PredictiveRowDraw predictive_row(const FeatureMatrix& history, const CibpParams& params,
                                 RngStream& rng) {
  const std::size_t p = history.rows() + 1;
  const double denom = static_cast<double>(p) + params.kappa + params.alpha;
  PredictiveRowDraw draw;
  draw.existing.assign(history.cols(), 0);
  for (std::size_t k = 0; k < history.cols(); ++k) {
    const std::size_t m = history.column_ones(k);
    if (m == 0) continue;
    if (rng.bernoulli((static_cast<double>(m) + params.alpha) / denom))
      draw.existing[k] = 1;
  }
  draw.new_columns =
      static_cast<std::size_t>(rng.poisson(new_dish_rate(params, static_cast<long>(p))));
  return draw;
}

FeatureMatrix append_predictive_row(const FeatureMatrix& history, const PredictiveRowDraw& draw) {
  if (draw.existing.size() != history.cols())
    throw std::invalid_argument("append_predictive_row: draw does not match history");
  const std::size_t p = history.rows() + 1;
  FeatureMatrix out(p);
  for (std::size_t k = 0; k < history.cols(); ++k) {
    const std::size_t col = out.append_column();
    for (std::size_t j = 0; j < history.rows(); ++j)
      if (history.get(j, k)) out.set(j, col, true);
    if (draw.existing[k]) out.set(p - 1, col, true);
  }
  for (std::size_t t = 0; t < draw.new_columns; ++t) {
    const std::size_t col = out.append_column();
    out.set(p - 1, col, true);
  }
  return out;
}

double lof_log_pmf(const LofClass& cls, const CibpParams& params) {
  const std::size_t p = cls.matrix.rows();
  const auto k_plus = static_cast<double>(cls.k_plus());

  double log_multiplicity = 0.0;  // sum_u log K_u!, via log-gamma
  for (const std::size_t count : cls.multiplicities)
    log_multiplicity += std::lgamma(static_cast<double>(count) + 1.0);

  double log_columns = 0.0;
  for (std::size_t k = 0; k < cls.matrix.cols(); ++k) {
    const auto m = static_cast<double>(cls.matrix.column_ones(k));
    if (m == 0.0)
      throw std::invalid_argument("lof_log_pmf: class contains an all-zero column");
    log_columns += log_beta_ratio(
        {params.alpha, params.kappa + 1.0, m, static_cast<double>(p) - m});
  }

  return k_plus * std::log(params.gamma) - log_multiplicity -
         kplus_mean(params, static_cast<long>(p)) + log_columns;
}

namespace {

FeatureMatrix pattern_matrix(std::size_t p, const std::vector<std::uint32_t>& patterns,
                             const std::vector<std::size_t>& counts) {
  FeatureMatrix matrix(p);
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    for (std::size_t c = 0; c < counts[i]; ++c) {
      const std::size_t col = matrix.append_column();
      for (std::size_t j = 0; j < p; ++j)
        if ((patterns[i] >> (p - 1 - j)) & 1u) matrix.set(j, col, true);
    }
  }
  return matrix;
}

void enumerate_recursive(std::size_t p, const std::vector<std::uint32_t>& patterns,
                         std::size_t index, std::size_t remaining,
                         std::vector<std::size_t>& counts,
                         const std::function<void(const LofClass&)>& visit) {
  if (index == patterns.size()) {
    std::vector<std::uint32_t> used_patterns;
    std::vector<std::size_t> used_counts;
    for (std::size_t i = 0; i < patterns.size(); ++i) {
      if (counts[i] > 0) {
        used_patterns.push_back(patterns[i]);
        used_counts.push_back(counts[i]);
      }
    }
    LofClass cls;
    cls.matrix = pattern_matrix(p, used_patterns, used_counts);
    cls.multiplicities = std::move(used_counts);
    visit(cls);
    return;
  }
  for (std::size_t c = 0; c <= remaining; ++c) {
    counts[index] = c;
    enumerate_recursive(p, patterns, index + 1, remaining - c, counts, visit);
  }
  counts[index] = 0;
}

}  // namespace

void enumerate_lof_classes(std::size_t p, std::size_t max_kplus,
                           const std::function<void(const LofClass&)>& visit) {
  if (p == 0 || p > 4 || max_kplus > 12)
    throw std::length_error("enumerate_lof_classes: beyond enumeration guard (p <= 4, K+ <= 12)");
  // Patterns in descending score order so emitted matrices are left-ordered.
  std::vector<std::uint32_t> patterns;
  for (std::uint32_t u = (1u << p) - 1; u >= 1; --u) patterns.push_back(u);
  std::vector<std::size_t> counts(patterns.size(), 0);
  enumerate_recursive(p, patterns, 0, max_kplus, counts, visit);
}

std::vector<LofClass> enumerate_lof_classes(std::size_t p, std::size_t max_kplus) {
  std::vector<LofClass> classes;
  enumerate_lof_classes(p, max_kplus,
                        [&](const LofClass& cls) { classes.push_back(cls); });
  return classes;
}

}  // namespace cibp
