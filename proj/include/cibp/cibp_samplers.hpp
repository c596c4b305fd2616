#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cibp/beta_math.hpp"
#include "cibp/feature_matrix.hpp"
#include "cibp/rng.hpp"

namespace cibp {

/// Sequential restaurant construction: customer 1 opens
/// Poisson(new_dish_rate(1)) dishes; customer j >= 2 takes each existing
/// dish k with probability (m_jk + alpha)/(j + kappa + alpha), where m_jk
/// counts customers 1..j-1 at dish k, then opens Poisson(new_dish_rate(j))
/// dishes. Columns are returned in dish-creation order and are never
/// all-zero.
FeatureMatrix sample_restaurant(const CibpParams& params, std::size_t p, RngStream& rng);

struct HierarchicalDraw {
  FeatureMatrix matrix;        // all K columns, all-zero ones retained
  std::vector<double> thetas;  // per-column inclusion probabilities
};

/// Hierarchical construction: K ~ Poisson(gamma), theta_k iid
/// Beta(alpha, kappa+1), entries independent Bernoulli(theta_k).
HierarchicalDraw sample_hierarchical(const CibpParams& params, std::size_t p, RngStream& rng);

/// Conditional draw of row p given rows 1..p-1: keeps nonzero column k with
/// probability (m_k + alpha)/(p + kappa + alpha) and opens
/// Poisson(new_dish_rate(p)) new columns. All-zero history columns are never
/// included (their mass lives in the Poisson term).
struct PredictiveRowDraw {
  std::vector<std::uint8_t> existing;  // one flag per history column
  std::size_t new_columns;
};

PredictiveRowDraw predictive_row(const FeatureMatrix& history, const CibpParams& params,
                                 RngStream& rng);

/// History plus one more row built from a predictive draw; the new columns
/// contain a single one in the last row.
FeatureMatrix append_predictive_row(const FeatureMatrix& history, const PredictiveRowDraw& draw);

/// Exact log-probability of a left-ordered class:
///   K+ log gamma - sum_u log K_u! - gamma (1 - Bbar^{0,p})
///   + sum_k log Bbar^{m_k, p-m_k}
/// with all beta ratios taken at base (alpha, kappa+1) and the exponent in
/// its telescoped closed form.
double lof_log_pmf(const LofClass& cls, const CibpParams& params);

/// Calls visit for every left-ordered class with at most max_kplus nonzero
/// columns, exactly once each (multisets of the 2^p - 1 nonzero patterns).
/// Guarded to p <= 4, max_kplus <= 12; throws std::length_error beyond.
void enumerate_lof_classes(std::size_t p, std::size_t max_kplus,
                           const std::function<void(const LofClass&)>& visit);

/// Convenience form collecting the enumeration.
std::vector<LofClass> enumerate_lof_classes(std::size_t p, std::size_t max_kplus);

}  // namespace cibp
