#pragma once

#include <span>
#include <vector>

#include "cibp/beta_math.hpp"
#include "cibp/feature_matrix.hpp"
#include "cibp/rng.hpp"

namespace cibp {

/// Finite purely-atomic measure: (weight, location) pairs with weights in
/// (0,1] and pairwise-distinct locations in [0,1].
struct Atom {
  double weight;
  double location;
};

struct AtomicMeasure {
  std::vector<Atom> atoms;
};

/// One Bernoulli-process draw against a measure: the locations included.
struct BernoulliRow {
  std::vector<double> included;
};

/// Feature matrix with an atom location attached to every column; the base
/// measure is uniform on [0,1], so locations act purely as labels.
struct LocatedMatrix {
  FeatureMatrix matrix;
  std::vector<double> locations;
};

/// Samples the process's random measure. The intensity
/// gamma/B(alpha,kappa+1) q^(alpha-1) (1-q)^kappa dq on (0,1] has total mass
/// gamma, so the draw is exact: Poisson(gamma) atoms, weights iid
/// Beta(alpha, kappa+1), locations iid Uniform[0,1] (duplicates redrawn).
AtomicMeasure sample_crm(const CibpParams& params, RngStream& rng);

/// Includes each atom independently with probability equal to its weight.
/// Throws std::domain_error if any weight lies outside (0,1].
BernoulliRow sample_bernoulli_row(const AtomicMeasure& mu, RngStream& rng);

/// p conditionally-iid Bernoulli rows against one sampled measure, reported
/// as a feature matrix over the atoms hit by at least one row (in atom
/// order), with their locations.
LocatedMatrix rows_from_crm_located(const CibpParams& params, std::size_t p, RngStream& rng);

/// Same, without the location labels.
FeatureMatrix rows_from_crm(const CibpParams& params, std::size_t p, RngStream& rng);

/// Joint log-density of p rows under the random-measure representation:
///   -gamma (1 - Bbar^{0,p}) + sum_k [ log Bbar^{m_k, p-m_k} + log lambda0(w_k) ]
/// with lambda0 identically 1 on [0,1]. Differs from the left-ordered pmf by
/// the labeling factor: lof_log_pmf = joint_log_density + K+ log gamma
/// - sum_u log K_u!. Throws std::domain_error when a location leaves [0,1].
double joint_log_density(const LocatedMatrix& rows, const CibpParams& params);

/// Conjugate one-step posterior predictive: keeps the atom of nonzero
/// history column k with probability (m_k + alpha)/(p + kappa + alpha) and
/// creates Poisson(gamma Bbar^{1,p-1}) fresh atoms at new uniform locations.
BernoulliRow posterior_predictive_row(const LocatedMatrix& history, const CibpParams& params,
                                      RngStream& rng);

/// History extended by a predictive row; fresh locations become new columns.
LocatedMatrix append_posterior_predictive_row(const LocatedMatrix& history,
                                              const BernoulliRow& row);

}  // namespace cibp
