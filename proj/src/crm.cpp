#include "cibp/crm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cibp {

AtomicMeasure sample_crm(const CibpParams& params, RngStream& rng) {
  AtomicMeasure mu;
  const long k = rng.poisson(params.gamma);
  mu.atoms.reserve(static_cast<std::size_t>(k));
  for (long c = 0; c < k; ++c) {
    double weight;
    do {
      weight = rng.beta(params.alpha, params.kappa + 1.0);
    } while (!(weight > 0.0) || !(weight <= 1.0));
    double location = rng.uniform();
    // Location ties have probability zero but are possible in finite
    // precision; redraw until distinct.
    auto collides = [&](double loc) {
      return std::any_of(mu.atoms.begin(), mu.atoms.end(),
                         [&](const Atom& a) { return a.location == loc; });
    };
    while (collides(location)) location = rng.uniform();
    mu.atoms.push_back({weight, location});
  }
  return mu;
}

BernoulliRow sample_bernoulli_row(const AtomicMeasure& mu, RngStream& rng) {
  BernoulliRow row;
  for (const Atom& atom : mu.atoms) {
    if (!(atom.weight > 0.0) || !(atom.weight <= 1.0))
      throw std::domain_error("sample_bernoulli_row: atom weight outside (0,1]");
    if (rng.uniform() < atom.weight) row.included.push_back(atom.location);
  }
  return row;
}

LocatedMatrix rows_from_crm_located(const CibpParams& params, std::size_t p, RngStream& rng) {
  const AtomicMeasure mu = sample_crm(params, rng);
  std::vector<std::vector<std::uint8_t>> hits(mu.atoms.size(),
                                              std::vector<std::uint8_t>(p, 0));
  for (std::size_t j = 0; j < p; ++j) {
    const BernoulliRow row = sample_bernoulli_row(mu, rng);
    for (const double loc : row.included) {
      for (std::size_t a = 0; a < mu.atoms.size(); ++a) {
        if (mu.atoms[a].location == loc) {
          hits[a][j] = 1;
          break;
        }
      }
    }
  }

  LocatedMatrix out;
  out.matrix = FeatureMatrix(p);
  for (std::size_t a = 0; a < mu.atoms.size(); ++a) {
    if (std::none_of(hits[a].begin(), hits[a].end(), [](std::uint8_t h) { return h != 0; }))
      continue;  // unhit atoms stay internal to the measure
    const std::size_t col = out.matrix.append_column();
    for (std::size_t j = 0; j < p; ++j)
      if (hits[a][j]) out.matrix.set(j, col, true);
    out.locations.push_back(mu.atoms[a].location);
  }
  return out;
}

FeatureMatrix rows_from_crm(const CibpParams& params, std::size_t p, RngStream& rng) {
  return rows_from_crm_located(params, p, rng).matrix;
}

double joint_log_density(const LocatedMatrix& rows, const CibpParams& params) {
  const std::size_t p = rows.matrix.rows();
  if (p == 0) throw std::invalid_argument("joint_log_density: rows must be nonempty");
  if (rows.locations.size() != rows.matrix.cols())
    throw std::invalid_argument("joint_log_density: one location per column required");

  double sum = -kplus_mean(params, static_cast<long>(p));
  for (std::size_t k = 0; k < rows.matrix.cols(); ++k) {
    const double loc = rows.locations[k];
    if (!(loc >= 0.0) || !(loc <= 1.0))
      throw std::domain_error("joint_log_density: location outside [0,1]");
    const auto m = static_cast<double>(rows.matrix.column_ones(k));
    if (m == 0.0) continue;  // not an observed atom
    sum += log_beta_ratio({params.alpha, params.kappa + 1.0, m, static_cast<double>(p) - m});
    // + log lambda0(loc), identically zero for the uniform base measure
  }
  return sum;
}

BernoulliRow posterior_predictive_row(const LocatedMatrix& history, const CibpParams& params,
                                      RngStream& rng) {
  if (history.locations.size() != history.matrix.cols())
    throw std::invalid_argument("posterior_predictive_row: one location per column required");
  const std::size_t p = history.matrix.rows() + 1;
  const double denom = static_cast<double>(p) + params.kappa + params.alpha;

  BernoulliRow row;
  for (std::size_t k = 0; k < history.matrix.cols(); ++k) {
    const std::size_t m = history.matrix.column_ones(k);
    if (m == 0) continue;
    if (rng.bernoulli((static_cast<double>(m) + params.alpha) / denom))
      row.included.push_back(history.locations[k]);
  }
  const long fresh = rng.poisson(new_dish_rate(params, static_cast<long>(p)));
  for (long t = 0; t < fresh; ++t) {
    double location = rng.uniform();
    auto taken = [&](double loc) {
      return std::find(history.locations.begin(), history.locations.end(), loc) !=
                 history.locations.end() ||
             std::find(row.included.begin(), row.included.end(), loc) != row.included.end();
    };
    while (taken(location)) location = rng.uniform();
    row.included.push_back(location);
  }
  return row;
}

LocatedMatrix append_posterior_predictive_row(const LocatedMatrix& history,
                                              const BernoulliRow& row) {
  const std::size_t p = history.matrix.rows() + 1;
  LocatedMatrix out;
  out.matrix = FeatureMatrix(p);
  out.locations = history.locations;
  for (std::size_t k = 0; k < history.matrix.cols(); ++k) {
    const std::size_t col = out.matrix.append_column();
    for (std::size_t j = 0; j + 1 < p; ++j)
      if (history.matrix.get(j, k)) out.matrix.set(j, col, true);
  }
  for (const double loc : row.included) {
    const auto it = std::find(history.locations.begin(), history.locations.end(), loc);
    if (it != history.locations.end()) {
      out.matrix.set(p - 1, static_cast<std::size_t>(it - history.locations.begin()), true);
    } else {
      const std::size_t col = out.matrix.append_column();
      out.matrix.set(p - 1, col, true);
      out.locations.push_back(loc);
    }
  }
  return out;
}

}  // namespace cibp
