#include "cibp/factor_model.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "cibp/cibp_samplers.hpp"

namespace cibp {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// Residual matrix R = Y - Z B^T, one column per observed variable.
Eigen::MatrixXd residuals(const FactorState& state, const Dataset& data) {
  if (state.k_plus() == 0) return data.Y;
  return data.Y - state.Z * state.B.transpose();
}

void ensure_finite(double value, const char* what) {
  if (!std::isfinite(value)) throw std::runtime_error(std::string(what) + " is not finite");
}

}  // namespace

DataParseError::DataParseError(const std::string& message, std::size_t line_number)
    : std::runtime_error("line " + std::to_string(line_number) + ": " + message),
      line(line_number) {}

Dataset read_dataset_csv(std::istream& in, bool header) {
  std::string line;
  std::size_t line_number = 0;
  if (header) {
    ++line_number;
    if (!std::getline(in, line)) throw DataParseError("missing header line", line_number);
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used])))
          ++used;
        if (used != cell.size()) throw std::invalid_argument(cell);
        row.push_back(v);
      } catch (const std::exception&) {
        throw DataParseError("cannot parse value \"" + cell + "\"", line_number);
      }
    }
    if (row.empty()) throw DataParseError("empty row", line_number);
    if (!rows.empty() && row.size() != rows.front().size())
      throw DataParseError("inconsistent column count", line_number);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataParseError("no data rows", line_number + 1);

  Dataset data;
  data.Y.resize(static_cast<Eigen::Index>(rows.size()),
                static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.front().size(); ++j)
      data.Y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  for (Eigen::Index i = 0; i < data.Y.size(); ++i)
    if (!std::isfinite(data.Y.data()[i]))
      throw DataParseError("non-finite entry", rows.size());
  return data;
}

double FactorPrior::existing_feature_log_odds(std::size_t m_others, std::size_t p) const {
  const double m = static_cast<double>(m_others);
  const double pd = static_cast<double>(p);
  if (is_ibp()) {
    if (m_others == 0) return -std::numeric_limits<double>::infinity();
    return std::log(m) - std::log(ibp().kappa + pd - m);
  }
  const CibpParams& c = cibp();
  return std::log(m + c.alpha) - std::log(c.kappa + pd - m);
}

double FactorPrior::new_feature_log_rate(std::size_t p) const {
  const double pd = static_cast<double>(p);
  if (is_ibp()) return std::log(ibp().omega * ibp().kappa / (pd + ibp().kappa));
  const CibpParams& c = cibp();
  return std::log(c.gamma) + log_beta_ratio({c.alpha, c.kappa + 1.0, 1.0, pd - 1.0});
}

FactorState FactorState::initial(std::size_t p, std::size_t n) {
  FactorState state;
  state.B.resize(static_cast<Eigen::Index>(p), 0);
  state.Xi.resize(static_cast<Eigen::Index>(p), 0);
  state.Z.resize(static_cast<Eigen::Index>(n), 0);
  state.sigma2 = 1.0;
  return state;
}

ChainNumericalError::ChainNumericalError(const std::string& message, std::size_t iteration_)
    : std::runtime_error("iteration " + std::to_string(iteration_) + ": " + message),
      iteration(iteration_) {}

void gibbs_beta(FactorState& state, const Dataset& data, const FactorPrior& prior,
                RngStream& rng) {
  const auto p = static_cast<Eigen::Index>(state.p());
  const auto k_plus = static_cast<Eigen::Index>(state.k_plus());
  if (k_plus == 0) return;

  Eigen::MatrixXd r = residuals(state, data);
  const double inv_sigma2 = 1.0 / state.sigma2;
  for (Eigen::Index k = 0; k < k_plus; ++k) {
    const double zk2 = state.Z.col(k).squaredNorm();
    const double tau_hat = 1.0 / (inv_sigma2 * zk2 + 1.0 / prior.tau);
    const double sd = std::sqrt(tau_hat);
    for (Eigen::Index j = 0; j < p; ++j) {
      if (state.Xi(j, k) == 0) {
        state.B(j, k) = 0.0;
        continue;
      }
      const double old = state.B(j, k);
      // Z_k . (Y_j - sum_{h != k} Z_h beta_jh), recovered from the full
      // residual by adding the k-th term back.
      const double dot = state.Z.col(k).dot(r.col(j)) + zk2 * old;
      const double beta_hat = tau_hat * inv_sigma2 * dot;
      ensure_finite(beta_hat, "gibbs_beta: conditional mean");
      const double fresh = rng.normal(beta_hat, sd);
      state.B(j, k) = fresh;
      r.col(j) -= state.Z.col(k) * (fresh - old);
    }
  }
}

XiConditional xi_conditional(const FactorState& state, const Dataset& data,
                             const FactorPrior& prior, std::size_t j, std::size_t k) {
  const auto jj = static_cast<Eigen::Index>(j);
  const auto kk = static_cast<Eigen::Index>(k);
  const double inv_sigma2 = 1.0 / state.sigma2;
  const double zk2 = state.Z.col(kk).squaredNorm();
  const double tau_hat = 1.0 / (inv_sigma2 * zk2 + 1.0 / prior.tau);

  // Residual for variable j with column k excluded; B(j,k) is zero whenever
  // xi_jk = 0, so adding the k-th term back is exact in both cases.
  Eigen::VectorXd rj = data.Y.col(jj);
  if (state.k_plus() > 0) rj.noalias() -= state.Z * state.B.row(jj).transpose();
  const double dot = state.Z.col(kk).dot(rj) + zk2 * state.B(jj, kk);
  const double beta_hat = tau_hat * inv_sigma2 * dot;

  std::size_t m_others = 0;
  for (Eigen::Index l = 0; l < state.Xi.rows(); ++l)
    if (l != jj && state.Xi(l, kk) != 0) ++m_others;
  return {tau_hat, beta_hat, m_others};
}

namespace {

double xi_log_odds_from(const XiConditional& cond, const FactorPrior& prior, std::size_t p) {
  return prior.existing_feature_log_odds(cond.m_others, p) +
         0.5 * (std::log(cond.tau_hat) - std::log(prior.tau)) +
         cond.beta_hat * cond.beta_hat / (2.0 * cond.tau_hat);
}

// Shared flip logic; updates the state and, when given, the cached residual
// column for variable j.
void apply_xi_draw(FactorState& state, const XiConditional& cond, const FactorPrior& prior,
                   std::size_t j, std::size_t k, RngStream& rng, Eigen::MatrixXd* r) {
  const auto jj = static_cast<Eigen::Index>(j);
  const auto kk = static_cast<Eigen::Index>(k);
  const double log_odds = xi_log_odds_from(cond, prior, state.p());
  const double prob_one = 1.0 / (1.0 + std::exp(-log_odds));
  const bool next = rng.uniform() < prob_one;
  const bool current = state.Xi(jj, kk) != 0;
  if (next == current) return;
  if (next) {
    const double fresh = rng.normal(cond.beta_hat, std::sqrt(cond.tau_hat));
    state.Xi(jj, kk) = 1;
    state.B(jj, kk) = fresh;
    if (r) r->col(jj) -= state.Z.col(kk) * fresh;
  } else {
    const double old = state.B(jj, kk);
    state.Xi(jj, kk) = 0;
    state.B(jj, kk) = 0.0;
    if (r) r->col(jj) += state.Z.col(kk) * old;
  }
}

}  // namespace

double xi_log_odds(const FactorState& state, const Dataset& data, const FactorPrior& prior,
                   std::size_t j, std::size_t k) {
  return xi_log_odds_from(xi_conditional(state, data, prior, j, k), prior, state.p());
}

void sample_xi_entry(FactorState& state, const Dataset& data, const FactorPrior& prior,
                     std::size_t j, std::size_t k, RngStream& rng) {
  const XiConditional cond = xi_conditional(state, data, prior, j, k);
  ensure_finite(cond.beta_hat, "sample_xi_entry: conditional mean");
  apply_xi_draw(state, cond, prior, j, k, rng, nullptr);
}

void gibbs_xi_existing(FactorState& state, const Dataset& data, const FactorPrior& prior,
                       RngStream& rng) {
  const auto p = static_cast<Eigen::Index>(state.p());
  const auto k_plus = static_cast<Eigen::Index>(state.k_plus());
  if (k_plus == 0) return;

  Eigen::MatrixXd r = residuals(state, data);
  const double inv_sigma2 = 1.0 / state.sigma2;

  std::vector<double> zk2(static_cast<std::size_t>(k_plus));
  std::vector<double> tau_hat(static_cast<std::size_t>(k_plus));
  for (Eigen::Index k = 0; k < k_plus; ++k) {
    zk2[static_cast<std::size_t>(k)] = state.Z.col(k).squaredNorm();
    tau_hat[static_cast<std::size_t>(k)] =
        1.0 / (inv_sigma2 * zk2[static_cast<std::size_t>(k)] + 1.0 / prior.tau);
  }
  std::vector<std::size_t> col_sums(static_cast<std::size_t>(k_plus), 0);
  for (Eigen::Index k = 0; k < k_plus; ++k)
    col_sums[static_cast<std::size_t>(k)] =
        static_cast<std::size_t>(state.Xi.col(k).sum());

  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index k = 0; k < k_plus; ++k) {
      const auto ks = static_cast<std::size_t>(k);
      const bool current = state.Xi(j, k) != 0;
      const double dot = state.Z.col(k).dot(r.col(j)) + zk2[ks] * state.B(j, k);
      XiConditional cond;
      cond.tau_hat = tau_hat[ks];
      cond.beta_hat = cond.tau_hat * inv_sigma2 * dot;
      cond.m_others = col_sums[ks] - (current ? 1 : 0);
      ensure_finite(cond.beta_hat, "gibbs_xi_existing: conditional mean");
      apply_xi_draw(state, cond, prior, static_cast<std::size_t>(j),
                    static_cast<std::size_t>(k), rng, &r);
      const bool next = state.Xi(j, k) != 0;
      if (next != current) col_sums[ks] += next ? 1 : -1;
    }
  }
}

bool mh_new_features(FactorState& state, const Dataset& data, const FactorPrior& prior,
                     std::size_t j, RngStream& rng) {
  const auto jj = static_cast<Eigen::Index>(j);
  const auto n = static_cast<Eigen::Index>(data.n());
  const long k_star = rng.poisson(1.0);
  if (k_star == 0) return true;

  Eigen::VectorXd beta_star(k_star);
  const double slab_sd = std::sqrt(prior.tau);
  for (long t = 0; t < k_star; ++t) beta_star(t) = rng.normal(0.0, slab_sd);

  const double inv_sigma2 = 1.0 / state.sigma2;
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(k_star, k_star);
  m.noalias() += inv_sigma2 * beta_star * beta_star.transpose();
  const Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("mh_new_features: factorization failed");
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const double quad = beta_star.dot(llt.solve(beta_star));

  Eigen::VectorXd rj = data.Y.col(jj);
  if (state.k_plus() > 0) rj.noalias() -= state.Z * state.B.row(jj).transpose();
  const double sum_e2 = inv_sigma2 * inv_sigma2 * rj.squaredNorm();

  const double log_accept = -0.5 * static_cast<double>(n) * log_det +
                            0.5 * quad * sum_e2 +
                            static_cast<double>(k_star) * prior.new_feature_log_rate(state.p());
  ensure_finite(sum_e2, "mh_new_features: residual");
  // exp is only ever taken of a negative exponent.
  if (log_accept < 0.0 && !(rng.uniform() < std::exp(log_accept))) return false;

  const auto p = static_cast<Eigen::Index>(state.p());
  const auto old_k = static_cast<Eigen::Index>(state.k_plus());
  state.B.conservativeResize(p, old_k + k_star);
  state.Xi.conservativeResize(p, old_k + k_star);
  state.Z.conservativeResize(n, old_k + k_star);
  for (long t = 0; t < k_star; ++t) {
    const Eigen::Index k = old_k + t;
    state.B.col(k).setZero();
    state.Xi.col(k).setZero();
    state.B(jj, k) = beta_star(t);
    state.Xi(jj, k) = 1;
    for (Eigen::Index i = 0; i < n; ++i) state.Z(i, k) = rng.normal();
  }
  return true;
}

void gibbs_z(FactorState& state, const Dataset& data, RngStream& rng) {
  const auto n = static_cast<Eigen::Index>(data.n());
  const auto k_plus = static_cast<Eigen::Index>(state.k_plus());
  if (k_plus == 0) {
    state.Z.resize(n, 0);
    return;
  }
  const double inv_sigma2 = 1.0 / state.sigma2;
  Eigen::MatrixXd precision = Eigen::MatrixXd::Identity(k_plus, k_plus);
  precision.noalias() += inv_sigma2 * state.B.transpose() * state.B;
  const Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("gibbs_z: posterior precision is not positive definite");

  // Means for all rows at once: Sigma_hat B^T Y_i / sigma2.
  Eigen::MatrixXd means = llt.solve(inv_sigma2 * state.B.transpose() * data.Y.transpose());
  Eigen::VectorXd eps(k_plus);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < k_plus; ++k) eps(k) = rng.normal();
    // L^{-T} eps has covariance (L L^T)^{-1} = Sigma_hat.
    state.Z.row(i) =
        (means.col(i) + llt.matrixU().solve(eps)).transpose();
  }
  if (!state.Z.allFinite())
    throw std::runtime_error("gibbs_z: non-finite factor draw");
}

void gibbs_sigma2(FactorState& state, const Dataset& data, const FactorPrior& prior,
                  RngStream& rng) {
  const double rss = residuals(state, data).squaredNorm();
  ensure_finite(rss, "gibbs_sigma2: residual sum of squares");
  const double shape = prior.a + 0.5 * static_cast<double>(data.n() * data.p());
  const double scale = prior.b + 0.5 * rss;
  state.sigma2 = rng.inverse_gamma(shape, scale);
  ensure_finite(state.sigma2, "gibbs_sigma2: draw");
}

void prune_zero_columns(FactorState& state) {
  const auto k_plus = static_cast<Eigen::Index>(state.k_plus());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < k_plus; ++k)
    if (state.Xi.col(k).sum() > 0) keep.push_back(k);
  if (static_cast<Eigen::Index>(keep.size()) == k_plus) return;

  const auto p = static_cast<Eigen::Index>(state.p());
  const auto n = static_cast<Eigen::Index>(state.n());
  Eigen::MatrixXd b(p, static_cast<Eigen::Index>(keep.size()));
  Eigen::MatrixXi xi(p, static_cast<Eigen::Index>(keep.size()));
  Eigen::MatrixXd z(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t idx = 0; idx < keep.size(); ++idx) {
    b.col(static_cast<Eigen::Index>(idx)) = state.B.col(keep[idx]);
    xi.col(static_cast<Eigen::Index>(idx)) = state.Xi.col(keep[idx]);
    z.col(static_cast<Eigen::Index>(idx)) = state.Z.col(keep[idx]);
  }
  state.B = std::move(b);
  state.Xi = std::move(xi);
  state.Z = std::move(z);
}

double log_likelihood(const FactorState& state, const Dataset& data) {
  const double rss = residuals(state, data).squaredNorm();
  const double np = static_cast<double>(data.n() * data.p());
  return -0.5 * np * (kLog2Pi + std::log(state.sigma2)) - 0.5 * rss / state.sigma2;
}

FactorState initial_state(const Dataset& data, const FactorPrior& prior, RngStream& rng) {
  // Sparsity pattern from the feature process prior, loadings from the slab,
  // factors from their prior, noise variance at the marginal data variance.
  FeatureMatrix pattern;
  if (prior.is_ibp())
    pattern = sample_ibp(prior.ibp(), data.p(), rng);
  else
    pattern = sample_restaurant(prior.cibp(), data.p(), rng);

  const auto p = static_cast<Eigen::Index>(data.p());
  const auto n = static_cast<Eigen::Index>(data.n());
  const auto k = static_cast<Eigen::Index>(pattern.cols());
  FactorState state;
  state.B = Eigen::MatrixXd::Zero(p, k);
  state.Xi = Eigen::MatrixXi::Zero(p, k);
  state.Z.resize(n, k);
  const double slab_sd = std::sqrt(prior.tau);
  for (Eigen::Index col = 0; col < k; ++col)
    for (Eigen::Index j = 0; j < p; ++j)
      if (pattern.get(static_cast<std::size_t>(j), static_cast<std::size_t>(col))) {
        state.Xi(j, col) = 1;
        state.B(j, col) = rng.normal(0.0, slab_sd);
      }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index col = 0; col < k; ++col) state.Z(i, col) = rng.normal();
  state.sigma2 = std::max(1e-12, data.Y.array().square().mean());
  return state;
}

ChainResult run_chain(const Dataset& data, const FactorPrior& prior, std::size_t iters,
                      std::size_t burn_in, RngStream rng) {
  if (iters == 0) throw std::invalid_argument("run_chain: iters must be positive");
  if (burn_in >= iters) throw std::invalid_argument("run_chain: burn_in must be below iters");

  ChainResult result;
  result.state = initial_state(data, prior, rng);
  result.trace.reserve(iters);
  for (std::size_t it = 1; it <= iters; ++it) {
    try {
      gibbs_beta(result.state, data, prior, rng);
      gibbs_xi_existing(result.state, data, prior, rng);
      for (std::size_t j = 0; j < data.p(); ++j)
        mh_new_features(result.state, data, prior, j, rng);
      prune_zero_columns(result.state);
      gibbs_z(result.state, data, rng);
      gibbs_sigma2(result.state, data, prior, rng);
    } catch (const std::exception& e) {
      throw ChainNumericalError(e.what(), it);
    }
    const double loglik = log_likelihood(result.state, data);
    if (!std::isfinite(loglik) || !(result.state.sigma2 > 0.0))
      throw ChainNumericalError("non-finite state after sweep", it);
    result.trace.push_back({it, result.state.k_plus(), result.state.sigma2, loglik});
  }
  return result;
}

namespace {

double trace_mean(const std::vector<TraceRow>& trace, std::size_t burn_in,
                  double (*pick)(const TraceRow&)) {
  if (burn_in >= trace.size())
    throw std::invalid_argument("posterior mean: burn_in leaves no samples");
  double sum = 0.0;
  for (std::size_t i = burn_in; i < trace.size(); ++i) sum += pick(trace[i]);
  return sum / static_cast<double>(trace.size() - burn_in);
}

}  // namespace

double posterior_mean_kplus(const std::vector<TraceRow>& trace, std::size_t burn_in) {
  return trace_mean(trace, burn_in,
                    [](const TraceRow& r) { return static_cast<double>(r.k_plus); });
}

double posterior_mean_sigma2(const std::vector<TraceRow>& trace, std::size_t burn_in) {
  return trace_mean(trace, burn_in, [](const TraceRow& r) { return r.sigma2; });
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << "iter,k_plus,sigma2,loglik\n";
  char buffer[128];
  for (const TraceRow& row : trace) {
    std::snprintf(buffer, sizeof(buffer), "%zu,%zu,%.12g,%.12g\n", row.iter, row.k_plus,
                  row.sigma2, row.loglik);
    out << buffer;
  }
}

}  // namespace cibp
