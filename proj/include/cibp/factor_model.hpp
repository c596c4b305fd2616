#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cibp/beta_math.hpp"
#include "cibp/ibp.hpp"
#include "cibp/rng.hpp"

namespace cibp {

/// Observations, one sample per row (n x p).
struct Dataset {
  Eigen::MatrixXd Y;

  std::size_t n() const { return static_cast<std::size_t>(Y.rows()); }
  std::size_t p() const { return static_cast<std::size_t>(Y.cols()); }
};

/// Reads an n x p CSV of reals; with header = true the first line is
/// skipped. Throws DataParseError with a 1-based line number.
Dataset read_dataset_csv(std::istream& in, bool header = false);

struct DataParseError : std::runtime_error {
  DataParseError(const std::string& message, std::size_t line_number);
  std::size_t line;
};

/// Spike-and-slab prior for the loading matrix: a feature-allocation process
/// on the sparsity pattern (the convergent process, or its two-parameter
/// limit for the comparison arm), slab variance tau on active loadings, and
/// an InverseGamma(a, b) prior on the noise variance.
struct FactorPrior {
  std::variant<CibpParams, IbpParams> process;
  double tau;
  double a;
  double b;

  FactorPrior(CibpParams cibp_params, double tau_, double a_, double b_)
      : process(cibp_params), tau(tau_), a(a_), b(b_) {
    validate();
  }
  FactorPrior(IbpParams ibp_params, double tau_, double a_, double b_)
      : process(ibp_params), tau(tau_), a(a_), b(b_) {
    validate();
  }

  bool is_ibp() const { return std::holds_alternative<IbpParams>(process); }
  const CibpParams& cibp() const { return std::get<CibpParams>(process); }
  const IbpParams& ibp() const { return std::get<IbpParams>(process); }

  /// Prior odds that entry (j,k) is active given that m_others of the other
  /// p-1 rows are active: (m + alpha)/(kappa + p - m), and its alpha -> 0
  /// limit m/(kappa + p - m) for the two-parameter arm.
  double existing_feature_log_odds(std::size_t m_others, std::size_t p) const;

  /// Log rate of the per-row new-feature Poisson mass:
  /// log(gamma Bbar^{1,p-1}), or log(omega kappa/(p + kappa)) for the
  /// two-parameter arm.
  double new_feature_log_rate(std::size_t p) const;

 private:
  void validate() const {
    if (!(tau > 0.0)) throw std::domain_error("FactorPrior: tau must be positive");
    if (!(a > 0.0) || !(b > 0.0))
      throw std::domain_error("FactorPrior: inverse-gamma parameters must be positive");
  }
};

/// Full MCMC state. Loadings B are exactly zero wherever the sparsity
/// pattern Xi is zero; Z holds the latent factors; the column count is
/// B.cols().
struct FactorState {
  Eigen::MatrixXd B;   // p x K
  Eigen::MatrixXi Xi;  // p x K, entries 0/1
  Eigen::MatrixXd Z;   // n x K
  double sigma2 = 1.0;

  std::size_t p() const { return static_cast<std::size_t>(B.rows()); }
  std::size_t n() const { return static_cast<std::size_t>(Z.rows()); }
  std::size_t k_plus() const { return static_cast<std::size_t>(B.cols()); }

  static FactorState initial(std::size_t p, std::size_t n);
};

/// Thrown when a kernel produces non-finite state; run_chain tags it with
/// the 1-based iteration index.
struct ChainNumericalError : std::runtime_error {
  ChainNumericalError(const std::string& message, std::size_t iteration_);
  std::size_t iteration;
};

/// Resamples every active loading from its normal conditional
/// N(beta_hat_jk, tau_hat_k); inactive loadings stay exactly zero.
void gibbs_beta(FactorState& state, const Dataset& data, const FactorPrior& prior,
                RngStream& rng);

/// Collapsed conditional quantities for entry (j,k): the posterior slab
/// variance tau_hat_k, the posterior slab mean beta_hat_jk (computed with
/// beta_jk excluded), and the active count among the other rows.
struct XiConditional {
  double tau_hat;
  double beta_hat;
  std::size_t m_others;
};

XiConditional xi_conditional(const FactorState& state, const Dataset& data,
                             const FactorPrior& prior, std::size_t j, std::size_t k);

/// Posterior log-odds of xi_jk = 1: prior predictive odds times
/// sqrt(tau_hat/tau) exp(beta_hat^2 / (2 tau_hat)).
double xi_log_odds(const FactorState& state, const Dataset& data, const FactorPrior& prior,
                   std::size_t j, std::size_t k);

/// Resamples the single indicator xi_jk from its collapsed conditional; on a
/// flip to one the loading is drawn from its slab conditional, on a flip to
/// zero it is zeroed.
void sample_xi_entry(FactorState& state, const Dataset& data, const FactorPrior& prior,
                     std::size_t j, std::size_t k, RngStream& rng);

/// Sweeps sample_xi_entry over all rows and existing columns.
void gibbs_xi_existing(FactorState& state, const Dataset& data, const FactorPrior& prior,
                       RngStream& rng);

/// Metropolis-Hastings birth move for row j: proposes K* ~ Poisson(1) new
/// singleton features with loadings from N(0, tau) and accepts with
/// probability min(1, |M|^{-n/2} exp(q^T M^{-1} q sum_i E_ij^2 / 2) rate^K*)
/// where M = I + beta* beta*^T / sigma2 and E_ij is the residual over
/// sigma2. Accepted features get fresh standard-normal factor entries.
/// Returns whether the proposal was accepted (a K* = 0 proposal is accepted
/// with no state change).
bool mh_new_features(FactorState& state, const Dataset& data, const FactorPrior& prior,
                     std::size_t j, RngStream& rng);

/// Resamples every factor row Z_i ~ N(Sigma_hat B^T Y_i / sigma2, Sigma_hat)
/// with Sigma_hat = (B^T B / sigma2 + I)^{-1}, through a Cholesky
/// factorization.
void gibbs_z(FactorState& state, const Dataset& data, RngStream& rng);

/// Resamples sigma2 ~ InverseGamma(a + np/2, b + rss/2).
void gibbs_sigma2(FactorState& state, const Dataset& data, const FactorPrior& prior,
                  RngStream& rng);

/// Drops columns whose sparsity pattern is all zero, preserving order.
void prune_zero_columns(FactorState& state);

/// Gaussian log-likelihood of the data at the current state.
double log_likelihood(const FactorState& state, const Dataset& data);

/// Chain start: sparsity pattern drawn from the feature process prior,
/// loadings from the slab, factors from their prior, noise variance at the
/// marginal data variance.
FactorState initial_state(const Dataset& data, const FactorPrior& prior, RngStream& rng);

struct TraceRow {
  std::size_t iter;  // 1-based
  std::size_t k_plus;
  double sigma2;
  double loglik;
};

struct ChainResult {
  std::vector<TraceRow> trace;
  FactorState state;
};

/// Runs iters full sweeps (beta, existing indicators, per-row birth moves,
/// prune, factors, noise variance), recording the trace after each sweep.
/// burn_in must be smaller than iters; it is not applied here, only by the
/// posterior_mean_* helpers. Deterministic given the stream.
ChainResult run_chain(const Dataset& data, const FactorPrior& prior, std::size_t iters,
                      std::size_t burn_in, RngStream rng);

double posterior_mean_kplus(const std::vector<TraceRow>& trace, std::size_t burn_in);
double posterior_mean_sigma2(const std::vector<TraceRow>& trace, std::size_t burn_in);

/// Trace CSV: header iter,k_plus,sigma2,loglik.
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);

}  // namespace cibp
