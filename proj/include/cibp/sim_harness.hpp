#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "cibp/factor_model.hpp"

namespace cibp {

struct McmcSettings {
  std::size_t iters = 2000;
  std::size_t burn_in = 500;
};

/// Declarative description of the simulation grid: for every dimension p and
/// replication, one synthetic data set is analyzed under each requested
/// prior arm.
struct ExperimentConfig {
  std::vector<std::size_t> p_grid;
  std::size_t n = 50;
  std::size_t k_true = 4;
  std::size_t nonzero_rows = 10;
  std::size_t replications = 5;
  CibpParams cibp{1.0, 10.0, 10.0};
  IbpParams ibp{1.0, 10.0};
  double tau = 2.5;
  double a = 1.0;
  double b = 1.0;
  McmcSettings mcmc;
  std::uint64_t seed = 0;
  std::vector<std::string> arms{"CIBP", "IBP"};

  void validate() const;

  /// Desk-scale defaults: pared-down replication count and chain length on
  /// the standard grid.
  static ExperimentConfig desk_default();
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses the versioned JSON schema (see README); throws ConfigError on any
/// schema violation.
ExperimentConfig experiment_config_from_json_text(const std::string& text);

/// One replication's outcome. Wall time is measured, so it is reported only
/// through the API and logs, never in the deterministic CSV outputs.
struct RunRecord {
  std::size_t p;
  std::size_t replication;
  std::string prior;  // "CIBP" or "IBP"
  double mean_kplus;
  double mean_sigma2;
  double wall_seconds;
};

struct AggregateRow {
  std::size_t p;
  std::string prior;
  double mean_kplus;
  double se;
  std::size_t cells;
};

struct ExperimentResult {
  std::vector<RunRecord> records;      // sorted by (p, prior, replication)
  std::vector<AggregateRow> aggregate;  // sorted by (p, prior)
  std::size_t aborted = 0;             // chains lost to numerical errors
};

/// Sparse-loading synthetic data: nonzero_rows distinct rows of the p x
/// k_true loading matrix get entries uniform on (-3,-2) U (2,3) (fair-coin
/// sign, magnitude uniform on (2,3)); observations are n draws from
/// N(0, B0 B0^T + I), generated as B0 z + e.
std::pair<Dataset, Eigen::MatrixXd> generate_synthetic(std::size_t p, std::size_t n,
                                                       std::size_t k_true,
                                                       std::size_t nonzero_rows,
                                                       RngStream& rng);

/// Runs every (p, replication, arm) cell, in parallel across at most jobs
/// threads (jobs = 0 uses the hardware concurrency). Per-cell streams are
/// derived by hashing (seed, p, replication, label); the data stream of a
/// (p, replication) pair is shared across arms so the comparison is paired.
/// Aborted cells are dropped from records and aggregates and counted.
ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t jobs = 0);

/// records.csv: p,replication,prior,mean_kplus,mean_sigma2.
void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records);

/// aggregate.csv: p,prior,mean_kplus,se,cells.
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);

}  // namespace cibp
