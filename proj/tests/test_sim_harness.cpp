#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cibp/sim_harness.hpp"

using cibp::ExperimentConfig;
using cibp::RngStream;

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig config = ExperimentConfig::desk_default();
  config.p_grid = {12};
  config.n = 8;
  config.k_true = 1;
  config.nonzero_rows = 2;
  config.replications = 1;
  config.mcmc = {30, 5};
  config.seed = 555;
  return config;
}

}  // namespace

TEST_CASE("generate_synthetic: support and degenerate cases") {
  RngStream rng(500, 0);
  auto [data, b0] = cibp::generate_synthetic(10, 5, 3, 4, rng);
  CHECK(data.n() == 5);
  CHECK(data.p() == 10);
  std::size_t nonzero_rows = 0;
  for (Eigen::Index j = 0; j < b0.rows(); ++j) {
    bool any = false;
    for (Eigen::Index k = 0; k < b0.cols(); ++k) {
      const double v = b0(j, k);
      if (v == 0.0) continue;
      any = true;
      CHECK(std::fabs(v) > 2.0);
      CHECK(std::fabs(v) < 3.0);
    }
    // Rows are either fully populated or fully zero.
    for (Eigen::Index k = 0; k < b0.cols(); ++k) CHECK((b0(j, k) != 0.0) == any);
    nonzero_rows += any;
  }
  CHECK(nonzero_rows == 4);

  // nonzero_rows = 0: pure noise.
  auto [noise, zero_b] = cibp::generate_synthetic(3, 20000, 2, 0, rng);
  CHECK(zero_b.isZero());
  const Eigen::MatrixXd cov =
      noise.Y.transpose() * noise.Y / static_cast<double>(noise.n());
  CHECK((cov - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 0.1);

  CHECK_THROWS_AS(cibp::generate_synthetic(3, 5, 2, 4, rng), std::invalid_argument);
}

TEST_CASE("generate_synthetic: sample covariance converges to B0 B0^T + I") {
  RngStream rng(501, 0);
  auto [data, b0] = cibp::generate_synthetic(3, 100000, 1, 2, rng);
  const Eigen::MatrixXd target =
      b0 * b0.transpose() + Eigen::MatrixXd::Identity(3, 3);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(3, 3);
  for (Eigen::Index i = 0; i < data.Y.rows(); ++i)
    cov += data.Y.row(i).transpose() * data.Y.row(i);
  cov /= static_cast<double>(data.n());
  CHECK((cov - target).cwiseAbs().maxCoeff() <= 0.1);
}

TEST_CASE("run_experiment: single cell") {
  ExperimentConfig config = tiny_config();
  config.arms = {"CIBP"};
  const cibp::ExperimentResult result = cibp::run_experiment(config, 1);
  REQUIRE(result.records.size() == 1);
  CHECK(result.records[0].p == 12);
  CHECK(result.records[0].prior == "CIBP");
  CHECK(result.records[0].mean_kplus >= 0.0);
  CHECK(result.records[0].wall_seconds >= 0.0);
  REQUIRE(result.aggregate.size() == 1);
  CHECK(result.aggregate[0].cells == 1);
  CHECK(result.aggregate[0].se == 0.0);
  CHECK(result.aborted == 0);
}

TEST_CASE("run_experiment: deterministic, order-free, thread-count-free") {
  ExperimentConfig config = tiny_config();
  config.p_grid = {12, 9};
  config.replications = 2;

  const auto aggregate_text = [](const cibp::ExperimentResult& result) {
    std::ostringstream out;
    cibp::write_aggregate_csv(out, result.aggregate);
    return out.str();
  };
  const auto records_text = [](const cibp::ExperimentResult& result) {
    std::ostringstream out;
    cibp::write_records_csv(out, result.records);
    return out.str();
  };

  const cibp::ExperimentResult serial = cibp::run_experiment(config, 1);
  const cibp::ExperimentResult parallel = cibp::run_experiment(config, 4);
  CHECK(aggregate_text(serial) == aggregate_text(parallel));
  CHECK(records_text(serial) == records_text(parallel));

  ExperimentConfig reordered = config;
  reordered.p_grid = {9, 12};
  const cibp::ExperimentResult swapped = cibp::run_experiment(reordered, 2);
  CHECK(aggregate_text(serial) == aggregate_text(swapped));
  CHECK(records_text(serial) == records_text(swapped));
}

TEST_CASE("config json parsing and validation") {
  const std::string good = R"({
    "version": 1,
    "p_grid": [10, 20],
    "n": 12, "k_true": 2, "nonzero_rows": 3, "replications": 2,
    "cibp": {"gamma": 1.0, "alpha": 10.0, "kappa": 10.0},
    "ibp": {"omega": 1.0, "kappa": 10.0},
    "tau": 1.0, "a": 1.0, "b": 1.0,
    "mcmc": {"iters": 100, "burn_in": 20},
    "seed": 42,
    "arms": ["CIBP"]
  })";
  const ExperimentConfig config = cibp::experiment_config_from_json_text(good);
  CHECK(config.p_grid == std::vector<std::size_t>{10, 20});
  CHECK(config.cibp.alpha == 10.0);
  CHECK(config.arms == std::vector<std::string>{"CIBP"});
  CHECK(config.seed == 42);

  CHECK_THROWS_AS(cibp::experiment_config_from_json_text("not json"), cibp::ConfigError);
  CHECK_THROWS_AS(cibp::experiment_config_from_json_text("{}"), cibp::ConfigError);

  std::string bad_version = good;
  bad_version.replace(bad_version.find("\"version\": 1"), 12, "\"version\": 9");
  CHECK_THROWS_AS(cibp::experiment_config_from_json_text(bad_version), cibp::ConfigError);

  std::string bad_rows = good;
  bad_rows.replace(bad_rows.find("\"nonzero_rows\": 3"), 17, "\"nonzero_rows\": 11");
  CHECK_THROWS_AS(cibp::experiment_config_from_json_text(bad_rows), cibp::ConfigError);

  std::string bad_arm = good;
  bad_arm.replace(bad_arm.find("[\"CIBP\"]"), 8, "[\"OTHER\"]");
  CHECK_THROWS_AS(cibp::experiment_config_from_json_text(bad_arm), cibp::ConfigError);

  std::string bad_burn = good;
  bad_burn.replace(bad_burn.find("\"burn_in\": 20"), 13, "\"burn_in\": 100");
  CHECK_THROWS_AS(cibp::experiment_config_from_json_text(bad_burn), cibp::ConfigError);
}

TEST_CASE("csv writers") {
  std::vector<cibp::RunRecord> records = {{10, 0, "CIBP", 3.25, 1.5, 0.12}};
  std::ostringstream rec;
  cibp::write_records_csv(rec, records);
  CHECK(rec.str() == "p,replication,prior,mean_kplus,mean_sigma2\n10,0,CIBP,3.25,1.5\n");

  std::vector<cibp::AggregateRow> rows = {{10, "CIBP", 3.25, 0.1, 5}};
  std::ostringstream agg;
  cibp::write_aggregate_csv(agg, rows);
  CHECK(agg.str() == "p,prior,mean_kplus,se,cells\n10,CIBP,3.25,0.1,5\n");
}
