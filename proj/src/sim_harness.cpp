#include "cibp/sim_harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>
#include <tuple>

#include <json.hpp>

namespace cibp {

void ExperimentConfig::validate() const {
  if (p_grid.empty()) throw ConfigError("config: p_grid must be nonempty");
  for (const std::size_t p : p_grid)
    if (p == 0) throw ConfigError("config: p values must be positive");
  if (n == 0 || k_true == 0 || replications == 0)
    throw ConfigError("config: counts must be positive");
  const std::size_t min_p = *std::min_element(p_grid.begin(), p_grid.end());
  if (nonzero_rows > min_p)
    throw ConfigError("config: nonzero_rows exceeds the smallest p");
  if (mcmc.iters == 0 || mcmc.burn_in >= mcmc.iters)
    throw ConfigError("config: burn_in must be below iters");
  if (!(tau > 0.0) || !(a > 0.0) || !(b > 0.0))
    throw ConfigError("config: tau, a, b must be positive");
  if (arms.empty()) throw ConfigError("config: at least one arm required");
  for (const std::string& arm : arms)
    if (arm != "CIBP" && arm != "IBP") throw ConfigError("config: unknown arm " + arm);
}

ExperimentConfig ExperimentConfig::desk_default() {
  ExperimentConfig config;
  config.p_grid = {50, 100, 200};
  config.n = 50;
  config.k_true = 4;
  config.nonzero_rows = 10;
  config.replications = 5;
  config.cibp = CibpParams{1.0, 10.0, 10.0};
  config.ibp = IbpParams{1.0, 10.0};
  config.tau = 2.5;
  config.a = 1.0;
  config.b = 1.0;
  config.mcmc = {2000, 500};
  config.seed = 0;
  return config;
}

ExperimentConfig experiment_config_from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  try {
    if (!doc.contains("version") || doc.at("version").get<int>() != 1)
      throw ConfigError("config: missing or unsupported version (expected 1)");
    ExperimentConfig config = ExperimentConfig::desk_default();
    config.p_grid = doc.at("p_grid").get<std::vector<std::size_t>>();
    config.n = doc.at("n").get<std::size_t>();
    config.k_true = doc.at("k_true").get<std::size_t>();
    config.nonzero_rows = doc.at("nonzero_rows").get<std::size_t>();
    config.replications = doc.at("replications").get<std::size_t>();
    const auto& cibp = doc.at("cibp");
    config.cibp = CibpParams{cibp.at("gamma").get<double>(), cibp.at("alpha").get<double>(),
                             cibp.at("kappa").get<double>()};
    const auto& ibp = doc.at("ibp");
    config.ibp = IbpParams{ibp.at("omega").get<double>(), ibp.at("kappa").get<double>()};
    config.tau = doc.at("tau").get<double>();
    config.a = doc.at("a").get<double>();
    config.b = doc.at("b").get<double>();
    const auto& mcmc = doc.at("mcmc");
    config.mcmc.iters = mcmc.at("iters").get<std::size_t>();
    config.mcmc.burn_in = mcmc.at("burn_in").get<std::size_t>();
    config.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("arms")) config.arms = doc.at("arms").get<std::vector<std::string>>();
    config.validate();
    return config;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: schema violation: ") + e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

std::pair<Dataset, Eigen::MatrixXd> generate_synthetic(std::size_t p, std::size_t n,
                                                       std::size_t k_true,
                                                       std::size_t nonzero_rows,
                                                       RngStream& rng) {
  if (nonzero_rows > p)
    throw std::invalid_argument("generate_synthetic: nonzero_rows exceeds p");

  // Partial Fisher-Yates pass selects nonzero_rows distinct rows uniformly.
  std::vector<std::size_t> rows(p);
  for (std::size_t i = 0; i < p; ++i) rows[i] = i;
  for (std::size_t i = 0; i < nonzero_rows; ++i) {
    const auto pick =
        i + static_cast<std::size_t>(rng.uniform() * static_cast<double>(p - i));
    std::swap(rows[i], rows[pick]);
  }

  Eigen::MatrixXd b0 = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p),
                                             static_cast<Eigen::Index>(k_true));
  for (std::size_t i = 0; i < nonzero_rows; ++i) {
    const auto row = static_cast<Eigen::Index>(rows[i]);
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(k_true); ++k) {
      const double magnitude = rng.uniform(2.0, 3.0);
      b0(row, k) = rng.bernoulli(0.5) ? magnitude : -magnitude;
    }
  }

  Dataset data;
  data.Y.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  Eigen::VectorXd z(static_cast<Eigen::Index>(k_true));
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = rng.normal();
    Eigen::VectorXd y = b0 * z;
    for (Eigen::Index j = 0; j < y.size(); ++j) y(j) += rng.normal();
    data.Y.row(i) = y.transpose();
  }
  return {std::move(data), std::move(b0)};
}

namespace {

struct Cell {
  std::size_t p;
  std::size_t replication;
  std::string prior;
};

FactorPrior arm_prior(const ExperimentConfig& config, const std::string& arm) {
  if (arm == "IBP") return FactorPrior{config.ibp, config.tau, config.a, config.b};
  return FactorPrior{config.cibp, config.tau, config.a, config.b};
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t jobs) {
  config.validate();

  std::vector<Cell> cells;
  for (const std::size_t p : config.p_grid)
    for (std::size_t rep = 0; rep < config.replications; ++rep)
      for (const std::string& arm : config.arms) cells.push_back({p, rep, arm});

  std::vector<RunRecord> slots(cells.size());
  std::vector<std::uint8_t> ok(cells.size(), 0);

  auto worker_body = [&](std::size_t index) {
    const Cell& cell = cells[index];
    // Data depends on (seed, p, replication) only, so both arms of a
    // replication analyze the same draw.
    RngStream data_rng(config.seed,
                       derive_stream(config.seed,
                                     {cell.p, cell.replication, hash_label("data")}));
    auto [data, b0] = generate_synthetic(cell.p, config.n, config.k_true,
                                         config.nonzero_rows, data_rng);
    (void)b0;
    RngStream chain_rng(config.seed,
                        derive_stream(config.seed, {cell.p, cell.replication,
                                                    hash_label(cell.prior)}));
    const auto start = std::chrono::steady_clock::now();
    try {
      const ChainResult result =
          run_chain(data, arm_prior(config, cell.prior), config.mcmc.iters,
                    config.mcmc.burn_in, chain_rng);
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      slots[index] = RunRecord{
          cell.p,
          cell.replication,
          cell.prior,
          posterior_mean_kplus(result.trace, config.mcmc.burn_in),
          posterior_mean_sigma2(result.trace, config.mcmc.burn_in),
          elapsed.count()};
      ok[index] = 1;
    } catch (const ChainNumericalError&) {
      ok[index] = 0;
    }
  };

  std::size_t thread_count = jobs != 0 ? jobs : std::thread::hardware_concurrency();
  if (thread_count == 0) thread_count = 1;
  thread_count = std::min(thread_count, cells.size());
  if (thread_count <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) worker_body(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (std::size_t t = 0; t < thread_count; ++t) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t index = next.fetch_add(1);
          if (index >= cells.size()) return;
          worker_body(index);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  ExperimentResult result;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (ok[i])
      result.records.push_back(slots[i]);
    else
      ++result.aborted;
  }
  std::sort(result.records.begin(), result.records.end(),
            [](const RunRecord& a, const RunRecord& b) {
              return std::tie(a.p, a.prior, a.replication) <
                     std::tie(b.p, b.prior, b.replication);
            });

  // Deterministic reduce over (p, prior) groups.
  for (std::size_t i = 0; i < result.records.size();) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < result.records.size() && result.records[j].p == result.records[i].p &&
           result.records[j].prior == result.records[i].prior) {
      sum += result.records[j].mean_kplus;
      ++j;
    }
    const auto count = static_cast<double>(j - i);
    const double mean = sum / count;
    double ss = 0.0;
    for (std::size_t t = i; t < j; ++t) {
      const double d = result.records[t].mean_kplus - mean;
      ss += d * d;
    }
    const double se = j - i > 1 ? std::sqrt(ss / (count - 1.0) / count) : 0.0;
    result.aggregate.push_back(
        {result.records[i].p, result.records[i].prior, mean, se, j - i});
    i = j;
  }
  return result;
}

void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << "p,replication,prior,mean_kplus,mean_sigma2\n";
  char buffer[160];
  for (const RunRecord& r : records) {
    std::snprintf(buffer, sizeof(buffer), "%zu,%zu,%s,%.10g,%.10g\n", r.p, r.replication,
                  r.prior.c_str(), r.mean_kplus, r.mean_sigma2);
    out << buffer;
  }
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << "p,prior,mean_kplus,se,cells\n";
  char buffer[160];
  for (const AggregateRow& r : rows) {
    std::snprintf(buffer, sizeof(buffer), "%zu,%s,%.10g,%.10g,%zu\n", r.p, r.prior.c_str(),
                  r.mean_kplus, r.se, r.cells);
    out << buffer;
  }
}

}  // namespace cibp
