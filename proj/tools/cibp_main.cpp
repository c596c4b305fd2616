// Command-line front end: sampling, feature-count diagnostics, exact pmf
// evaluation, the sparse factor-model chain, the simulation grid, and SVG
// plots. Exit codes: 0 success, 1 usage, 2 data/parse, 3 numerical.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "cibp/cibp_samplers.hpp"
#include "cibp/crm.hpp"
#include "cibp/diagnostics.hpp"
#include "cibp/factor_model.hpp"
#include "cibp/ibp.hpp"
#include "cibp/sim_harness.hpp"
#include "cibp/svg_plots.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("CIBP_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError("CIBP_SEED is not a valid unsigned integer");
    }
  }
  return 0;
}

void announce_seed(std::uint64_t seed) { std::cerr << "seed " << seed << "\n"; }

std::string slurp_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string numbered_path(const std::string& path, std::size_t index, std::size_t total) {
  const std::filesystem::path p(path);
  const std::string stem = p.stem().string();
  const std::string ext = p.extension().string();
  std::size_t width = std::to_string(total).size();
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%0*zu", static_cast<int>(width), index);
  return (p.parent_path() / (stem + "_" + buffer + ext)).string();
}

// ---- sample ----------------------------------------------------------

struct SampleArgs {
  std::string process;
  std::optional<double> gamma, alpha, omega;
  double kappa = 0.0;
  std::size_t p = 0;
  std::size_t draws = 1;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int run_sample(const SampleArgs& args) {
  if (args.process == "cibp") {
    if (!args.gamma || !args.alpha)
      throw UsageError("sample: --process cibp requires --gamma and --alpha");
    if (args.omega) throw UsageError("sample: --omega does not apply to the cibp process");
  } else if (args.process == "ibp") {
    if (!args.omega) throw UsageError("sample: --process ibp requires --omega");
    if (args.gamma || args.alpha)
      throw UsageError("sample: --gamma/--alpha do not apply to the ibp process");
  } else {
    throw UsageError("sample: --process must be cibp or ibp");
  }
  if (args.draws == 0) throw UsageError("sample: --draws must be positive");

  const std::uint64_t seed = resolve_seed(args.seed);
  announce_seed(seed);
  cibp::RngStream rng(seed, cibp::hash_label("sample"));
  for (std::size_t d = 1; d <= args.draws; ++d) {
    cibp::FeatureMatrix matrix;
    if (args.process == "cibp") {
      const cibp::CibpParams params{*args.gamma, *args.alpha, args.kappa};
      matrix = cibp::sample_restaurant(params, args.p, rng);
    } else {
      const cibp::IbpParams params{*args.omega, args.kappa};
      matrix = cibp::sample_ibp(params, args.p, rng);
    }
    const std::string path =
        args.draws == 1 ? args.out : numbered_path(args.out, d, args.draws);
    std::ostringstream ss;
    cibp::write_matrix(ss, matrix);
    write_file(path, ss.str());
  }
  return 0;
}

// ---- kdist -----------------------------------------------------------

struct KdistArgs {
  double gamma = 1.0, alpha = 1.0, kappa = 0.0;
  std::size_t p = 0;
  std::size_t draws = 0;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int run_kdist(const KdistArgs& args) {
  if (args.draws < 1000)
    throw UsageError("kdist: --draws must be at least 1000 for the test to bin");
  const std::uint64_t seed = resolve_seed(args.seed);
  announce_seed(seed);
  const cibp::CibpParams params{args.gamma, args.alpha, args.kappa};
  cibp::RngStream rng(seed, cibp::hash_label("kdist"));

  cibp::CountTable observed;
  for (std::size_t d = 0; d < args.draws; ++d) {
    const cibp::FeatureMatrix matrix = cibp::sample_restaurant(params, args.p, rng);
    observed.add(matrix.cols());
  }
  const double mean = cibp::kplus_mean(params, static_cast<long>(args.p));
  const auto pmf = [&](std::uint64_t k) {
    return cibp::poisson_pmf(mean, static_cast<unsigned long>(k));
  };
  const cibp::GofResult gof = cibp::chisq_gof(observed, pmf);

  std::ostringstream out;
  out << "k,observed,expected\n";
  const std::uint64_t max_key = observed.counts.rbegin()->first;
  char buffer[96];
  for (std::uint64_t k = 0; k <= max_key; ++k) {
    const auto it = observed.counts.find(k);
    const std::uint64_t count = it == observed.counts.end() ? 0 : it->second;
    std::snprintf(buffer, sizeof(buffer), "%llu,%llu,%.10g\n",
                  static_cast<unsigned long long>(k),
                  static_cast<unsigned long long>(count),
                  static_cast<double>(args.draws) * pmf(k));
    out << buffer;
  }
  std::snprintf(buffer, sizeof(buffer), "# chisq_p_value %.6g\n", gof.p_value);
  out << buffer;

  if (args.out.empty())
    std::cout << out.str();
  else
    write_file(args.out, out.str());
  return 0;
}

// ---- pmf -------------------------------------------------------------

struct PmfArgs {
  std::string matrix_path;
  double gamma = 1.0, alpha = 1.0, kappa = 0.0;
};

int run_pmf(const PmfArgs& args) {
  announce_seed(resolve_seed(std::nullopt));  // no randomness; printed for uniformity
  std::ifstream in(args.matrix_path);
  if (!in) throw cibp::MatrixParseError("cannot open " + args.matrix_path, 0);
  const cibp::FeatureMatrix matrix = cibp::read_matrix(in);
  const cibp::CibpParams params{args.gamma, args.alpha, args.kappa};
  const double value = cibp::lof_log_pmf(cibp::left_order(matrix), params);
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12f\n", value);
  std::cout << buffer;
  return 0;
}

// ---- factor ----------------------------------------------------------

cibp::FactorPrior factor_prior_from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw cibp::ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  try {
    if (!doc.contains("version") || doc.at("version").get<int>() != 1)
      throw cibp::ConfigError("config: missing or unsupported version (expected 1)");
    const std::string process = doc.value("process", std::string("cibp"));
    const double tau = doc.at("tau").get<double>();
    const double a = doc.at("a").get<double>();
    const double b = doc.at("b").get<double>();
    if (process == "cibp") {
      return cibp::FactorPrior{
          cibp::CibpParams{doc.at("gamma").get<double>(), doc.at("alpha").get<double>(),
                           doc.at("kappa").get<double>()},
          tau, a, b};
    }
    if (process == "ibp") {
      return cibp::FactorPrior{
          cibp::IbpParams{doc.at("omega").get<double>(), doc.at("kappa").get<double>()},
          tau, a, b};
    }
    throw cibp::ConfigError("config: process must be cibp or ibp");
  } catch (const nlohmann::json::exception& e) {
    throw cibp::ConfigError(std::string("config: schema violation: ") + e.what());
  } catch (const std::domain_error& e) {
    throw cibp::ConfigError(std::string("config: ") + e.what());
  }
}

struct FactorArgs {
  std::string data_path;
  bool header = false;
  std::string config_path;
  std::size_t iters = 2000;
  std::size_t burn_in = 500;
  std::optional<std::uint64_t> seed;
  std::string trace_path;
};

int run_factor(const FactorArgs& args) {
  if (args.iters == 0 || args.burn_in >= args.iters)
    throw UsageError("factor: --burn-in must be below --iters");
  const std::uint64_t seed = resolve_seed(args.seed);
  announce_seed(seed);

  std::ifstream in(args.data_path);
  if (!in) throw cibp::DataParseError("cannot open " + args.data_path, 0);
  const cibp::Dataset data = cibp::read_dataset_csv(in, args.header);
  const cibp::FactorPrior prior = factor_prior_from_json_text(slurp_file(args.config_path));

  cibp::RngStream rng(seed, cibp::hash_label("factor"));
  const cibp::ChainResult result =
      cibp::run_chain(data, prior, args.iters, args.burn_in, rng);

  if (!args.trace_path.empty()) {
    std::ostringstream trace;
    cibp::write_trace_csv(trace, result.trace);
    write_file(args.trace_path, trace.str());
  }
  char buffer[96];
  std::snprintf(buffer, sizeof(buffer), "posterior_mean_k_plus %.10g\n",
                cibp::posterior_mean_kplus(result.trace, args.burn_in));
  std::cout << buffer;
  std::snprintf(buffer, sizeof(buffer), "posterior_mean_sigma2 %.10g\n",
                cibp::posterior_mean_sigma2(result.trace, args.burn_in));
  std::cout << buffer;
  return 0;
}

// ---- simulate --------------------------------------------------------

struct SimulateArgs {
  std::string config_path;
  std::string out_dir;
  std::size_t jobs = 0;
  std::optional<std::uint64_t> seed;
};

int run_simulate(const SimulateArgs& args) {
  cibp::ExperimentConfig config =
      cibp::experiment_config_from_json_text(slurp_file(args.config_path));
  if (args.seed) config.seed = *args.seed;
  announce_seed(config.seed);

  std::filesystem::create_directories(args.out_dir);
  const cibp::ExperimentResult result = cibp::run_experiment(config, args.jobs);
  if (result.aborted > 0)
    std::cerr << "warning: " << result.aborted
              << " cell(s) aborted on numerical errors and were excluded\n";

  std::ostringstream records;
  cibp::write_records_csv(records, result.records);
  write_file((std::filesystem::path(args.out_dir) / "records.csv").string(), records.str());
  std::ostringstream aggregate;
  cibp::write_aggregate_csv(aggregate, result.aggregate);
  write_file((std::filesystem::path(args.out_dir) / "aggregate.csv").string(),
             aggregate.str());
  return 0;
}

// ---- plot ------------------------------------------------------------

struct PlotArgs {
  std::string input;
  std::string kind;
  std::string out;
  double reference = 4.0;
};

std::vector<cibp::AggregateRow> read_aggregate_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cibp::DataParseError("cannot open " + path, 0);
  std::string line;
  if (!std::getline(in, line) || line != "p,prior,mean_kplus,se,cells")
    throw cibp::DataParseError("expected header p,prior,mean_kplus,se,cells", 1);
  std::vector<cibp::AggregateRow> rows;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string p_str, prior, mean_str, se_str, cells_str;
    if (!std::getline(ss, p_str, ',') || !std::getline(ss, prior, ',') ||
        !std::getline(ss, mean_str, ',') || !std::getline(ss, se_str, ',') ||
        !std::getline(ss, cells_str, ','))
      throw cibp::DataParseError("expected 5 fields", line_number);
    try {
      rows.push_back({std::stoul(p_str), prior, std::stod(mean_str), std::stod(se_str),
                      std::stoul(cells_str)});
    } catch (const std::exception&) {
      throw cibp::DataParseError("cannot parse row", line_number);
    }
  }
  return rows;
}

int run_plot(const PlotArgs& args) {
  announce_seed(resolve_seed(std::nullopt));  // no randomness; printed for uniformity
  std::string svg;
  if (args.kind == "growth") {
    svg = cibp::growth_plot_svg(read_aggregate_csv(args.input), args.reference);
  } else if (args.kind == "heatmap") {
    std::ifstream in(args.input);
    if (!in) throw cibp::MatrixParseError("cannot open " + args.input, 0);
    svg = cibp::heatmap_svg(cibp::read_matrix(in));
  } else {
    throw UsageError("plot: --kind must be growth or heatmap");
  }
  write_file(args.out, svg);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convergent buffet process toolkit"};
  app.require_subcommand(1);

  SampleArgs sample_args;
  CLI::App* sample = app.add_subcommand("sample", "Draw feature matrices");
  sample->add_option("--process", sample_args.process, "cibp or ibp")->required();
  sample->add_option("--gamma", [&](const CLI::results_t& r) {
    sample_args.gamma = std::stod(r[0]);
    return true;
  }, "limiting feature count (cibp)");
  sample->add_option("--alpha", [&](const CLI::results_t& r) {
    sample_args.alpha = std::stod(r[0]);
    return true;
  }, "mass parameter (cibp)");
  sample->add_option("--omega", [&](const CLI::results_t& r) {
    sample_args.omega = std::stod(r[0]);
    return true;
  }, "mass parameter (ibp)");
  sample->add_option("--kappa", sample_args.kappa, "decay/concentration parameter");
  sample->add_option("--p", sample_args.p, "number of rows")->required();
  sample->add_option("--draws", sample_args.draws, "number of matrices");
  sample->add_option("--seed", [&](const CLI::results_t& r) {
    sample_args.seed = std::stoull(r[0]);
    return true;
  }, "random seed");
  sample->add_option("--out", sample_args.out, "output path")->required();

  KdistArgs kdist_args;
  CLI::App* kdist = app.add_subcommand("kdist", "Empirical vs analytic feature-count law");
  kdist->add_option("--gamma", kdist_args.gamma)->required();
  kdist->add_option("--alpha", kdist_args.alpha)->required();
  kdist->add_option("--kappa", kdist_args.kappa);
  kdist->add_option("--p", kdist_args.p)->required();
  kdist->add_option("--draws", kdist_args.draws)->required();
  kdist->add_option("--seed", [&](const CLI::results_t& r) {
    kdist_args.seed = std::stoull(r[0]);
    return true;
  }, "random seed");
  kdist->add_option("--out", kdist_args.out, "write CSV here instead of stdout");

  PmfArgs pmf_args;
  CLI::App* pmf = app.add_subcommand("pmf", "Exact log-pmf of a matrix's left-ordered class");
  pmf->add_option("--matrix", pmf_args.matrix_path)->required();
  pmf->add_option("--gamma", pmf_args.gamma)->required();
  pmf->add_option("--alpha", pmf_args.alpha)->required();
  pmf->add_option("--kappa", pmf_args.kappa);

  FactorArgs factor_args;
  CLI::App* factor = app.add_subcommand("factor", "Run the sparse factor-model chain");
  factor->add_option("--data", factor_args.data_path)->required();
  factor->add_flag("--header", factor_args.header, "skip one header line in the data CSV");
  factor->add_option("--config", factor_args.config_path)->required();
  factor->add_option("--iters", factor_args.iters);
  factor->add_option("--burn-in", factor_args.burn_in);
  factor->add_option("--seed", [&](const CLI::results_t& r) {
    factor_args.seed = std::stoull(r[0]);
    return true;
  }, "random seed");
  factor->add_option("--trace", factor_args.trace_path, "trace CSV output path");

  SimulateArgs simulate_args;
  CLI::App* simulate = app.add_subcommand("simulate", "Run the simulation grid");
  simulate->add_option("--config", simulate_args.config_path)->required();
  simulate->add_option("--out", simulate_args.out_dir)->required();
  simulate->add_option("--jobs", simulate_args.jobs, "worker threads (default: cores)");
  simulate->add_option("--seed", [&](const CLI::results_t& r) {
    simulate_args.seed = std::stoull(r[0]);
    return true;
  }, "override the config seed");

  PlotArgs plot_args;
  CLI::App* plot = app.add_subcommand("plot", "Emit an SVG plot");
  plot->add_option("--input", plot_args.input)->required();
  plot->add_option("--kind", plot_args.kind, "growth or heatmap")->required();
  plot->add_option("--out", plot_args.out)->required();
  plot->add_option("--ref", plot_args.reference, "reference line for growth plots");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (sample->parsed()) return run_sample(sample_args);
    if (kdist->parsed()) return run_kdist(kdist_args);
    if (pmf->parsed()) return run_pmf(pmf_args);
    if (factor->parsed()) return run_factor(factor_args);
    if (simulate->parsed()) return run_simulate(simulate_args);
    if (plot->parsed()) return run_plot(plot_args);
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const cibp::ChainNumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const cibp::MatrixParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitData;
  } catch (const cibp::DataParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitData;
  } catch (const cibp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
