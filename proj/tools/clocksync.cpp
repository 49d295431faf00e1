// clocksync: simulate two-way exchanges, estimate clock parameters, run
// Monte Carlo sweeps and evaluate the Cramer-Rao bounds.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "clocksync/clocksync.hpp"

namespace fs = std::filesystem;
using namespace clocksync;

namespace {

std::size_t single_cycle_rounds(const ExperimentConfig& config) {
  return config.rounds.value_or(config.n_rounds_grid.front());
}

int cmd_simulate(const fs::path& config_path, const fs::path& out) {
  const auto config = load_experiment_config(config_path);
  const auto setup = trial_setup(config, single_cycle_rounds(config), 0);
  const auto log = simulate_cycle(setup.clock, setup.delays, setup.plan, setup.noise_seed);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_text_file(out, exchange_log_to_csv(log));
  fs::path sidecar = out;
  sidecar.replace_extension(".json");
  write_text_file(sidecar, exchange_log_truth_json(log).dump(2) + "\n");
  return 0;
}

int cmd_estimate(const fs::path& in, const std::string& method_name, Eigen::Index rank,
                 std::optional<double> tau) {
  const Method method = parse_method(method_name);
  const TimestampMatrix gn = read_timestamp_csv(in);
  DenoiseConfig dc{rank, UniversalTau{}, 0.0};
  if (tau) dc.threshold = FixedTau{*tau};
  validate(dc, std::min<Eigen::Index>(gn.rounds(), TimestampMatrix::kColumns));
  const EstimateReport report = mle_estimate(denoise_for(method, gn, dc), method);
  std::cout << kEstimateCsvHeader << '\n' << estimate_report_csv_row(report) << '\n';
  return 0;
}

int cmd_experiment(const fs::path& config_path, const fs::path& out_dir) {
  const auto config = load_experiment_config(config_path);
  const auto table = run_experiment(config);
  emit_outputs(table, out_dir);
  if (!config.record_timing) {
    nlohmann::json timing = nlohmann::json::array();
    for (std::size_t i = 0; i < table.rows.size(); ++i)
      timing.push_back({{"n", table.rows[i].n},
                        {"method", std::string(to_string(table.rows[i].method))},
                        {"measured_ms", table.diagnostics[i].measured_ms}});
    write_text_file(out_dir / "timing.json", timing.dump(2) + "\n");
  }
  if (table.total_failures() > 0)
    std::cerr << "clocksync: " << table.total_failures() << " failed trial estimates (see results.json)\n";
  return 0;
}

int cmd_crlb(const fs::path& config_path) {
  const auto config = load_experiment_config(config_path);
  const std::size_t n = single_cycle_rounds(config);
  const auto setup = trial_setup(config, n, 0);
  const auto in = crlb_inputs_from(nominal_cycle(setup.clock, setup.delays, setup.plan), config.sigma2);
  const nlohmann::json out = {{"alpha", in.alpha}, {"beta", in.beta},      {"d", in.d},
                              {"sigma2", in.sigma2}, {"rounds", n},        {"crlb_alpha", crlb_skew(in)},
                              {"crlb_beta", crlb_offset(in)}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-way clock synchronization: simulation, low-rank denoising and ML estimation"};
  app.require_subcommand(1);

  fs::path sim_config, sim_out;
  auto* simulate = app.add_subcommand("simulate", "Simulate one synchronization cycle to CSV");
  simulate->add_option("--config", sim_config, "JSON config")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", sim_out, "output CSV (truth written next to it as .json)")->required();

  fs::path est_in;
  std::string est_method = "raw";
  Eigen::Index est_rank = 2;
  std::optional<double> est_tau;
  auto* estimate = app.add_subcommand("estimate", "Estimate skew/offset/delay from a timestamp CSV");
  estimate->add_option("--in", est_in, "timestamp CSV (round,t1,t2,t3,t4)")->required()->check(CLI::ExistingFile);
  estimate->add_option("--method", est_method, "raw | svd | lrma")
      ->check(CLI::IsMember({"raw", "svd", "lrma", "MLE_RAW", "MLE_SVD", "MLE_LRMA"}));
  estimate->add_option("--rank", est_rank, "truncation rank k (svd, and the lrma noise bootstrap)");
  estimate->add_option("--tau", est_tau, "fixed soft threshold for lrma (default: universal)");

  fs::path exp_config, exp_out;
  auto* experiment = app.add_subcommand("experiment", "Monte Carlo MSE sweep over N");
  experiment->add_option("--config", exp_config, "JSON config")->required()->check(CLI::ExistingFile);
  experiment->add_option("--out-dir", exp_out, "output directory")->required();

  fs::path crlb_config;
  auto* crlb = app.add_subcommand("crlb", "Print the skew/offset Cramer-Rao bounds as JSON");
  crlb->add_option("--config", crlb_config, "JSON config")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return cmd_simulate(sim_config, sim_out);
    if (*estimate) return cmd_estimate(est_in, est_method, est_rank, est_tau);
    if (*experiment) return cmd_experiment(exp_config, exp_out);
    if (*crlb) return cmd_crlb(crlb_config);
  } catch (const std::exception& e) {
    std::cerr << "clocksync: error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
