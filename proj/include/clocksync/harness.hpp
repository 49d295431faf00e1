#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "clocksync/crlb.hpp"
#include "clocksync/denoise.hpp"
#include "clocksync/errors.hpp"
#include "clocksync/estimator.hpp"
#include "clocksync/exchange_sim.hpp"
#include "clocksync/io.hpp"
#include "clocksync/matrix_forms.hpp"
#include "clocksync/seed.hpp"
#include "clocksync/svg_plot.hpp"

namespace clocksync {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct FixedParams {
  double alpha = 1.0;
  double beta = 0.0;
  double d = 0.0;
};

/// Monte Carlo sweep configuration. JSON keys match the field names.
struct ExperimentConfig {
  std::vector<std::size_t> n_rounds_grid{10, 20, 30, 40, 50};
  std::size_t trials = 2000;
  std::vector<Method> methods{Method::MleRaw, Method::MleSvd, Method::MleLrma};
  Range alpha_range{0.99, 1.01};
  Range beta_range{-10.0, 10.0};
  Range d_range{1.0, 10.0};
  double sigma2 = 1.0;
  Eigen::Index rank_k = 2;
  std::uint64_t master_seed = 20240229;
  double inter_round_interval = 1.0;
  double processing_delay = 0.2;
  double start_time = 1000.0;
  DelayDistribution distribution = DelayDistribution::Gaussian;
  std::optional<FixedParams> fixed_params;
  std::optional<std::size_t> rounds;  // single-cycle commands; defaults to n_rounds_grid.front()
  unsigned threads = 0;               // 0 = hardware concurrency
  bool record_timing = false;         // false keeps results.csv byte-reproducible
};

inline void validate(const ExperimentConfig& c) {
  detail::require(!c.n_rounds_grid.empty(), "n_rounds_grid must not be empty");
  for (auto n : c.n_rounds_grid) detail::require(n >= 2, "every N in n_rounds_grid must be >= 2");
  detail::require(c.trials >= 1, "trials must be >= 1");
  detail::require(!c.methods.empty(), "methods must not be empty");
  for (const Range* r : {&c.alpha_range, &c.beta_range, &c.d_range})
    detail::require(std::isfinite(r->lo) && std::isfinite(r->hi) && r->lo <= r->hi, "parameter ranges must be nonempty");
  detail::require(c.alpha_range.lo > 0.0, "alpha_range must be positive");
  detail::require(c.d_range.lo >= 0.0, "d_range must be nonnegative");
  detail::require(std::isfinite(c.sigma2) && c.sigma2 >= 0.0, "sigma2 must be >= 0");
  detail::require(c.rank_k >= 1 && c.rank_k <= 4, "rank_k must lie in [1, 4]");
  detail::require(std::isfinite(c.inter_round_interval) && c.inter_round_interval > 0.0,
                  "inter_round_interval must be > 0");
  detail::require(std::isfinite(c.processing_delay) && c.processing_delay >= 0.0, "processing_delay must be >= 0");
  detail::require(std::isfinite(c.start_time), "start_time must be finite");
  if (c.rounds) detail::require(*c.rounds >= 2, "rounds must be >= 2");
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline Range range_from_json(const nlohmann::json& j, const char* key) {
  if (!j.is_array() || j.size() != 2) throw InvalidArgument(std::string(key) + " must be [lo, hi]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace detail

inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  ExperimentConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "n_rounds_grid") c.n_rounds_grid = value.get<std::vector<std::size_t>>();
      else if (key == "trials") c.trials = value.get<std::size_t>();
      else if (key == "methods") {
        c.methods.clear();
        for (const auto& m : value) c.methods.push_back(parse_method(m.get<std::string>()));
      } else if (key == "alpha_range") c.alpha_range = detail::range_from_json(value, "alpha_range");
      else if (key == "beta_range") c.beta_range = detail::range_from_json(value, "beta_range");
      else if (key == "d_range") c.d_range = detail::range_from_json(value, "d_range");
      else if (key == "sigma2") c.sigma2 = value.get<double>();
      else if (key == "rank_k") c.rank_k = value.get<Eigen::Index>();
      else if (key == "master_seed") c.master_seed = value.get<std::uint64_t>();
      else if (key == "inter_round_interval") c.inter_round_interval = value.get<double>();
      else if (key == "processing_delay") c.processing_delay = value.get<double>();
      else if (key == "start_time") c.start_time = value.get<double>();
      else if (key == "distribution") c.distribution = parse_distribution(value.get<std::string>());
      else if (key == "fixed_params") {
        if (value.is_null()) continue;
        c.fixed_params = FixedParams{value.at("alpha").get<double>(), value.at("beta").get<double>(),
                                     value.at("d").get<double>()};
      } else if (key == "rounds") c.rounds = value.get<std::size_t>();
      else if (key == "threads") c.threads = value.get<unsigned>();
      else if (key == "record_timing") c.record_timing = value.get<bool>();
      else throw InvalidArgument("unknown config key: " + key);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  validate(c);
  return c;
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json methods = nlohmann::json::array();
  for (auto m : c.methods) methods.push_back(std::string(to_string(m)));
  nlohmann::json j = {
      {"n_rounds_grid", c.n_rounds_grid},
      {"trials", c.trials},
      {"methods", methods},
      {"alpha_range", {c.alpha_range.lo, c.alpha_range.hi}},
      {"beta_range", {c.beta_range.lo, c.beta_range.hi}},
      {"d_range", {c.d_range.lo, c.d_range.hi}},
      {"sigma2", c.sigma2},
      {"rank_k", c.rank_k},
      {"master_seed", c.master_seed},
      {"inter_round_interval", c.inter_round_interval},
      {"processing_delay", c.processing_delay},
      {"start_time", c.start_time},
      {"distribution", std::string(to_string(c.distribution))},
      {"record_timing", c.record_timing},
  };
  if (c.fixed_params) j["fixed_params"] = {{"alpha", c.fixed_params->alpha}, {"beta", c.fixed_params->beta},
                                           {"d", c.fixed_params->d}};
  if (c.rounds) j["rounds"] = *c.rounds;
  return j;
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return experiment_config_from_json(j);
}

// ---------------------------------------------------------------------------
// Trials

/// The cycle a trial runs: drawn truth, schedule and the noise seed.
struct TrialSetup {
  ClockParams clock;
  DelayModel delays;
  SchedulePlan plan;
  std::uint64_t noise_seed = 0;
};

inline TrialSetup trial_setup(const ExperimentConfig& config, std::size_t n, std::size_t trial_index) {
  std::mt19937_64 rng(derive_seed(config.master_seed, {n, trial_index}));
  TrialSetup s;
  if (config.fixed_params) {
    s.clock = {config.fixed_params->alpha, config.fixed_params->beta};
    s.delays.fixed_delay = config.fixed_params->d;
  } else {
    auto draw = [&rng](const Range& r) { return std::uniform_real_distribution<double>(r.lo, r.hi)(rng); };
    s.clock.skew = draw(config.alpha_range);
    s.clock.offset = draw(config.beta_range);
    s.delays.fixed_delay = draw(config.d_range);
  }
  s.delays.processing_delay = config.processing_delay;
  s.delays.noise_std = std::sqrt(config.sigma2);
  s.delays.distribution = config.distribution;
  s.plan = {n, config.start_time, config.inter_round_interval};
  s.noise_seed = rng();
  return s;
}

struct MethodOutcome {
  Method method = Method::MleRaw;
  bool ok = false;
  double sq_err_alpha = 0.0;
  double sq_err_beta = 0.0;
  double elapsed_ms = 0.0;
};

struct TrialOutcome {
  std::vector<MethodOutcome> methods;  // same order as config.methods
  bool crlb_ok = false;
  double crlb_alpha = 0.0;      // true sigma^2, nominal timestamps
  double crlb_beta = 0.0;
  bool crlb_est_ok = false;
  double crlb_alpha_est = 0.0;  // sigma_hat^2 from the LRMA residual
  double crlb_beta_est = 0.0;
  double sigma2_hat = 0.0;
};

inline TimestampMatrix denoise_for(Method method, const TimestampMatrix& gn, const DenoiseConfig& dc) {
  switch (method) {
    case Method::MleRaw: return gn;
    case Method::MleSvd: return svd_truncate(gn, dc.rank_k);
    case Method::MleLrma: return lrma_denoise(gn, dc);
  }
  return gn;
}

/// One simulated cycle, every configured method, and the CRLB for its truth.
/// Estimation failures are reported per method and never thrown.
inline TrialOutcome run_trial(const ExperimentConfig& config, std::size_t n, std::size_t trial_index) {
  const TrialSetup s = trial_setup(config, n, trial_index);
  const ExchangeLog log = simulate_cycle(s.clock, s.delays, s.plan, s.noise_seed);
  const TimestampMatrix gn = build_timestamp_matrix(log);
  const DenoiseConfig dc{config.rank_k, UniversalTau{}, 0.0};

  TrialOutcome out;
  for (Method m : config.methods) {
    MethodOutcome mo{.method = m};
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const auto report = mle_estimate(denoise_for(m, gn, dc), m);
      mo.sq_err_alpha = (report.alpha_hat - s.clock.skew) * (report.alpha_hat - s.clock.skew);
      mo.sq_err_beta = (report.beta_hat - s.clock.offset) * (report.beta_hat - s.clock.offset);
      mo.ok = std::isfinite(mo.sq_err_alpha) && std::isfinite(mo.sq_err_beta);
    } catch (const SingularSystem&) {
      mo.ok = false;
    } catch (const InvalidArgument&) {
      mo.ok = false;
    }
    mo.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    out.methods.push_back(mo);
  }

  const ExchangeLog nominal = nominal_cycle(s.clock, s.delays, s.plan);
  try {
    const auto in = crlb_inputs_from(nominal, config.sigma2);
    out.crlb_alpha = crlb_skew(in);
    out.crlb_beta = crlb_offset(in);
    out.crlb_ok = true;
  } catch (const DegenerateGeometry&) {
  }
  try {
    out.sigma2_hat = std::pow(estimate_noise_std(gn.entries(), lrma_denoise(gn.entries(), dc)), 2);
    const auto in = crlb_inputs_from(nominal, out.sigma2_hat);
    out.crlb_alpha_est = crlb_skew(in);
    out.crlb_beta_est = crlb_offset(in);
    out.crlb_est_ok = true;
  } catch (const DegenerateGeometry&) {
  }
  return out;
}

// ---------------------------------------------------------------------------
// Aggregation

struct ResultRow {
  std::size_t n = 0;
  Method method = Method::MleRaw;
  double mse_alpha = 0.0;
  double mse_beta = 0.0;
  double crlb_alpha = 0.0;
  double crlb_beta = 0.0;
  std::size_t trials = 0;
  double wall_time_ms = 0.0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

/// Per-(N, method) bookkeeping that does not belong in results.csv.
struct RowDiagnostics {
  std::size_t failed_trials = 0;
  std::size_t crlb_failures = 0;
  double crlb_alpha_est = 0.0;  // trial-averaged, sigma_hat^2 from LRMA
  double crlb_beta_est = 0.0;
  double sigma2_hat = 0.0;
  double measured_ms = 0.0;
};

struct ResultTable {
  std::vector<ResultRow> rows;
  std::vector<RowDiagnostics> diagnostics;  // parallel to rows; may be empty

  std::size_t total_failures() const {
    std::size_t f = 0;
    for (const auto& d : diagnostics) f += d.failed_trials;
    return f;
  }
  const ResultRow* find(std::size_t n, Method m) const {
    for (const auto& r : rows)
      if (r.n == n && r.method == m) return &r;
    return nullptr;
  }
};

/// Runs the full grid. Trials run on worker threads but are reduced in
/// trial-index order, so the output is independent of the thread count.
inline ResultTable run_experiment(const ExperimentConfig& config) {
  validate(config);
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = config.threads == 0 ? hw : config.threads;

  ResultTable table;
  for (std::size_t n : config.n_rounds_grid) {
    std::vector<TrialOutcome> outcomes(config.trials);
    auto work = [&](unsigned worker) {
      for (std::size_t t = worker; t < config.trials; t += workers) outcomes[t] = run_trial(config, n, t);
    };
    if (workers <= 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }

    double crlb_a = 0.0, crlb_b = 0.0, crlb_a_est = 0.0, crlb_b_est = 0.0, s2hat = 0.0;
    std::size_t crlb_count = 0, crlb_est_count = 0;
    for (const auto& o : outcomes) {
      if (o.crlb_ok) {
        crlb_a += o.crlb_alpha;
        crlb_b += o.crlb_beta;
        ++crlb_count;
      }
      if (o.crlb_est_ok) {
        crlb_a_est += o.crlb_alpha_est;
        crlb_b_est += o.crlb_beta_est;
        s2hat += o.sigma2_hat;
        ++crlb_est_count;
      }
    }
    const auto mean = [](double sum, std::size_t k) { return k ? sum / static_cast<double>(k) : 0.0; };

    for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
      ResultRow row{.n = n, .method = config.methods[mi]};
      RowDiagnostics diag;
      double sa = 0.0, sb = 0.0;
      for (const auto& o : outcomes) {
        const auto& mo = o.methods[mi];
        diag.measured_ms += mo.elapsed_ms;
        if (!mo.ok) {
          ++diag.failed_trials;
          continue;
        }
        sa += mo.sq_err_alpha;
        sb += mo.sq_err_beta;
        ++row.trials;
      }
      row.mse_alpha = mean(sa, row.trials);
      row.mse_beta = mean(sb, row.trials);
      row.crlb_alpha = mean(crlb_a, crlb_count);
      row.crlb_beta = mean(crlb_b, crlb_count);
      row.wall_time_ms = config.record_timing ? diag.measured_ms : 0.0;
      diag.crlb_failures = config.trials - crlb_count;
      diag.crlb_alpha_est = mean(crlb_a_est, crlb_est_count);
      diag.crlb_beta_est = mean(crlb_b_est, crlb_est_count);
      diag.sigma2_hat = mean(s2hat, crlb_est_count);
      table.rows.push_back(row);
      table.diagnostics.push_back(diag);
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Output

inline constexpr std::string_view kResultsCsvHeader = "n,method,mse_alpha,mse_beta,crlb_alpha,crlb_beta,trials,wall_time_ms";

inline std::string results_to_csv(const ResultTable& table) {
  std::string out(kResultsCsvHeader);
  out += '\n';
  for (const auto& r : table.rows) {
    out += std::to_string(r.n) + ',' + std::string(to_string(r.method)) + ',' + format_double(r.mse_alpha) + ',' +
           format_double(r.mse_beta) + ',' + format_double(r.crlb_alpha) + ',' + format_double(r.crlb_beta) + ',' +
           std::to_string(r.trials) + ',' + format_double(r.wall_time_ms) + '\n';
  }
  return out;
}

inline ResultTable results_from_csv(std::string_view text, std::string_view source = "results.csv") {
  ResultTable table;
  std::size_t pos = 0, line_no = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kResultsCsvHeader) throw IoError(std::string(source) + ": unexpected header");
      header_seen = true;
      continue;
    }
    const auto f = split_csv_line(line);
    const std::string ctx = std::string(source) + ":" + std::to_string(line_no);
    if (f.size() != 8) throw IoError(ctx + ": expected 8 fields");
    ResultRow r;
    r.n = static_cast<std::size_t>(parse_double(f[0], ctx));
    r.method = parse_method(f[1]);
    r.mse_alpha = parse_double(f[2], ctx);
    r.mse_beta = parse_double(f[3], ctx);
    r.crlb_alpha = parse_double(f[4], ctx);
    r.crlb_beta = parse_double(f[5], ctx);
    r.trials = static_cast<std::size_t>(parse_double(f[6], ctx));
    r.wall_time_ms = parse_double(f[7], ctx);
    table.rows.push_back(r);
  }
  if (!header_seen) throw IoError(std::string(source) + ": missing header");
  return table;
}

inline nlohmann::json results_to_json(const ResultTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    nlohmann::json row = {{"n", r.n},
                          {"method", std::string(to_string(r.method))},
                          {"mse_alpha", r.mse_alpha},
                          {"mse_beta", r.mse_beta},
                          {"crlb_alpha", r.crlb_alpha},
                          {"crlb_beta", r.crlb_beta},
                          {"trials", r.trials},
                          {"wall_time_ms", r.wall_time_ms}};
    if (i < table.diagnostics.size()) {
      const auto& d = table.diagnostics[i];
      row["failed_trials"] = d.failed_trials;
      row["crlb_failures"] = d.crlb_failures;
      row["crlb_alpha_sigma_hat"] = d.crlb_alpha_est;
      row["crlb_beta_sigma_hat"] = d.crlb_beta_est;
      row["sigma2_hat"] = d.sigma2_hat;
    }
    rows.push_back(std::move(row));
  }
  return {{"rows", rows}, {"failed_trials", table.total_failures()}};
}

/// Log-scale MSE-vs-N chart, one panel per parameter, one series per method
/// plus the CRLB (true sigma^2, dashed) and CRLB (sigma_hat^2, dotted).
inline std::string results_to_svg(const ResultTable& table) {
  std::vector<std::size_t> grid;
  std::vector<Method> methods;
  for (const auto& r : table.rows) {
    if (std::find(grid.begin(), grid.end(), r.n) == grid.end()) grid.push_back(r.n);
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
  }
  const auto color = [](Method m) {
    switch (m) {
      case Method::MleRaw: return "#d62728";
      case Method::MleSvd: return "#1f77b4";
      case Method::MleLrma: return "#2ca02c";
    }
    return "#000000";
  };

  auto panel_for = [&](bool alpha) {
    svg::Panel p{alpha ? "MSE of clock skew estimate" : "MSE of clock offset estimate",
                 "number of synchronization rounds N", alpha ? "MSE(alpha)" : "MSE(beta) [s^2]",
                 {}};
    for (Method m : methods) {
      svg::Series s{std::string(to_string(m)), {}, color(m), ""};
      for (const auto& r : table.rows)
        if (r.method == m) s.points.emplace_back(static_cast<double>(r.n), alpha ? r.mse_alpha : r.mse_beta);
      p.series.push_back(std::move(s));
    }
    svg::Series bound{"CRLB (true sigma^2)", {}, "#000000", "6,3"};
    svg::Series bound_est{"CRLB (LRMA sigma_hat^2)", {}, "#7f7f7f", "2,2"};
    for (std::size_t n : grid) {
      for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& r = table.rows[i];
        if (r.n != n) continue;
        bound.points.emplace_back(static_cast<double>(n), alpha ? r.crlb_alpha : r.crlb_beta);
        if (i < table.diagnostics.size()) {
          const auto& d = table.diagnostics[i];
          bound_est.points.emplace_back(static_cast<double>(n), alpha ? d.crlb_alpha_est : d.crlb_beta_est);
        }
        break;
      }
    }
    p.series.push_back(std::move(bound));
    if (!bound_est.points.empty()) p.series.push_back(std::move(bound_est));
    return p;
  };
  return svg::render_log_panels({panel_for(true), panel_for(false)});
}

inline void emit_outputs(const ResultTable& table, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  write_text_file(out_dir / "results.csv", results_to_csv(table));
  write_text_file(out_dir / "results.json", results_to_json(table).dump(2) + "\n");
  write_text_file(out_dir / "curves.svg", results_to_svg(table));
}

}  // namespace clocksync

