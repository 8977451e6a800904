#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "fracdrift/estimators.hpp"
#include "fracdrift/fsde.hpp"
#include "fracdrift/types.hpp"

namespace fracdrift::harness {

enum class ExperimentKind {
  density_limit,
  drift_recovery,
  pathwise_collapse,
  rate_sweep,
  variance_scaling,
  mehler,
  autocorr,
};

ExperimentKind kind_by_name(const std::string& name);
std::string kind_name(ExperimentKind kind);

struct ModelSpec {
  std::string model = "linear";  // linear | tanh
  double lambda = 1.0;
  double a = 1.0;  // tanh strength, unused for linear
  double sigma = 1.0;
  double hurst = 0.7;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::density_limit;
  ModelSpec model;
  double delta = 0.05;
  std::vector<double> horizons;  // strictly increasing
  estimators::BandwidthSchedule schedule = estimators::BandwidthSchedule::paper();
  std::string kernel = "biweight";
  std::vector<double> x_grid;  // empty => per-kind default
  std::size_t replications = 100;
  std::uint64_t base_seed = 1;
  int threads = 0;  // 0 = library default
  std::string out_dir;
  double fixed_h = 0.0;    // only for fixed-bandwidth kinds (variance_scaling)
  double burn_in = 0.0;    // 0 => 10 / lambda

  // mehler experiment cells
  std::vector<int> mehler_q{1, 2, 3, 4};
  std::vector<double> mehler_rho{0.2, 0.5, 0.8};
  std::size_t mehler_samples = 100000;
};

// Flat key = value format; '#' starts a comment. Keys mirror the config
// fields; lists are comma-separated. Documented in the README.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

struct Verdict {
  std::string name;
  bool pass = false;
  double observed = 0.0;
  double bound = 0.0;
  std::string note;
};

struct CellAggregate {
  double horizon = 0.0;
  double x = 0.0;
  std::string estimator;
  std::size_t n_reps = 0;
  std::size_t n_degenerate = 0;
  std::size_t n_failed = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  double rmse = 0.0;  // vs the true drift value where applicable
};

struct RateFit {
  double slope = 0.0;
  double slope_stderr = 0.0;
};

struct Row {
  double horizon;
  double x;
  std::size_t rep;
  std::string estimator;
  double value;
  std::string flag;  // "ok" | "degenerate" | "failed"
};

struct ExperimentReport {
  std::string kind;
  std::vector<Row> rows;
  std::vector<CellAggregate> cells;
  std::vector<Verdict> verdicts;
  std::optional<RateFit> rate;
  std::vector<std::string> references;  // theoretical exponents to print
  double sigma0 = 0.0;
  std::size_t failed_replications = 0;
  std::size_t total_replications = 0;
  double wall_seconds = 0.0;
  std::string config_text;  // canonical form, echoed for auditability
  std::string config_hash;
  std::string report_hash;  // over the rows, reproducibility contract

  bool all_pass() const;
};

ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Var[S_{T,h}(x)] across horizons at a fixed bandwidth, with the slope
// verdicts; forwards to run_experiment with the kind pinned.
ExperimentReport variance_scaling_experiment(ExperimentConfig cfg);

// OLS slope of log(error) against log(T); nonpositive errors are excluded
// with a note, at least three points must survive.
RateFit fit_rate(const std::vector<std::pair<double, double>>& horizon_error);

// Long-run sample standard deviation of the stationary fractional OU
// process, averaged over seeds; the sigma0 used by the density targets.
double stationary_std_oracle(double lambda, double sigma,
                             const HurstIndex& hurst, double horizon = 1e4,
                             double delta = 0.05, std::size_t seeds = 10,
                             std::uint64_t base_seed = 977001);

std::string rows_csv(const ExperimentReport& report);
void write_report(const ExperimentReport& report, const std::string& out_dir);
std::string verdict_table(const ExperimentReport& report);

}  // namespace fracdrift::harness
