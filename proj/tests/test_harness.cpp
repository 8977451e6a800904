#include <cmath>
#include <stdexcept>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "doctest.h"

#include "fracdrift/harness.hpp"
#include "fracdrift/stats.hpp"

using namespace fracdrift;

TEST_CASE("fit_rate: exact power law and exclusions") {
  std::vector<std::pair<double, double>> pts;
  for (double t : {100.0, 200.0, 400.0, 800.0}) {
    pts.emplace_back(t, 3.0 * std::pow(t, -0.2));
  }
  const auto fit = harness::fit_rate(pts);
  CHECK(fit.slope == doctest::Approx(-0.2).epsilon(1e-10));

  // nonpositive errors are dropped; with fewer than 3 left it throws
  pts[0].second = 0.0;
  CHECK_NOTHROW(harness::fit_rate(pts));
  pts[1].second = -1.0;
  CHECK_THROWS_AS(harness::fit_rate(pts), std::invalid_argument);
}

TEST_CASE("fit_rate: multiplicative noise over one decade") {
  Rng rng({2024, 7});
  std::vector<std::pair<double, double>> pts;
  for (double t : {100.0, 316.0, 1000.0}) {
    pts.emplace_back(t, 3.0 * std::pow(t, -0.2) * (0.9 + 0.2 * rng.uniform()));
  }
  const auto fit = harness::fit_rate(pts);
  CHECK(std::abs(fit.slope + 0.2) <= 0.05);
}

TEST_CASE("config parsing round trip") {
  const std::string text =
      "# demo config\n"
      "kind = drift_recovery\n"
      "model = linear\n"
      "lambda = 1.5\n"
      "sigma = 0.8\n"
      "hurst = 0.65\n"
      "delta = 0.1\n"
      "horizons = 100, 200\n"
      "bandwidth = fixed:0.35\n"
      "epsilon = fixed:0.02\n"
      "kernel = cosine\n"
      "x = -0.5, 0.5\n"
      "replications = 17\n"
      "base_seed = 99\n";
  const auto cfg = harness::parse_config_text(text);
  CHECK(cfg.kind == harness::ExperimentKind::drift_recovery);
  CHECK(cfg.model.lambda == 1.5);
  CHECK(cfg.model.sigma == 0.8);
  CHECK(cfg.model.hurst == 0.65);
  CHECK(cfg.delta == 0.1);
  REQUIRE(cfg.horizons.size() == 2);
  CHECK(cfg.horizons[1] == 200.0);
  CHECK(cfg.schedule.h_rule == estimators::BandwidthSchedule::HRule::fixed);
  CHECK(cfg.schedule.h_fixed == 0.35);
  CHECK(cfg.schedule.eps_fixed == 0.02);
  CHECK(cfg.kernel == "cosine");
  REQUIRE(cfg.x_grid.size() == 2);
  CHECK(cfg.replications == 17);
  CHECK(cfg.base_seed == 99);
  CHECK_THROWS_AS(harness::parse_config_text("bogus_key = 1\n"),
                  std::invalid_argument);
}

TEST_CASE("run_experiment validates the configuration") {
  harness::ExperimentConfig cfg;
  cfg.kind = harness::ExperimentKind::density_limit;
  cfg.model.hurst = 0.5;  // out of domain: rejected before any work
  CHECK_THROWS_AS(harness::run_experiment(cfg), std::invalid_argument);

  cfg.model.hurst = 0.7;
  cfg.horizons = {100.0, 50.0};
  CHECK_THROWS_AS(harness::run_experiment(cfg), std::invalid_argument);

  cfg.horizons = {0.5};  // power schedule needs T > 1
  CHECK_THROWS_AS(harness::run_experiment(cfg), std::invalid_argument);
}

TEST_CASE("stationary std oracle is stable across seeds and near theory") {
  const HurstIndex h(0.7);
  std::vector<double> singles;
  for (std::uint64_t s = 0; s < 3; ++s) {
    singles.push_back(
        harness::stationary_std_oracle(1.0, 1.0, h, 5000.0, 0.05, 1, 600 + s));
  }
  const double spread =
      (*std::max_element(singles.begin(), singles.end()) -
       *std::min_element(singles.begin(), singles.end()));
  CHECK(spread / stats::mean(singles) < 0.10);
  // closed form for the stationary variance: H Gamma(2H) at lambda = sigma = 1
  const double theory = std::sqrt(0.7 * std::tgamma(1.4));
  CHECK(std::abs(stats::mean(singles) - theory) / theory < 0.05);
}

TEST_CASE("reports are byte-reproducible from (config, seed)") {
  harness::ExperimentConfig cfg;
  cfg.kind = harness::ExperimentKind::mehler;
  cfg.mehler_q = {1, 2};
  cfg.mehler_rho = {0.5};
  cfg.mehler_samples = 20000;
  cfg.base_seed = 4242;
  const auto a = harness::run_experiment(cfg);
  const auto b = harness::run_experiment(cfg);
  CHECK(harness::rows_csv(a) == harness::rows_csv(b));
  CHECK(a.report_hash == b.report_hash);
  CHECK(a.config_hash == b.config_hash);

  harness::ExperimentConfig other = cfg;
  other.base_seed = 4243;
  const auto c = harness::run_experiment(other);
  CHECK(c.report_hash != a.report_hash);
}

TEST_CASE("threaded and serial runs produce identical rows") {
  harness::ExperimentConfig cfg;
  cfg.kind = harness::ExperimentKind::density_limit;
  cfg.model = {"linear", 1.0, 1.0, 1.0, 0.7};
  cfg.delta = 0.1;
  cfg.horizons = {50.0};
  cfg.replications = 8;
  cfg.base_seed = 31;
  cfg.x_grid = {0.5};
  cfg.threads = 1;
  const auto serial = harness::run_experiment(cfg);
  cfg.threads = 2;
  const auto threaded = harness::run_experiment(cfg);
  CHECK(harness::rows_csv(serial) == harness::rows_csv(threaded));
}

TEST_CASE("report files are written and the verdict table is printable") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "fracdrift_report_test";
  fs::remove_all(dir);
  harness::ExperimentConfig cfg;
  cfg.kind = harness::ExperimentKind::mehler;
  cfg.mehler_q = {1};
  cfg.mehler_rho = {0.5};
  cfg.mehler_samples = 20000;
  cfg.base_seed = 11;
  cfg.out_dir = dir.string();
  const auto report = harness::run_experiment(cfg);
  CHECK(fs::exists(dir / "rows.csv"));
  CHECK(fs::exists(dir / "summary.json"));
  CHECK(fs::exists(dir / "verdicts.txt"));
  {
    std::ifstream f(dir / "rows.csv");
    std::string header;
    std::getline(f, header);
    CHECK(header == "T,x,rep,estimator,value,flag");
  }
  const std::string table = harness::verdict_table(report);
  CHECK(table.find("mehler") != std::string::npos);
  CHECK(table.find("[PASS]") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("failure budget: errors are counted, not silently dropped") {
  // lambda * dt far above 2 makes the Euler chain explode and every
  // replication fails; the budget verdict must then fail the experiment
  harness::ExperimentConfig cfg;
  cfg.kind = harness::ExperimentKind::drift_recovery;
  cfg.model = {"linear", 100.0, 1.0, 1.0, 0.7};
  cfg.delta = 0.1;
  cfg.horizons = {50.0};
  cfg.replications = 4;
  cfg.base_seed = 5;
  cfg.x_grid = {0.5};
  const auto report = harness::run_experiment(cfg);
  CHECK(report.failed_replications == 4);
  CHECK(!report.all_pass());
  bool saw_budget = false;
  for (const auto& v : report.verdicts) {
    if (v.name == "failure_budget") {
      saw_budget = true;
      CHECK(!v.pass);
    }
  }
  CHECK(saw_budget);
}

TEST_CASE("small drift recovery run: estimates are finite and carry flags") {
  harness::ExperimentConfig cfg;
  cfg.kind = harness::ExperimentKind::drift_recovery;
  cfg.model = {"linear", 1.0, 1.0, 1.0, 0.7};
  cfg.delta = 0.1;
  cfg.horizons = {50.0};
  cfg.replications = 10;
  cfg.base_seed = 77;
  cfg.x_grid = {0.5};
  const auto report = harness::run_experiment(cfg);
  CHECK(report.rows.size() == 10);
  REQUIRE(report.cells.size() == 1);
  CHECK(report.cells[0].n_reps + report.cells[0].n_degenerate +
            report.cells[0].n_failed ==
        10);
  CHECK(std::isfinite(report.cells[0].mean));
}
