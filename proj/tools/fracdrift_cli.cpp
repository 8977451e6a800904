#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fracdrift/estimators.hpp"
#include "fracdrift/fgn.hpp"
#include "fracdrift/fsde.hpp"
#include "fracdrift/gaussdiag.hpp"
#include "fracdrift/harness.hpp"
#include "fracdrift/stats.hpp"

namespace fd = fracdrift;

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_path_csv(const std::string& file, const fd::Path& path) {
  std::ofstream f(file, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + file);
  f << "t,value\n";
  for (std::size_t i = 0; i < path.size(); ++i) {
    f << fmt17(path.grid.time(i)) << ',' << fmt17(path.values[i]) << '\n';
  }
}

void write_coupled_csv(const std::string& file, const fd::fsde::CoupledPaths& cp) {
  std::ofstream f(file, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + file);
  f << "t,base,shifted\n";
  for (std::size_t i = 0; i < cp.base.size(); ++i) {
    f << fmt17(cp.base.grid.time(i)) << ',' << fmt17(cp.base.values[i]) << ','
      << fmt17(cp.shifted.values[i]) << '\n';
  }
}

struct CsvPaths {
  std::vector<double> t;
  std::vector<std::vector<double>> cols;
  std::vector<std::string> names;
};

CsvPaths read_csv(const std::string& file) {
  std::ifstream f(file);
  if (!f) throw std::runtime_error("cannot open " + file);
  CsvPaths out;
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error("empty csv: " + file);
  {
    std::istringstream hs(line);
    std::string name;
    bool first = true;
    while (std::getline(hs, name, ',')) {
      if (first) {
        first = false;
      } else {
        out.names.push_back(name);
        out.cols.emplace_back();
      }
    }
  }
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::getline(ls, cell, ',');
    out.t.push_back(std::stod(cell));
    for (auto& col : out.cols) {
      if (!std::getline(ls, cell, ',')) {
        throw std::runtime_error("ragged csv row in " + file);
      }
      col.push_back(std::stod(cell));
    }
  }
  return out;
}

fd::TimeGrid grid_from_times(const std::vector<double>& t) {
  if (t.size() < 3) throw std::runtime_error("csv needs at least 3 samples");
  return fd::TimeGrid(t.back(), t.size() - 1);
}

struct SdeFlags {
  std::string model = "linear";
  double lambda = 1.0;
  double a = 1.0;
  double sigma = 1.0;
  double x0 = 0.0;
  double hurst = 0.7;
  double horizon = 10.0;
  std::size_t steps = 1000;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--model", model, "linear | tanh");
    cmd->add_option("--lambda", lambda, "drift slope");
    cmd->add_option("--a", a, "tanh strength");
    cmd->add_option("--sigma", sigma, "noise scale");
    cmd->add_option("--x0", x0, "initial condition");
    cmd->add_option("--hurst", hurst, "Hurst index in ]1/2, 1[");
    cmd->add_option("--horizon", horizon, "time horizon T");
    cmd->add_option("--steps", steps, "number of grid steps");
    cmd->add_option("--seed", seed, "base seed");
    cmd->add_option("--stream", stream, "stream id");
  }

  fd::fsde::DriftModel drift() const {
    if (model == "linear") return fd::fsde::linear_drift(lambda);
    if (model == "tanh") return fd::fsde::tanh_drift(lambda, a);
    throw std::runtime_error("unknown model: " + model);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fracdrift: fractional-SDE simulation and drift estimation"};
  app.require_subcommand(1);

  // ---- simulate-fbm
  auto* fbm = app.add_subcommand("simulate-fbm", "sample one fBm path");
  double fbm_h = 0.7, fbm_t = 1.0;
  std::size_t fbm_n = 1000;
  std::uint64_t fbm_seed = 1, fbm_stream = 0;
  std::string fbm_method = "fft", fbm_out = "fbm.csv";
  fbm->add_option("--hurst", fbm_h, "Hurst index")->required();
  fbm->add_option("--horizon", fbm_t, "horizon T")->required();
  fbm->add_option("--steps", fbm_n, "grid steps")->required();
  fbm->add_option("--seed", fbm_seed, "base seed");
  fbm->add_option("--stream", fbm_stream, "stream id");
  fbm->add_option("--method", fbm_method, "fft | cholesky");
  fbm->add_option("--out", fbm_out, "output csv")->required();

  // ---- simulate-sde
  auto* sde = app.add_subcommand("simulate-sde", "solve the SDE by Euler");
  SdeFlags sde_flags;
  sde_flags.add_to(sde);
  double sde_eps = 0.0;
  std::string sde_out = "sde.csv";
  sde->add_option("--epsilon", sde_eps,
                  "also produce the coupled path started at x0 + epsilon");
  sde->add_option("--out", sde_out, "output csv")->required();

  // ---- estimate-drift
  auto* est = app.add_subcommand("estimate-drift",
                                 "Nadaraya-Watson drift estimates on a path");
  SdeFlags est_flags;
  est_flags.add_to(est);
  std::string est_input, est_x = "auto", est_bw = "paper", est_eps = "squared";
  std::string est_kernel = "biweight", est_out = "est.csv";
  bool est_simulate = false;
  est->add_option("--input", est_input,
                  "coupled csv (t,base,shifted) or plain (t,value)");
  est->add_flag("--simulate", est_simulate, "simulate instead of reading csv");
  est->add_option("--x", est_x, "comma list of points, or auto");
  est->add_option("--bandwidth", est_bw, "fixed:<h> | paper");
  est->add_option("--epsilon", est_eps, "fixed:<eps> | squared");
  est->add_option("--kernel", est_kernel, "biweight | cosine");
  est->add_option("--out", est_out, "output csv")->required();

  // ---- check
  auto* check = app.add_subcommand("check", "quick PASS/FAIL diagnostics");
  check->require_subcommand(1);
  auto* mehler = check->add_subcommand("mehler", "Monte Carlo Mehler identity");
  int me_q = 2;
  double me_rho = 0.5;
  std::size_t me_samples = 100000;
  std::uint64_t me_seed = 1;
  mehler->add_option("--q", me_q, "Hermite order");
  mehler->add_option("--rho", me_rho, "correlation");
  mehler->add_option("--samples", me_samples, "Monte Carlo samples");
  mehler->add_option("--seed", me_seed, "base seed");

  auto* autoc = check->add_subcommand("autocorr",
                                      "double-integral growth of |rho|");
  std::string ac_model = "ou";
  double ac_lambda = 1.0, ac_sigma = 1.0, ac_hurst = 0.7, ac_horizon = 200.0;
  double ac_delta = 0.05;
  std::size_t ac_reps = 100;
  std::uint64_t ac_seed = 1;
  autoc->add_option("--model", ac_model, "only 'ou' is supported");
  autoc->add_option("--lambda", ac_lambda, "drift slope");
  autoc->add_option("--sigma", ac_sigma, "noise scale");
  autoc->add_option("--hurst", ac_hurst, "Hurst index");
  autoc->add_option("--horizon", ac_horizon, "base horizon T");
  autoc->add_option("--delta", ac_delta, "grid step");
  autoc->add_option("--replications", ac_reps, "Monte Carlo replications");
  autoc->add_option("--seed", ac_seed, "base seed");

  // ---- experiment
  auto* exp = app.add_subcommand("experiment", "run a Monte Carlo experiment");
  std::string exp_kind, exp_config, exp_out;
  int exp_threads = 0;
  exp->add_option("kind", exp_kind,
                  "density_limit | drift_recovery | pathwise_collapse | "
                  "rate_sweep | variance_scaling | mehler | autocorr")
      ->required();
  exp->add_option("--config", exp_config, "flat key=value config file");
  exp->add_option("--threads", exp_threads, "worker threads (0 = all)");
  exp->add_option("--out", exp_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fbm) {
      const fd::HurstIndex h(fbm_h);
      const fd::TimeGrid grid(fbm_t, fbm_n);
      const fd::SeedSpec seed{fbm_seed, fbm_stream};
      fd::Path path = fbm_method == "cholesky"
                          ? fd::fgn::sample_fgn_cholesky(h, grid, seed)
                          : fd::fgn::sample_fgn_fft(h, grid, seed);
      write_path_csv(fbm_out, path);
      std::cout << "wrote " << fbm_out << " (" << path.size() << " samples)\n";
      return 0;
    }

    if (*sde) {
      const fd::HurstIndex h(sde_flags.hurst);
      const fd::TimeGrid grid(sde_flags.horizon, sde_flags.steps);
      const fd::SeedSpec seed{sde_flags.seed, sde_flags.stream};
      const fd::Path noise = fd::fgn::sample_fgn_fft(h, grid, seed);
      const fd::fsde::SdeConfig cfg{sde_flags.drift(), sde_flags.sigma,
                                    sde_flags.x0, grid, h};
      if (sde_eps > 0.0) {
        const auto cp = fd::fsde::solve_coupled(cfg, sde_eps, noise, seed);
        write_coupled_csv(sde_out, cp);
      } else {
        write_path_csv(sde_out, fd::fsde::solve_euler(cfg, noise));
      }
      std::cout << "wrote " << sde_out << "\n";
      return 0;
    }

    if (*est) {
      const fd::HurstIndex h(est_flags.hurst);
      const auto kernel = fd::estimators::kernel_by_name(est_kernel);

      fd::estimators::BandwidthSchedule sched;
      if (est_bw == "paper") {
        sched.h_rule = fd::estimators::BandwidthSchedule::HRule::paper_power;
      } else if (est_bw.rfind("fixed:", 0) == 0) {
        sched.h_rule = fd::estimators::BandwidthSchedule::HRule::fixed;
        sched.h_fixed = std::stod(est_bw.substr(6));
      } else {
        throw std::runtime_error("--bandwidth must be paper or fixed:<h>");
      }
      if (est_eps == "squared") {
        sched.eps_rule =
            fd::estimators::BandwidthSchedule::EpsRule::squared_bandwidth;
      } else if (est_eps.rfind("fixed:", 0) == 0) {
        sched.eps_rule = fd::estimators::BandwidthSchedule::EpsRule::fixed;
        sched.eps_fixed = std::stod(est_eps.substr(6));
      } else {
        throw std::runtime_error("--epsilon must be squared or fixed:<eps>");
      }

      std::unique_ptr<fd::fsde::CoupledPaths> cp;
      double decay_rate = 0.0;  // observed pairs carry no dissipativity bound
      if (!est_input.empty()) {
        const CsvPaths csv = read_csv(est_input);
        const fd::TimeGrid grid = grid_from_times(csv.t);
        if (csv.cols.size() >= 2) {
          fd::Path base(grid, csv.cols[0]);
          fd::Path shifted(grid, csv.cols[1]);
          cp = std::make_unique<fd::fsde::CoupledPaths>(
              fd::fsde::couple_from_observed(base, shifted));
        } else {
          // a single column only supports f_hat and b_tilde; the coupled
          // estimator needs two observed initial conditions
          fd::Path base(grid, csv.cols[0]);
          const auto sv =
              fd::estimators::schedule_eval(sched, grid.horizon, h);
          std::vector<double> xs;
          if (est_x == "auto") {
            xs = fd::estimators::default_x_grid(base);
          } else {
            std::istringstream ls(est_x);
            std::string item;
            while (std::getline(ls, item, ',')) xs.push_back(std::stod(item));
          }
          std::ofstream f(est_out, std::ios::binary);
          f << "x,f_hat,b_tilde,b_hat_eps,correction,degenerate\n";
          for (double x : xs) {
            const auto pw =
                fd::estimators::pathwise_estimate(base, x, sv.h, kernel);
            f << fmt17(x) << ',' << fmt17(pw.f_hat) << ','
              << fmt17(pw.riemann) << ",nan,nan,"
              << (pw.degenerate ? "1" : "0") << '\n';
          }
          std::cout << "wrote " << est_out
                    << " (single-column input: b_hat_eps needs a coupled "
                       "pair)\n";
          return 0;
        }
      } else {
        const fd::TimeGrid grid(est_flags.horizon, est_flags.steps);
        const auto sv = fd::estimators::schedule_eval(sched, grid.horizon, h);
        const fd::SeedSpec seed{est_flags.seed, est_flags.stream};
        const fd::Path noise = fd::fgn::sample_fgn_fft(h, grid, seed);
        const fd::fsde::DriftModel drift = est_flags.drift();
        const fd::fsde::SdeConfig cfg{drift, est_flags.sigma, est_flags.x0,
                                      grid, h};
        cp = std::make_unique<fd::fsde::CoupledPaths>(
            fd::fsde::solve_coupled(cfg, sv.epsilon, noise, seed));
        decay_rate = drift.dissipativity();
      }

      const auto sv =
          fd::estimators::schedule_eval(sched, cp->base.grid.horizon, h);
      std::vector<double> xs;
      if (est_x == "auto") {
        xs = fd::estimators::default_x_grid(cp->base);
      } else {
        std::istringstream ls(est_x);
        std::string item;
        while (std::getline(ls, item, ',')) xs.push_back(std::stod(item));
      }
      const auto profile = fd::estimators::estimate_profile(
          *cp, est_flags.sigma, h, xs, sv.h, cp->epsilon, kernel, decay_rate);
      std::ofstream f(est_out, std::ios::binary);
      f << "x,f_hat,b_tilde,b_hat_eps,correction,degenerate\n";
      for (std::size_t i = 0; i < xs.size(); ++i) {
        f << fmt17(profile.x_grid[i]) << ',' << fmt17(profile.f_hat[i]) << ','
          << fmt17(profile.b_tilde[i]) << ',' << fmt17(profile.b_hat_eps[i])
          << ',' << fmt17(profile.correction[i]) << ','
          << (profile.degenerate_mask[i] ? "1" : "0") << '\n';
      }
      std::cout << "wrote " << est_out << " (h=" << sv.h
                << ", eps=" << cp->epsilon << ")\n";
      return 0;
    }

    if (*mehler) {
      const auto res =
          fd::gaussdiag::mehler_check(me_q, me_rho, me_samples, {me_seed, 0});
      const double dev = std::abs(res.empirical - res.predicted);
      const bool pass = dev <= 5.0 * res.stderr_;
      std::cout << (pass ? "PASS" : "FAIL") << ",q=" << me_q
                << ",rho=" << fmt17(me_rho) << ",empirical="
                << fmt17(res.empirical) << ",predicted=" << fmt17(res.predicted)
                << ",stderr=" << fmt17(res.stderr_) << "\n";
      return pass ? 0 : 1;
    }

    if (*autoc) {
      if (ac_model != "ou") throw std::runtime_error("only --model ou");
      fd::harness::ExperimentConfig cfg;
      cfg.kind = fd::harness::ExperimentKind::autocorr;
      cfg.model = {"linear", ac_lambda, 1.0, ac_sigma, ac_hurst};
      cfg.delta = ac_delta;
      cfg.horizons = {ac_horizon};
      cfg.replications = ac_reps;
      cfg.base_seed = ac_seed;
      const auto report = fd::harness::run_experiment(cfg);
      const auto& v = report.verdicts.front();
      std::cout << (v.pass ? "PASS" : "FAIL") << ",ratio=" << fmt17(v.observed)
                << ",bound=" << fmt17(v.bound) << ",T=" << fmt17(ac_horizon)
                << ",hurst=" << fmt17(ac_hurst) << "\n";
      return report.all_pass() ? 0 : 1;
    }

    if (*exp) {
      fd::harness::ExperimentConfig cfg;
      if (!exp_config.empty()) {
        cfg = fd::harness::parse_config_file(exp_config);
      }
      cfg.kind = fd::harness::kind_by_name(exp_kind);
      if (exp_threads > 0) cfg.threads = exp_threads;
      if (!exp_out.empty()) cfg.out_dir = exp_out;
      const auto report = fd::harness::run_experiment(cfg);
      std::cout << fd::harness::verdict_table(report);
      return report.all_pass() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
