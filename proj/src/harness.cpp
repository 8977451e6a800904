#include "fracdrift/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "fracdrift/fgn.hpp"
#include "fracdrift/gaussdiag.hpp"
#include "fracdrift/stats.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fracdrift::harness {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
#ifdef _OPENMP
  const int k = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(k)
  for (long i = 0; i < static_cast<long>(n); ++i) {
    fn(static_cast<std::size_t>(i));
  }
#else
  (void)threads;
  for (std::size_t i = 0; i < n; ++i) fn(i);
#endif
}

TimeGrid make_grid(double horizon, double delta) {
  const auto n = static_cast<std::size_t>(std::llround(horizon / delta));
  if (n < 2 || std::abs(static_cast<double>(n) * delta - horizon) >
                   1e-6 * std::max(1.0, horizon)) {
    throw std::invalid_argument("horizon " + fmt17(horizon) +
                                " is not a multiple of delta " + fmt17(delta));
  }
  return TimeGrid(horizon, n);
}

fsde::DriftModel make_model(const ModelSpec& spec) {
  if (spec.model == "linear") return fsde::linear_drift(spec.lambda);
  if (spec.model == "tanh") return fsde::tanh_drift(spec.lambda, spec.a);
  throw std::invalid_argument("unknown model: " + spec.model);
}

void require_langevin(const ExperimentConfig& cfg, const char* kind) {
  if (cfg.model.model != "linear") {
    throw std::invalid_argument(std::string(kind) +
                                ": only the Langevin (linear) model has a "
                                "stationary sampler and closed-form targets");
  }
}

struct RepOutcome {
  std::vector<double> values;  // one slot per (T, x) cell, NaN if degenerate
  std::vector<bool> degenerate;
  bool failed = false;
  std::string error;
};

struct CellStats {
  std::size_t n_ok = 0;
  std::size_t n_degenerate = 0;
  std::size_t n_failed = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  double variance = 0.0;
  double rmse = 0.0;
};

CellStats aggregate_cell(const std::vector<RepOutcome>& reps, std::size_t slot,
                         double truth, bool use_abs) {
  CellStats cs;
  std::vector<double> vals;
  vals.reserve(reps.size());
  double sq = 0.0;
  for (const auto& r : reps) {
    if (r.failed) {
      ++cs.n_failed;
      continue;
    }
    if (r.degenerate[slot]) {
      ++cs.n_degenerate;
      continue;
    }
    const double v = use_abs ? std::abs(r.values[slot]) : r.values[slot];
    vals.push_back(v);
    sq += (r.values[slot] - truth) * (r.values[slot] - truth);
  }
  cs.n_ok = vals.size();
  if (cs.n_ok >= 2) {
    cs.mean = stats::mean(vals);
    cs.variance = stats::variance(vals);
    cs.stderr_ = std::sqrt(cs.variance / static_cast<double>(cs.n_ok));
    cs.rmse = std::sqrt(sq / static_cast<double>(cs.n_ok));
  } else if (cs.n_ok == 1) {
    cs.mean = vals[0];
    cs.rmse = std::sqrt(sq);
  }
  return cs;
}

void check_failure_budget(ExperimentReport& report,
                          const std::vector<RepOutcome>& reps) {
  std::size_t failed = 0;
  for (const auto& r : reps) {
    if (r.failed) ++failed;
  }
  report.failed_replications += failed;
  report.total_replications += reps.size();
  if (failed > 0) {
    const double frac =
        static_cast<double>(failed) / static_cast<double>(reps.size());
    Verdict v{"failure_budget", frac <= 0.05, frac, 0.05,
              "fraction of replications that raised an error"};
    report.verdicts.push_back(v);
  }
}

// --------------------------------------------------------------------------
// experiment kinds
// --------------------------------------------------------------------------

void run_density_limit(const ExperimentConfig& cfg, ExperimentReport& report) {
  require_langevin(cfg, "density_limit");
  const HurstIndex hurst(cfg.model.hurst);
  const auto kernel = estimators::kernel_by_name(cfg.kernel);
  const std::vector<double> xs =
      cfg.x_grid.empty() ? std::vector<double>{-1.0, -0.5, 0.5, 1.0} : cfg.x_grid;

  report.sigma0 = stationary_std_oracle(cfg.model.lambda, cfg.model.sigma,
                                        hurst, 1e4, cfg.delta);

  for (double horizon : cfg.horizons) {
    const TimeGrid grid = make_grid(horizon, cfg.delta);
    const auto sched = estimators::schedule_eval(cfg.schedule, horizon, hurst);
    std::vector<RepOutcome> reps(cfg.replications);
    parallel_for(cfg.replications, cfg.threads, [&](std::size_t r) {
      RepOutcome& out = reps[r];
      out.values.assign(xs.size(), 0.0);
      out.degenerate.assign(xs.size(), false);
      try {
        Path path = fsde::stationary_ou_path(cfg.model.lambda, cfg.model.sigma,
                                             grid, hurst,
                                             {cfg.base_seed, r}, cfg.burn_in);
        for (std::size_t ix = 0; ix < xs.size(); ++ix) {
          out.values[ix] =
              estimators::density_estimate(path, xs[ix], sched.h, kernel);
        }
      } catch (const std::exception& e) {
        out.failed = true;
        out.error = e.what();
      }
    });
    for (std::size_t ix = 0; ix < xs.size(); ++ix) {
      for (std::size_t r = 0; r < reps.size(); ++r) {
        report.rows.push_back({horizon, xs[ix], r, "f_hat",
                               reps[r].failed ? 0.0 : reps[r].values[ix],
                               reps[r].failed ? "failed" : "ok"});
      }
      const CellStats cs = aggregate_cell(reps, ix, 0.0, false);
      report.cells.push_back({horizon, xs[ix], "f_hat", cs.n_ok,
                              cs.n_degenerate, cs.n_failed, cs.mean,
                              cs.stderr_, 0.0});
      const double target =
          gaussdiag::normal_density(xs[ix] / report.sigma0) / report.sigma0;
      const double rel = std::abs(cs.mean - target) / target;
      report.verdicts.push_back(
          {"density_limit T=" + fmt17(horizon) + " x=" + fmt17(xs[ix]), rel <= 0.10,
           rel, 0.10,
           "relative error of mean f_hat against nu(x/sigma0)/sigma0, sigma0 = " +
               fmt17(report.sigma0)});
    }
    check_failure_budget(report, reps);
  }
}

void run_drift_recovery(const ExperimentConfig& cfg, ExperimentReport& report) {
  require_langevin(cfg, "drift_recovery");
  const HurstIndex hurst(cfg.model.hurst);
  const auto kernel = estimators::kernel_by_name(cfg.kernel);
  const auto model = make_model(cfg.model);
  const std::vector<double> xs =
      cfg.x_grid.empty() ? std::vector<double>{-1.0, -0.5, 0.5, 1.0} : cfg.x_grid;

  for (double horizon : cfg.horizons) {
    const TimeGrid grid = make_grid(horizon, cfg.delta);
    const auto sched = estimators::schedule_eval(cfg.schedule, horizon, hurst);
    std::vector<RepOutcome> reps(cfg.replications);
    parallel_for(cfg.replications, cfg.threads, [&](std::size_t r) {
      RepOutcome& out = reps[r];
      out.values.assign(xs.size(), 0.0);
      out.degenerate.assign(xs.size(), false);
      try {
        fsde::CoupledPaths cp = fsde::stationary_coupled_ou(
            cfg.model.lambda, cfg.model.sigma, grid, hurst, sched.epsilon,
            {cfg.base_seed, r}, cfg.burn_in);
        for (std::size_t ix = 0; ix < xs.size(); ++ix) {
          const auto est = estimators::drift_estimate_eps(
              cp, cfg.model.sigma, hurst, xs[ix], sched.h, kernel,
              sched.epsilon, model.dissipativity());
          out.values[ix] = est.estimate;
          out.degenerate[ix] = est.degenerate;
        }
      } catch (const std::exception& e) {
        out.failed = true;
        out.error = e.what();
      }
    });
    for (std::size_t ix = 0; ix < xs.size(); ++ix) {
      for (std::size_t r = 0; r < reps.size(); ++r) {
        const char* flag = reps[r].failed ? "failed"
                           : reps[r].degenerate[ix] ? "degenerate"
                                                    : "ok";
        report.rows.push_back({horizon, xs[ix], r, "b_hat_eps",
                               reps[r].failed ? 0.0 : reps[r].values[ix], flag});
      }
      const double truth = model.b(xs[ix]);
      const CellStats cs = aggregate_cell(reps, ix, truth, false);
      report.cells.push_back({horizon, xs[ix], "b_hat_eps", cs.n_ok,
                              cs.n_degenerate, cs.n_failed, cs.mean,
                              cs.stderr_, cs.rmse});
      const double frac_degen =
          static_cast<double>(cs.n_degenerate) /
          std::max<std::size_t>(1, cs.n_ok + cs.n_degenerate);
      if (frac_degen > 0.30) {
        report.verdicts.push_back(
            {"drift_recovery T=" + fmt17(horizon) + " x=" + fmt17(xs[ix]), true,
             frac_degen, 0.30,
             "dropped: more than 30% of replications degenerate at this x"});
        continue;
      }
      const double bound =
          model.lip_norm() * sched.h + 3.0 * cs.stderr_;
      const double dev = std::abs(cs.mean - truth);
      report.verdicts.push_back(
          {"drift_recovery T=" + fmt17(horizon) + " x=" + fmt17(xs[ix]),
           dev <= bound, dev, bound,
           "|mean b_hat_eps - b(x)| against ||b||_Lip h + 3 se"});
    }
    check_failure_budget(report, reps);
  }
}

void run_pathwise_collapse(const ExperimentConfig& cfg,
                           ExperimentReport& report) {
  require_langevin(cfg, "pathwise_collapse");
  const HurstIndex hurst(cfg.model.hurst);
  const auto kernel = estimators::kernel_by_name(cfg.kernel);
  const auto model = make_model(cfg.model);
  const double x = cfg.x_grid.empty() ? 0.5 : cfg.x_grid.front();

  const double t_max = cfg.horizons.back();
  const TimeGrid grid_max = make_grid(t_max, cfg.delta);
  std::vector<std::size_t> n_steps;
  for (double t : cfg.horizons) n_steps.push_back(make_grid(t, cfg.delta).n);

  std::vector<RepOutcome> reps(cfg.replications);
  parallel_for(cfg.replications, cfg.threads, [&](std::size_t r) {
    RepOutcome& out = reps[r];
    out.values.assign(cfg.horizons.size(), 0.0);
    out.degenerate.assign(cfg.horizons.size(), false);
    try {
      Path path = fsde::stationary_ou_path(cfg.model.lambda, cfg.model.sigma,
                                           grid_max, hurst, {cfg.base_seed, r},
                                           cfg.burn_in);
      for (std::size_t it = 0; it < cfg.horizons.size(); ++it) {
        const Path sub = path.prefix(n_steps[it]);
        const auto sched =
            estimators::schedule_eval(cfg.schedule, sub.grid.horizon, hurst);
        const auto est = estimators::pathwise_estimate(sub, x, sched.h, kernel);
        out.values[it] = est.riemann;
        out.degenerate[it] = est.degenerate;
      }
    } catch (const std::exception& e) {
      out.failed = true;
      out.error = e.what();
    }
  });

  std::vector<double> mean_abs(cfg.horizons.size(), 0.0);
  for (std::size_t it = 0; it < cfg.horizons.size(); ++it) {
    for (std::size_t r = 0; r < reps.size(); ++r) {
      const char* flag = reps[r].failed ? "failed"
                         : reps[r].degenerate[it] ? "degenerate"
                                                  : "ok";
      report.rows.push_back({cfg.horizons[it], x, r, "b_tilde",
                             reps[r].failed ? 0.0 : reps[r].values[it], flag});
    }
    const CellStats cs = aggregate_cell(reps, it, 0.0, true);
    mean_abs[it] = cs.mean;
    report.cells.push_back({cfg.horizons[it], x, "abs_b_tilde", cs.n_ok,
                            cs.n_degenerate, cs.n_failed, cs.mean, cs.stderr_,
                            0.0});
  }
  for (std::size_t it = 1; it < cfg.horizons.size(); ++it) {
    report.verdicts.push_back(
        {"pathwise_collapse decrease T=" + fmt17(cfg.horizons[it - 1]) + "->" +
             fmt17(cfg.horizons[it]),
         mean_abs[it] < mean_abs[it - 1], mean_abs[it], mean_abs[it - 1],
         "mean |b_tilde| must decrease strictly in T"});
  }
  const double target = 0.2 * std::abs(model.b(x));
  report.verdicts.push_back({"pathwise_collapse final", mean_abs.back() < target,
                             mean_abs.back(), target,
                             "mean |b_tilde| at the largest T against 0.2 |b(x)|"});
  check_failure_budget(report, reps);
}

void run_rate_sweep(const ExperimentConfig& cfg, ExperimentReport& report) {
  require_langevin(cfg, "rate_sweep");
  const HurstIndex hurst(cfg.model.hurst);
  const auto kernel = estimators::kernel_by_name(cfg.kernel);
  const auto model = make_model(cfg.model);
  const double x = cfg.x_grid.empty() ? 0.5 : cfg.x_grid.front();
  const double truth = model.b(x);

  const double t_max = cfg.horizons.back();
  const TimeGrid grid_max = make_grid(t_max, cfg.delta);
  std::vector<std::size_t> n_steps;
  for (double t : cfg.horizons) n_steps.push_back(make_grid(t, cfg.delta).n);

  std::vector<RepOutcome> reps(cfg.replications);
  parallel_for(cfg.replications, cfg.threads, [&](std::size_t r) {
    RepOutcome& out = reps[r];
    out.values.assign(cfg.horizons.size(), 0.0);
    out.degenerate.assign(cfg.horizons.size(), false);
    try {
      const SeedSpec seed{cfg.base_seed, r};
      Path base = fsde::stationary_ou_path(cfg.model.lambda, cfg.model.sigma,
                                           grid_max, hurst, seed, cfg.burn_in);
      for (std::size_t it = 0; it < cfg.horizons.size(); ++it) {
        const Path sub = base.prefix(n_steps[it]);
        const auto sched =
            estimators::schedule_eval(cfg.schedule, sub.grid.horizon, hurst);
        const fsde::CoupledPaths cp =
            fsde::couple_from(sub, model, sched.epsilon, seed);
        const auto est = estimators::drift_estimate_eps(
            cp, cfg.model.sigma, hurst, x, sched.h, kernel, sched.epsilon,
            model.dissipativity());
        out.values[it] = est.estimate;
        out.degenerate[it] = est.degenerate;
      }
    } catch (const std::exception& e) {
      out.failed = true;
      out.error = e.what();
    }
  });

  std::vector<std::pair<double, double>> t_rmse;
  for (std::size_t it = 0; it < cfg.horizons.size(); ++it) {
    for (std::size_t r = 0; r < reps.size(); ++r) {
      const char* flag = reps[r].failed ? "failed"
                         : reps[r].degenerate[it] ? "degenerate"
                                                  : "ok";
      report.rows.push_back({cfg.horizons[it], x, r, "b_hat_eps",
                             reps[r].failed ? 0.0 : reps[r].values[it], flag});
    }
    const CellStats cs = aggregate_cell(reps, it, truth, false);
    report.cells.push_back({cfg.horizons[it], x, "b_hat_eps", cs.n_ok,
                            cs.n_degenerate, cs.n_failed, cs.mean, cs.stderr_,
                            cs.rmse});
    const double frac_degen =
        static_cast<double>(cs.n_degenerate) /
        std::max<std::size_t>(1, cs.n_ok + cs.n_degenerate);
    if (frac_degen > 0.30) {
      report.verdicts.push_back(
          {"rate_sweep dropped T=" + fmt17(cfg.horizons[it]) + " x=" + fmt17(x),
           true, frac_degen, 0.30,
           "dropped from the rate fit: more than 30% of replications "
           "degenerate"});
      continue;
    }
    t_rmse.emplace_back(cfg.horizons[it], cs.rmse);
  }
  for (std::size_t it = 1; it < t_rmse.size(); ++it) {
    report.verdicts.push_back(
        {"rate_sweep monotone T=" + fmt17(t_rmse[it - 1].first) + "->" +
             fmt17(t_rmse[it].first),
         t_rmse[it].second <= t_rmse[it - 1].second, t_rmse[it].second,
         t_rmse[it - 1].second, "RMSE must be nonincreasing in T"});
  }
  const RateFit fit = fit_rate(t_rmse);
  report.rate = fit;
  report.verdicts.push_back({"rate_sweep slope", fit.slope < 0.0, fit.slope, 0.0,
                             "fitted log RMSE vs log T slope must be negative"});

  const double hval = hurst.value();
  report.references.push_back("theoretical bias order: h(T)");
  report.references.push_back(
      "theoretical variance order: T^{H-1} h^{-2} = T^" + fmt17(hval - 1.0) +
      " h^{-2}");
  report.references.push_back("best rate reference: T^{-(2/3)(1-H)} = T^" +
                              fmt17(-(2.0 / 3.0) * (1.0 - hval)));
  report.references.push_back("bandwidth schedule: h(T) = T^{(H-1)/3} = T^" +
                              fmt17((hval - 1.0) / 3.0));
  check_failure_budget(report, reps);
}

void run_variance_scaling(const ExperimentConfig& cfg,
                          ExperimentReport& report) {
  require_langevin(cfg, "variance_scaling");
  const HurstIndex hurst(cfg.model.hurst);
  const auto kernel = estimators::kernel_by_name(cfg.kernel);
  const auto model = make_model(cfg.model);
  const double x = cfg.x_grid.empty() ? 0.5 : cfg.x_grid.front();
  const double h = cfg.fixed_h > 0.0 ? cfg.fixed_h : 0.4;

  const double t_max = cfg.horizons.back();
  const TimeGrid grid_max = make_grid(t_max, cfg.delta);
  std::vector<std::size_t> n_steps;
  for (double t : cfg.horizons) n_steps.push_back(make_grid(t, cfg.delta).n);

  const std::size_t slots = cfg.horizons.size() + 1;  // last: 2h direction check
  std::vector<RepOutcome> reps(cfg.replications);
  parallel_for(cfg.replications, cfg.threads, [&](std::size_t r) {
    RepOutcome& out = reps[r];
    out.values.assign(slots, 0.0);
    out.degenerate.assign(slots, false);
    try {
      Path base = fsde::stationary_ou_path(cfg.model.lambda, cfg.model.sigma,
                                           grid_max, hurst,
                                           {cfg.base_seed, r}, cfg.burn_in);
      for (std::size_t it = 0; it < cfg.horizons.size(); ++it) {
        const Path sub = base.prefix(n_steps[it]);
        const auto est = estimators::drift_estimate_skorokhod(
            sub, model, cfg.model.sigma, hurst, x, h, kernel);
        out.values[it] = est.skorokhod_term;
        out.degenerate[it] = est.degenerate;
      }
      const Path smallest = base.prefix(n_steps.front());
      const auto wide = estimators::drift_estimate_skorokhod(
          smallest, model, cfg.model.sigma, hurst, x, 2.0 * h, kernel);
      out.values[slots - 1] = wide.skorokhod_term;
      out.degenerate[slots - 1] = wide.degenerate;
    } catch (const std::exception& e) {
      out.failed = true;
      out.error = e.what();
    }
  });

  std::vector<std::pair<double, double>> t_var;
  for (std::size_t it = 0; it < cfg.horizons.size(); ++it) {
    for (std::size_t r = 0; r < reps.size(); ++r) {
      const char* flag = reps[r].failed ? "failed"
                         : reps[r].degenerate[it] ? "degenerate"
                                                  : "ok";
      report.rows.push_back({cfg.horizons[it], x, r, "s_term",
                             reps[r].failed ? 0.0 : reps[r].values[it], flag});
    }
    const CellStats cs = aggregate_cell(reps, it, 0.0, false);
    report.cells.push_back({cfg.horizons[it], x, "s_term", cs.n_ok,
                            cs.n_degenerate, cs.n_failed, cs.mean, cs.stderr_,
                            0.0});
    t_var.emplace_back(cfg.horizons[it], cs.variance);
  }
  const RateFit fit = fit_rate(t_var);
  report.rate = fit;
  const double bound = 2.0 * (hurst.value() - 1.0) + 0.25;
  report.verdicts.push_back(
      {"variance_scaling slope", fit.slope <= bound, fit.slope, bound,
       "log Var[S_{T,h}] vs log T slope against 2(H-1) + 0.25"});
  // the unnormalized integral int phi_h dB has variance (T h)^2 Var[S];
  // with h fixed its slope is the S slope plus exactly 2
  const double raw_bound = 2.0 * hurst.value() + 0.25;
  report.verdicts.push_back(
      {"variance_scaling raw slope", fit.slope + 2.0 <= raw_bound,
       fit.slope + 2.0, raw_bound,
       "log Var[int phi_h(X) dB*] vs log T slope against 2H + 0.25"});

  const CellStats at_h = aggregate_cell(reps, 0, 0.0, false);
  const CellStats at_2h = aggregate_cell(reps, slots - 1, 0.0, false);
  report.verdicts.push_back({"variance_scaling h direction",
                             at_2h.variance < at_h.variance, at_2h.variance,
                             at_h.variance,
                             "doubling h at the smallest T must decrease Var[S]"});
  check_failure_budget(report, reps);
}

void run_mehler(const ExperimentConfig& cfg, ExperimentReport& report) {
  std::vector<std::pair<int, double>> cells;
  for (int q : cfg.mehler_q) {
    for (double rho : cfg.mehler_rho) cells.emplace_back(q, rho);
  }
  std::vector<gaussdiag::MehlerCheck> results(cells.size());
  std::vector<std::string> errors(cells.size());
  parallel_for(cells.size(), cfg.threads, [&](std::size_t i) {
    try {
      results[i] = gaussdiag::mehler_check(cells[i].first, cells[i].second,
                                           cfg.mehler_samples,
                                           {cfg.base_seed, i});
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (const auto& err : errors) {
    if (!err.empty()) throw std::runtime_error("mehler: " + err);
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& [q, rho] = cells[i];
    const auto& res = results[i];
    report.rows.push_back({static_cast<double>(q), rho, 0, "mehler_empirical",
                           res.empirical, "ok"});
    report.rows.push_back({static_cast<double>(q), rho, 0, "mehler_predicted",
                           res.predicted, "ok"});
    const double dev = std::abs(res.empirical - res.predicted);
    report.verdicts.push_back(
        {"mehler q=" + std::to_string(q) + " rho=" + fmt17(rho),
         dev <= 5.0 * res.stderr_, dev, 5.0 * res.stderr_,
         "|empirical - q! rho^q| against 5 Monte Carlo standard errors"});
  }
  report.total_replications += cells.size();
}

void run_autocorr(const ExperimentConfig& cfg, ExperimentReport& report) {
  require_langevin(cfg, "autocorr");
  const HurstIndex hurst(cfg.model.hurst);
  const double horizon = cfg.horizons.front();
  const TimeGrid grid2 = make_grid(2.0 * horizon, cfg.delta);
  const std::size_t n2 = grid2.n;
  const std::size_t n1 = n2 / 2;

  std::vector<std::vector<double>> rho1(cfg.replications), rho2(cfg.replications);
  std::vector<int> failed(cfg.replications, 0);
  parallel_for(cfg.replications, cfg.threads, [&](std::size_t r) {
    try {
      Path path = fsde::stationary_ou_path(cfg.model.lambda, cfg.model.sigma,
                                           grid2, hurst, {cfg.base_seed, r},
                                           cfg.burn_in);
      std::vector<double> half(path.values.begin(),
                               path.values.begin() + static_cast<long>(n1) + 1);
      rho1[r] = stats::autocorrelation(half, n1 - 1);
      rho2[r] = stats::autocorrelation(path.values, n2 - 1);
    } catch (const std::exception&) {
      failed[r] = 1;
    }
  });

  std::vector<double> mean1(n1, 0.0), mean2(n2, 0.0);
  std::size_t ok = 0;
  for (std::size_t r = 0; r < cfg.replications; ++r) {
    if (failed[r]) continue;
    ++ok;
    for (std::size_t k = 0; k < n1; ++k) mean1[k] += rho1[r][k];
    for (std::size_t k = 0; k < n2; ++k) mean2[k] += rho2[r][k];
  }
  if (ok == 0) throw std::runtime_error("autocorr: every replication failed");
  for (auto& v : mean1) v /= static_cast<double>(ok);
  for (auto& v : mean2) v /= static_cast<double>(ok);
  mean1[0] = 1.0;
  mean2[0] = 1.0;

  const double i1 =
      gaussdiag::autocorr_double_integral(mean1, horizon, cfg.delta);
  const double i2 =
      gaussdiag::autocorr_double_integral(mean2, 2.0 * horizon, cfg.delta);
  report.rows.push_back({horizon, 0.0, 0, "autocorr_integral", i1, "ok"});
  report.rows.push_back({2.0 * horizon, 0.0, 0, "autocorr_integral", i2, "ok"});
  const double bound = std::pow(2.0, 2.0 * hurst.value()) * 1.25;
  report.verdicts.push_back(
      {"autocorr growth", i2 / i1 <= bound, i2 / i1, bound,
       "doubling T must grow the |rho| double integral no faster than 2^{2H} "
       "with 25% slack"});
  report.failed_replications +=
      static_cast<std::size_t>(std::count(failed.begin(), failed.end(), 1));
  report.total_replications += cfg.replications;
}

std::vector<double> default_horizons(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::density_limit:
      return {2000.0};
    case ExperimentKind::drift_recovery:
      return {500.0};
    case ExperimentKind::pathwise_collapse:
      return {100.0, 300.0, 1000.0};
    case ExperimentKind::rate_sweep:
      return {250.0, 500.0, 1000.0};
    case ExperimentKind::variance_scaling:
      return {125.0, 250.0, 500.0, 1000.0};
    case ExperimentKind::autocorr:
      return {200.0};
    default:
      return {};
  }
}

std::string config_canonical_text(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "kind=" << kind_name(cfg.kind) << ";model=" << cfg.model.model
     << ";lambda=" << fmt17(cfg.model.lambda) << ";a=" << fmt17(cfg.model.a)
     << ";sigma=" << fmt17(cfg.model.sigma)
     << ";hurst=" << fmt17(cfg.model.hurst) << ";delta=" << fmt17(cfg.delta)
     << ";horizons=";
  for (double t : cfg.horizons) os << fmt17(t) << ",";
  os << ";hrule=" << (cfg.schedule.h_rule == estimators::BandwidthSchedule::HRule::fixed
                          ? "fixed:" + fmt17(cfg.schedule.h_fixed)
                          : "paper")
     << ";epsrule="
     << (cfg.schedule.eps_rule == estimators::BandwidthSchedule::EpsRule::fixed
             ? "fixed:" + fmt17(cfg.schedule.eps_fixed)
             : "squared")
     << ";kernel=" << cfg.kernel << ";x=";
  for (double x : cfg.x_grid) os << fmt17(x) << ",";
  os << ";replications=" << cfg.replications << ";base_seed=" << cfg.base_seed
     << ";fixed_h=" << fmt17(cfg.fixed_h) << ";burn_in=" << fmt17(cfg.burn_in)
     << ";mehler_samples=" << cfg.mehler_samples;
  return os.str();
}

}  // namespace

ExperimentKind kind_by_name(const std::string& name) {
  if (name == "density_limit") return ExperimentKind::density_limit;
  if (name == "drift_recovery") return ExperimentKind::drift_recovery;
  if (name == "pathwise_collapse") return ExperimentKind::pathwise_collapse;
  if (name == "rate_sweep") return ExperimentKind::rate_sweep;
  if (name == "variance_scaling") return ExperimentKind::variance_scaling;
  if (name == "mehler") return ExperimentKind::mehler;
  if (name == "autocorr") return ExperimentKind::autocorr;
  throw std::invalid_argument("unknown experiment kind: " + name);
}

std::string kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::density_limit: return "density_limit";
    case ExperimentKind::drift_recovery: return "drift_recovery";
    case ExperimentKind::pathwise_collapse: return "pathwise_collapse";
    case ExperimentKind::rate_sweep: return "rate_sweep";
    case ExperimentKind::variance_scaling: return "variance_scaling";
    case ExperimentKind::mehler: return "mehler";
    case ExperimentKind::autocorr: return "autocorr";
  }
  return "unknown";
}

bool ExperimentReport::all_pass() const {
  for (const auto& v : verdicts) {
    if (!v.pass) return false;
  }
  return true;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  if (cfg.horizons.empty()) cfg.horizons = default_horizons(cfg.kind);
  if (cfg.replications < 2 && cfg.kind != ExperimentKind::mehler &&
      cfg.kind != ExperimentKind::autocorr) {
    throw std::invalid_argument("run_experiment: need at least 2 replications");
  }
  for (std::size_t i = 1; i < cfg.horizons.size(); ++i) {
    if (!(cfg.horizons[i] > cfg.horizons[i - 1])) {
      throw std::invalid_argument(
          "run_experiment: horizons must be strictly increasing");
    }
  }
  if (cfg.schedule.h_rule == estimators::BandwidthSchedule::HRule::paper_power) {
    for (double t : cfg.horizons) {
      if (!(t > 1.0)) {
        throw std::invalid_argument(
            "run_experiment: the power schedule needs every horizon > 1");
      }
    }
  }
  // rejects H outside ]1/2, 1[ before any work happens
  (void)HurstIndex(cfg.model.hurst);

  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  report.kind = kind_name(cfg.kind);
  report.config_hash = hex64(fnv1a(config_canonical_text(cfg)));

  report.config_text = config_canonical_text(cfg);
  switch (cfg.kind) {
    case ExperimentKind::density_limit: run_density_limit(cfg, report); break;
    case ExperimentKind::drift_recovery: run_drift_recovery(cfg, report); break;
    case ExperimentKind::pathwise_collapse:
      run_pathwise_collapse(cfg, report);
      break;
    case ExperimentKind::rate_sweep: run_rate_sweep(cfg, report); break;
    case ExperimentKind::variance_scaling:
      run_variance_scaling(cfg, report);
      break;
    case ExperimentKind::mehler: run_mehler(cfg, report); break;
    case ExperimentKind::autocorr: run_autocorr(cfg, report); break;
  }

  report.report_hash = hex64(fnv1a(rows_csv(report)));
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  if (!cfg.out_dir.empty()) write_report(report, cfg.out_dir);
  return report;
}

ExperimentReport variance_scaling_experiment(ExperimentConfig cfg) {
  cfg.kind = ExperimentKind::variance_scaling;
  return run_experiment(cfg);
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& horizon_error) {
  std::vector<double> xs, ys;
  for (const auto& [t, err] : horizon_error) {
    if (!(err > 0.0)) {
      std::fprintf(stderr,
                   "fit_rate: dropping nonpositive error %.17g at T=%.17g\n",
                   err, t);
      continue;
    }
    xs.push_back(std::log(t));
    ys.push_back(std::log(err));
  }
  if (xs.size() < 3) {
    throw std::invalid_argument("fit_rate: need at least 3 usable horizons");
  }
  const auto fit = stats::ols(xs, ys);
  return {fit.slope, fit.slope_stderr};
}

double stationary_std_oracle(double lambda, double sigma,
                             const HurstIndex& hurst, double horizon,
                             double delta, std::size_t seeds,
                             std::uint64_t base_seed) {
  if (seeds == 0) throw std::invalid_argument("stationary_std_oracle: no seeds");
  const TimeGrid grid = make_grid(horizon, delta);
  std::vector<double> sds(seeds, 0.0);
  std::vector<std::string> errors(seeds);
  // exceptions must not escape the worker region; collect and rethrow
  parallel_for(seeds, 0, [&](std::size_t s) {
    try {
      Path path =
          fsde::stationary_ou_path(lambda, sigma, grid, hurst, {base_seed, s});
      sds[s] = stats::stddev(path.values);
    } catch (const std::exception& e) {
      errors[s] = e.what();
    }
  });
  for (const auto& err : errors) {
    if (!err.empty()) {
      throw std::runtime_error("stationary_std_oracle: " + err);
    }
  }
  return stats::mean(sds);
}

std::string rows_csv(const ExperimentReport& report) {
  std::ostringstream os;
  os << "T,x,rep,estimator,value,flag\n";
  for (const auto& row : report.rows) {
    os << fmt17(row.horizon) << ',' << fmt17(row.x) << ',' << row.rep << ','
       << row.estimator << ',' << fmt17(row.value) << ',' << row.flag << '\n';
  }
  return os.str();
}

std::string verdict_table(const ExperimentReport& report) {
  std::ostringstream os;
  os << "experiment: " << report.kind << "\n";
  for (const auto& v : report.verdicts) {
    os << (v.pass ? "[PASS] " : "[FAIL] ") << v.name
       << ": observed=" << fmt17(v.observed) << " bound=" << fmt17(v.bound);
    if (!v.note.empty()) os << "  (" << v.note << ")";
    os << "\n";
  }
  if (report.rate) {
    os << "fitted slope: " << fmt17(report.rate->slope) << " +- "
       << fmt17(report.rate->slope_stderr) << "\n";
  }
  for (const auto& ref : report.references) os << ref << "\n";
  os << (report.all_pass() ? "ALL PASS" : "FAILURES PRESENT") << "\n";
  return os.str();
}

void write_report(const ExperimentReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  {
    std::ofstream f(fs::path(out_dir) / "rows.csv", std::ios::binary);
    f << rows_csv(report);
  }
  {
    nlohmann::json j;
    j["experiment"] = report.kind;
    j["config"] = report.config_text;
    j["config_hash"] = report.config_hash;
    j["report_hash"] = report.report_hash;
    j["sigma0"] = report.sigma0;
    j["failed_replications"] = report.failed_replications;
    j["total_replications"] = report.total_replications;
    j["wall_seconds"] = report.wall_seconds;
    j["cells"] = nlohmann::json::array();
    for (const auto& c : report.cells) {
      j["cells"].push_back({{"T", c.horizon},
                            {"x", c.x},
                            {"estimator", c.estimator},
                            {"n_reps", c.n_reps},
                            {"n_degenerate", c.n_degenerate},
                            {"n_failed", c.n_failed},
                            {"mean", c.mean},
                            {"stderr", c.stderr_},
                            {"rmse", c.rmse}});
    }
    j["verdicts"] = nlohmann::json::array();
    for (const auto& v : report.verdicts) {
      j["verdicts"].push_back({{"name", v.name},
                               {"pass", v.pass},
                               {"observed", v.observed},
                               {"bound", v.bound},
                               {"note", v.note}});
    }
    if (report.rate) {
      j["rate"] = {{"slope", report.rate->slope},
                   {"slope_stderr", report.rate->slope_stderr}};
    }
    j["references"] = report.references;
    std::ofstream f(fs::path(out_dir) / "summary.json", std::ios::binary);
    f << j.dump(2) << "\n";
  }
  {
    std::ofstream f(fs::path(out_dir) / "verdicts.txt", std::ios::binary);
    f << verdict_table(report);
  }
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  auto split_list = [](const std::string& s) {
    std::vector<double> out;
    std::istringstream ls(s);
    std::string item;
    while (std::getline(ls, item, ',')) {
      if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
  };
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) continue;
    if (key == "kind") {
      cfg.kind = kind_by_name(value);
    } else if (key == "model") {
      cfg.model.model = value;
    } else if (key == "lambda") {
      cfg.model.lambda = std::stod(value);
    } else if (key == "a") {
      cfg.model.a = std::stod(value);
    } else if (key == "sigma") {
      cfg.model.sigma = std::stod(value);
    } else if (key == "hurst") {
      cfg.model.hurst = std::stod(value);
    } else if (key == "delta") {
      cfg.delta = std::stod(value);
    } else if (key == "horizons") {
      cfg.horizons = split_list(value);
    } else if (key == "bandwidth") {
      if (value == "paper") {
        cfg.schedule.h_rule = estimators::BandwidthSchedule::HRule::paper_power;
      } else if (value.rfind("fixed:", 0) == 0) {
        cfg.schedule.h_rule = estimators::BandwidthSchedule::HRule::fixed;
        cfg.schedule.h_fixed = std::stod(value.substr(6));
      } else {
        throw std::invalid_argument("config: bandwidth must be paper or fixed:<h>");
      }
    } else if (key == "epsilon") {
      if (value == "squared") {
        cfg.schedule.eps_rule =
            estimators::BandwidthSchedule::EpsRule::squared_bandwidth;
      } else if (value.rfind("fixed:", 0) == 0) {
        cfg.schedule.eps_rule = estimators::BandwidthSchedule::EpsRule::fixed;
        cfg.schedule.eps_fixed = std::stod(value.substr(6));
      } else {
        throw std::invalid_argument(
            "config: epsilon must be squared or fixed:<eps>");
      }
    } else if (key == "kernel") {
      cfg.kernel = value;
    } else if (key == "x") {
      if (value != "auto") cfg.x_grid = split_list(value);
    } else if (key == "replications") {
      cfg.replications = static_cast<std::size_t>(std::stoull(value));
    } else if (key == "base_seed") {
      cfg.base_seed = std::stoull(value);
    } else if (key == "threads") {
      cfg.threads = std::stoi(value);
    } else if (key == "out") {
      cfg.out_dir = value;
    } else if (key == "fixed_h") {
      cfg.fixed_h = std::stod(value);
    } else if (key == "burn_in") {
      cfg.burn_in = std::stod(value);
    } else if (key == "mehler_q") {
      cfg.mehler_q.clear();
      for (double q : split_list(value)) cfg.mehler_q.push_back(static_cast<int>(q));
    } else if (key == "mehler_rho") {
      cfg.mehler_rho = split_list(value);
    } else if (key == "mehler_samples") {
      cfg.mehler_samples = static_cast<std::size_t>(std::stoull(value));
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace fracdrift::harness
