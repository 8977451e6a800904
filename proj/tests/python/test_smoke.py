"""Smoke tests for the python module; run with PYTHONPATH at build/python."""

import math

import numpy as np

import fracdrift as fd


def test_covariance():
    assert abs(fd.fbm_covariance(0.75, 1.0, 2.0) - math.sqrt(2.0)) < 1e-12
    assert abs(fd.fbm_covariance(0.7, 1.0, 1.0) - 1.0) < 1e-12


def test_sampler_determinism_and_shape():
    a = fd.sample_fbm(hurst=0.7, horizon=1.0, steps=256, seed=42)
    b = fd.sample_fbm(hurst=0.7, horizon=1.0, steps=256, seed=42)
    c = fd.sample_fbm(hurst=0.7, horizon=1.0, steps=256, seed=43)
    assert a.shape == (257,)
    assert a[0] == 0.0
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_cholesky_method():
    a = fd.sample_fbm(hurst=0.7, horizon=1.0, steps=64, seed=1, method="cholesky")
    assert a.shape == (65,)
    assert np.isfinite(a).all()


def test_euler_and_coupling():
    x = fd.solve_euler("linear", 1.0, 0.0, 1.0, 0.5, 0.7, 10.0, 1000, seed=7)
    assert x.shape == (1001,)
    assert x[0] == 0.5
    base, shifted, logrel = fd.solve_coupled(
        "tanh", 1.0, 1.0, 1.0, 0.0, 0.7, 5.0, 500, 0.01, seed=7
    )
    assert (shifted >= base).all()
    assert logrel[0] == 0.0
    # contraction with the documented discretization slack
    t = np.linspace(0.0, 5.0, 501)
    assert (0.01 * np.exp(logrel) <= 0.01 * np.exp(-t) * 1.3).all()


def test_estimators_recover_linear_drift():
    horizon, steps = 200.0, 4000
    h, eps = fd.schedule_eval(horizon, 0.7)
    assert abs(h - horizon ** (-0.1)) < 1e-12
    vals = []
    for rep in range(10):
        path = fd.stationary_ou_path(1.0, 1.0, 0.7, horizon, steps, seed=11, stream=rep)
        est, corr, f_hat, degen = fd.drift_estimate_eps(
            horizon, path, "linear", 1.0, 0.0, 1.0, 0.7, 0.5, h, eps
        )
        assert not degen
        assert f_hat > 0
        vals.append(est)
    assert abs(np.mean(vals) - (-0.5)) < 0.25

    path = fd.stationary_ou_path(1.0, 1.0, 0.7, horizon, steps, seed=11, stream=0)
    est, corr, f_hat, bias, sterm, degen = fd.drift_estimate_skorokhod(
        horizon, path, "linear", 1.0, 0.0, 1.0, 0.7, 0.5, h
    )
    # decomposition identity holds at the discrete level
    assert abs((est - (-0.5)) - (bias + sterm) / f_hat) < 1e-10


def test_observed_pair_estimator():
    base, shifted, _ = fd.solve_coupled(
        "linear", 1.0, 0.0, 1.0, 0.2, 0.7, 20.0, 2000, 0.01, seed=13
    )
    est_obs, corr_obs, f_hat, degen = fd.drift_estimate_eps_observed(
        20.0, base, shifted, 1.0, 0.7, 0.3, 0.5
    )
    est_mod, corr_mod, _, _ = fd.drift_estimate_eps(
        20.0, base, "linear", 1.0, 0.0, 1.0, 0.7, 0.3, 0.5, 0.01
    )
    assert not degen
    assert abs(est_obs - est_mod) < 1e-6 * max(1.0, abs(est_mod))


def test_pathwise_routes_agree_roughly():
    path = fd.sample_fbm(0.9, 2.0, 400, seed=3) * 0.5 + 0.3
    riemann, closed, f_hat, degen = fd.pathwise_estimate(2.0, path, 0.25, 1.6)
    assert not degen
    assert abs(riemann - closed) < 0.05 * max(1.0, abs(closed))


def test_hermite_and_mehler():
    assert fd.hermite_poly(2, 0.0) == -1.0
    assert fd.hermite_poly(3, 2.0) == 2.0
    emp, pred, se = fd.mehler_check(3, 0.8, samples=200000, seed=5)
    assert abs(pred - 3.072) < 1e-12
    assert abs(emp - pred) < 5 * se


def test_experiment_driver():
    out = fd.run_experiment(
        "kind = mehler\nmehler_q = 1,2\nmehler_rho = 0.5\n"
        "mehler_samples = 20000\nbase_seed = 9\n"
    )
    assert out["all_pass"]
    assert out["rows_csv"].startswith("T,x,rep,estimator,value,flag")


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for t in tests:
        t()
        print(f"ok {t.__name__}")
    print(f"{len(tests)} python smoke tests passed")


if __name__ == "__main__":
    main()
