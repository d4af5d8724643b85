import math

import numpy as np
import pytest

import expreg


def test_choose_T():
    assert expreg.choose_T(15.0, 10.0, 1.0, 1.0) == pytest.approx(5.0 / (2.0 * math.pi))
    with pytest.raises(RuntimeError, match="InvalidGeometry"):
        expreg.choose_T(1.0, 1.0, 1.0, 1.0)


def test_solve_regularized_fills_T():
    u, info = expreg.solve(
        {
            "grid": {"dim": 2, "side": 3, "nodes_per_unit": 8},
            "coefficient": "radial_bump",
            "solution": "sine2d_bump",
            "source": "from_solution",
            "method": {"type": "regularized"},
        }
    )
    assert u.shape == (25, 25)
    assert info["T"] == pytest.approx(expreg.choose_T(3.0, 2.0, 1.0, math.e))
    assert np.all(u[0, :] == 0.0) and np.all(u[:, -1] == 0.0)


def test_exact_dirichlet_matches_samples():
    u, _ = expreg.solve(
        {
            "grid": {"dim": 1, "side": 2, "nodes_per_unit": 20},
            "solution": {"type": "cosine", "freq": 2.0},
            "source": "from_solution",
            "method": "exact_dirichlet",
            "solver": {"rel_tol": 1e-12},
        }
    )
    x = np.linspace(-1.0, 1.0, u.size)
    assert np.max(np.abs(u - np.cos(2.0 * x))) < 1e-9


def test_band_filter_and_moments():
    side = 4.0
    x = np.linspace(-side / 2, side / 2, 41)
    g = x * np.exp(-4.0 * x**2) + np.cos(2 * np.pi * x / side)
    f = expreg.band_filter(g, side, 2 * np.pi * 1.0 / side)
    assert np.allclose(expreg.band_filter(f, side, 2 * np.pi * 1.0 / side), f, atol=1e-13)
    xx, yy = np.meshgrid(x, x, indexing="ij")
    g2 = np.exp(-((xx - 0.3) ** 2 + yy**2))
    out = expreg.remove_moments(g2, side, 1)
    for gamma, value in expreg.moments(out, side, 1):
        assert len(gamma) == 2
        assert abs(value) < 1e-10


def test_expm_apply_decays():
    x = np.linspace(-1.0, 1.0, 21)
    g = np.sin(np.pi * (x + 1.0) / 2.0)
    g[[0, -1]] = 0.0
    y = expreg.expm_apply(g, 2.0, 0.1, "constant", 1e-12)
    h = 0.1
    lam = 4.0 / h**2 * math.sin(math.pi * h / 4.0) ** 2
    assert np.allclose(y, np.exp(-0.1 * lam) * g, atol=1e-10)


def test_elliptic_green_positive():
    G = expreg.elliptic_green(2, 2.0, 10, [0.0, 0.0], "radial_bump")
    assert G.shape == (21, 21)
    assert G.min() >= -1e-10
    assert np.unravel_index(np.argmax(G), G.shape) == (10, 10)


def test_fit_decay():
    xs = [1.0, 2.0, 3.0, 4.0, 5.0]
    slope, _, r2 = expreg.fit_decay(xs, [x**-2 for x in xs], "powerlaw")
    assert slope == pytest.approx(-2.0) and r2 == pytest.approx(1.0)
    with pytest.raises(ValueError):
        expreg.fit_decay(xs, xs, "linear")


def test_run_experiment_small():
    report = expreg.run_experiment(
        {
            "id": "E-total",
            "dim": 2,
            "R_values": [2, 3, 4, 5],
            "nodes_per_unit": 6,
            "methods": ["naive", "regularized"],
            "coefficient": "radial_bump",
            "solution": "sine2d_bump",
            "source": "from_solution",
        }
    )
    assert len(report["rows"]) == 8
    assert {f["method"] for f in report["fits"]} == {"naive", "regularized"}
    assert report["headline"]["R"] == 5


def test_verify():
    ok, checks = expreg.verify()
    assert ok
    assert len(checks) >= 6
