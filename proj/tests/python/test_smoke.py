import math
import os
from pathlib import Path

import numpy as np
import pytest

import rmirt

CONFIG_DIR = Path(__file__).resolve().parents[2] / "configs"


def small_geom(n_subscans=2):
    return rmirt.ProjGeom.uniform(24, math.pi, 24, 1.0, n_subscans)


def test_projector_adjoint():
    rng = np.random.default_rng(0)
    geom = small_geom(1)
    x = rng.uniform(size=(16, 16))
    y = rng.uniform(size=(geom.n_angles, geom.n_detectors))
    lhs = np.vdot(rmirt.project(x, geom), y)
    rhs = np.vdot(x, rmirt.backproject(y, geom, 16, 16))
    assert abs(lhs - rhs) <= 1e-12 * abs(lhs)


def test_column_sums_at_angle_zero():
    geom = rmirt.ProjGeom.uniform(1, math.pi, 12, 1.0, 1)
    x = np.zeros((8, 8))
    x[:, 3] = np.arange(8)
    s = rmirt.project(x, geom)
    assert s.shape == (1, 12)
    assert s[0, 5] == pytest.approx(28.0)


def test_warp_identity_and_adjoint():
    rng = np.random.default_rng(1)
    x = rng.uniform(size=(12, 10))
    np.testing.assert_array_equal(rmirt.warp(x, np.array([1.0, 1.0])), x)
    p = np.array([1.1, 0.9])
    y = rng.uniform(size=x.shape)
    lhs = np.vdot(rmirt.warp(x, p, center=(5.0, 4.5)), y)
    rhs = np.vdot(x, rmirt.warp(y, p, center=(5.0, 4.5), adjoint=True))
    assert abs(lhs - rhs) <= 1e-12 * abs(lhs)


def test_gradient_matches_finite_difference():
    rng = np.random.default_rng(2)
    geom = small_geom(2)
    x = rng.uniform(0.2, 0.8, size=(10, 10))
    alpha = rng.uniform(0.2, 0.8, size=(2, 10, 10))
    p = np.array([[1.05, 0.95], [0.9, 1.1]])
    b = rng.uniform(size=(geom.n_angles, geom.n_detectors))
    args = dict(geom=geom, center=(6.0, 4.5))
    g = rmirt.gradients(x, alpha, p, b, **args)
    d = rng.normal(size=x.shape)
    h = 1e-5
    fd = (rmirt.objective(x + h * d, alpha, p, b, **args)
          - rmirt.objective(x - h * d, alpha, p, b, **args)) / (2 * h)
    assert fd == pytest.approx(np.vdot(g["x"], d), rel=1e-6)
    assert g["alpha"].shape == alpha.shape
    assert g["p"].shape == p.shape


def test_identity_motion_is_static_projection():
    geom = small_geom(2)
    x, region = rmirt.make_phantom(16, 16, 4)
    alpha = np.stack([region, region])
    b = rmirt.forward(x, alpha, np.ones((2, 2)), geom)
    np.testing.assert_allclose(b, rmirt.project(x, geom), rtol=0, atol=1e-12)


def test_metrics():
    a = np.array([[0.1, 0.2], [0.3, 0.4]])
    assert rmirt.mse(a + 0.25, a) == pytest.approx(0.0625)
    m = np.array([[[1.0, 1.0], [0.0, 0.0]]])
    assert rmirt.dice(m, m) == [1.0]


def test_shape_errors_raise_value_error():
    with pytest.raises(ValueError):
        rmirt.project(np.zeros(5), small_geom())
    with pytest.raises(ValueError):
        rmirt.warp(np.zeros((4, 4)), np.array([0.0, 1.0]))


def test_selfcheck_passes():
    checks = rmirt.selfcheck()
    assert checks
    assert all(passed for _, passed, _, _ in checks)


def test_run_experiment_small(tmp_path):
    text = (CONFIG_DIR / "default.cfg").read_text()
    cfg = tmp_path / "small.cfg"
    out = tmp_path / "out"
    replace = {
        "width": "40", "height": "40", "static_band_rows": "10",
        "n_angles": "60", "n_detectors": "60", "n_iter": "5",
        "directory": str(out),
    }
    lines = []
    for line in text.splitlines():
        key = line.split("=")[0].strip()
        if key in replace and "=" in line:
            line = f"{key} = {replace[key]}"
        lines.append(line)
    cfg.write_text("\n".join(lines) + "\n")
    res = rmirt.run_experiment(str(cfg), seed=3)
    assert set(res["variants"]) == {"none", "global", "rmirt"}
    rm = res["variants"]["rmirt"]
    assert rm["x"].shape == (40, 40)
    assert len(rm["mse"]) == 5
    again = rmirt.run_experiment(str(cfg), seed=3)
    assert again["metrics_table"] == res["metrics_table"]
    assert not out.exists()
