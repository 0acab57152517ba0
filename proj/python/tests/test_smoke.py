import json
import math

import numpy as np
import pytest

import tsou


def test_pt_model_properties():
    m = tsou.pt_model(0.55, 1.0, 1.0, 1.0)
    assert m.alpha == pytest.approx(0.55)
    assert m.dimension == 1
    assert tsou.poisson_mean(m, 0.1) == pytest.approx(2 * math.expm1(0.055) * math.exp(-0.055), rel=1e-12)
    assert tsou.pt_v1(0.55, 1.0, 1.0, 0.1) == pytest.approx(12.8837, abs=1e-3)


def test_presets_and_errors():
    assert tsou.model("pt-multi").dimension == 2
    assert tsou.model("tweedie", zeta=2.0).dimension == 1
    with pytest.raises(ValueError):
        tsou.model("pt", alpha=1.5)
    with pytest.raises(ValueError):
        tsou.model("pt", alhpa=0.5)


def test_cf_at_zero_and_bounded():
    m = tsou.pt_model(0.55)
    assert tsou.transition_cf(m, [0.0], [0.0], 0.1) == pytest.approx(1.0)
    for z in (0.1, 1.0, 5.0):
        assert abs(tsou.transition_cf(m, [0.3], [z], 0.1)) <= 1 + 1e-12


def test_sampler_is_reproducible_and_matches_cf():
    m = tsou.pt_model(0.55)
    s = tsou.Sampler(m, 0.1)
    a = s.sample([0.0], n=4000, seed=3)
    b = s.sample([0.0], n=4000, seed=3, threads=2)
    assert a.shape == (4000, 1)
    np.testing.assert_array_equal(a, b)
    for z in (0.5, 2.0, 6.0):
        ecf = np.mean(np.exp(1j * z * a[:, 0]))
        assert abs(ecf - tsou.transition_cf(m, [0.0], [z], 0.1)) < 4 / math.sqrt(len(a))


def test_simulate_paths_shape():
    m = tsou.model("pt-multi")
    p = tsou.simulate_paths(m, 0.1, n_steps=10, n_paths=3, seed=5)
    assert p.shape == (3, 11, 2)
    assert np.all(p[:, 0, :] == 0)
    q = tsou.simulate_paths(m, 0.1, n_steps=10, n_paths=3, seed=5, threads=3)
    np.testing.assert_array_equal(p, q)


def test_densities():
    x = np.linspace(-4, 4, 81)
    d = tsou.pt_density(0.55, 1.0, 1.0, x)
    np.testing.assert_allclose(d, d[::-1], atol=1e-9)
    assert np.all(d >= -1e-12)
    u = np.logspace(-3, 1, 20)
    f = tsou.f_xi_pdf(tsou.pt_model(0.55), 0.1, [1.0], u)
    assert f.shape == u.shape and np.all(f > 0)
    g = tsou.mll_pdf(0.55, 1.0, 1.0, u)
    assert np.all(g > 0)
    draws = tsou.mll_sample(0.55, 1.0, 1.0, 1000, seed=2)
    assert draws.shape == (1000,) and np.all(draws > 0)


def test_run_writes_outputs(tmp_path):
    cfg = {"out_dir": str(tmp_path), "n_steps": 5, "n_paths": 2}
    rc, log = tsou.run("simulate-paths", json.dumps(cfg))
    assert rc == 0, log
    meta = json.loads((tmp_path / "simulate-paths.json").read_text())
    assert meta["command"] == "simulate-paths"
    rc, _ = tsou.run("bogus", json.dumps(cfg))
    assert rc == 2
