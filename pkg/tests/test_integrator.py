import json
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ksband.config import RunConfig
from ksband.errors import BlowUpError
from ksband.field import Grid, SpectralField, imaginary_residue, read_checkpoint
from ksband.integrator import (EtdCoefficients, NonlinearWorkspace, TrajectoryState, integrate, phi_functions,
                               random_initial_field, step)
from ksband.symbols import SymbolSpec, symbol_table

from conftest import ks_config

mpmath.mp.dps = 40


def phi_oracle(z):
    z = mpmath.mpc(z)
    if abs(z) < 1e-3:
        return tuple(mpmath.fsum(z**j / mpmath.factorial(j + k) for j in range(30)) for k in (1, 2, 3))
    e = mpmath.exp(z)
    return ((e - 1) / z, (e - 1 - z) / z**2, (e - 1 - z - z**2 / 2) / z**3)


def test_phi_at_zero():
    p1, p2, p3 = phi_functions(np.array([0.0]))
    assert (p1[0], p2[0], p3[0]) == pytest.approx((1, 0.5, 1 / 6), rel=1e-15)


def test_phi_at_one():
    p = phi_functions(np.array([1.0]))
    for got, want in zip(p, phi_oracle(1)):
        assert complex(got[0]) == pytest.approx(complex(want), rel=1e-14)
    assert p[0][0].real == pytest.approx(math.e - 1, rel=1e-15)


def test_phi_small_argument_taylor():
    z = 1e-8
    taylor = [sum(z**j / math.factorial(j + k) for j in range(4)) for k in (1, 2, 3)]
    got = phi_functions(np.array([z]))
    for g, t in zip(got, taylor):
        assert abs(g[0] - t) < 1e-13


@given(re=st.floats(-60, 5), im=st.floats(-30, 30))
def test_phi_against_oracle(re, im):
    z = complex(re, im)
    got = phi_functions(np.array([z]))
    for g, w in zip(got, phi_oracle(z)):
        w = complex(w)
        assert abs(g[0] - w) <= 1e-12 * max(1.0, abs(w))


def test_linear_only_exact_exponential():
    g = Grid(1, 32)
    c = np.zeros(32, complex)
    c[2] = c[-2] = 0.5
    u0 = SpectralField(g, c)
    h = 0.01
    lam = symbol_table(SymbolSpec("KuramotoSivashinsky1D"), g)
    coeffs = EtdCoefficients.build(lam, h)
    s = step(TrajectoryState(0.0, u0), h, coeffs, NonlinearWorkspace(g), linear_only=True)
    assert s.u[2] == pytest.approx(0.5 * math.exp(-12 * h), rel=1e-14)
    assert s.t == h and s.step_count == 1


def test_step_size_must_match():
    g = Grid(1, 16)
    coeffs = EtdCoefficients.build(np.zeros(16), 0.1)
    with pytest.raises(ValueError):
        step(TrajectoryState(0.0, SpectralField.zeros(g)), 0.05, coeffs, NonlinearWorkspace(g))


def test_random_initial_field():
    g = Grid(2, 16)
    u = random_initial_field(g, 2.0, 7, mean=0.3)
    assert u.hermitian_residual() == 0
    assert u[(0, 0)] == 0.3
    assert abs(u[(1, 2)]) == pytest.approx(2.0 / (1 + 9))
    assert np.array_equal(u.coeffs, random_initial_field(g, 2.0, 7, mean=0.3).coeffs)


def test_zero_time_returns_initial(tmp_path):
    cfg = RunConfig().replace(integrator={"T": 0.0})
    series, state, files = integrate(cfg, tmp_path)
    assert len(series) == 0 and state.t == 0 and state.step_count == 0
    assert np.array_equal(state.u.coeffs, random_initial_field(cfg.make_grid(), 1.0, 0).coeffs)
    assert sorted(p.name for p in files) == ["checkpoint_000000000.bin", "checkpoint_000000000.json"]


def test_gamma_two_norm_nonincreasing():
    cfg = RunConfig().replace(grid={"n": 64},
                              symbol={"family": "GeneralizedGamma", "params": {"gamma": 2.0, "mu_tilde": 0.0}},
                              integrator={"h": 0.005, "T": 5.0, "record_every": 1, "amplitude": 3.0})
    series, _, _ = integrate(cfg)
    l2 = series.array("norm_l2")
    assert np.all(np.diff(l2) <= 1e-12 * l2[0])


def test_ks_small_period_decays():
    cfg = RunConfig().replace(grid={"n": 64}, integrator={"h": 0.01, "T": 50.0, "amplitude": 0.1})
    series, _, _ = integrate(cfg)
    l2 = series.array("norm_l2")
    assert l2[-1] < l2[0]


@pytest.mark.slow
def test_ks_chaotic_regime_bounded():
    cfg = RunConfig().replace(grid={"n": 512, "L": 32 * math.pi},
                              integrator={"h": 0.05, "T": 500.0, "record_every": 20})
    series, _, _ = integrate(cfg)
    l2 = series.array("norm_l2")
    assert np.all(np.isfinite(l2))
    sup = series.window_sup("norm_l2")
    assert 1.0 < sup < 1e3


def test_convergence_order_on_attractor_data(ks_attractor):
    cfg, u0 = ks_attractor
    finals = {}
    for h in (0.01, 0.005, 0.0025):
        c = cfg.replace(integrator={"h": h, "T": 1.0, "record_every": 1000})
        finals[h] = integrate(c, initial=u0)[1].u.coeffs
    e1 = np.max(np.abs(finals[0.01] - finals[0.005]))
    e2 = np.max(np.abs(finals[0.005] - finals[0.0025]))
    assert math.log2(e1 / e2) >= 3.8


def test_determinism():
    cfg = RunConfig().replace(grid={"n": 64, "L": 16 * math.pi}, integrator={"h": 0.05, "T": 20.0, "seed": 3})
    a, _, _ = integrate(cfg)
    b, _, _ = integrate(cfg)
    assert a.columns == b.columns


def test_reality_and_mean(tmp_path):
    cfg = ks_config(T=20.0, mean=0.25, record_every=10)
    series, state, _ = integrate(cfg)
    assert np.max(np.abs(series.array("mean_re") - 0.25)) < 1e-12
    assert np.max(np.abs(series.array("mean_im"))) < 1e-12
    assert np.max(series.array("asymmetry")) < 1e-12
    assert state.u.hermitian_residual() == 0
    assert imaginary_residue(state.u) < 1e-12


def test_checkpoints_and_manifest_records(tmp_path):
    cfg = RunConfig().replace(grid={"n": 32}, integrator={"h": 0.01, "T": 0.1, "record_every": 5},
                              output={"checkpoint_every": 4})
    series, state, files = integrate(cfg, tmp_path)
    names = sorted(p.name for p in files if p.suffix == ".bin")
    assert names == ["checkpoint_000000000.bin", "checkpoint_000000004.bin", "checkpoint_000000008.bin",
                     "checkpoint_000000010.bin"]
    meta = json.loads((tmp_path / "checkpoint_000000010.json").read_text())
    assert meta["step_count"] == 10 and meta["t"] == pytest.approx(0.1)
    assert np.array_equal(read_checkpoint(tmp_path / "checkpoint_000000010.bin").coeffs, state.u.coeffs)
    assert series.array("t").tolist() == pytest.approx([0.0, 0.05, 0.1])


def test_blow_up_detected():
    cfg = RunConfig().replace(grid={"n": 256},
                              symbol={"family": "GeneralizedGamma", "params": {"gamma": 0.5, "mu_tilde": 2.0}},
                              integrator={"h": 0.01, "T": 50.0})
    with pytest.raises(BlowUpError) as info:
        integrate(cfg)
    exc = info.value
    assert exc.partial is not None and exc.partial.outcome == "blow_up"
    assert exc.t > 0 and exc.amplitude > 1e10


def test_window_snapshots():
    cfg = RunConfig().replace(grid={"n": 32}, integrator={"h": 0.01, "T": 1.0, "record_every": 10})
    series, _, _ = integrate(cfg)
    assert series.window_start == pytest.approx(0.5)
    assert len(series.snapshots) == 6  # t = 0.5, 0.6, ..., 1.0
