import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ksband.errors import ConfigError
from ksband.field import Grid
from ksband.symbols import (FAMILIES, SymbolSpec, certify_dissipation, coward_hall_symbol, eval_symbol,
                            fit_dissipation_order, near_singular_modes, shell_min_real, symbol_real_part,
                            symbol_table, symbol_values, write_symbol_csv)

KS = SymbolSpec("KuramotoSivashinsky1D")
PINTO = SymbolSpec("Pinto2D")


def _series_i(n, x, terms=30):
    h = mpmath.mpf(x) / 2
    n = abs(n)
    return mpmath.fsum(h ** (n + 2 * m) / (mpmath.factorial(m) * mpmath.factorial(n + m)) for m in range(terms))


def coward_hall_oracle(xi, eta):
    with mpmath.workdps(40):
        xi = mpmath.mpf(xi)
        im, i0, ip = (_series_i(o, xi) for o in (eta - 1, eta, eta + 1))
        den = 2 * xi * ip**2 * im - xi * i0**2 * im - xi * i0**2 * ip + 2 * (2 + eta) * i0 * ip * im
        num = (2j * eta**2 * i0 * (xi * i0**2 - 2 * eta * ip * i0 - xi * i0 * ip)
               + 1j * xi**2 * ip * (xi * i0 * im - 2 * (eta - 2) * im * ip - xi * i0 * ip))
        return complex(num / den + 1j * xi * eta)


def test_ks_examples():
    assert eval_symbol(KS, 1) == 0
    assert eval_symbol(KS, 2) == 12
    assert eval_symbol(KS.with_q(0.5), 4) == pytest.approx(-4 + 16)


def test_pinto_example():
    assert eval_symbol(PINTO, (1, 1)) == 3


def test_generalized_gamma_and_zero():
    g = SymbolSpec("GeneralizedGamma", {"gamma": 1.5, "mu_tilde": 4})
    assert eval_symbol(g, 4) == pytest.approx(8 - 4)
    assert eval_symbol(g, (3, -1)) == pytest.approx(8 - 4)
    assert eval_symbol(SymbolSpec("Zero"), (3, 2)) == 0


def test_topper_kawahara_dispersion():
    tk = SymbolSpec("TopperKawahara2D", {"alpha1": 1, "alpha2": 0.5, "alpha3": 2, "alpha4": 3})
    lam = eval_symbol(tk, (2, 1))
    lap = 5.0
    assert lam == pytest.approx(-4 - 0.5 * lap + 2 * lap**2 - 3j * 2 * lap)


def test_parameter_validation():
    with pytest.raises(ConfigError, match="alpha3 > 0"):
        SymbolSpec("TopperKawahara2D", {"alpha3": 0})
    with pytest.raises(ConfigError):
        SymbolSpec("GeneralizedGamma", {"gamma": -1})
    with pytest.raises(ConfigError):
        SymbolSpec("KuramotoSivashinsky1D", {"beta": 1})
    with pytest.raises(ConfigError):
        SymbolSpec("Nope")
    with pytest.raises(ConfigError):
        eval_symbol(KS, (1, 1))


def test_coward_hall_origin():
    assert coward_hall_symbol(0.0, 0) == 0


def test_coward_hall_regression_pin():
    assert coward_hall_symbol(1.0, 1) == pytest.approx(coward_hall_oracle(1.0, 1), rel=1e-12)
    assert coward_hall_symbol(1.0, 1) == pytest.approx(2.289225888342482j, rel=1e-12)


@pytest.mark.parametrize("xi", [0.5, 1.0, 2.0, 5.0])
@pytest.mark.parametrize("eta", [0, 1, 2, 3])
def test_coward_hall_half_plane_matches_oracle(xi, eta):
    assert coward_hall_symbol(xi, eta) == pytest.approx(coward_hall_oracle(xi, eta), rel=1e-11)


@pytest.mark.parametrize("xi", [0.5, 1.0, 2.0, 5.0])
@pytest.mark.parametrize("eta", range(-3, 4))
def test_coward_hall_purely_dispersive(xi, eta):
    for s in (xi, -xi):
        v = coward_hall_symbol(s, eta)
        assert abs(v.real) <= 1e-12 * abs(v)


def test_coward_hall_small_xi_limit():
    # continuous through xi = 0 on the half-plane
    for eta in (1, 2, 5):
        assert coward_hall_symbol(0.0, eta) == pytest.approx(coward_hall_symbol(1e-3, eta), abs=1e-2)


FAMILY_SPECS = [
    SymbolSpec("KuramotoSivashinsky1D"),
    SymbolSpec("Pinto2D"),
    SymbolSpec("TopperKawahara2D", {"alpha1": 1.0, "alpha2": 0.3, "alpha3": 1.5, "alpha4": 2.0}),
    SymbolSpec("CowardHall2D", {"alpha": 1.0, "delta": 0.7}),
    SymbolSpec("GeneralizedGamma", {"gamma": 2.5, "mu_tilde": 1.0}),
    SymbolSpec("Zero"),
]


@pytest.mark.parametrize("spec", FAMILY_SPECS, ids=lambda s: s.family)
def test_conjugate_symmetry(spec):
    K = 64 if spec.family != "CowardHall2D" else 12
    d = spec.dims[-1]
    r = np.arange(-K, K + 1)
    ks = np.meshgrid(r, r, indexing="ij") if d == 2 else (r,)
    l1 = sum(np.abs(k) for k in ks)
    ks = tuple(k[l1 <= K] for k in ks)
    lam = symbol_values(spec, ks)
    lam_neg = symbol_values(spec, tuple(-k for k in ks))
    assert np.max(np.abs(lam_neg - np.conj(lam))) <= 1e-12 * max(1.0, np.max(np.abs(lam)))


@pytest.mark.parametrize("spec", FAMILY_SPECS[:-1], ids=lambda s: s.family)
def test_fitted_certificate_verifies(spec):
    K = 64 if spec.family != "CowardHall2D" else 24
    gamma, c1, mu = fit_dissipation_order(spec, K)
    assert certify_dissipation(spec, c1, gamma, mu, K).verified


@given(gamma=st.floats(0.2, 6.0), mu=st.floats(0.0, 10.0))
def test_generalized_gamma_exact_bound(gamma, mu):
    spec = SymbolSpec("GeneralizedGamma", {"gamma": gamma, "mu_tilde": mu})
    cert = certify_dissipation(spec, 1.0, gamma, mu, 64)
    assert cert.verified
    assert abs(cert.worst_margin) <= 1e-9 * 64**gamma


def test_certificate_examples():
    assert certify_dissipation(KS, 0.5, 4, 1, 64).verified
    zero = certify_dissipation(SymbolSpec("Zero"), 1, 2, 0, 8, d=1)
    assert not zero.verified
    assert abs(zero.worst_k[0]) == 8
    gg = SymbolSpec("GeneralizedGamma", {"gamma": 1.5, "mu_tilde": 4})
    cert = certify_dissipation(gg, 1, 1.5, 4, 128)
    assert cert.verified and cert.worst_margin == pytest.approx(0.0, abs=1e-9)


def test_fit_dissipation_order_examples():
    assert fit_dissipation_order(KS, 128)[0] == pytest.approx(4, abs=0.05)
    gg = SymbolSpec("GeneralizedGamma", {"gamma": 2.5, "mu_tilde": 1})
    assert fit_dissipation_order(gg, 128)[0] == pytest.approx(2.5, abs=0.02)
    assert fit_dissipation_order(PINTO, 64)[0] == pytest.approx(4, abs=0.1)


def test_coward_hall_real_part_is_biharmonic():
    disp = SymbolSpec("CowardHall2D", {"alpha": 1.3, "delta": 2.0})
    base = SymbolSpec("CowardHall2D", {"alpha": 1.3, "delta": 0.0})
    r = np.arange(-6, 7)
    ks = np.meshgrid(r, r, indexing="ij")
    full = symbol_values(disp, ks)
    bih = symbol_values(base, ks)
    assert np.max(np.abs(full.real - bih.real)) <= 1e-10 * max(1.0, np.max(np.abs(full)))
    assert np.array_equal(symbol_real_part(disp, ks), bih.real)


def test_symbol_table_uses_grid_q():
    g = Grid(1, 32, 4 * math.pi)
    lam = symbol_table(KS, g)
    assert lam[g.index_of(2)] == pytest.approx(0.0)  # qk = 1 is marginal


def test_shell_min_real_2d():
    m = shell_min_real(PINTO, 8)
    # Pinto2D along the l1 shell is smallest where the dissipation is weakest
    assert m[1] == pytest.approx(0.0)
    assert np.all(np.diff(m[2:]) > 0)


def test_symbol_csv(tmp_path):
    p = tmp_path / "s.csv"
    write_symbol_csv(p, PINTO, Grid(2, 8))
    lines = p.read_text().splitlines()
    assert lines[0].split(",")[:2] == ["k", "l"]
    assert len(lines) > 1


def test_near_singular_only_for_coward_hall():
    assert near_singular_modes(PINTO, Grid(2, 8)) == []
    assert isinstance(near_singular_modes(FAMILY_SPECS[3], Grid(2, 8)), list)


def test_families_table():
    assert set(FAMILIES) >= {"KuramotoSivashinsky1D", "Pinto2D", "TopperKawahara2D", "CowardHall2D",
                             "GeneralizedGamma"}
