"""Fourier symbols lambda_k of the linear operator P in u_t + u u_x1 + P u = 0.

Sign convention: P sits on the left, so mode k grows iff Re lambda_k < 0.
Differential families substitute d/dx_j -> i q k_j; 2D Laplacian powers use
the Euclidean |q k|_2, while dissipation certificates use the l1 index norm.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .bessel import bessel_i_triple_scaled
from .errors import ConfigError, FitDomainError, SingularSymbolError
from .field import Grid

log = logging.getLogger(__name__)

# family -> (spatial dimensions allowed, parameter names with defaults)
FAMILIES = {
    "KuramotoSivashinsky1D": ((1,), {}),
    "Pinto2D": ((2,), {}),
    "TopperKawahara2D": ((2,), {"alpha1": 1.0, "alpha2": 0.0, "alpha3": 1.0, "alpha4": 0.0}),
    "CowardHall2D": ((2,), {"alpha": 1.0, "delta": 0.0}),
    "GeneralizedGamma": ((1, 2), {"gamma": 4.0, "mu_tilde": 0.0}),
    # lambda = 0; a reference instrument for certificates and pure-advection tests
    "Zero": ((1, 2), {}),
}


@dataclass(frozen=True)
class SymbolSpec:
    family: str
    params: dict = field(default_factory=dict)
    q: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown symbol family {self.family!r}; known: {sorted(FAMILIES)}")
        defaults = FAMILIES[self.family][1]
        unknown = set(self.params) - set(defaults)
        if unknown:
            raise ConfigError(f"{self.family}: unknown parameters {sorted(unknown)}")
        merged = {**defaults, **{k: float(v) for k, v in self.params.items()}}
        object.__setattr__(self, "params", merged)
        problems = []
        if not all(math.isfinite(v) for v in merged.values()):
            problems.append(f"{self.family}: parameters must be finite")
        if self.family == "TopperKawahara2D" and not merged["alpha3"] > 0:
            problems.append(f"TopperKawahara2D requires alpha3 > 0, got alpha3={merged['alpha3']}")
        if self.family == "GeneralizedGamma":
            if not merged["gamma"] > 0:
                problems.append(f"GeneralizedGamma requires gamma > 0, got {merged['gamma']}")
            if not merged["mu_tilde"] >= 0:
                problems.append(f"GeneralizedGamma requires mu_tilde >= 0, got {merged['mu_tilde']}")
        if not (math.isfinite(self.q) and self.q > 0):
            problems.append(f"symbol q must be positive, got {self.q}")
        if problems:
            raise ConfigError("; ".join(problems), problems)

    @property
    def dims(self) -> tuple[int, ...]:
        return FAMILIES[self.family][0]

    def with_q(self, q: float) -> SymbolSpec:
        return SymbolSpec(self.family, dict(self.params), q)


# -- Coward-Hall dispersive symbol ------------------------------------------


def _coward_hall_raw(xi: float, eta: int) -> complex:
    im, i0, ip = bessel_i_triple_scaled(eta, xi)
    den = 2 * xi * ip * ip * im - xi * i0 * i0 * im - xi * i0 * i0 * ip + 2 * (2 + eta) * i0 * ip * im
    if abs(den) < 1e-300:
        raise SingularSymbolError(xi, eta, den)
    num1 = 2j * eta**2 * i0 * (xi * i0 * i0 - 2 * eta * ip * i0 - xi * i0 * ip)
    num2 = 1j * xi**2 * ip * (xi * i0 * im - 2 * (eta - 2) * im * ip - xi * i0 * ip)
    return (num1 + num2) / den + 1j * xi * eta


def coward_hall_denominator(xi: float, eta: int) -> tuple[float, float]:
    """Scaled denominator of N(xi, eta) and the sum of its term magnitudes."""
    im, i0, ip = bessel_i_triple_scaled(eta, xi)
    terms = (2 * xi * ip * ip * im, -xi * i0 * i0 * im, -xi * i0 * i0 * ip, 2 * (2 + eta) * i0 * ip * im)
    return sum(terms), sum(abs(t) for t in terms)


def _coward_hall_xi0(eta: int) -> complex:
    # Every Bessel triple vanishes at xi = 0 for eta != 0; take the limit by
    # Richardson extrapolation of the linear small-xi behaviour.
    h = 1e-5
    a = _coward_hall_raw(h, eta)
    b = _coward_hall_raw(h / 2, eta)
    c = _coward_hall_raw(h / 4, eta)
    if abs(c) > 1.5 * abs(b) and abs(b) > 1.5 * abs(a):
        log.warning("Coward-Hall N(0, %d): small-xi limit diverges; using i*xi*eta = 0", eta)
        return 0j
    e1, e2 = 2 * b - a, 2 * c - b
    if abs(e1 - e2) > 1e-6 * (1 + abs(e2)):
        log.warning("Coward-Hall N(0, %d): small-xi limit not resolved; using i*xi*eta = 0", eta)
        return 0j
    return complex(0.0, (2 * e2 - e1).imag)


def coward_hall_symbol(xi: float, eta: int) -> complex:
    """Dispersive Coward-Hall multiplier N(xi, eta) (purely imaginary).

    The closed form is evaluated on the half-plane eta > 0 (or eta = 0,
    xi >= 0); the other half follows from N(-xi, -eta) = conj N(xi, eta) so
    that the operator maps real fields to real fields.
    """
    eta = int(eta)
    xi = float(xi)
    if eta < 0 or (eta == 0 and xi < 0):
        return coward_hall_symbol(-xi, -eta).conjugate()
    if xi == 0.0:
        return 0j if eta == 0 else _coward_hall_xi0(eta)
    return _coward_hall_raw(xi, eta)


# -- symbol evaluation ------------------------------------------------------


def _as_k(spec: SymbolSpec, k) -> tuple:
    k = (k,) if np.isscalar(k) else tuple(k)
    d = len(k)
    if d not in spec.dims:
        raise ConfigError(f"{spec.family} is defined for d in {spec.dims}, got a {d}-D wavenumber")
    return k


def symbol_values(spec: SymbolSpec, ks: tuple) -> np.ndarray:
    """Vectorized lambda over integer wavenumber arrays ``ks`` (one per dimension)."""
    ks = tuple(np.asarray(k) for k in ks)
    if len(ks) not in spec.dims:
        raise ConfigError(f"{spec.family} is defined for d in {spec.dims}, got d={len(ks)}")
    q = spec.q
    p = spec.params
    fam = spec.family
    shape = np.broadcast(*ks).shape
    if fam == "Zero":
        return np.zeros(shape, dtype=complex)
    if fam == "GeneralizedGamma":
        l1 = sum(np.abs(k) for k in ks).astype(float)
        return (l1 ** p["gamma"] - p["mu_tilde"]).astype(complex)
    qk = q * ks[0].astype(float)
    if fam == "KuramotoSivashinsky1D":
        return (-(qk**2) + qk**4).astype(complex)
    ql = q * ks[1].astype(float)
    lap = qk**2 + ql**2
    if fam == "Pinto2D":
        return (-(qk**2) + lap**2).astype(complex)
    if fam == "TopperKawahara2D":
        return (-p["alpha1"] * qk**2 - p["alpha2"] * lap + p["alpha3"] * lap**2
                - 1j * p["alpha4"] * qk * lap)
    if fam == "CowardHall2D":
        base = (-p["alpha"] * lap + lap**2).astype(complex)
        if p["delta"] == 0:
            return base
        disp = np.zeros(shape, dtype=complex)
        kb, lb = np.broadcast_arrays(*ks)
        for idx in np.ndindex(shape):
            disp[idx] = coward_hall_symbol(q * float(kb[idx]), int(lb[idx]))
        return base + p["delta"] * disp
    raise ConfigError(f"unknown symbol family {fam!r}")  # pragma: no cover


def symbol_real_part(spec: SymbolSpec, ks: tuple) -> np.ndarray:
    """Re lambda without evaluating the purely dispersive Bessel part."""
    if spec.family == "CowardHall2D":
        return symbol_values(SymbolSpec("CowardHall2D", {**spec.params, "delta": 0.0}, spec.q), ks).real
    return symbol_values(spec, ks).real


def eval_symbol(spec: SymbolSpec, k) -> complex:
    k = _as_k(spec, k)
    return complex(symbol_values(spec, tuple(np.array([kj]) for kj in k))[0])


def symbol_table(spec: SymbolSpec, grid: Grid) -> np.ndarray:
    """lambda_k on every retained mode of ``grid`` (FFT order)."""
    if spec.q != grid.q:
        spec = spec.with_q(grid.q)
    return symbol_values(spec, grid.k_axes)


def near_singular_modes(spec: SymbolSpec, grid: Grid, rtol: float = 1e-10) -> list[tuple]:
    """Coward-Hall modes whose denominator nearly cancels (|D| <= rtol * sum |terms|)."""
    if spec.family != "CowardHall2D":
        return []
    out = []
    q = grid.q
    for k in range(-grid.kmax, grid.kmax + 1):
        for l in range(0, grid.kmax + 1):
            if k == 0 or (l == 0 and k < 0):
                continue
            den, scale = coward_hall_denominator(q * k, l)
            if abs(den) <= rtol * scale:
                out.append((k, l, den))
    return out


def write_symbol_csv(path, spec: SymbolSpec, grid: Grid) -> None:
    lam = symbol_table(spec, grid)
    ks = grid.k_axes
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "l", "re", "im"] if grid.d == 2 else ["k", "re", "im"])
        for idx in np.ndindex(grid.shape):
            row = [int(k[idx]) for k in ks]
            w.writerow(row + [repr(float(lam[idx].real)), repr(float(lam[idx].imag))])


# -- dissipation bound Re lambda_k >= c1 |k|_1^gamma - mu ---------------------


@dataclass(frozen=True)
class DissipationCertificate:
    c1: float
    gamma: float
    mu: float
    K: int
    verified: bool
    worst_k: tuple
    worst_margin: float

    def as_dict(self) -> dict:
        return {
            "c1": self.c1, "gamma": self.gamma, "mu": self.mu, "K": self.K,
            "verified": self.verified, "worst_k": list(self.worst_k),
            "worst_margin": self.worst_margin,
        }


def _ball(K: int, d: int) -> tuple[np.ndarray, ...]:
    r = np.arange(-K, K + 1)
    if d == 1:
        ks = (r,)
    else:
        kx, ky = np.meshgrid(r, r, indexing="ij")
        keep = np.abs(kx) + np.abs(ky) <= K
        ks = (kx[keep], ky[keep])
    return ks


def _default_dim(spec: SymbolSpec, d: int | None) -> int:
    if d is None:
        return spec.dims[0]
    if d not in spec.dims:
        raise ConfigError(f"{spec.family} is defined for d in {spec.dims}, got d={d}")
    return d


def certify_dissipation(spec: SymbolSpec, c1: float, gamma: float, mu: float, K: int,
                        d: int | None = None) -> DissipationCertificate:
    """Exhaustively check Re lambda_k >= c1 |k|_1^gamma - mu for |k|_1 <= K."""
    if K < 1:
        raise ConfigError(f"certificate radius K must be >= 1, got {K}")
    d = _default_dim(spec, d)
    ks = _ball(K, d)
    l1 = sum(np.abs(k) for k in ks).astype(float)
    re = symbol_real_part(spec, ks)
    bound = c1 * l1**gamma
    margin = re - bound + mu
    # equality must certify, so allow a few ulps of the terms being compared
    slack = 8 * np.finfo(float).eps * (np.abs(re) + np.abs(bound) + abs(mu))
    i = int(np.argmin(margin))
    worst = tuple(int(k[i]) for k in ks)
    return DissipationCertificate(float(c1), float(gamma), float(mu), int(K),
                                  bool(np.all(margin >= -slack)), worst, float(margin[i]))


def shell_min_real(spec: SymbolSpec, K: int, d: int | None = None) -> np.ndarray:
    """min of Re lambda_k over each l1 shell |k|_1 = m, m = 0..K."""
    d = _default_dim(spec, d)
    ks = _ball(K, d)
    l1 = sum(np.abs(k) for k in ks)
    re = symbol_real_part(spec, ks)
    out = np.full(K + 1, np.inf)
    np.minimum.at(out, l1, re)
    return out


def fit_dissipation_order(spec: SymbolSpec, K: int, d: int | None = None) -> tuple[float, float, float]:
    """Fit (gamma, c1, mu) so that the bound holds on |k|_1 <= K.

    gamma is the log-log slope of the shell-minimum of Re lambda over
    |k|_1 in [K/2, K]; c1 is the smallest tail ratio Re lambda / |k|^gamma,
    and mu the smallest shift making the certificate hold at radius K.
    """
    d = _default_dim(spec, d)
    if K < 4:
        raise ConfigError(f"fit radius K must be >= 4, got {K}")
    smin = shell_min_real(spec, K, d)
    m = np.arange(K // 2, K + 1)
    tail = smin[m]
    if np.any(tail <= 0):
        raise FitDomainError(f"{spec.family}: Re lambda not positive on fit range [{K // 2}, {K}]")
    gamma, _ = np.polyfit(np.log(m), np.log(tail), 1)
    c1 = float(np.min(tail / m**gamma))
    allm = np.arange(K + 1, dtype=float)
    mu = float(max(0.0, np.max(c1 * allm**gamma - smin)))
    mu = mu * (1 + 1e-12) + 1e-12 * max(1.0, abs(mu))
    return float(gamma), c1, mu
