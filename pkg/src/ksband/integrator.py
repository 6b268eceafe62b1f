"""Fixed-step ETDRK4 (Cox-Matthews / Kassam-Trefethen) for du_k/dt = -lambda_k u_k + N(u)_k."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import RunConfig, config_hash
from .errors import BlowUpError
from .field import Grid, SpectralField, conj_reflect, mean_square, write_checkpoint
from .nonlinear import NonlinearWorkspace
from .symbols import symbol_table

log = logging.getLogger(__name__)

BLOWUP_AMPLITUDE = 1e10


def phi_functions(z, n_points: int = 32):
    """phi_1, phi_2, phi_3 at ``z`` by averaging over a unit circle around z.

    phi_1 = (e^z - 1)/z, phi_2 = (e^z - 1 - z)/z^2, phi_3 = (e^z - 1 - z - z^2/2)/z^3.
    On the circle |w - z| = 1 the closed forms have no cancellation, and the
    trapezoid mean of an entire function converges geometrically.
    """
    z = np.asarray(z, dtype=complex)
    roots = np.exp(2j * np.pi * (np.arange(n_points) + 0.5) / n_points)
    w = z[..., None] + roots
    ew = np.exp(w)
    p1 = (ew - 1) / w
    p2 = (ew - 1 - w) / w**2
    p3 = (ew - 1 - w - 0.5 * w**2) / w**3
    return p1.mean(-1), p2.mean(-1), p3.mean(-1)


@dataclass
class EtdCoefficients:
    h: float
    E: np.ndarray
    E2: np.ndarray
    Q: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    f3: np.ndarray

    @classmethod
    def build(cls, lam: np.ndarray, h: float, n_points: int = 32) -> EtdCoefficients:
        z = -np.asarray(lam, dtype=complex) * h
        p1, p2, p3 = phi_functions(z, n_points)
        q1, _, _ = phi_functions(z / 2, n_points)
        coeffs = cls(
            h=h,
            E=np.exp(z),
            E2=np.exp(z / 2),
            Q=0.5 * h * q1,
            f1=h * (p1 - 3 * p2 + 4 * p3),
            f2=h * (p2 - 2 * p3),
            f3=h * (4 * p3 - p2),
        )
        for name in ("E", "E2", "Q", "f1", "f2", "f3"):
            if not np.all(np.isfinite(getattr(coeffs, name))):
                raise BlowUpError(0.0, "coefficients", math.inf)
        return coeffs


@dataclass
class TrajectoryState:
    t: float
    u: SpectralField
    step_count: int = 0


def _advance(v: np.ndarray, c: EtdCoefficients, nl) -> np.ndarray:
    Nv = nl(v)
    a = c.E2 * v + c.Q * Nv
    Na = nl(a)
    b = c.E2 * v + c.Q * Na
    Nb = nl(b)
    cc = c.E2 * a + c.Q * (2 * Nb - Nv)
    Nc = nl(cc)
    return c.E * v + c.f1 * Nv + 2 * c.f2 * (Na + Nb) + c.f3 * Nc


def _project(v: np.ndarray, nyquist: np.ndarray) -> tuple[np.ndarray, float]:
    """Project onto Hermitian-symmetric arrays; returns the removed asymmetry size."""
    asym = v - conj_reflect(v)
    out = v - 0.5 * asym
    out[nyquist] = 0.0
    return out, float(np.max(np.abs(asym)))


def _check_finite(v: np.ndarray, t: float, grid: Grid) -> None:
    a = np.abs(v)
    i = int(np.argmax(a))
    amp = float(a.flat[i])
    if not math.isfinite(amp) or amp > BLOWUP_AMPLITUDE or not np.all(np.isfinite(v)):
        idx = np.unravel_index(i, grid.shape)
        mode = tuple(int(k[idx]) for k in grid.k_axes)
        raise BlowUpError(t, mode, amp)


def step(state: TrajectoryState, h: float, coeffs: EtdCoefficients,
         ws: NonlinearWorkspace, linear_only: bool = False) -> TrajectoryState:
    """One ETDRK4 step of size ``h`` (must match ``coeffs.h``)."""
    if not h > 0 or abs(h - coeffs.h) > 1e-15 * h:
        raise ValueError(f"step size {h} does not match coefficients built for h={coeffs.h}")
    grid = state.u.grid
    nl = (lambda v: np.zeros_like(v)) if linear_only else ws.apply
    v = _advance(np.array(state.u.coeffs), coeffs, nl)
    v, _ = _project(v, grid.nyquist_mask)
    t = state.t + h
    _check_finite(v, t, grid)
    return TrajectoryState(t, SpectralField(grid, v), state.step_count + 1)


def random_initial_field(grid: Grid, amplitude: float, seed: int, mean: float = 0.0) -> SpectralField:
    """u_k = rho e^{i theta_k} / (1 + |k|_1^2) with Hermitian pairing and u_0 = mean."""
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, 2 * np.pi, size=grid.shape)
    c = amplitude * np.exp(1j * theta) / (1.0 + grid.l1.astype(float) ** 2)
    k = grid.k_axes
    canonical = k[0] > 0
    if grid.d == 2:
        canonical = canonical | ((k[0] == 0) & (k[1] > 0))
    c = np.where(canonical, c, conj_reflect(c))
    c.flat[0] = mean
    return SpectralField(grid, c)


SERIES_COLUMNS = ("t", "step", "norm_l2", "rms", "energy", "mean_re", "mean_im", "max_coeff", "asymmetry")


@dataclass
class DiagnosticsSeries:
    """Time series recorded every ``record_every`` steps plus window snapshots.

    ``snapshots`` keeps the recorded fields with t >= window_start, the
    finite-time stand-in for lim sup_{t -> inf}.
    """

    columns: dict = field(default_factory=lambda: {c: [] for c in SERIES_COLUMNS})
    snapshots: list = field(default_factory=list)
    window_start: float = 0.0
    T: float = 0.0
    outcome: str = "completed"

    def __len__(self):
        return len(self.columns["t"])

    def record(self, state: TrajectoryState, asymmetry: float) -> None:
        u = state.u
        ms = mean_square(u)
        c = self.columns
        c["t"].append(state.t)
        c["step"].append(state.step_count)
        c["norm_l2"].append(math.sqrt(u.grid.L ** u.grid.d * ms))
        c["rms"].append(math.sqrt(ms))
        c["energy"].append(0.5 * ms)
        c["mean_re"].append(float(u.coeffs.flat[0].real))
        c["mean_im"].append(float(u.coeffs.flat[0].imag))
        c["max_coeff"].append(float(np.max(np.abs(u.coeffs))))
        c["asymmetry"].append(asymmetry)
        if state.t >= self.window_start - 1e-12:
            self.snapshots.append(state.u)

    def array(self, name: str) -> np.ndarray:
        return np.asarray(self.columns[name], dtype=float)

    def window_sup(self, name: str) -> float:
        t = self.array("t")
        vals = self.array(name)[t >= self.window_start - 1e-12]
        return float(np.max(vals)) if vals.size else math.nan

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(",".join(SERIES_COLUMNS) + "\n")
            for i in range(len(self)):
                fh.write(",".join(repr(float(self.columns[c][i])) if c != "step" else str(self.columns[c][i])
                                  for c in SERIES_COLUMNS) + "\n")


def _write_checkpoint_pair(out_dir: Path, state: TrajectoryState, chash: str) -> list[Path]:
    stem = out_dir / f"checkpoint_{state.step_count:09d}"
    write_checkpoint(stem.with_suffix(".bin"), state.u)
    meta = {"config_hash": chash, "t": state.t, "step_count": state.step_count}
    stem.with_suffix(".json").write_text(json.dumps(meta, indent=2) + "\n")
    return [stem.with_suffix(".bin"), stem.with_suffix(".json")]


def integrate(config: RunConfig, out_dir=None, initial: SpectralField | None = None,
              linear_only: bool = False):
    """Run ``config`` over [0, T] with fixed steps.

    Returns ``(series, final_state, files)``.  Diagnostics are recorded at
    t = 0 and every ``record_every`` steps; snapshots inside the attractor
    window are kept in memory.  On blow-up the :class:`BlowUpError` carries
    the partial series in ``.partial``.
    """
    grid = config.make_grid()
    it = config.integrator
    h = it.h
    n_steps = int(round(it.T / h))
    if abs(n_steps * h - it.T) > 1e-9 * max(1.0, it.T):
        log.warning("T=%g is not a multiple of h=%g; running %d steps", it.T, h, n_steps)
    u0 = initial if initial is not None else random_initial_field(grid, it.amplitude, it.seed, it.mean)
    state = TrajectoryState(0.0, u0, 0)
    series = DiagnosticsSeries(window_start=(1 - config.diagnostics.window_fraction) * n_steps * h,
                               T=n_steps * h)
    files: list[Path] = []
    chash = config_hash(config)
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        files += _write_checkpoint_pair(out, state, chash)
    if n_steps == 0:
        return series, state, files
    series.record(state, 0.0)
    lam = symbol_table(config.make_symbol(), grid)
    coeffs = EtdCoefficients.build(lam, h, it.contour_points)
    ws = NonlinearWorkspace(grid)
    nl = (lambda v: np.zeros_like(v)) if linear_only else ws.apply
    v = np.array(u0.coeffs)
    nyq = grid.nyquist_mask
    asym_max = 0.0
    every = config.output.checkpoint_every
    try:
        for s in range(1, n_steps + 1):
            v = _advance(v, coeffs, nl)
            v, asym = _project(v, nyq)
            asym_max = max(asym_max, asym)
            _check_finite(v, s * h, grid)
            if s % it.record_every == 0 or s == n_steps:
                state = TrajectoryState(s * h, SpectralField(grid, v), s)
                series.record(state, asym_max)
                asym_max = 0.0
            if out is not None and every and s % every == 0 and s != n_steps:
                files += _write_checkpoint_pair(out, TrajectoryState(s * h, SpectralField(grid, v), s), chash)
    except BlowUpError as exc:
        series.outcome = "blow_up"
        exc.partial = series
        raise
    if out is not None:
        files += _write_checkpoint_pair(out, state, chash)
    return series, state, files
