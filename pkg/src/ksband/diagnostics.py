"""Attractor-window measurements.

The time lim sup is replaced throughout by a sup over the recorded window
[t0, T]; every report carries that window so its claims stay scoped to it.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import BlowUpError, PreconditionError, ResolutionError
from .field import SpectralField, shell_sup
from .nonlinear import NonlinearWorkspace, theta_field
from .symbols import SymbolSpec, certify_dissipation, symbol_table

FLOOR = 1e-14


def _as_window(source) -> list[SpectralField]:
    if isinstance(source, SpectralField):
        return [source]
    window = list(source)
    if not window:
        raise PreconditionError("empty snapshot window")
    return window


def window_shell_sup(source, p: float = 0.0, m_max: int | None = None) -> np.ndarray:
    """Window sup of max_{|k|_1 = m} |k|_1^p |u_k| for each shell m."""
    window = _as_window(source)
    g = window[0].grid
    m_max = g.d * g.kmax if m_max is None else m_max
    out = np.max([shell_sup(u, m_max) for u in window], axis=0)
    if p:
        out = out * np.arange(m_max + 1, dtype=float) ** p
    return out


# -- h(s) profile ------------------------------------------------------------


@dataclass
class HProfile:
    s_grid: np.ndarray
    h_values: np.ndarray
    argmax_shell: np.ndarray
    weight: float = 3.0
    window: tuple = (0.0, 0.0)

    def as_dict(self) -> dict:
        return {"s": list(map(float, self.s_grid)), "h": list(map(float, self.h_values)),
                "argmax_shell": list(map(int, self.argmax_shell)), "weight": self.weight,
                "window": list(self.window)}


def _h_from_shells(shells: np.ndarray, s_grid: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    m = np.arange(shells.size, dtype=float)
    with np.errstate(divide="ignore"):
        lw = np.log(shells)
        lm = np.log(m)
    h = np.empty(len(s_grid))
    arg = np.empty(len(s_grid), dtype=int)
    for i, s in enumerate(s_grid):
        if s == 0:
            vals = lw
        else:
            vals = lw + s * lm
            vals[0] = -np.inf
        j = int(np.argmax(vals))
        arg[i] = j
        h[i] = math.exp(vals[j]) if np.isfinite(vals[j]) else 0.0
    return h, arg


def h_profile(source, s_grid, p: float = 3.0, window: tuple = (0.0, 0.0)) -> HProfile:
    """h(s) = window sup over snapshots and modes of |k|_1^s |w_k|, w_k = |k|_1^p u_k.

    0^0 = 1, so at s = 0 the mean contributes when p = 0.
    """
    s_grid = np.asarray(s_grid, dtype=float)
    if np.any(s_grid < 0) or np.any(np.diff(s_grid) <= 0):
        raise PreconditionError("s_grid must be nonnegative and increasing")
    shells = window_shell_sup(source, p)
    h, arg = _h_from_shells(shells, s_grid)
    return HProfile(s_grid, h, arg, p, tuple(window))


def auto_s_max(source, p: float = 3.0, margin: int = 4, ds: float = 0.25, s_cap: float = 400.0) -> float:
    """Largest s (on a ``ds`` grid) whose argmax shell stays ``margin`` shells inside the resolved range."""
    window = _as_window(source)
    g = window[0].grid
    shells = window_shell_sup(window, p)
    top = _top_resolved_shell(window_shell_sup(window, 0.0, g.kmax))
    limit = min(g.kmax, top) - margin
    s_max = 0.0
    for s in np.arange(ds, s_cap + ds, ds):
        _, arg = _h_from_shells(shells, np.array([s]))
        if arg[0] > limit:
            break
        s_max = float(s)
    return s_max


# -- growth constants of h(s) <= M (a s)^s -------------------------------------


@dataclass
class GrowthFit:
    M: float
    a: float
    residual: float
    fit_range: tuple
    flat: bool = False

    @property
    def beta_lemma1(self) -> float:
        """Lower bound 1/(e a) on the band (index units)."""
        return math.inf if self.flat else 1.0 / (math.e * self.a)


def fit_growth_constants(profile: HProfile, s_min: float | None = None, s_max: float | None = None) -> GrowthFit:
    """Least squares of log h(s) = log M + s log a + s log s over the fit range."""
    s = profile.s_grid
    h = profile.h_values
    lo = s[0] if s_min is None else s_min
    hi = s[-1] if s_max is None else s_max
    sel = (s >= lo) & (s <= hi)
    if not np.any(h[sel] > 0):
        return GrowthFit(0.0, 0.0, 0.0, (float(lo), float(hi)), flat=True)
    sel &= h > 0
    ss = s[sel]
    if ss.size < 2:
        raise PreconditionError("need at least two positive h(s) samples in the fit range")
    slogs = np.where(ss > 0, ss * np.log(np.where(ss > 0, ss, 1.0)), 0.0)
    y = np.log(h[sel]) - slogs
    A = np.stack([np.ones_like(ss), ss], axis=1)
    (logM, loga), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.sqrt(np.mean((A @ np.array([logM, loga]) - y) ** 2)))
    return GrowthFit(float(math.exp(logM)), float(math.exp(loga)), resid, (float(ss[0]), float(ss[-1])))


# -- band of analyticity from the coefficient tail ---------------------------


@dataclass
class BandEstimate:
    beta_index: float
    q: float
    slope: float
    intercept: float
    shells: tuple
    residual: float

    @property
    def beta_physical(self) -> float:
        return self.beta_index / self.q

    def as_dict(self) -> dict:
        d = asdict(self)
        d["shells"] = [int(m) for m in self.shells]
        d["beta_physical"] = self.beta_physical
        return d


def _threshold(shells: np.ndarray, floor: float) -> float:
    return floor * max(1.0, float(np.max(shells)))


def _top_resolved_shell(shells: np.ndarray, floor: float = FLOOR) -> int:
    above = np.nonzero(shells > _threshold(shells, floor))[0]
    return int(above[-1]) if above.size else 0


def default_tail_range(source, floor: float = FLOOR) -> tuple[int, int]:
    """Fit shells [m_hi/2, m_hi], m_hi = min(highest resolved shell, kmax/2).

    Keeps clear of the truncation edge, where dealiased spectra pile up.
    """
    window = _as_window(source)
    g = window[0].grid
    shells = window_shell_sup(window, 0.0, g.kmax)
    m_hi = min(_top_resolved_shell(shells, floor), g.kmax // 2)
    return max(1, m_hi // 2), max(1, m_hi)


def band_from_tail(source, k_min: int = 1, k_max: int | None = None, floor: float = FLOOR,
                   min_shells: int = 8) -> BandEstimate:
    """Exponential decay rate of the shell sup of |u_k| over shells k_min..k_max.

    Only complete l1 shells (m <= kmax) are used; shells below
    ``floor * max(1, max|u_k|)`` are dropped.  ``beta_index`` is clipped at 0.
    """
    window = _as_window(source)
    g = window[0].grid
    k_max = g.kmax if k_max is None else min(k_max, g.kmax)
    shells = window_shell_sup(window, 0.0, g.kmax)
    m = np.arange(max(k_min, 0), k_max + 1)
    vals = shells[m]
    keep = vals > _threshold(shells, floor)
    if keep.sum() < min_shells:
        raise ResolutionError(
            f"only {int(keep.sum())} shells in [{k_min}, {k_max}] above the floor; need {min_shells}")
    m, vals = m[keep], np.log(vals[keep])
    slope, intercept = np.polyfit(m.astype(float), vals, 1)
    resid = float(np.sqrt(np.mean((slope * m + intercept - vals) ** 2)))
    return BandEstimate(max(0.0, -float(slope)), g.q, float(slope), float(intercept),
                        tuple(int(x) for x in m), resid)


# -- full report for a simulation window -------------------------------------


@dataclass
class AnalyticityReport:
    beta_tail: float
    beta_lemma1: float
    M: float
    a: float
    fit_range: tuple
    residual: float
    q: float
    tail: dict = field(default_factory=dict)
    window: tuple = (0.0, 0.0)
    profile: dict = field(default_factory=dict)
    units: str = "index"
    provenance: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        d = asdict(self)
        for key in ("beta_tail", "beta_lemma1"):
            if math.isinf(d[key]):
                d[key] = "inf"
        d["beta_tail_physical"] = self.beta_tail / self.q
        d["beta_lemma1_physical"] = (self.beta_lemma1 / self.q) if math.isfinite(self.beta_lemma1) else "inf"
        return d


def analyze_window(source, weight: float = 3.0, s_max: float = 0.0, s_count: int = 41,
                   fit_s_min: float = 1.0, fit_s_max: float = 0.0, k_min: int = 0,
                   window: tuple = (0.0, 0.0), provenance: dict | None = None) -> AnalyticityReport:
    """Band estimates for a snapshot window (betas in index units, see ``q``)."""
    snaps = _as_window(source)
    g = snaps[0].grid
    if k_min:
        lo, hi = k_min, g.kmax
    else:
        lo, hi = default_tail_range(snaps)
    try:
        tail = band_from_tail(snaps, lo, hi)
        beta_tail, tail_d = tail.beta_index, tail.as_dict()
    except ResolutionError as exc:
        beta_tail, tail_d = math.nan, {"error": str(exc)}
    s_top = s_max or auto_s_max(snaps, weight)
    if s_top <= 0:
        s_top = 1.0
    prof = h_profile(snaps, np.linspace(0.0, s_top, s_count), weight, window)
    try:
        fit = fit_growth_constants(prof, fit_s_min, fit_s_max or s_top)
    except PreconditionError as exc:
        # h(s) peaks at the truncation edge already for small s: unresolved
        fit = GrowthFit(math.nan, math.nan, math.nan, (fit_s_min, s_top))
        tail_d = {**tail_d, "growth_fit_error": f"{exc} (s range clear of truncation ends at {s_top})"}
    return AnalyticityReport(
        beta_tail=beta_tail, beta_lemma1=fit.beta_lemma1, M=fit.M, a=fit.a,
        fit_range=fit.fit_range, residual=fit.residual, q=g.q, tail=tail_d,
        window=tuple(window), profile=prof.as_dict(), provenance=dict(provenance or {}))


# -- bootstrap inequality ----------------------------------------------------


@dataclass
class BootstrapReport:
    ratios: np.ndarray
    sharp_ratios: np.ndarray
    vacuous: np.ndarray
    tol: float
    c1: float
    gamma: float
    mu: float

    @property
    def n_checked(self) -> int:
        return int(np.sum(~self.vacuous))

    @property
    def n_satisfied(self) -> int:
        return int(np.sum((self.ratios <= 1 + self.tol) & ~self.vacuous))

    @property
    def fraction_satisfied(self) -> float:
        return self.n_satisfied / self.n_checked if self.n_checked else math.nan

    def violations(self, grid) -> list[tuple]:
        bad = (~self.vacuous) & (self.ratios > 1 + self.tol)
        return [(tuple(int(k[idx]) for k in grid.k_axes), float(self.ratios[idx]))
                for idx in zip(*np.nonzero(bad))]

    def as_dict(self) -> dict:
        return {"c1": self.c1, "gamma": self.gamma, "mu": self.mu, "tol": self.tol,
                "n_checked": self.n_checked, "n_satisfied": self.n_satisfied,
                "fraction_satisfied": self.fraction_satisfied,
                "max_ratio": float(np.max(self.ratios[~self.vacuous], initial=0.0))}


def bootstrap_inequality_check(source, symbol: SymbolSpec, c1: float, gamma: float, mu: float,
                               tol: float = 0.05, p: float = 3.0, floor: float = FLOOR,
                               require_certificate: bool = True) -> BootstrapReport:
    """Compare sup|w_k| with sup|theta_k| / (c1 |k|_1^gamma) mode by mode.

    ratio_k = sup|w_k| c1 |k|_1^gamma / sup|theta_k| should not exceed 1 in
    the lim sup; ``sharp_ratios`` uses Re(mu + lambda_k) in place of
    c1 |k|^gamma.  Modes whose theta and w both sit below ``floor`` (relative
    to the window maximum) are vacuous and reported as NaN.
    """
    snaps = _as_window(source)
    g = snaps[0].grid
    if require_certificate:
        cert = certify_dissipation(symbol, c1, gamma, mu, g.d * g.kmax, g.d)
        if not cert.verified:
            raise PreconditionError(f"dissipation bound ({c1}, {gamma}, {mu}) fails at k={cert.worst_k}")
    ws = NonlinearWorkspace(g)
    l1 = g.l1.astype(float)
    sup_w = np.zeros(g.shape)
    sup_t = np.zeros(g.shape)
    for u in snaps:
        sup_w = np.maximum(sup_w, np.abs(l1**p * u.coeffs))
        sup_t = np.maximum(sup_t, np.abs(theta_field(u, mu, ws, p)))
    scale = max(float(np.max(sup_w)), float(np.max(sup_t)), 1e-300)
    vacuous = (sup_t <= floor * scale) | (l1 == 0) | g.nyquist_mask
    re_mu = mu + symbol_table(symbol, g).real
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(vacuous, np.nan, sup_w * c1 * l1**gamma / sup_t)
        sharp = np.where(vacuous, np.nan, sup_w * re_mu / sup_t)
    return BootstrapReport(ratios, sharp, vacuous, tol, c1, gamma, mu)


# -- gamma sweep ---------------------------------------------------------------


SWEEP_COLUMNS = ("gamma", "beta_tail", "beta_lemma1", "blow_up", "window_sup_l2", "M", "a")


def _sweep_one(args):
    from .integrator import integrate

    config, gamma, out_dir = args
    cfg = config.replace(symbol={"family": "GeneralizedGamma",
                                 "params": {"gamma": gamma, "mu_tilde": config.sweep.mu_tilde}})
    try:
        series, _, _ = integrate(cfg, out_dir)
    except BlowUpError as exc:
        if out_dir is not None and exc.partial is not None:
            exc.partial.write_csv(Path(out_dir) / "series.csv")
        return {"gamma": gamma, "beta_tail": math.nan, "beta_lemma1": math.nan, "blow_up": True,
                "window_sup_l2": math.nan, "M": math.nan, "a": math.nan}
    dg = cfg.diagnostics
    rep = analyze_window(series.snapshots, dg.weight, dg.s_max, dg.s_count, dg.fit_s_min,
                         dg.fit_s_max, dg.k_min, (series.window_start, series.T))
    row = {"gamma": gamma, "beta_tail": rep.beta_tail, "beta_lemma1": rep.beta_lemma1,
           "blow_up": False, "window_sup_l2": series.window_sup("norm_l2"), "M": rep.M, "a": rep.a}
    if out_dir is not None:
        series.write_csv(Path(out_dir) / "series.csv")
        dump_json(Path(out_dir) / "report.json", rep.as_dict())
    return row


def gamma_sweep(base_config, gammas: Sequence[float], workers: int = 1, out_dir=None) -> list[dict]:
    """One independent GeneralizedGamma run per gamma; rows in input order.

    With ``out_dir`` each run writes into its own ``gamma_<value>`` subdirectory.
    """
    jobs = [(base_config, float(g), None if out_dir is None else Path(out_dir) / f"gamma_{float(g):g}")
            for g in gammas]
    if not jobs:
        return []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_one, jobs))
    return [_sweep_one(j) for j in jobs]


def write_table_csv(path, rows: list[dict], columns: Sequence[str]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([repr(r[c]) if isinstance(r[c], float) else r[c] for c in columns])


def dump_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(f"not JSON serializable: {type(o)}")
