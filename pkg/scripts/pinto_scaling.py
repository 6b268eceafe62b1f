"""Pinto 2D attractor size against domain length, plus the bootstrap ratio check.

    python3 scripts/pinto_scaling.py [--n 64] [--T 200] [--mults 2 4 8]

Prints the window sup of ||u||_2 for L = mult * pi, the log-log slope, and
for the largest L the fraction of modes satisfying the weighted bootstrap
inequality with a 5% tolerance.
"""

import argparse
import math
import time

import numpy as np

from ksband.config import RunConfig
from ksband.diagnostics import bootstrap_inequality_check
from ksband.integrator import integrate
from ksband.symbols import fit_dissipation_order, symbol_table


def run(mult, n, T, h):
    cfg = RunConfig().replace(grid={"d": 2, "n": n, "L": mult * math.pi}, symbol={"family": "Pinto2D"},
                              integrator={"h": h, "T": T, "record_every": 50})
    t0 = time.time()
    series, _, _ = integrate(cfg)
    return cfg, series, time.time() - t0


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=64)
    ap.add_argument("--T", type=float, default=200.0)
    ap.add_argument("--h", type=float, default=0.02)
    ap.add_argument("--mults", type=float, nargs="+", default=[2, 4, 8])
    args = ap.parse_args()

    rows = []
    for mult in args.mults:
        cfg, series, el = run(mult, args.n, args.T, args.h)
        lam = symbol_table(cfg.make_symbol(), cfg.make_grid())
        n_unstable = int(np.sum(lam.real < 0))
        sup = series.window_sup("norm_l2")
        rows.append((mult, cfg, series, sup))
        print(f"L = {mult:g} pi: window sup |u|_2 = {sup:.4g}, unstable modes = {n_unstable}, {el:.1f} s")
    L = np.array([r[0] * math.pi for r in rows])
    sups = np.array([r[3] for r in rows])
    if len(rows) > 1:
        print(f"log-log slope over all L: {np.polyfit(np.log(L), np.log(sups), 1)[0]:.3f}")
        print(f"slope over the two largest L: {math.log(sups[-1] / sups[-2]) / math.log(L[-1] / L[-2]):.3f}")

    _, cfg, series, _ = rows[-1]
    spec = cfg.make_symbol()
    gamma, c1, mu = fit_dissipation_order(spec, cfg.grid.n)
    rep = bootstrap_inequality_check(series.snapshots, spec, c1, gamma, mu, tol=0.05)
    print(f"bootstrap at L = {rows[-1][0]:g} pi with (c1, gamma, mu) = ({c1:.3g}, {gamma:.4g}, {mu:.4g}): "
          f"{rep.n_satisfied}/{rep.n_checked} = {100 * rep.fraction_satisfied:.2f}% within 1.05")
    worst = sorted(rep.violations(cfg.make_grid()), key=lambda v: -v[1])[:10]
    if worst:
        print("largest violations (k, ratio):", ", ".join(f"{k}: {r:.3g}" for k, r in worst))


if __name__ == "__main__":
    main()
