"""Temporal self-convergence of ETDRK4 on Kuramoto-Sivashinsky attractor data.

    python3 scripts/convergence.py

Spins up to t = 200 on L = 32 pi, N = 256, then integrates to t + 1 with
halving step sizes and prints successive difference ratios (16 for order 4).
"""

import math

import numpy as np

from ksband.config import RunConfig
from ksband.integrator import integrate


def main():
    cfg = RunConfig().replace(grid={"d": 1, "n": 256, "L": 32 * math.pi},
                              integrator={"h": 0.05, "T": 200.0, "record_every": 100})
    _, state, _ = integrate(cfg)
    hs = [0.04, 0.02, 0.01, 0.005, 0.0025, 0.00125]
    finals = [integrate(cfg.replace(integrator={"h": h, "T": 1.0, "record_every": 1000}), initial=state.u)[1]
              .u.coeffs for h in hs]
    diffs = [float(np.max(np.abs(a - b))) for a, b in zip(finals, finals[1:])]
    print(f"{'h':>9} {'|u_h - u_h/2|':>14} {'ratio':>7} {'order':>6}")
    for i, (h, e) in enumerate(zip(hs, diffs)):
        if i:
            r = diffs[i - 1] / e
            print(f"{h:9.5f} {e:14.3e} {r:7.2f} {math.log2(r):6.2f}")
        else:
            print(f"{h:9.5f} {e:14.3e}")


if __name__ == "__main__":
    main()
