"""Modified Bessel functions of the first kind, integer order.

Three evaluation routes:

* power series  sum_m (x/2)^(n+2m) / (m! (n+m)!)  for moderate arguments,
* the Hankel asymptotic expansion for x > 30 max(1, n),
* Miller's downward recurrence for whole sequences I_0..I_nmax.

Everything is written against :mod:`math` only, so values do not depend on
a platform special-function library.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import RangeError

MAX_ORDER = 200
MAX_ARG = 700.0


@dataclass(frozen=True)
class BesselEval:
    order: int
    argument: float
    value: float
    method: str  # "series" or "asymptotic"


def _check(n, x):
    if abs(n) > MAX_ORDER or not abs(x) <= MAX_ARG:
        raise RangeError(f"I_n(x) outside supported range |n|<={MAX_ORDER}, |x|<={MAX_ARG}: n={n}, x={x}")


def _series(n: int, x: float) -> float:
    h = 0.5 * x
    if h == 0.0:  # x is zero or subnormal
        return 1.0 if n == 0 else 0.0
    term = math.exp(n * math.log(h) - math.lgamma(n + 1))
    total = term
    h2 = h * h
    m = 0
    while True:
        m += 1
        term *= h2 / (m * (n + m))
        total += term
        if term <= total * 1e-17:
            return total


def _asymptotic(n: int, x: float) -> float:
    # I_n(x) ~ e^x / sqrt(2 pi x) * sum_k (-1)^k a_k(n) / x^k
    mu = 4.0 * n * n
    term = 1.0
    total = 1.0
    k = 0
    while True:
        k += 1
        nxt = -term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if abs(nxt) >= abs(term) or k > 200:
            break
        term = nxt
        total += term
        if abs(term) <= 1e-17 * abs(total):
            break
    return math.exp(x) / math.sqrt(2 * math.pi * x) * total


def bessel_i_eval(n: int, x: float) -> BesselEval:
    n = int(n)
    x = float(x)
    _check(n, x)
    order = abs(n)
    ax = abs(x)
    if ax > 30.0 * max(1, order):
        val, method = _asymptotic(order, ax), "asymptotic"
    else:
        val, method = _series(order, ax), "series"
    if x < 0 and order % 2:
        val = -val
    return BesselEval(n, x, val, method)


def bessel_i(n: int, x: float) -> float:
    """I_n(x) for integer n, |n| <= 200 and |x| <= 700."""
    return bessel_i_eval(n, x).value


def _miller_start(n_max: int, x: float) -> int:
    # Start well past both the requested order and the bulk of the
    # normalization sum, which extends to about x + several sqrt(x).
    return int(n_max + x + 16 * math.sqrt(x + 1) + 40)


def _miller_unnormalized(n_max: int, x: float) -> tuple[np.ndarray, float]:
    """Downward recurrence I_{k-1} = I_{k+1} + (2k/x) I_k from a cold start.

    Returns values proportional to I_0..I_{n_max}(x) and the matching value
    of I_0 + 2 sum_{k>=1} I_k on the same scale.
    """
    start = _miller_start(n_max, x)
    out = np.zeros(n_max + 1)
    nxt, cur = 0.0, 1e-300
    total = 0.0
    for k in range(start, 0, -1):
        prev = nxt + (2.0 * k / x) * cur
        nxt, cur = cur, prev
        # cur now holds I_{k-1}, nxt holds I_k
        total += 2.0 * nxt
        if k - 1 <= n_max:
            out[k - 1] = cur
        if cur > 1e250:
            out *= 1e-250
            nxt *= 1e-250
            cur *= 1e-250
            total *= 1e-250
    total += cur
    return out, total


def bessel_i_sequence(n_max: int, x: float) -> np.ndarray:
    """Array [I_0(x), ..., I_{n_max}(x)] by normalized Miller recurrence.

    The normalization uses e^x = I_0(x) + 2 sum_{k>=1} I_k(x).
    """
    n_max = int(n_max)
    if n_max < 0:
        raise RangeError(f"n_max must be >= 0, got {n_max}")
    x = float(x)
    _check(n_max, x)
    if x == 0.0:
        out = np.zeros(n_max + 1)
        out[0] = 1.0
        return out
    ax = abs(x)
    if ax < 1e-8:
        # 2k/x would overflow the recurrence; two series terms are exact here
        out = np.array([_series(n, ax) for n in range(n_max + 1)])
        if x < 0:
            out[1::2] *= -1
        return out
    raw, total = _miller_unnormalized(n_max, ax)
    # scale = e^x / total, formed in logs so tiny raw values survive
    with np.errstate(divide="ignore"):
        out = np.exp(np.log(raw) + ax - math.log(total))
    out[raw == 0] = 0.0
    if x < 0:
        out[1::2] *= -1
    return out


def _ratios_down(n_top: int, x: float) -> np.ndarray:
    """r_k = I_{k+1}(x) / I_k(x) for k = 0..n_top, x > 0, by the backward recurrence
    r_k = 1 / (2(k+1)/x + r_{k+1}) started from zero well above n_top."""
    start = _miller_start(n_top, x)
    r = 0.0
    out = np.empty(n_top + 1)
    for k in range(start, -1, -1):
        r = 1.0 / (2.0 * (k + 1) / x + r)
        if k <= n_top:
            out[k] = r
    return out


def bessel_i_triple_scaled(eta: int, x: float) -> tuple[float, float, float]:
    """(I_{eta-1}, I_eta, I_{eta+1})(x) divided by a common positive factor.

    Large orders underflow individually, so the triple is built from the
    ratios I_{k+1}/I_k and scaled so that the largest entry has unit
    magnitude.  Requires x != 0.
    """
    orders = [abs(eta - 1), abs(eta), abs(eta + 1)]
    lo, top = min(orders), max(orders)
    r = _ratios_down(top, abs(x))
    rel = {lo: 1.0}
    for o in range(lo + 1, top + 1):
        rel[o] = rel[o - 1] * r[o - 1]
    vals = [rel[o] for o in orders]
    scale = max(vals)
    vals = [v / scale for v in vals]
    if x < 0:
        vals = [-v if (o % 2) else v for v, o in zip(vals, [eta - 1, eta, eta + 1])]
    return tuple(vals)
