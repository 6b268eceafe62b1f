"""The quadratic term u u_{x1} in spectral space.

``nonlinear_term`` is the production path (3/2 zero padding, alias free on
the retained modes).  ``convolution_direct`` and ``convolution_quadrants``
are slow exact references for phi = u^2 / 2 on the truncated mode set; the
quadrant version splits the convolution into the five sums over sign
quadrants used in the bootstrap estimates (k, l >= 0 only).
"""

from __future__ import annotations

import numpy as np

from .errors import PreconditionError
from .field import Grid, SpectralField, _full_from_half


class NonlinearWorkspace:
    """Padded buffers and derivative multipliers for one grid.

    Not thread safe: one workspace per running trajectory.
    """

    def __init__(self, grid: Grid, pad: float = 1.5):
        if pad < 1.5:
            raise PreconditionError(f"padding ratio must be >= 3/2 for alias-free products, got {pad}")
        self.grid = grid
        n = grid.n
        m = int(np.ceil(pad * n / 2)) * 2
        self.m = m
        self.padded_shape = (m,) * grid.d
        self.half_shape = (m,) * (grid.d - 1) + (m // 2 + 1,)
        self.buf = np.zeros(self.half_shape, dtype=np.complex128)
        self.deriv = -1j * grid.q * grid.k_axes[0].astype(float)
        self.deriv[grid.nyquist_mask] = 0.0
        # retained (non-Nyquist) indices along a full axis, in n- and m-space
        r = np.r_[0 : n // 2, n // 2 + 1 : n]
        self._src_full = r
        self._dst_full = np.where(r < n // 2, r, r - n + m)
        self._half_cols = np.arange(n // 2)

    def _scatter(self, coeffs: np.ndarray) -> None:
        self.buf[...] = 0.0
        n = self.grid.n
        if self.grid.d == 1:
            self.buf[: n // 2] = coeffs[: n // 2]
        else:
            cols = self._half_cols
            self.buf[np.ix_(self._dst_full, cols)] = coeffs[np.ix_(self._src_full, cols)]

    def square_half(self, coeffs: np.ndarray) -> np.ndarray:
        """Coefficients of u^2 / 2 on the retained modes (full FFT order)."""
        self._scatter(coeffs)
        scale = float(self.m ** self.grid.d)
        u = np.fft.irfftn(self.buf, s=self.padded_shape, axes=tuple(range(self.grid.d))) * scale
        phi = np.fft.rfftn(0.5 * u * u) / scale
        n = self.grid.n
        if self.grid.d == 1:
            half = phi[: n // 2 + 1].copy()
        else:
            half = np.zeros((n, n // 2 + 1), dtype=np.complex128)
            cols = self._half_cols
            half[np.ix_(self._src_full, cols)] = phi[np.ix_(self._dst_full, cols)]
        half[..., n // 2] = 0.0
        full = _full_from_half(half, self.grid)
        full[self.grid.nyquist_mask] = 0.0
        return full

    def apply(self, coeffs: np.ndarray) -> np.ndarray:
        """-i q k1 phi_k for coefficient array ``coeffs``."""
        return self.deriv * self.square_half(coeffs)


def nonlinear_term(u: SpectralField, ws: NonlinearWorkspace | None = None) -> SpectralField:
    """Right-hand-side contribution -i q k_1 phi_k of the advection term, phi = u^2/2."""
    ws = ws or NonlinearWorkspace(u.grid)
    return SpectralField(u.grid, ws.apply(u.coeffs))


def _retained(grid: Grid, ks) -> np.ndarray:
    ok = np.ones(np.broadcast(*ks).shape, dtype=bool)
    for k in ks:
        ok &= np.abs(k) <= grid.kmax
    return ok


def convolution_direct(u: SpectralField, k) -> complex:
    """phi_k = 1/2 sum_j u_j u_{k-j} over retained j and k - j."""
    g = u.grid
    k = (k,) if np.isscalar(k) else tuple(k)
    js = g.k_axes
    rest = tuple(kk - j for kk, j in zip(k, js))
    ok = _retained(g, js) & _retained(g, rest)
    idx = tuple(np.mod(r, g.n) for r in rest)
    prod = np.where(ok, u.coeffs * u.coeffs[idx], 0.0)
    return complex(0.5 * np.sum(prod))


def convolution_quadrants(u: SpectralField, k: int, l: int) -> complex:
    """phi_{k,l} for k, l >= 0 via the five-quadrant decomposition.

    Infinite ranges are cut at the truncation radius, so on the retained
    system the result equals ``convolution_direct`` up to summation order.
    """
    g = u.grid
    if g.d != 2:
        raise PreconditionError("quadrant decomposition is two-dimensional")
    if k < 0 or l < 0:
        raise PreconditionError(f"quadrant sums need k, l >= 0, got ({k}, {l})")
    c = u.coeffs
    K = g.kmax
    n = g.n

    def at(a, b):
        if abs(a) > K or abs(b) > K:
            return 0.0
        return c[a % n, b % n]

    s1 = sum(at(j, m) * at(k - j, l - m) for j in range(k + 1) for m in range(l + 1))
    inf = range(1, 2 * K + 2)  # beyond this every product has a zero factor
    s2 = sum(at(j, -m) * at(k - j, l + m) for j in range(k + 1) for m in inf)
    s3 = sum(at(-j, m) * at(k + j, l - m) for j in inf for m in range(l + 1))
    s4 = sum(at(-j, -m) * at(k + j, l + m) for j in inf for m in inf)
    s5 = sum(at(-j, l + m) * at(k + j, -m) for j in inf for m in inf)
    return complex(0.5 * s1 + s2 + s3 + s4 + s5)


def theta_hat(u: SpectralField, mu: float, k: int, l: int, p: float = 3.0) -> complex:
    """Forcing of the weighted system: mu w_{k,l} - i q k (|k|+|l|)^p phi_{k,l}."""
    weight = float(abs(k) + abs(l)) ** p if (k or l or p == 0) else 0.0
    w = weight * u[(k, l)]
    return complex(mu * w - 1j * u.grid.q * k * weight * convolution_quadrants(u, k, l))


def theta_field(u: SpectralField, mu: float, ws: NonlinearWorkspace | None = None,
                p: float = 3.0) -> np.ndarray:
    """theta over all retained modes via the pseudo-spectral product (any d)."""
    ws = ws or NonlinearWorkspace(u.grid)
    weight = u.grid.l1.astype(float) ** p
    return weight * (mu * u.coeffs + ws.apply(u.coeffs))
