"""Periodic real fields on uniform grids and their truncated Fourier coefficients.

Coefficients are stored in full FFT index order (``numpy.fft.fftfreq``) as a
complex array of shape ``(n,) * d``.  They are Fourier *coefficients*, i.e.

    u(x) = sum_k  u_k exp(i q k.x),      q = 2 pi / L,

so the forward transform divides the raw FFT by the number of samples.  The
wavenumber norm used throughout is the l1 norm |k|_1 = |k_1| + ... + |k_d|.
The Nyquist row/column (k_j = -n/2) is always held at zero.
"""

from __future__ import annotations

import csv
import math
import struct
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import ConfigError, FormatError

CHECKPOINT_HEADER = struct.Struct("<IId")


@dataclass(frozen=True)
class Grid:
    """Square periodic grid: ``d`` dimensions, ``n`` points per dimension, period ``L``."""

    d: int
    n: int
    L: float = 2 * math.pi

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ConfigError(f"grid.d must be 1 or 2, got {self.d}")
        if self.n < 8 or self.n & (self.n - 1):
            raise ConfigError(f"grid.n must be a power of two >= 8, got {self.n}")
        if not (math.isfinite(self.L) and self.L > 0):
            raise ConfigError(f"grid.L must be positive and finite, got {self.L}")

    @property
    def q(self) -> float:
        return 2 * math.pi / self.L

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.d

    @property
    def kmax(self) -> int:
        """Largest retained |k_j| with a nonzero coefficient."""
        return self.n // 2 - 1

    @cached_property
    def k_axes(self) -> tuple[np.ndarray, ...]:
        """Integer wavenumber index arrays, broadcast to ``shape`` (FFT order)."""
        k1 = np.fft.fftfreq(self.n, d=1.0 / self.n).astype(np.int64)
        if self.d == 1:
            return (k1,)
        kx, ky = np.meshgrid(k1, k1, indexing="ij")
        return (kx, ky)

    @cached_property
    def l1(self) -> np.ndarray:
        return sum(np.abs(k) for k in self.k_axes)

    @cached_property
    def nyquist_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        for k in self.k_axes:
            mask |= k == -self.n // 2
        return mask

    def index_of(self, k) -> tuple[int, ...]:
        """Array index of wavenumber tuple ``k`` (retained range only)."""
        k = (k,) if np.isscalar(k) else tuple(k)
        if len(k) != self.d:
            raise ConfigError(f"wavenumber {k} has wrong dimension for d={self.d}")
        if any(abs(kj) > self.n // 2 for kj in k):
            raise ConfigError(f"wavenumber {k} outside truncation n={self.n}")
        return tuple(int(kj) % self.n for kj in k)

    def points(self) -> tuple[np.ndarray, ...]:
        x = np.arange(self.n) * (self.L / self.n)
        if self.d == 1:
            return (x,)
        return tuple(np.meshgrid(x, x, indexing="ij"))


def conj_reflect(c: np.ndarray) -> np.ndarray:
    """Array whose entry at k is conj(c[-k]), for FFT-ordered ``c``."""
    r = np.conj(c)
    for ax in range(c.ndim):
        r = np.roll(np.flip(r, axis=ax), 1, axis=ax)
    return r


@dataclass(frozen=True, eq=False)
class SpectralField:
    grid: Grid
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128)
        if c.shape != self.grid.shape:
            raise ConfigError(f"coefficient shape {c.shape} does not match grid {self.grid.shape}")
        c[self.grid.nyquist_mask] = 0.0
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __getitem__(self, k) -> complex:
        return complex(self.coeffs[self.grid.index_of(k)])

    def __add__(self, other):
        return SpectralField(self.grid, self.coeffs + other.coeffs)

    def __mul__(self, scalar):
        return SpectralField(self.grid, scalar * self.coeffs)

    __rmul__ = __mul__

    def hermitian_residual(self) -> float:
        return float(np.max(np.abs(self.coeffs - conj_reflect(self.coeffs)), initial=0.0))

    def symmetrized(self) -> SpectralField:
        """Projection onto real fields: (c + conj(c[-k])) / 2."""
        return SpectralField(self.grid, 0.5 * (self.coeffs + conj_reflect(self.coeffs)))

    def samples(self) -> np.ndarray:
        return inverse_transform(self)

    @classmethod
    def zeros(cls, grid: Grid) -> SpectralField:
        return cls(grid, np.zeros(grid.shape, dtype=np.complex128))

    @classmethod
    def from_function(cls, grid: Grid, func) -> SpectralField:
        return forward_transform(np.asarray(func(*grid.points()), dtype=float), grid)

    @classmethod
    def from_l1_profile(cls, grid: Grid, profile) -> SpectralField:
        """Field with u_k = profile(|k|_1) for every retained k (real, even)."""
        m = grid.l1
        return cls(grid, np.asarray(profile(m.astype(float)), dtype=np.complex128))


def forward_transform(samples, grid: Grid) -> SpectralField:
    s = np.asarray(samples)
    if s.shape != grid.shape:
        raise ConfigError(f"sample shape {s.shape} does not match grid {grid.shape}")
    if np.iscomplexobj(s):
        if np.any(s.imag != 0):
            raise ConfigError("samples must be real")
        s = s.real
    half = np.fft.rfftn(s) / s.size
    return SpectralField(grid, _full_from_half(half, grid))


def _full_from_half(half: np.ndarray, grid: Grid) -> np.ndarray:
    n = grid.n
    full = np.empty(grid.shape, dtype=np.complex128)
    full[..., : n // 2 + 1] = half
    # Remaining last-axis columns follow from Hermitian symmetry.
    neg = np.arange(n // 2 + 1, n)
    src = np.conj(half[..., n - neg])
    if grid.d == 2:
        src = np.roll(np.flip(src, axis=0), 1, axis=0)
    full[..., n // 2 + 1 :] = src
    return full


def inverse_transform(f: SpectralField) -> np.ndarray:
    """Real samples of ``f``; the imaginary part (nonzero only if ``f`` is not Hermitian) is dropped."""
    return np.fft.ifftn(f.coeffs * f.coeffs.size).real


def imaginary_residue(f: SpectralField) -> float:
    return float(np.max(np.abs(np.fft.ifftn(f.coeffs * f.coeffs.size).imag)))


def _log_weighted_abs(f: SpectralField, s: float) -> np.ndarray:
    """log(|k|_1^s |u_k|) with 0^0 = 1; -inf where the term vanishes."""
    m = f.grid.l1.astype(float)
    a = np.abs(f.coeffs)
    with np.errstate(divide="ignore"):
        la = np.log(a)
        lm = np.log(m)
    out = la + s * lm if s > 0 else la.copy()
    if s > 0:
        out[m == 0] = -np.inf
    return out


def seminorm_sup(f: SpectralField, s: float) -> float:
    """sup_k |k|_1^s |u_k| over retained modes (0^0 = 1)."""
    if s < 0:
        raise ConfigError(f"seminorm order must be nonnegative, got {s}")
    return float(np.exp(np.max(_log_weighted_abs(f, s))))


def norm_l1_weighted(f: SpectralField, n: float) -> float:
    """sum_k |k|_1^n |u_k|; the k = 0 term only counts for n = 0."""
    if n < 0:
        raise ConfigError(f"norm order must be nonnegative, got {n}")
    return float(np.sum(np.exp(_log_weighted_abs(f, n))))


def weighted_field(f: SpectralField, p: float = 3.0) -> SpectralField:
    """Multiply each coefficient by |k|_1^p (k = 0 maps to 0 for p > 0)."""
    if p == 0:
        return f
    w = f.grid.l1.astype(float) ** p
    return SpectralField(f.grid, w * f.coeffs)


def mean_square(f: SpectralField) -> float:
    """Spatial mean of u^2, equal to sum_k |u_k|^2 under this normalization."""
    return float(np.sum(np.abs(f.coeffs) ** 2))


def norm_l2(f: SpectralField) -> float:
    """L2 norm over one period cell [0, L]^d."""
    return math.sqrt(f.grid.L ** f.grid.d * mean_square(f))


def shell_sup(f: SpectralField, m_max: int | None = None) -> np.ndarray:
    """sup of |u_k| over each l1 shell |k|_1 = m, m = 0..m_max."""
    m_max = f.grid.kmax if m_max is None else m_max
    m = f.grid.l1.ravel()
    a = np.abs(f.coeffs).ravel()
    keep = m <= m_max
    out = np.zeros(m_max + 1)
    np.maximum.at(out, m[keep], a[keep])
    return out


# -- persistence -----------------------------------------------------------


def _k_order(grid: Grid) -> np.ndarray:
    """FFT-order indices sorted into ascending k (-n/2 .. n/2-1) per axis."""
    return np.fft.fftshift(np.arange(grid.n))


def write_checkpoint(path, f: SpectralField) -> None:
    """Binary checkpoint: header <uint32 d, uint32 n, float64 L>, then (re, im) float64 pairs.

    Coefficients are written row-major with every axis in ascending k order
    (-n/2, ..., n/2 - 1); all values little-endian.
    """
    g = f.grid
    c = f.coeffs
    for ax in range(g.d):
        c = np.take(c, _k_order(g), axis=ax)
    inter = np.empty(c.size * 2, dtype="<f8")
    inter[0::2] = c.real.ravel()
    inter[1::2] = c.imag.ravel()
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_HEADER.pack(g.d, g.n, g.L))
        fh.write(inter.tobytes())


def read_checkpoint(path) -> SpectralField:
    data = Path(path).read_bytes()
    if len(data) < CHECKPOINT_HEADER.size:
        raise FormatError(f"{path}: truncated checkpoint header")
    d, n, L = CHECKPOINT_HEADER.unpack_from(data)
    try:
        grid = Grid(d, n, L)
    except ConfigError as exc:
        raise FormatError(f"{path}: bad checkpoint header: {exc}") from exc
    body = np.frombuffer(data, dtype="<f8", offset=CHECKPOINT_HEADER.size)
    if body.size != 2 * n**d:
        raise FormatError(f"{path}: expected {2 * n**d} doubles, found {body.size}")
    c = (body[0::2] + 1j * body[1::2]).reshape(grid.shape)
    inv = np.argsort(_k_order(grid))
    for ax in range(d):
        c = np.take(c, inv, axis=ax)
    return SpectralField(grid, c)


def write_coeff_csv(path, f: SpectralField) -> None:
    g = f.grid
    names = ["k"] if g.d == 1 else ["k", "l"]
    order = _k_order(g)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names + ["re", "im"])
        idx = np.stack(np.meshgrid(*([order] * g.d), indexing="ij"), -1).reshape(-1, g.d)
        for ix in idx:
            ix = tuple(ix)
            c = f.coeffs[ix]
            ks = [int(g.k_axes[a][ix]) for a in range(g.d)]
            w.writerow(ks + [repr(float(c.real)), repr(float(c.imag))])
