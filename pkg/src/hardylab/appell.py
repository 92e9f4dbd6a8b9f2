"""Pseudoconformal (lens-type) transformation of waves and potentials.

Maps a solution u(y, s) on s in [0, 1] with Gaussian decay scales beta (at
s=0) and alpha (at s=1) to a solution u~(x, t) with the symmetrized scale
sqrt(alpha beta) at both ends; then a change to the time interval [-1, 1]
and a generic [0, T] -> [0, 1] rescaling.

Waves are sampled on uniform grids (dimension 1 or 2).  Rescaled spatial
arguments are evaluated by cubic interpolation; values requested beyond the
grid are treated as zero and the clipped mass is reported, never silently
dropped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline, RegularGridInterpolator

from .errors import OutOfDomainError


@dataclass(frozen=True)
class AlphaBeta:
    """Gaussian decay scales at the two endpoint times."""

    alpha: float
    beta: float

    def __post_init__(self):
        if self.alpha <= 0.0 or self.beta <= 0.0:
            raise ValueError("alpha and beta must be positive")

    @property
    def mu(self) -> float:
        return 1.0 / (2.0 * self.alpha * self.beta)


def mu_of(ab: AlphaBeta) -> float:
    """Symmetrized Gaussian rate mu = 1/(2 alpha beta)."""
    return ab.mu


@dataclass
class SampledWave:
    """Complex field on a uniform grid [-L, L]^dim at one time."""

    L: float
    values: np.ndarray  # shape (N,) or (N, N)
    time: float

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.ndim not in (1, 2):
            raise ValueError("dimension must be 1 or 2")
        if min(self.values.shape) < 8:
            raise ValueError("need at least 8 points per axis")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("wave values must be finite")

    @property
    def dim(self) -> int:
        return self.values.ndim

    @property
    def N(self) -> int:
        return self.values.shape[0]

    @property
    def axis(self) -> np.ndarray:
        return np.linspace(-self.L, self.L, self.N)

    @property
    def dx(self) -> float:
        return 2.0 * self.L / (self.N - 1)

    def norm2(self) -> float:
        """Plain squared L2 norm by trapezoid quadrature."""
        dens = np.abs(self.values) ** 2
        for _ in range(self.dim):
            dens = np.trapezoid(dens, dx=self.dx, axis=-1)
        return float(dens)

    def weighted_norm2(self, a: float) -> float:
        """||exp(a |x|^2) . ||^2 on the grid (finite-domain trapezoid)."""
        x = self.axis
        if self.dim == 1:
            w = np.exp(2.0 * a * x * x)
            return float(np.trapezoid(w * np.abs(self.values) ** 2, dx=self.dx))
        r2 = x[:, None] ** 2 + x[None, :] ** 2
        dens = np.exp(2.0 * a * r2) * np.abs(self.values) ** 2
        return float(np.trapezoid(np.trapezoid(dens, dx=self.dx), dx=self.dx))

    def interpolator(self):
        if self.dim == 1:
            re = CubicSpline(self.axis, self.values.real)
            im = CubicSpline(self.axis, self.values.imag)
            return lambda pts: re(pts) + 1j * im(pts)
        re = RegularGridInterpolator((self.axis, self.axis), self.values.real,
                                     method="cubic", bounds_error=False, fill_value=0.0)
        im = RegularGridInterpolator((self.axis, self.axis), self.values.imag,
                                     method="cubic", bounds_error=False, fill_value=0.0)
        return lambda pts: re(pts) + 1j * im(pts)


def source_time(ab: AlphaBeta, t: float) -> float:
    """s = t beta / (alpha (1-t) + beta t), the source time feeding target time t."""
    return t * ab.beta / (ab.alpha * (1.0 - t) + ab.beta * t)


def appell_wave(source: SampledWave, ab: AlphaBeta, t: float) -> tuple[SampledWave, float]:
    """Transform a wave sampled at the matching source time to target time t.

    u~(x, t) = scale^(n/2) u(scale x, s) exp((alpha-beta)|x|^2 / (4 i D)),
    D = alpha (1-t) + beta t, scale = sqrt(alpha beta) / D.

    Returns (wave, clipped_mass): the fraction of |u|^2 mass of the source
    lying beyond the rescaled grid coverage (values there are taken as 0).
    With alpha == beta the transform is the identity and values pass through
    untouched.
    """
    s_expect = source_time(ab, t)
    if abs(source.time - s_expect) > 1e-9 * (1.0 + abs(s_expect)):
        raise OutOfDomainError(
            f"source sampled at s={source.time}, target t={t} needs s={s_expect}")
    D = ab.alpha * (1.0 - t) + ab.beta * t
    scale = np.sqrt(ab.alpha * ab.beta) / D
    n = source.dim

    if ab.alpha == ab.beta:
        return SampledWave(source.L, source.values.copy(), t), 0.0

    x = source.axis
    reach = scale * source.L
    clipped = 0.0
    if reach > source.L:
        # the rescaled argument leaves the grid near the edges; report the mass there
        outside = np.abs(x) * scale > source.L
        if source.dim == 1:
            mask = outside
        else:
            mask = outside[:, None] | outside[None, :]
        dens = np.abs(source.values) ** 2
        total = dens.sum()
        clipped = float(dens[mask].sum() / total) if total > 0 else 0.0

    f = source.interpolator()
    if n == 1:
        pts = scale * x
        vals = np.where(np.abs(pts) <= source.L, f(pts), 0.0)
        r2 = x * x
    else:
        X, Y = np.meshgrid(scale * x, scale * x, indexing="ij")
        inside = (np.abs(X) <= source.L) & (np.abs(Y) <= source.L)
        vals = np.where(inside, f(np.stack([X, Y], axis=-1)), 0.0)
        r2 = x[:, None] ** 2 + x[None, :] ** 2
    phase = np.exp((ab.alpha - ab.beta) * r2 / (4.0j * D))
    out = scale ** (n / 2.0) * vals * phase
    return SampledWave(source.L, out, t), clipped


def appell_potentials(A, V, F, ab: AlphaBeta):
    """Transformed evaluators (A~, V~, F~) as closures of (x, t).

    A and F take (y, s) and return vector / complex; V takes (y, s).
    """

    def D_of(t):
        return ab.alpha * (1.0 - t) + ab.beta * t

    def args(x, t):
        D = D_of(t)
        scale = np.sqrt(ab.alpha * ab.beta) / D
        return scale * np.asarray(x, dtype=float), source_time(ab, t), D, scale

    def A_t(x, t):
        y, s, D, scale = args(x, t)
        return scale * np.asarray(A(y, s))

    def V_t(x, t):
        y, s, D, scale = args(x, t)
        return (ab.alpha * ab.beta / D**2) * V(y, s)

    def F_t(x, t, n: int = 1):
        y, s, D, scale = args(x, t)
        r2 = float(np.sum(np.asarray(x, dtype=float) ** 2))
        return scale ** (n / 2.0 + 2.0) * F(y, s) * np.exp((ab.alpha - ab.beta) * r2 / (4.0j * D))

    return A_t, V_t, F_t


def to_symmetric_interval(wave: SampledWave, t: float) -> SampledWave:
    """v(x, t) = 2^(-n/4) u~(x / sqrt(2), (1+t)/2) for t in [-1, 1].

    The input must be sampled at time (1+t)/2.  The spatial shrink keeps all
    arguments inside the grid, so nothing is clipped.
    """
    s_expect = 0.5 * (1.0 + t)
    if abs(wave.time - s_expect) > 1e-9:
        raise OutOfDomainError(f"need source at s={s_expect}, got {wave.time}")
    n = wave.dim
    x = wave.axis
    f = wave.interpolator()
    if n == 1:
        vals = f(x / np.sqrt(2.0))
    else:
        X, Y = np.meshgrid(x / np.sqrt(2.0), x / np.sqrt(2.0), indexing="ij")
        vals = f(np.stack([X, Y], axis=-1))
    return SampledWave(wave.L, 2.0 ** (-n / 4.0) * vals, t)


def scale_to_unit_time(v, T: float, ab: AlphaBeta):
    """Rescale a family on [0, T] to [0, 1]: u(x, t) = T^(n/4) v(sqrt(T) x, T t).

    v is a callable (x, s) -> complex with x an n-vector (or scalar in 1D).
    Returns (u, ab') with the rescaled decay pair alpha' = alpha/sqrt(T),
    beta' = beta/sqrt(T).
    """
    if T <= 0.0:
        raise ValueError("T must be positive")

    def u(x, t, n: int = 1):
        return T ** (n / 4.0) * v(np.sqrt(T) * np.asarray(x, dtype=float), T * t)

    return u, AlphaBeta(ab.alpha / np.sqrt(T), ab.beta / np.sqrt(T))


def sample_wave(f, L: float, N: int, t: float, dim: int = 1) -> SampledWave:
    """Sample a callable f(x, t) onto a uniform grid."""
    x = np.linspace(-L, L, N)
    if dim == 1:
        vals = np.asarray([f(xi, t) for xi in x], dtype=complex)
    else:
        vals = np.asarray([[f(np.array([xi, yi]), t) for yi in x] for xi in x], dtype=complex)
    return SampledWave(L, vals, t)
