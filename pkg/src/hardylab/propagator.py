"""Crank-Nicolson evolution of du/dt = i (Lap_A + V) u on a truncated box.

The magnetic Laplacian Lap_A = Lap - 2i A.grad - i div A - |A|^2 is
discretized so that its matrix is Hermitian for real A and V: the advection
pair 2 A.grad + (div A) is assembled as A.D + D.(A .), with D the central
difference.  Crank-Nicolson is then a Cayley map and plain-norm conservation
is structural, not asymptotic.

Dirichlet walls at +-L; a run aborts if a non-negligible fraction of mass
reaches the boundary cells.  Dimension 1 or 2, bounded potentials only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import BoundaryMassExceededError, SolverDivergedError, WeightExceedsDecayError

SOLVE_RESIDUAL = 1e-12
BOUNDARY_MASS_LIMIT = 1e-8


@dataclass(frozen=True)
class GridSpec:
    dim: int
    L: float
    N: int
    dt: float
    steps: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError("dimension must be 1 or 2")
        if self.L <= 0.0 or self.dt <= 0.0:
            raise ValueError("L and dt must be positive")
        n = self.N
        if not ((n & (n - 1)) == 0 or (n % 2 == 1 and n >= 65)):
            raise ValueError("N must be a power of two or odd >= 65")

    @property
    def axis(self) -> np.ndarray:
        return np.linspace(-self.L, self.L, self.N)

    @property
    def dx(self) -> float:
        return 2.0 * self.L / (self.N - 1)


@dataclass
class EvolutionTrace:
    times: np.ndarray
    H: np.ndarray        # weighted squared norms
    norm2: np.ndarray    # plain squared norms
    admissible: np.ndarray  # per-time weight admissibility flags


def _hamiltonian_matrix(grid: GridSpec, A: Optional[Callable], V: Optional[Callable]) -> sp.csc_matrix:
    """Hermitian discretization of Lap_A + V on the grid interior (Dirichlet)."""
    x = grid.axis
    dx = grid.dx
    N = grid.N

    def axis_ops(Avals):
        lap = sp.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(N, N)) / dx**2
        if Avals is None:
            return lap, None
        # (A.D + D.(A .)) u : entry (j, j+1) = (A_j + A_{j+1}) / (2 dx), skew-symmetric
        upper = (Avals[:-1] + Avals[1:]) / (2.0 * dx)
        adv = sp.diags([-upper, upper], [-1, 1])
        return lap, adv

    if grid.dim == 1:
        Avals = None
        if A is not None:
            Avals = np.array([np.atleast_1d(A(np.array([xi])))[0] for xi in x])
        lap, adv = axis_ops(Avals)
        H = lap.astype(complex)
        if adv is not None:
            H = H - 1j * adv
            H = H - sp.diags(Avals**2).astype(complex)
        if V is not None:
            Vvals = np.array([complex(np.asarray(V(np.array([xi]))).reshape(-1)[0])
                              for xi in x])
            H = H + sp.diags(Vvals)
        return H.tocsc()

    # 2D: component-wise advection, Kronecker assembly
    I = sp.identity(N)
    lap1 = sp.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(N, N)) / dx**2
    H = (sp.kron(lap1, I) + sp.kron(I, lap1)).astype(complex)
    if A is not None:
        X, Y = np.meshgrid(x, x, indexing="ij")
        Ax = np.empty((N, N))
        Ay = np.empty((N, N))
        for i in range(N):
            for j in range(N):
                a = np.asarray(A(np.array([X[i, j], Y[i, j]])), dtype=float)
                Ax[i, j], Ay[i, j] = a[0], a[1]
        # skew advection along each axis with averaged coefficients
        def skew_axis(Avals, axis):
            rows, cols, vals = [], [], []
            for i in range(N):
                for j in range(N):
                    if axis == 0 and i + 1 < N:
                        c = (Avals[i, j] + Avals[i + 1, j]) / (2.0 * dx)
                        rows += [i * N + j, (i + 1) * N + j]
                        cols += [(i + 1) * N + j, i * N + j]
                        vals += [c, -c]
                    if axis == 1 and j + 1 < N:
                        c = (Avals[i, j] + Avals[i, j + 1]) / (2.0 * dx)
                        rows += [i * N + j, i * N + j + 1]
                        cols += [i * N + j + 1, i * N + j]
                        vals += [c, -c]
            return sp.csr_matrix((vals, (rows, cols)), shape=(N * N, N * N))

        H = H - 1j * (skew_axis(Ax, 0) + skew_axis(Ay, 1))
        H = H - sp.diags((Ax**2 + Ay**2).ravel()).astype(complex)
    if V is not None:
        X, Y = np.meshgrid(x, x, indexing="ij")
        Vvals = np.array([[complex(V(np.array([X[i, j], Y[i, j]]))) for j in range(N)]
                          for i in range(N)])
        H = H + sp.diags(Vvals.ravel())
    return H.tocsc()


def _boundary_mass_fraction(values: np.ndarray, dim: int) -> float:
    dens = np.abs(values) ** 2
    total = dens.sum()
    if total == 0.0:
        return 0.0
    if dim == 1:
        edge = dens[0] + dens[-1]
    else:
        edge = dens[0, :].sum() + dens[-1, :].sum() + dens[:, 0].sum() + dens[:, -1].sum()
    return float(edge / total)


def evolve_cn(u0: np.ndarray, A: Optional[Callable], V: Optional[Callable],
              grid: GridSpec, store_every: int = 1) -> tuple[np.ndarray, list[np.ndarray]]:
    """Crank-Nicolson time stepping; returns (times, states at stored steps).

    States include the initial one.  A and V are static evaluators x -> value
    (A vector-valued, V possibly complex).
    """
    u = np.asarray(u0, dtype=complex)
    shape = u.shape
    H = _hamiltonian_matrix(grid, A, V)
    Iop = sp.identity(H.shape[0], format="csc", dtype=complex)
    lhs = (Iop - 0.5j * grid.dt * H).tocsc()
    rhs = (Iop + 0.5j * grid.dt * H).tocsr()
    lu = splu(lhs)

    vec = u.ravel().copy()
    states = [vec.reshape(shape).copy()]
    times = [0.0]
    for step in range(1, grid.steps + 1):
        b = rhs @ vec
        vec = lu.solve(b)
        res = np.linalg.norm(lhs @ vec - b)
        scale = np.linalg.norm(b)
        if scale > 0 and res / scale > SOLVE_RESIDUAL:
            raise SolverDivergedError(f"step {step}: relative residual {res/scale:.2e}")
        if not np.all(np.isfinite(vec)):
            raise SolverDivergedError(f"step {step}: non-finite state")
        if _boundary_mass_fraction(vec.reshape(shape), grid.dim) > BOUNDARY_MASS_LIMIT:
            raise BoundaryMassExceededError(f"step {step}: boundary mass above limit")
        if step % store_every == 0 or step == grid.steps:
            states.append(vec.reshape(shape).copy())
            times.append(step * grid.dt)
    return np.array(times), states


def free_gaussian_oracle(a0: float, x, t: float) -> complex:
    """Closed-form solution of du/dt = i d^2u/dx^2 with u(x,0) = exp(-a0 x^2).

    u(x, t) = (1 + 4 i a0 t)^(-1/2) exp(-a0 x^2 / (1 + 4 i a0 t)).
    Verified against the PDE symbolically in the test suite before use.
    """
    if a0 <= 0.0:
        raise ValueError("a0 must be positive")
    z = 1.0 + 4.0j * a0 * t
    return z ** (-0.5) * np.exp(-a0 * np.asarray(x) ** 2 / z)


def _tail_decay_rate(values: np.ndarray, axis: np.ndarray) -> float:
    """Least-squares fit of log|u|^2 ~ -rho x^2 over the outer 10% of the grid."""
    dens = np.abs(values) ** 2
    if values.ndim == 2:
        dens = dens[values.shape[0] // 2, :]  # central slice
    n = len(axis)
    m = max(n // 10, 4)
    sel = np.r_[0:m, n - m:n]
    d = dens[sel]
    x2 = axis[sel] ** 2
    good = d > 1e-300
    if good.sum() < 4:
        return np.inf  # tail below noise floor: any finite weight integrates
    slope = np.polyfit(x2[good], np.log(d[good]), 1)[0]
    return -float(slope)


def weighted_H(wave_values: np.ndarray, L: float, a: float) -> float:
    """int exp(2 a |x|^2) |u|^2 dx by trapezoid; the weight must not outgrow the tail."""
    values = np.asarray(wave_values, dtype=complex)
    N = values.shape[0]
    axis = np.linspace(-L, L, N)
    dx = axis[1] - axis[0]
    if a > 0.0:
        rho = _tail_decay_rate(values, axis)
        if 2.0 * a >= rho:
            raise WeightExceedsDecayError(
                f"weight rate 2a={2*a:.4g} >= empirical decay rate {rho:.4g}")
    elif a < 0.0:
        raise ValueError("weight coefficient must be >= 0")
    if values.ndim == 1:
        w = np.exp(2.0 * a * axis**2)
        return float(np.trapezoid(w * np.abs(values) ** 2, dx=dx))
    r2 = axis[:, None] ** 2 + axis[None, :] ** 2
    dens = np.exp(2.0 * a * r2) * np.abs(values) ** 2
    return float(np.trapezoid(np.trapezoid(dens, dx=dx), dx=dx))


def trace_H(times: Sequence[float], states: Sequence[np.ndarray], L: float,
            weight: Callable[[float], float]) -> EvolutionTrace:
    """Sample H(t) = ||exp(a(t)|x|^2) u(t)||^2 along an evolution."""
    times = np.asarray(times, dtype=float)
    Hs = np.empty(len(times))
    norms = np.empty(len(times))
    flags = np.ones(len(times), dtype=bool)
    for i, (t, u) in enumerate(zip(times, states)):
        norms[i] = weighted_H(u, L, 0.0)
        try:
            Hs[i] = weighted_H(u, L, float(weight(t)))
        except WeightExceedsDecayError as exc:
            raise WeightExceedsDecayError(f"t={t}: {exc}") from exc
    return EvolutionTrace(times, Hs, norms, flags)


def log_convexity_scan(trace: EvolutionTrace) -> float:
    """Min over interior times of the second difference of log H (uniform grid)."""
    H = np.asarray(trace.H, dtype=float)
    if np.any(H <= 0.0):
        raise ValueError("trace must be strictly positive")
    lg = np.log(H)
    return float(np.min(lg[:-2] - 2.0 * lg[1:-1] + lg[2:]))
