"""Gaussian weight-profile machinery: the convexity functional F(a), the
shift-curve two-point problem, the multiplicative iteration and its verdicts,
the closed-form limit profiles, and the abstract log-convexity ingredients
(T, theta, the interpolation bound, the environment constants M_B, M_V).

Profiles live on a uniform symmetric node grid on [-1, 1] with an odd number
of nodes (so t = 0 is a node).  Evenness of every constructed object is
enforced structurally by computing on [0, 1] and mirroring.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import cumulative_simpson

from .errors import (
    GateClosedError,
    IterationBudgetExceededError,
    NonPositiveFError,
    NonPositiveProfileError,
    NoRealRootError,
)


# -- finite differences --------------------------------------------------------

def fd_weights(x0: float, nodes: np.ndarray, m: int) -> np.ndarray:
    """Fornberg weights for the m-th derivative at x0 on the given nodes."""
    n = len(nodes)
    w = np.zeros((n, m + 1), dtype=np.asarray(nodes).dtype)
    w[0, 0] = 1.0
    c1 = 1.0
    c4 = nodes[0] - x0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = nodes[i] - x0
        for j in range(i):
            c3 = nodes[i] - nodes[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    w[i, k] = c1 * (k * w[i - 1, k - 1] - c5 * w[i - 1, k]) / c2
                w[i, 0] = -c1 * c5 * w[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                w[j, k] = (c4 * w[j, k] - k * w[j, k - 1]) / c3
            w[j, 0] = c4 * w[j, 0] / c3
        c1 = c2
    return w[:, m]


def derivative(values: np.ndarray, t: np.ndarray, order: int) -> np.ndarray:
    """Order-4 finite-difference derivative on a uniform grid (one-sided at edges).

    Evaluated in extended precision with the center value subtracted first,
    so the subtractive cancellation of the stencil (weights ~ 1/h^2) does not
    swamp the h^4 truncation term on fine grids; constants differentiate to
    exactly zero.
    """
    n = len(t)
    width = 5 if order == 1 else 6
    tl = np.asarray(t, dtype=np.longdouble)
    vals = np.asarray(values, dtype=np.longdouble) - np.longdouble(values[n // 2])
    out = np.empty(n, dtype=np.asarray(values).dtype)
    half = width // 2
    for i in range(n):
        lo = min(max(i - half, 0), n - width)
        sel = slice(lo, lo + width)
        out[i] = fd_weights(tl[i], tl[sel], order) @ vals[sel]
    return out


# -- profiles and curves -------------------------------------------------------

def make_grid(nodes: int = 513, interval=(-1.0, 1.0)) -> np.ndarray:
    if nodes < 3 or nodes % 2 == 0:
        raise ValueError("node count must be odd and >= 3")
    return np.linspace(interval[0], interval[1], nodes)


@dataclass
class WeightProfile:
    """An even, positive weight coefficient a(t) sampled on a symmetric grid."""

    t: np.ndarray
    a: np.ndarray

    def __post_init__(self):
        # keep extended-precision inputs as-is (used by cancellation studies)
        self.t = np.asarray(self.t)
        self.a = np.asarray(self.a)
        if self.t.dtype != np.longdouble:
            self.t = self.t.astype(float)
        if self.a.dtype != np.longdouble:
            self.a = self.a.astype(float)
        if np.any(self.a <= 0.0):
            raise NonPositiveProfileError("profile must be strictly positive")

    @classmethod
    def constant(cls, mu: float, nodes: int = 513) -> "WeightProfile":
        t = make_grid(nodes)
        return cls(t, np.full(nodes, float(mu)))

    @classmethod
    def from_function(cls, f: Callable[[np.ndarray], np.ndarray], nodes: int = 513) -> "WeightProfile":
        t = make_grid(nodes)
        return cls(t, np.asarray(f(t), dtype=float))

    @property
    def center_index(self) -> int:
        return len(self.t) // 2

    @property
    def gamma(self) -> np.ndarray:
        return 1.0 / self.a

    def deriv(self) -> np.ndarray:
        return derivative(self.a, self.t, 1)

    def deriv2(self) -> np.ndarray:
        return derivative(self.a, self.t, 2)

    def evenness_defect(self) -> float:
        return float(np.max(np.abs(self.a - self.a[::-1])))


@dataclass
class ShiftCurve:
    """Shift magnitude b(t) of the Gaussian center, vanishing at t = +-1."""

    t: np.ndarray
    b: np.ndarray
    xi: Optional[np.ndarray] = None  # privileged unit direction, configuration only


@dataclass
class EnvConstants:
    M_B: float
    M_V: float


@dataclass
class IterationState:
    k: int
    profile: WeightProfile
    curve: ShiftCurve
    gate: float


@dataclass
class Verdict:
    kind: str  # "Converged" | "GateClosed" | "Unbounded"
    k: int
    profile: Optional[WeightProfile] = None
    history: list = field(default_factory=list)


# -- the functional and the iteration ------------------------------------------

def F_of(profile: WeightProfile) -> np.ndarray:
    """F(a) = (1/a) (a'' + 32 a^3 - 3 a'^2 / (2a)) sampled on the grid."""
    a = profile.a
    if np.any(a <= 0.0):
        raise NonPositiveProfileError("F(a) requires a > 0")
    da = profile.deriv()
    dda = profile.deriv2()
    return (dda + 32.0 * a**3 - 1.5 * da**2 / a) / a


def _mirror_even(half: np.ndarray) -> np.ndarray:
    """Assemble a full even array from its [0, 1] half (center included)."""
    return np.concatenate([half[::-1][:-1], half])


def solve_b(profile: WeightProfile) -> ShiftCurve:
    """b(t) = int_t^1 int_0^s F(a(tau))/a(tau) dtau ds; even, b(+-1) = 0.

    F(a) must be positive; the nested quadrature is composite Simpson on the
    node grid, computed on [0, 1] and mirrored so evenness is exact.
    """
    Fv = F_of(profile)
    if np.any(Fv <= 0.0):
        raise NonPositiveFError("solve_b requires F(a) > 0 on the grid")
    g = Fv / profile.a
    m = profile.center_index
    th = profile.t[m:]
    gh = g[m:]
    # G(s) = int_0^s g, then b(t) = int_t^1 G(s) ds, both on the half grid
    G = cumulative_simpson(gh, x=th, initial=0.0)
    tail = cumulative_simpson(G[::-1], x=-th[::-1], initial=0.0)[::-1]
    return ShiftCurve(profile.t, _mirror_even(tail))


# Quadrature rounding in b(0) is a few ulp; a gate this close to 0 is closed.
GATE_TOL = 1e-12


def gate(profile: WeightProfile, curve: ShiftCurve) -> float:
    """1 - a(0) b(0): nonpositive forces u == 0 and stops the scheme."""
    m = profile.center_index
    return 1.0 - profile.a[m] * curve.b[m]


def iterate_step(profile: WeightProfile, curve: ShiftCurve) -> WeightProfile:
    """Multiplicative update a -> a / (1 - a b); endpoints unchanged."""
    denom = 1.0 - profile.a * curve.b
    if np.any(denom <= 0.0):
        raise GateClosedError("1 - a b <= 0 at a node")
    return WeightProfile(profile.t, profile.a / denom)


def run_iteration(mu: float, tol: float = 1e-8, k_max: int = 200,
                  a_cap: Optional[float] = None, nodes: int = 513,
                  store_history: bool = True) -> Verdict:
    """Iterate from a_1 == mu until a fixed point, a closed gate, or blow-up.

    Verdicts: Converged (sup-norm change < tol), GateClosed (1 - a(0) b(0) <= 0,
    the solution must vanish), Unbounded (a(0) exceeded the cap, reported as
    divergence at a threshold).  Raises after k_max steps with no verdict.
    """
    if mu <= 0.0:
        raise ValueError("mu must be positive")
    if a_cap is None:
        a_cap = 1e6 * mu
    profile = WeightProfile.constant(mu, nodes)
    history = [profile.a.copy()] if store_history else []
    for k in range(1, k_max + 1):
        curve = solve_b(profile)
        g = gate(profile, curve)
        if g <= GATE_TOL:
            return Verdict("GateClosed", k, profile, history)
        nxt = iterate_step(profile, curve)
        if store_history:
            history.append(nxt.a.copy())
        if nxt.a[nxt.center_index] > a_cap:
            return Verdict("Unbounded", k + 1, nxt, history)
        if float(np.max(np.abs(nxt.a - profile.a))) < tol:
            return Verdict("Converged", k + 1, nxt, history)
        profile = nxt
    raise IterationBudgetExceededError(f"no verdict after {k_max} steps")


def smallest_root_R(mu: float) -> float:
    """Smaller positive root of mu = R / (4 (1 + R^2)), in cancellation-safe form."""
    if not 0.0 < mu <= 0.125:
        raise NoRealRootError("real roots require 0 < mu <= 1/8")
    return 8.0 * mu / (1.0 + np.sqrt(1.0 - 64.0 * mu * mu))


def limit_profile(mu: float, nodes: int = 513) -> WeightProfile:
    """Closed-form fixed point a(t) = R / (4 (1 + R^2 t^2)) on [-1, 1].

    Evaluated in extended precision so that F(limit_profile) measures the
    discretization error of the derivatives, not input rounding.
    """
    R = np.longdouble(smallest_root_R(mu))
    t = make_grid(nodes).astype(np.longdouble)
    return WeightProfile(t, R / (4.0 * (1.0 + R * R * t * t)))


def theorem2_profile(alpha: float, beta: float, nodes: int = 513):
    """Interior weight profile on [0, 1] for decay scales alpha (at t=1), beta (at t=0).

    a(t) = alpha beta R / (2 (alpha t + beta (1-t))^2 + 2 R^2 (alpha t - beta (1-t))^2),
    with R the smaller root of 1/(2 alpha beta) = R / (4 (1 + R^2)); requires
    alpha * beta >= 4.  Endpoints are 1/beta^2 and 1/alpha^2.
    Returns (t, a, R).
    """
    if alpha <= 0.0 or beta <= 0.0:
        raise ValueError("alpha and beta must be positive")
    if alpha * beta < 4.0:
        raise NoRealRootError("alpha * beta < 4: no real root / no profile")
    R = smallest_root_R(1.0 / (2.0 * alpha * beta))
    t = np.linspace(0.0, 1.0, nodes)
    p = alpha * t + beta * (1.0 - t)
    q = alpha * t - beta * (1.0 - t)
    a = alpha * beta * R / (2.0 * p * p + 2.0 * R * R * q * q)
    return t, a, R


def hardy_verdict(alpha: float, beta: float, nodes: int = 513) -> dict:
    """alpha*beta < 4 forces the solution to vanish; otherwise the weight profile."""
    if alpha <= 0.0 or beta <= 0.0:
        raise ValueError("alpha and beta must be positive")
    if alpha * beta < 4.0:
        return {"verdict": "MustVanish"}
    t, a, R = theorem2_profile(alpha, beta, nodes)
    return {"verdict": "Profile", "R": R, "t": t, "a": a,
            "a_endpoints": [1.0 / beta**2, 1.0 / alpha**2]}


# -- abstract log-convexity ingredients -----------------------------------------

def solve_T(gamma: np.ndarray, psi: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Solve d/dt (gamma dT/dt) = -psi on [c, d] with T(c) = T(d) = 0.

    gamma > 0.  Integrating once gives gamma T' = C - Psi with Psi the
    antiderivative of psi; C is fixed by the far boundary condition.
    """
    gamma = np.asarray(gamma, dtype=float)
    psi = np.asarray(psi, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(gamma <= 0.0):
        raise ValueError("gamma must be positive")
    Psi = cumulative_simpson(psi, x=t, initial=0.0)
    inv_g = 1.0 / gamma
    num = cumulative_simpson(Psi * inv_g, x=t, initial=0.0)
    den = cumulative_simpson(inv_g, x=t, initial=0.0)
    C = num[-1] / den[-1]
    T = cumulative_simpson((C - Psi) * inv_g, x=t, initial=0.0)
    T[-1] = 0.0  # exact by the choice of C, up to rounding
    return T


def theta(gamma: np.ndarray, t: np.ndarray) -> np.ndarray:
    """theta(t) = int_t^d ds/gamma / int_c^d ds/gamma; 1 at c, 0 at d."""
    gamma = np.asarray(gamma, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(gamma <= 0.0):
        raise ValueError("gamma must be positive")
    cum = cumulative_simpson(1.0 / gamma, x=t, initial=0.0)
    return (cum[-1] - cum) / cum[-1]


def convexity_bound_check(H: np.ndarray, T, M, N, th: np.ndarray, eps: float) -> float:
    """Minimum slack of log(H + eps) against the interpolation bound.

    Bound: H(t) + eps <= exp(2T + M + 2N) (H(c)+eps)^theta (H(d)+eps)^(1-theta).
    Returns min over nodes of log(RHS) - log(H + eps); >= 0 means it holds.
    """
    H = np.asarray(H, dtype=float)
    T = np.broadcast_to(np.asarray(T, dtype=float), H.shape)
    M = np.broadcast_to(np.asarray(M, dtype=float), H.shape)
    th = np.asarray(th, dtype=float)
    log_rhs = (2.0 * T + M + 2.0 * float(N)
               + th * np.log(H[0] + eps) + (1.0 - th) * np.log(H[-1] + eps))
    return float(np.min(log_rhs - np.log(H + eps)))


def env_constants(field, V: Callable[[np.ndarray], complex], samples) -> EnvConstants:
    """M_B = 2 sup|x^t B|^2 and M_V = 2 sup|V| + sup|V|^2 / 4 over the samples.

    Sample suprema only, so both are lower bounds of the true constants.
    """
    from .gauge import x_t_B

    max_psi = 0.0
    max_v = 0.0
    for x in samples:
        x = np.asarray(x, dtype=float)
        max_psi = max(max_psi, float(np.linalg.norm(x_t_B(field, x))))
        max_v = max(max_v, abs(complex(V(x))))
    return EnvConstants(M_B=2.0 * max_psi**2, M_V=2.0 * max_v + max_v**2 / 4.0)
