"""Transverse (Cronstrom) gauge reduction x . A(x) = 0.

Given a vector potential A with field matrix B = DA - DA^t, subtracting the
gradient of

    phi(x) = x . int_0^1 A(s x) ds

produces the transverse representative.  Differentiating phi directly gives
the closed form actually implemented here,

    A~_k(x) = int_0^1 s * sum_j x_j B_{jk}(s x) ds,

which satisfies x . A~(x) = 0 by antisymmetry of B and leaves the field
matrix unchanged.  (The equivalent form in terms of Psi(y) = y^t B(y) is
A~(x) = + int_0^1 Psi(s x) ds; the Landau-field closed form pins the sign.)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import NonFiniteSampleError


@dataclass
class PotentialField:
    """A static vector potential with optional analytic Jacobian.

    jacobian(x)[i, j] = dA^i / dx_j.  Without one, central differences with
    step h_J = h_j_scale * (1 + |x|) are used.
    """

    n: int
    A: Callable[[np.ndarray], np.ndarray]
    jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    h_j_scale: float = 1e-5

    def eval(self, x) -> np.ndarray:
        v = np.asarray(self.A(np.asarray(x, dtype=float)), dtype=float)
        if not np.all(np.isfinite(v)):
            raise NonFiniteSampleError(f"A({x}) is not finite")
        return v

    def jac(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.jacobian is not None:
            return np.asarray(self.jacobian(x), dtype=float)
        h = self.h_j_scale * (1.0 + float(np.linalg.norm(x)))
        J = np.empty((self.n, self.n))
        for j in range(self.n):
            e = np.zeros(self.n)
            e[j] = h
            J[:, j] = (self.eval(x + e) - self.eval(x - e)) / (2.0 * h)
        return J

    def field_matrix(self, x) -> np.ndarray:
        """B(x) with B_{jk} = dA^k/dx_j - dA^j/dx_k (antisymmetric)."""
        J = self.jac(x)
        return J.T - J


def compute_phi(field: PotentialField, x, nodes: int = 64) -> float:
    """phi(x) = x . int_0^1 A(s x) ds by Gauss-Legendre quadrature on [0, 1]."""
    x = np.asarray(x, dtype=float)
    s, w = _gauss01(nodes)
    acc = np.zeros(field.n)
    for si, wi in zip(s, w):
        acc += wi * field.eval(si * x)
    return float(x @ acc)


def x_t_B(field: PotentialField, x) -> np.ndarray:
    """Psi(x) = x^t B(x), the row contraction of the field matrix."""
    x = np.asarray(x, dtype=float)
    return x @ field.field_matrix(x)


def cronstrom_transform(field: PotentialField, x, nodes: int = 64, tol: float = 1e-10,
                        max_doublings: int = 6) -> np.ndarray:
    """Transverse representative A~(x), with quadrature nodes doubled to tolerance."""
    x = np.asarray(x, dtype=float)
    prev = None
    for _ in range(max_doublings + 1):
        s, w = _gauss01(nodes)
        acc = np.zeros(field.n)
        for si, wi in zip(s, w):
            acc += wi * si * (x @ field.field_matrix(si * x))
        if prev is not None and np.max(np.abs(acc - prev)) <= tol:
            return acc
        prev = acc
        nodes *= 2
    return prev


def transformed_field(field: PotentialField, nodes: int = 64) -> PotentialField:
    """Wrap the transverse representative as a field of its own (FD Jacobian)."""
    return PotentialField(field.n, lambda x: cronstrom_transform(field, x, nodes=nodes))


def verify_gauge(field: PotentialField, transformed: PotentialField, samples) -> dict:
    """Max over samples of |x . A~(x)| and of the field-matrix change ||B~ - B||."""
    max_transverse = 0.0
    max_field_dev = 0.0
    for x in samples:
        x = np.asarray(x, dtype=float)
        At = transformed.eval(x)
        max_transverse = max(max_transverse, abs(float(x @ At)))
        dev = np.max(np.abs(transformed.field_matrix(x) - field.field_matrix(x)))
        max_field_dev = max(max_field_dev, float(dev))
    return {"max_x_dot_A": max_transverse, "max_field_matrix_dev": max_field_dev}


def _gauss01(nodes: int):
    s, w = np.polynomial.legendre.leggauss(nodes)
    return 0.5 * (s + 1.0), 0.5 * w


# -- field presets ------------------------------------------------------------

def landau_field(b0: float = 1.0) -> PotentialField:
    """2D Landau gauge A = (0, b0 x)."""
    return PotentialField(
        2,
        lambda x: np.array([0.0, b0 * x[0]]),
        jacobian=lambda x: np.array([[0.0, 0.0], [b0, 0.0]]),
    )


def symmetric_field(b0: float = 1.0) -> PotentialField:
    """2D symmetric gauge A = (-b0 y / 2, b0 x / 2); already transverse."""
    return PotentialField(
        2,
        lambda x: np.array([-0.5 * b0 * x[1], 0.5 * b0 * x[0]]),
        jacobian=lambda x: np.array([[0.0, -0.5 * b0], [0.5 * b0, 0.0]]),
    )


def gradient_field() -> PotentialField:
    """Pure gradient A = grad(x^2 y); zero field matrix, transverse part 0."""
    return PotentialField(
        2,
        lambda x: np.array([2.0 * x[0] * x[1], x[0] ** 2]),
        jacobian=lambda x: np.array([[2.0 * x[1], 2.0 * x[0]], [2.0 * x[0], 0.0]]),
    )


def theorem1_field(t: float = 1.0, k: float = 2.0) -> PotentialField:
    """The closed-form 3D example potential frozen at one time; transverse already."""
    from .exact_example import eval_potential_A

    return PotentialField(3, lambda x: eval_potential_A(x, t, k))


def random_degree2_field(seed: int, n: int = 3) -> PotentialField:
    """Random polynomial potential of degree 2 with analytic Jacobian."""
    rng = np.random.default_rng(seed)
    c0 = rng.uniform(-1.0, 1.0, size=n)
    c1 = rng.uniform(-1.0, 1.0, size=(n, n))
    c2 = rng.uniform(-1.0, 1.0, size=(n, n, n))
    c2 = 0.5 * (c2 + np.swapaxes(c2, 1, 2))  # symmetric in the quadratic slots

    def A(x):
        return c0 + c1 @ x + np.einsum("ijk,j,k->i", c2, x, x)

    def jac(x):
        return c1 + 2.0 * np.einsum("ijk,k->ij", c2, x)

    return PotentialField(n, A, jacobian=jac)


FIELD_PRESETS = {
    "landau": landau_field,
    "symmetric": symmetric_field,
    "gradient": gradient_field,
    "theorem1-at-t": theorem1_field,
}
