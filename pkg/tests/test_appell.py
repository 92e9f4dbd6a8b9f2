"""Pseudoconformal transform of waves and potentials, rescalings, norm chain."""

from __future__ import annotations

import numpy as np
import pytest

from hardylab import appell, propagator
from hardylab.errors import OutOfDomainError


def _gaussian_wave(a0, L, N, t):
    return appell.sample_wave(lambda x, s: propagator.free_gaussian_oracle(a0, x, s),
                              L, N, t)


def test_mu_of():
    assert appell.mu_of(appell.AlphaBeta(2.0, 2.0)) == pytest.approx(0.125)
    assert appell.mu_of(appell.AlphaBeta(1.0, 2.0)) == pytest.approx(0.25)
    assert appell.mu_of(appell.AlphaBeta(2.0, 2.5)) == pytest.approx(0.1)


def test_source_time_endpoints():
    ab = appell.AlphaBeta(3.0, 2.0)
    assert appell.source_time(ab, 0.0) == pytest.approx(0.0)
    assert appell.source_time(ab, 1.0) == pytest.approx(1.0)


def test_equal_scales_is_bitwise_identity():
    ab = appell.AlphaBeta(2.0, 2.0)
    src = _gaussian_wave(1.0, 12.0, 1024, appell.source_time(ab, 0.5))
    out, clipped = appell.appell_wave(src, ab, 0.5)
    assert np.array_equal(out.values, src.values)
    assert clipped == 0.0


def test_plain_norm_preserved():
    ab = appell.AlphaBeta(4.0, 2.5)
    t = 0.3
    src = _gaussian_wave(1.0, 12.0, 2048, appell.source_time(ab, t))
    out, _ = appell.appell_wave(src, ab, t)
    assert np.sqrt(out.norm2()) == pytest.approx(np.sqrt(src.norm2()), rel=1e-6)


def test_weighted_identity_at_zero():
    ab = appell.AlphaBeta(4.0, 2.5)
    src = _gaussian_wave(1.0, 12.0, 1024, 0.0)
    out, _ = appell.appell_wave(src, ab, 0.0)
    lhs = np.sqrt(out.weighted_norm2(1.0 / (ab.alpha * ab.beta)))
    rhs = np.sqrt(src.weighted_norm2(1.0 / ab.beta ** 2))
    assert lhs == pytest.approx(rhs, rel=1e-6)


def test_time_stamp_mismatch_rejected():
    ab = appell.AlphaBeta(4.0, 2.5)
    src = _gaussian_wave(1.0, 12.0, 1024, 0.1)  # not source_time(ab, 0.5)
    with pytest.raises(OutOfDomainError):
        appell.appell_wave(src, ab, 0.5)


def test_appell_potentials_equal_scales():
    ab = appell.AlphaBeta(2.0, 2.0)
    A = lambda y, s: np.array([y, -y])
    V = lambda y, s: 3.0 * y
    F = lambda y, s: 1.0 + 2j * y
    At, Vt, Ft = appell.appell_potentials(A, V, F, ab)
    for x, t in [(0.4, 0.2), (-1.1, 0.7)]:
        assert np.allclose(At(x, t), A(x, t))
        assert Vt(x, t) == pytest.approx(V(x, t))


def test_appell_potentials_constant_V():
    ab = appell.AlphaBeta(3.0, 1.5)
    c = 2.0
    _, Vt, _ = appell.appell_potentials(lambda y, s: 0.0 * y, lambda y, s: c,
                                        lambda y, s: 0.0, ab)
    for t in (0.0, 0.4, 1.0):
        D = ab.alpha * (1 - t) + ab.beta * t
        assert Vt(0.3, t) == pytest.approx(c * ab.alpha * ab.beta / D ** 2)


def test_transformed_gaussian_solves_free_equation():
    # FD residual of i v_t + v_xx = 0 on the transformed free Gaussian, O(h^2)
    ab = appell.AlphaBeta(3.0, 2.0)
    a0 = 1.0

    def v(x, t):
        D = ab.alpha * (1 - t) + ab.beta * t
        s = appell.source_time(ab, t)
        scale = np.sqrt(ab.alpha * ab.beta) / D
        phase = np.exp((ab.alpha - ab.beta) * x ** 2 / (4j * D))
        return np.sqrt(scale) * propagator.free_gaussian_oracle(a0, scale * x, s) * phase

    def residual(x, t, h):
        vt = (v(x, t + h) - v(x, t - h)) / (2 * h)
        vxx = (v(x + h, t) - 2 * v(x, t) + v(x - h, t)) / h ** 2
        return 1j * vt + vxx

    x, t = 0.7, 0.4
    r1, r2 = abs(residual(x, t, 1e-2)), abs(residual(x, t, 5e-3))
    assert r1 / max(r2, 1e-14) > 3.0  # order-2 convergence toward zero


def test_to_symmetric_interval_constant():
    w = appell.SampledWave(10.0, np.ones(512, dtype=complex), time=0.5)
    v = appell.to_symmetric_interval(w, 0.0)
    assert np.allclose(v.values, 2.0 ** -0.25)
    assert v.time == pytest.approx(0.0)


def test_to_symmetric_interval_norm():
    src = _gaussian_wave(1.0, 12.0, 2048, 0.5)
    v = appell.to_symmetric_interval(src, 0.0)
    assert np.sqrt(v.norm2()) == pytest.approx(np.sqrt(src.norm2()), rel=1e-6)


def test_scale_to_unit_time():
    ab = appell.AlphaBeta(2.0, 3.0)
    v = lambda x, s: np.exp(-np.asarray(x) ** 2)
    u, ab2 = appell.scale_to_unit_time(v, 4.0, ab)
    x = np.linspace(-3, 3, 101)
    assert np.allclose(u(x, 0.0), np.sqrt(2.0) * np.exp(-4 * x ** 2))
    assert ab2.alpha == pytest.approx(1.0)
    assert ab2.beta == pytest.approx(1.5)
    # T = 1 is the identity
    u1, ab1 = appell.scale_to_unit_time(v, 1.0, ab)
    assert np.allclose(u1(x, 0.3), v(x, 0.3))
    assert (ab1.alpha, ab1.beta) == (ab.alpha, ab.beta)


def test_scale_norm_identity():
    # ||e^{|x|^2/beta^2} v(0)|| = ||e^{|x|^2/beta'^2} u(0)|| with beta' = beta/sqrt(T)
    ab = appell.AlphaBeta(2.0, 3.0)
    T = 4.0
    v = lambda x, s: np.exp(-np.asarray(x) ** 2)
    u, ab2 = appell.scale_to_unit_time(v, T, ab)
    L, N = 10.0, 4096
    wv = appell.sample_wave(v, L, N, 0.0)
    wu = appell.sample_wave(lambda x, t: u(x, t), L / np.sqrt(T), N, 0.0)
    lhs = np.sqrt(wv.weighted_norm2(1.0 / ab.beta ** 2))
    rhs = np.sqrt(wu.weighted_norm2(1.0 / ab2.beta ** 2))
    assert lhs == pytest.approx(rhs, rel=1e-8)


def test_round_trip_symmetric_interval():
    src = _gaussian_wave(1.0, 12.0, 2048, 0.5)
    v = appell.to_symmetric_interval(src, 0.0)
    # invert by hand: u(x, s) = 2^{n/4} v(sqrt(2) x, 2s - 1)
    x = src.axis
    interp = v.interpolator()
    xs = np.sqrt(2.0) * x
    inside = np.abs(xs) <= v.L
    back = 2.0 ** 0.25 * interp(xs[inside])
    assert np.max(np.abs(back - src.values[inside])) < 1e-6
