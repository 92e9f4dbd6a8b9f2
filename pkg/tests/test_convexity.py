"""Weight-profile iteration, closed-form limits, and the interpolation bound."""

from __future__ import annotations

import numpy as np
import pytest

from hardylab import convexity as cx
from hardylab.errors import NoRealRootError, NonPositiveFError


def test_fd_weights_classic_five_point():
    w = cx.fd_weights(0.0, np.arange(-2.0, 3.0), 1)
    assert np.allclose(w, [1 / 12, -2 / 3, 0.0, 2 / 3, -1 / 12], atol=1e-14)


def test_derivative_exact_on_polynomials():
    t = cx.make_grid(65)
    assert np.max(np.abs(cx.derivative(t ** 3, t, 1) - 3 * t ** 2)) < 1e-10
    assert np.max(np.abs(cx.derivative(t ** 3, t, 2) - 6 * t)) < 1e-8


def test_F_of_constant_profile():
    mu = 0.1
    prof = cx.WeightProfile.constant(mu, 257)
    F = cx.F_of(prof)
    assert np.max(np.abs(F - 32 * mu ** 2)) < 1e-10


def test_F_of_limit_profile_vanishes():
    prof = cx.limit_profile(0.1, 513)
    assert np.max(np.abs(cx.F_of(prof))) < 1e-7


def test_F_positive_on_second_iterate():
    prof = cx.WeightProfile.constant(0.1, 513)
    nxt = cx.iterate_step(prof, cx.solve_b(prof))
    assert np.min(cx.F_of(nxt)) > 0.0


def test_solve_b_closed_form():
    mu = 0.1
    prof = cx.WeightProfile.constant(mu, 513)
    curve = cx.solve_b(prof)
    want = 16 * mu * (1 - curve.t ** 2)
    assert np.max(np.abs(curve.b - want)) < 1e-10


def test_b_shape_properties():
    # second iterate from mu = 0.1: strictly positive F, generic shape
    start = cx.WeightProfile.constant(0.1, 513)
    prof = cx.iterate_step(start, cx.solve_b(start))
    curve = cx.solve_b(prof)
    n = len(curve.t)
    assert abs(curve.b[0]) < 1e-14 and abs(curve.b[-1]) < 1e-14
    assert np.max(np.abs(curve.b - curve.b[::-1])) < 1e-12  # even
    assert np.min(curve.b) >= -1e-14
    half = curve.b[n // 2:]
    assert np.all(np.diff(half) <= 1e-14)  # nonincreasing on [0, 1]


def test_solve_b_rejects_nonpositive_F():
    t = cx.make_grid(129)
    prof = cx.WeightProfile(t, 0.2 + 0.1 * t ** 2)  # increasing away from 0: F < 0 somewhere
    if np.min(cx.F_of(prof)) < 0:
        with pytest.raises(NonPositiveFError):
            cx.solve_b(prof)


def test_gate_values():
    for mu, want in [(0.1, 0.84), (0.25, 0.0), (0.125, 0.75)]:
        prof = cx.WeightProfile.constant(mu, 513)
        g = cx.gate(prof, cx.solve_b(prof))
        assert g == pytest.approx(want, abs=1e-10)


def test_iterate_step_values_and_monotonicity():
    mu = 0.1
    prof = cx.WeightProfile.constant(mu, 513)
    nxt = cx.iterate_step(prof, cx.solve_b(prof))
    mid = nxt.center_index
    assert nxt.a[0] == pytest.approx(mu, abs=1e-12)
    assert nxt.a[-1] == pytest.approx(mu, abs=1e-12)
    assert nxt.a[mid] == pytest.approx(mu / 0.84, abs=1e-10)
    assert np.all(nxt.a >= prof.a - 1e-14)


def test_c_form_consistency():
    # c_{k+1} = (c_k^2 - b_k)^{1/2} with c = a^{-1/2}
    prof = cx.WeightProfile.constant(0.1, 513)
    curve = cx.solve_b(prof)
    nxt = cx.iterate_step(prof, curve)
    c_next = np.sqrt(1.0 / prof.a - curve.b)
    assert np.max(np.abs(1.0 / np.sqrt(nxt.a) - c_next)) < 1e-10


def test_run_iteration_converged():
    verdict = cx.run_iteration(0.1)
    assert verdict.kind == "Converged"
    limit = cx.limit_profile(0.1, 513)
    assert np.max(np.abs(verdict.profile.a - limit.a)) < 1e-5


def test_run_iteration_gate_closed():
    for mu in (0.25, 0.3, 0.5):
        verdict = cx.run_iteration(mu)
        assert verdict.kind == "GateClosed"
        assert verdict.k == 1


def test_run_iteration_mu_point_two_not_converged():
    verdict = cx.run_iteration(0.2)
    assert verdict.kind in ("GateClosed", "Unbounded")


def test_iterates_stay_even_and_decreasing():
    verdict = cx.run_iteration(0.1, store_history=True)
    t = cx.make_grid(513)
    for a in verdict.history:
        assert np.max(np.abs(a - a[::-1])) < 1e-10
        half = a[len(a) // 2:]
        assert np.all(np.diff(half) <= 1e-12)


def test_smallest_root():
    assert cx.smallest_root_R(0.125) == pytest.approx(1.0, abs=1e-12)
    assert cx.smallest_root_R(0.1) == pytest.approx(0.5, abs=1e-12)
    with pytest.raises(NoRealRootError):
        cx.smallest_root_R(0.2)


def test_limit_profile_endpoints():
    for mu in (0.05, 0.1, 0.125):
        prof = cx.limit_profile(mu, 257)
        assert float(prof.a[0]) == pytest.approx(mu, abs=1e-14)
        assert float(prof.a[-1]) == pytest.approx(mu, abs=1e-14)
    assert float(cx.limit_profile(0.125, 257).a[128]) == pytest.approx(0.25, abs=1e-14)


def test_theorem2_profile():
    t, a, R = cx.theorem2_profile(2.0, 2.0)
    assert R == pytest.approx(1.0, abs=1e-12)
    assert a[len(a) // 2] == pytest.approx(0.5, abs=1e-12)
    assert a[0] == pytest.approx(0.25, abs=1e-12)
    assert a[-1] == pytest.approx(0.25, abs=1e-12)


def test_theorem2_rejects_small_product():
    with pytest.raises(NoRealRootError):
        cx.theorem2_profile(1.0, 2.0)


def test_hardy_verdict():
    assert cx.hardy_verdict(1.0, 2.0)["verdict"] == "MustVanish"
    assert cx.hardy_verdict(1.0, 3.0)["verdict"] == "MustVanish"
    res = cx.hardy_verdict(2.0, 2.0)
    assert res["verdict"] == "Profile"
    assert res["R"] == pytest.approx(1.0, abs=1e-12)
    assert res["a_endpoints"] == pytest.approx([0.25, 0.25], abs=1e-12)


def test_solve_T_zero_source():
    t = cx.make_grid(257)
    T = cx.solve_T(np.ones_like(t), np.zeros_like(t), t)
    assert np.max(np.abs(T)) < 1e-14


def test_solve_T_constant_coefficients():
    # gamma = 1/mu, psi = psi0: T = (mu psi0 / 2)(1 - t^2)
    mu, psi0 = 0.3, 1.7
    t = cx.make_grid(513)
    T = cx.solve_T(np.full_like(t, 1.0 / mu), np.full_like(t, psi0), t)
    want = 0.5 * mu * psi0 * (1 - t ** 2)
    assert np.max(np.abs(T - want)) < 1e-10


def test_theta_constant_gamma():
    t = cx.make_grid(257)
    th = cx.theta(np.ones_like(t), t)
    assert np.max(np.abs(th - (1 - t) / 2)) < 1e-12
    assert th[0] == pytest.approx(1.0) and th[-1] == pytest.approx(0.0, abs=1e-14)


def test_theta_monotone_for_limit_profile():
    prof = cx.limit_profile(0.1, 257)
    t = np.asarray(prof.t, dtype=float)
    th = cx.theta(1.0 / np.asarray(prof.a, dtype=float), t)
    assert np.all(np.diff(th) < 0)


def test_bound_check_log_affine_equality():
    t = cx.make_grid(257)
    H = np.exp(0.7 * t + 0.2)
    th = cx.theta(np.ones_like(t), t)
    slack = cx.convexity_bound_check(H, 0.0, 0.0, 0.0, th, eps=0.0)
    assert abs(slack) < 1e-12


def test_bound_check_constant_H_nonnegative():
    t = cx.make_grid(129)
    H = np.full_like(t, 3.0)
    th = cx.theta(np.ones_like(t), t)
    assert cx.convexity_bound_check(H, 0.5, 0.0, 0.0, th, eps=0.0) >= 0.0


def test_env_constants():
    from hardylab import gauge

    field = gauge.landau_field(1.0)
    corners = [np.array(p) for p in
               [(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0), (0.0, 0.0)]]
    env = cx.env_constants(field, lambda x: 2.0, corners)
    assert env.M_B == pytest.approx(4.0, abs=1e-10)
    assert env.M_V == pytest.approx(5.0, abs=1e-12)
    env0 = cx.env_constants(field, lambda x: 0.0, corners)
    assert env0.M_V == 0.0
