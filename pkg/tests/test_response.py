import numpy as np
import pytest
from scipy.integrate import solve_ivp

from fermibath import (DegenerateRootsError, ModelParams, ResonancePoleError,
                       amplitude, amplitude_derivative, amplitude_sq,
                       bath_response, bath_response_derivative,
                       characteristic_residual, compute_roots, memory_kernel,
                       memory_kernel_integral)


def params(**kw):
    base = dict(Omega=1.0, g0=0.1, gamma=12.0, T=1.0)
    base.update(kw)
    return ModelParams(**base)


def test_roots_decoupled_limit():
    r = compute_roots(params(g0=0.0))
    assert r.z1 == pytest.approx(-12.0, abs=1e-14)
    assert r.z2 == pytest.approx(1j, abs=1e-14)


def test_root_residuals_random():
    rng = np.random.default_rng(5)
    for _ in range(100):
        Omega = rng.uniform(0.3, 3.0)
        p = params(Omega=Omega, g0=rng.uniform(1e-4, 1.0),
                   gamma=Omega * rng.uniform(5.0, 100.0))
        r = compute_roots(p)
        for z in (r.z1, r.z2):
            assert characteristic_residual(z, p) < 1e-10 * p.gamma**2


def test_root_labeling_and_perturbative_decay():
    # system-like root: Re z2 = -g0*Omega*gamma^2/(gamma^2+Omega^2) + O(g0^2)
    r = compute_roots(params(g0=0.001))
    assert abs(r.z1 + 12.0) < 0.1          # bath-like root stays near -gamma
    assert abs(r.z2.real + 9.93e-4) < 1e-5
    assert abs(r.z2.imag - 1.0) < 1e-3


def test_root_stability_sweep():
    for g0 in (0.01, 0.1, 0.5, 1.0):
        for ratio in (5.0, 12.0, 40.0, 100.0):
            r = compute_roots(params(g0=g0, gamma=ratio))
            assert r.z1.real < 0 and r.z2.real < 0


def test_degenerate_roots_error():
    # exact double root of the characteristic equation: g0*gamma = Omega,
    # gamma = 2*Omega
    with pytest.warns(UserWarning):
        p = params(Omega=1.0, gamma=2.0, g0=0.5)
    with pytest.raises(DegenerateRootsError):
        compute_roots(p)


def test_memory_kernel():
    p = params()
    assert memory_kernel(0.0, p) == pytest.approx(1.2, rel=1e-14)
    assert memory_kernel(1 / 12.0, p) == pytest.approx(1.2 / np.e, rel=1e-13)
    # half-line integral equals g0 independent of gamma
    assert memory_kernel_integral(1e4, p) == pytest.approx(p.g0, rel=1e-12)
    assert memory_kernel_integral(1e4, params(gamma=40.0)) == pytest.approx(
        p.g0, rel=1e-12)
    ts = np.linspace(0, 2, 50)
    k = memory_kernel(ts, p)
    assert np.all(k > 0) and np.all(np.isreal(k))
    with pytest.raises(ValueError):
        memory_kernel(-0.1, p)


def test_amplitude_initial_condition():
    p = params()
    r = compute_roots(p)
    assert abs(amplitude(0.0, r, p) - 1.0) < 1e-12


def test_amplitude_weak_coupling_decay():
    # |A|^2 = e^{-2 g0 Omega t} (1 + O(g0))
    p = params(g0=0.01)
    r = compute_roots(p)
    val = amplitude_sq(50.0, r, p)
    assert val == pytest.approx(np.exp(-1.0), rel=0.02)


def test_amplitude_decays():
    p = params()
    r = compute_roots(p)
    ts = np.linspace(0, 80, 30)
    a = np.abs(amplitude(ts, r, p))
    assert np.all(a[1:] <= 1.0 + 5 * p.g0)
    assert a[-1] < 1e-3


def test_amplitude_derivative_finite_difference():
    # the closed form is entire in t, so the central stencil applies at 0 too
    p = params()
    r = compute_roots(p)
    h = 1e-6 / p.gamma
    for t in (0.0, 0.3, 2.0, 7.0):
        fd = (amplitude(t + h, r, p) - amplitude(t - h, r, p)) / (2 * h)
        cf = amplitude_derivative(t, r, p)
        assert abs(cf - fd) / abs(cf) < 1e-6


def test_bath_response_vanishes_at_zero():
    p = params()
    r = compute_roots(p)
    w = np.linspace(0.01, 100.0, 200)
    b = bath_response(w, 0.0, r, p)
    assert np.all(np.abs(b) < 1e-12)
    db = bath_response_derivative(w, 0.0, r, p)
    assert np.all(np.abs(db + 1.0) < 1e-12)   # dB/dt(0) = -1 for every w


def test_bath_response_asymptotic_term():
    # only the driven e^{iwt} mode survives at large t
    p = params()
    r = compute_roots(p)
    w = 2.2
    phi_w = (1j * w + p.gamma) / ((w + 1j * r.z1) * (w + 1j * r.z2))
    b = bath_response(w, 400.0, r, p)
    assert abs(abs(b) - abs(phi_w)) < 1e-12


def test_bath_response_volterra_oracle():
    # independent oracle: time-step the memory integro-differential equation
    #   y' = i Omega y - e^{iwt} + i g0 gamma q,  q' = y' - gamma q
    # as a linear 2x2 complex ODE (q is the exponential-memory auxiliary)
    p = params()
    r = compute_roots(p)
    w, t_end = 1.0, 5.0

    def rhs(t, y):
        yv = y[0] + 1j * y[1]
        qv = y[2] + 1j * y[3]
        dy = 1j * p.Omega * yv - np.exp(1j * w * t) + 1j * p.g0 * p.gamma * qv
        dq = dy - p.gamma * qv
        return [dy.real, dy.imag, dq.real, dq.imag]

    sol = solve_ivp(rhs, (0.0, t_end), [0.0] * 4, method="DOP853",
                    rtol=1e-12, atol=1e-14)
    y_ode = sol.y[0, -1] + 1j * sol.y[1, -1]
    y_cf = bath_response(w, t_end, r, p)
    assert abs(y_ode - y_cf) / abs(y_cf) < 1e-6


def test_bath_response_derivative_finite_difference():
    p = params()
    r = compute_roots(p)
    h = 1e-6 / p.gamma
    rng = np.random.default_rng(17)
    for _ in range(40):
        w = rng.uniform(0.05, 60.0)
        t = rng.uniform(0.05, 8.0)
        fd = (bath_response(w, t + h, r, p) - bath_response(w, t - h, r, p)) / (2 * h)
        cf = bath_response_derivative(w, t, r, p)
        assert abs(cf - fd) / max(abs(cf), 1e-12) < 1e-6


def test_resonance_pole_guard():
    p = params(g0=0.0)
    r = compute_roots(p)
    with pytest.raises(ResonancePoleError):
        bath_response(1.0, 2.0, r, p)
    # away from the pole the decoupled response is fine
    b = bath_response(2.0, 2.0, r, p)
    assert np.isfinite(b.real) and np.isfinite(b.imag)


def test_conjugation_symmetry():
    # the annihilation-side pair is the complex conjugate at real times:
    # rebuilding A and B_w with conjugated roots/coefficients must equal
    # conj(A*), conj(B_w*)
    p = params()
    r = compute_roots(p)
    z1c, z2c = np.conj(r.z1), np.conj(r.z2)
    for t in (0.3, 2.0, 9.0):
        a_direct = (np.exp(t * z1c) * (z1c + p.gamma + 1j * p.g0 * p.gamma)
                    / (z1c - z2c)
                    + np.exp(t * z2c) * (z2c + p.gamma + 1j * p.g0 * p.gamma)
                    / (z2c - z1c))
        assert abs(a_direct - np.conj(amplitude(t, r, p))) < 1e-13
        for w in (0.4, 5.0):
            phi_w = (-1j * w + p.gamma) / ((w - 1j * z1c) * (w - 1j * z2c))
            phi_1 = 1j * (z1c + p.gamma) / ((z1c - z2c) * (w - 1j * z1c))
            phi_2 = -1j * (z2c + p.gamma) / ((z1c - z2c) * (w - 1j * z2c))
            b_direct = (phi_w * np.exp(-1j * w * t) + phi_1 * np.exp(t * z1c)
                        + phi_2 * np.exp(t * z2c))
            assert abs(b_direct - np.conj(bath_response(w, t, r, p))) < 1e-13


def test_mode_form_matches_residue_form():
    # the packaged three-mode form against the single-fraction residue form
    p = params()
    r = compute_roots(p)
    z1, z2, gam = r.z1, r.z2, p.gamma
    rng = np.random.default_rng(23)
    for _ in range(50):
        w, t = rng.uniform(0.01, 80.0), rng.uniform(0.0, 10.0)
        num = (np.exp(1j * t * w) * (z1 - z2) * (1j * w + gam)
               + np.exp(t * z1) * (-1j * w + z2) * (z1 + gam)
               + 1j * np.exp(t * z2) * (w + 1j * z1) * (z2 + gam))
        den = (w + 1j * z1) * (z1 - z2) * (w + 1j * z2)
        assert abs(bath_response(w, t, r, p) - num / den) < 1e-13
