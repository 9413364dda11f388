import numpy as np
import pytest

from fermibath import (IntegrandEvaluationError, ModelParams,
                       QuadratureConvergenceError, compute_roots)
from fermibath.quadrature import (QuadratureSpec, _initial_edges, default_w_max,
                                  integrate_adaptive, integrate_semi_infinite)


def test_lorentzian_closed_form():
    gamma = 12.0
    spec = QuadratureSpec(rel_tol=1e-11, abs_tol=1e-13, w_max=240.0)
    res = integrate_semi_infinite(
        lambda w: gamma**2 / (gamma**2 + w**2) / np.pi, spec)
    assert abs(res.value - gamma / 2) / (gamma / 2) < 1e-10
    assert res.error_estimate < 1e-8
    assert res.truncation_bound <= res.error_estimate


def test_gamma_function_integral():
    spec = QuadratureSpec(rel_tol=1e-11, abs_tol=1e-14, w_max=80.0)
    res = integrate_semi_infinite(lambda w: w * np.exp(-w), spec)
    assert abs(res.value - 1.0) < 1e-10


def _equilibrium_integrand(params):
    roots = compute_roots(params)
    k = params.g0 * params.gamma**2 / np.pi

    def f(w):
        w = np.asarray(w, dtype=float)
        occ = 1.0 / (1.0 + np.exp(np.clip(w / params.T, -700, 700)))
        p2 = np.abs((w + 1j * roots.z1) * (w + 1j * roots.z2))**2
        return k * w * occ / p2

    return f


def test_equilibrium_integrand_against_dense_trapezoid():
    # brute-force oracle: 20-million-point composite trapezoid on [0, 240],
    # evaluated in chunks; the integrand's tail beyond is ~1e-22 (thermal cut)
    p = ModelParams(Omega=1.0, g0=0.001, gamma=12.0, T=1.0)
    f = _equilibrium_integrand(p)
    n_tot, w_hi = 20_000_001, 240.0
    step = (w_hi - 0.0) / (n_tot - 1)
    acc = 0.0
    chunk = 2_000_001
    for start in range(0, n_tot, chunk - 1):
        stop = min(start + chunk - 1, n_tot - 1)
        w = np.linspace(start * step, stop * step, stop - start + 1)
        y = f(w)
        acc += np.trapezoid(y, dx=step)
    roots = compute_roots(p)
    spec = QuadratureSpec(rel_tol=1e-10, abs_tol=1e-16, w_max=w_hi,
                          breakpoints=(p.Omega, roots.z2.imag), extend_w=False)
    res = integrate_semi_infinite(f, spec)
    assert abs(res.value - acc) / acc < 1e-6


def test_panel_doubling_consistency():
    p = ModelParams(Omega=1.0, g0=0.01, gamma=12.0, T=0.5)
    f = _equilibrium_integrand(p)
    spec1 = QuadratureSpec(rel_tol=1e-9, abs_tol=1e-15, w_max=240.0,
                           max_panels=400, breakpoints=(1.0,))
    spec2 = QuadratureSpec(rel_tol=1e-9, abs_tol=1e-15, w_max=240.0,
                           max_panels=800, breakpoints=(1.0,))
    r1 = integrate_semi_infinite(f, spec1)
    r2 = integrate_semi_infinite(f, spec2)
    assert abs(r1.value - r2.value) <= r1.error_estimate + 1e-16


def test_cutoff_insensitivity():
    p = ModelParams(Omega=1.0, g0=0.01, gamma=12.0, T=0.5)
    f = _equilibrium_integrand(p)
    vals = []
    for W in (240.0, 480.0):
        spec = QuadratureSpec(rel_tol=1e-10, abs_tol=1e-16, w_max=W,
                              breakpoints=(1.0,), extend_w=False)
        vals.append(integrate_semi_infinite(f, spec).value)
    assert abs(vals[0] - vals[1]) / abs(vals[1]) < 1e-10


def test_linearity():
    spec = QuadratureSpec(rel_tol=1e-10, abs_tol=1e-14, w_max=200.0)
    f = lambda w: np.exp(-w)
    g = lambda w: w * np.exp(-0.5 * w)
    a, b = 1.7, -0.4
    combined = integrate_semi_infinite(lambda w: a * f(w) + b * g(w), spec)
    separate = (a * integrate_semi_infinite(f, spec).value
                + b * integrate_semi_infinite(g, spec).value)
    tol = 2 * max(1e-14, 1e-10 * abs(combined.value))
    assert abs(combined.value - separate) < tol


def test_nan_abort_reports_abscissa():
    def f(w):
        w = np.asarray(w, dtype=float)
        out = np.exp(-w)
        return np.where(w > 50.0, np.nan, out)

    with pytest.raises(IntegrandEvaluationError) as err:
        integrate_semi_infinite(f, QuadratureSpec(w_max=200.0))
    assert err.value.w is not None and err.value.w > 50.0


def test_nonconvergence_carries_best_estimate():
    # a needle the 4-panel budget cannot resolve
    def f(w):
        w = np.asarray(w, dtype=float)
        return 1.0 / ((w - 37.123456) ** 2 + 1e-16)

    spec = QuadratureSpec(rel_tol=1e-10, abs_tol=1e-14, w_max=100.0,
                          max_panels=4, extend_w=False)
    with pytest.raises(QuadratureConvergenceError) as err:
        integrate_semi_infinite(f, spec)
    assert err.value.result is not None
    assert np.isfinite(err.value.result.value)


def test_oscillation_panel_density():
    # initial panels resolve exp(i w t): width <= pi/(4 t) inside the window
    t = 13.0
    spec = QuadratureSpec(oscillation_time=t, oscillation_window=36.0,
                          w_max=240.0)
    edges = _initial_edges(spec, 240.0)
    inside = edges[edges <= 36.0]
    assert np.max(np.diff(inside)) <= np.pi / (4 * t) * (1 + 1e-12)


def test_oscillatory_integral_accuracy():
    # int_0^inf e^{-w} cos(w t) dw = 1/(1+t^2)
    t = 9.0
    spec = QuadratureSpec(rel_tol=1e-10, abs_tol=1e-14, w_max=120.0,
                          oscillation_time=t)
    res = integrate_semi_infinite(lambda w: np.exp(-w) * np.cos(w * t), spec)
    assert abs(res.value - 1 / (1 + t**2)) < 1e-10


def test_complex_integrand():
    t = 4.0
    spec = QuadratureSpec(rel_tol=1e-10, abs_tol=1e-14, w_max=120.0,
                          oscillation_time=t)
    res = integrate_semi_infinite(lambda w: np.exp(-w) * np.exp(1j * w * t), spec)
    assert abs(res.value - 1 / (1 - 1j * t)) < 1e-10


def test_default_w_max_policy():
    assert default_w_max(12.0, 1.0, 1.0) == 240.0
    assert default_w_max(12.0, 1.0, 10.0) == 501.0
    assert default_w_max(0.5, 30.0, 0.0) == 300.0
    assert default_w_max(12.0, 1.0, 1.0, mu=300.0) == 351.0


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureSpec(max_panels=2)
    with pytest.raises(ValueError):
        QuadratureSpec(oscillation_time=-1.0)


def test_adaptive_finite_interval():
    val, err, n = integrate_adaptive(np.sin, np.array([0.0, np.pi]),
                                     1e-12, 1e-14, 200)
    assert abs(val - 2.0) < 1e-12
