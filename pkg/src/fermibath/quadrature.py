"""Adaptive Gauss-Kronrod quadrature for semi-infinite frequency integrals.

All physics integrals in this package have the form int_0^inf f(w) dw with
f smooth on (0, inf), decaying at least like 1/w^2, possibly multiplied by
oscillatory factors exp(+-i w t).  The engine is a batched, globally
adaptive 15-point Kronrod / 7-point Gauss rule:

* integrands are evaluated vectorized -- all nodes of all pending panels in
  a single call;
* initial panels honor a node-density constraint in the oscillatory window
  (panel width <= pi/(4 t), i.e. well under a quarter period per panel);
* the truncated tail gets a rigorous envelope certificate |f(W)| * W from
  the 1/w^2 decay floor, and the cutoff W can be extended geometrically
  until the certificate is negligible.

Oscillation-aware callers that correct the tail analytically should pass
``extend_w=False`` and handle w > w_max themselves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IntegrandEvaluationError, QuadratureConvergenceError

# 15-point Kronrod extension of 7-point Gauss (standard QUADPACK dqk15
# abscissae/weights on [-1, 1]; all nodes interior, so the rule is open).
_XGK = np.array([
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,
    0.207784955007898, 0.405845151377397, 0.586087235467691,
    0.741531185599394, 0.864864423359769, 0.949107912342759,
    0.991455371120813,
])
_WGK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979,
    0.022935322010529,
])
# 7-point Gauss weights aligned with Kronrod nodes 1, 3, 5, 7, 9, 11, 13
_WG = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870,
])
_GAUSS_IDX = np.arange(1, 15, 2)


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and panel policy for one integral.

    oscillation_time > 0 caps initial panel widths at pi/(4 t) inside
    [0, oscillation_window] so exp(i w t) factors are resolved (about 120
    Kronrod nodes per period, comfortably above the 8-node floor).
    w_max is the truncation point; callers derive it from the physical
    scales (see default_w_max).  breakpoints seed extra panel edges at
    known features (resonances, thermal edges) that a coarse first pass
    could otherwise step over.
    """

    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_panels: int = 4000
    oscillation_time: float = 0.0
    oscillation_window: float | None = None
    w_max: float | None = None
    breakpoints: tuple[float, ...] = ()
    extend_w: bool = True
    max_extensions: int = 40

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_panels < 4:
            raise ValueError("max_panels must be at least 4")
        if self.oscillation_time < 0:
            raise ValueError("oscillation_time must be >= 0")


@dataclass(frozen=True)
class QuadratureResult:
    """Converged value with its a-posteriori error decomposition."""

    value: float | complex
    error_estimate: float
    panels_used: int
    truncation_bound: float
    w_max: float


def default_w_max(gamma: float, Omega: float, T: float, mu: float = 0.0) -> float:
    """Truncation policy: past the Drude window, the resonance, and the
    thermal/chemical-potential edge, every integrand here is in its
    power-law tail."""
    return max(20.0 * gamma, Omega + 50.0 * T + max(mu, 0.0), 10.0 * Omega)


def _eval_panels(f, a, b):
    """Kronrod/Gauss values and error estimates for panels [a_i, b_i]."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    nodes = mid[:, None] + half[:, None] * _XGK[None, :]
    fx = np.asarray(f(nodes.ravel()))
    if not np.all(np.isfinite(fx.view(float) if np.iscomplexobj(fx) else fx)):
        flat = nodes.ravel()
        if np.iscomplexobj(fx):
            bad = ~(np.isfinite(fx.real) & np.isfinite(fx.imag))
        else:
            bad = ~np.isfinite(fx)
        raise IntegrandEvaluationError(
            f"integrand returned non-finite value at w = {flat[bad][0]}",
            w=float(flat[bad][0]))
    fx = fx.reshape(nodes.shape)
    kron = (fx * _WGK[None, :]).sum(axis=1) * half
    gauss = (fx[:, _GAUSS_IDX] * _WG[None, :]).sum(axis=1) * half
    err = np.abs(kron - gauss)
    return kron, err


def _initial_edges(spec: QuadratureSpec, w_max: float) -> np.ndarray:
    edges = {0.0, w_max}
    edges.update(b for b in spec.breakpoints if 0.0 < b < w_max)
    # scale-free ladder so decaying integrands start resolved near the origin
    e = w_max
    while e > w_max / 4096.0:
        e /= 4.0
        edges.add(e)
    edges = np.array(sorted(edges))

    t = spec.oscillation_time
    if t <= 0.0:
        return edges
    window = spec.oscillation_window if spec.oscillation_window is not None else w_max
    window = min(window, w_max)
    cap = np.pi / (4.0 * t)
    n_cap = int(np.ceil(window / cap))
    if n_cap > 600_000:
        raise ValueError(
            f"oscillation resolution requires {n_cap} panels on [0, {window}]; "
            "reduce the time, the window, or treat the oscillatory part analytically")
    out = [edges[edges >= window]] if np.any(edges >= window) else []
    dense = [np.linspace(0.0, window, n_cap + 1)]
    inner = edges[(edges > 0) & (edges < window)]
    merged = np.unique(np.concatenate(dense + [inner] + ([out[0]] if out else [])))
    return merged


def _tail_bound(f, w_max: float) -> float:
    """Envelope certificate for int_{w_max}^inf f, assuming |f| <~ C/w^2.

    C is taken as the worst of |f(s)| s^2 over a few samples past the cutoff,
    so the bound int = C/w_max is conservative for the 1/w^3-and-faster
    integrands that dominate this package.
    """
    s = w_max * np.array([1.0, 1.17, 1.38, 1.63, 1.92])
    fs = np.asarray(f(s))
    c = np.max(np.abs(fs) * s**2)
    if not np.isfinite(c):
        raise IntegrandEvaluationError("non-finite tail sample", w=float(w_max))
    return float(c / w_max)


def integrate_adaptive(f, edges, rel_tol: float, abs_tol: float,
                       max_panels: int):
    """Globally adaptive GK15 over the union of [edges_i, edges_i+1].

    Returns (value, error_estimate, panels_used); raises
    QuadratureConvergenceError when the panel budget is exhausted first.
    """
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1].copy(), edges[1:].copy()
    vals, errs = _eval_panels(f, a, b)

    while True:
        total = vals.sum()
        # summed panel roundoff can exceed abs_tol for strongly cancelling
        # (oscillatory) integrands; cap the demand at the roundoff floor
        floor = 50 * np.finfo(float).eps * np.abs(vals).sum()
        tol = max(abs_tol, rel_tol * abs(total), floor)
        toterr = errs.sum()
        if toterr <= tol:
            return total, float(toterr), len(a)
        if len(a) >= max_panels:
            raise QuadratureConvergenceError(
                f"no convergence within {max_panels} panels "
                f"(error {toterr:.3e} > tol {tol:.3e})",
                result=QuadratureResult(total, float(toterr), len(a), 0.0,
                                        float(edges[-1])))
        # split the worst panels in one vectorized batch
        n_split = min(max(1, len(a) // 8), max_panels - len(a))
        worst = np.argpartition(errs, -n_split)[-n_split:]
        # only split panels that still matter
        worst = worst[errs[worst] > 0.25 * tol / max(len(a), 1)]
        if worst.size == 0:
            worst = np.array([int(np.argmax(errs))])
        mid = 0.5 * (a[worst] + b[worst])
        new_a = np.concatenate([a[worst], mid])
        new_b = np.concatenate([mid, b[worst]])
        new_vals, new_errs = _eval_panels(f, new_a, new_b)
        keep = np.ones(len(a), dtype=bool)
        keep[worst] = False
        a = np.concatenate([a[keep], new_a])
        b = np.concatenate([b[keep], new_b])
        vals = np.concatenate([vals[keep], new_vals])
        errs = np.concatenate([errs[keep], new_errs])


def integrate_semi_infinite(f, spec: QuadratureSpec) -> QuadratureResult:
    """Integrate f over [0, inf) to the requested tolerances.

    The finite part [0, w_max] is done adaptively; the discarded tail is
    certified by the envelope bound and, with extend_w, w_max is doubled
    until the certificate stops mattering.  Non-convergence raises
    QuadratureConvergenceError carrying the best estimate; NaN/Inf from f
    aborts with the offending abscissa.
    """
    w_max = spec.w_max if spec.w_max is not None else 100.0
    edges = _initial_edges(spec, w_max)
    value, quad_err, n_panels = integrate_adaptive(
        f, edges, spec.rel_tol, spec.abs_tol, spec.max_panels)

    trunc = _tail_bound(f, w_max)
    extensions = 0
    while (spec.extend_w and extensions < spec.max_extensions
           and trunc > 0.5 * max(spec.abs_tol, spec.rel_tol * abs(value))):
        ext_edges = np.array([w_max, 1.5 * w_max, 2.0 * w_max])
        ev, ee, en = integrate_adaptive(
            f, ext_edges, spec.rel_tol, spec.abs_tol,
            max(64, spec.max_panels - n_panels))
        value += ev
        quad_err += ee
        n_panels += en
        w_max *= 2.0
        trunc = _tail_bound(f, w_max)
        extensions += 1

    err = float(quad_err + trunc)
    tol = max(spec.abs_tol, spec.rel_tol * abs(value))
    result = QuadratureResult(value, err, n_panels, float(trunc), float(w_max))
    if err > 4.0 * tol:
        raise QuadratureConvergenceError(
            f"semi-infinite integral not converged (error {err:.3e}, "
            f"tolerance {tol:.3e}, truncation {trunc:.3e})", result=result)
    return result
