"""Physical observables: noise moments, occupation, transport coefficients.

The occupation of the collective mode is

    n(t) = |A*(t)|^2 n(0) + <F+(t)F(t)>,

with the noise moment given by a semi-infinite frequency integral of the
squared bath response |B_w(t)|^2 against the coupling density and an
occupation weight.  The integral is evaluated by splitting |B_w|^2
algebraically into its three-mode expansion

    |B_w|^2 = |phi_w|^2 + |phi_1|^2 e^{2 Re z1 t} + |phi_2|^2 e^{2 Re z2 t}
              + 2 Re[phi_1 conj(phi_2) e^{(z1 + conj(z2)) t}]
              + 2 Re[phi_w (conj(phi_1) e^{conj(z1) t}
                            + conj(phi_2) e^{conj(z2) t}) e^{i w t}],

so the four non-oscillatory integrals are computed once per parameter set
(with exact 1/w-mapped tails) and only the dephasing cross term needs a
time-dependent oscillatory quadrature.  At small t the moment is instead
integrated directly with an analytic large-w tail correction; at large t
the cross term is either truncated with endpoint-asymptotic corrections or
rigorously skipped once its exponential prefactor makes it irrelevant.

Transport: the friction is lambda(t) = -Re[dA*/dt / A*].  The diffusion
coefficient is the source term that makes the occupation obey the
local-in-time equation  d<X>/dt = -2 lambda <X> + 2 D(t), which gives

    D(t) = lambda(t) M(t) + (1/2) dM/dt

for the corresponding noise moment M.  (Its t -> infinity limit is then
exactly lambda_inf * M_inf.)
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from scipy.special import exp1

from .model import (BathStatistics, ModelParams, anti_occupation_factor,
                    occupation_factor)
from .quadrature import (QuadratureSpec, _initial_edges, default_w_max,
                         integrate_adaptive)
from .response import (CharacteristicRoots, amplitude, amplitude_derivative,
                       amplitude_sq, bath_response,
                       bath_response_derivative,
                       bath_response_tail_coefficient,
                       bath_response_tail_coefficient_derivative,
                       compute_roots, _mode_amplitudes)

PLUS_MINUS = "plus_minus"   # <F+(t) F(t)>, weight n(w)
MINUS_PLUS = "minus_plus"   # <F(t) F+(t)>, weight 1 -+ n(w)

ZETA2 = np.pi**2 / 6
ZETA3 = 1.2020569031595943
ZETA4 = np.pi**4 / 90

# direct oscillatory quadrature up to ~2000 capped panels; beyond this the
# mode-decomposed path with endpoint-asymptotic tails takes over
_DIRECT_PANEL_BUDGET = 2000.0


@dataclass(frozen=True)
class OccupationTrajectory:
    """Occupation n(t) on a time grid, tagged by evaluation method."""

    times: np.ndarray
    values: np.ndarray
    method: str
    params: ModelParams


@dataclass(frozen=True)
class TransportTrajectory:
    """Friction and both diffusion coefficients on a time grid."""

    times: np.ndarray
    friction: np.ndarray
    diffusion_plus: np.ndarray
    diffusion_minus: np.ndarray
    params: ModelParams


@dataclass(frozen=True)
class EquilibriumSummary:
    """Asymptotic observables and their thermal references."""

    n_infinity: float
    lambda_infinity: float
    D_plus_infinity: float
    D_minus_infinity: float
    reference_thermal: float
    low_T_expansion: float | None
    params: ModelParams


def _prefactor(params: ModelParams) -> float:
    return params.g0 * params.gamma**2 / np.pi


def _weight_fn(weight: str, params: ModelParams):
    if weight == "n":
        return lambda w: occupation_factor(w, params)
    if weight == "anti":
        return lambda w: anti_occupation_factor(w, params)
    if weight == "unit":
        return lambda w: np.ones_like(np.asarray(w, dtype=float))
    raise ValueError(f"unknown weight {weight!r}")


def _ordering_weight(ordering: str) -> str:
    if ordering == PLUS_MINUS:
        return "n"
    if ordering == MINUS_PLUS:
        return "anti"
    raise ValueError(f"ordering must be {PLUS_MINUS!r} or {MINUS_PLUS!r}")


def frequency_breakpoints(params: ModelParams,
                          roots: CharacteristicRoots) -> tuple[float, ...]:
    """Panel seeds at the physical features of the moment integrands:
    the quasi-resonance of each response pole and the thermal/chemical edge."""
    pts = []
    for z in (roots.z1, roots.z2):
        center, width = z.imag, max(abs(z.real), 1e-6 * params.Omega)
        for k in (-30.0, -10.0, -3.0, 0.0, 3.0, 10.0, 30.0):
            pts.append(center + k * width)
    if params.T > 0:
        for k in (0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0):
            pts.append(max(params.mu, 0.0) + k * params.T)
    if params.mu > 0:
        pts.append(params.mu)
        if params.T > 0:
            for k in (-20.0, -5.0, 5.0):
                pts.append(params.mu + k * params.T)
    return tuple(sorted(p for p in pts if p > 0.0))


def _expn(n: int, z: complex) -> complex:
    """Generalized exponential integral E_n(z) for complex z, |arg z| <= pi/2
    territory of the tail corrections (z = -i t W)."""
    if z == 0:
        return 1.0 / (n - 1)
    e = exp1(z)
    for k in range(1, n):
        e = (np.exp(-z) - z * e) / k
    return complex(e)


class _MomentEngine:
    """Evaluator for one noise moment M[weight](t) and its time derivative.

    Caches the four non-oscillatory mode integrals (with exact mapped
    tails) and amplitude bounds for the oscillatory cross term.
    """

    def __init__(self, params: ModelParams, spec: QuadratureSpec, weight: str):
        self.params = params
        self.spec = spec
        self.weight = weight
        self.roots = compute_roots(params)
        self.kappa = _prefactor(params)
        self.wfun = _weight_fn(weight, params)
        self.w_max = spec.w_max if spec.w_max is not None else default_w_max(
            params.gamma, params.Omega, params.T, params.mu)
        self.breaks = frequency_breakpoints(params, self.roots)
        self.x1, self.x2 = self.roots.z1.real, self.roots.z2.real

    # -- integrand pieces -------------------------------------------------
    def _h(self, w):
        g = self.params.gamma
        return self.kappa * w * self.wfun(w) / (g**2 + w**2)

    def _modes(self, w):
        return _mode_amplitudes(w, self.roots, self.params)

    def _edges(self, extra=()):
        w_max = self.w_max
        edges = {0.0, w_max}
        edges.update(b for b in self.breaks if 0.0 < b < w_max)
        edges.update(b for b in extra if 0.0 < b < w_max)
        e = w_max
        while e > w_max / 4096.0:
            e /= 4.0
            edges.add(e)
        return np.array(sorted(edges))

    def _quad(self, f, edges=None):
        edges = self._edges() if edges is None else edges
        val, err, _ = integrate_adaptive(
            f, edges, self.spec.rel_tol, self.spec.abs_tol, self.spec.max_panels)
        return val, err

    def _mapped_tail(self, rational):
        """Exact tail int_{w_max}^inf h(w) * rational(w) dw via u = 1/w.

        The mapped integrand h(1/u) r(1/u) / u^2 is smooth on (0, 1/w_max]
        because every rational piece here falls off at least like 1/w^2.
        """
        g = self.params.gamma

        def f(u):
            w = 1.0 / u
            r = np.asarray(rational(w))
            return self.kappa * self.wfun(w) * r / (u * (g**2 * u**2 + 1.0))

        val, err, _ = integrate_adaptive(
            f, np.array([0.0, 1.0 / self.w_max]),
            self.spec.rel_tol, self.spec.abs_tol, 512)
        return val, err

    def _static_integral(self, rational):
        def f(w):
            return (self._h(w) * np.asarray(rational(w))).astype(complex)

        v1, e1 = self._quad(f)
        v2, e2 = self._mapped_tail(rational)
        return v1 + v2, e1 + e2

    # the static mode integrals are lazy: asymptotic-only callers (scans)
    # never pay for the transient machinery

    @cached_property
    def M_inf(self) -> float:
        return float(self._static_integral(
            lambda w: np.abs(self._modes(w)[0])**2)[0].real)

    @cached_property
    def I11(self) -> float:
        return float(self._static_integral(
            lambda w: np.abs(self._modes(w)[1])**2)[0].real)

    @cached_property
    def I22(self) -> float:
        return float(self._static_integral(
            lambda w: np.abs(self._modes(w)[2])**2)[0].real)

    @cached_property
    def I12(self) -> complex:
        def r(w):
            _, p1, p2 = self._modes(w)
            return p1 * np.conj(p2)
        return complex(self._static_integral(r)[0])

    @cached_property
    def C1(self) -> float:
        def r(w):
            pw, p1, _ = self._modes(w)
            return 2.0 * np.abs(pw) * np.abs(p1)
        return float(self._static_integral(r)[0].real)

    @cached_property
    def C2(self) -> float:
        def r(w):
            pw, _, p2 = self._modes(w)
            return 2.0 * np.abs(pw) * np.abs(p2)
        return float(self._static_integral(r)[0].real)

    @cached_property
    def C1d(self) -> float:
        def r(w):
            pw, p1, _ = self._modes(w)
            return 2.0 * w * np.abs(pw) * np.abs(p1)
        return float(self._static_integral(r)[0].real)

    @cached_property
    def C2d(self) -> float:
        def r(w):
            pw, _, p2 = self._modes(w)
            return 2.0 * w * np.abs(pw) * np.abs(p2)
        return float(self._static_integral(r)[0].real)

    @cached_property
    def nonosc_scale(self) -> float:
        return abs(self.M_inf) + self.I11 + self.I22 + 2 * abs(self.I12)

    # -- direct path (small t) --------------------------------------------
    def _direct(self, t: float, derivative: bool):
        spec = self.spec
        osc_spec = QuadratureSpec(
            rel_tol=spec.rel_tol, abs_tol=spec.abs_tol,
            max_panels=max(spec.max_panels, 6000),
            oscillation_time=t, oscillation_window=self.w_max,
            w_max=self.w_max, breakpoints=self.breaks, extend_w=False)
        roots, params = self.roots, self.params

        if derivative:
            def f(w):
                B = bath_response(w, t, roots, params)
                dB = bath_response_derivative(w, t, roots, params)
                return self._h(w) * 2.0 * np.real(np.conj(B) * dB)
        else:
            def f(w):
                B = bath_response(w, t, roots, params)
                return self._h(w) * np.abs(B)**2

        edges = _initial_edges(osc_spec, self.w_max)
        val, qerr, _ = integrate_adaptive(
            f, edges, osc_spec.rel_tol, osc_spec.abs_tol, osc_spec.max_panels)
        tail, tail_err = self._direct_tail(t, derivative)
        return float(val) + tail, qerr + tail_err

    def _direct_tail(self, t: float, derivative: bool):
        """Analytic correction for w > w_max where the integrand approaches
        kappa * weight * |e^{iwt} - d(t)|^2 / w^3 (weight -> 1 for the
        unit/anti classes; exponentially cut for the thermal weight)."""
        W = self.w_max
        if self.weight == "n":
            # thermal weight is exponentially cut far below w_max
            nW = occupation_factor(W, self.params)
            return 0.0, float(4 * self.kappa * nW / W**2)
        # large-w expansion of the integrand:
        #   w B = i(e^{iwt} - d) + [i a e^{iwt} - d'] / w + O(1/w^2),
        #   a = Omega + g0*gamma,
        # integrated term by term with E_n(-+ i W t) for the phases
        d = bath_response_tail_coefficient(t, self.roots, self.params)
        d1 = bath_response_tail_coefficient_derivative(t, self.roots, self.params)
        d2 = bath_response_tail_coefficient_derivative(t, self.roots, self.params,
                                                       order=2)
        a = self.params.Omega + self.params.g0 * self.params.gamma
        k = self.kappa
        E3m = _expn(3, -1j * t * W)
        E4m = _expn(4, -1j * t * W)
        E4p = _expn(4, 1j * t * W)
        if derivative:
            E2m = _expn(2, -1j * t * W)
            E3p = _expn(3, 1j * t * W)
            val = (k * np.real(np.conj(d) * d1) / W**2
                   - 2 * k * np.real(np.conj(d1) * E3m) / W**2
                   - 2 * k * np.real(1j * np.conj(d) * E2m) / W)
            val += (-(2 * k / (3 * W**3)) * np.real(1j * (np.conj(d1) * d1
                                                          + np.conj(d) * d2))
                    + (2 * k / W**3) * np.real(1j * d2 * E4p
                                               + 1j * d1 * (-1j * W) * E3p)
                    - (2 * k * a / W**3) * np.real(np.conj(d1) * E4m
                                                   + np.conj(d) * 1j * W * E3m))
        else:
            val = (k * (1 + abs(d)**2) / (2 * W**2)
                   - 2 * k * np.real(np.conj(d) * E3m) / W**2)
            val += (2 * k / (3 * W**3)) * (a - np.real(1j * np.conj(d) * d1))
            val += ((2 * k / W**3) * np.real(1j * d1 * E4p)
                    - (2 * k * a / W**3) * np.real(np.conj(d) * E4m))
        # next order of the expansion, kept as an error allowance
        scale = (self.params.gamma + self.params.Omega * (1 + self.params.g0))**2
        err = 4 * k * scale * (1 + abs(d)) / W**4
        return float(val), float(err)

    # -- decomposed path (moderate and large t) ----------------------------
    def _cross_integral(self, t: float, mode: int, derivative: bool):
        """Oscillatory integral of h * phi_w * conj(phi_i) * e^{iwt}
        (times iw for the derivative part), cut at min(w_max, 3 gamma) with
        endpoint-asymptotic tail correction.

        The result is multiplied by e^{Re z_i t} downstream, so the absolute
        tolerance is relaxed by that factor.
        """
        Wc = min(self.w_max, 3.0 * self.params.gamma)
        roots, params = self.roots, self.params
        x = self.x1 if mode == 1 else self.x2
        tol_scale = min(math.exp(-x * t) if -x * t < 700 else 1e12, 1e12)

        def g(w):
            pw, p1, p2 = self._modes(w)
            pi = p1 if mode == 1 else p2
            base = self._h(w) * pw * np.conj(pi)
            return base * (1j * w) if derivative else base

        n_osc = 4.0 * Wc * t / np.pi
        if n_osc > 500_000:
            raise ValueError(
                f"oscillatory cross term at t = {t} needs {int(n_osc)} panels; "
                "expected to be skipped by its exponential bound")
        osc_spec = QuadratureSpec(
            rel_tol=self.spec.rel_tol, abs_tol=self.spec.abs_tol * tol_scale,
            max_panels=max(self.spec.max_panels, int(n_osc * 1.5) + 64),
            oscillation_time=t, oscillation_window=Wc, w_max=Wc,
            breakpoints=self.breaks, extend_w=False)

        def fosc(w):
            return g(w) * np.exp(1j * w * t)

        edges = _initial_edges(osc_spec, Wc)
        val, err, _ = integrate_adaptive(
            fosc, edges, osc_spec.rel_tol, osc_spec.abs_tol, osc_spec.max_panels)

        # endpoint asymptotics: -e^{iWt} sum_k g^(k)(W) / (it)^{k+1}
        hstep = 1e-4 * Wc
        gW = complex(g(np.array([Wc]))[0])
        gp = complex((g(np.array([Wc + hstep])) - g(np.array([Wc - hstep])))[0]) / (2 * hstep)
        gpp = complex((g(np.array([Wc + hstep])) - 2 * g(np.array([Wc]))
                       + g(np.array([Wc - hstep])))[0]) / hstep**2
        phase = np.exp(1j * Wc * t)
        corr = -phase * (gW / (1j * t) + gp / (1j * t)**2)
        rem = abs(gpp) / t**3
        return val + corr, err + rem

    def _nonosc(self, t: float, derivative: bool):
        e1 = math.exp(2 * self.x1 * t) if 2 * self.x1 * t > -745 else 0.0
        e2 = math.exp(2 * self.x2 * t) if 2 * self.x2 * t > -745 else 0.0
        z12 = self.roots.z1 + np.conj(self.roots.z2)
        e12 = np.exp(z12 * t) if z12.real * t > -745 else 0.0
        if derivative:
            return (2 * self.x1 * e1 * self.I11 + 2 * self.x2 * e2 * self.I22
                    + 2 * np.real(z12 * e12 * self.I12))
        return (self.M_inf + e1 * self.I11 + e2 * self.I22
                + 2 * np.real(e12 * self.I12))

    def _decomposed(self, t: float, derivative: bool):
        val = self._nonosc(t, derivative)
        err = 0.0
        skip_thr = 0.5 * max(self.spec.abs_tol,
                             self.spec.rel_tol * max(self.nonosc_scale, 1e-30))
        for mode, x, C, Cd in ((1, self.x1, self.C1, self.C1d),
                               (2, self.x2, self.C2, self.C2d)):
            pref = math.exp(x * t) if x * t > -745 else 0.0
            zbar = np.conj(self.roots.z1 if mode == 1 else self.roots.z2)
            bound = pref * ((abs(zbar) * C + Cd) if derivative else C)
            if bound < skip_thr:
                err += bound
                continue
            phi, phi_err = self._cross_integral(t, mode, derivative=False)
            if derivative:
                dphi, dphi_err = self._cross_integral(t, mode, derivative=True)
                term = zbar * np.exp(zbar * t) * phi + np.exp(zbar * t) * dphi
                err += pref * (abs(zbar) * phi_err + dphi_err)
            else:
                term = np.exp(zbar * t) * phi
                err += pref * phi_err
            val += 2 * np.real(term)
        return float(val), float(err)

    # -- public ------------------------------------------------------------
    def moment(self, t: float):
        if t < 0:
            raise ValueError("noise moment requires t >= 0")
        if t == 0.0:
            return 0.0, 0.0
        if 4.0 * self.w_max * t / np.pi <= _DIRECT_PANEL_BUDGET:
            return self._direct(t, derivative=False)
        return self._decomposed(t, derivative=False)

    def moment_derivative(self, t: float):
        if t < 0:
            raise ValueError("noise moment requires t >= 0")
        if 4.0 * self.w_max * t / np.pi <= _DIRECT_PANEL_BUDGET:
            return self._direct(t, derivative=True)
        return self._decomposed(t, derivative=True)

    def asymptotic(self):
        return self.M_inf


@lru_cache(maxsize=128)
def _engine(params: ModelParams, spec: QuadratureSpec, weight: str) -> _MomentEngine:
    return _MomentEngine(params, spec, weight)


def _spec_or_default(spec: QuadratureSpec | None) -> QuadratureSpec:
    return spec if spec is not None else QuadratureSpec()


# --------------------------------------------------------------------------
# noise moments and occupation
# --------------------------------------------------------------------------

def noise_moment(t: float, ordering: str, params: ModelParams,
                 roots: CharacteristicRoots | None = None,
                 spec: QuadratureSpec | None = None) -> float:
    """Noise correlator <F+(t)F(t)> (plus_minus) or <F(t)F+(t)> (minus_plus).

    plus_minus integrates the occupation weight n(w); minus_plus the
    anti-ordered weight 1 - n (Fermi) or 1 + n (Bose).
    """
    _ordering_weight(ordering)
    if params.g0 == 0.0:
        return 0.0  # decoupled mode: the noise prefactor vanishes
    eng = _engine(params, _spec_or_default(spec), _ordering_weight(ordering))
    return eng.moment(float(t))[0]


def noise_moment_derivative(t: float, ordering: str, params: ModelParams,
                            roots: CharacteristicRoots | None = None,
                            spec: QuadratureSpec | None = None) -> float:
    """d/dt of the noise moment, with dB_w/dt under the integral."""
    _ordering_weight(ordering)
    if params.g0 == 0.0:
        return 0.0
    eng = _engine(params, _spec_or_default(spec), _ordering_weight(ordering))
    return eng.moment_derivative(float(t))[0]


def noise_moment_asymptotic(ordering: str, params: ModelParams,
                            roots: CharacteristicRoots | None = None,
                            spec: QuadratureSpec | None = None) -> float:
    """t -> infinity limit of the noise moment (only the driven response
    mode survives dephasing)."""
    _ordering_weight(ordering)
    if params.g0 == 0.0:
        return 0.0
    eng = _engine(params, _spec_or_default(spec), _ordering_weight(ordering))
    return eng.asymptotic()


def occupation(t: float, params: ModelParams,
               roots: CharacteristicRoots | None = None,
               spec: QuadratureSpec | None = None) -> float:
    """Occupation n(t) = |A*(t)|^2 n(0) + <F+(t)F(t)>."""
    roots = roots if roots is not None else compute_roots(params)
    a2 = amplitude_sq(float(t), roots, params)
    return a2 * params.n0 + noise_moment(t, PLUS_MINUS, params, roots, spec)


def occupation_asymptotic(params: ModelParams,
                          roots: CharacteristicRoots | None = None,
                          spec: QuadratureSpec | None = None) -> float:
    """Equilibrium occupation: the dephasing-surviving frequency integral
    weighted by the bath occupation (independent of n(0))."""
    if params.g0 <= 0:
        raise ValueError("asymptotic occupation requires g0 > 0")
    return noise_moment_asymptotic(PLUS_MINUS, params, roots, spec)


def occupation_trajectory(times, params: ModelParams,
                          roots: CharacteristicRoots | None = None,
                          spec: QuadratureSpec | None = None,
                          method: str = "exact-quadrature") -> OccupationTrajectory:
    roots = roots if roots is not None else compute_roots(params)
    times = np.asarray(times, dtype=float)
    vals = np.array([occupation(t, params, roots, spec) for t in times])
    return OccupationTrajectory(times=times, values=vals, method=method,
                                params=params)


# --------------------------------------------------------------------------
# weak-coupling closed forms
# --------------------------------------------------------------------------

def f_constants(w, params: ModelParams):
    """The six response constants of the leading-order occupation formula.

    Rational functions of (w, gamma, Omega, g0); at t = 0 they obey the sum
    rule f1 + f2 + f3 + 2 Re(f4 + f5 + f6) = 0.  Valid for g0 < 1.
    """
    if params.g0 >= 1.0:
        raise ValueError("f-constants are a weak-coupling construction (g0 < 1)")
    w = np.asarray(w, dtype=float)
    O, g, g0 = params.Omega, params.gamma, params.g0
    d1 = w**2 - 2 * g0 * w * g + (1 + g0**2) * g**2
    d2 = w**2 - 2 * w * O + (1 + g0**2) * O**2
    d3 = (1 + g0**2) * g**2 - 4 * g0 * g * O + (1 + g0**2) * O**2
    f1 = (w**2 + g**2) / (d1 * d2)
    f2 = g0**2 * g**2 / (d1 * d3)
    f3 = (g**2 - 2 * g0 * g * O + (1 + g0**2) * O**2) / (d2 * d3)
    f4 = (1j * g0 * (w + 1j * g) * g
          / (d1 * (g - 1j * g0 * g - (-1j + g0) * O) * (w + 1j * (1j + g0) * O)))
    f5 = ((-1j * w + g) * (g - (-1j + g0) * O)
          / ((w - (-1j + g0) * g) * ((1j + g0) * g + (-1 - 1j * g0) * O) * d2))
    f6 = (g0 * g * (g - (1j + g0) * O)
          / ((1j * w + g - 1j * g0 * g) * (w + 1j * (1j + g0) * O) * d3))
    for fi in (f1, f2, f3, f4, f5, f6):
        if not np.all(np.isfinite(np.asarray(fi))):
            raise ArithmeticError("vanishing denominator in f-constants")
    return f1 + 0j, f2 + 0j, f3 + 0j, f4, f5, f6


class _WeakEngine:
    """Occupation at leading order in g0, assembled from the f-constants."""

    def __init__(self, params: ModelParams, spec: QuadratureSpec):
        self.params = params
        self.spec = spec
        self.kappa = _prefactor(params)
        O, g, g0 = params.Omega, params.gamma, params.g0
        self.zw1 = -g + 1j * g0 * g
        self.zw2 = 1j * O - g0 * O
        self.w_max = spec.w_max if spec.w_max is not None else default_w_max(
            g, O, params.T, params.mu)
        roots = compute_roots(params)
        self.breaks = frequency_breakpoints(params, roots)
        self._build_static()

    def _h(self, w):
        g = self.params.gamma
        return self.kappa * w * occupation_factor(w, self.params) / (g**2 + w**2)

    def _edges(self):
        edges = {0.0, self.w_max}
        edges.update(b for b in self.breaks if 0.0 < b < self.w_max)
        e = self.w_max
        while e > self.w_max / 4096.0:
            e /= 4.0
            edges.add(e)
        return np.array(sorted(edges))

    def _quad(self, f, max_panels=None):
        val, err, _ = integrate_adaptive(
            f, self._edges(), self.spec.rel_tol, self.spec.abs_tol,
            max_panels or self.spec.max_panels)
        return val

    def _build_static(self):
        def term(i):
            def f(w):
                return (self._h(w) * np.asarray(f_constants(w, self.params)[i])
                        ).astype(complex)
            return self._quad(f)

        self.J1 = float(term(0).real)
        self.J2 = float(term(1).real)
        self.J3 = float(term(2).real)
        self.J6 = complex(term(5))
        self.C4 = float(self._quad(
            lambda w: self._h(w) * np.abs(f_constants(w, self.params)[3])).real)
        self.C5 = float(self._quad(
            lambda w: self._h(w) * np.abs(f_constants(w, self.params)[4])).real)

    def _osc(self, t: float, idx: int):
        Wc = self.w_max
        x = self.zw1.real if idx == 3 else self.zw2.real
        tol_scale = min(math.exp(-x * t) if -x * t < 700 else 1e12, 1e12)

        def f(w):
            fi = f_constants(w, self.params)[idx]
            return self._h(w) * fi * np.exp(-1j * w * t)

        n_osc = 4.0 * Wc * t / np.pi
        if n_osc > _DIRECT_PANEL_BUDGET:
            Wc = min(Wc, 3.0 * self.params.gamma)
            n_osc = 4.0 * Wc * t / np.pi
            if n_osc > 500_000:
                raise ValueError("weak-coupling oscillatory term too expensive; "
                                 "should have been skipped")
        osc_spec = QuadratureSpec(
            rel_tol=self.spec.rel_tol, abs_tol=self.spec.abs_tol * tol_scale,
            max_panels=max(self.spec.max_panels, int(n_osc * 1.5) + 64),
            oscillation_time=t, oscillation_window=Wc, w_max=Wc,
            breakpoints=self.breaks, extend_w=False)
        edges = _initial_edges(osc_spec, Wc)
        val, _, _ = integrate_adaptive(
            f, edges, osc_spec.rel_tol, osc_spec.abs_tol, osc_spec.max_panels)
        return val

    def occupation(self, t: float) -> float:
        p = self.params
        e_slow = math.exp(-2 * p.g0 * p.Omega * t)
        e_fast = math.exp(-2 * p.gamma * t) if 2 * p.gamma * t < 745 else 0.0
        val = p.n0 * e_slow + self.J1 + self.J2 * e_fast + self.J3 * e_slow
        z12 = self.zw1 + np.conj(self.zw2)
        val += 2 * np.real(self.J6 * np.exp(z12 * t))
        thr = 0.5 * max(self.spec.abs_tol, self.spec.rel_tol * max(abs(self.J1), 1e-30))
        pre4 = math.exp(self.zw1.real * t) if self.zw1.real * t > -745 else 0.0
        pre5 = math.exp(self.zw2.real * t)
        if pre4 * self.C4 * 2 >= thr:
            val += 2 * np.real(np.exp(self.zw1 * t) * self._osc(t, 3))
        if pre5 * self.C5 * 2 >= thr:
            val += 2 * np.real(np.exp(self.zw2 * t) * self._osc(t, 4))
        return float(val)

    def asymptote(self) -> float:
        return self.J1


@lru_cache(maxsize=64)
def _weak_engine(params: ModelParams, spec: QuadratureSpec) -> _WeakEngine:
    return _WeakEngine(params, spec)


def occupation_weak_coupling(t: float, params: ModelParams,
                             spec: QuadratureSpec | None = None) -> float:
    """Leading-order occupation n(t) built from the f-constants.

    The envelope relaxes on the 1/(2 g0 Omega) scale; the t = 0 sum rule
    makes the integral term vanish so n(0) = n0 exactly.
    """
    if params.g0 > 0.1:
        warnings.warn(f"weak-coupling form used at g0 = {params.g0} > 0.1",
                      stacklevel=2)
    return _weak_engine(params, _spec_or_default(spec)).occupation(float(t))


def weak_coupling_asymptote(params: ModelParams,
                            spec: QuadratureSpec | None = None) -> float:
    """Weak-coupling equilibrium occupation (the f1-weighted integral)."""
    return _weak_engine(params, _spec_or_default(spec)).asymptote()


def occupation_weak_compact(t: float, params: ModelParams,
                            spec: QuadratureSpec | None = None) -> float:
    """Compact relaxation form n0 e^{-2 g0 Omega t} + n_inf (1 - e^{-2 g0 Omega t})."""
    e = math.exp(-2 * params.g0 * params.Omega * t)
    return params.n0 * e + weak_coupling_asymptote(params, spec) * (1.0 - e)


def low_temperature_asymptote(params: ModelParams) -> float:
    """Quantal low-temperature equilibrium occupation (zeta expansion).

    Fermi: (g0/pi)(T/Omega)^2 [zeta(2)/2 + 3 (T/Omega) zeta(3)
                               + (63/4)(T/Omega)^2 zeta(4)]
    Bose:  (g0/pi)(T/Omega)^2 [zeta(2) + 4 (T/Omega) zeta(3)
                               + 18 (T/Omega)^2 zeta(4)]
    """
    if params.T > 0.2 * params.Omega:
        warnings.warn(
            f"low-T expansion used at T/Omega = {params.T / params.Omega:.3g} > 0.2",
            stacklevel=2)
    if params.g0 > 0.1:
        warnings.warn(f"low-T expansion assumes weak coupling; g0 = {params.g0}",
                      stacklevel=2)
    x = params.T / params.Omega
    if params.statistics is BathStatistics.FERMI:
        series = 0.5 * ZETA2 + 3 * x * ZETA3 + (63.0 / 4.0) * x**2 * ZETA4
    else:
        series = ZETA2 + 4 * x * ZETA3 + 18 * x**2 * ZETA4
    return params.g0 / np.pi * x**2 * series


def statistics_ratio(T: float, Omega: float) -> float:
    """Thermal Fermi/Bose equilibrium-occupation ratio tanh(Omega / 2T)."""
    if T <= 0:
        raise ValueError("statistics_ratio requires T > 0")
    return float(np.tanh(Omega / (2.0 * T)))


# --------------------------------------------------------------------------
# transport coefficients
# --------------------------------------------------------------------------

_AMPLITUDE_UNDERFLOW = 1e-300


def friction(t, roots: CharacteristicRoots, params: ModelParams):
    """Time-dependent friction lambda(t) = -Re[(dA*/dt)/A*(t)].

    Below the |A|^2 underflow guard the amplitude carries no information
    and the asymptotic value -Re z2 is reported.
    """
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    a = amplitude(t, roots, params)
    da = amplitude_derivative(t, roots, params)
    lam_inf = friction_asymptotic(roots)
    good = np.abs(a)**2 > _AMPLITUDE_UNDERFLOW
    out = np.where(good, -np.real(np.divide(da, np.where(good, a, 1.0))), lam_inf)
    return float(out[0]) if scalar else out


def friction_asymptotic(roots: CharacteristicRoots) -> float:
    """lambda(infinity) = -(z2 + conj(z2))/2 = -Re z2, exactly from the roots."""
    return -roots.z2.real


def diffusion(t: float, ordering: str, roots: CharacteristicRoots,
              params: ModelParams, spec: QuadratureSpec | None = None) -> float:
    """Diffusion coefficient D(t) = lambda(t) M(t) + (1/2) dM/dt.

    With this source term the occupation-type moment X(t) satisfies
    dX/dt = -2 lambda(t) X + 2 D(t) exactly, and D(t -> inf) =
    lambda_inf * M_inf.
    """
    lam = friction(float(t), roots, params)
    m = noise_moment(t, ordering, params, roots, spec)
    dm = noise_moment_derivative(t, ordering, params, roots, spec)
    return lam * m + 0.5 * dm


def transport_trajectory(times, params: ModelParams,
                         roots: CharacteristicRoots | None = None,
                         spec: QuadratureSpec | None = None) -> TransportTrajectory:
    roots = roots if roots is not None else compute_roots(params)
    times = np.asarray(times, dtype=float)
    lam = np.array([friction(t, roots, params) for t in times])
    dp = np.array([diffusion(t, PLUS_MINUS, roots, params, spec) for t in times])
    dm = np.array([diffusion(t, MINUS_PLUS, roots, params, spec) for t in times])
    return TransportTrajectory(times=times, friction=lam, diffusion_plus=dp,
                               diffusion_minus=dm, params=params)


def equilibrium_summary(params: ModelParams,
                        roots: CharacteristicRoots | None = None,
                        spec: QuadratureSpec | None = None) -> EquilibriumSummary:
    """Asymptotic occupation, friction and fluctuation-dissipation diffusion.

    D_plus = lambda_inf * n_inf and D_minus = lambda_inf * (1 -+ n_inf) are
    the equilibrium source terms of the first/second-moment equations.
    """
    roots = roots if roots is not None else compute_roots(params)
    n_inf = occupation_asymptotic(params, roots, spec)
    lam = friction_asymptotic(roots)
    sign = -1.0 if params.statistics is BathStatistics.FERMI else 1.0
    low_t = None
    if params.T <= 0.2 * params.Omega:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            low_t = low_temperature_asymptote(params)
    return EquilibriumSummary(
        n_infinity=n_inf,
        lambda_infinity=lam,
        D_plus_infinity=lam * n_inf,
        D_minus_infinity=lam * (1.0 + sign * n_inf),
        reference_thermal=occupation_factor(params.Omega, params),
        low_T_expansion=low_t,
        params=params,
    )


def default_time_grid(params: ModelParams, t_max: float,
                      max_points: int = 2000) -> np.ndarray:
    """Geometric-then-linear grid: the gamma transient sampled at 0.05/gamma,
    the slow relaxation at 0.1/(g0 Omega), capped to a sane point count."""
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    dt_fast = 0.05 / params.gamma
    t_break = min(10.0 / params.gamma, t_max)
    fast = np.arange(0.0, t_break, dt_fast)
    if t_break >= t_max:
        return np.append(fast[fast < t_max], t_max)
    if params.g0 > 0:
        dt_slow = 0.1 / (params.g0 * params.Omega)
    else:
        dt_slow = (t_max - t_break) / 100.0
    dt_slow = max(dt_slow, (t_max - t_break) / max_points, dt_fast)
    slow = np.arange(t_break, t_max, dt_slow)
    grid = np.unique(np.concatenate([fast, slow, [t_max]]))
    return grid
