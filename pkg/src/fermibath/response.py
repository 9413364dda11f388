"""Closed-form response of the damped collective mode.

Everything here derives from the Laplace-domain solution of the memory
integro-differential equation with kernel K(t) = g0*gamma*exp(-gamma*t):
the characteristic roots z1, z2, the collective amplitude A*(t), the bath
response B_w*(t) and their time derivatives.  All derivatives are exact
(term-by-term), never finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateRootsError, ResonancePoleError
from .model import ModelParams

#: relative threshold below which the two roots count as degenerate
DEGENERACY_RTOL = 1e-8
#: characteristic-polynomial residual allowance, in units of gamma^2
RESIDUAL_RTOL = 1e-10
#: number of coupling steps in the root-labeling homotopy
_HOMOTOPY_STEPS = 16


@dataclass(frozen=True)
class CharacteristicRoots:
    """Complex pole pair of the Laplace-domain response.

    z1 is the bath-like root (z1 -> -gamma as g0 -> 0), z2 the system-like
    root (z2 -> i*Omega).  Both have negative real part for g0 > 0.
    """

    z1: complex
    z2: complex


def _quadratic_pair(Omega: float, g0: float, gamma: float):
    # (z+gamma)(z - i Omega) - i g0 gamma z = 0
    #   <=>  z^2 + (gamma - i(Omega + g0*gamma)) z - i gamma Omega = 0
    b = gamma - 1j * (Omega + g0 * gamma)
    c = -1j * gamma * Omega
    disc = np.sqrt(b * b - 4 * c)
    return (-b - disc) / 2, (-b + disc) / 2


def characteristic_residual(z: complex, params: ModelParams) -> float:
    """|(z+gamma)(z-i Omega) - i g0 gamma z| for a candidate root."""
    return abs((z + params.gamma) * (z - 1j * params.Omega)
               - 1j * params.g0 * params.gamma * z)


def compute_roots(params: ModelParams) -> CharacteristicRoots:
    """Solve the characteristic equation and label the roots by continuity.

    The branch of the complex square root is pinned by a short homotopy in
    the coupling: starting from the exactly factored g0 = 0 pair
    (-gamma, i*Omega), each step assigns the quadratic's two roots to
    (z1, z2) by proximity to the previous step.  This is robust against
    sign-convention drift in printed square-root formulas.
    """
    Omega, g0, gamma = params.Omega, params.g0, params.gamma
    z1, z2 = -gamma + 0j, 1j * Omega
    if g0 > 0:
        for g in np.linspace(g0 / _HOMOTOPY_STEPS, g0, _HOMOTOPY_STEPS):
            r1, r2 = _quadratic_pair(Omega, g, gamma)
            if abs(r1 - z1) + abs(r2 - z2) <= abs(r2 - z1) + abs(r1 - z2):
                z1, z2 = r1, r2
            else:
                z1, z2 = r2, r1

    for z in (z1, z2):
        if characteristic_residual(z, params) > RESIDUAL_RTOL * gamma**2:
            raise ArithmeticError(
                f"characteristic root residual too large for z = {z}")
    if abs(z1 - z2) < DEGENERACY_RTOL * gamma:
        raise DegenerateRootsError(
            f"roots z1 = {z1}, z2 = {z2} are numerically degenerate; "
            "response formulas divide by z1 - z2")
    return CharacteristicRoots(z1=z1, z2=z2)


def memory_kernel(t, params: ModelParams):
    """Dissipative memory kernel K(t) = g0 * gamma * exp(-gamma t), t >= 0."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("memory_kernel requires t >= 0")
    out = params.g0 * params.gamma * np.exp(-params.gamma * t)
    return out if out.ndim else float(out)


def memory_kernel_integral(t, params: ModelParams):
    """Running integral of the kernel: int_0^t K = g0 (1 - exp(-gamma t))."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("memory_kernel_integral requires t >= 0")
    out = params.g0 * -np.expm1(-params.gamma * t)
    return out if out.ndim else float(out)


def _amp_coefficients(roots: CharacteristicRoots, params: ModelParams):
    z1, z2 = roots.z1, roots.z2
    gam, g0 = params.gamma, params.g0
    c1 = (z1 + gam - 1j * g0 * gam) / (z1 - z2)
    c2 = (z2 + gam - 1j * g0 * gam) / (z2 - z1)
    return c1, c2


def amplitude(t, roots: CharacteristicRoots, params: ModelParams):
    """Collective amplitude A*(t) = c1 e^{t z1} + c2 e^{t z2}.

    A*(0) = 1; the conjugate amplitude is A(t) = conj(A*(t)) for real t.
    """
    c1, c2 = _amp_coefficients(roots, params)
    t = np.asarray(t, dtype=float)
    out = c1 * np.exp(t * roots.z1) + c2 * np.exp(t * roots.z2)
    return out if out.ndim else complex(out)


def amplitude_derivative(t, roots: CharacteristicRoots, params: ModelParams):
    """dA*/dt in closed form (z_i-weighted exponentials)."""
    c1, c2 = _amp_coefficients(roots, params)
    t = np.asarray(t, dtype=float)
    out = roots.z1 * c1 * np.exp(t * roots.z1) + roots.z2 * c2 * np.exp(t * roots.z2)
    return out if out.ndim else complex(out)


def amplitude_sq(t, roots: CharacteristicRoots, params: ModelParams):
    """|A*(t)|^2, the occupation memory factor multiplying n(0)."""
    a = amplitude(t, roots, params)
    out = np.abs(np.asarray(a)) ** 2
    return out if out.ndim else float(out)


def _mode_amplitudes(w, roots: CharacteristicRoots, params: ModelParams):
    """Frequency-domain coefficients of the three response modes.

    B_w*(t) = phi_w e^{i w t} + phi_1 e^{t z1} + phi_2 e^{t z2}; algebraically
    identical to the single-fraction residue form but free of the large-w
    cancellations of that form.
    """
    z1, z2, gam = roots.z1, roots.z2, params.gamma
    phi_w = (1j * w + gam) / ((w + 1j * z1) * (w + 1j * z2))
    phi_1 = -1j * (z1 + gam) / ((z1 - z2) * (w + 1j * z1))
    phi_2 = 1j * (z2 + gam) / ((z1 - z2) * (w + 1j * z2))
    return phi_w, phi_1, phi_2


def _check_resonance(w, params: ModelParams):
    if params.g0 == 0.0:
        w = np.atleast_1d(np.asarray(w, dtype=float))
        if np.any(np.abs(w - params.Omega) < 1e-12 * max(params.Omega, 1.0)):
            raise ResonancePoleError(
                "bath response has a pole at w = Omega when g0 = 0")


def bath_response(w, t: float, roots: CharacteristicRoots, params: ModelParams):
    """Driven-mode response B_w*(t); B_w*(0) = 0 identically.

    The e^{i w t} term alone survives dephasing and carries the asymptotic
    occupation.
    """
    _check_resonance(w, params)
    w = np.asarray(w, dtype=float)
    phi_w, phi_1, phi_2 = _mode_amplitudes(w, roots, params)
    out = (phi_w * np.exp(1j * w * t)
           + phi_1 * np.exp(t * roots.z1)
           + phi_2 * np.exp(t * roots.z2))
    return out if out.ndim else complex(out)


def bath_response_derivative(w, t: float, roots: CharacteristicRoots,
                             params: ModelParams):
    """dB_w*/dt, term-by-term; dB_w*/dt(0) = -1 for every w."""
    _check_resonance(w, params)
    w = np.asarray(w, dtype=float)
    phi_w, phi_1, phi_2 = _mode_amplitudes(w, roots, params)
    out = (1j * w * phi_w * np.exp(1j * w * t)
           + roots.z1 * phi_1 * np.exp(t * roots.z1)
           + roots.z2 * phi_2 * np.exp(t * roots.z2))
    return out if out.ndim else complex(out)


def bath_response_tail_coefficient(t, roots: CharacteristicRoots,
                                   params: ModelParams):
    """Large-w drift d(t) in B_w*(t) = (i/w)[e^{i w t} - d(t)] + O(1/w^2).

    d(t) = [(z1+gamma) e^{t z1} - (z2+gamma) e^{t z2}]/(z1 - z2); d(0) = 1.
    Used by the analytic tail correction of the noise-moment quadratures.
    """
    z1, z2, gam = roots.z1, roots.z2, params.gamma
    t = np.asarray(t, dtype=float)
    out = ((z1 + gam) * np.exp(t * z1) - (z2 + gam) * np.exp(t * z2)) / (z1 - z2)
    return out if out.ndim else complex(out)


def bath_response_tail_coefficient_derivative(t, roots: CharacteristicRoots,
                                              params: ModelParams, order: int = 1):
    """Time derivatives d^(k)(t) of the tail drift, for k = order.

    d'(t) also appears directly as the 1/w coefficient of the mode part of
    w B_w*(t); d''(t) enters the time derivative of the second-order tail
    correction.
    """
    z1, z2, gam = roots.z1, roots.z2, params.gamma
    t = np.asarray(t, dtype=float)
    out = (z1**order * (z1 + gam) * np.exp(t * z1)
           - z2**order * (z2 + gam) * np.exp(t * z2)) / (z1 - z2)
    return out if out.ndim else complex(out)
