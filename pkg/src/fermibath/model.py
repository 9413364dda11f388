"""Physical model: parameters, bath spectral density, occupation factors.

Single unit convention throughout the package: hbar = k_B = 1, every energy
in MeV, every time in MeV^-1.  Nothing elsewhere converts units.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from scipy.special import expit

from .errors import OccupationDomainError


@dataclass(frozen=True)
class UnitSystem:
    """Unit bookkeeping: natural units with a single energy scale."""

    energy_unit: str = "MeV"
    hbar: float = 1.0
    k_B: float = 1.0


UNITS = UnitSystem()


class BathStatistics(Enum):
    """Quantum statistics of the heat-bath modes (selects the occupation
    factor and the sign convention in the anti-ordered noise weight)."""

    FERMI = "fermi"
    BOSE = "bose"


@dataclass(frozen=True)
class ModelParams:
    """Physical configuration of the collective mode + heat bath.

    Attributes
    ----------
    Omega : renormalized collective frequency (MeV), > 0
    g0 : dimensionless coupling strength, >= 0
    gamma : Lorentzian cutoff = inverse bath memory time (MeV), > 0
    T : bath temperature (MeV), >= 0
    mu : chemical potential (MeV); relevant for Fermi statistics,
         must be <= 0 for Bose
    statistics : BathStatistics
    n0 : initial occupation of the collective mode
    """

    Omega: float
    g0: float
    gamma: float
    T: float
    mu: float = 0.0
    statistics: BathStatistics = BathStatistics.FERMI
    n0: float = 0.0

    def __post_init__(self):
        if self.Omega <= 0:
            raise ValueError(f"Omega must be > 0, got {self.Omega}")
        if self.gamma <= 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if self.g0 < 0:
            raise ValueError(f"g0 must be >= 0, got {self.g0}")
        if self.T < 0:
            raise ValueError(f"T must be >= 0, got {self.T}")
        if self.statistics is BathStatistics.FERMI:
            if not 0.0 <= self.n0 <= 1.0:
                raise ValueError(f"Fermi initial occupation must lie in [0,1], got {self.n0}")
        else:
            if self.n0 < 0:
                raise ValueError(f"Bose initial occupation must be >= 0, got {self.n0}")
            if self.mu > 0:
                raise ValueError(f"Bose statistics requires mu <= 0, got mu={self.mu}")
        if self.gamma < 5 * self.Omega:
            warnings.warn(
                f"gamma = {self.gamma} is not large compared to Omega = {self.Omega}; "
                "the theory assumes a broad bath (gamma >> Omega)",
                stacklevel=2,
            )

    def with_statistics(self, statistics: BathStatistics) -> "ModelParams":
        """Twin parameter set with the other statistics (mu reset to the
        Bose-admissible range when needed)."""
        mu = self.mu if statistics is BathStatistics.FERMI else min(self.mu, 0.0)
        n0 = min(self.n0, 1.0) if statistics is BathStatistics.FERMI else self.n0
        return replace(self, statistics=statistics, mu=mu, n0=n0)


def bare_frequency(params: ModelParams) -> float:
    """Unrenormalized frequency omega = Omega + g0*gamma/2.

    The coupling-induced shift is the closed-form frequency integral of the
    Lorentzian coupling density, sum_nu g_nu^2/(hbar^2 w_nu) = g0*gamma/2.
    """
    return params.Omega + params.g0 * params.gamma / 2


def spectral_density(w, params: ModelParams):
    """Ohmic coupling density with Drude (Lorentzian) cutoff.

    J(w) = (1/pi) g0 gamma^2 / (gamma^2 + w^2), defined for w >= 0; this is
    the continuum limit of g_nu^2/(hbar^2 w_nu).
    """
    w = np.asarray(w, dtype=float)
    if np.any(w < 0):
        raise ValueError("spectral_density requires w >= 0")
    out = params.g0 * params.gamma**2 / (np.pi * (params.gamma**2 + w**2))
    return out if out.ndim else float(out)


def occupation_factor(w, params: ModelParams):
    """Equilibrium occupation of a bath mode at frequency w.

    Fermi: 1/(exp[(w-mu)/T] + 1); Bose: 1/(exp[(w-mu)/T] - 1).
    T = 0 is the exact step limit (Fermi: 1 below mu, 1/2 at mu, 0 above;
    Bose: 0 above mu).  Bose evaluation at w <= mu is a domain error.
    """
    w = np.asarray(w, dtype=float)
    scalar = w.ndim == 0
    w = np.atleast_1d(w)
    mu, T = params.mu, params.T

    if params.statistics is BathStatistics.BOSE and np.any(w <= mu):
        bad = float(w[w <= mu][0])
        raise OccupationDomainError(
            f"Bose occupation undefined at w = {bad} <= mu = {mu}")

    if T == 0.0:
        if params.statistics is BathStatistics.FERMI:
            out = np.where(w < mu, 1.0, np.where(w == mu, 0.5, 0.0))
        else:
            out = np.zeros_like(w)
    elif params.statistics is BathStatistics.FERMI:
        out = expit(-(w - mu) / T)
    else:
        x = (w - mu) / T
        with np.errstate(over="ignore"):
            out = 1.0 / np.expm1(x)
        out = np.where(np.isfinite(out), out, 0.0)

    return float(out[0]) if scalar else out


def anti_occupation_factor(w, params: ModelParams):
    """Weight of the anti-ordered noise correlator: 1 - n (Fermi), 1 + n (Bose)."""
    n = occupation_factor(w, params)
    if params.statistics is BathStatistics.FERMI:
        return 1.0 - n
    return 1.0 + n
