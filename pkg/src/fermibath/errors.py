"""Exception types shared across the package."""


class FermibathError(Exception):
    """Base class for all package-specific errors."""


class DegenerateRootsError(FermibathError):
    """Characteristic roots closer than the degeneracy threshold.

    Downstream response formulas divide by z1 - z2; double-root parameter
    sets must fail loudly instead of silently losing precision.
    """


class ResonancePoleError(FermibathError):
    """Bath response evaluated on a pole (g0 = 0 with w = Omega)."""


class OccupationDomainError(FermibathError):
    """Bose occupation factor requested at w <= mu (negative or divergent)."""


class QuadratureError(FermibathError):
    """Base class for quadrature failures."""


class QuadratureConvergenceError(QuadratureError):
    """Adaptive integration did not reach tolerance within the panel budget.

    Carries the best available result so callers can inspect how close the
    run came.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class IntegrandEvaluationError(QuadratureError):
    """Integrand returned NaN/Inf; records the offending abscissa."""

    def __init__(self, message, w=None):
        super().__init__(message)
        self.w = w
