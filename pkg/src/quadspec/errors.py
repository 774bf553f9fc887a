"""Exception hierarchy shared across the package.

Two families matter for the CLI exit-code contract: ``InputError`` maps to
exit code 2 (bad or inconsistent input data) and ``NumericalError`` maps to
exit code 3 (a computation that did not converge or is outside the method's
reliable range).
"""


class QuadSpecError(Exception):
    """Base class for all package errors."""


class InputError(QuadSpecError):
    """Invalid input data (malformed matrices, broken invariants)."""


class NumericalError(QuadSpecError):
    """A numerical procedure failed to converge or lost reliability."""


# -- matcore --------------------------------------------------------------

class NotSymmetric(InputError):
    """Matrix expected to be complex symmetric is not."""


class NotPositiveDefinite(InputError):
    """Hermitian matrix expected to be positive definite is not."""


class BoundaryEigenvalue(NumericalError):
    """An eigenvalue sits too close to a spectral decision boundary."""


# -- symplectic -----------------------------------------------------------

class RealEigenvalue(NumericalError):
    """Hamilton map has an eigenvalue too close to the real axis."""


# -- normalform -----------------------------------------------------------

class GraphSingular(NumericalError):
    """Lagrangian plane is not a graph over the base (x-block singular)."""


class NotNegative(InputError):
    """Expected a negative Lagrangian plane (-Im A positive definite)."""


class NotPositive(InputError):
    """Expected a positive Lagrangian plane (Im A positive definite)."""


class SingularPencil(NumericalError):
    """1 + C_+ is numerically singular; the inverse Cayley map is undefined."""


class DegenerateTransport(NumericalError):
    """D - F B singular: Gaussian degenerates to a delta distribution."""


# -- weights --------------------------------------------------------------

class NotConvex(InputError):
    """Weight is not strictly convex."""


class QuadratureNotConverged(NumericalError):
    """Two quadrature refinements disagree beyond tolerance."""


# -- spectral -------------------------------------------------------------

class DegenerateCplus(InputError):
    """|C_+| below threshold: the asymptotic expansion is vacuous."""


class OptimizerNotConverged(NumericalError):
    """Multistart sphere optimization spread exceeds tolerance."""
