"""
Error Types
===========

Exception hierarchy shared by every module of the toolkit.

Certificate failures are not errors: they are recorded in a Verdict.
The exceptions below signal invalid input, degenerate geometry or a
numerical procedure that could not finish.
"""

from typing import Optional


class MoebiusError(Exception):
    """Base class for all toolkit errors"""


# -----------------------------------------------------------------------------
# Algebra
# -----------------------------------------------------------------------------

class ZeroPolynomial(MoebiusError):
    """Raised when a root count is requested for the zero polynomial"""


class NotReducible(MoebiusError):
    """Raised when radical elimination cannot reach a polynomial"""


# -----------------------------------------------------------------------------
# Slope domain
# -----------------------------------------------------------------------------

class PsiPole(MoebiusError):
    """Raised when psi is evaluated where b - t + T = 0"""


# -----------------------------------------------------------------------------
# Bands
# -----------------------------------------------------------------------------

class ClosureFailure(MoebiusError):
    """Raised when a folded band does not close up under the Moebius gluing"""

    def __init__(self, residual: float, message: Optional[str] = None):
        self.residual = float(residual)
        super().__init__(message or f"band does not close: residual {self.residual:.3e}")


class DegenerateBand(MoebiusError):
    """Raised for bands with zero-length core edges or collapsed facets"""


class DegeneratePattern(MoebiusError):
    """Raised when a T-pattern cannot be normalized"""


class ProjectionDegenerate(MoebiusError):
    """Raised when a bend image is vertical and has no pitch"""


class NotSim(MoebiusError):
    """Raised when a normalized band is not a special immersed band"""


class ParseError(MoebiusError):
    """Raised for malformed band files"""


# -----------------------------------------------------------------------------
# Example reconstruction
# -----------------------------------------------------------------------------

class InvalidLayout(MoebiusError):
    """Raised when fold parameters do not give a valid flat layout"""


class NoConvergence(MoebiusError):
    """Raised when the (d, e) solve does not reach its residual target"""

    def __init__(self, residual, iterations: int):
        self.residual = residual
        self.iterations = iterations
        super().__init__(f"no convergence after {iterations} iterations: residual {float(residual):.3e}")


# -----------------------------------------------------------------------------
# Command line
# -----------------------------------------------------------------------------

class UnknownCertificate(MoebiusError):
    """Raised for a certificate id that is not registered"""
