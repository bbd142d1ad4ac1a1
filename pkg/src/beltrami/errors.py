"""Exception types raised by the solvers and transforms."""

from __future__ import annotations


class BeltramiError(Exception):
    """Base class for all library-specific errors."""


class ValidationError(BeltramiError):
    """Invalid domain, field, or configuration data."""


class ContractionTooLarge(BeltramiError):
    """Estimated contraction factor of mu*S is at or above the configured cap.

    Signals that the Beltrami coefficient lies outside the ball on which the
    Neumann series is guaranteed to converge.
    """

    def __init__(self, estimate: float, cap: float):
        super().__init__(
            f"contraction estimate {estimate:.6g} >= cap {cap:.6g}; "
            "refusing to iterate a non-contractive operator"
        )
        self.estimate = estimate
        self.cap = cap


class NoConvergence(BeltramiError):
    """Neumann iteration hit the iteration cap with residual above tolerance.

    Carries the partial state so callers can inspect or export the trace:
    ``phi`` (last iterate, ndarray), ``iterations``, ``final_residual``,
    and ``trace`` (per-iteration sup-norm residuals).
    """

    def __init__(self, phi, iterations: int, final_residual: float, trace):
        super().__init__(
            f"no convergence after {iterations} iterations "
            f"(residual {final_residual:.3e})"
        )
        self.phi = phi
        self.iterations = iterations
        self.final_residual = final_residual
        self.trace = trace


class DegenerateImmersion(BeltramiError):
    """The derivative field g of a computed immersion vanishes somewhere on Omega."""


class DegenerateFrame(BeltramiError):
    """Frame conversion would divide by a vanishing |g| or 1-|mu|^2."""


class RungeApproximationFailure(BeltramiError):
    """A polynomial correction missed its exhaustion step budget.

    Usually means ``taylor_degree`` is too small for the requested accuracy.
    """

    def __init__(self, step: int, error: float, budget: float):
        super().__init__(
            f"exhaustion step {step}: polynomial approximation error "
            f"{error:.3e} exceeds step budget {budget:.3e} "
            "(increase taylor_degree or loosen tol)"
        )
        self.step = step
        self.error = error
        self.budget = budget


class FieldFormatError(BeltramiError):
    """Malformed binary field file."""
