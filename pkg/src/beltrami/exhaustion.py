"""Global d-bar solve on the plane by disc exhaustion with polynomial correction.

The equation is solved on an increasing sequence of concentric discs inside
one fixed computational square.  After each enlargement the new solution is
reconciled with the previous one: their difference solves the homogeneous
equation on the previous disc, so (for data supported where the structure is
standard) it is holomorphic there and can be approximated by its Taylor
polynomial at the origin -- discs are Runge in the plane, and polynomials are
the globally defined holomorphic functions.  Subtracting that polynomial keeps
every earlier disc's values stable within a geometric per-step budget while
leaving the equation untouched (polynomials are entire, so their d-bar is
zero everywhere).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import RungeApproximationFailure, ValidationError
from .family import DbarResult, solve_dbar
from .grid import (
    BeltramiField,
    ComplexField,
    Disc,
    DomainSpec,
    _geometry,
    rebase,
)
from .solver import SolverConfig

# interpolation patch order for off-grid circle samples; exact through
# polynomial degree PATCH_ORDER - 1 per axis
PATCH_ORDER = 6

CIRCLE_RADIUS_FRACTION = 0.8


@dataclass(frozen=True)
class TaylorJet:
    """Polynomial jet from discrete Cauchy integrals on a circle.

    ``circle_residual`` is the max reconstruction error of the polynomial on
    the sampled circle itself -- O(1) when the input has an antiholomorphic
    part the projection cannot represent, which is the flag consumers check.
    """

    center: complex
    radius: float
    coefficients: tuple
    circle_residual: float
    samples: int

    def evaluate(self, z: np.ndarray) -> np.ndarray:
        acc = np.zeros_like(z, dtype=np.complex128)
        for c in reversed(self.coefficients):
            acc = acc * (z - self.center) + c
        return acc


def _lagrange_patch_interpolate(f: ComplexField, points: np.ndarray) -> np.ndarray:
    """Evaluate a grid field at off-grid points with a 6x6 Lagrange patch."""
    domain = f.domain
    N, L, h = domain.resolution, domain.half_width, domain.spacing
    half = PATCH_ORDER // 2
    out = np.empty(points.shape, dtype=np.complex128)
    for m, p in enumerate(points.ravel()):
        j0 = int(np.floor((p.real + L) / h)) - half + 1
        i0 = int(np.floor((p.imag + L) / h)) - half + 1
        if j0 < 0 or i0 < 0 or j0 + PATCH_ORDER > N or i0 + PATCH_ORDER > N:
            raise ValidationError("interpolation circle leaves the grid")
        jj = np.arange(j0, j0 + PATCH_ORDER)
        ii = np.arange(i0, i0 + PATCH_ORDER)
        xn = -L + h * jj
        yn = -L + h * ii
        wx = np.empty(PATCH_ORDER)
        wy = np.empty(PATCH_ORDER)
        for a in range(PATCH_ORDER):
            wx[a] = np.prod((p.real - np.delete(xn, a)) / (xn[a] - np.delete(xn, a)))
            wy[a] = np.prod((p.imag - np.delete(yn, a)) / (yn[a] - np.delete(yn, a)))
        out.ravel()[m] = wy @ f.samples[np.ix_(ii, jj)] @ wx
    return out


def taylor_project(f: ComplexField, center: complex, degree: int,
                   circle_radius: float, samples: int | None = None) -> TaylorJet:
    """Taylor coefficients of f at ``center`` by circle Cauchy integrals.

    a_k = (1 / 2 pi i) contour integral of f(zeta) / (zeta - center)^(k+1),
    evaluated by the trapezoid rule on ``samples`` equispaced circle points
    (default max(64, 8*degree); the trapezoid rule is spectrally accurate for
    periodic integrands).  Off-grid circle values come from a local Lagrange
    patch, exact on polynomials through degree 5.

    The jet represents f only where f is holomorphic inside the circle; the
    returned circle_residual flags inputs that are not.
    """
    if degree < 0:
        raise ValidationError("degree must be nonnegative")
    if circle_radius <= 0:
        raise ValidationError("circle_radius must be positive")
    if samples is None:
        samples = max(64, 8 * max(degree, 1))
    theta = 2.0 * np.pi * np.arange(samples) / samples
    ring = center + circle_radius * np.exp(1j * theta)
    values = _lagrange_patch_interpolate(f, ring)
    # trapezoid rule on the circle: a_k = mean(values * e^{-ik theta}) / r^k
    phases = np.exp(-1j * np.outer(np.arange(degree + 1), theta))
    coeffs = (phases @ values) / samples / circle_radius ** np.arange(degree + 1)
    jet = TaylorJet(center, circle_radius, tuple(coeffs), 0.0, samples)
    residual = float(np.max(np.abs(values - jet.evaluate(ring))))
    return replace(jet, circle_residual=residual)


@dataclass(frozen=True)
class ExhaustionStep:
    step: int
    radius: float
    iterations: int
    correction_sup: float     # sup of the subtracted polynomial on the previous disc
    approx_error: float       # post-correction disagreement on the previous disc
    budget: float


@dataclass(frozen=True)
class ExhaustionTrace:
    steps: tuple


def exhaustion_solve(mu: BeltramiField, u: ComplexField,
                     radii: Sequence[float], taylor_degree: int,
                     cfg: SolverConfig = SolverConfig(),
                     method: str = "spectral") -> tuple[ComplexField, ExhaustionTrace]:
    """Solve the d-bar problem on the plane by exhausting with concentric discs.

    ``mu`` and ``u`` must be supported inside the first disc (the exhaustion
    then exercises only the correction mechanics; wide data additionally
    triggers genuine corrections and, with a small ``taylor_degree``,
    RungeApproximationFailure).  Each step re-tapers the raw data to its disc,
    solves there, projects the difference with the previous solution onto a
    degree <= taylor_degree polynomial via Cauchy integrals on the circle of
    radius 0.8 * previous_radius, and subtracts it, so earlier discs stay
    fixed within the geometric budget 2^-step * cfg.tol.

    With a single radius this is exactly solve_dbar on that disc.
    """
    radii = [float(r) for r in radii]
    if len(radii) == 0:
        raise ValidationError("radii must be nonempty")
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValidationError("radii must be strictly increasing")
    if taylor_degree < 1:
        raise ValidationError("taylor_degree must be >= 1")
    base = mu.domain
    if radii[-1] >= base.half_width - base.margin:
        raise ValidationError("last radius must satisfy r < L - margin")

    def step_domain(r: float) -> DomainSpec:
        return DomainSpec(base.half_width, base.resolution, Disc(0j, r), base.margin)

    def solve_on(domain: DomainSpec) -> DbarResult:
        mu_n = BeltramiField.from_raw(rebase(mu.raw, domain))
        u_n = ComplexField(domain, _geometry(domain).cutoff * u.samples)
        return solve_dbar(mu_n, u_n, cfg, method=method)

    first = solve_on(step_domain(radii[0]))
    current = first.f
    steps = [ExhaustionStep(1, radii[0], first.diagnostics.iterations,
                            0.0, 0.0, cfg.tol * 0.5)]
    if len(radii) == 1:
        return current, ExhaustionTrace(tuple(steps))

    for n, r in enumerate(radii[1:], start=2):
        prev_radius = radii[n - 2]
        prev_mask = np.abs(_geometry(base).z) <= prev_radius
        result = solve_on(step_domain(r))
        diff_samples = result.f.samples - current.samples
        diff = ComplexField(result.f.domain, diff_samples)
        jet = taylor_project(diff, 0j, taylor_degree,
                             CIRCLE_RADIUS_FRACTION * prev_radius)
        poly = jet.evaluate(_geometry(result.f.domain).z)
        budget = (0.5 ** n) * cfg.tol
        approx_error = float(np.max(np.abs((diff_samples - poly)[prev_mask])))
        if approx_error > budget:
            raise RungeApproximationFailure(n, approx_error, budget)
        current = ComplexField(result.f.domain, result.f.samples - poly)
        steps.append(ExhaustionStep(
            n, r, result.diagnostics.iterations,
            float(np.max(np.abs(poly[prev_mask]))), approx_error, budget))

    return current, ExhaustionTrace(tuple(steps))
