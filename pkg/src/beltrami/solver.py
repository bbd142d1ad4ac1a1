"""Neumann-series inversion of I - mu*S and quasiconformal immersions.

For a Beltrami coefficient mu with a small contraction factor, the operator
I - mu*S is inverted by the fixed-point iteration

    phi_{k+1} = rhs + mu * S(phi_k),    phi_0 = rhs,

which sums the geometric operator series term by term.  The residual of the
k-th iterate is exactly ||phi_{k+1} - phi_k|| in sup norm, so each iteration
costs one Beurling apply and the stop test is free.

The immersion for the homogeneous Beltrami equation f_zbar = mu * f_z close
to the identity is assembled as h = z + P(phi) with phi the fixed point for
rhs = mu; its z-derivative is g = 1 + S(phi), which must stay away from zero
for h to be an immersion.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ContractionTooLarge,
    DegenerateImmersion,
    NoConvergence,
    ValidationError,
)
from .grid import (
    BeltramiField,
    ComplexField,
    fd_wirtinger_dbar,
    fd_wirtinger_dz,
    interior_mask,
    make_coordinate_field,
)
from .transforms import beurling_transform, cauchy_transform, estimate_contraction

DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for the Neumann iteration.

    tol: sup-norm residual stop for the fixed-point iteration.
    max_iter: iteration cap; exceeding it raises NoConvergence.
    contraction_cap: reject coefficients whose estimated contraction factor
        q reaches this value (the computable stand-in for the smallness ball
        the series needs).
    contraction_iterations: power steps used by the precheck estimate.
    """

    tol: float = 1e-10
    max_iter: int = 200
    contraction_cap: float = 0.9
    contraction_iterations: int = 8

    def __post_init__(self):
        if not self.tol > 0:
            raise ValidationError(f"tol must be positive, got {self.tol!r}")
        if self.max_iter < 1:
            raise ValidationError(f"max_iter must be >= 1, got {self.max_iter!r}")
        if not 0.0 < self.contraction_cap < 1.0:
            raise ValidationError(
                f"contraction_cap must lie in (0, 1), got {self.contraction_cap!r}"
            )
        if self.contraction_iterations < 1:
            raise ValidationError("contraction_iterations must be >= 1")


@dataclass(frozen=True)
class NeumannResult:
    phi: ComplexField
    iterations: int
    final_residual: float
    trace: tuple  # sup-norm residual per iteration


@dataclass(frozen=True)
class ImmersionResult:
    """Immersion h, derivative field g = dh/dz, and the Neumann fixed point."""

    h: ComplexField
    g: ComplexField
    phi: ComplexField
    iterations: int
    final_residual: float
    trace: tuple = field(repr=False, default=())

    def __post_init__(self):
        gmin = float(np.min(np.abs(self.g.samples[interior_mask(self.g.domain)])))
        if gmin <= DEGENERACY_TOL:
            raise DegenerateImmersion(
                f"min |g| on interior Omega is {gmin:.3e} (<= {DEGENERACY_TOL:g})"
            )


def neumann_solve(mu: BeltramiField, rhs: ComplexField,
                  cfg: SolverConfig = SolverConfig(),
                  method: str = "spectral") -> NeumannResult:
    """Invert (I - mu*S) phi = rhs by fixed-point iteration.

    Raises
    ------
    ContractionTooLarge
        If the power-iteration estimate of the contraction factor reaches
        cfg.contraction_cap before any iteration is attempted.
    NoConvergence
        If cfg.max_iter applications leave the residual above cfg.tol; the
        exception carries the partial iterate and the residual trace.
    """
    if mu.domain != rhs.domain:
        raise ValidationError("mu and rhs live on different DomainSpecs")
    q = estimate_contraction(mu, cfg.contraction_iterations, method=method)
    if q >= cfg.contraction_cap:
        raise ContractionTooLarge(q, cfg.contraction_cap)

    m = mu.extended.samples
    r = rhs.samples
    phi = r.copy()
    trace = []
    for k in range(1, cfg.max_iter + 1):
        nxt = r + m * beurling_transform(
            ComplexField(rhs.domain, phi), method=method).samples
        residual = float(np.max(np.abs(nxt - phi)))  # exact residual of phi
        trace.append(residual)
        if residual <= cfg.tol:
            return NeumannResult(ComplexField(rhs.domain, phi), k,
                                 residual, tuple(trace))
        phi = nxt
    raise NoConvergence(phi, cfg.max_iter, trace[-1], tuple(trace))


def solve_immersion(mu: BeltramiField, cfg: SolverConfig = SolverConfig(),
                    method: str = "spectral") -> ImmersionResult:
    """Solve the homogeneous Beltrami equation for the near-identity immersion.

    Returns h = z + P(phi) and g = 1 + S(phi) where phi solves
    (I - mu*S) phi = mu.  For mu identically zero this reduces exactly to
    h = z, g = 1 in one iteration.
    """
    res = neumann_solve(mu, mu.extended, cfg, method=method)
    z = make_coordinate_field(mu.domain)
    h = z + cauchy_transform(res.phi, method=method)
    g = beurling_transform(res.phi, method=method) + 1.0
    return ImmersionResult(h=h, g=g, phi=res.phi, iterations=res.iterations,
                           final_residual=res.final_residual, trace=res.trace)


def beltrami_residual(h: ComplexField, mu: BeltramiField,
                      rhs: ComplexField | None = None) -> float:
    """Sup over interior Omega of |dh/dzbar - mu * dh/dz - rhs|.

    Derivatives are taken with 4th-order centered finite differences, which
    are exact on the affine part z + c*zbar of solver outputs and blind to
    the periodic seam -- an oracle independent of the spectral pipeline.
    rhs None means the homogeneous equation.
    """
    if h.domain != mu.domain:
        raise ValidationError("h and mu live on different DomainSpecs")
    res = (fd_wirtinger_dbar(h).samples
           - mu.extended.samples * fd_wirtinger_dz(h).samples)
    if rhs is not None:
        if rhs.domain != h.domain:
            raise ValidationError("rhs lives on a different DomainSpec")
        res = res - rhs.samples
    return float(np.max(np.abs(res[interior_mask(h.domain)])))
