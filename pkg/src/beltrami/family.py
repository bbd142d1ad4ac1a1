"""Moving-frame 1-form algebra and the d-bar solver for coefficient families.

A 1-form beta on Omega is carried as a coefficient pair in one of two frames:
the background frame (dz, dzbar) of the identity coordinate, or the moving
frame (dh, dhbar) of the quasiconformal immersion h attached to a coefficient
mu.  Writing g = dh/dz, the frames convert pointwise by

    A_mu = (A - conj(mu) B) / ((1 - |mu|^2) g)
    B_mu = (B - mu A) / ((1 - |mu|^2) conj(g))

and back by the linear system A = A_mu g + B_mu conj(mu g),
B = A_mu mu g + B_mu conj(g).

The d-bar problem for the structure of mu with moving-frame datum u is
equivalent to the nonhomogeneous Beltrami equation

    f_zbar - mu f_z = (1 - |mu|^2) conj(g) u,

solved by one Neumann inversion followed by the Cauchy transform.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np

from .errors import BeltramiError, DegenerateFrame, ValidationError
from .grid import (
    BeltramiField,
    ComplexField,
    _geometry,
    _holder_seminorm_masked,
    fd_wirtinger_dbar,
    fd_wirtinger_dz,
    interior_mask,
    sup_norm,
    wirtinger_dbar,
    wirtinger_dz,
)
from .solver import SolverConfig, neumann_solve, solve_immersion
from .transforms import cauchy_transform

FRAME_DEGENERACY_TOL = 1e-12


# ---------------------------------------------------------------------------
# 1-forms and frame conversion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OneFormField:
    """Coefficient pair of a 1-form in a named frame.

    ``coeff_10`` multiplies dz (background) or dh (moving); ``coeff_01``
    multiplies dzbar or dhbar.  A moving-frame form remembers the coefficient
    mu whose immersion defines its frame.
    """

    frame: Literal["background", "moving"]
    coeff_10: ComplexField
    coeff_01: ComplexField
    mu: Optional[BeltramiField] = None

    def __post_init__(self):
        if self.frame not in ("background", "moving"):
            raise ValidationError(f"unknown frame {self.frame!r}")
        if self.coeff_10.domain != self.coeff_01.domain:
            raise ValidationError("coefficient fields live on different DomainSpecs")
        if self.frame == "moving" and self.mu is None:
            raise ValidationError("moving-frame forms must carry their mu")

    @property
    def domain(self):
        return self.coeff_10.domain


def _check_frame_regular(mu: BeltramiField, g: ComplexField):
    if mu.domain != g.domain:
        raise ValidationError("mu and g live on different DomainSpecs")
    gmin = float(np.min(np.abs(g.samples)))
    if gmin <= FRAME_DEGENERACY_TOL:
        raise DegenerateFrame(f"|g| vanishes on the grid (min {gmin:.3e})")
    dmin = float(np.min(1.0 - np.abs(mu.extended.samples) ** 2))
    if dmin <= FRAME_DEGENERACY_TOL:
        raise DegenerateFrame(f"1 - |mu|^2 vanishes on the grid (min {dmin:.3e})")


def convert_to_moving(form: OneFormField, mu: BeltramiField,
                      g: ComplexField) -> OneFormField:
    """Convert a background-frame form to the moving frame of (mu, g)."""
    if form.frame != "background":
        raise ValidationError("convert_to_moving expects a background-frame form")
    if form.domain != mu.domain:
        raise ValidationError("form and mu live on different DomainSpecs")
    _check_frame_regular(mu, g)
    m = mu.extended.samples
    gs = g.samples
    denom = (1.0 - np.abs(m) ** 2)
    a, b = form.coeff_10.samples, form.coeff_01.samples
    a_mu = (a - np.conj(m) * b) / (denom * gs)
    b_mu = (b - m * a) / (denom * np.conj(gs))
    return OneFormField("moving",
                        ComplexField(form.domain, a_mu),
                        ComplexField(form.domain, b_mu), mu=mu)


def convert_to_background(form: OneFormField, mu: BeltramiField,
                          g: ComplexField) -> OneFormField:
    """Convert a moving-frame form back to the background frame."""
    if form.frame != "moving":
        raise ValidationError("convert_to_background expects a moving-frame form")
    if form.domain != mu.domain:
        raise ValidationError("form and mu live on different DomainSpecs")
    _check_frame_regular(mu, g)
    m = mu.extended.samples
    gs = g.samples
    a_mu, b_mu = form.coeff_10.samples, form.coeff_01.samples
    a = a_mu * gs + b_mu * np.conj(m * gs)
    b = a_mu * m * gs + b_mu * np.conj(gs)
    return OneFormField("background",
                        ComplexField(form.domain, a),
                        ComplexField(form.domain, b))


# ---------------------------------------------------------------------------
# families of coefficients
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FamilySpec:
    """A one-parameter family of Beltrami coefficients over b in [0, 1].

    law "linear": mu_b = b * base_mu.  law "table": explicit coefficient per
    grid point, aligned with parameter_grid.
    """

    base_mu: BeltramiField
    parameter_grid: tuple
    law: Literal["linear", "table"] = "linear"
    table: Optional[tuple] = None

    def __post_init__(self):
        grid = tuple(float(b) for b in self.parameter_grid)
        object.__setattr__(self, "parameter_grid", grid)
        if len(grid) == 0:
            raise ValidationError("parameter_grid must be nonempty")
        if any(not 0.0 <= b <= 1.0 for b in grid):
            raise ValidationError("parameters must lie in [0, 1]")
        if self.law == "linear":
            if self.table is not None:
                raise ValidationError("linear law takes no table")
        elif self.law == "table":
            if self.table is None or len(self.table) != len(grid):
                raise ValidationError("table law needs one coefficient per parameter")
            object.__setattr__(self, "table", tuple(self.table))
            for entry in self.table:
                if entry.domain != self.base_mu.domain:
                    raise ValidationError("table entries live on different DomainSpecs")
        else:
            raise ValidationError(f"unknown family law {self.law!r}")

    def realize(self, index: int) -> BeltramiField:
        """The coefficient at parameter_grid[index]."""
        if self.law == "linear":
            return self.base_mu.scaled(self.parameter_grid[index])
        return self.table[index]


# ---------------------------------------------------------------------------
# d-bar solves
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DbarDiagnostics:
    iterations: int
    neumann_residual: float
    interior_residual: float          # |f_zbar - mu f_z - rhs| on interior Omega
    moving_frame_residual: float      # |(f_zbar - mu f_z)/((1-|mu|^2) conj(g)) - u|
    trace: tuple = field(repr=False, default=())


@dataclass(frozen=True)
class DbarResult:
    f: ComplexField
    diagnostics: DbarDiagnostics


def solve_dbar(mu: BeltramiField, u: ComplexField,
               cfg: SolverConfig = SolverConfig(),
               method: str = "spectral", immersion=None) -> DbarResult:
    """Solve the d-bar equation for the structure of mu with datum u.

    ``u`` is the moving-frame (0,1) coefficient (cutoff-tapered).  The solve
    reduces to the nonhomogeneous Beltrami equation with right-hand side
    (1 - |mu|^2) conj(g) u and returns the particular solution f = P(phi).
    Both residuals of the result are reported: the background Beltrami
    residual and the equivalent moving-frame one, evaluated with the
    finite-difference derivative route on interior Omega.

    ``immersion`` may pass a precomputed solve_immersion result for mu.
    """
    if mu.domain != u.domain:
        raise ValidationError("mu and u live on different DomainSpecs")
    imm = immersion if immersion is not None else \
        solve_immersion(mu, cfg, method=method)
    m = mu.extended.samples
    rhs_samples = (1.0 - np.abs(m) ** 2) * np.conj(imm.g.samples) * u.samples
    rhs = ComplexField(u.domain, rhs_samples)
    res = neumann_solve(mu, rhs, cfg, method=method)
    f = cauchy_transform(res.phi, method=method)

    inner = interior_mask(u.domain)
    lhs = fd_wirtinger_dbar(f).samples - m * fd_wirtinger_dz(f).samples
    interior_residual = float(np.max(np.abs((lhs - rhs_samples)[inner])))
    denom = ((1.0 - np.abs(m[inner]) ** 2) * np.conj(imm.g.samples[inner]))
    moving_frame_residual = float(np.max(np.abs(lhs[inner] / denom
                                                - u.samples[inner])))
    return DbarResult(
        f=f,
        diagnostics=DbarDiagnostics(
            iterations=res.iterations,
            neumann_residual=res.final_residual,
            interior_residual=interior_residual,
            moving_frame_residual=moving_frame_residual,
            trace=res.trace,
        ),
    )


# relative size above which a would-be (0,1) datum's moving (1,0) part is
# rejected as incompatible with the structure of mu
COMPATIBILITY_RTOL = 1e-8


def solve_dbar_form(mu: BeltramiField, form: OneFormField,
                    cfg: SolverConfig = SolverConfig(),
                    method: str = "spectral") -> DbarResult:
    """Solve the d-bar equation with the datum given as a 1-form.

    Accepts either frame: a background-frame form is converted to the moving
    frame of mu first, so the solve always runs on the normal-form moving
    coefficient.  The form must actually be (0,1) for the structure of mu:
    its moving-frame (1,0) coefficient may not exceed COMPATIBILITY_RTOL
    relative to the (0,1) one.
    """
    if form.domain != mu.domain:
        raise ValidationError("form and mu live on different DomainSpecs")
    imm = solve_immersion(mu, cfg, method=method)
    if form.frame == "background":
        moving = convert_to_moving(form, mu, imm.g)
    else:
        if form.mu is not mu and not np.array_equal(
                form.mu.extended.samples, mu.extended.samples):
            raise ValidationError("form is framed by a different coefficient")
        moving = form
    scale = float(np.max(np.abs(moving.coeff_01.samples)))
    stray = float(np.max(np.abs(moving.coeff_10.samples)))
    if stray > COMPATIBILITY_RTOL * max(scale, 1e-300):
        raise ValidationError(
            f"datum is not a (0,1)-form for this structure: moving (1,0) "
            f"part {stray:.3e} vs (0,1) scale {scale:.3e}"
        )
    return solve_dbar(mu, moving.coeff_01, cfg, method=method, immersion=imm)


@dataclass(frozen=True)
class FamilyEntry:
    b: float
    result: Optional[DbarResult]
    error: Optional[str] = None


@dataclass(frozen=True)
class FamilySweepResult:
    """Per-parameter solutions plus the parameter-regularity report."""

    entries: tuple
    adjacent_differences: tuple   # (b_lo, b_hi, sup|f_hi - f_lo|, ratio) per pair
    lipschitz_constant: Optional[float]
    extrapolation_errors: tuple   # (b, error) per interior quadruple, uniform grids


def _quadratic_extrapolation_gap(f_prev, f_mid, f_next, f_target) -> float:
    """Sup gap between f_target and the quadratic through the three nodes.

    For equispaced parameters the quadratic through (t-d, t, t+d) evaluated at
    t+2d is f_prev - 3 f_mid + 3 f_next; the gap scales like the cube of the
    spacing whenever the parameter dependence is smooth, which is the
    computable surrogate for analytic dependence on the coefficient.
    """
    pred = f_prev.samples - 3.0 * f_mid.samples + 3.0 * f_next.samples
    return float(np.max(np.abs(f_target.samples - pred)))


def solve_family(family: FamilySpec, u_family, cfg: SolverConfig = SolverConfig(),
                 method: str = "spectral", threads: int = 1) -> FamilySweepResult:
    """Solve the d-bar problem at every parameter of the family.

    ``u_family`` is a list of moving-frame data aligned with the parameter
    grid.  Solves are independent per parameter (results are stored by index,
    so thread scheduling cannot change the output); per-parameter failures
    are recorded in their entry rather than failing the sweep.  The report
    carries adjacent sup differences with a single fitted Lipschitz constant,
    and quadratic-extrapolation gaps when the grid is uniform with at least
    four points.
    """
    grid = family.parameter_grid
    if len(u_family) != len(grid):
        raise ValidationError("u_family must align with the parameter grid")
    for u in u_family:
        if u.domain != family.base_mu.domain:
            raise ValidationError("family data live on different DomainSpecs")

    def solve_one(i: int) -> FamilyEntry:
        try:
            result = solve_dbar(family.realize(i), u_family[i], cfg, method=method)
            return FamilyEntry(grid[i], result)
        except BeltramiError as exc:
            return FamilyEntry(grid[i], None, error=str(exc))

    indices = range(len(grid))
    if threads == 1 or len(grid) == 1:
        entries = [solve_one(i) for i in indices]
    else:
        workers = threads if threads > 0 else None
        with ThreadPoolExecutor(max_workers=workers) as pool:
            entries = list(pool.map(solve_one, indices))

    diffs = []
    for lo, hi in zip(entries, entries[1:]):
        if lo.result is None or hi.result is None or hi.b == lo.b:
            continue
        d = sup_norm(hi.result.f - lo.result.f, on_omega=True)
        diffs.append((lo.b, hi.b, d, d / abs(hi.b - lo.b)))
    lipschitz = max((r for *_, r in diffs), default=None)

    extrap = []
    steps = [b2 - b1 for b1, b2 in zip(grid, grid[1:])]
    uniform = steps and all(math.isclose(s, steps[0], rel_tol=1e-12) for s in steps)
    if uniform and len(grid) >= 4:
        for i in range(1, len(grid) - 2):
            window = entries[i - 1:i + 3]
            if any(e.result is None for e in window):
                continue
            gap = _quadratic_extrapolation_gap(*(e.result.f for e in window))
            extrap.append((grid[i + 2], gap))

    return FamilySweepResult(tuple(entries), tuple(diffs), lipschitz, tuple(extrap))


# ---------------------------------------------------------------------------
# gain-of-derivative diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GainReport:
    """Holder-seminorm comparison of a d-bar datum and its solution's gradient.

    A diagnostic artifact, no hard pass/fail: the solution of the d-bar
    problem is expected to be one derivative smoother than the datum, so the
    seminorms of dz f and dzbar f should be finite and stable under grid
    refinement whenever the datum's seminorm is.
    """

    alpha: float
    seminorm_u: float
    seminorm_dz_f: float
    seminorm_dbar_f: float
    ratio_dz: float
    ratio_dbar: float


def gain_of_derivative_report(u: ComplexField, f: ComplexField, alpha: float,
                              pairs: int = 2000, seed: int = 0) -> GainReport:
    """Holder seminorms of u, dz f, dzbar f on interior Omega and their ratios.

    Derivatives of f are spectral (solutions are periodic by construction);
    the seminorms use the randomized pair estimator restricted to the
    reporting interior.
    """
    if not 0.0 < alpha < 1.0:
        raise ValidationError(f"alpha must lie in (0, 1), got {alpha!r}")
    if u.domain != f.domain:
        raise ValidationError("u and f live on different DomainSpecs")
    g = _geometry(u.domain)
    mask = interior_mask(u.domain)

    def semi(field_: ComplexField) -> float:
        return _holder_seminorm_masked(field_.samples, g.z, mask, alpha, pairs, seed)

    s_u = semi(u)
    s_dz = semi(wirtinger_dz(f))
    s_db = semi(wirtinger_dbar(f))

    def ratio(num: float) -> float:
        if s_u == 0.0:
            return 0.0 if num == 0.0 else float("inf")
        return num / s_u

    return GainReport(alpha, s_u, s_dz, s_db, ratio(s_dz), ratio(s_db))
