"""Uniform-grid complex fields on a rectangle with Wirtinger calculus.

The computational domain is the square [-L, L]^2 sampled on an N x N grid with
spacing h = 2L/N; sample (i, j) sits at x = -L + j*h, y = -L + i*h (row-major,
so the point x = +L is identified with x = -L by periodicity).  A working
subdomain Omega (disc or axis-aligned rectangle) sits well inside the square,
separated from its edge by a margin collar.  Fields produced by the solvers
are identically zero outside Omega plus the collar, which makes them
compatible with the periodic spectral transforms.

Wirtinger derivatives d/dz = (d/dx - i d/dy)/2 and d/dzbar = (d/dx + i d/dy)/2
are computed by Fourier differentiation on the periodic square.  Their
accuracy contract holds on Omega for fields that are smooth on the square and
near-periodic; the margin cutoff exists precisely to put solver data in that
class.  Fourth-order centered finite differences are also provided: they are
insensitive to the periodic seam and serve as the independent derivative route
for the residual checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np
from scipy.special import erf

from .errors import ValidationError

# Sharpness of the erf transition used by the margin cutoff.  At 4.5 the
# profile is numerically exactly 0/1 at the collar ends (tails ~1e-10) while
# its Gaussian spectrum is still resolved at N = 64 on the default geometry.
CUTOFF_SHARPNESS = 4.5

# Interior-of-Omega convention for residual reporting: grid points at distance
# >= 2*margin/3 from the Omega boundary, on the inside.
INTERIOR_DEPTH_FRACTION = 2.0 / 3.0

MIN_RESOLUTION = 16


# ---------------------------------------------------------------------------
# domain specification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Disc:
    center: complex
    radius: float


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle with corners (x0, y0) and (x1, y1)."""

    x0: float
    y0: float
    x1: float
    y1: float


Shape = Union[Disc, Rect]


@dataclass(frozen=True)
class DomainSpec:
    """Computational square plus the working subdomain Omega.

    Parameters
    ----------
    half_width : float
        Half-width L of the square [-L, L]^2.
    resolution : int
        Number of samples N per axis; even, at least 16.
    omega : Disc or Rect
        The working subdomain.  Its closure plus the margin collar must fit
        strictly inside the open square.
    margin : float
        Width of the cutoff collar between the boundary of Omega and the
        region where extended fields vanish.
    """

    half_width: float
    resolution: int
    omega: Shape
    margin: float

    def __post_init__(self):
        L, N = self.half_width, self.resolution
        if not (isinstance(N, (int, np.integer)) and N >= MIN_RESOLUTION and N % 2 == 0):
            raise ValidationError(
                f"resolution must be an even integer >= {MIN_RESOLUTION}, got {N!r}"
            )
        if not L > 0:
            raise ValidationError(f"half_width must be positive, got {L!r}")
        if not self.margin > 0:
            raise ValidationError(f"margin must be positive, got {self.margin!r}")
        if isinstance(self.omega, Disc):
            if not self.omega.radius > 0:
                raise ValidationError("disc radius must be positive")
            cx, cy = self.omega.center.real, self.omega.center.imag
            span = self.omega.radius + self.margin
            if abs(cx) + span >= L or abs(cy) + span >= L:
                raise ValidationError(
                    "omega plus margin collar does not fit inside the open square"
                )
        elif isinstance(self.omega, Rect):
            r = self.omega
            if not (r.x0 < r.x1 and r.y0 < r.y1):
                raise ValidationError("rectangle corners must satisfy x0 < x1, y0 < y1")
            if (max(abs(r.x0), abs(r.x1)) + self.margin >= L
                    or max(abs(r.y0), abs(r.y1)) + self.margin >= L):
                raise ValidationError(
                    "omega plus margin collar does not fit inside the open square"
                )
        else:
            raise ValidationError(f"unsupported omega shape: {self.omega!r}")

    @property
    def spacing(self) -> float:
        """Grid spacing h = 2L/N, uniform in both axes."""
        return 2.0 * self.half_width / self.resolution


# ---------------------------------------------------------------------------
# cached per-domain geometry tables
# ---------------------------------------------------------------------------

def transition_profile(t) -> np.ndarray:
    """Smooth 0 -> 1 transition on [0, 1] (the margin "smoothstep" profile).

    Rescaled erf(CUTOFF_SHARPNESS * (2t - 1)), clamped exactly to 0 and 1 at
    the ends; the erf tails there are ~1e-10, below every tolerance in the
    library.  A mollified step with a Gaussian spectrum: fields built from it
    are spectrally resolved once the transition covers a few grid cells.
    """
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    out = 0.5 * (1.0 + erf(CUTOFF_SHARPNESS * (2.0 * t - 1.0)))
    out = np.where(t <= 0.0, 0.0, out)
    out = np.where(t >= 1.0, 1.0, out)
    return out


def _signed_distance(domain: DomainSpec, z: np.ndarray) -> np.ndarray:
    """Signed distance to the boundary of Omega (negative inside)."""
    if isinstance(domain.omega, Disc):
        return np.abs(z - domain.omega.center) - domain.omega.radius
    r = domain.omega
    x, y = z.real, z.imag
    dx = np.maximum(r.x0 - x, x - r.x1)
    dy = np.maximum(r.y0 - y, y - r.y1)
    outside = np.hypot(np.maximum(dx, 0.0), np.maximum(dy, 0.0))
    inside = np.minimum(np.maximum(dx, dy), 0.0)
    return np.where((dx > 0) | (dy > 0), outside, inside)


class _Geometry:
    """Immutable per-domain tables shared by every operation on that domain."""

    def __init__(self, domain: DomainSpec):
        L, N = domain.half_width, domain.resolution
        h = domain.spacing
        axis = -L + h * np.arange(N)
        X, Y = np.meshgrid(axis, axis)
        self.z = X + 1j * Y
        dist = _signed_distance(domain, self.z)
        self.omega_mask = dist <= 0.0
        self.interior_mask = dist <= -INTERIOR_DEPTH_FRACTION * domain.margin
        # cutoff: 1 on the closure of Omega, 0 beyond the collar
        self.cutoff = 1.0 - transition_profile(np.maximum(dist, 0.0) / domain.margin)
        self.support_mask = self.cutoff > 0.0
        for arr in (self.z, self.cutoff, self.omega_mask,
                    self.interior_mask, self.support_mask):
            arr.setflags(write=False)


@lru_cache(maxsize=64)
def _geometry(domain: DomainSpec) -> _Geometry:
    return _Geometry(domain)


def omega_mask(domain: DomainSpec) -> np.ndarray:
    """Boolean mask of grid points in the closure of Omega."""
    return _geometry(domain).omega_mask


def interior_mask(domain: DomainSpec) -> np.ndarray:
    """Mask of the residual-reporting interior (2*margin/3 inside Omega)."""
    return _geometry(domain).interior_mask


def cutoff_field(domain: DomainSpec) -> np.ndarray:
    """The margin cutoff: 1 on the closure of Omega, 0 outside the collar."""
    return _geometry(domain).cutoff


# ---------------------------------------------------------------------------
# fields
# ---------------------------------------------------------------------------

class ComplexField:
    """A sampled complex-valued function on the grid of a DomainSpec.

    Immutable: the sample array is read-only after construction, and all
    operations return new fields.  Two fields can be combined arithmetically
    only when their DomainSpec values are identical.
    """

    __slots__ = ("domain", "samples")

    def __init__(self, domain: DomainSpec, samples: np.ndarray):
        samples = np.ascontiguousarray(samples, dtype=np.complex128)
        N = domain.resolution
        if samples.shape != (N, N):
            raise ValidationError(
                f"samples shape {samples.shape} does not match resolution {N}"
            )
        if not np.all(np.isfinite(samples.view(np.float64))):
            raise ValidationError("field samples contain NaN or Inf")
        samples.setflags(write=False)
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "samples", samples)

    def __setattr__(self, name, value):
        raise AttributeError("ComplexField is immutable")

    def _check_compatible(self, other: "ComplexField"):
        if self.domain != other.domain:
            raise ValidationError("fields live on different DomainSpecs")

    def __add__(self, other):
        if isinstance(other, ComplexField):
            self._check_compatible(other)
            return ComplexField(self.domain, self.samples + other.samples)
        return ComplexField(self.domain, self.samples + other)

    def __sub__(self, other):
        if isinstance(other, ComplexField):
            self._check_compatible(other)
            return ComplexField(self.domain, self.samples - other.samples)
        return ComplexField(self.domain, self.samples - other)

    def __mul__(self, other):
        if isinstance(other, ComplexField):
            self._check_compatible(other)
            return ComplexField(self.domain, self.samples * other.samples)
        return ComplexField(self.domain, self.samples * other)

    __rmul__ = __mul__

    def __neg__(self):
        return ComplexField(self.domain, -self.samples)

    def conj(self) -> "ComplexField":
        return ComplexField(self.domain, np.conj(self.samples))

    def __repr__(self):
        N = self.domain.resolution
        return f"ComplexField(N={N}, L={self.domain.half_width})"


def rebase(field: ComplexField, domain: DomainSpec) -> ComplexField:
    """Reinterpret a field's samples on another DomainSpec of the same grid.

    The deliberate escape hatch from the same-domain combination rule, used
    when Omega changes but the (N, L) grid does not (exhaustion steps).
    """
    if (field.domain.resolution != domain.resolution
            or field.domain.half_width != domain.half_width):
        raise ValidationError("rebase requires identical (resolution, half_width)")
    return ComplexField(domain, field.samples)


def make_coordinate_field(domain: DomainSpec) -> ComplexField:
    """Sample the identity coordinate z = x + iy on the grid."""
    return ComplexField(domain, _geometry(domain).z)


def tapered_coordinate_conjugate(domain: DomainSpec) -> ComplexField:
    """The margin-tapered conjugate coordinate: cutoff * conj(z).

    Identically conj(z) on the closure of Omega, zero outside the collar, and
    d/dzbar of it is 1 on Omega.  This is the profile that carries the mean
    component through the periodic Cauchy transform.
    """
    g = _geometry(domain)
    return ComplexField(domain, g.cutoff * np.conj(g.z))


class BeltramiField:
    """A Beltrami coefficient mu with |mu| < 1 and its cutoff extension.

    ``raw`` holds the coefficient as given (meaningful on the closure of
    Omega); ``extended`` is cutoff * raw, which agrees with raw on Omega,
    vanishes outside the margin collar, and is the field every transform and
    solver actually consumes.
    """

    __slots__ = ("raw", "extended", "sup_norm")

    def __init__(self, raw: ComplexField, extended: ComplexField):
        if raw.domain != extended.domain:
            raise ValidationError("raw and extended fields must share a DomainSpec")
        s = float(np.max(np.abs(extended.samples)))
        if s >= 1.0:
            raise ValidationError(
                f"extended Beltrami coefficient has sup-norm {s:.6g} >= 1"
            )
        object.__setattr__(self, "raw", raw)
        object.__setattr__(self, "extended", extended)
        object.__setattr__(self, "sup_norm", s)

    def __setattr__(self, name, value):
        raise AttributeError("BeltramiField is immutable")

    @classmethod
    def from_raw(cls, raw: ComplexField) -> "BeltramiField":
        extended = ComplexField(raw.domain, cutoff_field(raw.domain) * raw.samples)
        return cls(raw, extended)

    def scaled(self, factor: float) -> "BeltramiField":
        """The coefficient factor * mu (cutoff extension is linear in raw)."""
        if not 0.0 <= factor <= 1.0:
            raise ValidationError("scaling factor must lie in [0, 1]")
        return BeltramiField(
            ComplexField(self.raw.domain, factor * self.raw.samples),
            ComplexField(self.extended.domain, factor * self.extended.samples),
        )

    @property
    def domain(self) -> DomainSpec:
        return self.raw.domain

    def __repr__(self):
        return f"BeltramiField(sup_norm={self.sup_norm:.4g}, {self.raw!r})"


# ---------------------------------------------------------------------------
# spectral Wirtinger derivatives
# ---------------------------------------------------------------------------

@lru_cache(maxsize=64)
def _dz_multiplier(resolution: int, half_width: float) -> np.ndarray:
    h = 2.0 * half_width / resolution
    k = 2.0 * np.pi * np.fft.fftfreq(resolution, d=h)
    KX, KY = np.meshgrid(k, k)
    m = 0.5j * (KX - 1j * KY)
    if resolution % 2 == 0:
        m[resolution // 2, :] = 0.0  # Nyquist has no signed partner
        m[:, resolution // 2] = 0.0
    m.setflags(write=False)
    return m


def wirtinger_dz(f: ComplexField) -> ComplexField:
    """Spectral d/dz = (d/dx - i d/dy)/2 on the periodic square.

    Accurate on Omega for fields smooth on the square and near-periodic
    (all solver-produced fields, by construction of the margin).
    """
    m = _dz_multiplier(f.domain.resolution, f.domain.half_width)
    return ComplexField(f.domain, np.fft.ifft2(m * np.fft.fft2(f.samples)))


def wirtinger_dbar(f: ComplexField) -> ComplexField:
    """Spectral d/dzbar = (d/dx + i d/dy)/2 on the periodic square.

    Implemented as conj(dz(conj(f))), so the conjugation symmetry
    dbar(f) == conj(dz(conj(f))) holds bit for bit.
    """
    return wirtinger_dz(f.conj()).conj()


# ---------------------------------------------------------------------------
# finite-difference Wirtinger derivatives (seam-insensitive)
# ---------------------------------------------------------------------------

def _fd4(samples: np.ndarray, axis: int, h: float) -> np.ndarray:
    r = np.roll
    return (-r(samples, -2, axis) + 8 * r(samples, -1, axis)
            - 8 * r(samples, 1, axis) + r(samples, 2, axis)) / (12.0 * h)


def fd_wirtinger_dz(f: ComplexField) -> ComplexField:
    """4th-order centered-difference d/dz; exact on affine fields.

    Local stencil, so the periodic wrap only touches the outermost two rows
    and columns, far outside Omega.  Used by the residual checks as the
    derivative route independent of the spectral pipeline.
    """
    h = f.domain.spacing
    fx = _fd4(f.samples, 1, h)
    fy = _fd4(f.samples, 0, h)
    return ComplexField(f.domain, 0.5 * (fx - 1j * fy))


def fd_wirtinger_dbar(f: ComplexField) -> ComplexField:
    """4th-order centered-difference d/dzbar; see fd_wirtinger_dz."""
    h = f.domain.spacing
    fx = _fd4(f.samples, 1, h)
    fy = _fd4(f.samples, 0, h)
    return ComplexField(f.domain, 0.5 * (fx + 1j * fy))


# ---------------------------------------------------------------------------
# norms and seminorms
# ---------------------------------------------------------------------------

def sup_norm(f: ComplexField, on_omega: bool = True) -> float:
    """Max of |samples| over Omega (default) or over the whole square."""
    if on_omega:
        return float(np.max(np.abs(f.samples[omega_mask(f.domain)])))
    return float(np.max(np.abs(f.samples)))


def _holder_seminorm_masked(samples: np.ndarray, z: np.ndarray, mask: np.ndarray,
                            alpha: float, pairs: int, seed: int) -> float:
    pts = np.flatnonzero(mask.ravel())
    vals = samples.ravel()[pts]
    zs = z.ravel()[pts]
    rng = np.random.default_rng(seed)
    # one deterministic stream: the first k draws are a prefix of the first
    # k' > k draws, so the running max never decreases when pairs grows
    idx = rng.integers(0, len(pts), size=(pairs, 2))
    keep = idx[:, 0] != idx[:, 1]
    if not np.any(keep):
        return 0.0
    a, b = idx[keep, 0], idx[keep, 1]
    num = np.abs(vals[a] - vals[b])
    den = np.abs(zs[a] - zs[b]) ** alpha
    return float(np.max(num / den))


def holder_seminorm(f: ComplexField, alpha: float, pairs: int, seed: int) -> float:
    """Randomized Holder-alpha seminorm surrogate over grid points of Omega.

    Max of |f(x) - f(y)| / |x - y|^alpha over ``pairs`` pseudo-random pairs of
    distinct Omega grid points; deterministic given ``seed``, and monotone
    under extending ``pairs`` with the same seed.  The exact grid seminorm is
    an O(N^4) pair scan, affordable only at small N (the tests do it there).
    """
    if not 0.0 < alpha < 1.0:
        raise ValidationError(f"alpha must lie in (0, 1), got {alpha!r}")
    if pairs < 1:
        raise ValidationError(f"pairs must be >= 1, got {pairs!r}")
    g = _geometry(f.domain)
    return _holder_seminorm_masked(f.samples, g.z, g.omega_mask, alpha, pairs, seed)
