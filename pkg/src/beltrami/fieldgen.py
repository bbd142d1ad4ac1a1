"""Named test-field generators used by the CLI and the test corpus.

Every generator is deterministic in its parameters.  Field specs are plain
dicts (the CLI config format): {"kind": ..., parameters...}.  Complex scalars
are given either as a number or as a two-element [re, im] list.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .grid import ComplexField, DomainSpec, _geometry, transition_profile

DEFAULT_INDICATOR_WIDTH = 0.3


def _as_complex(value) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValidationError(f"complex values need [re, im], got {value!r}")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, (int, float, complex)):
        return complex(value)
    raise ValidationError(f"cannot interpret {value!r} as a complex scalar")


def constant_field(domain: DomainSpec, value: complex) -> ComplexField:
    return ComplexField(domain, np.full((domain.resolution,) * 2,
                                        _as_complex(value), dtype=np.complex128))


def disc_indicator_field(domain: DomainSpec, amplitude: complex = 1.0,
                         radius: float | None = None,
                         width: float = DEFAULT_INDICATOR_WIDTH) -> ComplexField:
    """Smoothed indicator of a centered disc, taper centered on its boundary.

    The profile is 1 inside radius - width/2, 0 outside radius + width/2, so
    the midpoint-rule mass matches pi * radius^2 to O(width^2) -- within 1%
    for the default width.  The radius defaults to the Omega disc's.
    """
    if radius is None:
        from .grid import Disc
        if not isinstance(domain.omega, Disc):
            raise ValidationError("disc-indicator needs a radius for Rect domains")
        radius = domain.omega.radius
    # width == 2*radius degenerates the flat part to the center point, which
    # is the compactly supported bump profile; wider than that is invalid
    if width <= 0 or width > 2 * radius:
        raise ValidationError(f"indicator width {width!r} out of range")
    g = _geometry(domain)
    rho = np.abs(g.z - (domain.omega.center if hasattr(domain.omega, "center") else 0))
    profile = 1.0 - transition_profile((rho - (radius - width / 2)) / width)
    return ComplexField(domain, _as_complex(amplitude) * profile)


def gaussian_bump_field(domain: DomainSpec, amplitude: complex = 1.0,
                        center: complex = 0j, width: float = 0.4) -> ComplexField:
    """amplitude * exp(-|z - center|^2 / width^2), margin-tapered.

    The cutoff factor gives exact compact support; the peak sits where the
    cutoff is 1, so the sup-norm equals |amplitude|.
    """
    if width <= 0:
        raise ValidationError("gaussian width must be positive")
    g = _geometry(domain)
    bump = np.exp(-np.abs(g.z - _as_complex(center)) ** 2 / width ** 2)
    return ComplexField(domain, _as_complex(amplitude) * bump * g.cutoff)


def linear_coordinate_field(domain: DomainSpec, coefficient: complex) -> ComplexField:
    """c * z; as a Beltrami raw coefficient this is mu(z) = c*z."""
    g = _geometry(domain)
    return ComplexField(domain, _as_complex(coefficient) * g.z)


def builtin_field(spec: dict, domain: DomainSpec) -> ComplexField:
    """Construct a named field from a config spec dict.

    Kinds: constant {value}, disc-indicator {amplitude, radius, width},
    gaussian-bump {amplitude, center, width}, linear-z {coefficient},
    file {path} (the binary field format).
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ValidationError(f"field spec must be a dict with a 'kind', got {spec!r}")
    kind = spec["kind"]
    if kind == "constant":
        return constant_field(domain, spec.get("value", 0.0))
    if kind == "disc-indicator":
        return disc_indicator_field(
            domain,
            amplitude=spec.get("amplitude", 1.0),
            radius=spec.get("radius"),
            width=spec.get("width", DEFAULT_INDICATOR_WIDTH),
        )
    if kind == "gaussian-bump":
        return gaussian_bump_field(
            domain,
            amplitude=spec.get("amplitude", 1.0),
            center=_as_complex(spec.get("center", 0.0)),
            width=spec.get("width", 0.4),
        )
    if kind == "linear-z":
        return linear_coordinate_field(domain, spec.get("coefficient", 0.0))
    if kind == "file":
        from .io import read_field
        if "path" not in spec:
            raise ValidationError("file field spec needs a 'path'")
        return read_field(spec["path"], domain)
    raise ValidationError(f"unknown field kind {kind!r}")
