import numpy as np
import pytest

from beltrami import (
    BeltramiField,
    ComplexField,
    Disc,
    DomainSpec,
    constant_field,
    cutoff_field,
    gaussian_bump_field,
    linear_coordinate_field,
    make_coordinate_field,
)

# canonical test geometry: unit disc inside [-3, 3]^2 with a 0.8 collar
L, RADIUS, MARGIN = 3.0, 1.0, 0.8


def disc_domain(resolution: int) -> DomainSpec:
    return DomainSpec(L, resolution, Disc(0j, RADIUS), MARGIN)


@pytest.fixture(scope="session")
def dom64():
    return disc_domain(64)


@pytest.fixture(scope="session")
def dom128():
    return disc_domain(128)


@pytest.fixture(scope="session")
def dom256():
    return disc_domain(256)


@pytest.fixture(scope="session")
def dom512():
    return disc_domain(512)


def mu_constant(domain: DomainSpec, value=0.3) -> BeltramiField:
    return BeltramiField.from_raw(constant_field(domain, value))


def mu_linear(domain: DomainSpec, coefficient=0.3) -> BeltramiField:
    return BeltramiField.from_raw(linear_coordinate_field(domain, coefficient))


def mu_bump(domain: DomainSpec, amplitude=0.3) -> BeltramiField:
    return BeltramiField.from_raw(gaussian_bump_field(domain, amplitude, width=0.566))


def corpus(domain: DomainSpec) -> dict:
    """The standard coefficient corpus: constant, linear-z, gaussian bump."""
    return {
        "constant": mu_constant(domain),
        "linear-z": mu_linear(domain),
        "bump": mu_bump(domain),
    }


def smooth_random_field(domain: DomainSpec, seed: int, modes: int = 6,
                        scale: float = 0.2) -> ComplexField:
    """Deterministic low-frequency field tapered to the collar."""
    rng = np.random.default_rng(seed)
    z = make_coordinate_field(domain).samples
    acc = np.zeros_like(z)
    k0 = np.pi / domain.half_width
    for _ in range(modes):
        kx, ky = rng.integers(-3, 4, size=2)
        amp = rng.normal() + 1j * rng.normal()
        acc = acc + amp * np.exp(1j * k0 * (kx * z.real + ky * z.imag))
    acc *= scale * cutoff_field(domain)
    return ComplexField(domain, acc)
