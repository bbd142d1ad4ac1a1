"""Cauchy transform P and Beurling transform S.

Kernel conventions on the plane:

    P(phi)(z) = (1/pi) integral of phi(zeta) / (z - zeta) dA(zeta)
    S(phi)    = d/dz P(phi)   (principal value kernel -1/(pi (z - zeta)^2))

so that d/dzbar P(phi) = phi.  Two implementations are provided:

``spectral``
    The Fourier multiplier of convolution by 1/(pi z) on the periodic square,
    with the zero mode pinned to 0.  The constant Fourier mode has no periodic
    antiderivative under d/dzbar, so the mean of phi is routed through the
    margin-tapered conjugate coordinate W = cutoff * conj(z) (which satisfies
    d/dzbar W = 1 on Omega); this keeps the inversion contract
    d/dzbar P(phi) = phi exact on Omega for data of any mean.

``quadrature``
    Pointwise midpoint rule for the area integral over the whole square, with
    the singular cell replaced by the exact integral of the kernel over the
    square cell centered at the singularity -- which is 0, by the antisymmetry
    of 1/zeta under zeta -> -zeta (and of 1/zeta^2 under a quarter turn).
    Evaluated as an aperiodic convolution via zero-padded FFT; the result is
    identical to the O(N^4) direct sum at machine precision (the tests check
    this).  The additive constant of P is re-pinned to the spectral
    convention so both methods answer in the same gauge.

The spectral path is the production route; quadrature is the slow,
free-space oracle used by the cross-method acceptance checks.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import ValidationError
from .grid import (
    BeltramiField,
    ComplexField,
    DomainSpec,
    _geometry,
)

METHODS = ("spectral", "quadrature")


def _check_method(method: str):
    if method not in METHODS:
        raise ValidationError(
            f"unsupported method {method!r}; expected one of {METHODS}"
        )


# ---------------------------------------------------------------------------
# spectral plan
# ---------------------------------------------------------------------------

class _SpectralPlan:
    """Fourier multiplier tables for one (N, L) grid plus one domain's taper.

    m_P is 1 / symbol(d/dzbar) = 2/(i*xi) away from the zero mode and the
    Nyquist lines; m_S = symbol(d/dz) * m_P = conj(xi)/xi, the classical
    unimodular Beurling symbol.  ``w`` is the tapered conjugate coordinate
    carrying the mean mode and ``dz_w`` its spectral z-derivative, so the
    identity S = d/dz o P holds exactly, mean mode included.
    """

    def __init__(self, domain: DomainSpec):
        N, L = domain.resolution, domain.half_width
        h = domain.spacing
        k = 2.0 * np.pi * np.fft.fftfreq(N, d=h)
        KX, KY = np.meshgrid(k, k)
        keep = np.ones((N, N))
        keep[N // 2, :] = 0.0
        keep[:, N // 2] = 0.0
        xi = KX + 1j * KY
        with np.errstate(divide="ignore", invalid="ignore"):
            m_P = np.where(np.abs(xi) > 0, 2.0 / (1j * xi), 0.0) * keep
        m_P[0, 0] = 0.0
        m_dz = 0.5j * np.conj(xi) * keep
        self.m_P = m_P
        self.m_S = m_dz * m_P
        g = _geometry(domain)
        self.w = g.cutoff * np.conj(g.z)
        self.w_mean = complex(np.mean(self.w))
        self.dz_w = np.fft.ifft2(m_dz * np.fft.fft2(self.w))
        for arr in (self.m_P, self.m_S, self.w, self.dz_w):
            arr.setflags(write=False)


@lru_cache(maxsize=64)
def _plan(domain: DomainSpec) -> _SpectralPlan:
    return _SpectralPlan(domain)


def _cauchy_spectral(samples: np.ndarray, plan: _SpectralPlan) -> np.ndarray:
    spec = np.fft.fft2(samples)
    mean = spec[0, 0] / samples.size
    return np.fft.ifft2(plan.m_P * spec) + mean * plan.w


def _beurling_spectral(samples: np.ndarray, plan: _SpectralPlan) -> np.ndarray:
    spec = np.fft.fft2(samples)
    mean = spec[0, 0] / samples.size
    return np.fft.ifft2(plan.m_S * spec) + mean * plan.dz_w


# ---------------------------------------------------------------------------
# quadrature plan
# ---------------------------------------------------------------------------

class _QuadraturePlan:
    """FFT tables for the zero-padded free-space kernel convolutions."""

    def __init__(self, domain: DomainSpec):
        N = domain.resolution
        h = domain.spacing
        M = 2 * N
        idx = np.arange(M)
        off = (idx + N) % M - N          # lattice offsets, [-N, N-1]
        DJ, DI = np.meshgrid(off, off)   # DJ: x offset, DI: y offset
        w = (DJ * h) + 1j * (DI * h)
        unused = (DI == -N) | (DJ == -N)  # slots no aperiodic pair reaches
        diag = (DI == 0) & (DJ == 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            cauchy = 1.0 / (np.pi * w)
            beurling = -1.0 / (np.pi * w * w)
        for kern in (cauchy, beurling):
            kern[diag] = 0.0  # exact centered-cell integral vanishes
            kern[unused] = 0.0
        self.cauchy_hat = np.fft.fft2(cauchy)
        self.beurling_hat = np.fft.fft2(beurling)
        self.cell_area = h * h


@lru_cache(maxsize=16)
def _quad_plan(domain: DomainSpec) -> _QuadraturePlan:
    return _QuadraturePlan(domain)


def _quad_convolve(samples: np.ndarray, kernel_hat: np.ndarray,
                   cell_area: float) -> np.ndarray:
    N = samples.shape[0]
    pad = np.zeros((2 * N, 2 * N), dtype=np.complex128)
    pad[:N, :N] = samples
    out = np.fft.ifft2(np.fft.fft2(pad) * kernel_hat)[:N, :N]
    return out * cell_area


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def cauchy_transform(phi: ComplexField, method: str = "spectral") -> ComplexField:
    """Solve d/dzbar(P phi) = phi on Omega for cutoff-supported phi.

    Parameters
    ----------
    phi : ComplexField
        Data supported in the margin-extended region (solver inputs are, by
        construction; arbitrary data is accepted but the Omega contract is
        only claimed for supported data).
    method : {"spectral", "quadrature"}
        Production multiplier path or the slow free-space oracle.

    Returns
    -------
    ComplexField
        The particular solution pinned by the zero-mode convention of the
        spectral path (both methods share the pinning).
    """
    _check_method(method)
    plan = _plan(phi.domain)
    if method == "spectral":
        return ComplexField(phi.domain, _cauchy_spectral(phi.samples, plan))
    q = _quad_plan(phi.domain)
    out = _quad_convolve(phi.samples, q.cauchy_hat, q.cell_area)
    # re-pin the additive constant to the spectral gauge
    out += np.mean(phi.samples) * plan.w_mean - np.mean(out)
    return ComplexField(phi.domain, out)


def beurling_transform(phi: ComplexField, method: str = "spectral") -> ComplexField:
    """The Beurling transform S(phi) = d/dz P(phi).

    The spectral path applies the composed multiplier conj(xi)/xi directly;
    the quadrature path convolves the closed-form kernel derivative
    -1/(pi zeta^2) (principal value, singular cell exactly 0).
    """
    _check_method(method)
    if method == "spectral":
        plan = _plan(phi.domain)
        return ComplexField(phi.domain, _beurling_spectral(phi.samples, plan))
    q = _quad_plan(phi.domain)
    out = _quad_convolve(phi.samples, q.beurling_hat, q.cell_area)
    return ComplexField(phi.domain, out)


def estimate_contraction(mu: BeltramiField, iterations: int = 8,
                         method: str = "spectral") -> float:
    """Power-iteration estimate of the contraction factor of phi -> mu*S(phi).

    Starts from the extended coefficient itself and returns the maximum
    sup-norm growth ratio over ``iterations`` applications -- the computable
    surrogate for the operator-norm smallness the Neumann series needs.
    Deterministic; returns 0 for mu identically zero.
    """
    if iterations < 1:
        raise ValidationError(f"iterations must be >= 1, got {iterations!r}")
    _check_method(method)
    plan = _plan(mu.domain) if method == "spectral" else None
    m = mu.extended.samples
    v = m.copy()
    q = 0.0
    for _ in range(iterations):
        norm = float(np.max(np.abs(v)))
        if norm == 0.0:
            break
        if method == "spectral":
            v = m * _beurling_spectral(v, plan)
        else:
            qp = _quad_plan(mu.domain)
            v = m * _quad_convolve(v, qp.beurling_hat, qp.cell_area)
        q = max(q, float(np.max(np.abs(v))) / norm)
    return q


def cauchy_transform_direct(phi: ComplexField) -> ComplexField:
    """Reference O(N^4) midpoint sum for the Cauchy transform.

    Literally the double loop the quadrature method is defined as; used by
    the tests to certify that the padded-FFT evaluation is the same sum.
    Unpinned gauge (raw sum).  Unusable beyond small N.
    """
    g = _geometry(phi.domain)
    z = g.z.ravel()
    vals = phi.samples.ravel()
    h2 = phi.domain.spacing ** 2
    out = np.empty(z.size, dtype=np.complex128)
    for i in range(z.size):
        diff = z[i] - z
        diff[i] = 1.0  # singular cell: exact centered integral is 0
        kern = 1.0 / (np.pi * diff)
        kern[i] = 0.0
        out[i] = np.sum(kern * vals) * h2
    return ComplexField(phi.domain, out.reshape(phi.samples.shape))
