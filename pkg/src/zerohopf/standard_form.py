"""Reduction of the oscillator to the 2pi-periodic planar standard form.

The pipeline applies the family's real Jordan change L, rescales the
amplitude by sqrt(eps), passes to cylindrical coordinates
(X, Y, Z) = (r cos(theta), r sin(theta), z), and reparametrizes time by the
angle theta.  The resulting right-hand side R(theta, (r, z), eps) is analytic
in eps, and its eps-Taylor coefficients F_1..F_4 are extracted numerically by
a Cauchy-integral (FFT over a small complex circle of eps nodes).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .coefficients import OscillatorParams, ZeroHopfFamily, check_family, get_family


class ScalingSingularity(RuntimeError):
    """A denominator required by the linear change vanishes, or theta' degenerates."""


class FamilyMismatch(RuntimeError):
    """The parameters do not satisfy the requested family's relations."""


#: Amplitude scaling exponent: (Xbar, Ybar, Zbar) = eps**S * (X, Y, Z).
#: sqrt(eps) for every family (this is what reproduces the tabulated averaged
#: functions at the printed orders).
SCALING_EXPONENT = Fraction(1, 2)

#: Number of complex eps-nodes of the Cauchy/FFT Taylor extractor.
FFT_NODES = 16

#: Base radius scale of the extraction circle (divided by the largest
#: coefficient magnitude so the eps-perturbation stays uniformly small).
FFT_BASE_RADIUS = 0.05


def _require_nonzero(value: float, what: str) -> float:
    if value == 0.0:
        raise ScalingSingularity(f"{what} must be nonzero for this family's linear change")
    return value


def jordan_change(p: OscillatorParams, family: Union[str, ZeroHopfFamily]) -> np.ndarray:
    """The 3x3 linear change L bringing the eps=0 linearization to real Jordan form.

    Columns are ordered so that the rotation acts in the (X, Y) plane and the
    kernel direction is Z.  The matrices are hard-coded per family; eigenvector
    scaling is fixed so downstream closed forms keep their printed
    normalization.
    """
    tag = get_family(family).tag if not isinstance(family, ZeroHopfFamily) else family.tag
    w = p.omega
    h0 = p.coefficient("h", 0)
    k0 = p.coefficient("k", 0)
    nu0 = p.coefficient("nu", 0)
    mu0 = p.coefficient("mu", 0)
    b0 = p.coefficient("beta", 0)
    if tag == "THM1":
        _require_nonzero(h0, "h0")
        return np.array([
            [-nu0 / w, 0.0, h0 / w],
            [0.0, 1.0, 0.0],
            [-(k0 * nu0 + w**2) / (h0 * w), 0.0, k0 / w],
        ])
    if tag == "H1":
        _require_nonzero(nu0, "nu0")
        return np.array([
            [1.0, 0.0, 0.0],
            [-mu0, -w / nu0, 0.0],
            [b0 / nu0, -b0 * mu0 / w, -nu0 / w],
        ])
    if tag == "H2":
        _require_nonzero(nu0, "nu0")
        return np.array([
            [1.0, 0.0, h0 * nu0**2 / w**3],
            [-mu0, -w / nu0, -h0 * mu0 * nu0**2 / w**3],
            [0.0, 0.0, -nu0 / w],
        ])
    if tag == "H3":
        _require_nonzero(h0, "h0")
        return np.array([
            [0.0, 0.0, h0 / w],
            [0.0, 1.0, 0.0],
            [-w / h0, 0.0, k0 / w],
        ])
    if tag == "H4":
        _require_nonzero(nu0, "nu0")
        return np.array([
            [1.0, 0.0, 0.0],
            [0.0, -w / nu0, 0.0],
            [b0 / nu0, 0.0, -nu0 / w],
        ])
    raise AssertionError(f"unreachable: {tag}")


def _linear_part(p: OscillatorParams, eps: Union[float, complex]):
    """Linearization matrix A(eps) at the origin and the cubic coefficient nu(eps)."""
    hh = p.h(eps)
    kk = p.k(eps)
    aa = p.alpha(eps)
    bb = p.beta(eps)
    mm = p.mu(eps)
    nn = p.nu(eps)
    A = np.array([
        [nn * mm, nn, 0.0],
        [kk, -aa, -hh],
        [0.0, bb, 0.0],
    ], dtype=complex if isinstance(eps, complex) else float)
    return A, nn


@dataclass(frozen=True)
class ReductionPipeline:
    """Family tag, linear change, scaling exponent, and angle convention."""

    family: str
    L: np.ndarray
    Linv: np.ndarray
    scaling_exponent: Fraction = SCALING_EXPONENT
    section_convention: str = "theta measured in the (X, Y)-plane of the Jordan frame"
    orientation: float = 1.0  # sign of theta' at eps=0


@dataclass(frozen=True)
class StandardFormSystem:
    """The reduced T=2pi-periodic planar system dr/dtheta, dz/dtheta.

    ``F(theta, r, z)`` returns the stacked eps-Taylor coefficients F_1..F_order
    and ``rhs`` evaluates the exact right-hand side at finite eps.
    """

    params: OscillatorParams
    pipeline: ReductionPipeline
    order: int = 4
    dimension: int = 2
    period: float = 2.0 * math.pi
    _max_coeff: float = field(default=1.0, repr=False)

    @property
    def omega(self) -> float:
        return self.params.omega

    def rhs(self, theta, r: float, z: float, eps: Union[float, complex]) -> np.ndarray:
        """Exact (d r/d theta, d z/d theta) at finite eps; theta may be an array.

        The composed field is polynomial in eps:
            W' = L^-1 (A(eps) L W - eps * nu(eps) ((L W)_1)^3 e_1),
        after the sqrt(eps) amplitude scaling.
        """
        th = np.asarray(theta, dtype=float)
        if r <= 0:
            raise ValueError("r must be positive in the polar chart")
        c, s = np.cos(th), np.sin(th)
        X, Y = r * c, r * s
        Z = np.broadcast_to(np.asarray(z, dtype=float), X.shape)
        W = np.stack([X, Y, Z])
        A, nn = _linear_part(self.params, eps)
        LW = self.pipeline.L @ W
        f = A @ LW
        f[0] = f[0] - eps * nn * LW[0] ** 3
        Wd = self.pipeline.Linv @ f
        rd = c * Wd[0] + s * Wd[1]
        thd = (c * Wd[1] - s * Wd[0]) / r
        w = self.omega
        if np.iscomplexobj(thd):
            if np.min(np.abs(thd)) < 0.5 * w:
                raise ScalingSingularity("theta' degenerates on the sampling circle")
        else:
            if np.min(thd) < 0.5 * w:
                raise ScalingSingularity("theta' drops below omega/2; reduce eps or r")
        return np.stack([rd / thd, Wd[2] / thd])

    def extraction_radius(self, r: float) -> float:
        """Adaptive radius of the eps sampling circle for base amplitude r.

        The convergence radius of the theta-reparametrized series shrinks with
        the amplitude, so the circle is tightened proportionally to r^2 (floored
        to keep the Cauchy quotients well-scaled).
        """
        rad = (FFT_BASE_RADIUS / self._max_coeff) * min(1.0, (r / 0.2) ** 2)
        return max(rad, 1e-12)

    def F(self, theta, r: float, z: float, order: Optional[int] = None) -> np.ndarray:
        """eps-Taylor coefficients F_1..F_order of rhs at (theta, r, z).

        Returns shape (order, 2) for scalar theta, (order, 2, len) for arrays.
        """
        kord = self.order if order is None else order
        if kord > self.order:
            raise ValueError(f"order {kord} exceeds system order {self.order}")
        eps0 = self.extraction_radius(r)
        nodes = eps0 * np.exp(2j * np.pi * np.arange(FFT_NODES) / FFT_NODES)
        vals = np.array([self.rhs(theta, r, z, e) for e in nodes])
        coef = np.fft.fft(vals, axis=0) / FFT_NODES
        scale = eps0 ** np.arange(1, kord + 1)
        out = coef[1:kord + 1].real
        return (out.T / scale).T

    def F1(self, theta, r: float, z: float) -> np.ndarray:
        return self.F(theta, r, z, 1)[0]


def standardize(p: OscillatorParams, family: Union[str, ZeroHopfFamily],
                family_tol: float = 1e-9) -> StandardFormSystem:
    """Build the standard-form system for a family, verifying the Jordan form.

    Raises FamilyMismatch if the family's equality relations fail at
    ``family_tol`` and ScalingSingularity if the linear change degenerates.
    """
    fam = get_family(family) if not isinstance(family, ZeroHopfFamily) else family
    report = check_family(p, fam, tol=family_tol)
    if not report.relations_pass:
        bad = {name: val for name, val in report.residuals if abs(val) > family_tol}
        raise FamilyMismatch(f"family {fam.tag} relations violated: {bad}")
    L = jordan_change(p, fam)
    Linv = np.linalg.inv(L)
    A, _ = _linear_part(p, 0.0)
    J = Linv @ A @ L
    w = p.omega
    scale = max(1.0, np.max(np.abs(A)))
    expected = np.array([[0.0, -w, 0.0], [w, 0.0, 0.0], [0.0, 0.0, 0.0]])
    if np.max(np.abs(J - expected)) > 1e-9 * scale:
        raise ScalingSingularity(
            f"linear change failed the Jordan cross-check for family {fam.tag}:\n{J}")
    pipe = ReductionPipeline(family=fam.tag, L=L, Linv=Linv, orientation=1.0)
    return StandardFormSystem(params=p, pipeline=pipe,
                              _max_coeff=p.max_abs_coefficient())


def closed_form_F1_iii(theta: float, r: float, z: float, p: OscillatorParams) -> np.ndarray:
    """First-order standard-form field of family III in closed form."""
    w = p.omega
    h0, h1 = p.coefficient("h", 0), p.coefficient("h", 1)
    k0, k1 = p.coefficient("k", 0), p.coefficient("k", 1)
    a1 = p.coefficient("alpha", 1)
    b1 = p.coefficient("beta", 1)
    m1 = p.coefficient("mu", 1)
    n1 = p.coefficient("nu", 1)
    nu0 = p.coefficient("nu", 0)
    c, s = math.cos(theta), math.sin(theta)
    F1r = (k0 * nu0 * c * (h0 * m1 * w**2 * z - h0**3 * z**3) / w**5
           + k0 * nu0**2 * r * c**2 * (3 * h0**2 * z**2 - m1 * w**2) / w**5
           + s * (z * (h0 * k1 - h1 * k0) / w**2
                  + r * c * (h0 * k0 * n1 - b1 * h0**2 - h0 * k1 * nu0
                             + h1 * k0 * nu0 + h1 * w**2) / (h0 * w**2))
           - 3 * h0 * k0 * nu0**3 * r**2 * z * c**3 / w**5
           + k0 * nu0**4 * r**3 * c**4 / w**5
           - a1 * r * s**2 / w)
    F1z = (nu0**2 * r * c * (k0 * nu0 + w**2) * (3 * h0**2 * z**2 - m1 * w**2) / (h0 * w**5)
           + nu0 * z * (k0 * nu0 + w**2) * (m1 * w**2 - h0**2 * z**2) / w**5
           + nu0**4 * r**3 * c**3 * (k0 * nu0 + w**2) / (h0 * w**5)
           + r * s * (n1 * (k0 * nu0 + w**2) - b1 * h0 * nu0) / (h0 * w**2)
           - 3 * nu0**3 * r**2 * z * c**2 * (k0 * nu0 + w**2) / w**5)
    return np.array([F1r, F1z])
