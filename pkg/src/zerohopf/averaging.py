"""Averaged functions g_1..g_4 of a standard-form system.

The engine evaluates the recursive integrals y_1..y_4 on a shared uniform
theta-grid with cumulative Simpson quadrature and finite-difference derivative
tensors of the F_i.  ``closed_form_g`` provides the per-family closed forms as
independent oracles; all closed forms are returned in the full-period
(T-integral) normalization used by the engine, i.e. g_i = y_i(2pi)/i!.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import cumulative_simpson

from .coefficients import OscillatorParams, ZeroHopfFamily, get_family
from .standard_form import StandardFormSystem

TWO_PI = 2.0 * math.pi

#: Number of Simpson panels of the shared theta-grid.
THETA_PANELS = 2048

_THETA = np.linspace(0.0, TWO_PI, THETA_PANELS + 1)


class OrderUnavailable(ValueError):
    """Requested averaging order exceeds the system's Taylor order."""


class NotTabulated(KeyError):
    """No closed form is tabulated for this (family, order) pair."""


@dataclass(frozen=True)
class DerivativeTensors:
    """Central finite-difference step scales for the F_i derivative tensors."""

    h1: float = 1e-5    # Jacobian
    h2: float = 6e-3    # Hessian (second directional difference)
    h3: float = 1.2e-2  # third directional difference

    def __post_init__(self):
        if min(self.h1, self.h2, self.h3) <= 0:
            raise ValueError("finite-difference steps must be positive")


def _cumint(vals: np.ndarray) -> np.ndarray:
    return cumulative_simpson(vals, x=_THETA, initial=0.0)


def averaged_series(sys: StandardFormSystem, x: Sequence[float], order: int,
                    steps: DerivativeTensors = DerivativeTensors()) -> List[np.ndarray]:
    """g_1(x)..g_order(x) at one point x = (r, z), each a 2-vector."""
    if order > sys.order:
        raise OrderUnavailable(f"system provides F up to order {sys.order}, requested {order}")
    if order < 1:
        raise ValueError("order must be >= 1")
    r0, z0 = float(x[0]), float(x[1])

    def Fg(r, z, kord=order):
        return sys.F(_THETA, r, z, kord)  # (kord, 2, N+1)

    F0 = Fg(r0, z0)
    y1 = _cumint(F0[0])
    g: List[np.ndarray] = [y1[:, -1]]
    if order == 1:
        return g

    hr = steps.h1 * (1 + abs(r0))
    hz = steps.h1 * (1 + abs(z0))
    dFr = (Fg(r0 + hr, z0) - Fg(r0 - hr, z0)) / (2 * hr)
    dFz = (Fg(r0, z0 + hz) - Fg(r0, z0 - hz)) / (2 * hz)

    def japply(i, vec):
        """(dF_i/dx) . vec with a theta-dependent vector field vec (2, N+1)."""
        return dFr[i] * vec[0] + dFz[i] * vec[1]

    scale = 1 + max(abs(r0), abs(z0))

    # The directions a(theta) vary along the grid, so the second/third
    # directional differences displace the base point per theta-node.
    def hess_dir(i, a):
        """d^2F_i(a, a) for a theta-dependent direction a (2, N+1)."""
        na = np.hypot(a[0], a[1])
        na = np.where(na < 1e-300, 1.0, na)
        ah = a / na
        hstep = steps.h2 * scale
        # the displacement direction varies with theta; F must be evaluated
        # point-wise, so vectorize over the grid via broadcasting of r, z
        Fp = _eval_grid(sys, i, r0 + hstep * ah[0], z0 + hstep * ah[1])
        Fm = _eval_grid(sys, i, r0 - hstep * ah[0], z0 - hstep * ah[1])
        return (Fp - 2 * F0[i] + Fm) / hstep**2 * na**2

    def hess_bilin(i, a, b):
        return (hess_dir(i, a + b) - hess_dir(i, a - b)) / 4.0

    def third_dir(i, a):
        na = np.hypot(a[0], a[1])
        na = np.where(na < 1e-300, 1.0, na)
        ah = a / na
        hstep = steps.h3 * scale
        F1p = _eval_grid(sys, i, r0 + hstep * ah[0], z0 + hstep * ah[1])
        F2p = _eval_grid(sys, i, r0 + 2 * hstep * ah[0], z0 + 2 * hstep * ah[1])
        F1m = _eval_grid(sys, i, r0 - hstep * ah[0], z0 - hstep * ah[1])
        F2m = _eval_grid(sys, i, r0 - 2 * hstep * ah[0], z0 - 2 * hstep * ah[1])
        return (F2p - 2 * F1p + 2 * F1m - F2m) / (2 * hstep**3) * na**3

    y2 = _cumint(2 * F0[1] + 2 * japply(0, y1))
    g.append(y2[:, -1] / 2.0)
    if order == 2:
        return g

    y3 = _cumint(6 * F0[2] + 6 * japply(1, y1) + 3 * hess_dir(0, y1) + 3 * japply(0, y2))
    g.append(y3[:, -1] / 6.0)
    if order == 3:
        return g

    y4 = _cumint(24 * F0[3] + 24 * japply(2, y1) + 12 * hess_dir(1, y1)
                 + 12 * japply(1, y2) + 12 * hess_bilin(0, y1, y2)
                 + 4 * third_dir(0, y1) + 4 * japply(0, y3))
    g.append(y4[:, -1] / 24.0)
    return g


def _eval_grid(sys: StandardFormSystem, i: int, r_arr: np.ndarray, z_arr: np.ndarray) -> np.ndarray:
    """F_i evaluated at per-theta base points (r_arr[j], z_arr[j]) on the grid."""
    out = np.empty((2, _THETA.size))
    # group identical (r, z) pairs; along the grid they genuinely vary, so fall
    # back to a batched complex-node evaluation: reuse sys.rhs broadcasting by
    # evaluating one theta at a time is too slow -- instead extract per point.
    # The displaced amplitudes stay O(h2) from r0, so a single shared
    # extraction radius is valid for the whole batch.
    eps0 = sys.extraction_radius(float(np.min(np.abs(r_arr))))
    from .standard_form import FFT_NODES
    nodes = eps0 * np.exp(2j * np.pi * np.arange(FFT_NODES) / FFT_NODES)
    th = _THETA
    c, s = np.cos(th), np.sin(th)
    X, Y = r_arr * c, r_arr * s
    Z = np.broadcast_to(z_arr, X.shape)
    W = np.stack([X, Y, Z])
    L = sys.pipeline.L
    Li = sys.pipeline.Linv
    LW = L @ W
    vals = np.empty((FFT_NODES, 2, th.size), dtype=complex)
    from .standard_form import _linear_part
    for j, e in enumerate(nodes):
        A, nn = _linear_part(sys.params, e)
        f = A @ LW.astype(complex)
        f[0] = f[0] - e * nn * LW[0] ** 3
        Wd = Li @ f
        rd = c * Wd[0] + s * Wd[1]
        thd = (c * Wd[1] - s * Wd[0]) / r_arr
        vals[j, 0] = rd / thd
        vals[j, 1] = Wd[2] / thd
    coef = np.fft.fft(vals, axis=0) / FFT_NODES
    return (coef[i + 1] / eps0 ** (i + 1)).real


@dataclass(frozen=True)
class AveragedFunction:
    """Evaluator of the order-i averaged function of a standard-form system."""

    system: StandardFormSystem
    order: int
    panels: int = THETA_PANELS
    scheme: str = "cumulative Simpson"
    steps: DerivativeTensors = field(default_factory=DerivativeTensors)

    def __call__(self, x: Sequence[float]) -> np.ndarray:
        return averaged_series(self.system, x, self.order, self.steps)[self.order - 1]

    def series(self, x: Sequence[float]) -> List[np.ndarray]:
        """g_1(x)..g_order(x) in one pass (shares the F evaluations)."""
        return averaged_series(self.system, x, self.order, self.steps)

    def jacobian(self, x: Sequence[float], step: float = 1e-6) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        J = np.empty((2, 2))
        for j in range(2):
            e = np.zeros(2)
            e[j] = step * (1 + abs(x[j]))
            J[:, j] = (self(x + e) - self(x - e)) / (2 * e[j])
        return J


def averaged(sys: StandardFormSystem, order: int,
             steps: DerivativeTensors = DerivativeTensors()) -> AveragedFunction:
    """The order-th averaged function g_order of the system."""
    if order > sys.order:
        raise OrderUnavailable(f"system provides F up to order {sys.order}, requested {order}")
    return AveragedFunction(system=sys, order=order, steps=steps)


# ---------------------------------------------------------------------------
# Closed forms (per-family oracles), full-period normalization
# ---------------------------------------------------------------------------

def closed_form_g(family: Union[str, ZeroHopfFamily], order: int,
                  x: Sequence[float], p: OscillatorParams) -> np.ndarray:
    """Closed-form g_order for the tabulated (family, order) pairs.

    Tabulated: (THM1,1), (H1,1), (H2,1), (H3,2), (H3,3), (H3,4), (H4,1), (H4,2).
    Raises NotTabulated otherwise.
    """
    tag = get_family(family).tag if not isinstance(family, ZeroHopfFamily) else family.tag
    r, z = float(x[0]), float(x[1])
    w = p.omega
    c = p.coefficient
    pi = math.pi
    if (tag, order) == ("THM1", 1):
        h0, k0, nu0 = c("h", 0), c("k", 0), c("nu", 0)
        a1, m1 = c("alpha", 1), c("mu", 1)
        g1r = (r * (3 * h0**2 * k0 * nu0**2 * z**2 / (2 * w**5)
                    - (a1 * w**2 + k0 * m1 * nu0**2) / (2 * w**3))
               + 3 * k0 * nu0**4 * r**3 / (8 * w**5))
        g1z = (-h0**2 * nu0 * z**3 * (k0 * nu0 + w**2) / w**5
               - 3 * nu0**3 * r**2 * z * (k0 * nu0 + w**2) / (2 * w**5)
               + m1 * nu0 * z * (k0 * nu0 + w**2) / w**3)
        return TWO_PI * np.array([g1r, g1z])
    if (tag, order) == ("H1", 1):
        nu0, mu0 = c("nu", 0), c("mu", 0)
        b0, h1 = c("beta", 0), c("h", 1)
        d1 = (w**2 * (mu0 * c("nu", 1) - c("alpha", 1) + c("mu", 1) * nu0)
              - b0 * h1 * mu0 * nu0)
        return TWO_PI * np.array([
            r * d1 / (2 * w**3) - 3 * nu0 * r**3 / (8 * w),
            b0 * h1 * mu0 * nu0 * z / w**3,
        ])
    if (tag, order) == ("H2", 1):
        nu0, mu0 = c("nu", 0), c("mu", 0)
        h0, b1 = c("h", 0), c("beta", 1)
        d2 = (w**2 * (mu0 * c("nu", 1) - c("alpha", 1) + c("mu", 1) * nu0)
              - b1 * h0 * mu0 * nu0)
        return TWO_PI * np.array([
            r * (d2 / (2 * w**3) - 3 * h0**2 * nu0**5 * z**2 / (2 * w**7))
            - 3 * nu0 * r**3 / (8 * w),
            b1 * h0 * mu0 * nu0 * z / w**3,
        ])
    if tag == "H3" and order in (2, 3, 4):
        return _closed_h3(order, r, z, p)
    if (tag, order) == ("H4", 1):
        nu0, a1, m1 = c("nu", 0), c("alpha", 1), c("mu", 1)
        return TWO_PI * np.array([
            -3 * nu0 * r**3 / (8 * w) - r * (a1 - m1 * nu0) / (2 * w),
            0.0,
        ])
    if (tag, order) == ("H4", 2):
        return _closed_h4_g2(r, z, p)
    raise NotTabulated(f"no closed form tabulated for family {tag}, order {order}")


def _closed_h3(order: int, r: float, z: float, p: OscillatorParams) -> np.ndarray:
    w = p.omega
    c = p.coefficient
    pi = math.pi
    h0, h1, h2 = c("h", 0), c("h", 1), c("h", 2)
    k0, k1, k2 = c("k", 0), c("k", 1), c("k", 2)
    b1, b2 = c("beta", 1), c("beta", 2)
    a3, a4 = c("alpha", 3), c("alpha", 4)
    m1, m2, m3 = c("mu", 1), c("mu", 2), c("mu", 3)
    n1, n2, n3 = c("nu", 1), c("nu", 2), c("nu", 3)
    if order == 2:
        return np.array([0.0, 2 * pi * n1 * (m1 * w**2 - h0**2 * z**2) * z / w**3])
    if order == 3:
        g31 = pi / w**5 * (h0**2 * n1 * z**2 * (2 * h0 * k1 * z - 2 * h1 * k0 * z + 3 * k0 * n1 * r)
                           - m1 * n1 * w**2 * (2 * h0 * k1 * z - 2 * h1 * k0 * z + k0 * n1 * r)
                           - a3 * r * w**4)
        g32 = pi / (h0 * w**5) * (
            h0**3 * n1 * z**3 * (b1 * h0 - 3 * k0 * n1)
            + h0 * w**2 * z * (-2 * h0**2 * n2 * z**2
                               + h0 * n1 * (h1 * z**2 - b1 * m1 - 6 * n1 * r * z)
                               + 3 * k0 * m1 * n1**2)
            + w**4 * (2 * h0 * z * (m1 * n2 + m2 * n1) - h1 * m1 * n1 * z + 2 * m1 * n1**2 * r))
        return np.array([g31, g32])
    g41 = pi / (2 * h0 * w**7) * (
        h0**3 * n1 * z**2 * (-3 * k0 * n1 * (-4 * h0 * k1 * z + 3 * b1 * h0 * r + 4 * h1 * k0 * z)
                             + 2 * b1 * h0 * z * (h1 * k0 - h0 * k1) + 9 * k0**2 * n1**2 * r)
        + h0 * w**2 * (4 * h0**2 * n2 * z**2 * (h0 * k1 * z - h1 * k0 * z + 3 * k0 * n1 * r)
                       + n1 * (2 * h0 * z**3 * (-3 * h0 * h1 * k1 + 2 * h0 * (h0 * k2 - h2 * k0)
                                                + 3 * h1**2 * k0)
                               + 3 * h0 * n1 * r * z**2 * (6 * h0 * k1 - 7 * h1 * k0)
                               + k0 * m1 * n1 * (-8 * h0 * k1 * z + 3 * b1 * h0 * r + 8 * h1 * k0 * z)
                               + 2 * b1 * h0 * m1 * z * (h0 * k1 - h1 * k0)
                               - 3 * k0 * n1**2 * r * (k0 * m1 - 4 * h0 * r * z)))
        - w**4 * (h0**2 * (2 * k1 * z * (a3 + 2 * m1 * n2 + 2 * m2 * n1)
                           + 4 * k2 * m1 * n1 * z + a3 * b1 * (-r))
                  + h0 * (n1 * (-4 * h2 * k0 * m1 * z
                                + k0 * r * (a3 + 4 * m1 * n2 + 2 * m2 * n1)
                                + 6 * k1 * m1 * n1 * r)
                          - 2 * h1 * z * (k0 * (a3 + 2 * m1 * n2 + 2 * m2 * n1) + 3 * k1 * m1 * n1))
                  + h1 * k0 * m1 * n1 * (6 * h1 * z - 7 * n1 * r))
        + r * w**6 * (a3 * h1 - 2 * a4 * h0))
    g42 = pi / (4 * h0**2 * w**7) * (
        24 * pi * h0**6 * n1**2 * w * z**5
        - 3 * h0**4 * n1 * z**3 * (b1 * h0 - k0 * n1) * (b1 * h0 - 5 * k0 * n1)
        - 32 * pi * h0**4 * m1 * n1**2 * w**3 * z**3
        + w**6 * (8 * h0**2 * z * (m1 * n3 + m2 * n2 + m3 * n1)
                  - 4 * h0 * z * (h1 * m1 * n2 + h1 * m2 * n1 + h2 * m1 * n1)
                  + 4 * h0 * n1 * r * (a3 + 4 * m1 * n2 + 2 * m2 * n1)
                  + h1 * m1 * n1 * (3 * h1 * z - 4 * n1 * r))
        + 8 * pi * h0**2 * m1**2 * n1**2 * w**5 * z
        + h0 * w**4 * (-8 * h0**3 * n3 * z**3
                       + 4 * h0**2 * z * (-n1 * (b1 * m2 + b2 * m1) + h1 * n2 * z**2
                                          + h2 * n1 * z**2 - n2 * (b1 * m1 + 12 * n1 * r * z))
                       + h0 * n1 * (-3 * h1**2 * z**3 + 2 * h1 * z * (b1 * m1 + 6 * n1 * r * z)
                                    + 4 * n1 * (3 * k0 * m2 * z + 5 * k1 * m1 * z
                                                - 3 * r * (b1 * m1 + 3 * n1 * r * z))
                                    + 24 * k0 * m1 * n2 * z)
                       + 2 * k0 * m1 * n1**2 * (12 * n1 * r - 13 * h1 * z))
        + h0**2 * w**2 * z * (4 * h0**3 * z**2 * (b1 * n2 + b2 * n1)
                              + h0**2 * n1 * (3 * b1**2 * m1 - 2 * b1 * z**2
                                              - 12 * z**2 * (2 * k0 * n2 + 3 * k1 * n1)
                                              + 36 * b1 * n1 * r * z)
                              - 6 * h0 * k0 * n1**2 * (3 * b1 * m1 - 7 * h1 * z**2 + 12 * n1 * r * z)
                              + 15 * k0**2 * m1 * n1**3))
    return np.array([g41, g42])


def _closed_h4_g2(r: float, z: float, p: OscillatorParams) -> np.ndarray:
    w = p.omega
    c = p.coefficient
    pi = math.pi
    nu0 = c("nu", 0)
    b0, b1 = c("beta", 0), c("beta", 1)
    h1, k1 = c("h", 1), c("k", 1)
    a1, a2 = c("alpha", 1), c("alpha", 2)
    m1, m2 = c("mu", 1), c("mu", 2)
    n1 = c("nu", 1)
    g21 = pi / (32 * nu0 * w**4) * (
        4 * b0 * h1 * nu0 * r * w * (4 * a1 - 12 * m1 * nu0 + 9 * nu0 * r**2)
        + 8 * h1 * nu0**3 * z * (4 * a1 - 4 * m1 * nu0 + 9 * nu0 * r**2)
        + r * w * (w * (4 * w * (4 * a1 * n1 + nu0 * (-8 * a2 + 4 * m1 * n1
                                                      + 8 * m2 * nu0 - 3 * n1 * r**2))
                        + pi * nu0 * (4 * a1 - 4 * m1 * nu0 + 3 * nu0 * r**2)
                        * (4 * a1 - 4 * m1 * nu0 + 9 * nu0 * r**2))
                   - 4 * k1 * nu0**2 * (4 * a1 - 4 * m1 * nu0 + 3 * nu0 * r**2)))
    g22 = (pi * b0 * h1 * nu0 * z * (2 * m1 - 3 * r**2) / w**3
           + pi * r * (b1 * nu0 - b0 * n1) * (4 * a1 - 4 * m1 * nu0 + 3 * nu0 * r**2)
           / (4 * nu0**3))
    return np.array([g21, g22])
