"""Analytic bifurcation predictions from the averaged functions.

Contains the Theorem-1 quantity report for the THM1 family, generic
zero-finding/classification of averaged functions, the Neimark-Sacker
analysis with the first Lyapunov coefficient, the Lyapunov-Schmidt
bifurcation functions on the H3 branch of non-isolated zeros, and the
H4 displacement-map prediction.

Conventions: averaged functions are in the full-period (T-integral)
normalization of module ``averaging``; report fields that mirror a
closed-form constant keep that constant's own normalization and say so.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .coefficients import (OscillatorParams, check_family,
                           delta_quantities_thm1, delta_4)
from .averaging import (AveragedFunction, averaged_series, closed_form_g,
                        TWO_PI)
from .standard_form import FamilyMismatch, StandardFormSystem


class DegenerateDelta(RuntimeError):
    """The Lyapunov-Schmidt vertical block Delta is numerically singular."""


class FlatF1(RuntimeError):
    """The first bifurcation function vanishes identically."""


class NoCrossing(RuntimeError):
    """The eigenvalue real part does not change sign on the scan interval."""


class TransversalityFail(RuntimeError):
    """|alpha'(mu0)| below tolerance: hypothesis A2 fails."""


class DegenerateDet(RuntimeError):
    """The displacement-map Jacobian determinant is numerically singular."""


_HYPERBOLICITY_MARGIN = 1e-9


# ---------------------------------------------------------------------------
# Zeros of averaged functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AveragedZero:
    """A classified simple zero of an averaged function."""

    x: np.ndarray
    order: int
    jacobian: np.ndarray
    eigenvalues: np.ndarray
    classification: str

    @property
    def is_simple(self) -> bool:
        return abs(np.linalg.det(self.jacobian)) > 1e-12


def classify_zero(zero_or_eigs) -> str:
    """Stability verdict from the eigenvalues of Dg_m at a zero."""
    eigs = zero_or_eigs.eigenvalues if isinstance(zero_or_eigs, AveragedZero) \
        else np.asarray(zero_or_eigs)
    re = np.real(eigs)
    if np.any(np.abs(re) <= _HYPERBOLICITY_MARGIN):
        return "nonhyperbolic"
    if np.all(re < 0):
        return "stable node/focus"
    if np.all(np.isreal(eigs)) and re[0] * re[1] < 0:
        return "saddle"
    return "unstable"


def _fd_jacobian(f: Callable, x: np.ndarray, step: float = 1e-6) -> np.ndarray:
    J = np.empty((len(x), len(x)))
    for j in range(len(x)):
        e = np.zeros(len(x))
        e[j] = step * (1 + abs(x[j]))
        J[:, j] = (np.asarray(f(x + e)) - np.asarray(f(x - e))) / (2 * e[j])
    return J


def _fd_jacobian4(f: Callable, x: np.ndarray, step: float = 1e-3) -> np.ndarray:
    """Fourth-order central-difference Jacobian (exact for cubic maps)."""
    J = np.empty((len(x), len(x)))
    for j in range(len(x)):
        e = np.zeros(len(x))
        h = step * (1 + abs(x[j]))
        e[j] = h
        f1 = np.asarray(f(x + e)) - np.asarray(f(x - e))
        f2 = np.asarray(f(x + 2 * e)) - np.asarray(f(x - 2 * e))
        J[:, j] = (8 * f1 - f2) / (12 * h)
    return J


def newton_2d(f: Callable, x0: Sequence[float], tol: float = 1e-12,
              max_iter: int = 50, fd_step: float = 1e-6) -> Optional[np.ndarray]:
    """Damped-free Newton iteration; returns None on non-convergence."""
    x = np.array(x0, dtype=float)
    for _ in range(max_iter):
        fx = np.asarray(f(x))
        if not np.all(np.isfinite(fx)):
            return None
        J = _fd_jacobian(f, x, fd_step)
        try:
            d = np.linalg.solve(J, -fx)
        except np.linalg.LinAlgError:
            return None
        x = x + d
        if np.max(np.abs(d)) < tol:
            return x
    return None


@dataclass
class ZeroSearchResult:
    """Deduplicated zeros plus Newton bookkeeping counts."""

    zeros: List[AveragedZero]
    attempted: int
    converged: int

    def __iter__(self):
        return iter(self.zeros)

    def __len__(self):
        return len(self.zeros)

    def __getitem__(self, i):
        return self.zeros[i]


def find_zeros(g: Union[AveragedFunction, Callable], box: Tuple[float, float, float, float],
               grid: Tuple[int, int] = (20, 20), order: int = 1,
               newton_tol: float = 1e-12, dedup: float = 1e-6) -> ZeroSearchResult:
    """Newton search for zeros of g from a grid of seeds in box=(rmin,rmax,zmin,zmax)."""
    rmin, rmax, zmin, zmax = box
    if rmin <= 0:
        raise ValueError("the r lower bound must be positive")
    m = getattr(g, "order", order)
    found: List[np.ndarray] = []
    attempted = converged = 0
    for r in np.linspace(rmin, rmax, grid[0]):
        for z in np.linspace(zmin, zmax, grid[1]):
            attempted += 1
            x = newton_2d(g, (r, z), tol=newton_tol)
            if x is None or not (rmin - dedup <= x[0] <= rmax + dedup
                                 and zmin - dedup <= x[1] <= zmax + dedup):
                continue
            if x[0] <= 0:
                continue
            converged += 1
            if all(np.max(np.abs(x - y)) > dedup for y in found):
                found.append(x)
    zeros = []
    for x in sorted(found, key=lambda v: (round(v[0], 8), round(v[1], 8))):
        J = _fd_jacobian(g, x)
        eigs = np.linalg.eigvals(J)
        zeros.append(AveragedZero(x=x, order=m, jacobian=J, eigenvalues=eigs,
                                  classification=classify_zero(eigs)))
    return ZeroSearchResult(zeros=zeros, attempted=attempted, converged=converged)


# ---------------------------------------------------------------------------
# Theorem-1 prediction report (THM1 family)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PredictionReport:
    """All printed Theorem-1 quantities plus existence/stability flags.

    lambda/A/B and ell_1_1, mu_hat_1 are stored in the closed forms' own
    normalization (per-period mean); ell_1 is the proposition-normalized
    Lyapunov coefficient (equal to 3*pi/(8*omega^3) * ell_1_1).
    """

    delta_a: float
    delta_b: float
    delta_c: float
    delta_d: float
    lambda1: float
    lambda2: float
    A: float
    B: float
    lambda_plus: complex
    lambda_minus: complex
    r0: float
    r1: float
    z1: float
    z2: float
    ell_1_1: float
    ell_1: float
    mu_hat_1: float
    three_orbits: bool
    central_stable: bool
    symmetric_stable: bool
    torus_possible: bool
    det_symmetric: float  # det Dg1(r1, z1) in the mean normalization

    def as_dict(self) -> dict:
        out = {}
        for name in self.__dataclass_fields__:
            v = getattr(self, name)
            if isinstance(v, complex):
                out[name] = {"re": v.real, "im": v.imag}
            elif isinstance(v, (np.floating, float)):
                out[name] = float(v)
            else:
                out[name] = v
        return out


def predict_theorem1(p: OscillatorParams) -> PredictionReport:
    """Evaluate every printed Theorem-1 quantity for a THM1-family parameter set."""
    rep = check_family(p, "THM1")
    if not rep.relations_pass:
        raise FamilyMismatch(f"THM1 relations violated: {dict(rep.residuals)}")
    w = p.omega
    h0 = p.coefficient("h", 0)
    k0 = p.coefficient("k", 0)
    nu0 = p.coefficient("nu", 0)
    a1 = p.coefficient("alpha", 1)
    m1 = p.coefficient("mu", 1)
    d = delta_quantities_thm1(p)
    da, db, dc, dd = d["delta_a"], d["delta_b"], d["delta_c"], d["delta_d"]
    lam1 = (k0 * nu0 + w**2) * (2 * a1 * w**2 + 5 * a1 * k0 * nu0 + k0 * m1 * nu0**2) \
        / (k0 * nu0 * w**3)
    lam2 = -(8 * a1 * w**2 + 15 * a1 * k0 * nu0 + 2 * k0 * m1 * nu0**2) / (4 * w**3)
    A = (k0 * nu0 + 2 * w**2) * (4 * a1 * w**2 + k0 * nu0 * (5 * a1 + 2 * m1 * nu0)) \
        / (8 * k0 * nu0 * w**3)
    B = (64 * a1**2 * w**8
         + k0**4 * nu0**4 * (145 * a1**2 + 276 * a1 * m1 * nu0 + 36 * m1**2 * nu0**2)
         + 4 * k0**3 * nu0**3 * w**2 * (153 * a1**2 + 136 * a1 * m1 * nu0 + 12 * m1**2 * nu0**2)
         + 4 * k0**2 * nu0**2 * w**4 * (221 * a1**2 + 84 * a1 * m1 * nu0 + 4 * m1**2 * nu0**2)
         + 32 * a1 * k0 * nu0 * w**6 * (15 * a1 + 2 * m1 * nu0)) / (a1**2 * k0**2 * nu0**2)
    sqrtB = cmath.sqrt(B)
    lam_p = A + a1 / (8 * w**3) * sqrtB
    lam_m = A - a1 / (8 * w**3) * sqrtB
    three = da > 0 and db > 0 and dc > 0 and dd > 0

    def safe_sqrt(v):
        return math.sqrt(v) if v >= 0 else float("nan")

    r0 = 2 * w / nu0**2 * safe_sqrt((a1 * w**2 + k0 * m1 * nu0**2) / (3 * k0))
    r1 = 2 * w / nu0**2 * safe_sqrt((2 * k0 * m1 * nu0**2 - a1 * w**2) / (15 * k0))
    z1 = w / (h0 * nu0) * safe_sqrt((2 * a1 * w**2 + k0 * m1 * nu0**2) / (5 * k0))
    ell11 = -h0**2 * nu0 * (5 * k0**2 * nu0**2 + 16 * k0 * nu0 * w**2 + 8 * w**4) \
        / (k0 * nu0 + w**2)
    ell1 = 3 * math.pi / (8 * w**3) * ell11
    mu_hat1 = -a1 * (5 * k0 * nu0 + 4 * w**2) / (2 * k0 * nu0**2)
    det_sym = 2 * da * db * dd / (5 * k0**3 * nu0 * a1 * w**6)
    return PredictionReport(
        delta_a=da, delta_b=db, delta_c=dc, delta_d=dd,
        lambda1=lam1, lambda2=lam2, A=A, B=B,
        lambda_plus=lam_p, lambda_minus=lam_m,
        r0=r0, r1=r1, z1=z1, z2=-z1,
        ell_1_1=ell11, ell_1=ell1, mu_hat_1=mu_hat1,
        three_orbits=three,
        central_stable=(lam1 < 0 and lam2 < 0),
        symmetric_stable=(lam_p.real < 0 and lam_m.real < 0),
        torus_possible=(ell11 != 0),
        det_symmetric=det_sym,
    )


# ---------------------------------------------------------------------------
# Neimark-Sacker analysis (THM1 family, symmetric branches)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NSReport:
    """Eigenvalue crossing and first-Lyapunov-coefficient data on one branch.

    alpha_prime and omega0_mean are in the closed forms' per-period-mean
    normalization; omega0 and the internal continuation run in the engine
    (full-period) normalization; ell1 carries the proposition normalization.
    """

    branch: str
    mu0: float
    x_star: np.ndarray
    omega0: float
    omega0_mean: float
    alpha_prime: float
    ell1: float
    mu_hat_1: float
    supercritical: bool
    verdict: str


def _g1_thm1_closed(p: OscillatorParams) -> Callable:
    def g(x, mu1v=None):
        q = p if mu1v is None else p.with_coefficient("mu", 1, mu1v)
        return closed_form_g("THM1", 1, x, q)
    return g


def ns_analyze(p: OscillatorParams, branch: str = "+",
               g1: Optional[Callable] = None, scan: float = 0.5) -> NSReport:
    """Continuation of the symmetric zero in mu_1, eigenvalue crossing, ell_1.

    ``g1`` may override the averaged function used for the continuation; by
    default the closed-form g1 (exact in (r, z)) is used, so the second/third
    partial derivatives in the ell_1 formula are exact under central
    differences (g1 is cubic).
    """
    if branch not in ("+", "-"):
        raise ValueError("branch must be '+' or '-'")
    rep = check_family(p, "THM1")
    if not rep.relations_pass:
        raise FamilyMismatch(f"THM1 relations violated: {dict(rep.residuals)}")
    w = p.omega
    h0 = p.coefficient("h", 0)
    k0 = p.coefficient("k", 0)
    nu0 = p.coefficient("nu", 0)
    a1 = p.coefficient("alpha", 1)
    gfun = g1 if g1 is not None else _g1_thm1_closed(p)
    sign = 1.0 if branch == "+" else -1.0

    def branch_zero(mu1v):
        r1 = 2 * w / nu0**2 * math.sqrt(max((2 * k0 * mu1v * nu0**2 - a1 * w**2) / (15 * k0), 0.0))
        z1 = w / (h0 * nu0) * math.sqrt(max((2 * a1 * w**2 + k0 * mu1v * nu0**2) / (5 * k0), 0.0))
        x = newton_2d(lambda xx: gfun(xx, mu1v), (r1, sign * z1), tol=1e-13)
        if x is None:
            raise NoCrossing(f"continuation lost the branch zero at mu1={mu1v}")
        return x

    def alpha_beta(mu1v):
        # g1 is cubic in (r, z); the fourth-order difference is exact for it,
        # and the wide step keeps roundoff out of the Jacobian.
        x = branch_zero(mu1v)
        ev = np.linalg.eigvals(_fd_jacobian4(lambda xx: gfun(xx, mu1v), x, step=1e-3))
        return float(ev.real.mean()), float(np.abs(ev.imag).max()), x

    mu_hat1 = -a1 * (5 * k0 * nu0 + 4 * w**2) / (2 * k0 * nu0**2)
    lo, hi = mu_hat1 - scan, mu_hat1 + scan
    alo, ahi = alpha_beta(lo)[0], alpha_beta(hi)[0]
    if alo * ahi > 0:
        raise NoCrossing(f"alpha({lo})={alo:.3e} and alpha({hi})={ahi:.3e} share a sign")
    mu0 = brentq(lambda m: alpha_beta(m)[0], lo, hi, xtol=1e-13)
    _, w0, x_star = alpha_beta(mu0)
    if w0 <= 0:
        raise NoCrossing("eigenvalues are real at the located crossing")
    hm = 1e-3
    aprime_engine = (alpha_beta(mu0 + hm)[0] - alpha_beta(mu0 - hm)[0]) / (2 * hm)
    if abs(aprime_engine) < 1e-8:
        raise TransversalityFail(f"alpha'(mu0) = {aprime_engine:.3e}")

    # Real-Jordan change at the crossing; the printed T diagonalizes the
    # z<0 branch and the reflection S = diag(1,-1) carries it to the z>0 one.
    dd = a1 * (k0 * nu0 + w**2)
    c_T = (h0 * w**2 / nu0) * math.sqrt(a1 * k0 * nu0 / (6 * w**2 * dd))
    T = np.array([[math.sqrt(5.0) * c_T, c_T], [0.0, 1.0]])
    if branch == "+":
        T = np.diag([1.0, -1.0]) @ T
    Ti = np.linalg.inv(T)
    u_star = Ti @ x_star

    def gtilde(u):
        return Ti @ gfun(T @ u, mu0)

    Jt = _fd_jacobian(gtilde, u_star)
    w0_signed = Jt[0, 1]

    def d2(fc, x, i, j, h2=1e-2):
        ei = np.zeros(2); ei[i] = h2
        ej = np.zeros(2); ej[j] = h2
        if i == j:
            return (fc(x + ei) - 2 * fc(x) + fc(x - ei)) / h2**2
        return (fc(x + ei + ej) - fc(x + ei - ej) - fc(x - ei + ej) + fc(x - ei - ej)) / (4 * h2**2)

    def d3(fc, x, idx, h3=2e-2):
        ei = np.zeros(2); ei[idx[0]] = h3
        return (d2(fc, x + ei, idx[1], idx[2]) - d2(fc, x - ei, idx[1], idx[2])) / (2 * h3)

    f1c = lambda u: gtilde(u)[0]
    f2c = lambda u: gtilde(u)[1]
    g1xxx = d3(f1c, u_star, (0, 0, 0))
    g1xyy = d3(f1c, u_star, (0, 1, 1))
    g2xxy = d3(f2c, u_star, (0, 0, 1))
    g2yyy = d3(f2c, u_star, (1, 1, 1))
    g1xy = d2(f1c, u_star, 0, 1)
    g1xx = d2(f1c, u_star, 0, 0)
    g1yy = d2(f1c, u_star, 1, 1)
    g2xy = d2(f2c, u_star, 0, 1)
    g2xx = d2(f2c, u_star, 0, 0)
    g2yy = d2(f2c, u_star, 1, 1)
    ell1 = ((g1xxx + g1xyy + g2xxy + g2yyy) / 8.0
            + (g1xy * (g1xx + g1yy) - g2xy * (g2xx + g2yy)
               - g1xx * g2xx + g1yy * g2yy) / (8.0 * w0_signed))
    return NSReport(
        branch=branch,
        mu0=mu0,
        x_star=x_star,
        omega0=w0,
        omega0_mean=w0 / TWO_PI,
        alpha_prime=aprime_engine / TWO_PI,
        ell1=float(ell1),
        mu_hat_1=mu_hat1,
        supercritical=(ell1 < 0),
        verdict="supercritical (stable torus for mu1 > mu_hat(eps))" if ell1 < 0
        else "subcritical (unstable torus for mu1 < mu_hat(eps))",
    )


def averaged_cycle_thm1(p: OscillatorParams, branch: str = "+",
                        n_points: int = 8) -> Tuple[np.ndarray, float]:
    """Limit cycle of the truncated averaged flow x' = g1(x) around one
    symmetric focus of the symmetric family.

    Returns ``(points, period)`` where ``points`` is an ``(n_points, 2)``
    array sampling the closed curve in (r, z).  This curve is the
    leading-order core of the invariant torus, so its points (scaled by
    sqrt(eps)) seed torus detection already on the attractor instead of a
    drift-length away from it.
    """
    if branch not in ("+", "-"):
        raise ValueError("branch must be '+' or '-'")
    rep = predict_theorem1(p)
    g = _g1_thm1_closed(p)
    sign = 1.0 if branch == "+" else -1.0
    x_star = newton_2d(g, (rep.r1, sign * rep.z1), tol=1e-13)
    if x_star is None:
        raise NoCrossing("could not locate the symmetric focus")
    ev = np.linalg.eigvals(_fd_jacobian4(g, x_star, step=1e-3))
    if ev.real.max() <= 0 or np.abs(ev.imag).max() == 0:
        raise NoCrossing("the symmetric zero is not an unstable focus; "
                         "no attracting averaged limit cycle")
    t_turn = TWO_PI / np.abs(ev.imag).max()

    def rhs(t, x):
        return g(np.asarray(x))

    def crossing(t, x):
        return x[1] - x_star[1]

    def first_return(rho: float, want_sol: bool = False):
        x0 = np.array([x_star[0] + rho, x_star[1]])
        sol = solve_ivp(rhs, (0.0, 60.0 * t_turn), x0, rtol=1e-12, atol=1e-14,
                        events=crossing, dense_output=want_sol, max_step=t_turn / 8)
        for te, xe in zip(sol.t_events[0], sol.y_events[0]):
            if te > 1e-6 * t_turn and xe[0] > x_star[0]:
                return (xe[0] - x_star[0], te, sol) if want_sol else (xe[0] - x_star[0], te)
        raise NoCrossing("averaged flow did not return to the section ray")

    # Bracket the fixed point of the radial return map, then solve for it.
    grid = rep.r1 * np.geomspace(1e-3, 0.6, 14)
    h_prev, rho_prev = None, None
    bracket = None
    for rho in grid:
        h_val = first_return(rho)[0] - rho
        if h_prev is not None and h_val * h_prev < 0:
            bracket = (rho_prev, rho)
            break
        h_prev, rho_prev = h_val, rho
    if bracket is None:
        raise NoCrossing("no fixed point of the averaged return map in the scan range")
    rho_star = brentq(lambda r: first_return(r)[0] - r, *bracket, xtol=1e-13)
    _, period, sol = first_return(rho_star, want_sol=True)
    ts = np.linspace(0.0, period, n_points, endpoint=False)
    pts = sol.sol(ts).T
    return np.asarray(pts), float(period)


# ---------------------------------------------------------------------------
# Lyapunov-Schmidt bifurcation functions (H3 family, branch Z+)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LSReduction:
    """Bifurcation functions on the branch Z+ = {(r, sqrt(mu1) w/h0)}."""

    z_branch: float
    delta: float               # d g2^2/dz on the branch (r-independent)
    f1: Callable[[float], float]
    f2: Callable[[float], float]
    gamma1: Callable[[float], float]
    gamma2: Callable[[float], float]
    source: str
    eps: Optional[float] = None
    a_eps_closed: Optional[float] = None
    a_eps_newton: Optional[float] = None
    dF2_dr_at_zero: Optional[float] = None

    def F2(self, r: float, eps: float) -> float:
        return eps * self.f1(r) + eps**2 * self.f2(r)


def _ls_a_eps_closed(p: OscillatorParams, eps: float) -> float:
    w = p.omega
    c = p.coefficient
    h0, h1 = c("h", 0), c("h", 1)
    k0, k1 = c("k", 0), c("k", 1)
    b1 = c("beta", 1)
    a3, a4 = c("alpha", 3), c("alpha", 4)
    m1, m2 = c("mu", 1), c("mu", 2)
    n1, n2 = c("nu", 1), c("nu", 2)
    rho = (w**4 * (2 * a4 * h0 - a3 * h1)
           + 6 * h0 * k0 * m1 * n1**2 * (b1 * h0 - k0 * n1)
           - w**2 * (a3 * b1 * h0**2
                     + h0 * n1 * (k0 * (8 * m1 * n2 - a3 + 4 * m2 * n1) + 4 * k1 * m1 * n1)
                     - 6 * h1 * k0 * m1 * n1**2))
    return (-2 * w * eps * (h1 * k0 - h0 * k1) * (2 * k0 * m1 * n1**2 - a3 * w**2)
            * math.sqrt(m1)
            / (h0 * (2 * a3 * w**4 - 4 * k0 * m1 * n1**2 * w**2) + eps * rho))


def ls_bifurcation_functions(p: OscillatorParams, source: str = "closed",
                             sys: Optional[StandardFormSystem] = None,
                             eps: Optional[float] = None) -> LSReduction:
    """Assemble Delta, gamma_1, gamma_2, f_1, f_2 on the H3 branch Z+.

    ``source`` selects the g_2..g_4 provider: the tabulated closed forms
    ("closed") or the generic averaging engine ("engine", needs ``sys``).
    """
    rep = check_family(p, "H3")
    if not rep.relations_pass:
        raise FamilyMismatch(f"H3 relations violated: {dict(rep.residuals)}")
    w = p.omega
    h0 = p.coefficient("h", 0)
    k0 = p.coefficient("k", 0)
    m1 = p.coefficient("mu", 1)
    n1 = p.coefficient("nu", 1)
    a3 = p.coefficient("alpha", 3)
    if m1 <= 0:
        raise FamilyMismatch("branch Z+ requires mu_1 > 0")
    z_plus = math.sqrt(m1) * w / h0

    if source == "closed":
        def gfun(r, z):
            return [np.zeros(2)] + [closed_form_g("H3", i, (r, z), p) for i in (2, 3, 4)]
        dz2 = dz3 = 1e-3
    elif source == "engine":
        if sys is None:
            raise ValueError("engine source requires the standard-form system")

        def gfun(r, z):
            return averaged_series(sys, (r, z), 4)
        # g2 is cubic in z, so a wide step keeps the quadrature noise out of
        # the second difference without truncation bias; g3 needs a wide step
        # for the same reason.
        dz2, dz3 = 1e-2, 2e-2
    else:
        raise ValueError("source must be 'closed' or 'engine'")

    slope = math.pi * (2 * k0 * m1 * n1**2 - a3 * w**2) / w**3
    if abs(slope) < 1e-12:
        raise FlatF1("f1 vanishes identically: 2 k0 mu1 nu1^2 = alpha3 omega^2")

    def parts(r: float):
        # Fourth-order stencils in z: exact through quartics, so the step can
        # stay wide enough to dominate the evaluation noise.
        g0 = gfun(r, z_plus)
        gp2 = gfun(r, z_plus + dz2)
        gm2 = gfun(r, z_plus - dz2)
        gp2b = gfun(r, z_plus + 2 * dz2)
        gm2b = gfun(r, z_plus - 2 * dz2)
        gp3 = gfun(r, z_plus + dz3)
        gm3 = gfun(r, z_plus - dz3)
        gp3b = gfun(r, z_plus + 2 * dz3)
        gm3b = gfun(r, z_plus - 2 * dz3)
        dg2 = (8 * (gp2[1] - gm2[1]) - (gp2b[1] - gm2b[1])) / (12 * dz2)
        Delta = dg2[1]
        Gamma = dg2[0]
        if abs(Delta) < 1e-12:
            raise DegenerateDelta(f"Delta = {Delta:.3e} at r = {r}")
        d2g2 = (16 * (gp2[1] + gm2[1]) - (gp2b[1] + gm2b[1]) - 30 * g0[1]) / (12 * dz2**2)
        dg3 = (8 * (gp3[2] - gm3[2]) - (gp3b[2] - gm3b[2])) / (12 * dz3)
        gam1 = -g0[2][1] / Delta
        f1 = Gamma * gam1 + g0[2][0]
        gam2 = -(d2g2[1] * gam1**2 + 2 * dg3[1] * gam1 + 2 * g0[3][1]) / Delta
        f2 = 0.5 * Gamma * gam2 + 0.5 * d2g2[0] * gam1**2 + dg3[0] * gam1 + g0[3][0]
        return f1, f2, Delta, gam1, gam2

    delta0 = parts(1.0)[2]
    red_kwargs = {}
    if eps is not None:
        a_closed = _ls_a_eps_closed(p, eps)
        F2 = lambda r: eps * parts(r)[0] + eps**2 * parts(r)[1]
        # F2 is affine in r to the working precision; Newton from the closed form
        r = a_closed if a_closed > 0 else 1.0
        for _ in range(30):
            hr = 1e-6 * (1 + abs(r))
            d = -F2(r) / ((F2(r + hr) - F2(r - hr)) / (2 * hr))
            r += d
            if abs(d) < 1e-14 * (1 + abs(r)):
                break
        hr = 1e-6 * (1 + abs(r))
        red_kwargs = {
            "eps": eps,
            "a_eps_closed": a_closed,
            "a_eps_newton": r,
            "dF2_dr_at_zero": (F2(r + hr) - F2(r - hr)) / (2 * hr),
        }
    return LSReduction(
        z_branch=z_plus,
        delta=delta0,
        f1=lambda r: parts(r)[0],
        f2=lambda r: parts(r)[1],
        gamma1=lambda r: parts(r)[3],
        gamma2=lambda r: parts(r)[4],
        source=source,
        **red_kwargs,
    )


def closed_form_f1_h3(r: float, p: OscillatorParams) -> float:
    """The printed first bifurcation function of the H3 branch Z+."""
    w = p.omega
    return math.pi * r * (2 * p.coefficient("k", 0) * p.coefficient("mu", 1)
                          * p.coefficient("nu", 1)**2
                          - p.coefficient("alpha", 3) * w**2) / w**3


# ---------------------------------------------------------------------------
# H4 displacement-map prediction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class H4Displacement:
    """First-order fixed point of the H4 displacement map on z = 0."""

    base_radius: float
    r_tilde: float
    z_tilde: float
    det_DH1: float
    det_DH1_printed: float

    def predicted_point(self, eps: float) -> np.ndarray:
        return np.array([self.base_radius + eps * self.r_tilde, 0.0])


def displacement_h4(p: OscillatorParams) -> H4Displacement:
    """Predicted orbit location for the H4 family via the displacement map."""
    rep = check_family(p, "H4")
    if not rep.relations_pass:
        raise FamilyMismatch(f"H4 relations violated: {dict(rep.residuals)}")
    w = p.omega
    nu0 = p.coefficient("nu", 0)
    a1 = p.coefficient("alpha", 1)
    m1 = p.coefficient("mu", 1)
    b0 = p.coefficient("beta", 0)
    h1 = p.coefficient("h", 1)
    d4 = delta_4(p)
    if d4 <= 0:
        raise FamilyMismatch(f"delta_4 = {d4} must be positive")
    R0 = 2 * math.sqrt((m1 * nu0 - a1) / (3 * nu0))
    # d/dr of g1^1 at R0 (full-period normalization)
    slope = -TWO_PI * (m1 * nu0 - a1) / w
    g2_at = closed_form_g("H4", 2, (R0, 0.0), p)
    r_tilde = -g2_at[0] / slope
    dz_H12 = 2 * math.pi * b0 * h1 * (2 * a1 - m1 * nu0) / w**3
    det = slope * dz_H12
    det_printed = 2 * math.pi * b0 * h1 * (2 * a1**2 - 3 * a1 * m1 * nu0
                                           + m1**2 * nu0**2) / w**4
    if abs(det) < 1e-12:
        raise DegenerateDet(f"det DH1 = {det:.3e}")
    return H4Displacement(base_radius=R0, r_tilde=float(r_tilde), z_tilde=0.0,
                          det_DH1=float(det), det_DH1_printed=det_printed)
