"""Numerical verification of the analytic predictions.

Trajectories of the full 3-D oscillator are integrated with an adaptive
RK45 scheme; periodic orbits are refined by Newton shooting on the Poincare
section {Y = 0, X > 0} written in the family's Jordan coordinates, Floquet
multipliers come from the finite-difference monodromy of the return map, and
invariant tori are certified by a closed-curve fit of iterated returns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import solve_ivp

from .coefficients import OscillatorParams, eval_params, vector_field
from .standard_form import jordan_change

TWO_PI = 2.0 * math.pi


class NewtonDiverged(RuntimeError):
    """Shooting Newton failed to converge within the iteration budget."""


class LostTransversality(RuntimeError):
    """The trajectory crosses the section too slowly for reliable events."""


class Diverged(RuntimeError):
    """Return-map iterates left the configured bounding box."""


class StepLimitExceeded(RuntimeError):
    """A single trajectory exceeded the right-hand-side evaluation budget."""


class StiffnessSuspected(RuntimeError):
    """The adaptive integrator failed to advance."""


@dataclass(frozen=True)
class IntegratorConfig:
    rtol: float = 1e-10
    atol: float = 1e-12
    first_step: Optional[float] = None
    max_step: float = math.inf
    max_steps: int = 20_000_000
    escape_radius: float = 50.0

    def __post_init__(self):
        if self.rtol <= 0 or self.atol <= 0:
            raise ValueError("tolerances must be positive")


DEFAULT_CONFIG = IntegratorConfig()


@dataclass(frozen=True)
class PoincareSection:
    """The half-plane {Y = 0, X > 0} in the family's Jordan frame."""

    family: str
    L: np.ndarray
    Linv: np.ndarray
    omega: float

    def to_3d(self, q: Sequence[float]) -> np.ndarray:
        """Embed section coordinates (X, Z) as a 3-D state."""
        return self.L @ np.array([q[0], 0.0, q[1]])

    def coords(self, x3d: Sequence[float]) -> np.ndarray:
        w = self.Linv @ np.asarray(x3d)
        return np.array([w[0], w[2]])


def _align_real(v: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Real combination of Re(s*v) closest to target over complex scales s."""
    basis = np.column_stack([v.real, -v.imag])
    coef, *_ = np.linalg.lstsq(basis, target, rcond=None)
    return basis @ coef


def section_for(p: OscillatorParams, family: str,
                eps: Optional[float] = None) -> PoincareSection:
    """Poincare section frame for a family.

    With ``eps`` given, the frame diagonalizes the linear part at that eps
    (columns aligned with the eps=0 Jordan basis), so the section stays
    transversal even when the rotation plane tilts with eps.  This matters for
    orbits whose radius is much smaller than their offset along the slow axis.
    """
    L0 = jordan_change(p, family)
    if eps is None:
        return PoincareSection(family=family, L=L0, Linv=np.linalg.inv(L0),
                               omega=p.omega)
    h, k, a, b, m, n, _w = eval_params(p, eps)
    A = np.array([[n * m, n, 0.0], [k, -a, -h], [0.0, b, 0.0]])
    vals, vecs = np.linalg.eig(A)
    idx = np.argsort(-np.abs(vals.imag))
    i_rot = idx[0] if vals.imag[idx[0]] > 0 else idx[1]
    i_slow = idx[2]
    if abs(vals.imag[i_rot]) < 1e-12:
        raise LostTransversality(f"no rotation at eps = {eps}: eigenvalues {vals}")
    v = vecs[:, i_rot]
    c1 = _align_real(v, L0[:, 0])
    # complete the rotation block: A c1 = a c1 + b c2 with b = Im(lambda) > 0
    lam = vals[i_rot]
    c2 = (A @ c1 - lam.real * c1) / lam.imag
    v3 = vecs[:, i_slow].real
    v3 = v3 * float(v3 @ L0[:, 2]) / float(v3 @ v3)
    L = np.column_stack([c1, c2, v3])
    return PoincareSection(family=family, L=L, Linv=np.linalg.inv(L),
                           omega=float(lam.imag))


def orbit_seed_3d(p: OscillatorParams, family: str, eps: float,
                  x: Sequence[float]) -> np.ndarray:
    """3-D seed for an averaged zero x = (r, z): undo scaling and Jordan change."""
    s = math.sqrt(eps)
    L = jordan_change(p, family)
    return L @ np.array([s * x[0], 0.0, s * x[1]])


def section_seed(eps: float, x: Sequence[float]) -> np.ndarray:
    """Section coordinates (X, Z) of an averaged zero x = (r, z)."""
    s = math.sqrt(eps)
    return np.array([s * x[0], s * x[1]])


def _rhs(p: OscillatorParams, eps: float, budget: list, escape: float = math.inf):
    def f(t, x):
        budget[0] += 1
        if budget[0] > budget[1]:
            raise StepLimitExceeded(f"exceeded {budget[1]} right-hand-side evaluations")
        if abs(x[0]) + abs(x[1]) + abs(x[2]) > escape:
            raise Diverged(f"trajectory left |x|_1 <= {escape} at t = {t:.3f}")
        return vector_field(p, eps, x)
    return f


def integrate(p: OscillatorParams, eps: float, x0: Sequence[float], t_end: float,
              cfg: IntegratorConfig = DEFAULT_CONFIG, t_eval=None):
    """Adaptive RK45 trajectory of the full system; returns the solve_ivp result."""
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    budget = [0, cfg.max_steps]
    sol = solve_ivp(_rhs(p, eps, budget, cfg.escape_radius), (0.0, t_end), np.asarray(x0, dtype=float),
                    method="RK45", rtol=cfg.rtol, atol=cfg.atol,
                    max_step=cfg.max_step, first_step=cfg.first_step, t_eval=t_eval,
                    dense_output=False)
    if sol.status < 0:
        raise StiffnessSuspected(sol.message)
    return sol


def poincare_return(p: OscillatorParams, eps: float, section: PoincareSection,
                    q: Sequence[float], n: int,
                    cfg: IntegratorConfig = DEFAULT_CONFIG) -> List[Tuple[np.ndarray, float]]:
    """n successive positively-oriented returns of the section point q = (X, Z)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    Linv1 = section.Linv[1]
    Linv0 = section.Linv[0]

    def event(t, x):
        return Linv1 @ x
    event.direction = 1.0
    event.terminal = False

    budget = [0, cfg.max_steps]
    f = _rhs(p, eps, budget, cfg.escape_radius)
    x0 = section.to_3d(q)
    period_guess = TWO_PI / section.omega
    returns: List[Tuple[np.ndarray, float]] = []
    t0 = 0.0
    guard = 0
    while len(returns) < n:
        guard += 1
        if guard > 8 + n:
            raise LostTransversality("failed to collect the requested section returns")
        chunk = period_guess * (1.5 * (n - len(returns)) + 2.0)
        sol = solve_ivp(f, (t0, t0 + chunk), x0, method="RK45", rtol=cfg.rtol,
                        atol=cfg.atol, max_step=cfg.max_step, events=event,
                        dense_output=False)
        if sol.status < 0:
            raise StiffnessSuspected(sol.message)
        for te, xe in zip(sol.t_events[0], sol.y_events[0]):
            if te < 1e-6 * period_guess:
                continue  # the launch point itself
            if Linv0 @ xe <= 0.0:
                continue  # wrong half-plane
            speed = Linv1 @ vector_field(p, eps, xe)
            if abs(speed) < 1e-8:
                raise LostTransversality(f"crossing speed {speed:.2e} at t={te:.3f}")
            returns.append((section.coords(xe), float(te)))
            if len(returns) == n:
                break
        t0 = sol.t[-1]
        x0 = sol.y[:, -1]
    return returns


def _return_map(p, eps, section, cfg):
    def P(q):
        (q1, t1), = poincare_return(p, eps, section, q, 1, cfg)
        return q1, t1
    return P


@dataclass(frozen=True)
class PeriodicOrbit:
    section_point: np.ndarray
    period: float
    residual: float
    monodromy: np.ndarray
    multipliers: np.ndarray
    stability: str
    family: str
    eps: float


def _stability_from_multipliers(mults: np.ndarray) -> str:
    mod = np.abs(mults)
    if np.all(mod < 1.0):
        return "stable"
    if np.all(mod > 1.0):
        return "unstable"
    return "saddle"


def refine_periodic_orbit(p: OscillatorParams, eps: float, seed: Sequence[float],
                          section: PoincareSection,
                          cfg: IntegratorConfig = DEFAULT_CONFIG,
                          tol: float = 1e-11, max_iter: int = 25) -> PeriodicOrbit:
    """Newton shooting on P(q) - q from an averaged-prediction seed."""
    P = _return_map(p, eps, section, cfg)
    q = np.array(seed, dtype=float)

    def displacement(qq):
        return P(qq)[0] - qq

    def jac(qq):
        J = np.empty((2, 2))
        for j in range(2):
            e = np.zeros(2)
            e[j] = 1e-7 * (1 + abs(qq[j]))
            J[:, j] = (displacement(qq + e) - displacement(qq - e)) / (2 * e[j])
        return J

    for _ in range(max_iter):
        d = displacement(q)
        if np.max(np.abs(d)) < tol:
            break
        q = q + np.linalg.solve(jac(q), -d)
    else:
        raise NewtonDiverged(f"residual {np.max(np.abs(displacement(q))):.2e} after {max_iter} iterations")

    q1, T = P(q)
    residual = float(np.max(np.abs(q1 - q)))
    M = jac(q) + np.eye(2)
    mults = np.linalg.eigvals(M)
    return PeriodicOrbit(section_point=q, period=T, residual=residual,
                         monodromy=M, multipliers=mults,
                         stability=_stability_from_multipliers(mults),
                         family=section.family, eps=eps)


@dataclass(frozen=True)
class PeriodicOrbit3D:
    point: np.ndarray             # 3-D state on the orbit
    period: float
    residual: float               # max |phi_T(point) - point|
    monodromy: np.ndarray         # 3x3 flow-map Jacobian over one period
    multipliers: np.ndarray       # the two non-trivial Floquet multipliers
    stability: str
    family: str
    eps: float


def refine_periodic_orbit_3d(p: OscillatorParams, eps: float, seed: Sequence[float],
                             period_guess: float, family: str = "",
                             cfg: IntegratorConfig = DEFAULT_CONFIG,
                             tol: float = 1e-11, max_iter: int = 25,
                             n_periods: int = 1) -> PeriodicOrbit3D:
    """Newton shooting on the full flow map with the period as an unknown.

    Solves phi_T(x) - x = 0 with the phase fixed by requiring x - seed to be
    orthogonal to the flow direction at the seed.  This needs no Poincare
    section, so it stays robust when the orbit's rotation radius is small
    compared to its offset along the slow axis.  When the multipliers are
    extremely close to 1, shooting over ``n_periods`` loops keeps the Newton
    matrix well conditioned.
    """
    x0 = np.asarray(seed, dtype=float)
    f0 = np.asarray(vector_field(p, eps, x0))
    nrm = np.linalg.norm(f0)
    if nrm == 0:
        raise NewtonDiverged("seed is an equilibrium")
    phase_dir = f0 / nrm

    def flow_var(x, T):
        """Flow map and its state Jacobian via the variational equations."""
        h, k, a, b, m, n, _w = eval_params(p, eps)

        def rhs(t, y):
            xx, Phi = y[:3], y[3:].reshape(3, 3)
            Df = np.array([[-n * (3 * xx[0] ** 2 - m), n, 0.0],
                           [k, -a, -h],
                           [0.0, b, 0.0]])
            return np.concatenate([vector_field(p, eps, xx), (Df @ Phi).ravel()])

        y0 = np.concatenate([x, np.eye(3).ravel()])
        sol = solve_ivp(rhs, (0.0, T), y0, method="RK45", rtol=cfg.rtol,
                        atol=cfg.atol, max_step=cfg.max_step)
        if sol.status < 0:
            raise StiffnessSuspected(sol.message)
        return sol.y[:3, -1], sol.y[3:, -1].reshape(3, 3)

    u = np.concatenate([x0, [n_periods * period_guess]])
    for _ in range(max_iter):
        x, T = u[:3], u[3]
        xT, Phi = flow_var(x, T)
        r = np.concatenate([xT - x, [phase_dir @ (x - x0)]])
        if np.max(np.abs(r[:3])) < tol:
            break
        J = np.zeros((4, 4))
        J[:3, :3] = Phi - np.eye(3)
        J[:3, 3] = vector_field(p, eps, xT)
        J[3, :3] = phase_dir
        u = u + np.linalg.solve(J, -r)
    else:
        x, T = u[:3], u[3]
        xT, Phi = flow_var(x, T)
        raise NewtonDiverged(
            f"residual {np.max(np.abs(xT - x)):.2e} after {max_iter} iterations")

    x, T = u[:3], u[3] / n_periods
    xT, M = flow_var(x, T)
    res = float(np.max(np.abs(xT - x)))
    mults = np.linalg.eigvals(M)
    # drop the trivial multiplier (eigenvalue 1 along the flow direction)
    trivial = int(np.argmin(np.abs(mults - 1.0)))
    nontrivial = np.delete(mults, trivial)
    return PeriodicOrbit3D(point=x, period=float(T), residual=res, monodromy=M,
                           multipliers=nontrivial,
                           stability=_stability_from_multipliers(nontrivial),
                           family=family, eps=eps)


def mirror_section_point(p: OscillatorParams, eps: float, orbit: PeriodicOrbit,
                         section: PoincareSection,
                         cfg: IntegratorConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Section coordinates of the sign-flipped image of a periodic orbit.

    The oscillator is equivariant under (x, y, z) -> (-x, -y, -z), so the
    flipped orbit crosses {Y = 0, X > 0} where the original orbit crosses
    {Y = 0, X < 0} with the opposite orientation.  The returned point is the
    section point of the mirror-image orbit.
    """
    Linv1 = section.Linv[1]
    Linv0 = section.Linv[0]

    def event(t, x):
        return Linv1 @ x
    event.direction = -1.0
    event.terminal = False

    budget = [0, cfg.max_steps]
    sol = solve_ivp(_rhs(p, eps, budget, cfg.escape_radius), (0.0, 1.2 * orbit.period),
                    section.to_3d(orbit.section_point), method="RK45",
                    rtol=cfg.rtol, atol=cfg.atol, max_step=cfg.max_step,
                    events=event, dense_output=False)
    if sol.status < 0:
        raise StiffnessSuspected(sol.message)
    for te, xe in zip(sol.t_events[0], sol.y_events[0]):
        if te > 1e-6 * orbit.period and Linv0 @ xe < 0.0:
            return section.coords(-xe)
    raise LostTransversality("no opposite-orientation crossing found")


def mirror_section_seed(p: OscillatorParams, eps: float, q: Sequence[float],
                        section: PoincareSection,
                        cfg: IntegratorConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Section point of the sign-flipped partner trajectory of q = (X, Z).

    The negated 3-D state lies off the positively-oriented half-section, so it
    is flowed forward to its next {Y = 0, X > 0, Y' > 0} crossing.  Applied to
    a point on an invariant curve, this lands on the mirror-image curve.
    """
    Linv1 = section.Linv[1]
    Linv0 = section.Linv[0]

    def event(t, x):
        return Linv1 @ x
    event.direction = 1.0
    event.terminal = False

    period = TWO_PI / section.omega
    budget = [0, cfg.max_steps]
    sol = solve_ivp(_rhs(p, eps, budget, cfg.escape_radius), (0.0, 1.6 * period),
                    -section.to_3d(q), method="RK45",
                    rtol=cfg.rtol, atol=cfg.atol, max_step=cfg.max_step,
                    events=event, dense_output=False)
    if sol.status < 0:
        raise StiffnessSuspected(sol.message)
    for te, xe in zip(sol.t_events[0], sol.y_events[0]):
        if te > 1e-6 * period and Linv0 @ xe > 0.0:
            return section.coords(xe)
    raise LostTransversality("the mirrored point never reached the section")


def settle_section_point(p: OscillatorParams, eps: float, start3d: Sequence[float],
                         section: PoincareSection, t_flight: float = 3000.0,
                         n_returns: int = 12000,
                         cfg: Optional[IntegratorConfig] = None) -> np.ndarray:
    """Relax a 3-D start onto the attractor; returns the final section point.

    Normal attraction onto the invariant curves is only O(eps^2) per return,
    so an accurate torus detection needs a seed that has already spent
    ~10^4 returns relaxing.  This helper does that settling with a cheap
    low-tolerance integration (the curve location is insensitive to the
    integration tolerance at the 1e-6 level).
    """
    if cfg is None:
        cfg = IntegratorConfig(rtol=1e-7, atol=1e-9, max_steps=10**9)
    x = integrate(p, eps, np.asarray(start3d, dtype=float), t_flight, cfg).y[:, -1]
    w = section.Linv @ x
    rets = poincare_return(p, eps, section, np.array([w[0], w[2]]), n_returns, cfg)
    return rets[-1][0]


def floquet_prediction(dg1_eigenvalues: Sequence[complex], eps: float,
                       omega: float) -> np.ndarray:
    """First-order multiplier prediction exp(eps * eig(Dg1) / omega).

    ``dg1_eigenvalues`` are eigenvalues of the full-period averaged Jacobian
    (equal to 2*pi times the per-period-mean normalization).
    """
    return np.exp(eps * np.asarray(dg1_eigenvalues, dtype=complex) / omega)


@dataclass(frozen=True)
class TorusEvidence:
    iterates: np.ndarray          # (n_sample, 2) section points after transient
    transient: int
    samples: int
    center: np.ndarray
    rotation_number: float
    mean_radius: float
    max_deviation: float          # relative to mean_radius
    fourier_degree: int
    verdict: str                  # torus | periodic-locked | diverged | inconclusive


def detect_torus(p: OscillatorParams, eps: float, seed: Sequence[float],
                 n_transient: int, n_sample: int, section: PoincareSection,
                 center: Optional[Sequence[float]] = None,
                 cfg: IntegratorConfig = DEFAULT_CONFIG,
                 curve_tol: float = 2e-3, degree: int = 8,
                 bound: float = 10.0) -> TorusEvidence:
    """Iterate the return map and fit a closed curve around the periodic point."""
    if center is None:
        orbit = refine_periodic_orbit(p, eps, seed, section, cfg)
        center = orbit.section_point
    center = np.asarray(center, dtype=float)

    total = n_transient + n_sample
    pts = np.empty((total, 2))
    q = np.array(seed, dtype=float)
    collected = 0
    while collected < total:
        want = min(total - collected, 200)
        rets = poincare_return(p, eps, section, q, want, cfg)
        for (qq, _t) in rets:
            pts[collected] = qq
            collected += 1
        q = rets[-1][0]
        if np.max(np.abs(q)) > bound:
            return TorusEvidence(iterates=pts[:collected], transient=n_transient,
                                 samples=0, center=center, rotation_number=float("nan"),
                                 mean_radius=float("nan"), max_deviation=float("nan"),
                                 fourier_degree=degree, verdict="diverged")
    samples = pts[n_transient:]
    u = samples[:, 0] - center[0]
    v = samples[:, 1] - center[1]
    radii = np.hypot(u, v)
    mean_radius = float(np.mean(radii))
    angles = np.arctan2(v, u)
    incr = np.diff(np.unwrap(angles))
    scale = 1.0 + abs(center[0]) + abs(center[1])
    if mean_radius < 1e-7 * scale or np.max(np.abs(incr), initial=0.0) < 1e-6:
        verdict = "periodic-locked"
        return TorusEvidence(iterates=samples, transient=n_transient, samples=n_sample,
                             center=center, rotation_number=0.0, mean_radius=mean_radius,
                             max_deviation=float("nan"), fourier_degree=degree,
                             verdict=verdict)
    head = np.mean(radii[: max(10, n_sample // 20)])
    tail = np.mean(radii[-max(10, n_sample // 20):])
    if tail < 0.2 * head:
        return TorusEvidence(iterates=samples, transient=n_transient, samples=n_sample,
                             center=center, rotation_number=float("nan"),
                             mean_radius=mean_radius, max_deviation=float("nan"),
                             fourier_degree=degree, verdict="periodic-locked")
    monotone = np.all(incr > 0) or np.all(incr < 0)
    rotation = float(np.mean(np.abs(incr)) / TWO_PI)
    # truncated Fourier fit radius(angle)
    cols = [np.ones_like(angles)]
    for k in range(1, degree + 1):
        cols.append(np.cos(k * angles))
        cols.append(np.sin(k * angles))
    Amat = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(Amat, radii, rcond=None)
    fit = Amat @ coef
    max_dev = float(np.max(np.abs(radii - fit)) / mean_radius)
    verdict = "torus" if (monotone and max_dev <= curve_tol) else "inconclusive"
    return TorusEvidence(iterates=samples, transient=n_transient, samples=n_sample,
                         center=center, rotation_number=rotation,
                         mean_radius=mean_radius, max_deviation=max_dev,
                         fourier_degree=degree, verdict=verdict)
