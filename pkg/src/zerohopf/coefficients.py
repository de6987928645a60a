"""Parameter six-tuple of the oscillator and the zero-Hopf family relations.

The six coefficients h, k, alpha, beta, mu, nu are finite polynomials in the
small parameter eps (degree at most 4).  A ``ZeroHopfFamily`` encodes the
algebraic relations on the low-order coefficients under which the origin is a
zero-Hopf equilibrium with eigenvalues {0, +i*omega, -i*omega} at eps = 0,
together with the sign/nondegeneracy conditions that the corresponding
existence results require.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Sequence, Tuple, Union

import numpy as np

MAX_DEGREE = 4

Number = Union[int, float, Fraction, str]


class UnknownFamily(ValueError):
    """Raised when a family tag is not one of the supported tags."""


def _as_fraction(value: Number) -> Fraction:
    """Coerce ints, floats, Fractions, and strings like '67/50' to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10**12) if value != int(value) else Fraction(int(value))
    raise TypeError(f"cannot interpret coefficient {value!r}")


@dataclass(frozen=True)
class EpsPolynomial:
    """A finite polynomial p(eps) = sum_i coeffs[i] * eps**i, degree <= 4.

    Coefficients are stored exactly as rationals so that fixture values such
    as 2393/1184 survive round-tripping.
    """

    coeffs: Tuple[Fraction, ...]

    def __init__(self, coeffs: Sequence[Number]):
        cs = tuple(_as_fraction(c) for c in coeffs)
        if not cs:
            cs = (Fraction(0),)
        if len(cs) - 1 > MAX_DEGREE:
            raise ValueError(f"degree {len(cs) - 1} exceeds cap {MAX_DEGREE}")
        object.__setattr__(self, "coeffs", cs)

    def __call__(self, eps: Union[float, complex]) -> Union[float, complex]:
        """Evaluate by Horner's rule.  Supports complex eps."""
        acc: Union[float, complex] = 0.0
        for c in reversed(self.coeffs):
            acc = acc * eps + float(c)
        return acc

    def coefficient(self, i: int) -> float:
        """The i-th Taylor coefficient (0.0 beyond the stored degree)."""
        return float(self.coeffs[i]) if i < len(self.coeffs) else 0.0

    def coefficient_exact(self, i: int) -> Fraction:
        return self.coeffs[i] if i < len(self.coeffs) else Fraction(0)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


@dataclass(frozen=True)
class OscillatorParams:
    """The six eps-polynomial coefficients plus the rotation frequency omega."""

    h: EpsPolynomial
    k: EpsPolynomial
    alpha: EpsPolynomial
    beta: EpsPolynomial
    mu: EpsPolynomial
    nu: EpsPolynomial
    omega: float = 1.0

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("omega must be positive")

    def coefficient(self, name: str, i: int) -> float:
        """Shorthand for e.g. coefficient('alpha', 1) == alpha_1."""
        return getattr(self, name).coefficient(i)

    def with_coefficient(self, name: str, i: int, value: Number) -> "OscillatorParams":
        """A copy with one Taylor coefficient replaced (used by sweeps)."""
        poly: EpsPolynomial = getattr(self, name)
        cs = list(poly.coeffs)
        while len(cs) <= i:
            cs.append(Fraction(0))
        cs[i] = _as_fraction(value)
        kwargs = {f: getattr(self, f) for f in ("h", "k", "alpha", "beta", "mu", "nu")}
        kwargs[name] = EpsPolynomial(cs)
        return OscillatorParams(omega=self.omega, **kwargs)

    def max_abs_coefficient(self) -> float:
        """Largest |coefficient| over the six polynomials (>= 1)."""
        m = 1.0
        for name in ("h", "k", "alpha", "beta", "mu", "nu"):
            poly: EpsPolynomial = getattr(self, name)
            for c in poly.coeffs:
                m = max(m, abs(float(c)))
        return m


def eval_params(p: OscillatorParams, eps: Union[float, complex]):
    """Evaluate all six polynomials at eps; returns (h,k,alpha,beta,mu,nu,omega)."""
    if isinstance(eps, float) and not math.isfinite(eps):
        raise ValueError("eps must be finite")
    return (p.h(eps), p.k(eps), p.alpha(eps), p.beta(eps), p.mu(eps), p.nu(eps), p.omega)


def vector_field(p: OscillatorParams, eps: float, x) -> np.ndarray:
    """Right-hand side of the oscillator at the given eps and state (x, y, z)."""
    hh, kk, aa, bb, mm, nn, _ = eval_params(p, eps)
    x1, x2, x3 = x
    return np.array([
        -nn * (x1**3 - mm * x1 - x2),
        -hh * x3 + kk * x1 - aa * x2,
        bb * x2,
    ])


# ---------------------------------------------------------------------------
# Families
# ---------------------------------------------------------------------------

Relation = Tuple[str, Callable[[OscillatorParams], float]]
Condition = Tuple[str, Callable[[OscillatorParams], bool]]


@dataclass(frozen=True)
class ZeroHopfFamily:
    """A named zero-Hopf family: equality relations plus sign conditions."""

    tag: str
    relations: Tuple[Relation, ...]
    conditions: Tuple[Condition, ...] = field(default=())


def _c(p: OscillatorParams, name: str, i: int) -> float:
    return p.coefficient(name, i)


# --- derived combinations used by several families -------------------------

def delta_quantities_thm1(p: OscillatorParams) -> Dict[str, float]:
    """delta_a..delta_d controlling the three-orbit existence for family III."""
    k0 = _c(p, "k", 0)
    nu0 = _c(p, "nu", 0)
    a1 = _c(p, "alpha", 1)
    m1 = _c(p, "mu", 1)
    w = p.omega
    return {
        "delta_a": k0 * (2 * k0 * m1 * nu0**2 - a1 * w**2),
        "delta_b": k0 * (2 * a1 * w**2 + k0 * m1 * nu0**2),
        "delta_c": k0 * (a1 * w**2 + k0 * m1 * nu0**2),
        "delta_d": a1 * (k0 * nu0 + w**2),
    }


def delta_1(p: OscillatorParams) -> float:
    w = p.omega
    return (w**2 * (_c(p, "mu", 0) * _c(p, "nu", 1) - _c(p, "alpha", 1)
                    + _c(p, "mu", 1) * _c(p, "nu", 0))
            - _c(p, "beta", 0) * _c(p, "h", 1) * _c(p, "mu", 0) * _c(p, "nu", 0))


def delta_2(p: OscillatorParams) -> float:
    w = p.omega
    return (w**2 * (_c(p, "mu", 0) * _c(p, "nu", 1) - _c(p, "alpha", 1)
                    + _c(p, "mu", 1) * _c(p, "nu", 0))
            - _c(p, "beta", 1) * _c(p, "h", 0) * _c(p, "mu", 0) * _c(p, "nu", 0))


def delta_3(p: OscillatorParams) -> float:
    m1 = _c(p, "mu", 1)
    if m1 < 0:
        return float("nan")
    return (math.sqrt(m1) * (_c(p, "h", 1) * _c(p, "k", 0) - _c(p, "h", 0) * _c(p, "k", 1))
            * _c(p, "h", 0) * p.omega)


def delta_4(p: OscillatorParams) -> float:
    nu0 = _c(p, "nu", 0)
    return nu0 * (_c(p, "mu", 1) * nu0 - _c(p, "alpha", 1))


def _thm1_relations() -> Tuple[Relation, ...]:
    return (
        ("alpha0", lambda p: _c(p, "alpha", 0)),
        ("beta0 - (k0*nu0 + omega^2)/h0",
         lambda p: _c(p, "beta", 0) - (_c(p, "k", 0) * _c(p, "nu", 0) + p.omega**2) / _c(p, "h", 0)),
        ("mu0", lambda p: _c(p, "mu", 0)),
    )


def _h1_relations() -> Tuple[Relation, ...]:
    return (
        ("h0", lambda p: _c(p, "h", 0)),
        ("k0 + (mu0^2*nu0^2 + omega^2)/nu0",
         lambda p: _c(p, "k", 0) + (_c(p, "mu", 0)**2 * _c(p, "nu", 0)**2 + p.omega**2) / _c(p, "nu", 0)),
        ("alpha0 - mu0*nu0", lambda p: _c(p, "alpha", 0) - _c(p, "mu", 0) * _c(p, "nu", 0)),
    )


def _h2_relations() -> Tuple[Relation, ...]:
    return (
        ("beta0", lambda p: _c(p, "beta", 0)),
        ("k0 + (mu0^2*nu0^2 + omega^2)/nu0",
         lambda p: _c(p, "k", 0) + (_c(p, "mu", 0)**2 * _c(p, "nu", 0)**2 + p.omega**2) / _c(p, "nu", 0)),
        ("alpha0 - mu0*nu0", lambda p: _c(p, "alpha", 0) - _c(p, "mu", 0) * _c(p, "nu", 0)),
    )


def _h3_relations() -> Tuple[Relation, ...]:
    return (
        ("alpha0", lambda p: _c(p, "alpha", 0)),
        ("beta0 - omega^2/h0", lambda p: _c(p, "beta", 0) - p.omega**2 / _c(p, "h", 0)),
        ("nu0", lambda p: _c(p, "nu", 0)),
        ("alpha1", lambda p: _c(p, "alpha", 1)),
        ("mu0", lambda p: _c(p, "mu", 0)),
        ("alpha2", lambda p: _c(p, "alpha", 2)),
    )


def _h4_relations() -> Tuple[Relation, ...]:
    return (
        ("alpha0", lambda p: _c(p, "alpha", 0)),
        ("k0 + omega^2/nu0", lambda p: _c(p, "k", 0) + p.omega**2 / _c(p, "nu", 0)),
        ("h0", lambda p: _c(p, "h", 0)),
        ("mu0", lambda p: _c(p, "mu", 0)),
    )


FAMILIES: Dict[str, ZeroHopfFamily] = {
    "THM1": ZeroHopfFamily(
        tag="THM1",
        relations=_thm1_relations(),
        conditions=(
            ("delta_a > 0", lambda p: delta_quantities_thm1(p)["delta_a"] > 0),
            ("delta_b > 0", lambda p: delta_quantities_thm1(p)["delta_b"] > 0),
            ("delta_c > 0", lambda p: delta_quantities_thm1(p)["delta_c"] > 0),
            ("delta_d != 0", lambda p: delta_quantities_thm1(p)["delta_d"] != 0),
        ),
    ),
    "H1": ZeroHopfFamily(
        tag="H1",
        relations=_h1_relations(),
        conditions=(
            ("delta_1*nu0 > 0", lambda p: delta_1(p) * _c(p, "nu", 0) > 0),
            ("beta1*h1*mu0 != 0",
             lambda p: _c(p, "beta", 1) * _c(p, "h", 1) * _c(p, "mu", 0) != 0),
        ),
    ),
    "H2": ZeroHopfFamily(
        tag="H2",
        relations=_h2_relations(),
        conditions=(
            ("delta_2*nu0 > 0", lambda p: delta_2(p) * _c(p, "nu", 0) > 0),
            ("beta1*h0*mu0 != 0",
             lambda p: _c(p, "beta", 1) * _c(p, "h", 0) * _c(p, "mu", 0) != 0),
        ),
    ),
    "H3": ZeroHopfFamily(
        tag="H3",
        relations=_h3_relations(),
        conditions=(
            ("delta_3 > 0", lambda p: delta_3(p) > 0),
            ("2*k0*mu1*nu1^2 - alpha3*omega^2 != 0",
             lambda p: 2 * _c(p, "k", 0) * _c(p, "mu", 1) * _c(p, "nu", 1)**2
             - _c(p, "alpha", 3) * p.omega**2 != 0),
        ),
    ),
    "H4": ZeroHopfFamily(
        tag="H4",
        relations=_h4_relations(),
        conditions=(
            ("delta_4 > 0", lambda p: delta_4(p) > 0),
            ("beta0*h1*(2*alpha1^2 - 3*alpha1*mu1*nu0 + mu1^2*nu0^2) != 0",
             lambda p: _c(p, "beta", 0) * _c(p, "h", 1)
             * (2 * _c(p, "alpha", 1)**2
                - 3 * _c(p, "alpha", 1) * _c(p, "mu", 1) * _c(p, "nu", 0)
                + _c(p, "mu", 1)**2 * _c(p, "nu", 0)**2) != 0),
        ),
    ),
}

# Roman aliases: the five families are also referred to by number; family III
# coincides with the Theorem-1 setting.
_ALIASES = {"I": "H1", "II": "H2", "III": "THM1", "IV": "H3", "V": "H4"}
FAMILY_TAGS = tuple(FAMILIES) + tuple(_ALIASES)


def get_family(tag: str) -> ZeroHopfFamily:
    canon = _ALIASES.get(tag, tag)
    try:
        return FAMILIES[canon]
    except KeyError:
        raise UnknownFamily(f"unsupported family tag {tag!r}; known: {sorted(FAMILY_TAGS)}")


@dataclass(frozen=True)
class FamilyReport:
    """Residuals of each family relation plus sign-condition outcomes."""

    tag: str
    residuals: Tuple[Tuple[str, float], ...]
    conditions: Tuple[Tuple[str, bool], ...]
    tol: float

    @property
    def relations_pass(self) -> bool:
        return all(abs(r) <= self.tol for _, r in self.residuals)

    @property
    def conditions_pass(self) -> bool:
        return all(ok for _, ok in self.conditions)

    @property
    def is_member(self) -> bool:
        return self.relations_pass and self.conditions_pass

    def as_dict(self) -> dict:
        return {
            "tag": self.tag,
            "residuals": {name: val for name, val in self.residuals},
            "conditions": {name: ok for name, ok in self.conditions},
            "relations_pass": self.relations_pass,
            "conditions_pass": self.conditions_pass,
            "is_member": self.is_member,
        }


def check_family(p: OscillatorParams, family: Union[str, ZeroHopfFamily],
                 tol: float = 1e-10) -> FamilyReport:
    """Evaluate every relation residual and sign condition of a family."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    fam = get_family(family) if isinstance(family, str) else family

    def residual(fn) -> float:
        # a vanishing denominator means the relation is maximally violated
        try:
            return float(fn(p))
        except ZeroDivisionError:
            return math.inf

    residuals = tuple((name, residual(fn)) for name, fn in fam.relations)
    conditions = tuple((name, bool(fn(p))) for name, fn in fam.conditions)
    return FamilyReport(tag=fam.tag, residuals=residuals, conditions=conditions, tol=tol)


# ---------------------------------------------------------------------------
# JSON configuration
# ---------------------------------------------------------------------------

def params_from_dict(cfg: dict) -> Tuple[OscillatorParams, str]:
    """Build (params, family_tag) from the JSON config schema.

    Schema: {"omega": number, "h": [c0..cK], "k": [...], "alpha": [...],
             "beta": [...], "mu": [...], "nu": [...], "family": "THM1"|...}
    Coefficients may be numbers or rational strings such as "67/50".
    """
    polys = {}
    for name in ("h", "k", "alpha", "beta", "mu", "nu"):
        if name not in cfg:
            raise KeyError(f"config missing coefficient list {name!r}")
        polys[name] = EpsPolynomial(cfg[name])
    omega = cfg.get("omega", 1.0)
    omega = float(Fraction(omega)) if isinstance(omega, str) else float(omega)
    family = cfg.get("family", "THM1")
    get_family(family)  # validate the tag early
    return OscillatorParams(omega=omega, **polys), family


def params_from_json(text: str) -> Tuple[OscillatorParams, str]:
    return params_from_dict(json.loads(text))


def omega_for_family_iii(p: OscillatorParams) -> float:
    """Solve beta0 = (k0*nu0 + omega^2)/h0 for omega (family III helper)."""
    val = p.coefficient("beta", 0) * p.coefficient("h", 0) - p.coefficient("k", 0) * p.coefficient("nu", 0)
    if val <= 0:
        raise ValueError("no positive omega solves the family III relation")
    return math.sqrt(val)
