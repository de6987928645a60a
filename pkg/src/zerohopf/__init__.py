"""Bifurcation analysis toolkit for the generalized Van der Pol-Duffing oscillator.

The system

    x' = -nu(eps) * (x^3 - mu(eps)*x - y)
    y' = -h(eps)*z + k(eps)*x - alpha(eps)*y
    z' = beta(eps)*y

with polynomial eps-dependence of the six coefficients has a zero-Hopf
equilibrium at the origin for five parameter families.  This package
predicts the periodic orbits and invariant tori born from the origin
(higher-order averaging, Lyapunov-Schmidt reduction, first Lyapunov
coefficient) and verifies each prediction by direct numerical integration
(Poincare maps, Floquet multipliers, torus detection).
"""

from .coefficients import (
    EpsPolynomial,
    OscillatorParams,
    ZeroHopfFamily,
    FAMILY_TAGS,
    UnknownFamily,
    check_family,
    eval_params,
    get_family,
    params_from_dict,
    params_from_json,
    vector_field,
)
from .standard_form import (
    FamilyMismatch,
    ReductionPipeline,
    ScalingSingularity,
    StandardFormSystem,
    closed_form_F1_iii,
    jordan_change,
    standardize,
)
from .averaging import (
    AveragedFunction,
    DerivativeTensors,
    NotTabulated,
    OrderUnavailable,
    averaged,
    averaged_series,
    closed_form_g,
)
from .bifurcation import (
    AveragedZero,
    DegenerateDelta,
    DegenerateDet,
    FlatF1,
    H4Displacement,
    LSReduction,
    NoCrossing,
    NSReport,
    PredictionReport,
    TransversalityFail,
    ZeroSearchResult,
    averaged_cycle_thm1,
    classify_zero,
    closed_form_f1_h3,
    displacement_h4,
    find_zeros,
    ls_bifurcation_functions,
    ns_analyze,
    predict_theorem1,
)
from .verify import (
    Diverged,
    IntegratorConfig,
    LostTransversality,
    NewtonDiverged,
    PeriodicOrbit,
    PeriodicOrbit3D,
    PoincareSection,
    StepLimitExceeded,
    TorusEvidence,
    detect_torus,
    floquet_prediction,
    integrate,
    mirror_section_point,
    mirror_section_seed,
    orbit_seed_3d,
    poincare_return,
    refine_periodic_orbit,
    refine_periodic_orbit_3d,
    section_for,
    section_seed,
    settle_section_point,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
