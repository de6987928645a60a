"""Shared fixtures: the bundled examples and the (expensive) refined orbits."""

import time

import numpy as np
import pytest

from zerohopf.cli import EXAMPLES, predicted_zeros, torus_seeds
from zerohopf.verify import (IntegratorConfig, detect_torus,
                             refine_periodic_orbit, section_for, section_seed)


@pytest.fixture(scope="session")
def ex1():
    """(params, eps, fixture) of the symmetric-family example."""
    fx = EXAMPLES[1]
    return fx.params(), fx.eps_value(), fx


@pytest.fixture(scope="session")
def ex1_orbits(ex1):
    """The three refined periodic orbits of example 1, with the wall time."""
    p, eps, _fx = ex1
    t0 = time.perf_counter()
    section = section_for(p, "THM1")
    zeros = predicted_zeros(p, "THM1", eps)
    orbits = [refine_periodic_orbit(p, eps, section_seed(eps, z), section)
              for z in zeros]
    return {"orbits": orbits, "section": section, "zeros": zeros,
            "elapsed": time.perf_counter() - t0}


@pytest.fixture(scope="session")
def ex1_tori(ex1, ex1_orbits):
    """Torus evidence on both symmetric branches of example 1.

    Seeds are settled onto the invariant curves first (the attraction is
    slow), then the detection itself runs with 500 transient + 500 sample
    returns; only the post-settling work is timed.
    """
    p, eps, fx = ex1
    section = ex1_orbits["section"]
    orbits = ex1_orbits["orbits"]
    t0 = time.perf_counter()
    seed_a, seed_b = torus_seeds(p, eps, np.array(fx.figure_seeds[0]), section)
    centers = {1: orbits[1].section_point, 2: orbits[2].section_point}
    idx_a = min(centers, key=lambda i: float(np.hypot(*(seed_a - centers[i]))))
    seeds = {idx_a: seed_a, 3 - idx_a: seed_b}
    evidence = {idx: detect_torus(p, eps, seeds[idx], 500, 500, section,
                                  center=centers[idx], degree=16)
                for idx in (1, 2)}
    return {"evidence": evidence, "centers": centers,
            "elapsed": time.perf_counter() - t0}
