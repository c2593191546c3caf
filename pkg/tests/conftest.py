"""Shared fixtures: the generator sweeps are computed once per session
and reused by every acceptance criterion that quantifies over them."""

import time
from fractions import Fraction
from itertools import combinations_with_replacement
from random import Random

import pytest

from kempfhn.kempf import verify_equality
from kempfhn.model import StabilityParams, gen_split_bundle
from kempfhn.poly import Poly

from oracles import random_cone_instance

DEGREES = range(-3, 4)


def degree_multisets(max_len):
    for length in range(1, max_len + 1):
        yield from combinations_with_replacement(DEGREES, length)


@pytest.fixture(scope="session")
def sheaf_sweep():
    """Every split-bundle instance with degree entries in [-3, 3] and
    length <= 5, slope and gieseker, with its verification report.
    Returns (elapsed seconds, records); each record is
    (mode, degrees, lattice, params, report)."""
    records = []
    t0 = time.perf_counter()
    for mode in ("slope", "gieseker"):
        params = StabilityParams(mode=mode, dim_x=1)
        for degrees in degree_multisets(5):
            lat = gen_split_bundle(list(degrees), params)
            records.append((mode, degrees, lat, params,
                            verify_equality(lat, params)))
    elapsed = time.perf_counter() - t0
    return elapsed, records


@pytest.fixture(scope="session")
def pair_sweep():
    """Every pair split-bundle instance with length <= 4, phi on each
    summand in turn, delta in {1/2, 1, 4}.  Returns (elapsed seconds,
    records); each record is (delta, degrees, phi_on, lattice, params,
    report)."""
    records = []
    t0 = time.perf_counter()
    for delta in (Fraction(1, 2), Fraction(1), Fraction(4)):
        params = StabilityParams(mode="pair", dim_x=1,
                                 delta=Poly.constant(delta))
        for degrees in degree_multisets(4):
            for phi_on in range(len(degrees)):
                lat = gen_split_bundle(list(degrees), params, phi_on=phi_on)
                records.append((delta, degrees, phi_on, lat, params,
                                verify_equality(lat, params)))
    elapsed = time.perf_counter() - t0
    return elapsed, records


@pytest.fixture(scope="session")
def cone_batch():
    """1000 seeded random cone instances (t+1 <= 8, entry numerators and
    denominators <= 20)."""
    rng = Random(20260825)
    return [random_cone_instance(rng) for _ in range(1000)]


def all_sweep_records(sheaf, pairs):
    """Uniform view over both sweeps: (lattice, params, report)."""
    for _, _, lat, params, report in sheaf[1]:
        yield lat, params, report
    for _, _, _, lat, params, report in pairs[1]:
        yield lat, params, report
