"""Greedy Harder-Narasimhan filtrations, plain and pair mode."""

import pytest

from kempfhn.hn import (
    Filtration,
    NotUnique,
    all_chains,
    blocks_semistable,
    check_hn_properties,
    hn_filtration,
    maximal_destabilizer,
    quotient_data,
    strict_descent,
)
from kempfhn.model import (
    ObjectData,
    StabilityParams,
    SubobjectLattice,
    gen_split_bundle,
)
from kempfhn.poly import Poly

SLOPE = StabilityParams(mode="slope", dim_x=1)
GIESEKER = StabilityParams(mode="gieseker", dim_x=1)


def pair_params(delta):
    return StabilityParams(mode="pair", dim_x=1, delta=Poly.constant(delta))


def test_maximal_destabilizer_examples():
    lat = gen_split_bundle([2, 0, -1], SLOPE)
    assert maximal_destabilizer(lat, SLOPE) == "e0"
    ss = gen_split_bundle([1, 1], SLOPE)
    assert maximal_destabilizer(ss, SLOPE) == ss.top
    p4 = pair_params(4)
    pl = gen_split_bundle([0, -2], p4, phi_on=0)
    assert maximal_destabilizer(pl, p4) == "e1"
    assert pl.node["e1"].eps == 0


def test_maximal_destabilizer_prefers_the_containing_maximizer():
    # degrees (2, 2): both summands tie, but their join contains them
    lat = gen_split_bundle([2, 2, 0], SLOPE)
    assert maximal_destabilizer(lat, SLOPE) == "e0+e1"


def test_hn_filtration_examples():
    lat = gen_split_bundle([2, 0, -1], SLOPE)
    assert hn_filtration(lat, SLOPE).chain == ("e0", "e0+e1", "e0+e1+e2")
    ss = gen_split_bundle([1, 1], SLOPE)
    assert hn_filtration(ss, SLOPE).chain == (ss.top,)
    p1 = pair_params(1)
    pl = gen_split_bundle([0, -2], p1, phi_on=0)
    assert hn_filtration(pl, p1).chain == ("e0", "e0+e1")


def test_hn_filtration_gieseker_matches_slope_on_split_bundles():
    for degrees in ([2, 0, -1], [3, 3, -1], [1, 0, 0, -2]):
        slope_chain = hn_filtration(gen_split_bundle(degrees, SLOPE), SLOPE)
        gies_chain = hn_filtration(gen_split_bundle(degrees, GIESEKER), GIESEKER)
        assert slope_chain.chain == gies_chain.chain


def test_not_unique_on_a_joinless_lattice():
    zero = ObjectData(0, Poly())
    a = ObjectData(1, Poly([2, 1]))
    b = ObjectData(1, Poly([2, 1]))
    top = ObjectData(3, Poly([0, 3]))
    lat = SubobjectLattice(top, [("0", zero), ("a", a), ("b", b), ("t", top)],
                           [("0", "a"), ("0", "b"), ("a", "t"), ("b", "t")])
    with pytest.raises(NotUnique):
        maximal_destabilizer(lat, SLOPE)


def test_first_filter_is_the_maximal_destabilizer():
    for degrees in ([2, 0, -1], [3, 1, 1, 0], [-1, -2, -3]):
        lat = gen_split_bundle(degrees, SLOPE)
        f = hn_filtration(lat, SLOPE)
        assert f.chain[0] == maximal_destabilizer(lat, SLOPE)


def test_quotient_data_pair_convention():
    p1 = pair_params(1)
    lat = gen_split_bundle([0, -2, -3], p1, phi_on=1)
    # base does not carry phi: the quotient inherits it
    q = quotient_data(lat, p1, "e0", "e0+e1")
    assert (q.rank, q.eps) == (1, 1)
    # base carries phi: the quotient morphism is forced to zero
    q2 = quotient_data(lat, p1, "e1", "e1+e2")
    assert (q2.rank, q2.eps) == (1, 0)
    assert q2.hilbert == lat.node["e1+e2"].hilbert - lat.node["e1"].hilbert


def test_check_hn_properties_cases():
    lat = gen_split_bundle([2, 0, -1], SLOPE)
    good = hn_filtration(lat, SLOPE)
    assert check_hn_properties(lat, SLOPE, good)

    # splitting the middle step wrongly breaks strict descent
    full_flag = Filtration(("e0", "e0+e2", "e0+e1+e2"))
    assert not check_hn_properties(lat, SLOPE, full_flag)

    # the bare ambient on an unstable instance fails semistability
    assert not check_hn_properties(lat, SLOPE, Filtration(("e0+e1+e2",)))

    ss = gen_split_bundle([1, 1], SLOPE)
    assert check_hn_properties(ss, SLOPE, Filtration((ss.top,)))


def test_descent_and_semistability_split_cleanly():
    lat = gen_split_bundle([2, 0, -1], SLOPE)
    # e0+e1 c E descends (slope 1 > -1) but its first block is unstable
    partial = Filtration(("e0+e1", "e0+e1+e2"))
    assert strict_descent(lat, SLOPE, partial)
    assert not blocks_semistable(lat, SLOPE, partial)


def test_chain_shape_is_enforced():
    lat = gen_split_bundle([2, 0, -1], SLOPE)
    assert not check_hn_properties(lat, SLOPE, Filtration(("e0",)))
    assert not check_hn_properties(
        lat, SLOPE, Filtration(("0", "e0", "e0+e1+e2")))


def test_all_chains_enumerates_exactly_the_chains():
    lat = gen_split_bundle([2, 0, -1], SLOPE)
    chains = {f.chain for f in all_chains(lat)}
    # proper nonzero nodes form the middle of the boolean cube on {0,1,2}:
    # the bare top, 6 single-filter chains, 6 singleton-inside-double flags
    assert ("e0+e1+e2",) in chains
    assert ("e0", "e0+e1", "e0+e1+e2") in chains
    assert ("e1", "e0+e1+e2") in chains
    assert all(c[-1] == "e0+e1+e2" for c in chains)
    assert len(chains) == 1 + 6 + 6
    for c in chains:
        for i in range(len(c) - 1):
            assert lat.leq(c[i], c[i + 1]) and c[i] != c[i + 1]


def test_hn_uniqueness_by_brute_force_spot_check():
    for mode, degrees in ((SLOPE, [2, 0, -1]), (GIESEKER, [3, 3, -1])):
        lat = gen_split_bundle(degrees, mode)
        expected = hn_filtration(lat, mode)
        passing = [f.chain for f in all_chains(lat)
                   if check_hn_properties(lat, mode, f)]
        assert passing == [expected.chain]
