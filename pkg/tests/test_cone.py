"""Monotone-cone maximization: graph, envelope, certificate, projection."""

from fractions import Fraction
from random import Random

import pytest

from kempfhn.cone import (
    ConeInstance,
    InvalidInstance,
    NotInCone,
    ZeroGamma,
    concave_envelope,
    cone_generators,
    envelope_graph,
    graph_points,
    kempf_direction,
    mu_value,
    project_monotone,
    separation_certificate,
)
from kempfhn.poly import EQUAL, Poly, RationalFunction, scale_compare

from oracles import mu_squared, projection_oracle, random_cone_instance, same_ray

F = Fraction


def test_instance_validation():
    with pytest.raises(InvalidInstance):
        ConeInstance([1, 1], [0, 0])
    with pytest.raises(InvalidInstance):
        ConeInstance([1, 1], [1, 1])
    with pytest.raises(InvalidInstance):
        ConeInstance([1, -1], [1, 1])
    with pytest.raises(InvalidInstance):
        ConeInstance([1, 1, 1], [1, -1])
    with pytest.raises(InvalidInstance):
        ConeInstance([], [])


def test_graph_points_examples():
    inst = ConeInstance([1, 1, 1], [-1, 2, -1])
    assert graph_points(inst) == [(0, 0), (1, 1), (2, -1), (3, 0)]
    inst2 = ConeInstance([2, 1, 1], [-1, 3, -1])
    assert graph_points(inst2) == [(0, 0), (2, 2), (3, -1), (4, 0)]


def test_graph_closes_at_zero():
    rng = Random(7)
    for _ in range(25):
        inst = random_cone_instance(rng, max_len=6)
        pts = graph_points(inst)
        assert pts[0] == (0, 0)
        assert pts[-1][1] == 0


def test_concave_envelope_examples():
    tilde, hull = concave_envelope([(0, 0), (1, 1), (2, -1), (3, 0)])
    assert tilde == [0, 1, F(1, 2), 0]
    assert hull == [0, 1, 3]
    tilde2, _ = concave_envelope([(0, 0), (2, 2), (3, -1), (4, 0)])
    assert tilde2 == [0, 2, 1, 0]


def test_concave_envelope_identity_when_concave():
    pts = [(0, 0), (1, 1), (2, 2), (3, 0)]
    tilde, hull = concave_envelope(pts)
    assert tilde == [p[1] for p in pts]
    assert hull == [0, 2, 3]


def test_envelope_gamma_examples():
    g = envelope_graph(ConeInstance([1, 1, 1], [-1, 2, -1]))
    assert g.gamma == (-1, F(1, 2), F(1, 2))
    g2 = envelope_graph(ConeInstance([2, 1, 1], [-1, 3, -1]))
    assert g2.gamma == (-1, 1, 1)
    g3 = envelope_graph(ConeInstance([1, 1, 1], [-1, -1, 2]))
    assert g3.gamma == (-1, -1, 2)


def test_kempf_direction_examples():
    m = kempf_direction(ConeInstance([1, 1, 1], [-1, -1, 2]))
    assert m.gamma == (-1, -1, 2)
    assert m.value.sign == 1 and m.value.mag2 == 6

    m2 = kempf_direction(ConeInstance([1, 1, 1], [-1, 2, -1]))
    assert m2.gamma == (-1, F(1, 2), F(1, 2))
    assert m2.value.mag2 == F(3, 2)

    m3 = kempf_direction(ConeInstance([2, 1, 1], [-1, 3, -1]))
    assert m3.gamma == (-1, 1, 1)
    assert m3.value.mag2 == 4

    assert kempf_direction(ConeInstance([1, 1], [1, -1])) is None


def test_mu_value_consistency_and_scaling():
    inst = ConeInstance([1, 1, 1], [-1, 2, -1])
    best = kempf_direction(inst)
    direct = mu_value(inst, best.gamma)
    assert scale_compare(direct, best.value) == EQUAL
    scaled = mu_value(inst, [g * F(7, 3) for g in best.gamma])
    assert scale_compare(scaled, best.value) == EQUAL


def test_mu_value_zero_sign():
    inst = ConeInstance([1, 1, 1], [-1, 2, -1])
    v = mu_value(inst, [-1, 0, 1])
    assert v.sign == 0
    assert v.mag2 == 0


def test_mu_value_rejections():
    inst = ConeInstance([1, 1, 1], [-1, 2, -1])
    with pytest.raises(ZeroGamma):
        mu_value(inst, [0, 0, 0])
    with pytest.raises(NotInCone):
        mu_value(inst, [1, 0, 2])
    with pytest.raises(InvalidInstance):
        mu_value(inst, [0, 1])


def test_cone_generators():
    gens = cone_generators(3)
    assert (0, 1, 1) in gens
    assert (0, 0, 1) in gens
    assert (1, 1, 1) in gens
    assert (-1, -1, -1) in gens
    assert len(gens) == 4


def test_separation_certificate_examples():
    inst = ConeInstance([1, 1, 1], [-1, 2, -1])
    best = kempf_direction(inst)
    assert separation_certificate(inst, best.gamma)
    assert not separation_certificate(inst, [-1, 0, 1])

    in_cone = ConeInstance([1, 1, 1], [-1, -1, 2])
    assert separation_certificate(in_cone, in_cone.v)

    with pytest.raises(NotInCone):
        separation_certificate(inst, [1, 0, 2])


def test_zero_gamma_certifies_nonpositive_case():
    inst = ConeInstance([1, 1], [1, -1])
    assert kempf_direction(inst) is None
    assert separation_certificate(inst, [0, 0])


def test_fixed_point_when_v_in_cone():
    rng = Random(11)
    checked = 0
    for _ in range(200):
        inst = random_cone_instance(rng, max_len=6)
        if any(inst.v[i + 1] < inst.v[i] for i in range(len(inst.v) - 1)):
            continue
        best = kempf_direction(inst)
        assert best is not None and best.gamma == inst.v
        checked += 1
    assert checked > 0


def test_pava_matches_envelope_and_oracle():
    rng = Random(3)
    for _ in range(60):
        inst = random_cone_instance(rng, max_len=6, bound=9)
        pava = project_monotone(inst.b, inst.v)
        assert pava == projection_oracle(inst.b, inst.v)
        best = kempf_direction(inst)
        if best is None:
            # flat envelope: the projection must be a constant vector,
            # and the balance condition forces that constant to zero
            assert all(x == pava[0] for x in pava)
            assert pava[0] == 0
        else:
            assert same_ray(best.gamma, pava)


def test_majorant_invariants():
    rng = Random(5)
    for _ in range(60):
        inst = random_cone_instance(rng, max_len=7, bound=12)
        g = envelope_graph(inst)
        ws = [p[1] for p in g.points]
        assert g.tilde[0] == ws[0] and g.tilde[-1] == ws[-1]
        assert all(t >= w for t, w in zip(g.tilde, ws))
        assert all(g.gamma[i] <= g.gamma[i + 1] for i in range(len(g.gamma) - 1))
        # strict majorant gap forces equal consecutive slopes
        for i in range(1, len(g.tilde) - 1):
            if g.tilde[i] > ws[i]:
                assert g.gamma[i] == g.gamma[i - 1]


def test_asymptotic_entries_run_over_rational_functions():
    m = RationalFunction(Poly([0, 1]))
    one = RationalFunction.from_scalar(1)
    # b = (m, m, m), v = (-1, 2, -1): same shape as the numeric example
    inst = ConeInstance([m, m, m], [-one, 2 * one, -one])
    assert inst.mode == "asymptotic"
    best = kempf_direction(inst)
    assert [g.eval(17) for g in best.gamma] == [-1, F(1, 2), F(1, 2)]
    assert best.value.sign == 1
    # mu^2 = (Gamma, v)_b^2 / ||Gamma||_b^2 = (3m)^2/4 / (3m/2) = 3m/2
    assert best.value.mag2 == F(3, 2) * m


def test_mu_squared_oracle_agrees_on_examples():
    sign, mag2 = mu_squared([1, 1, 1], [-1, 2, -1], [-1, F(1, 2), F(1, 2)])
    assert (sign, mag2) == (1, F(3, 2))
    sign2, mag2_2 = mu_squared([2, 1, 1], [-1, 3, -1], [-1, 1, 1])
    assert (sign2, mag2_2) == (1, 4)
