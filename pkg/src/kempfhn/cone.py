"""Maximize mu_v(Gamma) = (Gamma,v)_b / ||Gamma||_b over the monotone cone.

The cone is C = {Gamma_1 <= ... <= Gamma_{t+1}} inside R^{t+1} equipped
with the diagonal inner product (x,y)_b = sum b^i x_i y_i, b^i > 0.  The
input direction v satisfies sum v_i b^i = 0.  The maximizer is read off a
picture: plot the cumulative graph of the numbers w^i = -b^i v_i against
cumulative b, take the least concave majorant ("convex envelope" in the
sources that name this construction), and let Gamma be the negated slopes
of the majorant.  That Gamma is also the metric projection of v onto C,
which gives two independent ways to certify it (a pool-adjacent-violators
projector and a separating-hyperplane test), both implemented below.

Everything here is generic over the scalars: exact rationals for
instances at a fixed integer m, rational functions of m under the
eventual order for asymptotic instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .poly import (EQUAL, GREATER, LESS, RationalFunction, ScaleValue,
                   scalar_sign)


class InvalidInstance(ValueError):
    """ConeInstance data violating its invariants."""


class ZeroGamma(ValueError):
    """mu_value was asked to evaluate the zero vector."""


class NotInCone(ValueError):
    """A Gamma with a strict descent was passed where a cone point is required."""


def _coerce_entries(xs):
    xs = list(xs)
    if any(isinstance(x, RationalFunction) for x in xs):
        out = []
        for x in xs:
            if isinstance(x, RationalFunction):
                out.append(x)
            else:
                out.append(RationalFunction.from_scalar(x))
        return tuple(out), "asymptotic"
    return tuple(Fraction(x) for x in xs), "numeric"


class ConeInstance:
    """A weighted monotone-cone problem (b, v).

    Invariants: len(b) == len(v) >= 1, every b^i (eventually) positive,
    sum v_i b^i == 0 exactly, and v != 0.  `m` optionally records the
    evaluation point the instance was built at, so downstream ScaleValues
    refuse comparisons across different scales.
    """

    __slots__ = ("b", "v", "mode", "m")

    def __init__(self, b: Sequence, v: Sequence, m: Optional[int] = None):
        b, kind_b = _coerce_entries(b)
        v, kind_v = _coerce_entries(v)
        if kind_b != kind_v:
            # promote the rational side to rational functions
            if kind_b == "numeric":
                b, kind_b = _coerce_entries([RationalFunction.from_scalar(x) for x in b])
            else:
                v, kind_v = _coerce_entries([RationalFunction.from_scalar(x) for x in v])
        if len(b) != len(v) or not b:
            raise InvalidInstance("b and v must have equal positive length")
        for x in b:
            if scalar_sign(x) != GREATER:
                raise InvalidInstance("all inner-product weights b^i must be positive")
        acc = None
        for bi, vi in zip(b, v):
            term = bi * vi
            acc = term if acc is None else acc + term
        if scalar_sign(acc) != EQUAL:
            raise InvalidInstance("v must satisfy sum v_i b^i = 0")
        if all(scalar_sign(x) == EQUAL for x in v):
            raise InvalidInstance("v must be nonzero")
        self.b = b
        self.v = v
        self.mode = kind_b
        self.m = m

    @property
    def t_plus_1(self) -> int:
        return len(self.b)

    def dot(self, x: Sequence, y: Sequence):
        acc = None
        for bi, xi, yi in zip(self.b, x, y):
            term = bi * xi * yi
            acc = term if acc is None else acc + term
        return acc


@dataclass
class GraphData:
    """The cumulative graph of an instance and its concave majorant.

    points: t+2 pairs (x_i, w_i) starting at the origin,
    tilde:   the majorant values w~_i at the same abscissae,
    hull:    indices of the majorant's vertices (corners, endpoints kept,
             collinear interior points merged away),
    gamma:   negated majorant slopes, Gamma_i = -(w~_i - w~_{i-1}) / b^i.
    """
    points: list
    tilde: list
    hull: list
    gamma: tuple


@dataclass
class Maximizer:
    """A positive maximizer of mu_v over the cone, with its graph."""
    gamma: tuple
    value: ScaleValue
    graph: GraphData


def graph_points(inst: ConeInstance) -> list:
    """Cumulative graph: x_i = b^1 + ... + b^i, w_i = -(b^1 v_1 + ... + b^i v_i)."""
    zero = inst.b[0] - inst.b[0]
    pts = [(zero, zero)]
    x = zero
    w = zero
    for bi, vi in zip(inst.b, inst.v):
        x = x + bi
        w = w - bi * vi
        pts.append((x, w))
    return pts


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def concave_envelope(points: list) -> tuple[list, list]:
    """Least concave majorant of a graph with strictly increasing x.

    Returns (tilde, hull): the majorant evaluated at every input
    abscissa, and the indices of its vertices.  Upper-hull monotone scan;
    orientation tests are exact, collinear interior points are merged.
    """
    n = len(points)
    if n < 2:
        return [p[1] for p in points], list(range(n))
    hull = [0]
    for i in range(1, n):
        while len(hull) >= 2 and scalar_sign(
                _cross(points[hull[-2]], points[hull[-1]], points[i])) != LESS:
            hull.pop()
        hull.append(i)
    tilde = []
    seg = 0
    for i, (x, w) in enumerate(points):
        if i == hull[seg]:
            tilde.append(w)
            continue
        while hull[seg + 1] < i:
            seg += 1
        xa, wa = points[hull[seg]]
        xb, wb = points[hull[seg + 1]]
        tilde.append(wa + (wb - wa) * (x - xa) / (xb - xa))
    return tilde, hull


def envelope_graph(inst: ConeInstance) -> GraphData:
    pts = graph_points(inst)
    tilde, hull = concave_envelope(pts)
    gamma = []
    for i, bi in enumerate(inst.b):
        gamma.append(-(tilde[i + 1] - tilde[i]) / bi)
    return GraphData(points=pts, tilde=tilde, hull=hull, gamma=tuple(gamma))


def kempf_direction(inst: ConeInstance) -> Optional[Maximizer]:
    """The unique maximizing ray of mu_v over the cone, or None.

    None means the maximum over the cone is nonpositive (the envelope is
    flat at zero, i.e. v already points away from the cone): the
    semistable verdict.  Otherwise the returned Gamma is the exact
    envelope output with value^2 = (Gamma,v)^2/||Gamma||^2 > 0.
    """
    graph = envelope_graph(inst)
    if all(scalar_sign(g) == EQUAL for g in graph.gamma):
        return None
    value = mu_value(inst, graph.gamma)
    return Maximizer(gamma=graph.gamma, value=value, graph=graph)


def mu_value(inst: ConeInstance, gamma: Sequence) -> ScaleValue:
    """Exact sign and squared magnitude of mu_v(Gamma) for Gamma in the cone."""
    gamma, kind = _coerce_entries(gamma)
    if len(gamma) != inst.t_plus_1:
        raise InvalidInstance("gamma length does not match the instance")
    if all(scalar_sign(g) == EQUAL for g in gamma):
        raise ZeroGamma("mu is undefined on the zero vector")
    for i in range(len(gamma) - 1):
        if scalar_sign(gamma[i + 1] - gamma[i]) == LESS:
            raise NotInCone(f"gamma decreases at step {i + 1}")
    num = inst.dot(gamma, inst.v)
    den = inst.dot(gamma, gamma)
    sign = scalar_sign(num)
    return ScaleValue(sign, num * num / den, inst.mode, inst.m)


def cone_generators(t_plus_1: int) -> list:
    """Generators of the monotone cone: the step vectors plus +-(1,...,1)."""
    gens = []
    for k in range(1, t_plus_1):
        gens.append((0,) * k + (1,) * (t_plus_1 - k))
    gens.append((1,) * t_plus_1)
    gens.append((-1,) * t_plus_1)
    return gens


def separation_certificate(inst: ConeInstance, gamma: Sequence) -> bool:
    """Finite certificate that gamma is the metric projection of v.

    True iff the hyperplane through gamma with normal v - gamma
    separates v from the cone: (v - gamma, gamma)_b = 0 and
    (v - gamma, g)_b <= 0 for every cone generator g.  The zero vector
    is a legal gamma here (it certifies the nonpositive case).
    """
    gamma, kind = _coerce_entries(gamma)
    if len(gamma) != inst.t_plus_1:
        raise InvalidInstance("gamma length does not match the instance")
    for i in range(len(gamma) - 1):
        if scalar_sign(gamma[i + 1] - gamma[i]) == LESS:
            raise NotInCone(f"gamma decreases at step {i + 1}")
    resid = tuple(vi - gi for vi, gi in zip(inst.v, gamma))
    if scalar_sign(inst.dot(resid, gamma)) != EQUAL:
        return False
    for g in cone_generators(inst.t_plus_1):
        if scalar_sign(inst.dot(resid, g)) == GREATER:
            return False
    return True


def project_monotone(b: Sequence, v: Sequence):
    """Projection of v onto the monotone cone under (.,.)_b by exact
    pool-adjacent-violators.  Independent of the envelope path; used as a
    cross-check by tests and `selftest`.
    """
    b, _ = _coerce_entries(b)
    v, _ = _coerce_entries(v)
    if len(b) != len(v) or not b:
        raise InvalidInstance("b and v must have equal positive length")
    # blocks of (weight sum, weighted value sum, multiplicity)
    blocks = []
    for bi, vi in zip(b, v):
        blocks.append([bi, bi * vi, 1])
        while len(blocks) >= 2:
            wb, sb, nb = blocks[-1]
            wa, sa, na = blocks[-2]
            # merge while the previous block mean exceeds the current one
            if scalar_sign(sa * wb - sb * wa) != GREATER:
                break
            blocks.pop()
            blocks[-1] = [wa + wb, sa + sb, na + nb]
    out = []
    for w, s, n in blocks:
        mean = s / w
        out.extend([mean] * n)
    return tuple(out)
