"""Finite instance model: an object, its subobject lattice, stability data.

An instance stands in for a coherent sheaf E (or a holomorphic pair
(E, phi)) together with the finitely many subobjects that matter for
stability questions.  Each node carries exact data (rank, Hilbert
polynomial, pair flag eps); containment is a DAG whose reflexive
transitive closure is taken internally; meet and join tables are partial
and checked for rank/polynomial additivity where provided.

Three stability modes:
  gieseker  compare reduced Hilbert polynomials P_F / rk F,
  slope     same machinery with degree-1 polynomials g*r*m + d,
  pair      compare corrected reduced polynomials (P - delta*eps) / rk.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .poly import (EQUAL, GREATER, LESS, InputError, Poly,
                   poly_compare_eventual, reduced_compare)

MAX_NODES = 4096
MAX_SUMMANDS = 10

MODES = ("gieseker", "slope", "pair")


class WrongMode(ValueError):
    """An operation specific to one stability mode was called in another."""


class TooLarge(ValueError):
    """Generator bounds exceeded."""


@dataclass(frozen=True)
class ObjectData:
    """Exact data of one node: rank, Hilbert polynomial, pair flag."""
    rank: int
    hilbert: Poly
    eps: int = 0

    def __post_init__(self):
        if not isinstance(self.rank, int) or self.rank < 0:
            raise InputError(f"rank must be a non-negative integer, got {self.rank!r}")
        if self.eps not in (0, 1):
            raise InputError(f"eps must be 0 or 1, got {self.eps!r}")

    @classmethod
    def from_json(cls, data) -> "ObjectData":
        if not isinstance(data, dict):
            raise InputError("node data must be an object")
        try:
            rank = data["rank"]
            poly = Poly.from_json(data["poly"])
        except KeyError as exc:
            raise InputError(f"node data missing field {exc}") from exc
        if not isinstance(rank, int) or isinstance(rank, bool):
            raise InputError(f"rank must be an integer, got {rank!r}")
        return cls(rank=rank, hilbert=poly, eps=int(data.get("eps", 0)))

    def to_json(self) -> dict:
        return {"rank": self.rank, "poly": self.hilbert.to_json(), "eps": self.eps}


class StabilityParams:
    """Stability mode plus its numerical data.

    dim_x is the dimension n of the underlying variety (bounds all
    polynomial degrees); delta is the pair-stability polynomial, required
    in pair mode with deg delta <= n - 1 and positive leading
    coefficient; g is the polarization degree used by slope encoding and
    the generators.
    """

    __slots__ = ("mode", "dim_x", "delta", "g")

    def __init__(self, mode: str, dim_x: int = 1,
                 delta: Optional[Poly] = None, g: Fraction = Fraction(1)):
        if mode not in MODES:
            raise InputError(f"mode must be one of {MODES}, got {mode!r}")
        if not isinstance(dim_x, int) or dim_x < 0:
            raise InputError("dimX must be a non-negative integer")
        g = Fraction(g)
        if g <= 0:
            raise InputError("g must be positive")
        if mode == "pair":
            if delta is None or delta.is_zero():
                raise InputError("pair mode needs a nonzero delta polynomial")
            if delta.degree > dim_x - 1:
                raise InputError(
                    f"delta degree {delta.degree} exceeds dimX - 1 = {dim_x - 1}")
            if delta.leading() <= 0:
                raise InputError("delta must have positive leading coefficient")
        else:
            delta = None
        self.mode = mode
        self.dim_x = dim_x
        self.delta = delta
        self.g = g

    def __repr__(self):
        return (f"StabilityParams(mode={self.mode!r}, dim_x={self.dim_x}, "
                f"delta={self.delta!r}, g={self.g})")


def _pair_key(a: str, b: str) -> tuple:
    return (a, b) if a <= b else (b, a)


class SubobjectLattice:
    """The containment lattice of subobject nodes.

    Nodes keep their insertion order (it fixes the deterministic scan
    order for witnesses); the order relation is the reflexive transitive
    closure of the supplied (child, parent) pairs.  meet/join are partial
    tables keyed by unordered id pairs.  Instances are immutable after
    construction.
    """

    def __init__(self, ambient: ObjectData,
                 nodes: Sequence[Tuple[str, ObjectData]],
                 order: Iterable[Tuple[str, str]],
                 meet: Optional[Dict] = None,
                 join: Optional[Dict] = None):
        self.ambient = ambient
        self.ids: List[str] = []
        self.node: Dict[str, ObjectData] = {}
        for nid, data in nodes:
            nid = str(nid)
            if nid in self.node:
                raise InputError(f"duplicate node id {nid!r}")
            self.ids.append(nid)
            self.node[nid] = data
        self._index = {nid: i for i, nid in enumerate(self.ids)}
        edges: Dict[str, set] = {nid: set() for nid in self.ids}
        self.order_pairs: List[Tuple[str, str]] = []
        for child, parent in order:
            child, parent = str(child), str(parent)
            if child not in self.node or parent not in self.node:
                raise InputError(f"order pair ({child!r}, {parent!r}) names unknown nodes")
            if child != parent and parent not in edges[child]:
                edges[child].add(parent)
                self.order_pairs.append((child, parent))
        # reflexive transitive closure, one DFS per node
        self._up: Dict[str, frozenset] = {}
        for nid in self.ids:
            seen = {nid}
            stack = list(edges[nid])
            while stack:
                cur = stack.pop()
                if cur in seen:
                    continue
                seen.add(cur)
                stack.extend(edges[cur])
            self._up[nid] = frozenset(seen)
        self._down: Dict[str, set] = {nid: set() for nid in self.ids}
        for nid, ups in self._up.items():
            for u in ups:
                self._down[u].add(nid)
        self.meet_table: Dict[tuple, str] = {}
        self.join_table: Dict[tuple, str] = {}
        for table, given in ((self.meet_table, meet), (self.join_table, join)):
            if not given:
                continue
            items = given.items() if isinstance(given, dict) else (
                ((a, b), c) for a, b, c in given)
            for (a, b), c in items:
                a, b, c = str(a), str(b), str(c)
                for x in (a, b, c):
                    if x not in self.node:
                        raise InputError(f"meet/join entry names unknown node {x!r}")
                table[_pair_key(a, b)] = c

    # -- order queries --------------------------------------------------

    def leq(self, a: str, b: str) -> bool:
        """True iff a is contained in b (reflexively)."""
        return b in self._up[a]

    def above(self, a: str) -> frozenset:
        return self._up[a]

    def below(self, a: str) -> frozenset:
        return frozenset(self._down[a])

    def strictly_between(self, a: str, b: str) -> List[str]:
        return [z for z in self.ids
                if z != a and z != b and self.leq(a, z) and self.leq(z, b)]

    def meet(self, a: str, b: str) -> Optional[str]:
        return self.meet_table.get(_pair_key(a, b))

    def join(self, a: str, b: str) -> Optional[str]:
        return self.join_table.get(_pair_key(a, b))

    def maximal_ids(self) -> List[str]:
        return [nid for nid in self.ids if self._up[nid] == frozenset({nid})]

    def minimal_ids(self) -> List[str]:
        return [nid for nid in self.ids if self._down[nid] == {nid}]

    @cached_property
    def top(self) -> str:
        tops = self.maximal_ids()
        if len(tops) != 1:
            raise InputError(f"lattice has {len(tops)} maximal nodes, expected one")
        return tops[0]

    @cached_property
    def bottom(self) -> str:
        bots = self.minimal_ids()
        if len(bots) != 1:
            raise InputError(f"lattice has {len(bots)} minimal nodes, expected one")
        return bots[0]

    def proper_nonzero_ids(self) -> List[str]:
        """Candidate subobjects for stability scans, in insertion order."""
        top, bottom = self.top, self.bottom
        return [nid for nid in self.ids if nid != top and nid != bottom]

    def covers_above(self, a: str) -> List[str]:
        """Nodes covering a: minimal elements strictly above a, insertion order."""
        strict = [b for b in self.ids if b != a and self.leq(a, b)]
        strict_set = set(strict)
        out = []
        for b in strict:
            if not any(c != b and self.leq(c, b) for c in strict_set):
                out.append(b)
        return out


@dataclass(frozen=True)
class Violation:
    kind: str
    nodes: tuple
    message: str


def validate_lattice(lat: SubobjectLattice, params: StabilityParams) -> List[Violation]:
    """Check every lattice invariant; violations come back as data."""
    out: List[Violation] = []

    def bad(kind, nodes, message):
        out.append(Violation(kind, tuple(nodes), message))

    if len(lat.ids) > MAX_NODES:
        bad("NodeCount", (), f"{len(lat.ids)} nodes exceeds the cap {MAX_NODES}")

    for a in lat.ids:
        for b in lat._up[a]:
            if b != a and a in lat._up[b] and lat._index[a] < lat._index[b]:
                bad("Antisymmetry", (a, b), f"{a!r} and {b!r} contain each other")

    tops = lat.maximal_ids()
    if len(tops) != 1:
        bad("UniqueTop", tuple(tops), f"{len(tops)} maximal nodes")
        top = None
    else:
        top = tops[0]
        if lat.node[top] != lat.ambient:
            bad("TopMismatch", (top,), "top node data differs from ambient")
    bots = lat.minimal_ids()
    if len(bots) != 1:
        bad("UniqueBottom", tuple(bots), f"{len(bots)} minimal nodes")
        bottom = None
    else:
        bottom = bots[0]
        d = lat.node[bottom]
        if d.rank != 0 or not d.hilbert.is_zero() or d.eps != 0:
            bad("BottomNotZero", (bottom,), "bottom node is not the zero object")

    amb = lat.ambient
    if amb.rank < 1:
        bad("AmbientRank", (), "ambient rank must be >= 1")
    if amb.hilbert.leading() <= 0:
        bad("AmbientPoly", (), "ambient polynomial needs a positive leading coefficient")

    for nid in lat.ids:
        if nid == bottom:
            continue
        d = lat.node[nid]
        if d.rank == 0:
            bad("RankZeroProperNode", (nid,),
                "rank-0 nodes other than the zero object are not supported")
        elif d.hilbert.leading() <= 0:
            bad("PolyLeading", (nid,), "nonzero node needs a positive leading coefficient")
        if d.hilbert.degree > params.dim_x:
            bad("DegreeVsDim", (nid,),
                f"polynomial degree {d.hilbert.degree} exceeds dimX = {params.dim_x}")
        if params.mode == "slope" and d.rank >= 1 and d.hilbert.degree != 1:
            bad("SlopeDegree", (nid,), "slope mode needs degree-1 polynomials")

    for a in lat.ids:
        da = lat.node[a]
        for b in lat._up[a]:
            if b == a:
                continue
            db = lat.node[b]
            if da.rank > db.rank:
                bad("RankMonotone", (a, b), f"rank drops along {a!r} c {b!r}")
            elif da.rank == db.rank and \
                    poly_compare_eventual(da.hilbert, db.hilbert) == GREATER:
                bad("Saturation", (a, b),
                    f"equal rank but larger polynomial along {a!r} c {b!r}")
            if da.eps > db.eps:
                bad("MonotoneEps", (a, b), f"eps drops along {a!r} c {b!r}")

    for key, c in lat.meet_table.items():
        a, b = key
        lower = lat._down[a] & lat._down[b]
        if c not in lower:
            bad("MeetBound", (a, b, c), f"meet({a!r},{b!r}) = {c!r} is not below both")
        elif not lower <= lat._down[c]:
            extra = sorted(lower - lat._down[c], key=lat._index.get)[0]
            bad("MeetNotGreatest", (a, b, c, extra),
                f"{extra!r} is a lower bound of ({a!r},{b!r}) not below {c!r}")
    for key, c in lat.join_table.items():
        a, b = key
        upper = set(lat._up[a] & lat._up[b])
        if c not in upper:
            bad("JoinBound", (a, b, c), f"join({a!r},{b!r}) = {c!r} is not above both")
        elif not upper <= lat._up[c]:
            extra = sorted(upper - lat._up[c], key=lat._index.get)[0]
            bad("JoinNotLeast", (a, b, c, extra),
                f"{extra!r} is an upper bound of ({a!r},{b!r}) not above {c!r}")

    for key in lat.meet_table:
        if key in lat.join_table:
            a, b = key
            mt, jn = lat.meet_table[key], lat.join_table[key]
            da, db = lat.node[a], lat.node[b]
            dm, dj = lat.node[mt], lat.node[jn]
            if da.rank + db.rank != dm.rank + dj.rank:
                bad("Additivity", (a, b), "rank additivity fails for meet/join")
            if da.hilbert + db.hilbert != dm.hilbert + dj.hilbert:
                bad("Additivity", (a, b), "polynomial additivity fails for meet/join")
            if dm.eps + dj.eps > da.eps + db.eps:
                bad("EpsSubmodular", (a, b),
                    "eps(meet) + eps(join) exceeds eps(a) + eps(b)")

    return out


def corrected_polynomial(node: ObjectData, params: StabilityParams) -> Poly:
    """The pair-corrected polynomial P - delta * eps."""
    if params.mode != "pair":
        raise WrongMode("corrected_polynomial is a pair-mode operation")
    if node.eps:
        return node.hilbert - params.delta
    return node.hilbert


def effective_polynomial(node: ObjectData, params: StabilityParams) -> Poly:
    """The polynomial stability actually compares: corrected in pair mode,
    plain otherwise."""
    if params.mode == "pair" and node.eps:
        return node.hilbert - params.delta
    return node.hilbert


def find_destabilizer(lat: SubobjectLattice, params: StabilityParams) -> Optional[str]:
    """First proper nonzero node with strictly larger reduced (corrected)
    polynomial than the ambient, in insertion order; None if semistable."""
    amb_poly = effective_polynomial(lat.ambient, params)
    amb_rank = lat.ambient.rank
    for nid in lat.proper_nonzero_ids():
        d = lat.node[nid]
        if d.rank < 1:
            continue
        if reduced_compare(effective_polynomial(d, params), d.rank,
                           amb_poly, amb_rank) == GREATER:
            return nid
    return None


def is_semistable(lat: SubobjectLattice, params: StabilityParams) -> bool:
    return find_destabilizer(lat, params) is None


# -- generators ----------------------------------------------------------


def _subset_id(mask: int) -> str:
    if mask == 0:
        return "0"
    return "+".join(f"e{i}" for i in range(mask.bit_length()) if mask >> i & 1)


def _summand_poly(rank: int, degree: Fraction, params: StabilityParams) -> Poly:
    if params.mode == "slope":
        return Poly((degree, params.g * rank))
    # Euler characteristic on the projective line: P(m) = r*m + d + r
    return Poly((degree + rank, rank))


def _subset_lattice(summands: Sequence[Tuple[int, Fraction]],
                    params: StabilityParams,
                    phi_on: Optional[int]) -> SubobjectLattice:
    k = len(summands)
    nodes = []
    order = []
    for mask in range(1 << k):
        rank = sum(summands[i][0] for i in range(k) if mask >> i & 1)
        degree = sum((summands[i][1] for i in range(k) if mask >> i & 1),
                     Fraction(0))
        poly = _summand_poly(rank, degree, params) if mask else Poly()
        eps = 1 if phi_on is not None and mask >> phi_on & 1 else 0
        nodes.append((_subset_id(mask), ObjectData(rank, poly, eps)))
        for i in range(k):
            if not mask >> i & 1:
                order.append((_subset_id(mask), _subset_id(mask | 1 << i)))
    meet = {}
    join = {}
    for a in range(1 << k):
        for b in range(a + 1, 1 << k):
            key = _pair_key(_subset_id(a), _subset_id(b))
            meet[key] = _subset_id(a & b)
            join[key] = _subset_id(a | b)
    ambient = nodes[(1 << k) - 1][1]
    return SubobjectLattice(ambient, nodes, order, meet, join)


def gen_split_bundle(degrees: Sequence[int], params: StabilityParams,
                     phi_on: Optional[int] = None) -> SubobjectLattice:
    """Direct sum of line bundles on the projective line.

    One node per subsum; rank = number of summands, degree = sum of
    degrees; meet/join are index-set intersection/union.  phi_on marks
    the summand carrying the pair morphism: eps(S) = 1 iff that summand
    lies in S.
    """
    if params.dim_x != 1:
        raise InputError("split-bundle generator works on the projective line (dimX = 1)")
    if not 1 <= len(degrees) <= MAX_SUMMANDS:
        raise TooLarge(f"need 1..{MAX_SUMMANDS} summands, got {len(degrees)}")
    if phi_on is not None and not 0 <= phi_on < len(degrees):
        raise InputError(f"phi_on index {phi_on} out of range")
    summands = [(1, Fraction(d)) for d in degrees]
    return _subset_lattice(summands, params, phi_on)


def gen_random_lattice(seed: int, params: StabilityParams,
                       max_summands: int = 4,
                       max_rank: int = 4,
                       degree_range: Tuple[int, int] = (-3, 3)) -> SubobjectLattice:
    """Seed-deterministic valid lattice: a split-bundle shape whose
    summands get random ranks and rational degree perturbations.
    Additivity survives because every node's data is the sum of its
    summands' data."""
    if not 1 <= max_summands <= MAX_SUMMANDS:
        raise TooLarge(f"max_summands must be in 1..{MAX_SUMMANDS}")
    rng = random.Random(seed)
    k = rng.randint(1, max_summands)
    lo, hi = degree_range
    summands = []
    budget = max(max_rank - k, 0)
    for _ in range(k):
        extra = rng.randint(0, budget) if budget > 0 else 0
        budget -= extra
        rank = 1 + extra
        degree = Fraction(rng.randint(4 * lo, 4 * hi), 4)
        summands.append((rank, degree))
    phi_on = rng.randrange(k) if params.mode == "pair" else None
    return _subset_lattice(summands, params, phi_on)


# -- JSON instance format -------------------------------------------------


def params_to_json(params: StabilityParams) -> dict:
    return {
        "mode": params.mode,
        "dimX": params.dim_x,
        "delta": params.delta.to_json() if params.delta is not None else None,
        "g": str(params.g),
    }


def lattice_to_json(lat: SubobjectLattice, params: StabilityParams) -> dict:
    data = params_to_json(params)
    data["ambient"] = lat.ambient.to_json()
    data["nodes"] = [dict(id=nid, **lat.node[nid].to_json()) for nid in lat.ids]
    idx = lat._index
    data["order"] = sorted(([a, b] for a, b in lat.order_pairs),
                           key=lambda p: (idx[p[0]], idx[p[1]]))
    data["meet"] = sorted(([a, b, c] for (a, b), c in lat.meet_table.items()),
                          key=lambda t: (idx[t[0]], idx[t[1]]))
    data["join"] = sorted(([a, b, c] for (a, b), c in lat.join_table.items()),
                          key=lambda t: (idx[t[0]], idx[t[1]]))
    return data


def lattice_from_json(data) -> Tuple[SubobjectLattice, StabilityParams]:
    if not isinstance(data, dict):
        raise InputError("instance file must contain a JSON object")
    for key in ("mode", "dimX", "ambient", "nodes", "order"):
        if key not in data:
            raise InputError(f"instance file missing {key!r}")
    delta = data.get("delta")
    params = StabilityParams(
        mode=data["mode"],
        dim_x=data["dimX"],
        delta=Poly.from_json(delta) if delta is not None else None,
        g=Fraction(str(data.get("g", 1))),
    )
    if not isinstance(data["nodes"], list):
        raise InputError("nodes must be an array")
    nodes = []
    for entry in data["nodes"]:
        if not isinstance(entry, dict) or "id" not in entry:
            raise InputError("each node needs an id")
        nodes.append((str(entry["id"]), ObjectData.from_json(entry)))
    order = data["order"]
    if not isinstance(order, list) or not all(
            isinstance(p, (list, tuple)) and len(p) == 2 for p in order):
        raise InputError("order must be an array of [child, parent] pairs")
    tables = {}
    for key in ("meet", "join"):
        raw = data.get(key) or []
        if not all(isinstance(t, (list, tuple)) and len(t) == 3 for t in raw):
            raise InputError(f"{key} must be an array of [a, b, c] triples")
        tables[key] = [(str(a), str(b), str(c)) for a, b, c in raw]
    lat = SubobjectLattice(ObjectData.from_json(data["ambient"]), nodes, order,
                           meet=tables["meet"], join=tables["join"])
    return lat, params
