"""Harder-Narasimhan filtrations, computed with no GIT in sight.

The algorithm is the classical greedy one: take the maximal
destabilizing subobject (the node maximizing the reduced, pair-corrected
polynomial; among ties the one containing all others), pass to the
quotient, repeat.  Quotients are virtual: a node G above the current
filter F represents G/F with rank r_G - r_F, polynomial P_G - P_F, and
the pair flag following the quotient convention (phi nonzero on F kills
the quotient morphism, otherwise eps is inherited).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

from .poly import EQUAL, GREATER, LESS, InputError, Poly, reduced_compare
from .model import (ObjectData, StabilityParams, SubobjectLattice, TooLarge,
                    effective_polynomial)


class NotUnique(ValueError):
    """Equal maximal destabilizers are incomparable and no join reconciles
    them: the lattice is not HN-complete.  Data error, not a tie-break."""

    def __init__(self, ids):
        self.ids = tuple(ids)
        super().__init__(
            "incomparable maximal destabilizers: " + ", ".join(map(repr, self.ids)))


class DegenerateQuotient(ValueError):
    """No positive-rank step exists above the current filter."""


@dataclass(frozen=True)
class Filtration:
    """A strictly increasing chain of node ids ending at the top node,
    zero object excluded."""
    chain: Tuple[str, ...]

    def __len__(self):
        return len(self.chain)

    def __iter__(self):
        return iter(self.chain)


def quotient_data(lat: SubobjectLattice, params: StabilityParams,
                  base: Optional[str], nid: str) -> ObjectData:
    """Virtual data of nid/base.  base None (or the bottom node) means the
    subobject itself.  Pair convention: eps(base) = 1 forces the quotient
    morphism to zero, so every quotient eps is 0 from there on."""
    d = lat.node[nid]
    if base is None or base == lat.bottom:
        return d
    b = lat.node[base]
    if params.mode == "pair":
        eps = 0 if b.eps else d.eps
    else:
        eps = 0
    return ObjectData(rank=d.rank - b.rank, hilbert=d.hilbert - b.hilbert, eps=eps)


def _reduced_cmp(x: ObjectData, y: ObjectData, params: StabilityParams) -> int:
    return reduced_compare(effective_polynomial(x, params), x.rank,
                           effective_polynomial(y, params), y.rank)


def _max_destabilizer_above(lat: SubobjectLattice, params: StabilityParams,
                            base: Optional[str]) -> str:
    """The maximal destabilizer of the (virtual) quotient by base."""
    if base is None:
        base = lat.bottom
    candidates = [nid for nid in lat.ids
                  if nid != base and lat.leq(base, nid)]
    best: List[str] = []
    best_data: Optional[ObjectData] = None
    for nid in candidates:
        q = quotient_data(lat, params, base, nid)
        if q.rank < 1:
            continue
        if best_data is None:
            best, best_data = [nid], q
            continue
        c = _reduced_cmp(q, best_data, params)
        if c == GREATER:
            best, best_data = [nid], q
        elif c == EQUAL:
            best.append(nid)
    if not best:
        raise DegenerateQuotient(f"no positive-rank node above {base!r}")
    maximal = [f for f in best
               if not any(g != f and lat.leq(f, g) for g in best)]
    if len(maximal) != 1:
        raise NotUnique(maximal)
    return maximal[0]


def maximal_destabilizer(lat: SubobjectLattice, params: StabilityParams) -> str:
    """The unique node maximizing the reduced (corrected) polynomial and
    containing every other maximizer.  For a semistable ambient this is
    the top node."""
    return _max_destabilizer_above(lat, params, None)


def hn_filtration(lat: SubobjectLattice, params: StabilityParams) -> Filtration:
    """Greedy Harder-Narasimhan filtration E_1 c ... c E_{t+1} = E."""
    top = lat.top
    chain: List[str] = []
    base: Optional[str] = None
    while True:
        nxt = _max_destabilizer_above(lat, params, base)
        chain.append(nxt)
        if nxt == top:
            return Filtration(tuple(chain))
        base = nxt


def _chain_quotients(lat: SubobjectLattice, params: StabilityParams,
                     f: Filtration) -> Optional[List[ObjectData]]:
    """Virtual quotient data along a chain, or None when the chain is not
    a structurally valid filtration (wrong endpoint, zero object inside,
    rank-free step).  Unknown ids and non-chains are hard errors."""
    chain = tuple(f.chain)
    if not chain or chain[-1] != lat.top:
        return None
    bottom = lat.bottom
    prev: Optional[str] = None
    for nid in chain:
        if nid not in lat.node:
            raise InputError(f"chain names unknown node {nid!r}")
        if nid == bottom:
            return None
        if prev is not None and (nid == prev or not lat.leq(prev, nid)):
            raise InputError("chain is not strictly increasing")
        prev = nid
    quotients = []
    base = None
    for nid in chain:
        quotients.append(quotient_data(lat, params, base, nid))
        base = nid
    if any(q.rank < 1 for q in quotients):
        return None
    return quotients


def strict_descent(lat: SubobjectLattice, params: StabilityParams,
                   f: Filtration) -> bool:
    """Reduced (corrected) quotient polynomials strictly decrease along f."""
    quotients = _chain_quotients(lat, params, f)
    if quotients is None:
        return False
    return all(_reduced_cmp(quotients[i], quotients[i + 1], params) == GREATER
               for i in range(len(quotients) - 1))


def blocks_semistable(lat: SubobjectLattice, params: StabilityParams,
                      f: Filtration) -> bool:
    """Every quotient E_i/E_{i-1} is semistable against the lattice: no
    node z between consecutive filters destabilizes it."""
    quotients = _chain_quotients(lat, params, f)
    if quotients is None:
        return False
    base = None
    for nid, q in zip(f.chain, quotients):
        lower = base if base is not None else lat.bottom
        for z in lat.ids:
            if z == lower or z == nid:
                continue
            if not (lat.leq(lower, z) and lat.leq(z, nid)):
                continue
            zq = quotient_data(lat, params, base, z)
            if zq.rank < 1:
                continue
            if _reduced_cmp(zq, q, params) == GREATER:
                return False
        base = nid
    return True


def check_hn_properties(lat: SubobjectLattice, params: StabilityParams,
                        f: Filtration) -> bool:
    """True iff f has the two defining HN properties inside this lattice:
    strictly decreasing reduced quotient polynomials, and every quotient
    semistable against the lattice nodes between consecutive filters."""
    if _chain_quotients(lat, params, f) is None:
        return False
    return strict_descent(lat, params, f) and blocks_semistable(lat, params, f)


def all_chains(lat: SubobjectLattice) -> Iterator[Filtration]:
    """Every chain of nonzero nodes ending at the top, for brute-force
    uniqueness checks on small lattices."""
    proper = lat.proper_nonzero_ids()
    if len(proper) > 20:
        raise TooLarge(f"brute force over {len(proper)} proper nodes refused")
    top = lat.top
    n = len(proper)
    for mask in range(1 << n):
        subset = [proper[i] for i in range(n) if mask >> i & 1]
        # strictly more nodes sit below the larger member of any strict
        # containment, so this key linearizes every true chain
        ordered = sorted(subset, key=lambda nid: len(lat.below(nid)))
        ok = all(ordered[i] != ordered[i + 1] and lat.leq(ordered[i], ordered[i + 1])
                 for i in range(len(ordered) - 1))
        if ok:
            yield Filtration(tuple(ordered) + (top,))
