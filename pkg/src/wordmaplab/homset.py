"""Endomorphisms of G and homomorphisms G^d -> G, with agreement counts.

Homomorphisms out of a direct power are stored componentwise: a d-tuple of
endomorphisms whose images commute elementwise.  Every homomorphism
G^d -> G arises from exactly one such tuple (restrict to the d embedded
copies of G), so enumerating these tuples enumerates the whole hom set.

Agreement counts compare a homomorphism with the evaluation map of a word w
over G^d; ``best_agreement`` maximises the agreement proportion over the full
hom set, breaking ties by enumeration order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _tables
from .errors import BudgetExceededError
from .freeword import Word, reduce
from .group import GroupTable

DEFAULT_CANDIDATE_BUDGET = 10_000_000
DEFAULT_AGREEMENT_BUDGET = 100_000_000


@dataclass(frozen=True)
class Endo:
    """An endomorphism as its full value table (index = argument id)."""

    values: tuple[int, ...]

    def __call__(self, g: int) -> int:
        return self.values[g]

    def is_bijective(self) -> bool:
        return len(set(self.values)) == len(self.values)

    def image(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.values)))


@dataclass(frozen=True)
class Hom:
    """A homomorphism G^d -> G as d componentwise endomorphisms."""

    d: int
    components: tuple[Endo, ...]

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if len(self.components) != self.d:
            raise ValueError("need exactly d components")

    def __call__(self, G: GroupTable, tup) -> int:
        acc = 0
        for i in range(self.d):
            acc = G.mul[acc][self.components[i](tup[i])]
        return acc


@dataclass(frozen=True)
class GeneratingSequence:
    """Greedy generators plus a BFS spanning structure for extension.

    ``order`` lists all element ids with every element appearing after its
    parent; element e != 0 satisfies e = parent_elem[e] * gens[parent_gen[e]].
    """

    generators: tuple[int, ...]
    order: tuple[int, ...]
    parent_elem: tuple[int, ...]
    parent_gen: tuple[int, ...]

    @property
    def expressions(self) -> list[tuple[int, ...]]:
        """Per-element words in the generators (tuples of generator indices)."""
        exprs: dict[int, tuple[int, ...]] = {0: ()}
        for e in self.order:
            if e != 0:
                exprs[e] = exprs[self.parent_elem[e]] + (self.parent_gen[e],)
        return [exprs[e] for e in range(len(self.order))]


def generating_sequence(G: GroupTable) -> GeneratingSequence:
    """Greedy generating sequence: repeatedly adjoin the smallest element id
    outside the subgroup generated so far, then re-close breadth-first."""
    n = G.n
    gens: list[int] = []
    order = [0]
    parent_elem = [0] * n
    parent_gen = [0] * n
    known = {0}

    def reclose():
        nonlocal order, parent_elem, parent_gen, known
        order = [0]
        parent_elem = [0] * n
        parent_gen = [0] * n
        known = {0}
        pos = 0
        while pos < len(order):
            e = order[pos]
            pos += 1
            for gi, g in enumerate(gens):
                h = G.mul[e][g]
                if h not in known:
                    known.add(h)
                    parent_elem[h] = e
                    parent_gen[h] = gi
                    order.append(h)

    while len(known) < n:
        outside = min(g for g in range(n) if g not in known)
        gens.append(outside)
        reclose()
    return GeneratingSequence(
        generators=tuple(gens),
        order=tuple(order),
        parent_elem=tuple(parent_elem),
        parent_gen=tuple(parent_gen),
    )


def _full_hom_check(M: np.ndarray, values: np.ndarray) -> bool:
    """values[a*b] == values[a]*values[b] for every pair, vectorized."""
    return np.array_equal(values[M], M[values[:, None], values[None, :]])


def endomorphisms(
    G: GroupTable, budget: int = DEFAULT_CANDIDATE_BUDGET
) -> list[Endo]:
    """All endomorphisms, in candidate-image order.

    Candidates assign images to the greedy generators (itertools.product over
    element ids), extend along the BFS spanning structure, and survive only if
    the full pairwise homomorphism condition holds.
    """
    n = G.n
    gs = generating_sequence(G)
    k = len(gs.generators)
    if n ** k > budget:
        raise BudgetExceededError(
            f"endomorphism search needs {n ** k} candidates, budget {budget}"
        )
    M = G.mul_array()
    mul = G.mul
    body = [e for e in gs.order if e != 0]
    pe = gs.parent_elem
    pg = gs.parent_gen
    out = []
    for images in itertools.product(range(n), repeat=k):
        vals = [0] * n
        for e in body:
            vals[e] = mul[vals[pe[e]]][images[pg[e]]]
        varr = np.asarray(vals, dtype=np.int64)
        if _full_hom_check(M, varr):
            out.append(Endo(values=tuple(vals)))
    return out


def automorphisms(
    G: GroupTable, budget: int = DEFAULT_CANDIDATE_BUDGET
) -> list[Endo]:
    return [e for e in endomorphisms(G, budget) if e.is_bijective()]


def homs_power(
    G: GroupTable, d: int, budget: int = DEFAULT_CANDIDATE_BUDGET
) -> list[Hom]:
    """All homomorphisms G^d -> G, as commuting d-tuples of endomorphisms."""
    if d < 1:
        raise ValueError("d must be >= 1")
    endos = endomorphisms(G, budget)
    if len(endos) ** d > budget:
        raise BudgetExceededError(
            f"hom enumeration needs {len(endos) ** d} tuples, budget {budget}"
        )
    M = G.mul_array()
    commutes = M == M.T
    images = [np.asarray(e.image(), dtype=np.int64) for e in endos]
    k = len(endos)
    pair_ok = np.empty((k, k), dtype=bool)
    for i in range(k):
        for j in range(i, k):
            ok = bool(commutes[np.ix_(images[i], images[j])].all())
            pair_ok[i, j] = pair_ok[j, i] = ok
    out = []
    for combo in itertools.product(range(k), repeat=d):
        if all(
            pair_ok[combo[i], combo[j]]
            for i in range(d)
            for j in range(i + 1, d)
        ):
            out.append(Hom(d=d, components=tuple(endos[c] for c in combo)))
    return out


def _hom_values(G: GroupTable, phi: Hom,
                cols: list[np.ndarray]) -> np.ndarray:
    M = G.mul_array()
    vals = np.zeros(len(cols[0]), dtype=np.int64)
    for i, comp in enumerate(phi.components):
        cvals = np.asarray(comp.values, dtype=np.int64)
        vals = M[vals, cvals[cols[i]]]
    return vals


def agreement_set(
    w: Word, G: GroupTable, phi: Hom,
    budget: int = DEFAULT_AGREEMENT_BUDGET,
) -> np.ndarray:
    """Boolean flags over G^d marking tuples where phi and w agree."""
    if w.arity > phi.d:
        raise ValueError(f"word uses x{w.arity} but hom has d = {phi.d}")
    wv = _tables.word_values(w, G, phi.d, budget)
    cols = _tables.coordinate_columns(G.n, phi.d)
    return _hom_values(G, phi, cols) == wv


def agreement_count(
    w: Word, G: GroupTable, phi: Hom,
    budget: int = DEFAULT_AGREEMENT_BUDGET,
) -> int:
    return int(agreement_set(w, G, phi, budget).sum())


def best_agreement(
    w: Word, G: GroupTable, d: int,
    hom_budget: int = DEFAULT_CANDIDATE_BUDGET,
    iter_budget: int = DEFAULT_AGREEMENT_BUDGET,
) -> tuple[Fraction, Hom]:
    """Maximum agreement proportion over all homs G^d -> G, with a witness.

    Ties go to the earliest hom in enumeration order, so the witness is
    deterministic.
    """
    if w.arity > d:
        raise ValueError(f"word uses x{w.arity} but d = {d}")
    homs = homs_power(G, d, hom_budget)
    size = G.n ** d
    _tables.check_table_budget(size, iter_budget)
    wv = _tables.word_values(w, G, d, iter_budget)
    cols = _tables.coordinate_columns(G.n, d)
    best_count = -1
    best_phi = None
    for phi in homs:
        c = int((_hom_values(G, phi, cols) == wv).sum())
        if c > best_count:
            best_count, best_phi = c, phi
    assert best_phi is not None
    return Fraction(best_count, size), best_phi


def power_agreement_profile(
    G: GroupTable, e: int, automorphisms_only: bool = False,
    budget: int = DEFAULT_CANDIDATE_BUDGET,
) -> Fraction:
    """Best agreement proportion of the e-th power map with a single
    endomorphism (or automorphism) of G."""
    w = reduce([(1, e)])
    wv = _tables.word_values(w, G, 1)
    pool = automorphisms(G, budget) if automorphisms_only \
        else endomorphisms(G, budget)
    best = 0
    for endo in pool:
        c = int((np.asarray(endo.values, dtype=np.int64) == wv).sum())
        best = max(best, c)
    return Fraction(best, G.n)
