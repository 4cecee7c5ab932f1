"""Finite groups as validated Cayley tables.

Element ids are 0..n-1 with 0 always the identity.  Groups built from
permutation generators get their ids from breadth-first closure order, so a
given generator list always yields the same table.  Construction goes through
``build`` with a small spec grammar:

    spec := atom ('x' atom)*
    atom := C<n> | D<n> (order 2n) | S<n> (n<=8) | A<n> (n<=8) | Q8
          | perm:(a b c)(d e), ...   (cycles on points 1..12)

Every constructor output passes the full validation suite (Latin square,
identity, inverses, associativity, element orders dividing n).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import BudgetExceededError
from .rng import SplitMix64

DEFAULT_ORDER_BUDGET = 2000

# Full associativity is cubic; above this order a fixed-seed random sample of
# at least 10**5 triples is checked instead.
FULL_ASSOC_LIMIT = 64
ASSOC_SAMPLE = 100_000
ASSOC_SAMPLE_SEED = 0x5EED0A550C


class GroupSpecError(ValueError):
    """Malformed or unsupported group spec text."""


@dataclass
class GroupTable:
    """A finite group: order, multiplication table, inverses, labels."""

    n: int
    mul: list[list[int]]
    inv: list[int]
    labels: list[str]
    name: str = ""
    _np_mul: np.ndarray | None = field(default=None, repr=False, compare=False)
    _np_inv: np.ndarray | None = field(default=None, repr=False, compare=False)

    def mul_array(self) -> np.ndarray:
        if self._np_mul is None:
            self._np_mul = np.asarray(self.mul, dtype=np.int64)
        return self._np_mul

    def inv_array(self) -> np.ndarray:
        if self._np_inv is None:
            self._np_inv = np.asarray(self.inv, dtype=np.int64)
        return self._np_inv


def validate_table(G: GroupTable) -> None:
    """Check all table invariants; raise ValueError on the first failure."""
    n = G.n
    if n < 1:
        raise ValueError("group order must be >= 1")
    if len(G.mul) != n or any(len(row) != n for row in G.mul):
        raise ValueError("mul table must be n x n")
    if len(G.inv) != n or len(G.labels) != n:
        raise ValueError("inv and labels must have length n")
    M = G.mul_array()
    if M.min() < 0 or M.max() >= n:
        raise ValueError("mul entries out of range")
    ids = np.arange(n)
    if not (np.sort(M, axis=1) == ids[None, :]).all():
        raise ValueError("mul table is not a Latin square (rows)")
    if not (np.sort(M, axis=0) == ids[:, None]).all():
        raise ValueError("mul table is not a Latin square (columns)")
    if not (M[0] == ids).all() or not (M[:, 0] == ids).all():
        raise ValueError("element 0 is not the identity")
    inv = G.inv_array()
    if not (M[ids, inv] == 0).all() or not (M[inv, ids] == 0).all():
        raise ValueError("inv table is wrong")
    if n <= FULL_ASSOC_LIMIT:
        if not np.array_equal(M[M], M[:, M]):
            raise ValueError("multiplication is not associative")
    else:
        rng = SplitMix64(ASSOC_SAMPLE_SEED)
        for _ in range(ASSOC_SAMPLE):
            a = rng.randbelow(n)
            b = rng.randbelow(n)
            c = rng.randbelow(n)
            if G.mul[G.mul[a][b]][c] != G.mul[a][G.mul[b][c]]:
                raise ValueError("multiplication is not associative")
    for g in range(n):
        if n % element_order(G, g) != 0:
            raise ValueError(f"order of element {g} does not divide {n}")


def _finish(n, mul, inv, labels, name) -> GroupTable:
    G = GroupTable(n=n, mul=mul, inv=inv, labels=labels, name=name)
    validate_table(G)
    return G


def _inverses(n, mul) -> list[int]:
    inv = [0] * n
    for a in range(n):
        for b in range(n):
            if mul[a][b] == 0:
                inv[a] = b
                break
    return inv


def _check_budget(order: int, budget: int, what: str) -> None:
    if order > budget:
        raise BudgetExceededError(
            f"{what} has order {order}, over the budget of {budget}"
        )


def cyclic(n: int, budget: int = DEFAULT_ORDER_BUDGET) -> GroupTable:
    if n < 1:
        raise GroupSpecError("cyclic group needs n >= 1")
    _check_budget(n, budget, f"C{n}")
    mul = [[(a + b) % n for b in range(n)] for a in range(n)]
    labels = ["e"] + [f"g{'' if k == 1 else '^' + str(k)}" for k in range(1, n)]
    return _finish(n, mul, _inverses(n, mul), labels, f"C{n}")


def dihedral(n: int, budget: int = DEFAULT_ORDER_BUDGET) -> GroupTable:
    """Dihedral group of order 2n: ids 0..n-1 are r^i, n..2n-1 are s r^i."""
    if n < 1:
        raise GroupSpecError("dihedral group needs n >= 1")
    _check_budget(2 * n, budget, f"D{n}")
    size = 2 * n
    mul = [[0] * size for _ in range(size)]
    for i in range(n):
        for j in range(n):
            mul[i][j] = (i + j) % n                  # r^i r^j
            mul[i][n + j] = n + (j - i) % n          # r^i (s r^j) = s r^(j-i)
            mul[n + i][j] = n + (i + j) % n          # (s r^i) r^j
            mul[n + i][n + j] = (j - i) % n          # (s r^i)(s r^j) = r^(j-i)
    labels = [f"r{i}" for i in range(n)] + [f"sr{i}" for i in range(n)]
    labels[0] = "e"
    return _finish(size, mul, _inverses(size, mul), labels, f"D{n}")


def quaternion(budget: int = DEFAULT_ORDER_BUDGET) -> GroupTable:
    """The quaternion group Q8 on {1,-1,i,-i,j,-j,k,-k}."""
    _check_budget(8, budget, "Q8")
    units = ["1", "i", "j", "k"]
    # unit products: table[u][v] = (sign, unit index)
    utab = {
        ("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"),
        ("1", "k"): (1, "k"), ("i", "1"): (1, "i"), ("j", "1"): (1, "j"),
        ("k", "1"): (1, "k"), ("i", "i"): (-1, "1"), ("j", "j"): (-1, "1"),
        ("k", "k"): (-1, "1"), ("i", "j"): (1, "k"), ("j", "k"): (1, "i"),
        ("k", "i"): (1, "j"), ("j", "i"): (-1, "k"), ("k", "j"): (-1, "i"),
        ("i", "k"): (-1, "j"),
    }
    elems = [(s, u) for u in units for s in (1, -1)]  # identity (+1,"1") first
    index = {e: i for i, e in enumerate(elems)}
    mul = [[0] * 8 for _ in range(8)]
    for a, (sa, ua) in enumerate(elems):
        for b, (sb, ub) in enumerate(elems):
            sp, up = utab[(ua, ub)]
            mul[a][b] = index[(sa * sb * sp, up)]
    labels = [("" if s == 1 else "-") + u for (s, u) in elems]
    return _finish(8, mul, _inverses(8, mul), labels, "Q8")


# -- permutation machinery (tuples p with p[i] = image of point i) -----------

def perm_compose(p: tuple, q: tuple) -> tuple:
    """Product p*q acting as 'apply q first, then p'."""
    return tuple(p[q[i]] for i in range(len(p)))


def _perm_label(p: tuple) -> str:
    seen = [False] * len(p)
    parts = []
    for i in range(len(p)):
        if seen[i] or p[i] == i:
            seen[i] = True
            continue
        cyc = [i]
        seen[i] = True
        j = p[i]
        while j != i:
            cyc.append(j)
            seen[j] = True
            j = p[j]
        parts.append("(" + " ".join(str(x + 1) for x in cyc) + ")")
    return "".join(parts) or "e"


def closure(
    generators: list[tuple],
    budget: int = DEFAULT_ORDER_BUDGET,
    name: str = "",
) -> GroupTable:
    """Breadth-first closure of permutation generators.

    Element 0 is the identity; ids follow BFS discovery order (each element in
    turn is right-multiplied by the generators in their given order), so the
    labelling is a pure function of the generator list.
    """
    degree = max((len(g) for g in generators), default=1)
    gens = [tuple(g) + tuple(range(len(g), degree)) for g in generators]
    ident = tuple(range(degree))
    elems = [ident]
    index = {ident: 0}
    pos = 0
    while pos < len(elems):
        e = elems[pos]
        pos += 1
        for g in gens:
            h = perm_compose(e, g)
            if h not in index:
                if len(elems) >= budget:
                    raise BudgetExceededError(
                        f"closure exceeded the order budget of {budget}"
                    )
                index[h] = len(elems)
                elems.append(h)
    n = len(elems)
    mul = [[index[perm_compose(a, b)] for b in elems] for a in elems]
    labels = [_perm_label(p) for p in elems]
    return _finish(n, mul, _inverses(n, mul), labels, name or "perm-closure")


def symmetric(n: int, budget: int = DEFAULT_ORDER_BUDGET) -> GroupTable:
    if not 1 <= n <= 8:
        raise GroupSpecError("S n supported for 1 <= n <= 8")
    if n == 1:
        return cyclic(1, budget)
    gens = [tuple([1, 0] + list(range(2, n)))]
    if n > 2:
        gens.append(tuple(list(range(1, n)) + [0]))
    G = closure(gens, budget, name=f"S{n}")
    return G


def alternating(n: int, budget: int = DEFAULT_ORDER_BUDGET) -> GroupTable:
    if not 1 <= n <= 8:
        raise GroupSpecError("A n supported for 1 <= n <= 8")
    if n <= 2:
        return cyclic(1, budget)
    gens = []
    for i in range(n - 2):
        p = list(range(n))
        p[i], p[i + 1], p[i + 2] = p[i + 1], p[i + 2], p[i]
        gens.append(tuple(p))
    return closure(gens, budget, name=f"A{n}")


def direct_product(A: GroupTable, B: GroupTable,
                   budget: int = DEFAULT_ORDER_BUDGET) -> GroupTable:
    """Componentwise product; id of (a, b) is a * B.n + b, so (0,0) = 0."""
    n = A.n * B.n
    _check_budget(n, budget, f"{A.name}x{B.name}")
    mul = [[0] * n for _ in range(n)]
    for a1 in range(A.n):
        for b1 in range(B.n):
            row = mul[a1 * B.n + b1]
            arow = A.mul[a1]
            brow = B.mul[b1]
            for a2 in range(A.n):
                ar = arow[a2] * B.n
                base = a2 * B.n
                for b2 in range(B.n):
                    row[base + b2] = ar + brow[b2]
    labels = [
        f"({la},{lb})" for la in A.labels for lb in B.labels
    ]
    name = f"{A.name}x{B.name}"
    return _finish(n, mul, _inverses(n, mul), labels, name)


_CYCLE_RE = re.compile(r"\(([^()]*)\)")
_CYCLES_FULL_RE = re.compile(r"(?:\s*\(\s*\d+(?:\s+\d+)*\s*\))+\s*")


def parse_cycles(text: str) -> tuple:
    """One generator in cycle notation, e.g. '(1 2 3)(4 5)', points 1..12."""
    if not _CYCLES_FULL_RE.fullmatch(text):
        raise GroupSpecError(f"bad cycle notation: {text!r}")
    cycles = []
    maxpt = 0
    for body in _CYCLE_RE.findall(text):
        pts = [int(t) for t in body.split()]
        if any(p < 1 or p > 12 for p in pts):
            raise GroupSpecError("permutation points must lie in 1..12")
        if len(set(pts)) != len(pts):
            raise GroupSpecError(f"repeated point inside a cycle: {text!r}")
        cycles.append(pts)
        maxpt = max(maxpt, max(pts))
    perm = list(range(maxpt))
    # cycles apply right to left, matching perm_compose
    for cyc in reversed(cycles):
        nxt = perm[:]
        for i, p in enumerate(cyc):
            q = cyc[(i + 1) % len(cyc)]
            nxt[p - 1] = perm[q - 1]
        perm = nxt
    return tuple(perm)


def _build_atom(atom: str, budget: int) -> GroupTable:
    atom = atom.strip()
    if atom.startswith("perm:"):
        gen_text = atom[len("perm:"):]
        gens = [parse_cycles(part) for part in gen_text.split(",")]
        return closure(gens, budget, name=atom)
    m = re.fullmatch(r"([CDSA])\s*(\d+)", atom)
    if atom == "Q8":
        return quaternion(budget)
    if not m:
        raise GroupSpecError(f"unrecognised group atom: {atom!r}")
    kind, num = m.group(1), int(m.group(2))
    if kind == "C":
        return cyclic(num, budget)
    if kind == "D":
        return dihedral(num, budget)
    if kind == "S":
        return symmetric(num, budget)
    return alternating(num, budget)


def build(spec: str, budget: int = DEFAULT_ORDER_BUDGET) -> GroupTable:
    """Build a group from spec text (see module docstring for the grammar)."""
    spec = spec.strip()
    if not spec:
        raise GroupSpecError("empty group spec")
    atoms = [a for a in spec.split("x")]
    if any(not a.strip() for a in atoms):
        raise GroupSpecError(f"empty atom in spec: {spec!r}")
    G = _build_atom(atoms[0], budget)
    for atom in atoms[1:]:
        G = direct_product(G, _build_atom(atom, budget), budget)
    G.name = "x".join(a.strip() for a in atoms)
    return G


# -- elementary queries -------------------------------------------------------

def element_order(G: GroupTable, g: int) -> int:
    k, acc = 1, g
    while acc != 0:
        acc = G.mul[acc][g]
        k += 1
    return k


def element_power(G: GroupTable, g: int, e: int) -> int:
    """g^e by square-and-multiply; negative exponents via the inverse."""
    if e < 0:
        return element_power(G, G.inv[g], -e)
    acc, base = 0, g
    while e:
        if e & 1:
            acc = G.mul[acc][base]
        base = G.mul[base][base]
        e >>= 1
    return acc


def power_table(G: GroupTable, e: int) -> list[int]:
    """The e-th power map as a table over all elements."""
    return [element_power(G, g, e) for g in range(G.n)]


def is_abelian(G: GroupTable) -> bool:
    M = G.mul_array()
    return bool((M == M.T).all())


def centralizer_size(G: GroupTable, g: int) -> int:
    row = G.mul_array()[:, g]
    col = G.mul_array()[g, :]
    return int((row == col).sum())


def commuting_probability(G: GroupTable) -> Fraction:
    """Exact proportion of commuting ordered pairs, |{(a,b): ab=ba}| / n^2."""
    M = G.mul_array()
    return Fraction(int((M == M.T).sum()), G.n * G.n)


def conjugacy_class_count(G: GroupTable) -> int:
    n = G.n
    seen = [False] * n
    count = 0
    for g in range(n):
        if seen[g]:
            continue
        count += 1
        for a in range(n):
            seen[G.mul[G.mul[a][g]][G.inv[a]]] = True
    return count
