"""Solution censuses for derived word equations, and the verifiers built on
them.

For a word w of arity <= d over a group G, the census counts triples
(s, t, u) in (G^d)^3 satisfying

    w(s^-1 t u) = w(s)^-1 w(t) w(u)      (componentwise products inside w),

either exactly (vectorized full iteration) or by seeded uniform sampling.
``verify_theorem`` glues everything together: it measures the best agreement
proportion rho* between w and a homomorphism, evaluates the exact rational
floor f(rho*) |G|^{3d}, and checks the census and the intermediate
pair/triple counts against it.
"""

from __future__ import annotations

import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _tables
from .bounds import BoundTriple, commuting_bound, f as bound_triple
from .errors import BudgetExceededError
from .freeword import Word, derived_word, reduce
from .group import GroupTable, commuting_probability, power_table
from .homset import Hom, agreement_set, best_agreement
from .rng import derive_seed, randbelow_block

DEFAULT_ITER_BUDGET = 1_000_000_000
DEFAULT_TABLE_BUDGET = _tables.DEFAULT_TABLE_BUDGET
MIN_SAMPLES = 1_000

# Fixed estimator chunk size.  The chunk layout (and hence every sampled
# result) depends only on (seed, samples), never on worker count.
CHUNK = 8192

# 95% two-sided normal quantile as an exact rational, 1.96 = 49/25.
Z95 = Fraction(49, 25)
_SQRT_DIGITS = 12


def _sqrt_fraction(q: Fraction) -> Fraction:
    """Deterministic rational sqrt to 12 decimal digits, via integer isqrt."""
    if q < 0:
        raise ValueError("sqrt of negative rational")
    scale = 10 ** (2 * _SQRT_DIGITS)
    return Fraction(
        math.isqrt(q.numerator * scale // q.denominator), 10 ** _SQRT_DIGITS
    )


@dataclass(frozen=True)
class WordMapTable:
    """Word map over G^d, flattened mixed-radix (last coordinate fastest)."""

    d: int
    n: int
    values: np.ndarray = field(compare=False)

    def __post_init__(self):
        if len(self.values) != self.n ** self.d:
            raise ValueError("table length must be n^d")


def word_map_table(
    w: Word, G: GroupTable, d: int | None = None,
    budget: int = DEFAULT_TABLE_BUDGET,
) -> WordMapTable:
    """Evaluate w over all of G^d (d defaults to the word's arity)."""
    if d is None:
        d = max(w.arity, 1)
    vals = _tables.word_values(w, G, d, budget)
    return WordMapTable(d=d, n=G.n, values=vals)


WMT_MAGIC = b"WMT1"


def dump_word_map_table(table: WordMapTable, path) -> None:
    """Binary dump: 8-byte header (magic, d, n as little-endian u16), then
    values as little-endian 32-bit ids in index order."""
    with open(path, "wb") as fh:
        fh.write(struct.pack("<4sHH", WMT_MAGIC, table.d, table.n))
        fh.write(np.ascontiguousarray(table.values, dtype="<i4").tobytes())


def load_word_map_table(path) -> WordMapTable:
    with open(path, "rb") as fh:
        magic, d, n = struct.unpack("<4sHH", fh.read(8))
        if magic != WMT_MAGIC:
            raise ValueError("not a word map table dump")
        vals = np.frombuffer(fh.read(), dtype="<i4").astype(np.int64)
    return WordMapTable(d=d, n=n, values=vals)


@dataclass(frozen=True)
class FiberStats:
    """Distribution of word-map values over G^d."""

    d: int
    n: int
    counts: tuple[int, ...]        # per target element id
    histogram: dict[int, int]      # fiber size -> number of target elements
    max_fiber: Fraction            # largest fiber / |G|^d

    @property
    def domain_size(self) -> int:
        return self.n ** self.d


def fiber_stats(
    w: Word, G: GroupTable, d: int | None = None,
    budget: int = DEFAULT_TABLE_BUDGET,
) -> FiberStats:
    t = word_map_table(w, G, d, budget)
    counts = np.bincount(t.values, minlength=G.n)
    hist: dict[int, int] = {}
    for c in counts.tolist():
        hist[c] = hist.get(c, 0) + 1
    return FiberStats(
        d=t.d,
        n=G.n,
        counts=tuple(int(c) for c in counts),
        histogram=hist,
        max_fiber=Fraction(int(counts.max()), G.n ** t.d),
    )


@dataclass(frozen=True)
class CensusResult:
    """Outcome of a solution census, exact or sampled."""

    mode: str                      # "exact" | "estimate"
    space_size: int                # |G|^{3d}
    count: int | None = None       # exact mode
    estimate_mean: Fraction | None = None
    ci_half_width: Fraction | None = None
    samples: int | None = None
    seed: int | None = None

    @property
    def proportion(self) -> Fraction:
        """Solution density: exact count / |G|^{3d}, or the sampled mean."""
        if self.mode == "exact":
            return Fraction(self.count, self.space_size)
        return self.estimate_mean


def _census_arrays(w: Word, G: GroupTable, d: int, budget: int):
    """Shared tables: word map over G^d plus coordinate columns."""
    wv = _tables.word_values(w, G, d, budget)
    cols = _tables.coordinate_columns(G.n, d)
    return wv, cols


def _chunk_ranges(total: int, step: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + step, total)) for lo in range(0, total, step)]


def _map_chunks(fn, chunks, workers: int):
    """Apply fn over chunks, sequentially or via threads; order preserved."""
    if workers <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, chunks))


def count_solutions_exact(
    w: Word, G: GroupTable, d: int | None = None,
    iter_budget: int = DEFAULT_ITER_BUDGET,
    table_budget: int = DEFAULT_TABLE_BUDGET,
    workers: int = 1,
) -> CensusResult:
    """Exact census of the triple equation over (G^d)^3.

    Iterates u over G^d with the (s, t) plane vectorized; the returned count
    is a plain integer sum over a fixed partition of the index space, so it
    cannot depend on chunking or worker count.
    """
    if d is None:
        d = max(w.arity, 1)
    n = G.n
    size = n ** d
    space = size ** 3
    if space > iter_budget:
        raise BudgetExceededError(
            f"exact census needs {space} iterations, budget {iter_budget}"
        )
    _tables.check_table_budget(size * size * (d + 1), table_budget)
    wv, cols = _census_arrays(w, G, d, table_budget)
    M = G.mul_array()
    inv = G.inv_array()
    rads = _tables.radices(n, d)

    # Per-coordinate planes of s^-1 t over (s, t); combining with each u costs
    # d gathers instead of one n^d x n^d product table.
    planes = [M[inv[c][:, None], c[None, :]] for c in cols]
    winv_w = M[inv[wv][:, None], wv[None, :]]  # w(s)^-1 w(t)

    def count_range(rng: tuple[int, int]) -> int:
        lo, hi = rng
        subtotal = 0
        for u in range(lo, hi):
            idx = np.zeros((size, size), dtype=np.int64)
            for i in range(d):
                idx += M[planes[i], cols[i][u]] * rads[i]
            lhs = wv[idx]
            rhs = M[winv_w, wv[u]]
            subtotal += int((lhs == rhs).sum())
        return subtotal

    chunks = _chunk_ranges(size, 64)
    return CensusResult(
        mode="exact",
        space_size=space,
        count=sum(_map_chunks(count_range, chunks, workers)),
    )


def estimate_solutions(
    w: Word, G: GroupTable, samples: int, seed: int,
    d: int | None = None,
    table_budget: int = DEFAULT_TABLE_BUDGET,
    workers: int = 1,
) -> CensusResult:
    """Sampled census: uniform i.i.d. triples from (G^d)^3.

    Sample j of chunk i uses draws 3dj..3dj+3d-1 of the SplitMix64 stream
    seeded with derive_seed(seed, i); chunks have the fixed size CHUNK.  The
    mean is the exact hit fraction; the half-width is the 95% normal
    approximation z * sqrt(p(1-p)/samples) with z = 49/25 and the square root
    taken by integer arithmetic, so identical (seed, samples) reproduce the
    result bit for bit on any platform.
    """
    if samples < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {samples}")
    if d is None:
        d = max(w.arity, 1)
    n = G.n
    size = n ** d
    wv, _ = _census_arrays(w, G, d, table_budget)
    M = G.mul_array()
    inv = G.inv_array()
    rads = np.asarray(_tables.radices(n, d), dtype=np.int64)

    def run_chunk(chunk: tuple[int, int]) -> int:
        i, m = chunk
        draws = randbelow_block(derive_seed(seed, i), n, m * 3 * d)
        coords = draws.reshape(m, 3 * d)
        s, t, u = coords[:, :d], coords[:, d:2 * d], coords[:, 2 * d:]
        idx = np.zeros(m, dtype=np.int64)
        s_idx = np.zeros(m, dtype=np.int64)
        t_idx = np.zeros(m, dtype=np.int64)
        u_idx = np.zeros(m, dtype=np.int64)
        for i_ in range(d):
            q = M[inv[s[:, i_]], t[:, i_]]
            idx += M[q, u[:, i_]] * rads[i_]
            s_idx += s[:, i_] * rads[i_]
            t_idx += t[:, i_] * rads[i_]
            u_idx += u[:, i_] * rads[i_]
        lhs = wv[idx]
        rhs = M[M[inv[wv[s_idx]], wv[t_idx]], wv[u_idx]]
        return int((lhs == rhs).sum())

    chunks = [
        (i, min(CHUNK, samples - i * CHUNK))
        for i in range((samples + CHUNK - 1) // CHUNK)
    ]
    hits = sum(_map_chunks(run_chunk, chunks, workers))
    mean = Fraction(hits, samples)
    hw = Z95 * _sqrt_fraction(mean * (1 - mean) / samples)
    return CensusResult(
        mode="estimate",
        space_size=size ** 3,
        estimate_mean=mean,
        ci_half_width=hw,
        samples=samples,
        seed=seed,
    )


# -- membership-set statistics over X = G^d ----------------------------------

def _as_flags(S, size: int) -> np.ndarray:
    flags = np.asarray(S, dtype=bool)
    if flags.shape != (size,):
        raise ValueError(f"membership flags must have length {size}")
    if not flags.any():
        raise ValueError("S must be nonempty")
    return flags


def _translate_tables(S, G: GroupTable, d: int, table_budget: int):
    """c(g) = |S ∩ gS| and p(g) = |S ∩ Sg^-1| for every g in G^d.

    p(g) also counts the ordered pairs (s, t) in S^2 with s^-1 t = g, which
    is what makes both the pair count and the triple count linear scans.
    """
    n = G.n
    size = n ** d
    flags = _as_flags(S, size)
    members = np.nonzero(flags)[0]
    m = len(members)
    _tables.check_table_budget(size * m * (d + 1), table_budget)
    M = G.mul_array()
    inv = G.inv_array()
    rads = _tables.radices(n, d)
    gcols = _tables.coordinate_columns(n, d)
    mcols = [c[members] for c in gcols]

    left = np.zeros((size, m), dtype=np.int64)   # g^-1 * member
    right = np.zeros((m, size), dtype=np.int64)  # member * g
    for i in range(d):
        left += M[inv[gcols[i]][:, None], mcols[i][None, :]] * rads[i]
        right += M[mcols[i][:, None], gcols[i][None, :]] * rads[i]
    # y in S ∩ gS  <=>  y in S and g^-1 y in S; sum over y in S.
    c = flags[left].sum(axis=1, dtype=np.int64)
    # y in S ∩ Sg^-1  <=>  y in S and y g in S.
    p = flags[right].sum(axis=0, dtype=np.int64)

    inv_index = np.zeros(size, dtype=np.int64)
    for i in range(d):
        inv_index += inv[gcols[i]] * rads[i]
    return c, p, inv_index


def translate_pair_count(
    S, G: GroupTable, d: int, threshold: Fraction,
    table_budget: int = DEFAULT_TABLE_BUDGET,
) -> int:
    """Ordered pairs (s, t) in S^2 whose translate overlap |sS ∩ tS| reaches
    threshold * |G|^d.  The overlap depends only on g = s^-1 t, and the pairs
    with a given quotient g number |S ∩ Sg^-1|."""
    thr = Fraction(threshold)
    size = G.n ** d
    c, p, _ = _translate_tables(S, G, d, table_budget)
    qualifying = c * thr.denominator >= thr.numerator * size
    return int(p[qualifying].sum())


def triple_count(
    S, G: GroupTable, d: int,
    iter_budget: int = DEFAULT_ITER_BUDGET,
    table_budget: int = DEFAULT_TABLE_BUDGET,
) -> int:
    """Ordered triples (s, t, u) in S^3 with s^-1 t u in S.

    For fixed (s, t) the valid u form S ∩ (t^-1 s) S, of size c((s^-1 t)^-1);
    grouping pairs by their quotient gives sum over g of p(g) c(g^-1).
    """
    flags = _as_flags(S, G.n ** d)
    m = int(flags.sum())
    if m * m > iter_budget:
        raise BudgetExceededError(
            f"triple count needs {m * m} pair iterations, budget {iter_budget}"
        )
    c, p, inv_index = _translate_tables(S, G, d, table_budget)
    return int((p * c[inv_index]).sum())


# -- verifiers ----------------------------------------------------------------

@dataclass(frozen=True)
class TheoremReport:
    """Everything verify_theorem measured, with individual pass flags."""

    group: str
    word: str
    d: int
    order: int
    s_size: int
    rho: Fraction
    bounds: BoundTriple
    required: Fraction             # f(rho) |G|^{3d}
    solutions: CensusResult
    pair_threshold: Fraction       # f2(rho) |G|^d
    required_pairs: Fraction       # f1(rho) |G|^{2d}
    qualifying_pairs: int | None
    triples: int | None
    required_triples: Fraction     # f1 f2 |G|^{3d}
    pass_solutions: bool
    pass_pairs: bool | None
    pass_triples: bool | None
    pass_chain: bool | None        # solutions >= triples (exact mode only)
    checks_run: tuple[str, ...]

    @property
    def passed(self) -> bool:
        flags = [self.pass_solutions, self.pass_pairs, self.pass_triples,
                 self.pass_chain]
        return all(f for f in flags if f is not None)


def verify_theorem(
    w: Word, G: GroupTable, d: int | None = None, *,
    samples: int | None = None, seed: int = 0,
    hom_budget: int = 10_000_000,
    iter_budget: int = DEFAULT_ITER_BUDGET,
    table_budget: int = DEFAULT_TABLE_BUDGET,
    workers: int = 1,
    hom: Hom | None = None,
) -> TheoremReport:
    """Measure rho*, evaluate the bound, and check the census against it.

    With ``samples=None`` the census is exact (a budget overrun is an error);
    otherwise the sampled mean is compared against the required density and
    the report's census mode says so.  ``hom`` skips the hom-set search and
    scores the given homomorphism instead.
    """
    if d is None:
        d = max(w.arity, 1)
    n = G.n
    size = n ** d
    space = size ** 3
    if hom is not None:
        if hom.d != d:
            raise ValueError(f"hom has d = {hom.d}, expected {d}")
        phi = hom
        flags = agreement_set(w, G, phi, table_budget)
        rho = Fraction(int(flags.sum()), size)
    else:
        rho, phi = best_agreement(w, G, d, hom_budget, table_budget)
        flags = agreement_set(w, G, phi, table_budget)
    s_size = int(flags.sum())
    bt = bound_triple(rho)
    required = bt.f * space
    checks = []

    if samples is None:
        census = count_solutions_exact(
            w, G, d, iter_budget, table_budget, workers
        )
        pass_solutions = Fraction(census.count) >= required
        checks.append("census-exact")
    else:
        census = estimate_solutions(
            w, G, samples, seed, d, table_budget, workers
        )
        pass_solutions = census.estimate_mean >= bt.f
        checks.append("census-estimate")

    pair_threshold = bt.f2 * size
    required_pairs = bt.f1 * size * size
    required_triples = bt.f1 * bt.f2 * space
    qual = triples = None
    pass_pairs = pass_triples = pass_chain = None
    if size * s_size * (d + 1) <= table_budget and \
            s_size * s_size <= iter_budget:
        qual = translate_pair_count(flags, G, d, bt.f2, table_budget)
        pass_pairs = Fraction(qual) >= required_pairs
        triples = triple_count(flags, G, d, iter_budget, table_budget)
        pass_triples = Fraction(triples) >= required_triples
        checks.append("pairs")
        checks.append("triples")
        if census.mode == "exact":
            pass_chain = census.count >= triples
            checks.append("chain")

    return TheoremReport(
        group=G.name or f"order-{n}",
        word=str(w),
        d=d,
        order=n,
        s_size=s_size,
        rho=rho,
        bounds=bt,
        required=required,
        solutions=census,
        pair_threshold=pair_threshold,
        required_pairs=required_pairs,
        qualifying_pairs=qual,
        triples=triples,
        required_triples=required_triples,
        pass_solutions=pass_solutions,
        pass_pairs=pass_pairs,
        pass_triples=pass_triples,
        pass_chain=pass_chain,
        checks_run=tuple(checks),
    )


def power_equation_count(
    e: int, G: GroupTable, iter_budget: int = DEFAULT_ITER_BUDGET
) -> int:
    """|{(x, y, z) in G^3 : (xyz)^e = x^e y^e z^e}|, by direct iteration."""
    n = G.n
    if n ** 3 > iter_budget:
        raise BudgetExceededError(
            f"power equation census needs {n ** 3} iterations, "
            f"budget {iter_budget}"
        )
    M = G.mul_array()
    pe = np.asarray(power_table(G, e), dtype=np.int64)
    pow_prod = M[pe[:, None], pe[None, :]]  # x^e y^e
    total = 0
    for z in range(n):
        lhs = pe[M[M, z]]
        rhs = M[pow_prod, pe[z]]
        total += int((lhs == rhs).sum())
    return total


def verify_mann_equivalence(
    e: int, G: GroupTable, iter_budget: int = DEFAULT_ITER_BUDGET
) -> bool:
    """Does the substitution x -> x^-1 identity hold on G?  Compares the
    direct count of (xyz)^e = x^e y^e z^e with the derived census of x1^e."""
    direct = power_equation_count(e, G, iter_budget)
    derived = count_solutions_exact(
        reduce([(1, e)]), G, 1, iter_budget
    ).count
    return direct == derived


@dataclass(frozen=True)
class CommutingReport:
    """Commuting-probability floor check for one group."""

    group: str
    rho: Fraction
    commuting_probability: Fraction
    bound: Fraction
    equation_samples: int
    equation_consistent: bool
    pass_bound: bool

    @property
    def passed(self) -> bool:
        return self.pass_bound and self.equation_consistent


def verify_commuting_corollary(
    G: GroupTable, *,
    equation_samples: int = 1000, seed: int = 0,
    hom_budget: int = 10_000_000,
    table_budget: int = DEFAULT_TABLE_BUDGET,
) -> CommutingReport:
    """Check cp(G) >= eps/(2 - eps) at eps = f(rho*) for w = x1 x2, and
    sample-check that the five-variable commutation identity

        s1 s2 s1^-1 = t1 t2 u1 t2^-1 s2 u1^-1 t1^-1

    holds exactly when (s1,s2,t1,t2,u1,u2) solves the derived equation of
    x1 x2 (the last coordinate cancels, so u2 is free)."""
    w = Word(((1, 1), (2, 1)))
    rho, _ = best_agreement(w, G, 2, hom_budget, table_budget)
    cp = commuting_probability(G)
    bound = commuting_bound(rho)
    v = derived_word(w)
    mul = G.mul
    inv = G.inv
    ok = True
    draws = randbelow_block(seed, G.n, equation_samples * 6)
    for j in range(equation_samples):
        s1, s2, t1, t2, u1, u2 = (int(x) for x in draws[6 * j:6 * j + 6])
        lhs = mul[mul[s1][s2]][inv[s1]]
        r = mul[t1][t2]
        r = mul[r][u1]
        r = mul[r][inv[t2]]
        r = mul[r][s2]
        r = mul[r][inv[u1]]
        rhs = mul[r][inv[t1]]
        eq1 = lhs == rhs
        solves = _tables.evaluate_word(v, G, (s1, s2, t1, t2, u1, u2)) == 0
        if eq1 != solves:
            ok = False
            break
    return CommutingReport(
        group=G.name or f"order-{G.n}",
        rho=rho,
        commuting_probability=cp,
        bound=bound,
        equation_samples=equation_samples,
        equation_consistent=ok,
        pass_bound=cp >= bound,
    )
