"""Set-family instances and the pairwise-overlap guarantee check.

An instance is a family of subsets M_1..M_I of a ground set X with
|M_i| >= rho |X| and I >= rho |X|.  The guarantee under test: at least
f1(rho) |X|^2 ordered index pairs (diagonal included) have
|M_i ∩ M_j| >= f2(rho) |X|.  ``verify_lemma`` measures the exact pair count;
``random_family`` and ``adversarial_families`` supply fuzz and boundary
instances.  Instances round-trip through a one-set-per-line text format.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bounds import check_rho, f1, f2, parse_rat, rat_str
from .rng import SplitMix64, derive_seed


class InfeasibleParametersError(ValueError):
    """Requested family parameters violate the hypotheses."""


def _ceil_frac(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


@dataclass(frozen=True)
class FamilyInstance:
    """A validated family: bool membership matrix of shape (I, |X|)."""

    x_size: int
    rho: Fraction
    sets: np.ndarray = field(compare=False)
    label: str = ""

    def __post_init__(self):
        rho = check_rho(self.rho)
        flags = np.asarray(self.sets, dtype=bool)
        if flags.ndim != 2 or flags.shape[1] != self.x_size:
            raise ValueError("sets must be a 2-d matrix with |X| columns")
        object.__setattr__(self, "sets", flags)
        min_size = rho * self.x_size
        if Fraction(flags.shape[0]) < min_size:
            raise InfeasibleParametersError(
                f"family has {flags.shape[0]} sets, needs >= {min_size}"
            )
        sizes = flags.sum(axis=1)
        small = np.nonzero(sizes * min_size.denominator
                           < min_size.numerator)[0]
        if small.size:
            raise InfeasibleParametersError(
                f"set {int(small[0])} has {int(sizes[small[0]])} members, "
                f"needs >= {min_size}"
            )

    @property
    def i_size(self) -> int:
        return int(self.sets.shape[0])


@dataclass(frozen=True)
class LemmaReport:
    """Exact pair census for one instance."""

    label: str
    x_size: int
    i_size: int
    rho: Fraction
    overlap_threshold: Fraction    # f2(rho) |X|
    qualifying_pairs: int
    required_pairs: Fraction       # f1(rho) |X|^2

    @property
    def passed(self) -> bool:
        return Fraction(self.qualifying_pairs) >= self.required_pairs


def verify_lemma(inst: FamilyInstance) -> LemmaReport:
    """Count ordered index pairs whose overlap reaches f2(rho) |X|."""
    rho = inst.rho
    thr = f2(rho) * inst.x_size
    m = inst.sets.astype(np.int64)
    overlap = m @ m.T
    qualifying = int(
        (overlap * thr.denominator >= thr.numerator).sum()
    )
    return LemmaReport(
        label=inst.label,
        x_size=inst.x_size,
        i_size=inst.i_size,
        rho=rho,
        overlap_threshold=thr,
        qualifying_pairs=qualifying,
        required_pairs=f1(rho) * inst.x_size ** 2,
    )


def random_family(
    x_size: int, i_size: int, rho, seed: int
) -> FamilyInstance:
    """Family of i_size uniform subsets of the minimum size ceil(rho |X|)."""
    r = check_rho(rho)
    if x_size < 1:
        raise InfeasibleParametersError("need |X| >= 1")
    if Fraction(i_size) < r * x_size:
        raise InfeasibleParametersError(
            f"i_size {i_size} below rho |X| = {r * x_size}"
        )
    set_size = _ceil_frac(r * x_size)
    rng = SplitMix64(seed)
    sets = np.zeros((i_size, x_size), dtype=bool)
    for i in range(i_size):
        sets[i, rng.sample(x_size, set_size)] = True
    return FamilyInstance(
        x_size=x_size, rho=r, sets=sets,
        label=f"random(x={x_size},i={i_size},rho={rat_str(r)},seed={seed})",
    )


# Fuzz grid: every instance draws rho and |X| from these, plus a random
# family size between the minimum and |X|.
FUZZ_RHOS = (Fraction(1), Fraction(1, 2), Fraction(1, 3),
             Fraction(1, 5), Fraction(1, 10))
FUZZ_X_SIZES = (10, 40, 100, 300)


def fuzz_instances(count: int, seed: int) -> list[FamilyInstance]:
    """Deterministic stream of random instances over the fuzz grid."""
    rng = SplitMix64(seed)
    out = []
    for k in range(count):
        rho = FUZZ_RHOS[rng.randbelow(len(FUZZ_RHOS))]
        x_size = FUZZ_X_SIZES[rng.randbelow(len(FUZZ_X_SIZES))]
        i_min = _ceil_frac(rho * x_size)
        i_size = i_min + rng.randbelow(x_size - i_min + 1)
        out.append(random_family(x_size, i_size, rho, derive_seed(seed, k)))
    return out


def _windows(x_size: int, starts: list[int], width: int) -> np.ndarray:
    sets = np.zeros((len(starts), x_size), dtype=bool)
    for row, s in enumerate(starts):
        for j in range(width):
            sets[row, (s + j) % x_size] = True
    return sets


def adversarial_families() -> list[FamilyInstance]:
    """Hand-built instances around the analysis' case boundary |X| =
    4 ceil(2/rho) / rho: tiny ground sets, the boundary itself, just above
    it, and families with minimal or zero off-diagonal overlap."""
    out = []

    # Tiny ground set, pairwise disjoint singletons.
    out.append(FamilyInstance(
        x_size=3, rho=Fraction(1, 3),
        sets=np.eye(3, dtype=bool), label="disjoint-singletons(x=3,rho=1/3)",
    ))

    # rho = 1/2 boundary: |X| = 4 * 4 * 2 = 32, sets of half size.
    out.append(FamilyInstance(
        x_size=32, rho=Fraction(1, 2),
        sets=_windows(32, list(range(16)), 16),
        label="boundary-windows(x=32,rho=1/2)",
    ))

    # Same boundary but only two distinct sets: the two halves, repeated.
    halves = np.zeros((16, 32), dtype=bool)
    halves[0::2, :16] = True
    halves[1::2, 16:] = True
    out.append(FamilyInstance(
        x_size=32, rho=Fraction(1, 2), sets=halves,
        label="boundary-two-halves(x=32,rho=1/2)",
    ))

    # Just above the boundary.
    out.append(FamilyInstance(
        x_size=33, rho=Fraction(1, 2),
        sets=_windows(33, list(range(17)), 17),
        label="above-boundary-windows(x=33,rho=1/2)",
    ))

    # Below the boundary (small-X regime) at rho = 1/2.
    out.append(FamilyInstance(
        x_size=8, rho=Fraction(1, 2),
        sets=_windows(8, [0, 2, 4, 6], 4),
        label="below-boundary-windows(x=8,rho=1/2)",
    ))

    # Partition family: X split into 1/rho blocks, each set one block.
    blocks = np.zeros((10, 50), dtype=bool)
    for i in range(10):
        b = i % 5
        blocks[i, 10 * b:10 * (b + 1)] = True
    out.append(FamilyInstance(
        x_size=50, rho=Fraction(1, 5), sets=blocks,
        label="partition-blocks(x=50,rho=1/5)",
    ))

    # Saturated family: every set is all of X at rho = 1.
    out.append(FamilyInstance(
        x_size=10, rho=Fraction(1),
        sets=np.ones((10, 10), dtype=bool), label="saturated(x=10,rho=1)",
    ))
    return out


def save_family(inst: FamilyInstance, path_or_file) -> None:
    """Text format: header 'X=<n> I=<m> rho=<num>/<den>', then one line of
    sorted 0-based member indices per set."""
    def write(fh):
        fh.write(f"X={inst.x_size} I={inst.i_size} rho={rat_str(inst.rho)}\n")
        for row in inst.sets:
            fh.write(" ".join(str(i) for i in np.nonzero(row)[0]) + "\n")

    if isinstance(path_or_file, io.TextIOBase):
        write(path_or_file)
    else:
        with open(path_or_file, "w") as fh:
            write(fh)


def load_family(path_or_file, label: str = "") -> FamilyInstance:
    def read(fh):
        header = fh.readline().split()
        try:
            fields = dict(part.split("=", 1) for part in header)
            x_size = int(fields["X"])
            i_size = int(fields["I"])
            rho = parse_rat(fields["rho"])
        except (KeyError, ValueError) as exc:
            raise ValueError(f"bad family header: {header}") from exc
        sets = np.zeros((i_size, x_size), dtype=bool)
        for i in range(i_size):
            line = fh.readline()
            if not line:
                raise ValueError(f"expected {i_size} set lines")
            for tok in line.split():
                member = int(tok)
                if not 0 <= member < x_size:
                    raise ValueError(f"member index {member} out of range")
                sets[i, member] = True
        return FamilyInstance(x_size=x_size, rho=rho, sets=sets, label=label)

    if isinstance(path_or_file, io.TextIOBase):
        return read(path_or_file)
    with open(path_or_file) as fh:
        return read(fh)
