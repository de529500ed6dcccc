"""Multidimensional sequences, the Hankel condition and atomic measures.

A multidimensional sequence ``b_j`` is indexed by multi-indices
``j = (j_1, ..., j_{n-1})``.  It is *Hankel* when ``b_j`` depends only on the
weighted degree ``j_1 + 2 j_2 + ... + (n-1) j_{n-1}``; such a sequence collapses
to a one-dimensional generating vector ``v`` with ``b_j = v_{wdeg(j)}``.

Atomic measures on the line are carried to R^{n-1} along the moment curve
``t -> (t, t^2, ..., t^{n-1})``; the mixed moments of the pushed-forward
measure form a Hankel multidimensional sequence.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from .scalars import (
    EXACT,
    CoverageError,
    InconsistencyError,
    Scalar,
    mode_of,
    normalize,
    scalars_equal,
    to_json_scalar,
    to_scalar,
)

# nodes closer than this times (1 + max|t|) are merged
ATOM_SEPARATION = 1e-8


def check_multi_index(j: Sequence[int], n: int) -> tuple:
    j = tuple(int(x) for x in j)
    if n < 2:
        raise ValueError(f"dimension n must be >= 2, got {n}")
    if len(j) != n - 1:
        raise ValueError(f"multi-index {j} must have length n-1 = {n - 1}")
    if any(x < 0 for x in j):
        raise ValueError(f"multi-index {j} has negative entries")
    return j


def weighted_degree(j: Sequence[int]) -> int:
    """Return ``sum_k k * j_k`` (entries are 1-based in ``k``)."""
    return sum((k + 1) * jk for k, jk in enumerate(j))


def multi_indices(n: int, max_total_degree: int) -> Iterator[tuple]:
    """All multi-indices of length ``n-1`` with ``|j| <= max_total_degree``."""
    for j in itertools.product(range(max_total_degree + 1), repeat=n - 1):
        if sum(j) <= max_total_degree:
            yield j


@dataclass(frozen=True)
class GeneratingVector:
    """Finite truncation ``v_0, ..., v_L`` of a one-dimensional sequence."""

    values: tuple

    def __post_init__(self):
        vals = normalize(self.values)
        if not vals:
            raise ValueError("a generating vector needs at least one entry")
        object.__setattr__(self, "values", vals)

    @property
    def L(self) -> int:
        return len(self.values) - 1

    @property
    def mode(self) -> str:
        return mode_of(self.values)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, k):
        return self.values[k]

    def __iter__(self):
        return iter(self.values)

    def prefix(self, L: int) -> "GeneratingVector":
        return GeneratingVector(self.values[: L + 1])

    def to_json(self) -> list:
        return [to_json_scalar(x) for x in self.values]


@dataclass(frozen=True)
class MultidimensionalSequence:
    """A sequence ``b_j`` backed by an explicit table or by a Hankel rule.

    Tables declare the total degree ``max_degree`` they cover; every
    multi-index with ``|j| <= max_degree`` must be present.  Rule-backed
    sequences read ``b_j = v_{wdeg(j)}`` from a generating vector.
    """

    n: int
    table: Optional[Mapping[tuple, Scalar]] = None
    max_degree: Optional[int] = None
    generator: Optional[GeneratingVector] = None

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"dimension n must be >= 2, got {self.n}")
        if (self.table is None) == (self.generator is None):
            raise ValueError("give exactly one of table or generator")
        if self.table is not None:
            if self.max_degree is None or self.max_degree < 0:
                raise ValueError("explicit tables must declare max_degree >= 0")
            keys = [check_multi_index(j, self.n) for j in self.table]
            vals = normalize(self.table.values())
            object.__setattr__(self, "table", dict(zip(keys, vals)))
            missing = [j for j in multi_indices(self.n, self.max_degree) if j not in self.table]
            if missing:
                raise CoverageError(
                    f"table declares max_degree {self.max_degree} but lacks {missing[0]}"
                )

    @classmethod
    def from_table(cls, n: int, entries: Mapping, max_degree: int) -> "MultidimensionalSequence":
        return cls(n=n, table=entries, max_degree=max_degree)

    @property
    def kind(self) -> str:
        return "hankel-rule" if self.generator is not None else "table"

    @property
    def mode(self) -> str:
        vals = self.generator.values if self.generator is not None else self.table.values()
        return mode_of(vals)

    def covers(self, j: tuple) -> bool:
        if self.generator is not None:
            return weighted_degree(j) <= self.generator.L
        return j in self.table

    def __getitem__(self, j) -> Scalar:
        j = check_multi_index(j, self.n)
        if self.generator is not None:
            k = weighted_degree(j)
            if k > self.generator.L:
                raise CoverageError(
                    f"b_{j} needs v_{k} but the generating vector stops at v_{self.generator.L}"
                )
            return self.generator[k]
        try:
            return self.table[j]
        except KeyError:
            raise CoverageError(f"b_{j} is outside the table (max_degree {self.max_degree})") from None

    def to_json(self) -> dict:
        doc = {"n": self.n, "kind": self.kind}
        if self.generator is not None:
            doc["max_degree"] = self.generator.L
            doc["generating_vector"] = self.generator.to_json()
        else:
            doc["max_degree"] = self.max_degree
            doc["entries"] = [
                {"j": list(j), "value": to_json_scalar(self.table[j])}
                for j in sorted(self.table, key=lambda j: (sum(j), j))
            ]
        return doc


def _class_order(j: tuple):
    # within one weighted-degree class, indices heavy in j_1 come first
    return (weighted_degree(j), tuple(-x for x in j))


def is_hankel_sequence(S: MultidimensionalSequence, max_total_degree: int):
    """Check ``b_j == b_l`` whenever ``wdeg(j) == wdeg(l)`` for ``|j|, |l| <= max_total_degree``.

    Returns ``(ok, pair)`` where ``pair`` is the first violating pair of
    multi-indices (``None`` when ``ok``).  Rule-backed sequences are Hankel by
    construction and are not enumerated.
    """
    if S.generator is not None:
        return True, None
    if max_total_degree > S.max_degree:
        raise CoverageError(
            f"requested degree {max_total_degree} exceeds table coverage {S.max_degree}"
        )
    first = {}
    for j in sorted(multi_indices(S.n, max_total_degree), key=_class_order):
        k = weighted_degree(j)
        if k not in first:
            first[k] = j
        elif not scalars_equal(S[first[k]], S[j]):
            return False, (first[k], j)
    return True, None


def generating_vector_from_sequence(S: MultidimensionalSequence, L: int) -> GeneratingVector:
    """Read ``v_0..v_L`` off a Hankel sequence, re-checking every covered representative."""
    if S.generator is not None:
        if L > S.generator.L:
            raise CoverageError(f"v_{L} requested but the rule stops at v_{S.generator.L}")
        return S.generator.prefix(L)
    reps = {}
    for j in sorted(S.table, key=_class_order):
        k = weighted_degree(j)
        if k > L:
            continue
        if k not in reps:
            reps[k] = j
        elif not scalars_equal(S[reps[k]], S[j]):
            raise InconsistencyError(
                f"b_{reps[k]} = {S[reps[k]]} but b_{j} = {S[j]} share weighted degree {k}"
            )
    missing = [k for k in range(L + 1) if k not in reps]
    if missing:
        raise CoverageError(f"no table entry has weighted degree {missing[0]}")
    return GeneratingVector([S[reps[k]] for k in range(L + 1)])


def sequence_from_generating_vector(v: GeneratingVector, n: int) -> MultidimensionalSequence:
    return MultidimensionalSequence(n=n, generator=v)


@dataclass(frozen=True)
class AtomicMeasure:
    """Finitely supported nonnegative measure on the real line.

    Zero-weight atoms are dropped and nodes closer than
    ``ATOM_SEPARATION * (1 + max|t|)`` are merged (weights add, node becomes
    the weighted mean).  Atoms are kept sorted by node.
    """

    atoms: tuple = field(default=())

    def __post_init__(self):
        pairs = []
        for t, w in self.atoms:
            t, w = to_scalar(t), to_scalar(w)
            if w < 0:
                raise ValueError(f"negative weight {w} at node {t}")
            if w > 0:
                pairs.append((t, w))
        flat = normalize([x for p in pairs for x in p])
        pairs = sorted(zip(flat[0::2], flat[1::2]), key=lambda p: p[0])
        if pairs:
            sep = ATOM_SEPARATION * (1 + max(abs(float(t)) for t, _ in pairs))
            merged = [list(pairs[0])]
            for t, w in pairs[1:]:
                t0, w0 = merged[-1]
                if abs(float(t) - float(t0)) < sep:
                    merged[-1] = [(t0 * w0 + t * w) / (w0 + w), w0 + w]
                else:
                    merged.append([t, w])
            pairs = [tuple(p) for p in merged]
        object.__setattr__(self, "atoms", tuple(pairs))

    @property
    def nodes(self) -> tuple:
        return tuple(t for t, _ in self.atoms)

    @property
    def weights(self) -> tuple:
        return tuple(w for _, w in self.atoms)

    def __len__(self):
        return len(self.atoms)

    def to_json(self) -> list:
        return [{"t": to_json_scalar(t), "w": to_json_scalar(w)} for t, w in self.atoms]


def pushforward_atoms(mu: AtomicMeasure, n: int) -> list:
    """Map each atom ``(t, w)`` to ``((t, t^2, ..., t^{n-1}), w)``."""
    if n < 2:
        raise ValueError(f"dimension n must be >= 2, got {n}")
    return [(tuple(t ** k for k in range(1, n)), w) for t, w in mu.atoms]


def multidim_moment(atoms: Iterable, j: Sequence[int]) -> Scalar:
    """Mixed moment ``sum_atoms w * prod_k p_k^{j_k}`` of a discrete measure on R^{n-1}."""
    total = 0
    for point, w in atoms:
        term = w
        for p, jk in zip(point, j):
            term = term * p ** jk
        total = total + term
    return total


def moments_of_measure(mu: AtomicMeasure, K: int) -> GeneratingVector:
    """Power moments ``v_k = sum w t^k`` for ``k = 0..K``."""
    if K < 0:
        raise ValueError("K must be >= 0")
    zero = Fraction(0) if mode_of(mu.nodes + mu.weights) == EXACT else 0.0
    out = []
    for k in range(K + 1):
        s = zero
        for t, w in mu.atoms:
            s = s + w * t ** k
        out.append(s)
    return GeneratingVector(out)
