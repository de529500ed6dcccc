"""Symmetric tensors, implicit Hankel tensors and homogeneous polynomials.

Tensor indices run over ``0..n-1``.  Index 0 plays the role of the
homogenizing variable ``x_0``; index ``k >= 1`` pairs with ``x_k``.  Dense
symmetric tensors store one value per sorted index tuple, in the order of
``itertools.combinations_with_replacement(range(n), m)``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .scalars import (
    EQ_TOL,
    EXACT,
    FLOAT,
    DomainError,
    LengthError,
    Scalar,
    mode_of,
    normalize,
    to_json_scalar,
)
from .sequence import GeneratingVector, MultidimensionalSequence


@dataclass(frozen=True)
class _Layout:
    indices: tuple          # sorted index tuples
    position: dict          # sorted tuple -> storage slot
    counts: np.ndarray      # (N, n) frequency of each index value
    multiplicity: tuple     # number of distinct permutations of each tuple (exact ints)


@lru_cache(maxsize=None)
def layout(n: int, m: int) -> _Layout:
    indices = tuple(itertools.combinations_with_replacement(range(n), m))
    counts = np.zeros((len(indices), n), dtype=np.int64)
    for row, idx in enumerate(indices):
        for i in idx:
            counts[row, i] += 1
    mult = tuple(_multinomial(m, counts[row]) for row in range(len(indices)))
    return _Layout(indices, {idx: k for k, idx in enumerate(indices)}, counts, mult)


def _multinomial(m: int, parts) -> int:
    out, left = 1, m
    for c in parts:
        c = int(c)
        out *= math.comb(left, c)
        left -= c
    return out


def multinomial_coefficient(m: int, j: Sequence[int]) -> int:
    """``m! / (j_1! ... j_{n-1}! (m - |j|)!)`` built from incremental binomials."""
    if any(x < 0 for x in j):
        raise DomainError(f"negative entry in {tuple(j)}")
    rest = m - sum(j)
    if rest < 0:
        raise DomainError(f"|j| = {sum(j)} exceeds m = {m}")
    return _multinomial(m, list(j) + [rest])


@dataclass(frozen=True)
class SymmetricTensor:
    """Order-``m`` dimension-``n`` symmetric tensor on sorted multi-indices."""

    m: int
    n: int
    values: tuple

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError(f"bad shape m={self.m}, n={self.n}")
        vals = normalize(self.values)
        expected = math.comb(self.n + self.m - 1, self.m)
        if len(vals) != expected:
            raise ValueError(f"expected {expected} stored entries, got {len(vals)}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, m: int, n: int, f) -> "SymmetricTensor":
        return cls(m, n, tuple(f(idx) for idx in layout(n, m).indices))

    @classmethod
    def zeros(cls, m: int, n: int, exact: bool = True) -> "SymmetricTensor":
        z = Fraction(0) if exact else 0.0
        return cls(m, n, (z,) * math.comb(n + m - 1, m))

    @property
    def mode(self) -> str:
        return mode_of(self.values)

    @property
    def indices(self) -> tuple:
        return layout(self.n, self.m).indices

    def __getitem__(self, idx) -> Scalar:
        return self.values[layout(self.n, self.m).position[tuple(sorted(idx))]]

    def items(self):
        return zip(self.indices, self.values)

    def sorted_values(self) -> tuple:
        return self.values

    def as_array(self) -> np.ndarray:
        return np.array([float(x) for x in self.values])

    def to_full(self) -> np.ndarray:
        """Materialize all ``n**m`` entries as a float array (small shapes only)."""
        out = np.empty((self.n,) * self.m)
        for idx in itertools.product(range(self.n), repeat=self.m):
            out[idx] = float(self[idx])
        return out

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "mode": "rational" if self.mode == EXACT else "float",
            "entries": [{"idx": list(i), "value": to_json_scalar(v)} for i, v in self.items()],
        }


@dataclass(frozen=True)
class HankelTensor:
    """Implicit Hankel tensor: ``a[i_1..i_m] = v[i_1 + ... + i_m]``.

    Only the generating vector is stored.  Entries past ``v_{m(n-1)}`` are
    never read, so longer vectors are accepted as they are.
    """

    m: int
    n: int
    generator: GeneratingVector

    def __post_init__(self):
        if self.m < 1 or self.n < 2:
            raise ValueError(f"bad shape m={self.m}, n={self.n}")
        need = self.m * (self.n - 1)
        if self.generator.L < need:
            raise LengthError(
                f"order {self.m} dimension {self.n} Hankel tensor needs v_0..v_{need}, "
                f"got v_0..v_{self.generator.L}"
            )

    @property
    def mode(self) -> str:
        return mode_of(self.generator.values[: self.top_degree + 1])

    @property
    def top_degree(self) -> int:
        return self.m * (self.n - 1)

    @property
    def indices(self) -> tuple:
        return layout(self.n, self.m).indices

    def __getitem__(self, idx) -> Scalar:
        if len(idx) != self.m or any(not 0 <= i < self.n for i in idx):
            raise IndexError(f"index {tuple(idx)} out of range")
        return self.generator[sum(idx)]

    def sorted_values(self) -> tuple:
        v = self.generator.values
        return tuple(v[sum(idx)] for idx in self.indices)

    def items(self):
        return zip(self.indices, self.sorted_values())


def hankel_tensor(v: GeneratingVector, n: int, m: int) -> HankelTensor:
    return HankelTensor(m=m, n=n, generator=v)


def densify(H: HankelTensor) -> SymmetricTensor:
    return SymmetricTensor(H.m, H.n, H.sorted_values())


def moment_tensor_from_sequence(S: MultidimensionalSequence, m: int) -> SymmetricTensor:
    """Entry at a sorted index tuple is ``b_j`` with ``j_k`` = frequency of ``k`` (k >= 1)."""
    lay = layout(S.n, m)
    return SymmetricTensor(m, S.n, tuple(S[tuple(row[1:])] for row in lay.counts.tolist()))


def is_hankel(A, tol: float = EQ_TOL) -> bool:
    """True iff entries agree on every class of equal index sum."""
    if isinstance(A, HankelTensor):
        return True
    seen = {}
    for idx, a in A.items():
        s = sum(idx)
        if s not in seen:
            seen[s] = a
            continue
        b = seen[s]
        if isinstance(a, Fraction) and isinstance(b, Fraction):
            if a != b:
                return False
        elif abs(float(a) - float(b)) > tol * max(1.0, abs(float(a)), abs(float(b))):
            return False
    return True


@dataclass(frozen=True)
class RankOneTerm:
    """Contribution ``w * u[i_1] * ... * u[i_m]``."""

    u: tuple
    w: Scalar = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "u", normalize(self.u))
        object.__setattr__(self, "w", normalize([self.w])[0])
        if self.w < 0:
            raise ValueError("rank-one weights must be nonnegative")


def moment_curve(t: Scalar, n: int) -> tuple:
    return tuple(t ** k for k in range(n))


def rank_one_sum(terms: Sequence[RankOneTerm], m: int, n: int) -> SymmetricTensor:
    """Entrywise ``sum_k w_k u_k[i_1] ... u_k[i_m]``."""
    for term in terms:
        if len(term.u) != n:
            raise ValueError(f"term vector {term.u} does not have length {n}")
    lay = layout(n, m)
    scalars = [x for term in terms for x in term.u + (term.w,)]
    if mode_of(scalars) == FLOAT:
        if not terms:
            return SymmetricTensor.zeros(m, n, exact=False)
        U = np.array([[float(x) for x in term.u] for term in terms])
        w = np.array([float(term.w) for term in terms])
        mono = _monomials(U, lay.counts)
        return SymmetricTensor(m, n, tuple((w @ mono).tolist()))
    vals = []
    for row in lay.counts.tolist():
        s = Fraction(0)
        for term in terms:
            p = term.w
            for ui, c in zip(term.u, row):
                if c:
                    p *= ui ** c
            s += p
        vals.append(s)
    return SymmetricTensor(m, n, tuple(vals))


def _monomials(U: np.ndarray, counts: np.ndarray) -> np.ndarray:
    """``mono[k, N] = prod_i U[k, i] ** counts[N, i]``."""
    return np.prod(U[:, None, :] ** counts[None, :, :], axis=2)


def power_contractions(values, n: int, m: int, U: np.ndarray):
    """Float contractions of the tensor with sorted entries ``values`` against each row of ``U``.

    Returns ``(A u^m, A u^{m-1})`` with shapes ``(r,)`` and ``(r, n)``.
    """
    lay = layout(n, m)
    coef = np.asarray(values, dtype=float) * np.asarray(lay.multiplicity, dtype=float)
    U = np.atleast_2d(np.asarray(U, dtype=float))
    C = lay.counts
    P = U[:, None, :] ** C[None, :, :]
    full = np.prod(P, axis=2) @ coef
    # d/du_i of the monomial: c_i u_i^(c_i - 1) times the other factors
    ones = np.ones(P.shape[:2] + (1,))
    before = np.cumprod(np.concatenate([ones, P[:, :, :-1]], axis=2), axis=2)
    after = np.cumprod(np.concatenate([ones, P[:, :, :0:-1]], axis=2), axis=2)[:, :, ::-1]
    own = C[None, :, :] * U[:, None, :] ** np.maximum(C - 1, 0)[None, :, :]
    grads = np.einsum("knj,n->kj", before * own * after, coef)
    return full, grads / m


def tensor_contract(A, x: Sequence, times: int):
    """Contract ``A`` with ``x`` along ``times`` modes.

    Returns a scalar when ``times == m`` and a SymmetricTensor of order
    ``m - times`` otherwise.  Works on dense and implicit Hankel tensors.
    """
    m, n = A.m, A.n
    if not 0 <= times <= m:
        raise ValueError(f"cannot contract an order-{m} tensor {times} times")
    if len(x) != n:
        raise ValueError(f"vector length {len(x)} != dimension {n}")
    if times == 0:
        return SymmetricTensor(m, n, A.sorted_values())
    vals = A.sorted_values()
    x = normalize(x)
    if mode_of(tuple(vals) + x) == FLOAT and times >= m - 1:
        vf = [float(a) for a in vals]
        full, grad = power_contractions(vf, n, m, np.array([float(t) for t in x]))
        if times == m:
            return float(full[0])
        return SymmetricTensor(1, n, tuple(grad[0].tolist()))

    lay = layout(n, m)
    zero = Fraction(0) if mode_of(tuple(vals) + x) == EXACT else 0.0
    if times == m:
        total = zero
        for row, mult, a in zip(lay.counts.tolist(), lay.multiplicity, vals):
            p = a * mult
            for xi, c in zip(x, row):
                if c:
                    p = p * xi ** c
            total = total + p
        return total
    rest = layout(n, m - times)
    inner = layout(n, times)
    out = []
    for J in rest.indices:
        s = zero
        for K, mult, row in zip(inner.indices, inner.multiplicity, inner.counts.tolist()):
            p = A[J + K] * mult
            for xi, c in zip(x, row):
                if c:
                    p = p * xi ** c
            s = s + p
        out.append(s)
    return SymmetricTensor(m - times, n, tuple(out))


def polynomial_eval(S: MultidimensionalSequence, m: int, x: Sequence, path: str = "direct") -> Scalar:
    """Evaluate the degree-``m`` form ``f(x)`` attached to ``S``.

    ``x = (x_0, x_1, ..., x_{n-1})`` with ``x_0`` homogenizing.  The
    ``"direct"`` path sums ``b_j * multinomial(m, j) * x^j * x_0^(m-|j|)``
    over ``|j| <= m``; the ``"tensor"`` path contracts the moment tensor
    ``m`` times against ``x``.
    """
    if len(x) != S.n:
        raise ValueError(f"x must have length n = {S.n}")
    x = normalize(x)
    if path == "tensor":
        return tensor_contract(moment_tensor_from_sequence(S, m), x, m)
    if path != "direct":
        raise ValueError(f"unknown path {path!r}")
    exact = mode_of(x) == EXACT and S.mode == EXACT
    total = Fraction(0) if exact else 0.0
    for j in itertools.product(range(m + 1), repeat=S.n - 1):
        d = sum(j)
        if d > m:
            continue
        b = S[j]
        if not exact:
            b = float(b)
        term = b * multinomial_coefficient(m, j) * x[0] ** (m - d)
        for xk, jk in zip(x[1:], j):
            term = term * xk ** jk
        total = total + term
    return total
