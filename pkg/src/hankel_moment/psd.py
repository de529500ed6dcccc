"""Hankel matrices ``H_p = (v_{i+j})`` and positive semidefiniteness certificates.

Exact mode scales the matrix to integers and runs a symmetric, fraction-free
(Bareiss) elimination with diagonal pivoting.  Every pivot of the implied
LDL^T factorization is a ratio of two consecutive Bareiss diagonals, so its
sign is read off without rational growth.  A negative pivot, or a zero
diagonal next to a nonzero off-diagonal in the remaining block, yields an
explicit vector ``x`` with ``x^T H x < 0``.

Float mode uses a symmetric eigensolve.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .scalars import EXACT, FLOAT, LengthError, Scalar, as_mode, to_json_scalar
from .sequence import GeneratingVector

DEFAULT_TOL = 1e-10


class Verdict(str, enum.Enum):
    PSD = "PSD"
    NOT_PSD = "NOT_PSD"
    INDETERMINATE = "INDETERMINATE"


@dataclass(frozen=True)
class HankelMatrix:
    """``p x p`` matrix with ``h[i][j] = v[i + j]``."""

    p: int
    source: GeneratingVector

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("p must be >= 1")
        if self.source.L < 2 * self.p - 2:
            raise LengthError(
                f"H_{self.p} needs v_0..v_{2 * self.p - 2}, got v_0..v_{self.source.L}"
            )

    def rows(self, mode: Optional[str] = None) -> list:
        v = self.source.values[: 2 * self.p - 1]
        if mode is not None:
            v = as_mode(v, mode)
        return [[v[i + j] for j in range(self.p)] for i in range(self.p)]

    def as_array(self) -> np.ndarray:
        return np.array(self.rows(FLOAT), dtype=float)

    def quadratic_form(self, x) -> Scalar:
        """``x^T H x``, exact when ``x`` and ``H`` are rational."""
        v = self.source.values
        return sum(x[i] * v[i + j] * x[j] for i in range(self.p) for j in range(self.p))


def hankel_matrix(v: GeneratingVector, p: int) -> HankelMatrix:
    return HankelMatrix(p, v)


@dataclass(frozen=True)
class PsdReport:
    verdict: Verdict
    p: int
    rank: int
    mode: str
    pivots: tuple = ()                  # exact: LDL^T pivots in elimination order
    order: tuple = ()                   # exact: pivot row order
    witness: Optional[tuple] = None     # x with x^T H x < 0
    witness_value: Optional[Scalar] = None
    lambda_min: Optional[float] = None
    lambda_max: Optional[float] = None
    tolerance: Optional[float] = None

    @property
    def is_psd(self) -> bool:
        return self.verdict is Verdict.PSD

    def to_json(self) -> dict:
        doc = {"verdict": self.verdict.value, "p": self.p, "rank": self.rank, "mode": self.mode}
        if self.witness is not None:
            doc["witness"] = [to_json_scalar(x) for x in self.witness]
            doc["witness_value"] = to_json_scalar(self.witness_value)
        if self.mode == EXACT:
            doc["pivots"] = [to_json_scalar(d) for d in self.pivots]
            doc["pivot_order"] = list(self.order)
        else:
            doc["tolerance"] = self.tolerance
            doc["lambda_min"] = self.lambda_min
            doc["lambda_max"] = self.lambda_max
        return doc


def _integer_rows(rows):
    den = 1
    for row in rows:
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
    return [[int(x * den) for x in row] for row in rows], den


def _solve(A, b):
    """Exact Gaussian elimination for a small nonsingular rational system."""
    k = len(A)
    M = [list(A[i]) + [b[i]] for i in range(k)]
    for c in range(k):
        piv = next(r for r in range(c, k) if M[r][c] != 0)
        M[c], M[piv] = M[piv], M[c]
        for r in range(k):
            if r != c and M[r][c] != 0:
                f = M[r][c] / M[c][c]
                M[r] = [a - f * bb for a, bb in zip(M[r], M[c])]
    return [M[i][k] / M[i][i] for i in range(k)]


def _exact_witness(H, order, y_rest):
    """Lift ``y`` on the Schur complement to ``x`` with ``x^T H x = y^T S y``.

    ``order[:k]`` are the eliminated (positive definite) rows, ``y_rest`` maps
    the remaining rows to coefficients.
    """
    k = len(order) - len(y_rest)
    elim, rest = list(order[:k]), list(order[k:])
    x = [Fraction(0)] * len(H)
    for r, y in zip(rest, y_rest):
        x[r] = Fraction(y)
    if k:
        A = [[H[i][j] for j in elim] for i in elim]
        b = [-sum(H[i][r] * x[r] for r in rest) for i in elim]
        for i, z in zip(elim, _solve(A, b)):
            x[i] = z
    den = 1
    for z in x:
        den = den * z.denominator // math.gcd(den, z.denominator)
    ints = [int(z * den) for z in x]
    g = 0
    for z in ints:
        g = math.gcd(g, z)
    return tuple(Fraction(z // g) for z in ints)


def _psd_exact(H: HankelMatrix) -> PsdReport:
    rows = H.rows(EXACT)
    p = H.p
    A, den = _integer_rows(rows)
    order = list(range(p))
    pivots = []
    prev = 1  # previous Bareiss pivot (a positive integer)
    k = 0
    while k < p:
        # diagonal pivoting: largest remaining diagonal
        best = max(range(k, p), key=lambda i: A[order[i]][order[i]])
        dmax = A[order[best]][order[best]]
        if dmax <= 0:
            break
        order[k], order[best] = order[best], order[k]
        piv = order[k]
        for i in order[k + 1:]:
            for j in order[k + 1:]:
                A[i][j] = (dmax * A[i][j] - A[i][piv] * A[piv][j]) // prev
        pivots.append(Fraction(dmax, prev * den))
        prev = dmax
        k += 1

    rest = order[k:]
    # remaining Schur complement is A[rest][rest] / prev (prev > 0)
    neg = [i for i, r in enumerate(rest) if A[r][r] < 0]
    if neg:
        i = min(neg, key=lambda i: A[rest[i]][rest[i]])
        y = [0] * len(rest)
        y[i] = 1
        return _not_psd(H, rows, order, y, pivots, k)
    for a in range(len(rest)):
        for b in range(a + 1, len(rest)):
            s = A[rest[a]][rest[b]]
            if s != 0:
                # zero diagonals with a nonzero coupling: indefinite 2x2 block
                y = [0] * len(rest)
                y[a], y[b] = 1, -1 if s > 0 else 1
                return _not_psd(H, rows, order, y, pivots, k)
    return PsdReport(Verdict.PSD, p, k, EXACT, pivots=tuple(pivots), order=tuple(order))


def _not_psd(H, rows, order, y, pivots, k):
    x = _exact_witness(rows, order, y)
    val = H.quadratic_form(x) if H.source.mode == EXACT else sum(
        x[i] * rows[i][j] * x[j] for i in range(H.p) for j in range(H.p)
    )
    assert val < 0, "witness failed to re-verify"
    return PsdReport(
        Verdict.NOT_PSD, H.p, k, EXACT, pivots=tuple(pivots), order=tuple(order),
        witness=x, witness_value=val,
    )


def _psd_float(H: HankelMatrix, tol: float) -> PsdReport:
    M = H.as_array()
    lam, vec = np.linalg.eigh(M)
    lmin, lmax = float(lam[0]), float(lam[-1])
    scale = max(1.0, lmax)
    # below this, a negative eigenvalue is eigensolver backward error
    floor = 8 * H.p * np.finfo(float).eps * max(scale, float(np.abs(lam).max()))
    rank = int(np.sum(np.abs(lam) > max(floor, tol * scale)))
    common = dict(lambda_min=lmin, lambda_max=lmax, tolerance=tol)
    if lmin < -tol * scale:
        x = tuple(float(t) for t in vec[:, 0])
        return PsdReport(Verdict.NOT_PSD, H.p, rank, FLOAT, witness=x,
                         witness_value=float(x @ M @ np.array(x)), **common)
    if lmin < -floor:
        return PsdReport(Verdict.INDETERMINATE, H.p, rank, FLOAT, **common)
    return PsdReport(Verdict.PSD, H.p, rank, FLOAT, **common)


def psd_check(H: HankelMatrix, mode: str = EXACT, tol: float = DEFAULT_TOL) -> PsdReport:
    """Decide whether ``H`` is positive semidefinite.

    Exact mode is a certificate on rational data (floats are converted
    exactly).  Float mode returns PSD when ``lambda_min`` is nonnegative up to
    eigensolver noise, NOT_PSD when ``lambda_min < -tol * max(1, lambda_max)``
    and INDETERMINATE in between.
    """
    if mode == EXACT:
        return _psd_exact(H)
    if mode == FLOAT:
        return _psd_float(H, tol)
    raise ValueError(f"unknown mode {mode!r}")


def leading_principal_minors(H: HankelMatrix) -> tuple:
    """Exact determinants of the leading ``k x k`` blocks, ``k = 1..p``."""
    rows = H.rows(EXACT)
    out = []
    for k in range(1, H.p + 1):
        M = [row[:k] for row in rows[:k]]
        det = Fraction(1)
        for c in range(k):
            piv = next((r for r in range(c, k) if M[r][c] != 0), None)
            if piv is None:
                det = Fraction(0)
                break
            if piv != c:
                M[c], M[piv] = M[piv], M[c]
                det = -det
            det *= M[c][c]
            for r in range(c + 1, k):
                f = M[r][c] / M[c][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
        out.append(det)
    return tuple(out)


@dataclass(frozen=True)
class StrongHankelCertificate:
    """PSD report of the largest Hankel matrix a generating vector supports.

    Smaller ``H_q`` are principal submatrices of ``H_p``, so only ``H_p`` is
    factored.
    """

    m: int
    n: int
    p: int
    report: PsdReport
    checked_p: tuple = field(default=())

    @property
    def valid(self) -> bool:
        return self.report.is_psd

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "valid": self.valid,
            "checked_p": list(self.checked_p),
            "reason": "H_q for q < p are leading principal submatrices of H_p",
            "certificate": self.report.to_json(),
        }


def strong_hankel_check(v: GeneratingVector, n: int, m: int, mode: str = EXACT,
                        tol: float = DEFAULT_TOL) -> StrongHankelCertificate:
    """Check that the Hankel tensor generated by ``v`` is strong (its Hankel matrix is PSD)."""
    need = m * (n - 1)
    if v.L < need:
        raise LengthError(f"order {m} dimension {n} needs v_0..v_{need}, got v_0..v_{v.L}")
    p = v.L // 2 + 1
    report = psd_check(hankel_matrix(v, p), mode, tol)
    return StrongHankelCertificate(m, n, p, report, (p,))


@dataclass(frozen=True)
class MomentCheckReport:
    p: int
    report: PsdReport

    @property
    def depth(self) -> int:
        return 2 * self.p - 2

    @property
    def consistent(self) -> bool:
        return self.report.is_psd

    def to_json(self) -> dict:
        doc = {
            "p_max": self.p,
            "consistent": self.consistent,
            "certificate": self.report.to_json(),
        }
        if self.consistent:
            doc["claim"] = f"consistent with a moment sequence up to degree {self.depth}"
        return doc


def moment_sequence_check(v: GeneratingVector, P_max: Optional[int] = None, mode: str = EXACT,
                          tol: float = DEFAULT_TOL) -> MomentCheckReport:
    """Truncated moment-sequence test on ``H_{P_max}`` (default: all available data)."""
    if P_max is None:
        P_max = v.L // 2 + 1
    if v.L < 2 * P_max - 2:
        raise LengthError(f"P_max = {P_max} needs v_0..v_{2 * P_max - 2}, got v_0..v_{v.L}")
    return MomentCheckReport(P_max, psd_check(hankel_matrix(v, P_max), mode, tol))
