"""Sum-of-powers decompositions of strong Hankel tensors.

A Hankel tensor of order ``m`` and dimension ``n`` generated by ``v`` reads
``v_0, ..., v_D`` with ``D = m(n-1)``.  When its Hankel matrix is PSD, a Gauss
rule built from the moments below ``v_D`` gives atoms ``(t_k, w_k)`` and

    A = sum_k w_k u(t_k)^m + c e^m,    u(t) = (1, t, ..., t^{n-1}),  e = (0, ..., 0, 1),

where the augmented coefficient ``c = v_D - sum_k w_k t_k^D`` absorbs whatever
part of the top moment the atoms cannot carry.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .psd import DEFAULT_TOL, Verdict, hankel_matrix, psd_check, strong_hankel_check
from .scalars import (
    EXACT,
    FLOAT,
    LengthError,
    NumericalFailure,
    PreconditionError,
    as_mode,
)
from .sequence import AtomicMeasure, GeneratingVector, moments_of_measure
from .tensor import HankelTensor, RankOneTerm, SymmetricTensor, moment_curve, rank_one_sum

__all__ = [
    "JacobiMatrix",
    "VandermondeDecomposition",
    "ResidualReport",
    "jacobi_from_moments",
    "gauss_quadrature",
    "strong_hankel_decompose",
    "verify_decomposition",
    "moments_of_measure",
]

# a float pivot below this fraction of the first pivot is treated as zero
DEFLATION_TOL = 1e-12
SWEEPS_PER_NODE = 200


@dataclass(frozen=True)
class JacobiMatrix:
    """Symmetric tridiagonal recurrence matrix of the orthonormal polynomials."""

    diagonal: tuple
    offdiagonal: tuple
    mass: float

    def __post_init__(self):
        if len(self.offdiagonal) != max(len(self.diagonal) - 1, 0):
            raise ValueError("off-diagonal must be one shorter than the diagonal")
        if any(b <= 0 for b in self.offdiagonal):
            raise ValueError("off-diagonal entries must be positive")

    @property
    def size(self) -> int:
        return len(self.diagonal)

    def as_array(self) -> np.ndarray:
        return (np.diag(self.diagonal) + np.diag(self.offdiagonal, 1)
                + np.diag(self.offdiagonal, -1))


def jacobi_from_moments(v: GeneratingVector, q: int, mode: str = FLOAT,
                        deflation_tol: float = DEFLATION_TOL) -> JacobiMatrix:
    """Recurrence coefficients of the measure with moments ``v`` (Golub-Welsch).

    Runs an unpivoted LDL^T of ``H_q`` bordered by the column ``v_q..v_{2q-1}``.
    With ``l`` the unit lower factor and ``d`` the pivots,

        a_j = l[j+1][j] - l[j][j-1],   b_j^2 = d_j / d_{j-1}.

    The factorization stops at the first zero pivot (exact) or at the first
    pivot below ``deflation_tol * d_0`` (float), giving a rank-``r`` recurrence.
    In exact mode ``a_j`` and ``b_j^2`` are rational; only the final square
    roots are taken in floating point.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    if v.L < 2 * q - 2:
        raise LengthError(f"q = {q} needs v_0..v_{2 * q - 2}, got v_0..v_{v.L}")
    report = psd_check(hankel_matrix(v, q), mode)
    if report.verdict is Verdict.NOT_PSD:
        raise PreconditionError(f"H_{q} is not positive semidefinite")

    vals = as_mode(v.values[: 2 * q], mode)
    border = v.L >= 2 * q - 1
    rows = q + 1 if border else q
    h = lambda i, j: vals[i + j]
    L = [[None] * q for _ in range(rows)]
    d = []
    for k in range(q):
        dk = h(k, k) - sum(L[k][s] ** 2 * d[s] for s in range(k))
        if mode == EXACT:
            zero = dk == 0
        else:
            zero = dk <= 0 or (k > 0 and dk <= deflation_tol * d[0])
        if zero:
            break
        d.append(dk)
        for i in range(k + 1, rows):
            L[i][k] = (h(i, k) - sum(L[i][s] * L[k][s] * d[s] for s in range(k))) / dk
    r = len(d)
    mass = float(vals[0])
    if r == 0:
        return JacobiMatrix((), (), mass)
    if r == q and not border:
        raise LengthError(f"a full-rank {q}-point recurrence also needs v_{2 * q - 1}")
    diag = []
    for j in range(r):
        a = L[j + 1][j] - (L[j][j - 1] if j > 0 else 0)
        diag.append(float(a))
    off = [math.sqrt(float(d[j] / d[j - 1])) for j in range(1, r)]
    return JacobiMatrix(tuple(diag), tuple(off), mass)


def _tridiagonal_ql(diag, off, max_iter):
    """Eigenvalues and first eigenvector components by the implicit QL method."""
    n = len(diag)
    d = [float(x) for x in diag]
    e = [float(x) for x in off] + [0.0]
    z = [1.0] + [0.0] * (n - 1)
    eps = np.finfo(float).eps
    total = 0
    for l in range(n):
        while True:
            mm = l
            while mm < n - 1:
                if abs(e[mm]) <= eps * (abs(d[mm]) + abs(d[mm + 1])):
                    break
                mm += 1
            if mm == l:
                break
            total += 1
            if total > max_iter:
                raise NumericalFailure(f"tridiagonal QL did not converge in {max_iter} sweeps")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[mm] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = mm - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[mm] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                f = z[i + 1]
                z[i + 1] = s * z[i] + c * f
                z[i] = c * z[i] - s * f
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[mm] = 0.0
    return d, z


def gauss_quadrature(J: JacobiMatrix) -> AtomicMeasure:
    """Nodes are the eigenvalues of ``J``; weights are ``mass * (first eigvec component)^2``."""
    if J.size == 0:
        return AtomicMeasure(())
    nodes, first = _tridiagonal_ql(J.diagonal, J.offdiagonal, SWEEPS_PER_NODE * J.size)
    return AtomicMeasure(tuple((t, J.mass * z * z) for t, z in zip(nodes, first)))


@dataclass(frozen=True)
class ResidualReport:
    max_abs: float
    max_rel: float
    worst_index: Optional[tuple]
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_rel <= self.tol

    def to_json(self) -> dict:
        return {
            "max_abs": self.max_abs,
            "max_rel": self.max_rel,
            "worst_index": list(self.worst_index) if self.worst_index is not None else None,
            "tol": self.tol,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class VandermondeDecomposition:
    atoms: AtomicMeasure
    augmented_c: float
    m: int
    n: int

    def terms(self) -> list:
        out = [RankOneTerm(moment_curve(float(t), self.n), float(w)) for t, w in self.atoms.atoms]
        c = self.augmented_c
        if c:
            e = [0.0] * self.n
            if c > 0:
                e[-1] = 1.0
                out.append(RankOneTerm(tuple(e), c))
            else:
                # odd m only: c e^m = (-|c|^(1/m) e)^m
                e[-1] = -abs(c) ** (1.0 / self.m)
                out.append(RankOneTerm(tuple(e), 1.0))
        return out

    def reconstruct(self) -> SymmetricTensor:
        return rank_one_sum(self.terms(), self.m, self.n)

    def to_json(self, residual: Optional[ResidualReport] = None) -> dict:
        doc = {
            "m": self.m,
            "n": self.n,
            "atoms": [{"t": float(t), "w": float(w)} for t, w in self.atoms.atoms],
            "augmented_c": float(self.augmented_c),
        }
        if residual is not None:
            doc["residual"] = residual.to_json()
        return doc


def strong_hankel_decompose(H: HankelTensor, mode: str = FLOAT, tol: float = 1e-8,
                            psd_tol: float = DEFAULT_TOL) -> VandermondeDecomposition:
    """Atoms plus augmented coefficient reproducing a strong Hankel tensor.

    For even ``D = m(n-1)`` the Gauss rule uses ``v_0..v_{D-1}`` and ``v_D`` is
    left for the augmented coefficient.  For odd ``D`` a complete recurrence
    needs ``v_D`` itself, so the rule uses all of ``v_0..v_D``.  A negative
    ``c`` below ``-tol * scale`` is a numerical failure for even ``m``; for odd
    ``m`` it is still an ``m``-th power and is kept.
    """
    D = H.top_degree
    v = H.generator.prefix(D)
    cert = strong_hankel_check(v, H.n, H.m, mode, psd_tol)
    if not cert.valid:
        raise PreconditionError(
            f"Hankel matrix H_{cert.p} is {cert.report.verdict.value}; "
            "the tensor is not certified strong"
        )
    if D % 2 == 0:
        q, moments = D // 2, v.prefix(D - 1)
    else:
        q, moments = (D + 1) // 2, v
    mu = gauss_quadrature(jacobi_from_moments(moments, q, mode))

    top = float(v[D])
    carried = sum(float(w) * float(t) ** D for t, w in mu.atoms)
    scale = max(abs(top), sum(float(w) * abs(float(t)) ** D for t, w in mu.atoms))
    c = top - carried
    if c < -tol * scale and H.m % 2 == 0:
        raise NumericalFailure(
            f"augmented coefficient {c:.3e} is negative beyond tolerance; rerun in exact mode"
        )
    if (c < 0 and c >= -tol * scale) or abs(c) <= 64 * np.finfo(float).eps * scale:
        c = 0.0
    return VandermondeDecomposition(mu, c, H.m, H.n)


def verify_decomposition(A, D: VandermondeDecomposition, tol: float = 1e-8) -> ResidualReport:
    """Entrywise comparison of ``A`` with the reconstruction; relative to ``max|A|``."""
    if (A.m, A.n) != (D.m, D.n):
        raise ValueError(f"shape mismatch: tensor ({A.m}, {A.n}) vs decomposition ({D.m}, {D.n})")
    target = np.array([float(x) for x in A.sorted_values()])
    recon = D.reconstruct().as_array()
    dev = np.abs(target - recon)
    k = int(np.argmax(dev))
    max_abs = float(dev[k])
    scale = float(np.abs(target).max())
    max_rel = max_abs / scale if scale > 0 else max_abs
    return ResidualReport(max_abs, max_rel, A.indices[k] if max_abs > 0 else None, tol)
