"""Search harness for Hankel tensors that are not strong yet look completely decomposable.

Candidates come from sparse ("truncated") generating vectors.  A candidate
qualifies when its Hankel matrix fails the PSD test.  For each requested
order ``m`` the dense Hankel tensor is then fitted by a sum of ``r``
symmetric rank-one powers, ``r`` growing from the Hankel-matrix rank up to
the dimension of the symmetric tensor space.

The fitter is a heuristic.  A converged fit is numerical evidence of
complete decomposability; a non-converged fit proves nothing.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Optional, Sequence

import numpy as np

from .psd import hankel_matrix, strong_hankel_check
from .scalars import EXACT, FLOAT, to_json_scalar
from .sequence import GeneratingVector
from .tensor import RankOneTerm, SymmetricTensor, densify, hankel_tensor, layout, power_contractions


@dataclass(frozen=True)
class TruncatedFamily:
    """Generating vectors of length ``m_max(n-1) + 1`` supported on ``pattern``.

    Values come either from ``grid`` (one tuple of values per pattern index,
    enumerated as a Cartesian product) or from a seeded sampler drawing
    ``samples`` vectors with entries ``k / denominator`` uniform in
    ``[low, high]``.
    """

    n: int
    m_max: int
    pattern: tuple
    grid: Optional[Mapping[int, tuple]] = None
    samples: int = 0
    low: float = -1.0
    high: float = 1.0
    denominator: int = 16
    seed: int = 0

    def __post_init__(self):
        top = self.m_max * (self.n - 1)
        pattern = tuple(sorted(set(int(k) for k in self.pattern)))
        if any(k < 0 or k > top for k in pattern):
            raise ValueError(f"pattern indices must lie in 0..{top}")
        object.__setattr__(self, "pattern", pattern)
        if self.grid is not None:
            grid = {int(k): tuple(vals) for k, vals in self.grid.items()}
            if set(grid) != set(pattern):
                raise ValueError("grid keys must match the pattern")
            object.__setattr__(self, "grid", grid)
        elif self.samples < 0:
            raise ValueError("samples must be >= 0")

    @property
    def length(self) -> int:
        return self.m_max * (self.n - 1) + 1

    def to_json(self) -> dict:
        doc = {"n": self.n, "m_max": self.m_max, "pattern": list(self.pattern)}
        if self.grid is not None:
            doc["grid"] = {str(k): [to_json_scalar(Fraction(x) if not isinstance(x, float) else x)
                                    for x in self.grid[k]] for k in self.pattern}
        else:
            doc.update(samples=self.samples, low=self.low, high=self.high,
                       denominator=self.denominator, seed=self.seed)
        return doc


def preset_family(n: int = 3, m_max: int = 6) -> TruncatedFamily:
    """Pattern ``{0, mid, top}`` with ends fixed to 1 and a grid on the middle entry."""
    top = m_max * (n - 1)
    mid = top // 2
    return TruncatedFamily(n, m_max, (0, mid, top), grid={0: (1,), mid: (-1, 0, 1), top: (1,)})


def truncated_vectors(f: TruncatedFamily) -> Iterator[GeneratingVector]:
    if f.grid is not None:
        choices = [f.grid[k] for k in f.pattern]
        for combo in itertools.product(*choices):
            v = [0] * f.length
            for k, x in zip(f.pattern, combo):
                v[k] = x
            yield GeneratingVector(v)
        return
    rng = np.random.default_rng(f.seed)
    lo = math.ceil(f.low * f.denominator)
    hi = math.floor(f.high * f.denominator)
    for _ in range(f.samples):
        v = [Fraction(0)] * f.length
        for k in f.pattern:
            v[k] = Fraction(int(rng.integers(lo, hi + 1)), f.denominator)
        yield GeneratingVector(v)


@dataclass(frozen=True)
class FitOptions:
    restarts: int = 20
    max_iter: int = 3000
    tol: float = 1e-8
    seed: int = 0


@dataclass(frozen=True)
class FitResult:
    r: int
    terms: tuple
    residual: float
    converged: bool
    restarts: int
    iterations: int
    history: tuple = field(default=(), repr=False)   # objective after each accepted step

    def to_json(self) -> dict:
        return {"r": self.r, "residual": self.residual, "converged": self.converged,
                "restarts": self.restarts, "iterations": self.iterations}


class _Target:
    """Float arrays of a symmetric tensor, cached for the descent loop."""

    def __init__(self, A: SymmetricTensor):
        lay = layout(A.n, A.m)
        self.n, self.m = A.n, A.m
        self.a = A.as_array()
        self.counts = lay.counts
        self.mult = np.asarray(lay.multiplicity, dtype=float)
        self.scale = float(np.abs(self.a).max())

    def residual(self, U: np.ndarray) -> np.ndarray:
        return self.a - np.prod(U[:, None, :] ** self.counts[None, :, :], axis=2).sum(axis=0)

    def evaluate(self, U: np.ndarray):
        R = self.residual(U)
        _, g = power_contractions(R, self.n, self.m, U)
        return float(self.mult @ (R * R)), -2.0 * self.m * g, R


def objective_and_gradient(A: SymmetricTensor, U: np.ndarray):
    """``f(U) = ||A - sum_k u_k^m||_F^2`` over all ``n^m`` entries and its gradient.

    ``grad_k = -2 m (R u_k^{m-1})`` where ``R`` is the residual tensor.
    """
    f, g, _ = _Target(A).evaluate(np.atleast_2d(np.asarray(U, dtype=float)))
    return f, g


def relative_residual(A: SymmetricTensor, terms: Sequence[RankOneTerm]) -> float:
    """``max|A - sum_k w_k u_k^m| / max|A|`` (absolute when ``A == 0``)."""
    a = A.as_array()
    if terms:
        U = np.array([[float(x) for x in t.u] for t in terms])
        w = np.array([float(t.w) for t in terms])
        T = w @ np.prod(U[:, None, :] ** layout(A.n, A.m).counts[None, :, :], axis=2)
    else:
        T = np.zeros_like(a)
    scale = float(np.abs(a).max())
    dev = float(np.abs(a - T).max())
    return dev / scale if scale > 0 else dev


STALL_WINDOW = 50
STALL_DECREASE = 1e-6
# stationary when |grad| <= GTOL * sqrt(f) * max|A|^((m-1)/m)
GTOL = 1e-9
MEMORY = 10


def _direction(g, pairs):
    """L-BFGS two-loop recursion; plain steepest descent with no curvature pairs."""
    q = g.copy()
    alphas = []
    for s, y, rho in reversed(pairs):
        a = rho * float(np.sum(s * q))
        alphas.append(a)
        q -= a * y
    if pairs:
        s, y, _ = pairs[-1]
        q *= float(np.sum(s * y)) / float(np.sum(y * y))
    for (s, y, rho), a in zip(pairs, reversed(alphas)):
        b = rho * float(np.sum(y * q))
        q += (a - b) * s
    return -q


def _descend(target: _Target, U: np.ndarray, opts: FitOptions):
    """Monotone descent: quasi-Newton directions with Armijo backtracking.

    Every accepted step lowers the objective.  Stops on convergence, at a
    stationary point, on a stalled objective (relative decrease below
    ``STALL_DECREASE`` over ``STALL_WINDOW`` accepted steps) or at ``max_iter``.
    """
    f, g, R = target.evaluate(U)
    history = [f]
    pairs = []
    gscale = GTOL * target.scale ** ((target.m - 1) / target.m)
    it = 0
    while it < opts.max_iter:
        if float(np.abs(R).max()) <= opts.tol * target.scale:
            break
        if float(np.linalg.norm(g)) <= gscale * np.sqrt(f):
            break
        d = _direction(g, pairs)
        slope = float(np.sum(g * d))
        if slope >= 0:
            pairs.clear()
            d, slope = -g, -float(np.sum(g * g))
        if slope == 0.0:
            break
        step = 1.0 if pairs else 1.0 / max(float(np.linalg.norm(g)), 1e-300)
        for _ in range(40):
            U_new = U + step * d
            f_new, g_new, R_new = target.evaluate(U_new)
            if f_new <= f + 1e-4 * step * slope:
                break
            step *= 0.5
        else:
            break
        s, y = U_new - U, g_new - g
        sy = float(np.sum(s * y))
        if sy > 1e-12 * float(np.sqrt(np.sum(s * s) * np.sum(y * y))):
            pairs.append((s, y, 1.0 / sy))
            if len(pairs) > MEMORY:
                pairs.pop(0)
        U, f, g, R = U_new, f_new, g_new, R_new
        history.append(f)
        it += 1
        if it >= STALL_WINDOW and f >= (1.0 - STALL_DECREASE) * history[-STALL_WINDOW - 1]:
            break
    return U, it, history


def cd_fit(A: SymmetricTensor, r: int, opts: FitOptions = FitOptions()) -> FitResult:
    """Fit ``A`` by ``sum_{k <= r} u_k^m`` with multi-start descent.

    Restart ``i`` is seeded from ``(opts.seed, r, i)``; initial vectors are
    random unit vectors scaled by ``max|A|^(1/m)``.  The best restart is
    returned; ``converged`` means relative residual ``<= opts.tol``.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    target = _Target(A)
    if target.scale == 0.0:
        terms = tuple(RankOneTerm((0.0,) * A.n, 1.0) for _ in range(r))
        return FitResult(r, terms, 0.0, True, 0, 0, (0.0,))
    best = None
    total_iter = 0
    for i in range(opts.restarts):
        rng = np.random.default_rng([opts.seed, r, i])
        U = rng.standard_normal((r, A.n))
        U /= np.linalg.norm(U, axis=1, keepdims=True)
        U *= target.scale ** (1.0 / A.m)
        U, iters, history = _descend(target, U, opts)
        total_iter += iters
        terms = tuple(RankOneTerm(tuple(u.tolist()), 1.0) for u in U)
        res = relative_residual(A, terms)
        if best is None or res < best.residual:
            best = FitResult(r, terms, res, res <= opts.tol, i + 1, total_iter, tuple(history))
        if res <= opts.tol:
            break
    return FitResult(best.r, best.terms, best.residual, best.converged, i + 1, total_iter,
                     best.history)


@dataclass(frozen=True)
class CandidateReport:
    id: int
    vector: GeneratingVector
    strong_check: dict
    fits: tuple

    @property
    def all_converged(self) -> bool:
        return all(f["converged"] for f in self.fits)

    @property
    def worst_residual(self) -> float:
        return max(f["residual"] for f in self.fits)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "vector": self.vector.to_json(),
            "strong_check": self.strong_check,
            "fits": list(self.fits),
            "all_converged": self.all_converged,
            "worst_residual": self.worst_residual,
        }


@dataclass(frozen=True)
class ExploreReport:
    family: TruncatedFamily
    m_list: tuple
    candidates: tuple       # qualifying candidates, ranked
    examined: int

    @property
    def evidence(self) -> tuple:
        """Ids of non-strong candidates whose fits converged at every order."""
        return tuple(c.id for c in self.candidates if c.all_converged)

    def to_json(self) -> dict:
        return {
            "family": self.family.to_json(),
            "m_list": list(self.m_list),
            "examined": self.examined,
            "qualifying": len(self.candidates),
            "evidence": list(self.evidence),
            "candidates": [c.to_json() for c in self.candidates],
        }


def _start_rank(v: GeneratingVector, n: int, m: int) -> int:
    p = m * (n - 1) // 2 + 1
    H = hankel_matrix(v, p).as_array()
    return max(1, int(np.linalg.matrix_rank(H)))


def search_counterexample(f: TruncatedFamily, m_list: Sequence[int],
                          fit_opts: FitOptions = FitOptions()) -> ExploreReport:
    """Fit every non-strong candidate of ``f`` at each order in ``m_list``.

    A candidate qualifies when the Hankel matrix of ``v_0..v_{M(n-1)}``,
    ``M = max(m_list)``, is not PSD.

    Candidates are ranked with all-orders-converged first, then by worst
    residual, then by id.  The report is evidence only.
    """
    m_list = tuple(int(m) for m in m_list)
    if any(m < 1 or m > f.m_max for m in m_list):
        raise ValueError(f"orders must lie in 1..{f.m_max}")
    m_top = max(m_list)
    qualifying = []
    examined = 0
    for cid, v in enumerate(truncated_vectors(f)):
        examined += 1
        # judged on the entries the fitted tensors actually read
        head = v.prefix(m_top * (f.n - 1))
        cert = strong_hankel_check(head, f.n, m_top, EXACT if head.mode == EXACT else FLOAT)
        if cert.valid:
            continue
        fits = []
        for m in m_list:
            A = densify(hankel_tensor(v.prefix(m * (f.n - 1)), f.n, m))
            r_max = math.comb(f.n + m - 1, m)
            result = None
            for r in range(min(_start_rank(v, f.n, m), r_max), r_max + 1):
                result = cd_fit(A, r, fit_opts)
                if result.converged:
                    break
            fits.append({"m": m, "r": result.r, "residual": result.residual,
                         "converged": result.converged})
        qualifying.append(CandidateReport(cid, v, cert.to_json(), tuple(fits)))
    qualifying.sort(key=lambda c: (not c.all_converged, c.worst_residual, c.id))
    return ExploreReport(f, m_list, tuple(qualifying), examined)
