"""Built-in oracle corpus run by ``hmk selftest``."""
from __future__ import annotations

from fractions import Fraction as F

from .decomposition import (
    gauss_quadrature,
    jacobi_from_moments,
    strong_hankel_decompose,
    verify_decomposition,
)
from .psd import Verdict, hankel_matrix, leading_principal_minors, psd_check, strong_hankel_check
from .scalars import PreconditionError
from .sequence import (
    AtomicMeasure,
    GeneratingVector,
    MultidimensionalSequence,
    is_hankel_sequence,
    moments_of_measure,
    sequence_from_generating_vector,
    weighted_degree,
)
from .tensor import (
    hankel_tensor,
    is_hankel,
    moment_tensor_from_sequence,
    multinomial_coefficient,
    densify,
    polynomial_eval,
)


def _hilbert(L):
    return GeneratingVector([F(1, k + 1) for k in range(L + 1)])


def _cofactor_det(M):
    if len(M) == 1:
        return M[0][0]
    return sum((-1) ** c * M[0][c] * _cofactor_det([row[:c] + row[c + 1:] for row in M[1:]])
               for c in range(len(M)))


def _hilbert_minors():
    rows = hankel_matrix(_hilbert(4), 3).rows()
    oracle = tuple(_cofactor_det([r[:k] for r in rows[:k]]) for k in (1, 2, 3))
    return oracle == leading_principal_minors(hankel_matrix(_hilbert(4), 3)) == (F(1), F(1, 12), F(1, 2160))


def _hankel_table():
    table = {(0, 0): 1, (1, 0): 2, (2, 0): 5, (0, 1): 5, (1, 1): 7, (0, 2): 9}
    ok, _ = is_hankel_sequence(MultidimensionalSequence(3, table=table, max_degree=2), 2)
    table[(0, 1)] = 6
    bad, pair = is_hankel_sequence(MultidimensionalSequence(3, table=table, max_degree=2), 2)
    return ok and not bad and pair == ((2, 0), (0, 1))


def _not_psd_witness():
    r = psd_check(hankel_matrix(GeneratingVector([1, 0, -1, 0, 1]), 3))
    H = hankel_matrix(GeneratingVector([1, 0, -1, 0, 1]), 3)
    return r.verdict is Verdict.NOT_PSD and H.quadratic_form(r.witness) < 0


def _refuses_non_strong():
    try:
        strong_hankel_decompose(hankel_tensor(GeneratingVector([1, 0, -1, 0, 1]), 3, 2))
    except PreconditionError:
        return True
    return False


def _two_atom_roundtrip():
    v = moments_of_measure(AtomicMeasure(((-1, 1), (1, 1))), 8)
    H = hankel_tensor(v, 3, 4)
    d = strong_hankel_decompose(H)
    return (len(d.atoms) == 2 and d.augmented_c == 0
            and verify_decomposition(H, d, 1e-10).passed)


def _augmented_only():
    H = hankel_tensor(GeneratingVector([0, 0, 0, 0, 1]), 3, 2)
    d = strong_hankel_decompose(H, "exact")
    return len(d.atoms) == 0 and d.augmented_c == 1 and verify_decomposition(H, d).max_abs == 0


def _eval_paths():
    S = sequence_from_generating_vector(GeneratingVector([1, 2, 5]), 2)
    a = polynomial_eval(S, 2, (1, 1), "direct")
    b = polynomial_eval(S, 2, (1, 1), "tensor")
    return a == b == 10


def _commuting_triangle():
    v = GeneratingVector([1, 0, 2, 0, 7])
    A = moment_tensor_from_sequence(sequence_from_generating_vector(v, 3), 2)
    return A == densify(hankel_tensor(v, 3, 2)) and is_hankel(A) and A[(1, 2)] == 0


def _quadrature():
    mu = gauss_quadrature(jacobi_from_moments(GeneratingVector([2, 0, 2, 0]), 2))
    return len(mu) == 2 and all(abs(abs(t) - 1) < 1e-14 and abs(w - 1) < 1e-14 for t, w in mu.atoms)


CORPUS = [
    ("weighted degree", lambda: weighted_degree((1, 1, 1)) == 6),
    ("multinomial coefficient", lambda: multinomial_coefficient(3, (1, 1)) == 6),
    ("Hankel table check and violating pair", _hankel_table),
    ("Hilbert H_1..H_10 exact PSD full rank", lambda: all(
        psd_check(hankel_matrix(_hilbert(2 * p - 2), p)).rank == p for p in range(1, 11))),
    ("Hilbert H_3 leading minors vs cofactor expansion", _hilbert_minors),
    ("NOT_PSD witness re-verifies", _not_psd_witness),
    ("strong check of all-ones vector", lambda: strong_hankel_check(GeneratingVector([1] * 5), 3, 2).valid),
    ("two-point Gauss rule from moments", _quadrature),
    ("two-atom decomposition", _two_atom_roundtrip),
    ("augmented atom only", _augmented_only),
    ("non-strong input refused", _refuses_non_strong),
    ("polynomial paths agree", _eval_paths),
    ("sequence/tensor commuting triangle", _commuting_triangle),
]


def run(log=print) -> bool:
    ok = True
    for name, check in CORPUS:
        try:
            passed = bool(check())
        except Exception as exc:  # a crash is a failure of that entry
            passed = False
            name = f"{name} ({type(exc).__name__}: {exc})"
        ok &= passed
        log(f"{'PASS' if passed else 'FAIL'}  {name}")
    return ok
