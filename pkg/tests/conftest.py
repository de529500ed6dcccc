import sys
from fractions import Fraction

import hypothesis.strategies as st
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

small_fractions = st.fractions(min_value=-4, max_value=4, max_denominator=12)


def hilbert(L):
    from hankel_moment import GeneratingVector

    return GeneratingVector([Fraction(1, k + 1) for k in range(L + 1)])


def cofactor_det(M):
    """Determinant by Laplace expansion along the first row (oracle, small sizes)."""
    if len(M) == 1:
        return M[0][0]
    return sum((-1) ** c * M[0][c] * cofactor_det([row[:c] + row[c + 1:] for row in M[1:]])
               for c in range(len(M)))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
