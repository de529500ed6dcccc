"""Scalar handling shared by every module.

Two scalar modes coexist: exact rationals (``fractions.Fraction``) and
binary64 floats.  Integers and ``"p/q"`` strings are read as rationals,
anything else as floats.  A collection mixing both degrades to floats.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational, Real
from typing import Iterable, Union

Scalar = Union[Fraction, float]

EXACT = "exact"
FLOAT = "float"

# |a - b| <= EQ_TOL * max(1, |a|, |b|) for float data comparisons
EQ_TOL = 1e-12


class HankelMomentError(Exception):
    """Base class for all package errors."""


class CoverageError(HankelMomentError, KeyError):
    """A sequence was queried outside its declared coverage."""

    def __str__(self):
        return Exception.__str__(self)


class InconsistencyError(HankelMomentError, ValueError):
    """Two representatives of one weighted-degree class disagree."""


class LengthError(HankelMomentError, ValueError):
    """A generating vector is too short for the requested object."""


class DomainError(HankelMomentError, ValueError):
    pass


class PreconditionError(HankelMomentError, ValueError):
    """An input does not satisfy the hypothesis an operation needs."""


class NumericalFailure(HankelMomentError, ArithmeticError):
    """Iteration cap hit, or a float result contradicts its contract."""


def to_scalar(x) -> Scalar:
    """Coerce ``x`` to a Fraction (ints, Fractions, ``"p/q"``) or a float."""
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        try:
            return Fraction(s)
        except ValueError:
            pass
        v = float(s)
    elif isinstance(x, Real):
        v = float(x)
    else:
        raise TypeError(f"cannot interpret {x!r} as a scalar")
    if not math.isfinite(v):
        raise ValueError(f"non-finite scalar {x!r}")
    return v


def normalize(values: Iterable) -> tuple:
    """Coerce a collection to a single scalar mode (rational unless a float is present)."""
    vals = [to_scalar(v) for v in values]
    if any(isinstance(v, float) for v in vals):
        return tuple(float(v) for v in vals)
    return tuple(vals)


def mode_of(values: Iterable) -> str:
    return FLOAT if any(isinstance(v, float) for v in values) else EXACT


def as_mode(values: Iterable, mode: str) -> tuple:
    """Exact conversion of floats to Fractions, or rationals to nearest floats."""
    if mode == EXACT:
        return tuple(v if isinstance(v, Fraction) else Fraction(v) for v in values)
    if mode == FLOAT:
        return tuple(float(v) for v in values)
    raise ValueError(f"unknown mode {mode!r}")


def scalars_equal(a: Scalar, b: Scalar) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    a, b = float(a), float(b)
    return abs(a - b) <= EQ_TOL * max(1.0, abs(a), abs(b))


def to_json_scalar(x: Scalar):
    """Rationals become ``"p/q"`` strings (integers stay ints), floats stay floats."""
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return int(x.numerator)
        return f"{x.numerator}/{x.denominator}"
    return float(x)
