"""Parsing helpers for exact numbers at the JSON/CLI boundary."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational, Real
from typing import Union

from .errors import InvalidInput

Number = Union[int, float, str, Fraction]


def to_fraction(value: Number) -> Fraction:
    """Exact rational from ``"p/q"``, a decimal string, an int or a float.

    Floats go through ``repr`` so ``0.3`` means 3/10, not the nearest
    binary double.
    """
    if isinstance(value, bool):
        raise InvalidInput(f"not a number: {value!r}")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, Real):
        return Fraction(repr(float(value)))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInput(f"cannot parse rational {value!r}") from exc
    raise InvalidInput(f"not a number: {value!r}")


def fraction_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
