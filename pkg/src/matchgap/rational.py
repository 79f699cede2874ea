"""Exact rational arithmetic.

Every cost, LP value and certificate in this package is a
:class:`fractions.Fraction`; no floating point enters any solver path.
``Fraction`` already guarantees lowest terms and a positive denominator,
so ``Rat`` is an alias rather than a wrapper.  This module adds the
conversion helpers used by the JSON formats and by solvers that scale a
rational problem to integers.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import ParseError

Rat = Fraction

ZERO = Rat(0)
ONE = Rat(1)


def rat(numerator: int, denominator: int = 1) -> Rat:
    """Build a rational from an integer pair."""
    return Rat(numerator, denominator)


def rat_from_pair(pair: object, *, field: str = "cost") -> Rat:
    """Decode a ``[numerator, denominator]`` JSON pair into a rational.

    Raises:
        ParseError: If the pair is not a 2-list of integers or the
            denominator is not positive.
    """
    if (not isinstance(pair, (list, tuple)) or len(pair) != 2
            or not all(isinstance(x, int) and not isinstance(x, bool)
                       for x in pair)):
        raise ParseError(f"expected [numerator, denominator], got {pair!r}",
                         field=field)
    num, den = pair
    if den <= 0:
        raise ParseError(f"denominator must be positive, got {den}",
                         field=field)
    return Rat(num, den)


def rat_to_pair(value: Rat) -> list[int]:
    """Encode a rational as a ``[numerator, denominator]`` JSON pair."""
    return [value.numerator, value.denominator]


def parse_rat(text: str) -> Rat:
    """Parse ``"3/4"`` or ``"5"`` into a rational."""
    try:
        return Rat(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"cannot parse rational from {text!r}") from exc


def common_denominator(values: list[Rat]) -> int:
    """Least common multiple of the denominators of ``values`` (>= 1)."""
    lcm = 1
    for value in values:
        lcm = lcm * value.denominator // math.gcd(lcm, value.denominator)
    return lcm


def scale_to_integers(values: list[Rat]) -> tuple[list[int], int]:
    """Scale rationals to integers by their common denominator.

    Returns ``(integers, scale)`` with ``integers[i] == values[i] * scale``
    exactly.  Used by solvers whose inner loops run faster on plain ints;
    the scaling is exact so no precision is lost.
    """
    scale = common_denominator(values)
    return [int(v * scale) for v in values], scale
