"""Shared construction shorthands for the test suite."""

from fractions import Fraction

from holonomy import build_canonical, make_pencil
from holonomy.exactla import RatMat


def pair_of(blocks, lam=0):
    """Canonical pair for a single eigenvalue with the given (size, sign) blocks."""
    return build_canonical(make_pencil([(Fraction(lam), blocks)]))


def mat(rows):
    return RatMat.from_rows(rows)


def unit(n, i):
    return [Fraction(1) if k == i else Fraction(0) for k in range(n)]
