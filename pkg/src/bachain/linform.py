"""Linear forms over exact real constants.

A form of dimension r carries constants (a_1, ..., a_r); an integer vector
m = (m_0, m_1, ..., m_r) has form value m_0 + m_1*a_1 + ... + m_r*a_r.
This module evaluates form values, picks the optimal free coefficient m_0
for a given tail, and applies the positive-value sign normalization.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import (
    AmbiguousRounding,
    DependenceSuspected,
    WidthTooLarge,
)
from .realnum import (
    PRECISION_CAP,
    START_PRECISION,
    DyadicInterval,
    RealExpr,
    eval_interval,
    nearest_integer,
)

IntVector = tuple[int, ...]


@dataclass(frozen=True)
class LinearForm:
    """Dimension r plus the r constants being approximated.

    Provably rational constants (root-free trees) are rejected outright,
    since the whole setup assumes 1 and the constants are rationally
    independent.  Rational values hiding behind root nodes, and deeper
    dependences between several constants, are only caught downstream by
    the enumerator's tie detection.
    """

    alphas: tuple[RealExpr, ...]

    def __post_init__(self):
        if len(self.alphas) < 1:
            raise ValueError("a linear form needs at least one constant")
        for j, a in enumerate(self.alphas):
            if not isinstance(a, RealExpr):
                raise TypeError(f"alpha[{j}] is not a RealExpr")
            if a.exact_fraction() is not None:
                raise DependenceSuspected(
                    f"alpha[{j}] = {a!r} is provably rational", witness=(j,))

    @property
    def r(self) -> int:
        return len(self.alphas)


def zeta(m: Sequence[int], form: LinearForm, precision: int,
         cap: int = PRECISION_CAP) -> DyadicInterval:
    """Enclosure of m_0 + sum m_j*a_j; each constant is evaluated to width
    <= 2**-precision, so the result has width <= 2**-precision * sum|m_j|."""
    if len(m) != form.r + 1:
        raise ValueError(f"expected {form.r + 1} coordinates, got {len(m)}")
    total = DyadicInterval.point(m[0])
    for coeff, alpha in zip(m[1:], form.alphas):
        if coeff:
            total = total + eval_interval(alpha, precision, cap).mul_int(coeff)
    return total


def tail_norm(tail: Sequence[int]) -> int:
    return max(abs(c) for c in tail)


def best_m0(tail: Sequence[int], form: LinearForm,
            cap: int = PRECISION_CAP) -> tuple[int, DyadicInterval]:
    """Free coefficient minimizing |m_0 + sum tail_j*a_j|, with the signed
    residual enclosure.

    Refines until the nearest integer is unambiguous; an ambiguity that
    survives the cap means the fractional part sits exactly on 0 or 1/2,
    which is a rational dependence.
    """
    if len(tail) != form.r:
        raise ValueError(f"expected {form.r} tail coordinates, got {len(tail)}")
    if not any(tail):
        raise ValueError("tail must not be all zero")
    # requested widths stay at half the cap so evaluation keeps headroom
    # for its own outward rounding
    w_max = max(START_PRECISION, cap // 2)
    w = min(START_PRECISION + sum(abs(c) for c in tail).bit_length(), w_max)
    while True:
        value = DyadicInterval.point(0)
        for coeff, alpha in zip(tail, form.alphas):
            if coeff:
                value = value + eval_interval(alpha, w, cap).mul_int(coeff)
        try:
            n, residual = nearest_integer(value)
        except (AmbiguousRounding, WidthTooLarge):
            if w >= w_max:
                raise DependenceSuspected(
                    f"residual of tail {tuple(tail)} cannot be rounded at "
                    f"cap {cap}; exact 0 or 1/2 suspected",
                    witness=tuple(tail))
            w = min(w * 2, w_max)
            continue
        if residual.sign() == 0:
            # an exact integer combination is a certified rational dependence
            raise DependenceSuspected(
                f"tail {tuple(tail)} combines to an exact integer",
                witness=tuple(tail))
        return -n, residual


def canonicalize_sign(m: Sequence[int], form: LinearForm,
                      cap: int = PRECISION_CAP) -> IntVector:
    """Return m or -m, whichever has a certified positive form value."""
    m = tuple(m)
    w_max = max(START_PRECISION, cap // 2)
    w = START_PRECISION
    while True:
        iv = zeta(m, form, w, cap)
        s = iv.sign()
        if s == 1:
            return m
        if s == -1:
            return tuple(-c for c in m)
        if s == 0 or w >= w_max:
            raise DependenceSuspected(
                f"form value of {m} has no certifiable sign", witness=m)
        w = min(w * 2, w_max)
