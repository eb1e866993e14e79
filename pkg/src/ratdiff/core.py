"""Exact scalars, index helpers, system description and the forward-iteration oracle.

The equation family is

    u[n+4k] = u[n] / (A[n] + B[n] * u[n] * u[n+4] * ... * u[n+4k-4])

with rational coefficient sequences that are constant or periodic. The
shifted ("eta") form

    eta[n+1] = eta[n-4k+1] / (a[n] + b[n] * eta[n-3] * eta[n-7] * ... * eta[n-4k+1])

is the same recurrence under u[m] = eta[m-4k+1]. Since eta[n+1] = u[n+4k],
both forms share step indices and a[n] = A[n].
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

Rational = Fraction
RationalLike = Union[Fraction, int, str]

U_FORM = "u"
ETA_FORM = "eta"


class ZeroDenominator(ZeroDivisionError):
    """A denominator of the recurrence or of a closed form vanished exactly."""

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index


class IndexOutOfRange(IndexError):
    pass


_RATIONAL_RE = re.compile(r"^\s*(-?)(\d+)(?:/(\d+))?\s*$")


def parse_rational(text: RationalLike) -> Fraction:
    """Parse ``"p/q"`` or ``"p"`` (optional leading minus) into a Fraction.

    Decimal and exponent notations are rejected on purpose: configs must carry
    exact values.
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, bool):
        raise ValueError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"not a rational: {text!r}")
    m = _RATIONAL_RE.match(text)
    if m is None:
        raise ValueError(f"malformed rational {text!r} (expected 'p/q' or 'p')")
    sign, num, den = m.groups()
    if den is not None and int(den) == 0:
        raise ValueError(f"zero denominator in {text!r}")
    value = Fraction(int(num), int(den) if den is not None else 1)
    return -value if sign else value


def render_rational(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def tau(r: int) -> int:
    """Remainder of ``r`` modulo 4."""
    if r < 0:
        raise ValueError(f"tau expects r >= 0, got {r}")
    return r % 4


def floor4(r: int) -> int:
    if r < 0:
        raise ValueError(f"floor4 expects r >= 0, got {r}")
    return r // 4


def map_eta_index(k: int, n_eta: int) -> int:
    """u-index of ``eta[n_eta]``: eta initial data eta[-4k+1..0] sit at u[0..4k-1]."""
    if n_eta < -4 * k + 1:
        raise IndexOutOfRange(f"eta index {n_eta} precedes the initial block for k={k}")
    return n_eta + 4 * k - 1


def map_u_index(k: int, n_u: int) -> int:
    """Inverse of :func:`map_eta_index`."""
    if n_u < 0:
        raise IndexOutOfRange(f"u index {n_u} is negative")
    return n_u - 4 * k + 1


@dataclass(frozen=True)
class SequenceSpec:
    """Periodic rational sequence; ``term(n) = values[n mod p]``.

    A constant sequence is the period-1 case.
    """

    values: tuple

    def __post_init__(self):
        vals = tuple(parse_rational(v) for v in self.values)
        if not vals:
            raise ValueError("sequence needs at least one value")
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, value: RationalLike) -> "SequenceSpec":
        return cls((value,))

    @classmethod
    def periodic(cls, values: Iterable[RationalLike]) -> "SequenceSpec":
        return cls(tuple(values))

    @property
    def kind(self) -> str:
        return "constant" if self.is_constant else "periodic"

    @property
    def period(self) -> int:
        return len(self.values)

    @property
    def is_constant(self) -> bool:
        return all(v == self.values[0] for v in self.values)

    @property
    def value(self) -> Fraction:
        """The constant value; raises if the sequence is not constant."""
        if not self.is_constant:
            raise ValueError("sequence is not constant")
        return self.values[0]

    def term(self, n: int) -> Fraction:
        return self.values[n % len(self.values)]

    def shifted(self, offset: int) -> "SequenceSpec":
        """Sequence ``n -> term(n + offset)``."""
        p = len(self.values)
        return SequenceSpec(tuple(self.values[(j + offset) % p] for j in range(p)))


@dataclass(frozen=True)
class SystemSpec:
    """A full problem instance.

    ``initial`` holds the 4k starting values, u[0..4k-1] in u-form or
    eta[-4k+1..0] in eta-form (the two orderings coincide). In eta-form the
    sequences ``A`` and ``B`` are the a[n], b[n] of the shifted equation.
    """

    k: int
    A: SequenceSpec
    B: SequenceSpec
    initial: tuple
    form: str = U_FORM

    def __post_init__(self):
        if not isinstance(self.k, int) or isinstance(self.k, bool) or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k!r}")
        for name in ("A", "B"):
            seq = getattr(self, name)
            if not isinstance(seq, SequenceSpec):
                object.__setattr__(self, name, SequenceSpec.constant(seq))
        init = tuple(parse_rational(v) for v in self.initial)
        if len(init) != 4 * self.k:
            raise ValueError(f"expected {4 * self.k} initial values for k={self.k}, got {len(init)}")
        object.__setattr__(self, "initial", init)
        if self.form not in (U_FORM, ETA_FORM):
            raise ValueError(f"form must be 'u' or 'eta', got {self.form!r}")

    @property
    def order(self) -> int:
        return 4 * self.k

    @property
    def is_constant(self) -> bool:
        return self.A.is_constant and self.B.is_constant

    def to_u_form(self) -> "SystemSpec":
        if self.form == U_FORM:
            return self
        return SystemSpec(self.k, self.A, self.B, self.initial, U_FORM)

    def to_eta_form(self) -> "SystemSpec":
        if self.form == ETA_FORM:
            return self
        return SystemSpec(self.k, self.A, self.B, self.initial, ETA_FORM)

    def class_product(self, residue: int) -> Fraction:
        """Product u[p] u[p+4] ... u[p+4k-4] of initial values for residue p in 0..3."""
        prod = Fraction(1)
        for j in range(self.k):
            prod *= self.initial[residue + 4 * j]
        return prod


@dataclass(frozen=True)
class Orbit:
    """Trajectory u[0..N]; ``forbidden_at`` is the first index that could not be computed."""

    terms: tuple
    forbidden_at: Optional[int] = None
    requested: int = field(default=0, compare=False)

    @property
    def complete(self) -> bool:
        return self.forbidden_at is None

    @property
    def status(self) -> str:
        return "complete" if self.forbidden_at is None else f"forbidden_at({self.forbidden_at})"

    def __len__(self) -> int:
        return len(self.terms)

    def __getitem__(self, n):
        return self.terms[n]


def step(spec: SystemSpec, window: Sequence[Fraction], n: int) -> Fraction:
    """Return u[n+4k] given ``window = u[n .. n+4k-1]``.

    Only every fourth window entry enters the product.
    """
    u = spec.to_u_form()
    k = u.k
    if len(window) != 4 * k:
        raise ValueError(f"window must hold {4 * k} values, got {len(window)}")
    prod = Fraction(1)
    for i in range(k):
        prod *= window[4 * i]
    denom = u.A.term(n) + u.B.term(n) * prod
    if denom == 0:
        raise ZeroDenominator(f"denominator vanishes when computing u[{n + 4 * k}]", n + 4 * k)
    return Fraction(window[0]) / denom


def iterate(spec: SystemSpec, N: int) -> Orbit:
    """Forward-iterate to u[N]; a vanishing denominator truncates the orbit."""
    order = spec.order
    if N < order - 1:
        raise ValueError(f"N must be at least {order - 1}")
    u = spec.to_u_form()
    A, B, k = u.A, u.B, u.k
    terms = list(u.initial)
    for m in range(order, N + 1):
        n = m - order
        prod = Fraction(1)
        for i in range(k):
            prod *= terms[n + 4 * i]
        denom = A.term(n) + B.term(n) * prod
        if denom == 0:
            return Orbit(tuple(terms), forbidden_at=m, requested=N)
        terms.append(terms[n] / denom)
    return Orbit(tuple(terms), requested=N)
