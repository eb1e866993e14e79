"""The reciprocal-product invariant r[n] and verification of the symmetry generators.

r[n] = 1 / (u[n] u[n+4] ... u[n+4k-4]) obeys the affine first-order
recurrence r[n+4] = A[n] r[n] + B[n], and u[n+4k] = u[n] r[n] / r[n+4].

The symmetry characteristics are alpha[n] = z**n for z a 4k-th root of unity
z = exp(2*pi*i*m/(4k)) solving 1 + z^4 + ... + z^(4k-4) = 0. Such z are
tracked by their integer exponent m, which makes the root test exact.
"""
from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional

from .core import Orbit, SystemSpec, ZeroDenominator, tau


class ZeroFactor(ZeroDivisionError):
    """A factor of the invariant product is zero."""


@dataclass
class InvariantSeries:
    values: Dict[int, Fraction] = field(default_factory=dict)
    residue: Optional[int] = None

    def __getitem__(self, n: int) -> Fraction:
        return self.values[n]

    def __len__(self) -> int:
        return len(self.values)


def _reciprocal_product(terms, n: int, k: int) -> Fraction:
    prod = Fraction(1)
    for i in range(k):
        prod *= terms[n + 4 * i]
    if prod == 0:
        raise ZeroFactor(f"zero factor in r[{n}]")
    return 1 / prod


def r_from_orbit(orbit: Orbit, k: int) -> InvariantSeries:
    """r[n] for every n whose factors lie inside the computed orbit."""
    terms = orbit.terms
    last = len(terms) - 4 * (k - 1)
    return InvariantSeries({n: _reciprocal_product(terms, n, k) for n in range(last)})


def check_r_recurrence(series: InvariantSeries, spec: SystemSpec) -> bool:
    """True iff r[n+4] == A[n] r[n] + B[n] exactly wherever both sides are known."""
    u = spec.to_u_form()
    for n, r in series.values.items():
        nxt = series.values.get(n + 4)
        if nxt is None:
            continue
        if nxt != u.A.term(n) * r + u.B.term(n):
            return False
    return True


@functools.lru_cache(maxsize=8192)
def r_closed(spec: SystemSpec, n: int, j: int) -> Fraction:
    """r[4n+j] = r[j] prod_{t<n} A[4t+j] + sum_{l<n} B[4l+j] prod_{l<t<n} A[4t+j]."""
    if not 0 <= j <= 3:
        raise ValueError(f"residue j must lie in 0..3, got {j}")
    if n < 0:
        raise ValueError("n must be >= 0")
    u = spec.to_u_form()
    r0 = _reciprocal_product(u.initial, j, u.k)
    # tail holds prod_{l<t<n} A[4t+j] while l runs downwards
    tail = Fraction(1)
    total = Fraction(0)
    for l in range(n - 1, -1, -1):
        total += u.B.term(4 * l + j) * tail
        tail *= u.A.term(4 * l + j)
    return r0 * tail + total


def u_from_r(spec: SystemSpec, n: int, i: int) -> Fraction:
    """u[4kn+i] as u[i] times the telescoping ratios r[4ks+i] / r[4ks+4+i]."""
    order = spec.order
    if not 0 <= i < order:
        raise ValueError(f"offset must lie in 0..{order - 1}")
    u = spec.to_u_form()
    value = u.initial[i]
    if n == 0:
        return value
    t = tau(i)
    for s in range(n):
        lo, hi = order * s + i, order * s + 4 + i
        den = r_closed(u, hi // 4, t)
        if den == 0:
            raise ZeroDenominator(f"r[{hi}] vanishes", s)
        value *= r_closed(u, lo // 4, t) / den
    return value


# -- symmetry generators ----------------------------------------------------

def _poly_divmod(num: List[int], den: List[int]):
    """Integer polynomial division by a monic divisor; coefficients low degree first."""
    num = list(num)
    dd = len(den) - 1
    if len(num) - 1 < dd:
        return [0], num
    quot = [0] * (len(num) - dd)
    for shift in range(len(num) - 1 - dd, -1, -1):
        c = num[shift + dd]
        quot[shift] = c
        if c:
            for t, d in enumerate(den):
                num[shift + t] -= c * d
    rem = num[:dd] or [0]
    return quot, rem


def cyclotomic(n: int) -> List[int]:
    """Coefficients of the n-th cyclotomic polynomial, low degree first."""
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly, rem = _poly_divmod(poly, cyclotomic(d))
            assert not any(rem)
    return poly


def root_sum_vanishes(modulus: int, exponents: List[int]) -> bool:
    """Exact test of sum_e zeta^e == 0 for zeta a primitive ``modulus``-th root of unity.

    Holds iff the cyclotomic polynomial of order ``modulus`` divides sum_e x^(e mod modulus).
    """
    poly = [0] * modulus
    for e in exponents:
        poly[e % modulus] += 1
    _, rem = _poly_divmod(poly, cyclotomic(modulus))
    return not any(rem)


def alpha(k: int, m: int, n: int) -> complex:
    """Characteristic alpha[n] = exp(2*pi*i*m*n/(4k)) of the generator with exponent m."""
    return cmath.exp(2j * math.pi * ((m * n) % (4 * k)) / (4 * k))


@dataclass
class SymmetryCertificate:
    k: int
    exponents: List[int]
    geometric: List[bool]
    cyclotomic: List[bool]
    residuals: List[float]

    @property
    def exact(self) -> List[bool]:
        return [g and c for g, c in zip(self.geometric, self.cyclotomic)]

    def passed(self, tol: float = 1e-12) -> bool:
        return all(self.exact) and all(r < tol for r in self.residuals)

    def __len__(self) -> int:
        return len(self.exponents)


def symmetry_roots(k: int) -> SymmetryCertificate:
    """Certify the roots of 1 + z^4 + ... + z^(4k-4) = 0.

    Exponents are {s, k+s, 2k+s, 3k+s : 1 <= s <= k-1}, i.e. the m in 1..4k-1
    with m mod k != 0. Each is checked by the geometric-sum criterion
    (z^4k = 1 and z^4 != 1), by cyclotomic divisibility, and numerically.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    order = 4 * k
    exponents = sorted(q * k + s for q in range(4) for s in range(1, k))
    geometric, cyclo, residuals = [], [], []
    for m in exponents:
        geometric.append((order * m) % order == 0 and (4 * m) % order != 0)
        powers = [4 * m * i for i in range(k)]
        cyclo.append(root_sum_vanishes(order, powers))
        residuals.append(abs(sum(alpha(k, m, p) for p in range(0, 4 * k, 4))))
    return SymmetryCertificate(k, exponents, geometric, cyclo, residuals)
