"""Equilibria, characteristic roots, stability labels and periodicity.

Only constant coefficients are analysed. Root moduli are compared with 1 by
exact rational reasoning on |A| (each root family has a known modulus), and
the floating-point roots serve for reporting and residual checks.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple, Union

import numpy as np

from .closed_form import minus1_bracket
from .core import Orbit, SystemSpec, floor4, parse_rational, tau

LAS = "locally_asymptotically_stable"
UNSTABLE = "unstable"
NON_HYPERBOLIC = "non_hyperbolic"
GAS = "globally_asymptotically_stable"


class DegenerateB(ValueError):
    """B = 0: the equation is linear and has no nonzero equilibrium branch."""


class InsufficientHorizon(ValueError):
    pass


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def _rational_root(x: Fraction, k: int) -> Optional[Fraction]:
    # exact real k-th root of x >= 0 when it is rational
    def iroot(v: int) -> Optional[int]:
        lo, hi = 0, 1 << (v.bit_length() // k + 1)
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if mid ** k <= v:
                lo = mid
            else:
                hi = mid - 1
        return lo if lo ** k == v else None

    p, q = iroot(x.numerator), iroot(x.denominator)
    if p is None or q is None:
        return None
    return Fraction(p, q)


@dataclass(frozen=True)
class Equilibrium:
    """Constant solution. Nonzero values are sign * radicand**(1/k); ``value``
    is exact when that root is rational and a float otherwise."""

    value: Union[Fraction, float]
    kind: str
    radicand: Optional[Fraction] = None
    sign: int = 0

    @property
    def exact(self) -> bool:
        return isinstance(self.value, Fraction)

    def __float__(self) -> float:
        return float(self.value)


def equilibria(A, B, k: int) -> List[Equilibrium]:
    """Zero plus the real k-th roots of (1-A)/B."""
    A, B = parse_rational(A), parse_rational(B)
    if B == 0:
        raise DegenerateB("B = 0 makes the equation linear")
    out = [Equilibrium(Fraction(0), "zero")]
    c = (1 - A) / B
    if c == 0:
        return out
    if k % 2 == 0 and c < 0:
        return out
    signs = [_sign(c)] if k % 2 else [1, -1]
    mag = abs(c)
    root = _rational_root(mag, k)
    for s in signs:
        value = s * root if root is not None else s * float(mag) ** (1.0 / k)
        out.append(Equilibrium(value, "nonzero", radicand=mag, sign=s))
    return out


@dataclass
class RootSet:
    """Characteristic roots with provenance ``(family, index)``.

    ``vs_one`` holds the exact sign of |root| - 1 for every root.
    """

    roots: List[complex]
    provenance: List[Tuple[str, int]]
    vs_one: List[int]

    @property
    def moduli(self) -> List[float]:
        return [abs(z) for z in self.roots]

    def __len__(self) -> int:
        return len(self.roots)


def char_roots_zero(A, k: int) -> RootSet:
    """Roots of lambda^(4k) = 1/A, the linearization at the zero equilibrium."""
    A = parse_rational(A)
    if A == 0:
        raise ValueError("A = 0: the zero equilibrium has no linearization")
    order = 4 * k
    radius = float(abs(A)) ** (-1.0 / order)
    phase = 0.5 if A < 0 else 0.0
    roots = [radius * cmath.exp(2j * math.pi * (m + phase) / order) for m in range(order)]
    cmp = _sign(1 - abs(A))
    return RootSet(roots, [("direct", m) for m in range(order)], [cmp] * order)


def nonzero_char_poly(A, k: int) -> List[Fraction]:
    """Coefficients (highest degree first) of
    lambda^(4k) - (A-1)(lambda^(4k-4) + ... + lambda^4) - A."""
    A = parse_rational(A)
    coeffs = [Fraction(0)] * (4 * k + 1)
    coeffs[0] = Fraction(1)
    for r in range(1, k):
        coeffs[4 * k - 4 * r] = -(A - 1)
    coeffs[4 * k] = -A
    return coeffs


def _nonzero_poly_in_x(A: Fraction, k: int, x: Fraction) -> Fraction:
    # the characteristic polynomial written in x = lambda^4
    return x ** k - (A - 1) * sum(x ** r for r in range(1, k)) - A


def char_roots_nonzero(A, k: int) -> RootSet:
    """Roots at a nonzero equilibrium from the factored form (1 - x^k)(x - A), x = lambda^4.

    The factor 1 - x picked up while factoring adds the four spurious roots
    lambda^4 = 1; they are dropped after an exact substitution check.
    """
    A = parse_rational(A)
    if A == 1:
        raise ValueError("A = 1 has no nonzero equilibrium")
    order = 4 * k
    roots, prov, vs_one = [], [], []
    for m in range(1, order):
        if m % k == 0:
            # lambda^4 = 1 here; x = 1 is a root of the unfactored polynomial only if A = 1
            if _nonzero_poly_in_x(A, k, Fraction(1)) != 0:
                continue
        roots.append(cmath.exp(2j * math.pi * m / order))
        prov.append(("unit_circle_exponent", m))
        vs_one.append(0)
    mag = float(abs(A)) ** 0.25
    arg = math.pi if A < 0 else 0.0
    for r in range(4):
        roots.append(mag * cmath.exp(1j * (arg + 2 * math.pi * r) / 4))
        prov.append(("fourth_root_of_A", r))
        vs_one.append(_sign(abs(A) - 1))
    return RootSet(roots, prov, vs_one)


def companion_roots(A, k: int) -> np.ndarray:
    """Numerical eigenvalues of the companion matrix of the nonzero-equilibrium polynomial."""
    coeffs = [float(c) for c in nonzero_char_poly(A, k)]
    deg = len(coeffs) - 1
    comp = np.zeros((deg, deg), dtype=float)
    comp[0, :] = [-c for c in coeffs[1:]]
    comp[1:, :-1] = np.eye(deg - 1)
    return np.linalg.eigvals(comp)


def poly_residual(coeffs: List[Fraction], z: complex) -> float:
    acc = 0j
    for c in coeffs:
        acc = acc * z + float(c)
    return abs(acc)


@dataclass
class EquilibriumAnalysis:
    equilibrium: Equilibrium
    roots: RootSet
    classification: Optional[str]
    reason: str


@dataclass
class StabilityReport:
    A: Fraction
    B: Fraction
    k: int
    entries: List[EquilibriumAnalysis] = field(default_factory=list)
    nonzero_roots: Optional[RootSet] = None

    @property
    def equilibria(self) -> List[Equilibrium]:
        return [e.equilibrium for e in self.entries]

    @property
    def zero(self) -> EquilibriumAnalysis:
        return self.entries[0]


def _label_from_signs(vs_one: List[int]) -> str:
    if any(s > 0 for s in vs_one):
        return UNSTABLE
    if all(s < 0 for s in vs_one):
        return LAS
    return NON_HYPERBOLIC


def classify(spec: SystemSpec) -> StabilityReport:
    """Stability labels for every real equilibrium of a constant-coefficient system."""
    if not spec.is_constant:
        raise ValueError("classification needs constant coefficients")
    A, B, k = spec.A.value, spec.B.value, spec.k
    eqs = equilibria(A, B, k)
    report = StabilityReport(A, B, k)
    if A != 1:
        report.nonzero_roots = char_roots_nonzero(A, k)

    zero_roots = char_roots_zero(A, k)
    if A == 1:
        if B > 0 and all(u >= 0 for u in spec.initial):
            label, reason = GAS, "A=1, B>0, nonnegative initial data"
        else:
            label, reason = NON_HYPERBOLIC, "A=1: all roots on the unit circle"
    elif abs(A) > 1:
        label, reason = LAS, "|A|>1"
    elif abs(A) < 1:
        label, reason = UNSTABLE, "|A|<1"
    else:
        label, reason = None, "|A|=1, A!=1: boundary case left unclassified"
    report.entries.append(EquilibriumAnalysis(eqs[0], zero_roots, label, reason))

    for eq in eqs[1:]:
        roots = report.nonzero_roots
        if k > 1:
            label, reason = NON_HYPERBOLIC, "k>1: unit-circle roots present"
        else:
            label = _label_from_signs(roots.vs_one)
            reason = "k=1: fourth roots of A"
        report.entries.append(EquilibriumAnalysis(eq, roots, label, reason))
    return report


def theta_factors(spec: SystemSpec, n: int, i: int) -> List[Fraction]:
    """Contraction factors Theta(0..n-1) of residue class i when A = 1, B > 0.

    Their running product equals u[4kn+i] / u[i].
    """
    if not spec.is_constant or spec.A.value != 1:
        raise ValueError("theta factors need A = 1")
    B = spec.B.value
    if B <= 0:
        raise ValueError("theta factors need B > 0")
    if any(u <= 0 for u in spec.initial):
        raise ValueError("theta factors need positive initial data")
    k, q = spec.k, floor4(i)
    bp = B * spec.class_product(tau(i))
    return [1 - bp / (1 + bp * (k * s + q + 1)) for s in range(n)]


@dataclass
class PeriodReport:
    predicted: Optional[int]
    tag: str
    detected: Optional[int] = None
    horizon: Optional[int] = None

    @property
    def consistent(self) -> bool:
        if self.predicted is None or self.detected is None:
            return True
        return self.predicted % self.detected == 0


def predict_period(spec: SystemSpec) -> PeriodReport:
    """Period guaranteed by the known results, tagged by the result that applies."""
    if not spec.is_constant:
        return PeriodReport(None, "none")
    A, B, k = spec.A.value, spec.B.value, spec.k
    order = 4 * k
    if A == -1:
        brackets = [minus1_bracket(spec, j) for j in range(4)]
        if any(c == 0 for c in brackets):
            return PeriodReport(None, "none")
        if k % 2:
            return PeriodReport(2 * order, "a_minus1_k_odd")
        if all(c == 1 for c in brackets):
            return PeriodReport(order, "a_minus1_k_even_unit_factor")
        return PeriodReport(None, "none")
    if A != 1 and A != 0 and B != 0:
        target = (1 - A) / B
        if all(spec.class_product(p) == target for p in range(4)):
            return PeriodReport(order, "thm41")
    return PeriodReport(None, "none")


def detect_period(orbit: Union[Orbit, List[Fraction]], max_period: int) -> Optional[int]:
    """Smallest p <= max_period with terms[n+p] == terms[n] over the whole orbit."""
    terms = orbit.terms if isinstance(orbit, Orbit) else list(orbit)
    if max_period < 1:
        raise ValueError("max_period must be >= 1")
    if len(terms) < 3 * max_period:
        raise InsufficientHorizon(
            f"need at least {3 * max_period} terms to test periods up to {max_period}, got {len(terms)}"
        )
    for p in range(1, max_period + 1):
        if all(terms[n + p] == terms[n] for n in range(len(terms) - p)):
            return p
    return None
