"""Closed-form solution formulas and their certification against :func:`iterate`.

Every evaluator here uses the block convention of the u-form: ``(n, i)`` with
``0 <= i < 4k`` addresses u[4kn+i], which is eta[4kn-4k+1+i] in the shifted
form. The exception is :func:`eval_special_a_minus1`, which keeps the
``eta[4kn-j]`` addressing of the a = -1 formulas.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Tuple

from .core import ETA_FORM, SystemSpec, ZeroDenominator, floor4, iterate, tau

Evaluator = Callable[[SystemSpec, int, int], Fraction]


@dataclass(frozen=True)
class ClosedFormQuery:
    spec: SystemSpec
    block: int
    offset: int

    def __post_init__(self):
        if self.block < 0:
            raise ValueError("block must be >= 0")
        if not 0 <= self.offset < self.spec.order:
            raise ValueError(f"offset must lie in 0..{self.spec.order - 1}")

    @property
    def target_index(self) -> int:
        """Index of the addressed term in the spec's own form."""
        base = self.spec.order * self.block + self.offset
        if self.spec.form == ETA_FORM:
            return base - self.spec.order + 1
        return base


@dataclass
class ComparisonReport:
    horizon: int
    mismatches: List[Tuple[int, Optional[Fraction], Fraction]] = field(default_factory=list)
    oracle_status: str = "complete"
    evaluators: dict = field(default_factory=dict)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _check_query(spec: SystemSpec, n: int, i: int) -> None:
    if n < 0:
        raise ValueError(f"block index must be >= 0, got {n}")
    if not 0 <= i < spec.order:
        raise ValueError(f"offset must lie in 0..{spec.order - 1}, got {i}")


def _ratio_product(first, P, coeff_a, coeff_b, k, n, i):
    # R(m) = prod_{t<m} a(t) + P * sum_{l<m} b(l) prod_{l<t<m} a(t), built by
    # running accumulation; the block-s factor is R(ks+q)/R(ks+q+1).
    q = floor4(i)
    last = k * (n - 1) + q + 1
    prods, sums = [Fraction(1)], [Fraction(0)]
    for m in range(last):
        a = coeff_a(m)
        prods.append(prods[-1] * a)
        sums.append(sums[-1] * a + coeff_b(m))
    value = Fraction(first)
    for s in range(n):
        m = k * s + q
        num = prods[m] + P * sums[m]
        den = prods[m + 1] + P * sums[m + 1]
        if den == 0:
            raise ZeroDenominator(f"closed-form bracket vanishes at s={s}", s)
        value *= num / den
    return value


def eval_u_general(spec: SystemSpec, n: int, i: int) -> Fraction:
    """u[4kn+i] for arbitrary periodic coefficient sequences."""
    _check_query(spec, n, i)
    u = spec.to_u_form()
    if n == 0:
        return u.initial[i]
    t = tau(i)
    A, B = u.A, u.B
    return _ratio_product(
        u.initial[i], u.class_product(t),
        lambda m: A.term(4 * m + t), lambda m: B.term(4 * m + t),
        u.k, n, i,
    )


def _geometric(a: Fraction, m: int) -> Fraction:
    # sum_{l<m} a^l; the a == 1 branch is chosen by exact comparison
    if a == 1:
        return Fraction(m)
    return (1 - a ** m) / (1 - a)


def _constant_coefficients(spec: SystemSpec) -> Tuple[Fraction, Fraction]:
    if not spec.is_constant:
        raise ValueError("this closed form needs constant coefficient sequences")
    return spec.A.value, spec.B.value


def eval_u_constant(spec: SystemSpec, n: int, i: int) -> Fraction:
    """u[4kn+i] for constant A, B using powers and geometric sums."""
    _check_query(spec, n, i)
    A, B = _constant_coefficients(spec)
    value = spec.initial[i]
    if n == 0:
        return value
    k, q = spec.k, floor4(i)
    BP = B * spec.class_product(tau(i))
    for s in range(n):
        m = k * s + q
        den = A ** (m + 1) + BP * _geometric(A, m + 1)
        if den == 0:
            raise ZeroDenominator(f"closed-form bracket vanishes at s={s}", s)
        value *= (A ** m + BP * _geometric(A, m)) / den
    return value


def eval_eta(spec: SystemSpec, n: int, i: int) -> Fraction:
    """eta[4kn-4k+1+i] from the eta-form data.

    A u-form spec is read as eta-form data (same values, same coefficients).
    """
    _check_query(spec, n, i)
    e = spec.to_eta_form()
    k = e.k
    eta0 = lambda idx: e.initial[idx + 4 * k - 1]  # eta[idx] for idx in -4k+1..0
    first = eta0(i - 4 * k + 1)
    if n == 0:
        return first
    t = tau(i)
    P = Fraction(1)
    for j in range(k):
        P *= eta0(t - 4 * k + 1 + 4 * j)
    a, b = e.A, e.B
    return _ratio_product(
        first, P,
        lambda m: a.term(4 * m + t), lambda m: b.term(4 * m + t),
        k, n, i,
    )


def eval_special_a1(spec: SystemSpec, n: int, i: int) -> Fraction:
    """eta[4kn-4k+1+i] when a = 1 and b is constant."""
    _check_query(spec, n, i)
    a, b = _constant_coefficients(spec)
    if a != 1:
        raise ValueError(f"eval_special_a1 needs a = 1, got {a}")
    value = spec.initial[i]
    k, q = spec.k, floor4(i)
    bP = b * spec.class_product(tau(i))
    for s in range(n):
        den = 1 + bP * (k * s + q + 1)
        if den == 0:
            raise ZeroDenominator(f"closed-form bracket vanishes at s={s}", s)
        value *= (1 + bP * (k * s + q)) / den
    return value


def minus1_bracket(spec: SystemSpec, j: int) -> Fraction:
    """-1 + b * eta[-tau(j)] eta[-tau(j)-4] ... eta[-tau(j)-4k+4]."""
    _, b = _constant_coefficients(spec)
    k = spec.k
    prod = Fraction(1)
    for r in range(k):
        prod *= spec.initial[-tau(j) - 4 * r + 4 * k - 1]
    return -1 + b * prod


def eval_special_a_minus1(spec: SystemSpec, n: int, j: int) -> Fraction:
    """eta[4kn-j] for a = -1, b constant, 0 <= j < 4k.

    For even k the residue class is geometric with ratio bracket^(+-1); for odd
    k the factors alternate and cancel in pairs, so the solution has period 8k.
    """
    _check_query(spec, n, j)
    a, _ = _constant_coefficients(spec)
    if a != -1:
        raise ValueError(f"eval_special_a_minus1 needs a = -1, got {a}")
    k = spec.k
    base = spec.initial[4 * k - 1 - j]
    c = minus1_bracket(spec, j)
    sign = -1 if floor4(j) % 2 else 1
    if k % 2 == 0:
        exponent = sign * n
    else:
        exponent = 0 if n % 2 == 0 else -sign
    if exponent < 0 and c == 0:
        raise ZeroDenominator(f"bracket -1 + b*prod vanishes for j={j}", j)
    return base * c ** exponent


def _a_minus1_as_block(spec: SystemSpec, n: int, i: int) -> Fraction:
    # u[4kn+i] = eta[4kn-(4k-1-i)]
    return eval_special_a_minus1(spec, n, spec.order - 1 - i)


def applicable_evaluators(spec: SystemSpec) -> List[Tuple[str, Evaluator]]:
    """All closed forms valid for ``spec``, most specific first, in (n, i) convention."""
    out: List[Tuple[str, Evaluator]] = []
    if spec.is_constant:
        a = spec.A.value
        if a == -1:
            out.append(("a_minus1", _a_minus1_as_block))
        elif a == 1:
            out.append(("a1", eval_special_a1))
        out.append(("u_constant", eval_u_constant))
    out.append(("u_general", eval_u_general))
    out.append(("eta", eval_eta))
    return out


def compare(spec: SystemSpec, horizon: int, evaluator: Optional[Evaluator] = None,
            name: Optional[str] = None) -> ComparisonReport:
    """Compare the most specific closed form with the oracle at u-indices 0..horizon.

    ``evaluator`` overrides the automatic choice (used to test the harness).
    """
    if horizon < spec.order:
        raise ValueError(f"horizon must be at least {spec.order}")
    if evaluator is None:
        name, evaluator = applicable_evaluators(spec)[0]
    orbit = iterate(spec, horizon)
    report = ComparisonReport(horizon=horizon, oracle_status=orbit.status)
    order = spec.order
    for idx, expected in enumerate(orbit.terms):
        n, i = divmod(idx, order)
        try:
            got = evaluator(spec, n, i)
        except ZeroDivisionError:
            got = None
        report.evaluators[idx] = name or getattr(evaluator, "__name__", "custom")
        report.checked += 1
        if got != expected:
            report.mismatches.append((idx, got, expected))
    return report
