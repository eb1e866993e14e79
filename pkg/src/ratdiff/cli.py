"""Command-line front end: config parsing, CSV emission and text reports.

Exit codes: 0 success/agreement, 1 mismatch or analysis failure, 2 usage or
config error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import List, Optional, TextIO

from . import analysis, closed_form
from .core import ETA_FORM, U_FORM, SequenceSpec, SystemSpec, iterate, parse_rational, render_rational
from .invariants import symmetry_roots


class ConfigError(ValueError):
    pass


class ParseError(ConfigError):
    pass


class ValidationError(ConfigError):
    pass


class UnknownPreset(KeyError):
    pass


PRESETS = {
    "fig1": {
        "k": 2, "form": "u",
        "A": {"constant": "2"}, "B": {"constant": "-1"},
        "initial": ["-2", "-3", "-4", "1", "-1/2", "-1/3", "-1/4", "1"],
    },
    "fig2": {
        "k": 2, "form": "u",
        "A": {"constant": "2"}, "B": {"constant": "1"},
        "initial": ["2", "3", "4", "1", "1/2", "1/3", "1/4", "1"],
    },
}


@dataclass
class RunConfig:
    system: SystemSpec
    steps: Optional[int] = None
    horizon: Optional[int] = None
    max_period: Optional[int] = None
    out: Optional[str] = None
    preset: Optional[str] = None


def _rational_field(value, where: str) -> Fraction:
    if not isinstance(value, str):
        raise ParseError(f"{where}: rationals must be strings like \"-1/3\", got {value!r}")
    try:
        return parse_rational(value)
    except ValueError as exc:
        raise ParseError(f"{where}: {exc}") from None


def _sequence_field(obj, name: str) -> SequenceSpec:
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ParseError(f"field '{name}': expected {{\"constant\": ...}} or {{\"periodic\": [...]}}")
    (kind, payload), = obj.items()
    if kind == "constant":
        return SequenceSpec.constant(_rational_field(payload, f"field '{name}.constant'"))
    if kind == "periodic":
        if not isinstance(payload, list):
            raise ParseError(f"field '{name}.periodic': expected an array")
        if not payload:
            raise ValidationError(f"field '{name}.periodic': sequence is empty")
        return SequenceSpec.periodic(
            _rational_field(v, f"field '{name}.periodic[{j}]'") for j, v in enumerate(payload)
        )
    raise ParseError(f"field '{name}': unknown sequence kind {kind!r}")


def _optional_int(doc: dict, key: str) -> Optional[int]:
    if key not in doc:
        return None
    v = doc[key]
    if not isinstance(v, int) or isinstance(v, bool):
        raise ParseError(f"field '{key}': expected an integer, got {v!r}")
    return v


def config_from_dict(doc) -> RunConfig:
    if not isinstance(doc, dict):
        raise ParseError("config must be a JSON object")
    for key in ("k", "A", "B", "initial"):
        if key not in doc:
            raise ParseError(f"missing field '{key}'")
    k = doc["k"]
    if not isinstance(k, int) or isinstance(k, bool):
        raise ParseError(f"field 'k': expected an integer, got {k!r}")
    if k < 1:
        raise ValidationError(f"field 'k': must be >= 1, got {k}")
    form = doc.get("form", "u")
    if form not in (U_FORM, ETA_FORM):
        raise ParseError(f"field 'form': expected \"u\" or \"eta\", got {form!r}")
    A = _sequence_field(doc["A"], "A")
    B = _sequence_field(doc["B"], "B")
    initial = doc["initial"]
    if not isinstance(initial, list):
        raise ParseError("field 'initial': expected an array")
    if len(initial) != 4 * k:
        raise ValidationError(f"field 'initial': expected {4 * k} values for k={k}, got {len(initial)}")
    values = [_rational_field(v, f"field 'initial[{j}]'") for j, v in enumerate(initial)]
    return RunConfig(
        SystemSpec(k, A, B, tuple(values), form),
        steps=_optional_int(doc, "steps"),
        horizon=_optional_int(doc, "horizon"),
        max_period=_optional_int(doc, "max_period"),
    )


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON config document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return config_from_dict(doc)


def preset_config(name: str) -> RunConfig:
    if name not in PRESETS:
        raise UnknownPreset(f"unknown preset {name!r} (choose from {', '.join(sorted(PRESETS))})")
    cfg = config_from_dict(PRESETS[name])
    cfg.preset = name
    return cfg


def render_decimal(q: Fraction) -> str:
    """17 significant digits, scientific notation."""
    with localcontext() as ctx:
        ctx.prec = 17
        d = Decimal(q.numerator) / Decimal(q.denominator)
        return f"{d:.16e}"


def simulate_csv(spec: SystemSpec, steps: int) -> str:
    if steps < 1:
        raise ValidationError("steps must be >= 1")
    orbit = iterate(spec, max(steps, spec.order - 1))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "exact", "decimal"])
    for n, q in enumerate(orbit.terms[: steps + 1]):
        writer.writerow([n, render_rational(q), render_decimal(q)])
    if orbit.forbidden_at is not None and orbit.forbidden_at <= steps:
        buf.write(f"# forbidden at n={orbit.forbidden_at}\n")
    return buf.getvalue()


def _label(cls: Optional[str]) -> str:
    return "unclassified" if cls is None else cls.replace("_", " ")


def _describe_spec(spec: SystemSpec) -> str:
    def seq(s: SequenceSpec) -> str:
        if s.is_constant:
            return render_rational(s.value)
        return "[" + ", ".join(render_rational(v) for v in s.values) + "]"
    return f"k={spec.k}, order {spec.order}, A={seq(spec.A)}, B={seq(spec.B)}, form={spec.form}"


def compare_report(spec: SystemSpec, horizon: int):
    report = closed_form.compare(spec, horizon)
    lines = [f"system: {_describe_spec(spec)}", f"oracle status: {report.oracle_status}"]
    bad = {idx for idx, _, _ in report.mismatches}
    for idx in sorted(report.evaluators):
        lines.append(f"{idx:6d}  {report.evaluators[idx]:<12s} {'MISMATCH' if idx in bad else 'ok'}")
    lines.append(f"checked {report.checked} indices, mismatches: {len(report.mismatches)}")
    if report.mismatches:
        idx, got, want = report.mismatches[0]
        shown = "undefined" if got is None else render_rational(got)
        lines.append(f"first mismatch at n={idx}: closed form {shown}, oracle {render_rational(want)}")
    return "\n".join(lines) + "\n", (1 if report.mismatches else 0)


def _format_roots(roots: analysis.RootSet) -> List[str]:
    out = []
    for z, (family, idx), cmp in zip(roots.roots, roots.provenance, roots.vs_one):
        rel = {-1: "<1", 0: "=1", 1: ">1"}[cmp]
        out.append(f"    {family}({idx}): {z.real:+.12f} {z.imag:+.12f}i  |z|={abs(z):.12f} ({rel})")
    return out


def period_lines(spec: SystemSpec, horizon: Optional[int], max_period: Optional[int]):
    pred = analysis.predict_period(spec)
    if horizon is not None or max_period is not None:
        mp = max_period if max_period is not None else (horizon + 1) // 3
        hz = horizon if horizon is not None else 3 * mp
        orbit = iterate(spec, max(hz, spec.order - 1))
        pred.horizon = hz
        if orbit.complete:
            pred.detected = analysis.detect_period(orbit, mp)
    text = f"predicted period {pred.predicted if pred.predicted is not None else 'none'} ({pred.tag})"
    if pred.horizon is not None:
        text += f"; detected {pred.detected if pred.detected is not None else 'none'}"
    return text, pred


def analyze_report(spec: SystemSpec, horizon: Optional[int] = None, max_period: Optional[int] = None) -> str:
    rep = analysis.classify(spec)
    lines = [f"system: {_describe_spec(spec)}"]
    eq_txt = ", ".join(
        render_rational(e.value) if e.exact else f"{e.value:.12g}" for e in rep.equilibria
    )
    lines.append(f"equilibria: {eq_txt}")
    for entry in rep.entries:
        e = entry.equilibrium
        val = render_rational(e.value) if e.exact else f"{e.value:.12g}"
        lines.append(f"equilibrium {val}: {_label(entry.classification)} ({entry.reason})")
        lines.extend(_format_roots(entry.roots))
    if rep.nonzero_roots is not None and len(rep.entries) == 1:
        lines.append("nonzero-equilibrium characteristic roots (no real nonzero equilibrium):")
        lines.extend(_format_roots(rep.nonzero_roots))
    ptext, _ = period_lines(spec, horizon, max_period)
    zero = rep.zero
    lines.append(f"{ptext}; zero equilibrium {_label(zero.classification)} ({zero.reason})")
    return "\n".join(lines) + "\n"


def symmetry_report(k: int):
    cert = symmetry_roots(k)
    lines = [f"k={k}: {len(cert)} exponents (root = exp(2*pi*i*m/{4 * k}))", "m,exact,residual"]
    for m, ok, res in zip(cert.exponents, cert.exact, cert.residuals):
        lines.append(f"{m},{'pass' if ok else 'FAIL'},{res:.3e}")
    passed = cert.passed()
    lines.append("all checks pass" if passed else "some checks FAILED")
    return "\n".join(lines) + "\n", (0 if passed else 1)


def _emit(text: str, out: Optional[str], stdout: TextIO) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ratdiff", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def with_config(p):
        p.add_argument("--config", metavar="PATH", help="JSON system config")
        p.add_argument("--preset", metavar="NAME", help="built-in config (fig1, fig2)")
        return p

    p = with_config(sub.add_parser("simulate", help="iterate the recurrence and emit CSV"))
    p.add_argument("--steps", type=int)
    p.add_argument("--out", metavar="PATH")

    p = with_config(sub.add_parser("compare", help="check closed forms against iteration"))
    p.add_argument("--horizon", type=int)

    p = with_config(sub.add_parser("analyze", help="equilibria, roots, stability, period"))
    p.add_argument("--horizon", type=int)
    p.add_argument("--max-period", type=int)

    p = with_config(sub.add_parser("period", help="predicted and detected period"))
    p.add_argument("--horizon", type=int)
    p.add_argument("--max-period", type=int)

    p = sub.add_parser("symmetry", help="certify the symmetry generator roots")
    p.add_argument("--k", type=int)
    p.add_argument("--config", metavar="PATH")

    p = sub.add_parser("figure", help="emit the CSV of a built-in figure preset")
    p.add_argument("--preset", metavar="NAME", required=True)
    p.add_argument("--steps", type=int)
    p.add_argument("--out", metavar="PATH")
    return parser


def _load(args) -> RunConfig:
    if getattr(args, "preset", None):
        return preset_config(args.preset)
    if not getattr(args, "config", None):
        raise ConfigError("one of --config or --preset is required")
    try:
        with open(args.config) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return parse_config(text)


def run(args, stdout: TextIO) -> int:
    cmd = args.command
    if cmd == "symmetry":
        k = args.k if args.k is not None else (_load(args).system.k if args.config else None)
        if k is None or k < 1:
            raise ConfigError("symmetry needs --k >= 1 or --config")
        text, code = symmetry_report(k)
        stdout.write(text)
        return code

    cfg = _load(args)
    spec = cfg.system
    if cmd in ("simulate", "figure"):
        steps = args.steps if args.steps is not None else cfg.steps
        if steps is None:
            steps = 40 if cfg.preset == "fig1" else 160 if cfg.preset == "fig2" else 12 * spec.k
        _emit(simulate_csv(spec, steps), args.out, stdout)
        return 0
    if cmd == "compare":
        horizon = args.horizon if args.horizon is not None else cfg.horizon or 12 * spec.order
        text, code = compare_report(spec, horizon)
        stdout.write(text)
        return code
    horizon = args.horizon if args.horizon is not None else cfg.horizon
    max_period = args.max_period if args.max_period is not None else cfg.max_period
    if cmd == "analyze":
        try:
            stdout.write(analyze_report(spec, horizon, max_period))
        except (analysis.DegenerateB, analysis.InsufficientHorizon, ValueError) as exc:
            stdout.write(f"analysis failed: {exc}\n")
            return 1
        return 0
    if cmd == "period":
        if horizon is None and max_period is None:
            max_period = 2 * spec.order
        try:
            text, rep = period_lines(spec, horizon, max_period)
        except analysis.InsufficientHorizon as exc:
            stdout.write(f"period detection failed: {exc}\n")
            return 1
        stdout.write(text + ("" if rep.consistent else " (INCONSISTENT)") + "\n")
        return 0 if rep.consistent else 1
    raise ConfigError(f"unknown command {cmd!r}")


def main(argv: Optional[List[str]] = None, stdout: Optional[TextIO] = None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return run(args, stdout)
    except (ConfigError, UnknownPreset) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        print(f"error: {msg}", file=sys.stderr)
        return 2


def main_entry() -> None:
    sys.exit(main())
