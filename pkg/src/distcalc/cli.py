"""Command-line front end: ``distcalc {verify,integral,diagrams,compare-rules,oracle}``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import integrals
from .reduce import ReductionError, Reducer, RuleSet, Variant
from .value import Value
from .verify import compare_rules, verify_order
from .wick import TransformSpec, UnsupportedOrderError, diagram_to_expr, expand_action, generate_diagrams

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
INTEGRAL_NAMES = ("I1R", "I1", "I2", "I", "Ian", "i2", "i5", "ibis", "i10", "i3")


@dataclass(frozen=True)
class CliConfig:
    subcommand: str
    rules: str = "paper"
    format: str = "table"
    omega: Fraction | None = None
    a: Fraction | None = None
    trace: bool = False

    @property
    def rule_set(self) -> RuleSet:
        return RuleSet.named(self.rules)

    def show(self, v: Value) -> str:
        """Render a Value, substituting any numeric overrides."""
        if self.omega is not None or self.a is not None:
            v = v.subs(omega=self.omega, a=self.a)
        return str(v)


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational 'p/q', got {text!r}") from None


def _positive_rational(text: str) -> Fraction:
    r = _rational(text)
    if r <= 0:
        raise argparse.ArgumentTypeError(f"ω must be positive, got {text!r}")
    return r


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="distcalc", description=__doc__)
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp: argparse.ArgumentParser, *, rules: bool = True) -> None:
        if rules:
            sp.add_argument("--rules", choices=[v.value for v in Variant], default="paper")
        sp.add_argument("--format", choices=("table", "json"), default="table")
        sp.add_argument("--json", dest="format", action="store_const", const="json", help="same as --format json")

    sp = sub.add_parser("verify", help="check coordinate independence at one order")
    sp.add_argument("--order", type=int, choices=(1, 2), required=True)
    sp.add_argument("--omega", type=_positive_rational, help="substitute ω = p/q in printed values")
    sp.add_argument("--a", type=_rational, help="substitute a = p/q in printed values")
    common(sp)

    sp = sub.add_parser("integral", help="reduce one named integral to an exact value")
    sp.add_argument("--name", choices=INTEGRAL_NAMES, required=True)
    sp.add_argument("--trace", action="store_true", help="print the reduction trace")
    sp.add_argument("--omega", type=_positive_rational)
    common(sp)

    sp = sub.add_parser("diagrams", help="list the vacuum diagrams at one order")
    sp.add_argument("--order", type=int, required=True)
    common(sp)

    sp = sub.add_parser("compare-rules", help="compare the four rule sets")
    sp.add_argument("--order", type=int, choices=(2,), default=2)
    common(sp, rules=False)

    sp = sub.add_parser("oracle", help="numerical validation of the regular integrals")
    sp.add_argument("--omega", type=_positive_rational, default=Fraction(1))
    sp.add_argument("--sigma", type=float, default=0.1, help="widest mollifier width")
    sp.add_argument("--tol", type=float, default=1e-8, help="pass threshold on |exact - numeric|")
    common(sp, rules=False)
    return p


def _table(rows: list[list[str]], out) -> None:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    for r in rows:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip(), file=out)


def _emit_json(obj, out) -> None:
    json.dump(obj, out, indent=2, ensure_ascii=False)
    out.write("\n")


# -- subcommands ---------------------------------------------------------------


def cmd_verify(cfg: CliConfig, args, out) -> int:
    report = verify_order(args.order, cfg.rule_set)
    if cfg.format == "json":
        data = report.to_json()
        if cfg.omega is not None or cfg.a is not None:
            data["substituted"] = {
                "omega": None if cfg.omega is None else str(cfg.omega),
                "a": None if cfg.a is None else str(cfg.a),
                "total": cfg.show(report.total),
            }
        _emit_json(data, out)
    else:
        rs = report.rules
        print(f"order {report.order}, rules {rs.name} (I = {rs.eps_square_delta})", file=out)
        rows = [["diagram", "mult", "coefficient", "integral", "contribution"]]
        for d in report.diagrams:
            rows.append(
                [d.label, str(d.diagram.multiplicity), cfg.show(d.diagram.coefficient), cfg.show(d.value),
                 cfg.show(d.contribution)]
            )
        _table(rows, out)
        print(file=out)
        rows = [["sector", "value", "status"]]
        rows.append(["delta0^2 before δ²=δ(0)δ", cfg.show(report.sectors.get("delta0^2", Value.const(0))),
                     "ok" if report.sector_pass["delta0^2 (before δ²=δ(0)δ)"] else "FAIL"])
        for k, v in report.final_sectors.items():
            rows.append([k, cfg.show(v), "ok" if v.is_zero() else "FAIL"])
        _table(rows, out)
        print(f"total: {cfg.show(report.total)}", file=out)
        print(f"a-dependent diagrams: {report.a_dependent}; a-dependent total: {report.total_depends_on_a}", file=out)
    if report.passed:
        if cfg.format == "table":
            print("PASS", file=out)
        return EXIT_OK
    if cfg.format == "table":
        print(f"FAIL: residual {cfg.show(report.residual)}", file=out)
    return EXIT_FAIL


def cmd_integral(cfg: CliConfig, args, out, err) -> int:
    rs = cfg.rule_set
    e = integrals.named_integral(args.name, tagged=rs.tagged)
    warnings = []
    if args.name == "Ian" and not rs.tagged:
        warnings.append(
            "strict one-dimensional mode cannot distinguish ∫Δ²Δ_ab² from ∫Δ²Δ_aa²; "
            "the anomalous integral collapses to 0 identically"
        )
    reducer = Reducer(rs)
    value = reducer.value(e)
    for w in warnings:
        print(f"warning: {w}", file=err)
    if cfg.format == "json":
        data = {
            "name": args.name,
            "rules": rs.name,
            "I": str(rs.eps_square_delta),
            "integrand": e.text(),
            "value": value.to_json(),
            "text": str(value),
            "warnings": warnings,
        }
        if cfg.omega is not None:
            data["at_omega"] = {"omega": str(cfg.omega), "value": cfg.show(value)}
        if cfg.trace:
            data["trace"] = reducer.trace
        _emit_json(data, out)
        return EXIT_OK
    print(cfg.show(value), file=out)
    if cfg.trace:
        print(f"trace ({len(reducer.trace)} steps, depth {reducer.max_depth_reached}):", file=out)
        for step in reducer.trace:
            print(f"  [{step['rule']}] {step['before']}  ->  {step['after']}", file=out)
    return EXIT_OK


def cmd_diagrams(cfg: CliConfig, args, out) -> int:
    rs = cfg.rule_set
    diagrams = generate_diagrams(expand_action(TransformSpec.standard()), args.order)
    catalog = []
    for d in diagrams:
        coupling = d.coefficient * Fraction(1, d.multiplicity)
        catalog.append(
            {
                "order": d.order,
                "class": d.klass,
                "multiplicity": d.multiplicity,
                "coupling": str(coupling),
                "coefficient": str(d.coefficient),
                "integrand": diagram_to_expr(d, tagged=rs.tagged).text(),
                "paper_label": d.paper_label,
                "vertices": [v.name for v in d.vertices],
            }
        )
    if cfg.format == "json":
        _emit_json(catalog, out)
        return EXIT_OK
    rows = [["label", "vertices", "mult", "coupling", "coefficient", "integrand"]]
    for c in catalog:
        rows.append([c["paper_label"], "·".join(c["vertices"]), str(c["multiplicity"]), c["coupling"],
                     c["coefficient"], c["integrand"]])
    _table(rows, out)
    return EXIT_OK


def cmd_compare(cfg: CliConfig, args, out) -> int:
    rows = compare_rules(args.order)
    if cfg.format == "json":
        _emit_json(
            [
                {
                    "rules": r.rules.name,
                    "I": str(r.eps_square_delta),
                    "I1R": str(r.i1r),
                    "I2": str(r.i2),
                    "residual": str(r.residual),
                    "pass": r.passed,
                }
                for r in rows
            ],
            out,
        )
    else:
        table = [["rules", "I", "I1R", "I2", "I1R + 4 I2 + 7/(32ω)", "result"]]
        for r in rows:
            table.append([r.rules.name, str(r.eps_square_delta), str(r.i1r), str(r.i2), str(r.residual),
                          "pass" if r.passed else "fail"])
        _table(table, out)
    return EXIT_OK


def cmd_oracle(cfg: CliConfig, args, out) -> int:
    from .oracle import check_table, mollified_delta_check

    entries = check_table(args.omega)
    rungs = mollified_delta_check(args.sigma)
    ok = all(e.abs_error < args.tol for e in entries)
    if cfg.format == "json":
        _emit_json(
            {
                "omega": str(args.omega),
                "tolerance": args.tol,
                "entries": [e.to_json() for e in entries],
                "mollifier": [vars(r) for r in rungs],
                "pass": ok,
            },
            out,
        )
    else:
        rows = [["integral", "exact", "numeric", "|error|", "tail bound"]]
        for e in entries:
            rows.append([e.integrand, f"{e.exact:.15g}", f"{e.numeric:.15g}", f"{e.abs_error:.2e}",
                         f"{e.truncation_bound:.2e}"])
        _table(rows, out)
        print(file=out)
        rows = [["σ", "∫δσ²/δσ(0)", "∫εσ²δσ"]]
        for r in rungs:
            rows.append([f"{r.sigma:.3g}", f"{r.delta_square_ratio:.12f}", f"{r.eps_square_delta:.12f}"])
        _table(rows, out)
        print("PASS" if ok else "FAIL", file=out)
    return EXIT_OK if ok else EXIT_FAIL


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    cfg = CliConfig(
        subcommand=args.subcommand,
        rules=getattr(args, "rules", "paper"),
        format=args.format,
        omega=getattr(args, "omega", None) if args.subcommand != "oracle" else None,
        a=getattr(args, "a", None),
        trace=getattr(args, "trace", False),
    )
    try:
        if args.subcommand == "verify":
            return cmd_verify(cfg, args, out)
        if args.subcommand == "integral":
            return cmd_integral(cfg, args, out, err)
        if args.subcommand == "diagrams":
            return cmd_diagrams(cfg, args, out)
        if args.subcommand == "compare-rules":
            return cmd_compare(cfg, args, out)
        return cmd_oracle(cfg, args, out)
    except UnsupportedOrderError as exc:
        print(f"distcalc: {exc}", file=err)
        return EXIT_USAGE
    except ReductionError as exc:
        print(f"distcalc: {type(exc).__name__}: {exc}", file=err)
        return EXIT_FAIL


def main() -> None:
    sys.exit(run())
