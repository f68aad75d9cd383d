"""End-to-end check that the ground-state energy does not move under x = f(q)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import integrals
from .reduce import ALL_RULES, PAPER_RULES, Reducer, ReductionError, RuleSet, reduce_to_value
from .value import D2, DELTA0, DELTA_AT_ORIGIN, OMEGA, ZERO, Value
from .wick import Diagram, TransformSpec, diagram_to_expr, expand_action, generate_diagrams


def sector_name(key: tuple[int, int]) -> str:
    d0, d2 = key
    if key == (0, 0):
        return "finite"
    parts = []
    if d0:
        parts.append("delta0" if d0 == 1 else f"delta0^{d0}")
    if d2:
        parts.append("D2" if d2 == 1 else f"D2^{d2}")
    return "*".join(parts)


@dataclass
class DiagramResult:
    diagram: Diagram
    integrand: str
    value: Value
    contribution: Value

    @property
    def label(self) -> str:
        return self.diagram.paper_label


@dataclass
class VerificationReport:
    order: int
    rules: RuleSet
    diagrams: list[DiagramResult]
    total: Value
    sectors: dict[str, Value]
    final_sectors: dict[str, Value]
    max_depth: int = 0

    @property
    def residual(self) -> Value:
        return self.total.finalize()

    @property
    def sector_pass(self) -> dict[str, bool]:
        # δ(0)² must cancel before δ² = δ(0)δ is used; everything else after
        out = {"delta0^2 (before δ²=δ(0)δ)": self.sectors.get("delta0^2", ZERO).is_zero()}
        out.update({k: v.is_zero() for k, v in self.final_sectors.items()})
        return out

    @property
    def passed(self) -> bool:
        return all(self.sector_pass.values()) and self.residual.is_zero()

    @property
    def a_dependent(self) -> bool:
        """Whether individual diagrams depend on a (the total must not)."""
        return any(d.contribution.depends_on_a() for d in self.diagrams)

    @property
    def total_depends_on_a(self) -> bool:
        return self.total.depends_on_a()

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "rules": self.rules.name,
            "I": str(self.rules.eps_square_delta),
            "diagrams": [
                {
                    "label": d.label,
                    "multiplicity": d.diagram.multiplicity,
                    "coefficient": str(d.diagram.coefficient),
                    "integrand": d.integrand,
                    "value": str(d.value),
                    "contribution": str(d.contribution),
                }
                for d in self.diagrams
            ],
            "total": str(self.total),
            "sectors": {k: str(v) for k, v in self.sectors.items()},
            "final_sectors": {k: str(v) for k, v in self.final_sectors.items()},
            "residual": str(self.residual),
            "a_dependent_diagrams": self.a_dependent,
            "a_dependent_total": self.total_depends_on_a,
            "pass": self.passed,
        }


def _sectors(v: Value) -> dict[str, Value]:
    out = {sector_name(k): s for k, s in v.sectors().items()}
    out.setdefault("finite", ZERO)
    return out


def evaluate_diagrams(order: int, rs: RuleSet, spec: TransformSpec | None = None) -> tuple[list[DiagramResult], int]:
    vertices = expand_action(spec or TransformSpec.standard())
    reducer = Reducer(rs)
    out = []
    for d in generate_diagrams(vertices, order):
        e = diagram_to_expr(d, tagged=rs.tagged)
        try:
            v = reducer.value(e)
        except ReductionError as exc:
            raise type(exc)(f"diagram {d.paper_label} ({e.text()}): {exc}") from exc
        out.append(DiagramResult(d, e.text(), v, d.coefficient * v))
    return out, reducer.max_depth_reached


def verify_order(order: int, rs: RuleSet = PAPER_RULES, spec: TransformSpec | None = None) -> VerificationReport:
    results, depth = evaluate_diagrams(order, rs, spec)
    total = ZERO
    for r in results:
        total = total + r.contribution
    return VerificationReport(
        order=order,
        rules=rs,
        diagrams=results,
        total=total,
        sectors=_sectors(total),
        final_sectors=_sectors(total.finalize()),
        max_depth=depth,
    )


def class_sums(results: list[DiagramResult]) -> dict[str, Value]:
    out: dict[str, Value] = {}
    for r in results:
        k = r.diagram.klass
        out[k] = out.get(k, ZERO) + r.contribution
    return out


# -- reference formulas in terms of Δ(0), δ(0) and ∫δ² -----------------------

_D0 = DELTA_AT_ORIGIN
_PROP2 = Value.monomial(Fraction(1, 4), omega=-3)  # ∫Δ²


@dataclass(frozen=True)
class SingularIntegrals:
    i1r: Value
    i2: Value

    @property
    def combination(self) -> Value:
        return self.i1r + self.i2 * 4

    @property
    def residual(self) -> Value:
        """I1R + 4 I2 + 7/(32ω); zero exactly when coordinate independence holds."""
        return self.combination + Value.monomial(Fraction(7, 32), omega=-1)


def singular_integrals(rs: RuleSet) -> SingularIntegrals:
    return SingularIntegrals(
        reduce_to_value(integrals.watermelon_i1_regular(rs.tagged), rs),
        reduce_to_value(integrals.watermelon_i2(rs.tagged), rs),
    )


def expected_local_sum() -> Value:
    return (DELTA0 * 3 - OMEGA**2 * _D0 * Fraction(2, 3)) * _D0**2


def expected_jacobian_bubbles() -> Value:
    return DELTA0 * _D0**2 * 2 + DELTA0**2 * _PROP2


def expected_all_bubbles() -> Value:
    return -D2 * _D0**2


def expected_watermelons(s: SingularIntegrals) -> Value:
    return -D2 * _D0**2 * 2 - s.combination * 2 - OMEGA**2 * _D0**3 * Fraction(17, 6)


def expected_total(s: SingularIntegrals) -> Value:
    return (DELTA0 - D2) * _D0**2 * 3 - s.combination * 2 - OMEGA**2 * _D0**3 * Fraction(7, 2)


@dataclass
class IdentityCheck:
    name: str
    engine: Value
    expected: Value

    @property
    def holds(self) -> bool:
        return self.engine == self.expected


def intermediate_identities(rs: RuleSet = PAPER_RULES) -> list[IdentityCheck]:
    """Class-by-class sums of the second-order diagrams against closed forms."""
    results, _ = evaluate_diagrams(2, rs)
    sums = class_sums(results)
    s = singular_integrals(rs)
    total = ZERO
    for v in sums.values():
        total = total + v
    return [
        IdentityCheck("di4: local diagrams", sums["f2"], expected_local_sum()),
        IdentityCheck("di2: Jacobian bubbles", sums["f3"], expected_jacobian_bubbles()),
        IdentityCheck("di3: all bubbles", sums["f3"] + sums["f4"], expected_all_bubbles()),
        IdentityCheck("ai5: watermelons", sums["f5"], expected_watermelons(s)),
        IdentityCheck("all: second order", total, expected_total(s)),
    ]


@dataclass
class RuleComparison:
    rules: RuleSet
    eps_square_delta: Fraction
    i1r: Value
    i2: Value
    residual: Value
    passed: bool


def compare_rules(order: int = 2) -> list[RuleComparison]:
    out = []
    for rs in ALL_RULES:
        s = singular_integrals(rs)
        report = verify_order(order, rs)
        out.append(RuleComparison(rs, rs.eps_square_delta, s.i1r, s.i2, s.residual, report.passed))
    return out
