"""Exact value ring: rational polynomials in ω, ω⁻¹, δ(0), D2 and a.

Every final answer of the engine lives here. A monomial is the exponent tuple
``(omega, delta0, D2, a)``; only ω may carry a negative exponent. Δ(0) never
appears as a symbol, it is substituted by ``1/(2ω)`` wherever it arises.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterator, Mapping, Union

Mono = tuple[int, int, int, int]
Number = Union[int, Fraction]

_ONE: Mono = (0, 0, 0, 0)
_SYMBOLS = ("ω", "δ(0)", "D2", "a")
_JSON_KEYS = ("omega", "delta0", "D2", "a")


def _as_fraction(x: Number | str) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise TypeError(f"exact rational expected, got {type(x).__name__}")


class Value:
    """Immutable element of Q[ω, ω⁻¹, δ(0), D2, a]."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Mono, Number] | None = None):
        clean: dict[Mono, Fraction] = {}
        for mono, coeff in (terms or {}).items():
            if len(mono) != 4:
                raise ValueError(f"monomial must have 4 exponents: {mono!r}")
            if min(mono[1:]) < 0:
                raise ValueError(f"only ω may carry a negative exponent: {mono!r}")
            c = _as_fraction(coeff)
            if c:
                clean[tuple(int(e) for e in mono)] = c  # type: ignore[index]
        self._terms = clean
        self._hash: int | None = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def const(cls, c: Number | str) -> Value:
        return cls({_ONE: _as_fraction(c)})

    @classmethod
    def monomial(
        cls, coeff: Number | str = 1, *, omega: int = 0, delta0: int = 0, D2: int = 0, a: int = 0
    ) -> Value:
        return cls({(omega, delta0, D2, a): _as_fraction(coeff)})

    # -- inspection -------------------------------------------------------
    @property
    def terms(self) -> dict[Mono, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Mono, Fraction]]:
        return iter(sorted(self._terms.items(), key=lambda kv: _order_key(kv[0])))

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(m == _ONE for m in self._terms)

    def constant(self) -> Fraction:
        """The value as a plain rational; raises if any symbol is present."""
        if not self.is_constant():
            raise ValueError(f"not a rational constant: {self}")
        return self._terms.get(_ONE, Fraction(0))

    def depends_on_a(self) -> bool:
        return any(m[3] for m in self._terms)

    def omega_exponents(self) -> set[int]:
        return {m[0] for m in self._terms}

    # -- ring operations --------------------------------------------------
    def _coerce(self, other: object) -> Value | None:
        if isinstance(other, Value):
            return other
        if isinstance(other, (int, Fraction)):
            return Value.const(other)
        return None

    def __add__(self, other: object) -> Value:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self._terms)
        for m, c in o._terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return Value(out)

    __radd__ = __add__

    def __neg__(self) -> Value:
        return Value({m: -c for m, c in self._terms.items()})

    def __sub__(self, other: object) -> Value:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: object) -> Value:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other: object) -> Value:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out: dict[Mono, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in o._terms.items():
                m = (m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2], m1[3] + m2[3])
                out[m] = out.get(m, Fraction(0)) + c1 * c2
        return Value(out)

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> Value:
        """Division by a nonzero rational or by a single monomial."""
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("division by zero")
        if len(o._terms) != 1:
            raise ValueError(f"can only divide by a monomial, got {o}")
        (m, c), = o._terms.items()
        if any(m[1:]):
            raise ValueError(f"cannot invert δ(0), D2 or a: {o}")
        return self * Value({(-m[0], 0, 0, 0): 1 / c})

    def __pow__(self, n: int) -> Value:
        if n < 0:
            return Value.const(1) / self ** (-n)
        out = Value.const(1)
        for _ in range(n):
            out = out * self
        return out

    # -- comparison -------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._terms == o._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._terms)

    # -- substitution -----------------------------------------------------
    def subs(
        self,
        *,
        omega: Number | None = None,
        delta0: Number | None = None,
        D2: Number | None = None,
        a: Number | None = None,
    ) -> Value:
        """Substitute rationals for any subset of the symbols."""
        point = (omega, delta0, D2, a)
        if omega is not None and _as_fraction(omega) == 0 and any(m[0] < 0 for m in self._terms):
            raise ZeroDivisionError("division by zero: ω = 0 with negative ω-exponent")
        out: dict[Mono, Fraction] = {}
        for m, c in self._terms.items():
            kept = list(m)
            for i, x in enumerate(point):
                if x is not None and m[i]:
                    c = c * _as_fraction(x) ** m[i]
                    kept[i] = 0
            key = tuple(kept)
            out[key] = out.get(key, Fraction(0)) + c  # type: ignore[index]
        return Value(out)

    def finalize(self) -> Value:
        """Apply δ² = δ(0)δ, i.e. replace the formal ∫δ² by δ(0)."""
        out: dict[Mono, Fraction] = {}
        for (w, d0, d2, a), c in self._terms.items():
            key = (w, d0 + d2, 0, a)
            out[key] = out.get(key, Fraction(0)) + c
        return Value(out)

    def sectors(self) -> dict[tuple[int, int], Value]:
        """Split by (δ(0)-power, D2-power)."""
        out: dict[tuple[int, int], dict[Mono, Fraction]] = {}
        for m, c in self._terms.items():
            out.setdefault((m[1], m[2]), {})[m] = c
        return {k: Value(v) for k, v in sorted(out.items())}

    # -- text / json ------------------------------------------------------
    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for i, (m, c) in enumerate(self.items()):
            body = _format_term(m, abs(c))
            if i == 0:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append((" - " if c < 0 else " + ") + body)
        return "".join(parts)

    def __repr__(self) -> str:
        return f"Value({str(self)!r})"

    @classmethod
    def parse(cls, text: str) -> Value:
        text = text.strip()
        if text == "0":
            return cls()
        pieces = re.split(r" ([+-]) ", text)
        signs = ["+"] + pieces[1::2]
        out = cls()
        for sign, chunk in zip(signs, pieces[0::2]):
            term = _parse_term(chunk.strip())
            out = out + (term if sign == "+" else -term)
        return out

    def to_json(self) -> list[dict]:
        rows = []
        for m, c in self.items():
            row: dict = {"coeff": str(c)}
            row.update({k: e for k, e in zip(_JSON_KEYS, m) if e})
            rows.append(row)
        return rows

    @classmethod
    def from_json(cls, rows: list[dict]) -> Value:
        out: dict[Mono, Fraction] = {}
        for row in rows:
            m = tuple(int(row.get(k, 0)) for k in _JSON_KEYS)
            out[m] = out.get(m, Fraction(0)) + Fraction(row["coeff"])  # type: ignore[index]
        return cls(out)


def _order_key(m: Mono) -> tuple:
    return (m[1], m[2], m[3], -m[0])


def _format_term(m: Mono, c: Fraction) -> str:
    syms = [sym if e == 1 else f"{sym}^{e}" for sym, e in zip(_SYMBOLS, m) if e]
    if syms and abs(c) == 1:
        return ("-" if c < 0 else "") + " · ".join(syms)
    return " · ".join([str(c), *syms])


_FACTOR_RE = re.compile(r"^(ω|δ\(0\)|D2|a)(?:\^(-?\d+))?$")


def _parse_term(chunk: str) -> Value:
    head, *rest = [p.strip() for p in chunk.split("·")]
    sign = 1
    if head.startswith("-") and _FACTOR_RE.match(head[1:]):
        sign, head = -1, head[1:]
    if _FACTOR_RE.match(head):
        rest.insert(0, head)
        head = str(sign)
    exps = [0, 0, 0, 0]
    for item in rest:
        match = _FACTOR_RE.match(item)
        if not match:
            raise ValueError(f"bad factor {item!r} in {chunk!r}")
        exps[_SYMBOLS.index(match.group(1))] += int(match.group(2) or 1)
    return Value({tuple(exps): Fraction(head)})  # type: ignore[dict-item]


def value_eval(v: Value, omega: Number, delta0: Number, D2: Number, a: Number) -> Fraction:
    """Substitute every symbol and return the exact rational."""
    return v.subs(omega=omega, delta0=delta0, D2=D2, a=a).constant()


ZERO = Value()
ONE = Value.const(1)
OMEGA = Value.monomial(omega=1)
DELTA0 = Value.monomial(delta0=1)
D2 = Value.monomial(D2=1)
A = Value.monomial(a=1)
DELTA_AT_ORIGIN = Value.monomial(Fraction(1, 2), omega=-1)
