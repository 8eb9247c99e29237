"""SI unit expressions: parsing, dimensional reduction and model checks.

Grammar: ``atom (("*" | "/") atom)*`` where each atom may carry ``^<int>``.
Operators associate to the left, so ``a/b*c`` is ``(a/b)*c``. Angles (rad,
sr) and ``percent`` are dimensionless; ``celsius`` reduces to temperature.
No conversions are performed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Mapping

from hrim.model import (
    ComponentModel,
    Finding,
    TypeRef,
    error,
    schema_fields,
)

DIMENSIONLESS = "dimensionless"

BASE_DIMENSIONS = ("length", "mass", "time", "current", "temperature", "amount", "luminous")


@dataclass(frozen=True)
class Dimension:
    length: int = 0
    mass: int = 0
    time: int = 0
    current: int = 0
    temperature: int = 0
    amount: int = 0
    luminous: int = 0

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(getattr(self, n) for n in BASE_DIMENSIONS)

    @classmethod
    def from_tuple(cls, values) -> "Dimension":
        return cls(*values)

    def __add__(self, other: "Dimension") -> "Dimension":
        return Dimension.from_tuple(a + b for a, b in zip(self.as_tuple(), other.as_tuple()))

    def __sub__(self, other: "Dimension") -> "Dimension":
        return Dimension.from_tuple(a - b for a, b in zip(self.as_tuple(), other.as_tuple()))

    def scale(self, k: int) -> "Dimension":
        return Dimension.from_tuple(a * k for a in self.as_tuple())

    @property
    def is_dimensionless(self) -> bool:
        return not any(self.as_tuple())

    def __str__(self) -> str:
        symbols = ("L", "M", "T", "I", "Θ", "N", "J")
        parts = [s if e == 1 else f"{s}^{e}" for s, e in zip(symbols, self.as_tuple()) if e]
        return "·".join(parts) or "1"


def _dim(**exps: int) -> Dimension:
    return Dimension(**exps)


# order here is also the canonical rendering order
REGISTRY: Mapping[str, Dimension] = {
    "m": _dim(length=1),
    "kg": _dim(mass=1),
    "s": _dim(time=1),
    "A": _dim(current=1),
    "K": _dim(temperature=1),
    "celsius": _dim(temperature=1),
    "mol": _dim(amount=1),
    "cd": _dim(luminous=1),
    "rad": _dim(),
    "sr": _dim(),
    "Hz": _dim(time=-1),
    "N": _dim(mass=1, length=1, time=-2),
    "Pa": _dim(mass=1, length=-1, time=-2),
    "J": _dim(mass=1, length=2, time=-2),
    "W": _dim(mass=1, length=2, time=-3),
    "V": _dim(mass=1, length=2, time=-3, current=-1),
    "ohm": _dim(mass=1, length=2, time=-3, current=-2),
    "C": _dim(time=1, current=1),
    "T": _dim(mass=1, time=-2, current=-1),
    "lm": _dim(luminous=1),
    "lx": _dim(luminous=1, length=-2),
    "percent": _dim(),
}
_ORDER = {name: i for i, name in enumerate(REGISTRY)}


class UnitError(ValueError):
    code = "E_UNIT"


class UnknownAtom(UnitError):
    code = "E_UNKNOWN_UNIT"


class MalformedExpression(UnitError):
    code = "E_MALFORMED_UNIT"


@dataclass(frozen=True)
class UnitExpr:
    """A product of registry atoms with nonzero integer exponents.

    Atoms are kept in registry order, so ``N*m`` and ``m*N`` are the same
    value. The empty product is ``dimensionless``.
    """

    atoms: tuple[tuple[str, int], ...] = ()

    @classmethod
    def of(cls, exponents: Mapping[str, int]) -> "UnitExpr":
        for atom in exponents:
            if atom not in REGISTRY:
                raise UnknownAtom(f"unknown unit {atom!r}")
        items = sorted(((a, e) for a, e in exponents.items() if e), key=lambda kv: _ORDER[kv[0]])
        return cls(tuple(items))

    @property
    def exponents(self) -> dict[str, int]:
        return dict(self.atoms)

    def __mul__(self, other: "UnitExpr") -> "UnitExpr":
        merged = self.exponents
        for atom, exp in other.atoms:
            merged[atom] = merged.get(atom, 0) + exp
        return UnitExpr.of(merged)

    def __truediv__(self, other: "UnitExpr") -> "UnitExpr":
        return self * UnitExpr(tuple((a, -e) for a, e in other.atoms))

    def __str__(self) -> str:
        return render_unit(self)


def _power(atom: str, exp: int) -> str:
    return atom if exp == 1 else f"{atom}^{exp}"


def render_unit(u: UnitExpr) -> str:
    if not u.atoms:
        return DIMENSIONLESS
    num = [(a, e) for a, e in u.atoms if e > 0]
    den = [(a, -e) for a, e in u.atoms if e < 0]
    if not num:
        return "*".join(_power(a, -e) for a, e in den)
    text = "*".join(_power(a, e) for a, e in num)
    return text + "".join("/" + _power(a, e) for a, e in den)


_TOKEN_RE = re.compile(r"\s*(?:(?P<atom>[A-Za-z]+)|(?P<op>[*/^])|(?P<int>-?[0-9]+))")


def _tokens(text: str) -> Iterator[tuple[str, str]]:
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            raise MalformedExpression(f"unexpected character {text[pos]!r} in {text!r}")
        pos = m.end()
        kind = m.lastgroup
        yield kind, m.group(kind)


def parse_unit(text: str) -> UnitExpr:
    if not isinstance(text, str) or not text.strip():
        raise MalformedExpression("empty unit expression")
    if text.strip() == DIMENSIONLESS:
        return UnitExpr()
    toks = list(_tokens(text))
    exponents: dict[str, int] = {}
    i = 0
    sign = 1
    while True:
        if i >= len(toks) or toks[i][0] != "atom":
            raise MalformedExpression(f"expected a unit atom in {text!r}")
        atom = toks[i][1]
        if atom == DIMENSIONLESS:
            raise MalformedExpression("'dimensionless' cannot be combined with other units")
        if atom not in REGISTRY:
            raise UnknownAtom(f"unknown unit {atom!r}")
        i += 1
        exp = 1
        if i < len(toks) and toks[i] == ("op", "^"):
            if i + 1 >= len(toks) or toks[i + 1][0] != "int":
                raise MalformedExpression(f"'^' must be followed by an integer in {text!r}")
            exp = int(toks[i + 1][1])
            if exp == 0:
                raise MalformedExpression("zero exponent")
            i += 2
        exponents[atom] = exponents.get(atom, 0) + sign * exp
        if i == len(toks):
            break
        kind, val = toks[i]
        if kind != "op" or val not in "*/":
            raise MalformedExpression(f"expected '*' or '/' in {text!r}")
        sign = 1 if val == "*" else -1
        i += 1
    return UnitExpr.of(exponents)


def dimension_of(u: UnitExpr) -> Dimension:
    total = Dimension()
    for atom, exp in u.atoms:
        total = total + REGISTRY[atom].scale(exp)
    return total


def _check_unit(subject: str, type_text: str, unit, span) -> Iterator[Finding]:
    try:
        numeric = TypeRef.parse(type_text).is_numeric
    except ValueError:
        return
    if unit is None:
        if numeric:
            yield error("E_MISSING_UNIT", subject, f"numeric {type_text} needs a unit", span)
        return
    try:
        parsed = parse_unit(unit)
    except UnitError as exc:
        yield error(exc.code, subject, str(exc), span)
        return
    if not numeric and parsed.atoms:
        yield error("E_UNIT_NOT_DIMENSIONLESS", subject,
                    f"{type_text} values are dimensionless, not {unit!r}", span)


def check_units(model: ComponentModel) -> list[Finding]:
    """One finding per numeric field or parameter with a missing or bad unit."""
    findings: list[Finding] = []
    for e in model.elements:
        if e.is_parameter and e.param_type is not None:
            findings.extend(_check_unit(e.name, e.param_type, e.unit, e.span))
    for schema in model.schemas:
        for f in schema_fields(schema):
            findings.extend(_check_unit(f.name, f.field_type, f.unit, f.span))
    return findings
