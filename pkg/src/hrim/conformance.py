"""Check concrete module descriptors against component models."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterator, NamedTuple, Optional, Union

from hrim import naming
from hrim.model import (
    ClaimedElement,
    ComponentModel,
    ConstantDef,
    ElementKind,
    FieldDef,
    Finding,
    InterfaceElement,
    MessageSchema,
    ModuleDescriptor,
    Obligation,
    Schema,
    error,
    warning,
)
from hrim.modelc.lexer import SourceFile
from hrim.modelc.parser import parse_descriptor
from hrim.naming import NameParts, NamePattern
from hrim.units import UnitError, parse_unit

CONFORMANT = "conformant"
NONCONFORMANT = "nonconformant"


@dataclass(frozen=True)
class ConformanceReport:
    findings: tuple[Finding, ...]

    @property
    def verdict(self) -> str:
        return NONCONFORMANT if any(f.is_error for f in self.findings) else CONFORMANT

    @property
    def conformant(self) -> bool:
        return self.verdict == CONFORMANT

    def codes(self) -> list[tuple[str, str]]:
        return [(f.code, f.subject) for f in self.findings]

    def to_text(self) -> str:
        lines = [str(f) for f in self.findings] + [f"verdict: {self.verdict}"]
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "findings": [
                {"code": f.code, "severity": f.severity.value, "subject": f.subject,
                 "message": f.message}
                for f in self.findings
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def load_descriptor(path: Union[str, Path]) -> ModuleDescriptor:
    return parse_descriptor(SourceFile.read(path))


def _unit_key(unit: Optional[str]):
    if unit is None:
        return None
    try:
        return parse_unit(unit)
    except UnitError:
        return unit


def _field_key(f: FieldDef):
    return (f.name, f.field_type, _unit_key(f.unit))


def _constant_key(c: ConstantDef):
    return (c.name, c.const_type, c.value, type(c.value))


def schema_signature(schema: Optional[Schema]):
    """Structural, order-sensitive fingerprint used to compare schema bodies."""
    if schema is None:
        return None
    sections = tuple((title, tuple(_field_key(f) for f in fields)) for title, fields in schema.sections())
    constants = ()
    if isinstance(schema, MessageSchema):
        constants = tuple(_constant_key(c) for c in schema.constants)
    return (type(schema).__name__, schema.name, sections, constants)


def _diff_schema(expected: Schema, claimed: Optional[Schema]) -> Optional[str]:
    if claimed is None:
        return f"no body given for schema {expected.name!r}"
    if claimed.name != expected.name:
        return f"uses schema {claimed.name!r}, model requires {expected.name!r}"
    if type(claimed) is not type(expected):
        return f"{expected.name} is a {type(expected).__name__}, claimed {type(claimed).__name__}"
    for (title, want), (_, got) in zip(expected.sections(), claimed.sections()):
        for i in range(max(len(want), len(got))):
            w = want[i] if i < len(want) else None
            g = got[i] if i < len(got) else None
            if w is None:
                return f"{title} has extra field {g.name!r} at position {i}"
            if g is None:
                return f"{title} is missing field {w.name!r} at position {i}"
            if _field_key(w) != _field_key(g):
                return (f"{title} field {i} is '{g.field_type} {g.name} [{g.unit}]', "
                        f"expected '{w.field_type} {w.name} [{w.unit}]'")
    if schema_signature(claimed) != schema_signature(expected):
        return f"constants of {expected.name} differ"
    return None


def _element_findings(m: InterfaceElement, c: ClaimedElement, descriptor: ModuleDescriptor,
                      model: ComponentModel) -> Iterator[Finding]:
    if c.element_kind is not m.element_kind:
        yield error("E_SCHEMA_MISMATCH", m.name,
                    f"claimed as {c.element_kind}, model defines a {m.element_kind}", c.span)
        return
    if m.element_kind is ElementKind.TOPIC and c.direction is not m.direction:
        yield error("E_DIRECTION_MISMATCH", m.name,
                    f"claimed {c.direction}, model requires {m.direction}", c.span)
    if m.is_parameter:
        if c.param_type != m.param_type or _unit_key(c.unit) != _unit_key(m.unit):
            yield error("E_SCHEMA_MISMATCH", m.name,
                        f"parameter is '{c.param_type} [{c.unit}]', "
                        f"expected '{m.param_type} [{m.unit}]'", c.span)
        return
    problem = _diff_schema(model.resolve(m.schema_ref), descriptor.schema_body(c.schema_ref))
    if problem:
        yield error("E_SCHEMA_MISMATCH", m.name, problem, c.span)


def _naming_findings(descriptor: ModuleDescriptor, c: ClaimedElement) -> Iterator[Finding]:
    parts = NameParts(device_kind=descriptor.kind, device_name=descriptor.device_name,
                      instance_id=descriptor.identity.instance_id)
    try:
        if c.element_kind is ElementKind.SERVICE:
            path = naming.render(NamePattern.SERVICE_PATH, replace(parts, service_name=c.name))
        else:
            path = naming.render(NamePattern.TOPIC, replace(parts, topic_name=c.name))
        naming.parse(NamePattern.SERVICE_PATH if c.element_kind is ElementKind.SERVICE
                     else NamePattern.TOPIC, path)
        if c.element_kind is ElementKind.PARAMETER and c.value is not None:
            naming.render(NamePattern.PARAMETER_TAG, NameParts(
                parameter_name=c.name, param_type=c.param_type, param_value=_tag_value(c.value)))
    except naming.NamingError as exc:
        yield error("E_NAMING", c.name, str(exc), c.span)


def _tag_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return repr(value) if isinstance(value, float) else str(value)


def check(descriptor: ModuleDescriptor, model: ComponentModel) -> ConformanceReport:
    findings: list[Finding] = []
    if descriptor.kind is not model.kind or descriptor.device_name != model.device_name:
        findings.append(error(
            "E_KIND_MISMATCH", descriptor.device_name,
            f"descriptor is {descriptor.kind}/{descriptor.device_name}, "
            f"model is {model.kind}/{model.device_name}", descriptor.span))

    claimed = {c.name: c for c in descriptor.elements}
    checked_groups: set[str] = set()
    for m in model.elements:
        if m.group is not None and m.group not in checked_groups:
            checked_groups.add(m.group)
            group = model.group(m.group)
            present = [n for n in group.members if n in claimed]
            if present:
                missing = [n for n in group.members
                           if n not in claimed and model.element(n).required_in_group]
                if missing:
                    findings.append(error(
                        "E_GROUP_PARTIAL", group.name,
                        f"{', '.join(present)} present but required member(s) "
                        f"{', '.join(missing)} absent", descriptor.span))
        c = claimed.get(m.name)
        if c is None:
            if m.obligation is Obligation.MANDATORY:
                findings.append(error("E_MISSING_MANDATORY", m.name,
                                      f"mandatory {m.element_kind} {m.name!r} is not exposed",
                                      descriptor.span))
            continue
        findings.extend(_element_findings(m, c, descriptor, model))

    for c in descriptor.elements:
        findings.extend(_naming_findings(descriptor, c))
        if model.element(c.name) is None:
            findings.append(warning("W_UNKNOWN_ELEMENT", c.name,
                                    f"{c.element_kind} {c.name!r} is not part of the model", c.span))
    return ConformanceReport(tuple(findings))


class Interchangeability(NamedTuple):
    verdict: bool
    explanation: str

    def __bool__(self) -> bool:
        return self.verdict


def element_signature(c: ClaimedElement, descriptor: ModuleDescriptor):
    """What a consumer observes of an element; identity does not enter."""
    if c.element_kind is ElementKind.PARAMETER:
        body = (c.param_type, _unit_key(c.unit))
    else:
        body = schema_signature(descriptor.schema_body(c.schema_ref))
    return (c.element_kind, c.name, c.direction, body)


def interchangeable(a: ModuleDescriptor, b: ModuleDescriptor,
                    model: ComponentModel) -> Interchangeability:
    for label, d in (("a", a), ("b", b)):
        report = check(d, model)
        if not report.conformant:
            first = next(f for f in report.findings if f.is_error)
            return Interchangeability(False, f"descriptor {label} is not conformant: {first}")
    sig_a = {c.name: element_signature(c, a) for c in a.elements}
    sig_b = {c.name: element_signature(c, b) for c in b.elements}
    order = [e.name for e in model.elements]
    order += [c.name for c in a.elements if c.name not in order]
    order += [c.name for c in b.elements if c.name not in order]
    for name in order:
        sa, sb = sig_a.get(name), sig_b.get(name)
        if sa == sb:
            continue
        if sa is None:
            return Interchangeability(False, f"{name}: exposed by b only")
        if sb is None:
            return Interchangeability(False, f"{name}: exposed by a only")
        return Interchangeability(False, f"{name}: interfaces differ")
    return Interchangeability(True, "same interface; only identity differs")
