"""Core HRIM domain types and the structural model validator.

Everything here is an immutable value. Source spans ride along on parsed
values for diagnostics but never take part in equality, so a model parsed
from text compares equal to the same model built in code.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Mapping, Optional, Union

Literal = Union[bool, int, float, str]

SNAKE_RE = re.compile(r"[a-z][a-z0-9]*(?:_[a-z0-9]+)*")
PASCAL_RE = re.compile(r"[A-Z][A-Za-z0-9]*")
UPPER_SNAKE_RE = re.compile(r"[A-Z][A-Z0-9]*(?:_[A-Z0-9]+)*")
HEX4_RE = re.compile(r"[0-9a-f]{4}")

INTEGER_TYPES = (
    "int8", "int16", "int32", "int64",
    "uint8", "uint16", "uint32", "uint64",
)
FLOAT_TYPES = ("float32", "float64")
NUMERIC_TYPES = frozenset(INTEGER_TYPES + FLOAT_TYPES)
PRIMITIVE_TYPES = frozenset(("bool", "byte", "char", "string") + INTEGER_TYPES + FLOAT_TYPES)

_TYPE_RE = re.compile(r"(?P<base>[A-Za-z][A-Za-z0-9_]*)(?:\[(?P<size>[0-9]*)\])?")


class DeviceKind(str, Enum):
    SENSOR = "sensor"
    ACTUATOR = "actuator"
    COMMUNICATION = "communication"
    COGNITION = "cognition"
    UI = "ui"
    POWER = "power"

    def __str__(self) -> str:
        return self.value


class Obligation(str, Enum):
    MANDATORY = "mandatory"
    OPTIONAL = "optional"

    def __str__(self) -> str:
        return self.value

    @property
    def label(self) -> str:
        return "M" if self is Obligation.MANDATORY else "O"


class ElementCategory(str, Enum):
    DEVICE_PURPOSE = "device_purpose"
    COMMON_REQUIREMENT = "common_requirement"
    ADDITIONAL_CAPABILITY = "additional_capability"
    OPTIONAL_HARDWARE = "optional_hardware"

    def __str__(self) -> str:
        return self.value

    @property
    def required_obligation(self) -> Obligation:
        if self in (ElementCategory.DEVICE_PURPOSE, ElementCategory.COMMON_REQUIREMENT):
            return Obligation.MANDATORY
        return Obligation.OPTIONAL


class ElementKind(str, Enum):
    TOPIC = "topic"
    SERVICE = "service"
    ACTION = "action"
    PARAMETER = "parameter"

    def __str__(self) -> str:
        return self.value


class Direction(str, Enum):
    PUBLISHED = "published"
    SUBSCRIBED = "subscribed"

    def __str__(self) -> str:
        return self.value


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Span:
    """1-based, inclusive start and exclusive end position in a source file."""

    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __str__(self) -> str:
        return f"{self.start_line}:{self.start_col}-{self.end_line}:{self.end_col}"

    def cover(self, other: Optional["Span"]) -> "Span":
        if other is None:
            return self
        return Span(self.start_line, self.start_col, other.end_line, other.end_col)


@dataclass(frozen=True)
class Finding:
    code: str
    severity: Severity
    subject: str
    message: str
    span: Optional[Span] = field(default=None, compare=False)

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR

    def __str__(self) -> str:
        return f"{self.severity} {self.code} {self.subject}: {self.message}"


def error(code: str, subject: str, message: str, span: Optional[Span] = None) -> Finding:
    return Finding(code, Severity.ERROR, subject, message, span)


def warning(code: str, subject: str, message: str, span: Optional[Span] = None) -> Finding:
    return Finding(code, Severity.WARNING, subject, message, span)


@dataclass(frozen=True)
class Identity:
    vendor_id: str
    product_id: str
    instance_id: Optional[str] = None

    def __post_init__(self) -> None:
        for label, token in (("vendor_id", self.vendor_id), ("product_id", self.product_id),
                             ("instance_id", self.instance_id)):
            if token is None and label == "instance_id":
                continue
            if not isinstance(token, str) or not HEX4_RE.fullmatch(token):
                raise InvalidIdentity(f"{label} must be 4 lowercase hex chars, got {token!r}")


class InvalidIdentity(ValueError):
    def __init__(self, message: str, span: Optional[Span] = None) -> None:
        super().__init__(message)
        self.span = span


class InvalidModel(ValueError):
    """Raised when an operation requires a model that passes validate_model."""

    def __init__(self, findings: list[Finding]) -> None:
        self.findings = findings
        lines = "; ".join(str(f) for f in findings[:3])
        super().__init__(f"invalid model: {lines}")


# --- field types -------------------------------------------------------------


@dataclass(frozen=True)
class TypeRef:
    base: str
    array: bool = False
    size: Optional[int] = None

    @classmethod
    def parse(cls, text: str) -> "TypeRef":
        m = _TYPE_RE.fullmatch(text)
        if m is None:
            raise ValueError(f"malformed type {text!r}")
        size = m.group("size")
        if size is None:
            return cls(m.group("base"))
        return cls(m.group("base"), True, int(size) if size else None)

    def __str__(self) -> str:
        if not self.array:
            return self.base
        return f"{self.base}[{'' if self.size is None else self.size}]"

    @property
    def is_primitive(self) -> bool:
        return self.base in PRIMITIVE_TYPES

    @property
    def is_numeric(self) -> bool:
        return self.base in NUMERIC_TYPES


def is_numeric_type(type_text: str) -> bool:
    try:
        return TypeRef.parse(type_text).is_numeric
    except ValueError:
        return False


@dataclass(frozen=True)
class FieldDef:
    name: str
    field_type: str
    unit: Optional[str] = None
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ConstantDef:
    name: str
    const_type: str
    value: Literal
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class MessageSchema:
    name: str
    fields: tuple[FieldDef, ...] = ()
    constants: tuple[ConstantDef, ...] = ()
    span: Optional[Span] = field(default=None, compare=False, repr=False)

    def sections(self) -> Iterator[tuple[str, tuple[FieldDef, ...]]]:
        yield "fields", self.fields


@dataclass(frozen=True)
class ServiceSchema:
    name: str
    request: tuple[FieldDef, ...] = ()
    response: tuple[FieldDef, ...] = ()
    span: Optional[Span] = field(default=None, compare=False, repr=False)

    def sections(self) -> Iterator[tuple[str, tuple[FieldDef, ...]]]:
        yield "request", self.request
        yield "response", self.response


@dataclass(frozen=True)
class ActionSchema:
    name: str
    goal: tuple[FieldDef, ...] = ()
    result: tuple[FieldDef, ...] = ()
    feedback: tuple[FieldDef, ...] = ()
    span: Optional[Span] = field(default=None, compare=False, repr=False)

    def sections(self) -> Iterator[tuple[str, tuple[FieldDef, ...]]]:
        yield "goal", self.goal
        yield "result", self.result
        yield "feedback", self.feedback


Schema = Union[MessageSchema, ServiceSchema, ActionSchema]

SCHEMA_FOR_ELEMENT = {
    ElementKind.TOPIC: MessageSchema,
    ElementKind.SERVICE: ServiceSchema,
    ElementKind.ACTION: ActionSchema,
}


def schema_fields(schema: Schema) -> Iterator[FieldDef]:
    for _, fields in schema.sections():
        yield from fields


# --- elements and models -----------------------------------------------------


@dataclass(frozen=True)
class InterfaceElement:
    element_kind: ElementKind
    name: str
    obligation: Obligation
    category: ElementCategory
    direction: Optional[Direction] = None
    schema_ref: Optional[str] = None
    param_type: Optional[str] = None
    unit: Optional[str] = None
    default_value: Optional[Literal] = None
    group: Optional[str] = None
    required_in_group: bool = False
    span: Optional[Span] = field(default=None, compare=False, repr=False)

    @property
    def is_parameter(self) -> bool:
        return self.element_kind is ElementKind.PARAMETER


@dataclass(frozen=True)
class OptionalGroup:
    name: str
    members: tuple[str, ...]
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ComponentModel:
    kind: DeviceKind
    device_name: str
    elements: tuple[InterfaceElement, ...]
    groups: tuple[OptionalGroup, ...] = ()
    schemas: tuple[Schema, ...] = ()
    span: Optional[Span] = field(default=None, compare=False, repr=False)

    def element(self, name: str) -> Optional[InterfaceElement]:
        for e in self.elements:
            if e.name == name:
                return e
        return None

    def group(self, name: str) -> Optional[OptionalGroup]:
        for g in self.groups:
            if g.name == name:
                return g
        return None

    def local_schema(self, name: str) -> Optional[Schema]:
        for s in self.schemas:
            if s.name == name:
                return s
        return None

    def resolve(self, name: str) -> Optional[Schema]:
        """Look a schema up locally, then among the builtin generic messages."""
        local = self.local_schema(name)
        if local is not None:
            return local
        from hrim.catalog import builtin_generics

        return builtin_generics().get(name)

    @property
    def schema_map(self) -> Mapping[str, Schema]:
        from hrim.catalog import builtin_generics

        resolved: dict[str, Schema] = dict(builtin_generics())
        resolved.update((s.name, s) for s in self.schemas)
        return resolved

    @property
    def specs_schema_name(self) -> str:
        return specs_schema_name(self.device_name)


def pascal_case(snake: str) -> str:
    return "".join(part[:1].upper() + part[1:] for part in snake.split("_"))


def specs_schema_name(device_name: str) -> str:
    return "Specs" + pascal_case(device_name)


# topic name -> generic schema, in canonical order; "specs" is per device
COMMON_TOPICS: tuple[tuple[str, Optional[str]], ...] = (
    ("id", "ID"),
    ("power", "Power"),
    ("status", "Status"),
    ("specs", None),
    ("simulation3d", "Simulation3D"),
    ("simulationurdf", "SimulationURDF"),
)
COMMON_TOPIC_NAMES = tuple(name for name, _ in COMMON_TOPICS)


def common_elements(device_name: str, span: Optional[Span] = None) -> tuple[InterfaceElement, ...]:
    """The six common-requirement topics every component model carries."""
    return tuple(
        InterfaceElement(
            element_kind=ElementKind.TOPIC,
            name=name,
            obligation=Obligation.MANDATORY,
            category=ElementCategory.COMMON_REQUIREMENT,
            direction=Direction.PUBLISHED,
            schema_ref=schema or specs_schema_name(device_name),
            span=span,
        )
        for name, schema in COMMON_TOPICS
    )


# --- validation --------------------------------------------------------------


def _check_element_shape(e: InterfaceElement) -> Iterator[Finding]:
    if e.element_kind is ElementKind.TOPIC and e.direction is None:
        yield error("E_MISSING_DIRECTION", e.name, "topic has no direction", e.span)
    if e.element_kind is not ElementKind.TOPIC and e.direction is not None:
        yield error("E_ELEMENT_SHAPE", e.name, f"{e.element_kind} cannot carry a direction", e.span)
    if e.is_parameter:
        if e.param_type is None or e.schema_ref is not None:
            yield error("E_ELEMENT_SHAPE", e.name, "parameter needs a type and no schema", e.span)
    else:
        if e.schema_ref is None or e.param_type is not None:
            yield error("E_ELEMENT_SHAPE", e.name, f"{e.element_kind} needs a schema and no type", e.span)
        if e.unit is not None or e.default_value is not None:
            yield error("E_ELEMENT_SHAPE", e.name, "only parameters carry unit/default", e.span)


def _check_schema(schema: Schema, model: ComponentModel) -> Iterator[Finding]:
    if not PASCAL_RE.fullmatch(schema.name):
        yield error("E_SCHEMA_NAME", schema.name, "schema name must be PascalCase", schema.span)
    for section, fields in schema.sections():
        seen: set[str] = set()
        for f in fields:
            if not SNAKE_RE.fullmatch(f.name):
                yield error("E_FIELD_NAME", f"{schema.name}.{f.name}",
                            "field name must be snake_case", f.span)
            if f.name in seen:
                yield error("E_DUPLICATE_FIELD", f"{schema.name}.{f.name}",
                            f"duplicate field in {section}", f.span)
            seen.add(f.name)
            try:
                ref = TypeRef.parse(f.field_type)
            except ValueError:
                yield error("E_UNRESOLVED_TYPE", f"{schema.name}.{f.name}",
                            f"malformed type {f.field_type!r}", f.span)
                continue
            if not ref.is_primitive and not isinstance(model.resolve(ref.base), MessageSchema):
                yield error("E_UNRESOLVED_TYPE", f"{schema.name}.{f.name}",
                            f"unknown field type {ref.base!r}", f.span)
    if isinstance(schema, MessageSchema):
        seen_c: set[str] = set()
        for c in schema.constants:
            if not UPPER_SNAKE_RE.fullmatch(c.name):
                yield error("E_CONSTANT_NAME", f"{schema.name}.{c.name}",
                            "constant name must be UPPER_SNAKE", c.span)
            if c.name in seen_c:
                yield error("E_DUPLICATE_CONSTANT", f"{schema.name}.{c.name}",
                            "duplicate constant", c.span)
            seen_c.add(c.name)
            if c.const_type not in PRIMITIVE_TYPES:
                yield error("E_CONSTANT_TYPE", f"{schema.name}.{c.name}",
                            "constants must have a primitive type", c.span)


def validate_model(model: ComponentModel) -> list[Finding]:
    """Check every structural invariant of a component model.

    Findings come out in a fixed order: per-element problems in declaration
    order, then group problems, then missing common requirements and device
    purpose, then schema problems in declaration order.
    """
    findings: list[Finding] = []
    if not SNAKE_RE.fullmatch(model.device_name):
        findings.append(error("E_DEVICE_NAME", model.device_name,
                              "device name must be snake_case", model.span))

    groups = {g.name: g for g in model.groups}
    seen: set[str] = set()
    for e in model.elements:
        if not SNAKE_RE.fullmatch(e.name):
            findings.append(error("E_ELEMENT_NAME", e.name, "element name must be snake_case", e.span))
        if e.name in seen:
            findings.append(error("E_DUPLICATE_ELEMENT", e.name, "element declared twice", e.span))
        seen.add(e.name)
        findings.extend(_check_element_shape(e))
        if e.obligation is not e.category.required_obligation:
            findings.append(error(
                "E_OBLIGATION_CATEGORY", e.name,
                f"{e.category} elements must be {e.category.required_obligation}", e.span))
        if e.group is not None:
            if e.category not in (ElementCategory.ADDITIONAL_CAPABILITY,
                                  ElementCategory.OPTIONAL_HARDWARE):
                findings.append(error("E_GROUP_CATEGORY", e.name,
                                      f"grouped element cannot be {e.category}", e.span))
            if e.group not in groups:
                findings.append(error("E_UNKNOWN_GROUP", e.name, f"no group {e.group!r}", e.span))
        elif e.required_in_group:
            findings.append(error("E_REQUIRES_OUTSIDE_GROUP", e.name,
                                  "required_in_group set on an ungrouped element", e.span))
        if e.schema_ref is not None:
            target = model.resolve(e.schema_ref)
            expected = SCHEMA_FOR_ELEMENT.get(e.element_kind)
            if target is None:
                findings.append(error("E_UNRESOLVED_SCHEMA", e.name,
                                      f"schema {e.schema_ref!r} is not defined", e.span))
            elif expected is not None and not isinstance(target, expected):
                findings.append(error("E_SCHEMA_KIND", e.name,
                                      f"{e.element_kind} cannot use {type(target).__name__} "
                                      f"{e.schema_ref!r}", e.span))

    positions = {e.name: i for i, e in enumerate(model.elements)}
    for g in model.groups:
        actual = tuple(e.name for e in model.elements if e.group == g.name)
        if not g.members:
            findings.append(error("E_EMPTY_GROUP", g.name, "group has no members", g.span))
        elif actual != g.members:
            findings.append(error("E_GROUP_MEMBERS", g.name,
                                  "group member list disagrees with element tags", g.span))
        else:
            idx = [positions[m] for m in g.members]
            if idx != list(range(idx[0], idx[0] + len(idx))):
                findings.append(error("E_GROUP_SPLIT", g.name,
                                      "group members must be declared contiguously", g.span))
    if len(groups) != len(model.groups):
        findings.append(error("E_DUPLICATE_GROUP", model.device_name, "group declared twice", model.span))

    for name, generic in COMMON_TOPICS:
        e = model.element(name)
        if e is None or e.category is not ElementCategory.COMMON_REQUIREMENT \
                or e.element_kind is not ElementKind.TOPIC:
            findings.append(error("E_MISSING_COMMON", name,
                                  f"common requirement topic {name!r} is missing", model.span))
            continue
        expected_schema = generic or model.specs_schema_name
        if e.schema_ref != expected_schema:
            findings.append(error("E_COMMON_SCHEMA", name,
                                  f"must use schema {expected_schema!r}", e.span))
        if e.direction is not Direction.PUBLISHED:
            findings.append(error("E_COMMON_DIRECTION", name, "must be published", e.span))

    if not any(e.category is ElementCategory.DEVICE_PURPOSE and not e.is_parameter
               for e in model.elements):
        findings.append(error("E_NO_DEVICE_PURPOSE", model.device_name,
                              "no topic, service or action defines the device purpose", model.span))

    seen_schemas: set[str] = set()
    for s in model.schemas:
        if s.name in seen_schemas:
            findings.append(error("E_DUPLICATE_SCHEMA", s.name, "schema declared twice", s.span))
        seen_schemas.add(s.name)
        findings.extend(_check_schema(s, model))
    findings.extend(_check_cycles(model))
    return findings


def _field_bases(schema: Schema) -> Iterator[str]:
    for f in schema_fields(schema):
        try:
            yield TypeRef.parse(f.field_type).base
        except ValueError:
            continue


def _check_cycles(model: ComponentModel) -> Iterator[Finding]:
    """A message that contains itself, directly or not, has no finite value."""
    local = {s.name: s for s in model.schemas}
    state: dict[str, int] = {}  # 1 = on the current path, 2 = finished

    def visit(name: str) -> bool:
        state[name] = 1
        for base in _field_bases(local[name]):
            if base not in local:
                continue
            if state.get(base) == 1 or (base not in state and visit(base)):
                return True
        state[name] = 2
        return False

    for s in model.schemas:
        if s.name not in state and visit(s.name):
            yield error("E_SCHEMA_CYCLE", s.name, "schema contains itself through its fields", s.span)


# --- concrete products -------------------------------------------------------


@dataclass(frozen=True)
class ClaimedElement:
    """One interface element a concrete product says it exposes."""

    element_kind: ElementKind
    name: str
    direction: Optional[Direction] = None
    schema_ref: Optional[str] = None
    param_type: Optional[str] = None
    unit: Optional[str] = None
    value: Optional[Literal] = None
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ModuleDescriptor:
    identity: Identity
    kind: DeviceKind
    device_name: str
    elements: tuple[ClaimedElement, ...]
    schemas: tuple[Schema, ...] = ()
    span: Optional[Span] = field(default=None, compare=False, repr=False)

    def element(self, name: str) -> Optional[ClaimedElement]:
        for e in self.elements:
            if e.name == name:
                return e
        return None

    def schema_body(self, name: Optional[str]) -> Optional[Schema]:
        """The claimed body for a schema name: literal first, then generic."""
        if name is None:
            return None
        for s in self.schemas:
            if s.name == name:
                return s
        from hrim.catalog import builtin_generics

        return builtin_generics().get(name)
