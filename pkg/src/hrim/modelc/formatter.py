"""Canonical text rendering of component models.

The canonical form is fully explicit: every element is written out with
one property per line (``@common`` is expanded), schemas follow the
elements, and indentation is two spaces per block level.
"""

from __future__ import annotations

from typing import Iterable, Optional

from hrim.model import (
    ActionSchema,
    ComponentModel,
    FieldDef,
    Identity,
    InterfaceElement,
    InvalidModel,
    Literal,
    MessageSchema,
    Schema,
    ServiceSchema,
    TypeRef,
    schema_fields,
    validate_model,
)

INDENT = "  "


def format_literal(value: Literal) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, int):
        return str(value)
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _quote(text: str) -> str:
    return format_literal(str(text))


def _element_lines(e: InterfaceElement, level: int) -> list[str]:
    pad = INDENT * level
    inner = INDENT * (level + 1)
    lines = [f"{pad}{e.element_kind.value} {e.name} {{",
             f"{inner}obligation: {e.obligation.value}",
             f"{inner}category: {e.category.value}"]
    if e.required_in_group:
        lines.append(f"{inner}requires: group")
    if e.direction is not None:
        lines.append(f"{inner}direction: {e.direction.value}")
    if e.schema_ref is not None:
        lines.append(f"{inner}schema: {e.schema_ref}")
    if e.param_type is not None:
        lines.append(f"{inner}type: {e.param_type}")
    if e.unit is not None:
        lines.append(f"{inner}unit {_quote(e.unit)}")
    if e.default_value is not None:
        lines.append(f"{inner}default: {format_literal(e.default_value)}")
    lines.append(f"{pad}}}")
    return lines


def _field_line(f: FieldDef, pad: str) -> str:
    line = f"{pad}field {f.name}: {f.field_type}"
    if f.unit is not None:
        line += f" unit {_quote(f.unit)}"
    return line


def _section_lines(title: str, fields: tuple[FieldDef, ...], level: int) -> list[str]:
    pad = INDENT * level
    return ([f"{pad}{title} {{"]
            + [_field_line(f, pad + INDENT) for f in fields]
            + [f"{pad}}}"])


def _schema_lines(s: Schema, level: int) -> list[str]:
    pad = INDENT * level
    inner = pad + INDENT
    if isinstance(s, MessageSchema):
        lines = [f"{pad}message {s.name} {{"]
        lines += [f"{inner}constant {c.name}: {c.const_type} = {format_literal(c.value)}"
                  for c in s.constants]
        lines += [_field_line(f, inner) for f in s.fields]
        return lines + [f"{pad}}}"]
    keyword = "srv" if isinstance(s, ServiceSchema) else "action_schema"
    lines = [f"{pad}{keyword} {s.name} {{"]
    for title, fields in s.sections():
        lines += _section_lines(title, fields, level + 1)
    return lines + [f"{pad}}}"]


def format_model(model: ComponentModel) -> str:
    errors = [f for f in validate_model(model) if f.is_error]
    if errors:
        raise InvalidModel(errors)
    lines = [f"model {model.device_name} {{", f"{INDENT}kind: {model.kind.value}"]
    emitted_groups: set[str] = set()
    for e in model.elements:
        if e.group is None:
            lines += _element_lines(e, 1)
            continue
        if e.group in emitted_groups:
            continue
        emitted_groups.add(e.group)
        lines.append(f"{INDENT}group {e.group} {{")
        for member in model.elements:
            if member.group == e.group:
                lines += _element_lines(member, 2)
        lines.append(f"{INDENT}}}")
    for s in model.schemas:
        lines += _schema_lines(s, 1)
    lines.append("}")
    return "\n".join(lines) + "\n"


def format_descriptor(model: ComponentModel, identity: Identity,
                      names: Optional[Iterable[str]] = None) -> str:
    """Descriptor text for a module that implements ``model`` faithfully.

    ``names`` restricts the claimed elements (default: all). Bodies of the
    model's local schemas used by claimed elements are included verbatim.
    """
    wanted = None if names is None else set(names)
    inner = INDENT * 2
    lines = [f"descriptor {model.device_name} {{", f"{INDENT}kind: {model.kind.value}",
             f"{INDENT}identity {{",
             f"{inner}vendor: {identity.vendor_id}",
             f"{inner}product: {identity.product_id}",
             f"{inner}instance: {identity.instance_id}",
             f"{INDENT}}}"]
    used: list[str] = []
    for e in model.elements:
        if wanted is not None and e.name not in wanted:
            continue
        lines.append(f"{INDENT}{e.element_kind.value} {e.name} {{")
        if e.direction is not None:
            lines.append(f"{inner}direction: {e.direction.value}")
        if e.schema_ref is not None:
            lines.append(f"{inner}schema: {e.schema_ref}")
            used.append(e.schema_ref)
        if e.param_type is not None:
            lines.append(f"{inner}type: {e.param_type}")
        if e.unit is not None:
            lines.append(f"{inner}unit {_quote(e.unit)}")
        if e.default_value is not None:
            lines.append(f"{inner}value: {format_literal(e.default_value)}")
        lines.append(f"{INDENT}}}")
    # nested field types pull in further local schemas
    pending = list(used)
    while pending:
        schema = model.local_schema(pending.pop())
        if schema is None:
            continue
        for f in schema_fields(schema):
            base = TypeRef.parse(f.field_type).base
            if base not in used:
                used.append(base)
                pending.append(base)
    for s in model.schemas:
        if s.name in used:
            lines += _schema_lines(s, 1)
    lines.append("}")
    return "\n".join(lines) + "\n"
