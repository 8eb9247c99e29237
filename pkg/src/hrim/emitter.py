"""Generate ``.msg``/``.srv``/``.action`` trees and the element manifest.

Line format inside interface files is ``<type> <name>``; numeric fields add
two spaces and ``# <unit>``; constants are ``<type> <NAME>=<value>``. Every
file ends with exactly one LF.
"""

from __future__ import annotations

import errno
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple, Optional, Union

from hrim import naming
from hrim.catalog import builtin_generics
from hrim.model import (
    ActionSchema,
    ComponentModel,
    ConstantDef,
    ElementKind,
    FieldDef,
    Identity,
    InvalidModel,
    Literal,
    MessageSchema,
    Schema,
    ServiceSchema,
    is_numeric_type,
    validate_model,
)
from hrim.naming import NameParts, NamePattern

MANIFEST_NAME = "manifest.txt"


class IdentityRequired(ValueError):
    pass


class UnknownGroup(ValueError):
    pass


class WouldOverwrite(FileExistsError):
    pass


class GeneratedFile(NamedTuple):
    path: str
    data: bytes


@dataclass(frozen=True)
class WriteSummary:
    files_written: int
    bytes: int


GeneratedTree = tuple[GeneratedFile, ...]


def _constant_value(value: Literal) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def constant_line(c: ConstantDef) -> str:
    return f"{c.const_type} {c.name}={_constant_value(c.value)}"


def field_line(f: FieldDef) -> str:
    line = f"{f.field_type} {f.name}"
    if is_numeric_type(f.field_type):
        line += f"  # {f.unit or 'dimensionless'}"
    return line


def render_schema(schema: Schema) -> str:
    if isinstance(schema, MessageSchema):
        lines = [constant_line(c) for c in schema.constants]
        lines += [field_line(f) for f in schema.fields]
    else:
        lines = []
        for i, (_, fields) in enumerate(schema.sections()):
            if i:
                lines.append("---")
            lines += [field_line(f) for f in fields]
    return "".join(line + "\n" for line in lines) or "\n"


def _device_parts(model: ComponentModel, **extra) -> NameParts:
    return NameParts(device_kind=model.kind, device_name=model.device_name, **extra)


def schema_path(model: ComponentModel, schema: Schema) -> str:
    if isinstance(schema, MessageSchema):
        return naming.render(NamePattern.MESSAGE_FILE, _device_parts(model, message_name=schema.name))
    if isinstance(schema, ServiceSchema):
        return naming.render(NamePattern.SERVICE_FILE, _device_parts(model, service_name=schema.name))
    return naming.render(NamePattern.ACTION_FILE, _device_parts(model, action_name=schema.name))


def element_path(model: ComponentModel, identity: Identity, name: str,
                 kind: ElementKind = ElementKind.TOPIC) -> str:
    """Runtime path of an element under the node ``hrim_<kind>_<name>_<instance>``."""
    if kind is ElementKind.SERVICE:
        return naming.render(NamePattern.SERVICE_PATH,
                             _device_parts(model, instance_id=identity.instance_id, service_name=name))
    return naming.render(NamePattern.TOPIC,
                         _device_parts(model, instance_id=identity.instance_id, topic_name=name))


def package_name(model: ComponentModel, identity: Identity) -> str:
    return naming.render(NamePattern.PACKAGE, _device_parts(
        model, vendor_id=identity.vendor_id, product_id=identity.product_id))


def manifest(model: ComponentModel, identity: Identity, without: Iterable[str] = ()) -> str:
    """One line per included element: ``<M|O> <kind> <path> <schema-or-type>``."""
    excluded = set(without)
    lines = []
    for e in model.elements:
        if e.group in excluded:
            continue
        path = element_path(model, identity, e.name, e.element_kind)
        lines.append(f"{e.obligation.label} {e.element_kind.value} {path} {e.schema_ref or e.param_type}")
    return "".join(line + "\n" for line in lines)


def emit(model: ComponentModel, identity: Optional[Identity],
         without: Iterable[str] = ()) -> GeneratedTree:
    errors = [f for f in validate_model(model) if f.is_error]
    if errors:
        raise InvalidModel(errors)
    if identity is None or identity.instance_id is None:
        raise IdentityRequired("generation needs vendor, product and instance identity")
    without = tuple(without)
    for g in without:
        if model.group(g) is None:
            raise UnknownGroup(f"model {model.device_name!r} has no group {g!r}")

    files: dict[str, bytes] = {}
    for schema in builtin_generics().values():
        path = naming.render(NamePattern.GENERIC_MESSAGE_FILE, NameParts(message_name=schema.name))
        files[path] = render_schema(schema).encode()
    for schema in model.schemas:
        files[schema_path(model, schema)] = render_schema(schema).encode()
    files[f"{package_name(model, identity)}/{MANIFEST_NAME}"] = \
        manifest(model, identity, without).encode()
    return tuple(GeneratedFile(p, files[p]) for p in sorted(files))


def write_tree(tree: GeneratedTree, out_dir: Union[str, Path], force: bool = False) -> WriteSummary:
    """Write every file of ``tree`` below ``out_dir``.

    Without ``force`` nothing is written if any target already exists.
    """
    out = Path(out_dir)
    if not force:
        clashes = [f.path for f in tree if (out / f.path).exists()]
        if clashes:
            raise WouldOverwrite(errno.EEXIST, f"{len(clashes)} target file(s) already exist",
                                 str(out / clashes[0]))
    total = 0
    for f in tree:
        target = out / f.path
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(f.data)
        total += len(f.data)
    return WriteSummary(len(tree), total)


def read_tree(root: Union[str, Path]) -> GeneratedTree:
    """Load a directory as a tree (paths relative, POSIX separators, sorted)."""
    root = Path(root)
    found = []
    for dirpath, _, filenames in os.walk(root):
        for name in filenames:
            full = Path(dirpath) / name
            found.append(GeneratedFile(full.relative_to(root).as_posix(), full.read_bytes()))
    return tuple(sorted(found))


def parse_interface_text(text: str) -> list[list[tuple[str, str]]]:
    """Minimal reader for generated interface files.

    Returns one list of ``(type, name)`` pairs per ``---``-separated section,
    constants included with their NAME.
    """
    sections: list[list[tuple[str, str]]] = [[]]
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "---":
            sections.append([])
            continue
        ftype, rest = line.split(" ", 1)
        sections[-1].append((ftype, rest.split("=", 1)[0].strip()))
    return sections
