"""Render, parse and lint the nine HRIM name patterns.

Device names may contain underscores (``rotary_servo``), so the delimiter
alone cannot split a name like ``hrim_actuator_rotary_servo_a0b1_c2d3``.
Identity tokens are therefore fixed at four lowercase hex characters and
peeled off from the right; the kind is the first segment after ``hrim_``
and whatever is left is the device name.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, fields
from enum import Enum
from typing import Optional

from hrim.model import HEX4_RE, PASCAL_RE, PRIMITIVE_TYPES, SNAKE_RE, DeviceKind, Finding, error

_PARAM_TYPE_RE = re.compile(r"(?P<base>[a-z][a-z0-9]*)(?:\[[0-9]*\])?")
_PARAM_VALUE_RE = re.compile(r'[^"\\\x00-\x1f\x7f]*')
_PARAM_TAG_RE = re.compile(r'param name="([^"]*)" type="([^"]*)" value="([^"]*)"')
_KINDS = {k.value: k for k in DeviceKind}


class NamePattern(str, Enum):
    PACKAGE = "package"
    NODE = "node"
    TOPIC = "topic"
    MESSAGE_FILE = "message_file"
    GENERIC_MESSAGE_FILE = "generic_message_file"
    SERVICE_PATH = "service_path"
    SERVICE_FILE = "service_file"
    ACTION_FILE = "action_file"
    PARAMETER_TAG = "parameter_tag"

    def __str__(self) -> str:
        return self.value


class NamingError(ValueError):
    code = "E_NAMING"


class MissingPart(NamingError):
    code = "E_MISSING_PART"


class MalformedToken(NamingError):
    code = "E_MALFORMED_TOKEN"


class NoMatch(NamingError):
    code = "E_NO_MATCH"


class UnknownKind(NamingError):
    code = "E_UNKNOWN_KIND"


class AmbiguousName(NamingError):
    """Never raised for well-formed patterns; seeing it means a parser bug."""

    code = "E_AMBIGUOUS_NAME"


@dataclass(frozen=True)
class NameParts:
    device_kind: Optional[DeviceKind] = None
    device_name: Optional[str] = None
    vendor_id: Optional[str] = None
    product_id: Optional[str] = None
    instance_id: Optional[str] = None
    topic_name: Optional[str] = None
    message_name: Optional[str] = None
    service_name: Optional[str] = None
    action_name: Optional[str] = None
    parameter_name: Optional[str] = None
    param_type: Optional[str] = None
    param_value: Optional[str] = None


# (prefix parts, identity parts, leaf part, leaf validator kind)
_DEVICE_ID = ("device_kind", "device_name")
REQUIRED_PARTS: dict[NamePattern, tuple[str, ...]] = {
    NamePattern.PACKAGE: _DEVICE_ID + ("vendor_id", "product_id"),
    NamePattern.NODE: _DEVICE_ID + ("instance_id",),
    NamePattern.TOPIC: _DEVICE_ID + ("instance_id", "topic_name"),
    NamePattern.MESSAGE_FILE: _DEVICE_ID + ("message_name",),
    NamePattern.GENERIC_MESSAGE_FILE: ("message_name",),
    NamePattern.SERVICE_PATH: _DEVICE_ID + ("instance_id", "service_name"),
    NamePattern.SERVICE_FILE: _DEVICE_ID + ("service_name",),
    NamePattern.ACTION_FILE: _DEVICE_ID + ("action_name",),
    NamePattern.PARAMETER_TAG: ("parameter_name", "param_type", "param_value"),
}

_PART_CHECKS = {
    "device_name": SNAKE_RE,
    "vendor_id": HEX4_RE,
    "product_id": HEX4_RE,
    "instance_id": HEX4_RE,
    "topic_name": SNAKE_RE,
    "parameter_name": SNAKE_RE,
    "param_value": _PARAM_VALUE_RE,
}
# service/message/action names are file stems in file patterns, snake paths otherwise
_STEM_PATTERNS = {NamePattern.MESSAGE_FILE, NamePattern.GENERIC_MESSAGE_FILE,
                  NamePattern.SERVICE_FILE, NamePattern.ACTION_FILE}


def _check_param_type(text: str) -> bool:
    m = _PARAM_TYPE_RE.fullmatch(text)
    return m is not None and m.group("base") in PRIMITIVE_TYPES


def _check_part(pattern: NamePattern, part: str, value: object) -> None:
    if part == "device_kind":
        if isinstance(value, DeviceKind):
            return
        if isinstance(value, str) and value in _KINDS:
            return
        raise UnknownKind(f"{value!r} is not a device kind")
    if not isinstance(value, str):
        raise MalformedToken(f"{part} must be a string, got {value!r}")
    if part == "param_type":
        ok = _check_param_type(value)
    elif part in ("message_name", "service_name", "action_name"):
        regex = PASCAL_RE if pattern in _STEM_PATTERNS else SNAKE_RE
        ok = regex.fullmatch(value) is not None
    else:
        ok = _PART_CHECKS[part].fullmatch(value) is not None
    if not ok:
        raise MalformedToken(f"{part} {value!r} is malformed")


def render(pattern: NamePattern, parts: NameParts) -> str:
    pattern = NamePattern(pattern)
    for part in REQUIRED_PARTS[pattern]:
        value = getattr(parts, part)
        if value is None:
            raise MissingPart(f"{pattern} needs {part}")
        _check_part(pattern, part, value)

    p = parts
    if pattern is NamePattern.GENERIC_MESSAGE_FILE:
        return f"hrim_generic_msgs/msg/{p.message_name}.msg"
    if pattern is NamePattern.PARAMETER_TAG:
        return f'param name="{p.parameter_name}" type="{p.param_type}" value="{p.param_value}"'

    stem = f"hrim_{DeviceKind(p.device_kind).value}_{p.device_name}"
    if pattern is NamePattern.PACKAGE:
        return f"{stem}_{p.vendor_id}_{p.product_id}"
    if pattern is NamePattern.NODE:
        return f"{stem}_{p.instance_id}"
    if pattern is NamePattern.TOPIC:
        return f"{stem}_{p.instance_id}/{p.topic_name}"
    if pattern is NamePattern.SERVICE_PATH:
        return f"{stem}_{p.instance_id}/{p.service_name}"
    if pattern is NamePattern.MESSAGE_FILE:
        return f"{stem}_msgs/msg/{p.message_name}.msg"
    if pattern is NamePattern.SERVICE_FILE:
        return f"{stem}_srvs/srv/{p.service_name}.srv"
    return f"{stem}_action/{p.action_name}.action"


def _split_device(head: str, n_identity: int) -> dict[str, object]:
    """Split ``hrim_<kind>_<name>[_<hex4>]*`` into its parts."""
    if not head.startswith("hrim_"):
        if head[:5].lower() == "hrim_":
            raise MalformedToken(f"prefix must be lowercase 'hrim_', got {head[:5]!r}")
        raise NoMatch(f"{head!r} does not start with 'hrim_'")
    segments = head[5:].split("_")
    kind = segments[0]
    if kind not in _KINDS:
        if SNAKE_RE.fullmatch(kind):
            raise UnknownKind(f"{kind!r} is not one of {', '.join(_KINDS)}")
        raise MalformedToken(f"device kind {kind!r} is malformed")
    rest = segments[1:]
    if len(rest) < n_identity + 1:
        raise NoMatch(f"{head!r} has too few segments")
    identity = rest[len(rest) - n_identity:] if n_identity else []
    for token in identity:
        if not HEX4_RE.fullmatch(token):
            raise NoMatch(f"identity token {token!r} is not 4 lowercase hex chars")
    name = "_".join(rest[: len(rest) - n_identity])
    if not SNAKE_RE.fullmatch(name):
        raise MalformedToken(f"device name {name!r} is not snake_case")
    return {"device_kind": _KINDS[kind], "device_name": name, "identity": identity}


def _split_suffix(text: str, suffix: str) -> str:
    if not text.endswith(suffix):
        raise NoMatch(f"{text!r} does not end with {suffix!r}")
    return text[: -len(suffix)]


def _leaf(pattern: NamePattern, part: str, value: str) -> str:
    _check_part(pattern, part, value)
    return value


def parse(pattern: NamePattern, text: str) -> NameParts:
    pattern = NamePattern(pattern)
    if not isinstance(text, str):
        raise NoMatch("expected a string")

    if pattern is NamePattern.PARAMETER_TAG:
        m = _PARAM_TAG_RE.fullmatch(text)
        if m is None:
            raise NoMatch(f"{text!r} is not a parameter tag")
        name, ptype, value = m.groups()
        return NameParts(
            parameter_name=_leaf(pattern, "parameter_name", name),
            param_type=_leaf(pattern, "param_type", ptype),
            param_value=_leaf(pattern, "param_value", value),
        )

    if pattern is NamePattern.GENERIC_MESSAGE_FILE:
        stem = _split_suffix(text, ".msg")
        prefix = "hrim_generic_msgs/msg/"
        if not stem.startswith(prefix):
            if stem[: len(prefix)].lower() == prefix:
                raise MalformedToken("prefix must be lowercase")
            raise NoMatch(f"{text!r} is not under {prefix!r}")
        return NameParts(message_name=_leaf(pattern, "message_name", stem[len(prefix):]))

    if pattern in (NamePattern.PACKAGE, NamePattern.NODE):
        if "/" in text:
            raise NoMatch(f"{text!r} must not contain '/'")
        n = 2 if pattern is NamePattern.PACKAGE else 1
        d = _split_device(text, n)
        if pattern is NamePattern.PACKAGE:
            vendor, product = d["identity"]
            return NameParts(d["device_kind"], d["device_name"], vendor_id=vendor, product_id=product)
        return NameParts(d["device_kind"], d["device_name"], instance_id=d["identity"][0])

    if pattern in (NamePattern.TOPIC, NamePattern.SERVICE_PATH):
        head, sep, leaf = text.partition("/")
        if not sep or "/" in leaf:
            raise NoMatch(f"{text!r} must be '<node>/<name>'")
        d = _split_device(head, 1)
        leaf_part = "topic_name" if pattern is NamePattern.TOPIC else "service_name"
        return NameParts(d["device_kind"], d["device_name"], instance_id=d["identity"][0],
                         **{leaf_part: _leaf(pattern, leaf_part, leaf)})

    layout = {
        NamePattern.MESSAGE_FILE: ("_msgs", "msg", ".msg", "message_name"),
        NamePattern.SERVICE_FILE: ("_srvs", "srv", ".srv", "service_name"),
        NamePattern.ACTION_FILE: ("_action", None, ".action", "action_name"),
    }
    pkg_suffix, subdir, ext, leaf_part = layout[pattern]
    segments = _split_suffix(text, ext).split("/")
    expected = 3 if subdir else 2
    if len(segments) != expected or (subdir and segments[1] != subdir):
        raise NoMatch(f"{text!r} does not follow the {pattern} layout")
    package = _split_suffix(segments[0], pkg_suffix)
    d = _split_device(package, 0)
    return NameParts(d["device_kind"], d["device_name"],
                     **{leaf_part: _leaf(pattern, leaf_part, segments[-1])})


def validate(pattern: NamePattern, text: str) -> tuple[bool, list[Finding]]:
    try:
        parse(pattern, text)
    except NamingError as exc:
        return False, [error(exc.code, str(text), str(exc))]
    return True, []


def parts_for(pattern: NamePattern, parts: NameParts) -> NameParts:
    """Drop every field the pattern does not use."""
    keep = REQUIRED_PARTS[NamePattern(pattern)]
    return NameParts(**{f.name: getattr(parts, f.name) if f.name in keep else None
                        for f in fields(NameParts)})
