"""Deterministic in-process publish/subscribe simulation of HRIM modules.

Time is virtual: one tick is 10 ms and only ``advance`` moves the clock.
Requests and probe attachments made while the clock reads ``t`` are served
at tick ``t`` when the bus next advances; ``advance(n)`` then processes
ticks ``t+1 .. t+n``. Continuous publishers fire on ticks divisible by
their rate, so a window of ``n`` ticks holds ``n // rate`` records.

Records are totally ordered by ``(tick, spawn index, per-module sequence)``.
"""

from __future__ import annotations

import hashlib
import json
import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

from hrim.catalog import BUILTIN_MODELS, HRIM_VERSION
from hrim.conformance import interchangeable
from hrim.emitter import element_path
from hrim.model import (
    ComponentModel,
    DeviceKind,
    Direction,
    ElementKind,
    Identity,
    InvalidIdentity,
    InvalidModel,
    MessageSchema,
    ModuleDescriptor,
    TypeRef,
    validate_model,
)
from hrim.naming import NameParts, NamePattern, render

TICK_MS = 10
CORE_RATE = 10
DEFAULT_RATE = 5
ERASED = "****"
ID_REQUEST = "id/request"
IDENTITY_FIELDS = ("vendor_id", "product_id", "instance_id")

_CONTINUOUS_CORE = ("power", "status")
_GATED = ("simulation3d", "simulationurdf")

# plausible value ranges for synthesized numeric fields, keyed by unit text
_RANGES: Mapping[str, tuple[float, float]] = {
    "rad": (-math.pi, math.pi),
    "rad/s": (-10.0, 10.0),
    "rad/s^2": (-50.0, 50.0),
    "N*m": (-5.0, 5.0),
    "V": (0.0, 48.0),
    "A": (0.0, 5.0),
    "W": (0.0, 240.0),
    "celsius": (-20.0, 85.0),
    "percent": (0.0, 100.0),
    "s": (0.0, 86400.0),
    "Hz": (0.0, 48000.0),
    "dimensionless": (0.0, 4096.0),
}
_INT_BOUNDS = {
    "int8": (-2**7, 2**7 - 1), "int16": (-2**15, 2**15 - 1),
    "int32": (-2**31, 2**31 - 1), "int64": (-2**63, 2**63 - 1),
    "uint8": (0, 2**8 - 1), "uint16": (0, 2**16 - 1),
    "uint32": (0, 2**32 - 1), "uint64": (0, 2**64 - 1),
}


class Policy(str, Enum):
    ON_REQUEST = "on_request"
    CONTINUOUS = "continuous"
    CONSUMER_GATED = "consumer_gated"
    SINK = "sink"


@dataclass(frozen=True)
class TopicPolicy:
    policy: Policy
    rate: Optional[int] = None


class SimError(Exception):
    pass


class DuplicateIdentity(SimError):
    pass


class UnknownTopic(SimError, KeyError):
    pass


class NotInterchangeable(SimError):
    pass


class ScriptError(SimError):
    def __init__(self, line: int, col: int, message: str) -> None:
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col
        self.message = message


@dataclass(frozen=True)
class BusRecord:
    tick: int
    path: str
    publisher: str
    schema: str
    payload: Mapping[str, object] = field(compare=False)
    spawn_index: int = 0
    seq: int = 0

    @property
    def order_key(self) -> tuple[int, int, int]:
        return (self.tick, self.spawn_index, self.seq)

    @property
    def payload_json(self) -> str:
        return json.dumps(self.payload, separators=(",", ":"))

    @property
    def payload_hash(self) -> str:
        return hashlib.sha256(self.payload_json.encode()).hexdigest()[:16]

    def trace_line(self) -> str:
        return f"{self.tick} {self.path} {self.schema} {self.payload_hash}"


class Probe:
    """A consumer attached to one topic path; collects what it receives."""

    def __init__(self, path: str) -> None:
        self.path = path
        self.received: list[BusRecord] = []


def _unit_hash(seed: int, *parts: object) -> int:
    key = "\x1f".join(str(p) for p in (seed, *parts)).encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "big")


class SimModule:
    def __init__(self, bus: "Bus", index: int, model: ComponentModel, identity: Identity,
                 names: Sequence[str], rates: Mapping[str, int]) -> None:
        self.bus = bus
        self.index = index
        self.model = model
        self.identity = identity
        self.node = render(NamePattern.NODE, NameParts(
            device_kind=model.kind, device_name=model.device_name, instance_id=identity.instance_id))
        self.policies: dict[str, TopicPolicy] = {}
        for name in names:
            e = model.element(name)
            if e.element_kind is not ElementKind.TOPIC:
                continue
            if e.direction is Direction.SUBSCRIBED:
                self.policies[name] = TopicPolicy(Policy.SINK)
            elif name == "id":
                self.policies[name] = TopicPolicy(Policy.ON_REQUEST)
            elif name in _GATED:
                self.policies[name] = TopicPolicy(Policy.CONSUMER_GATED)
            else:
                default = CORE_RATE if name in _CONTINUOUS_CORE else DEFAULT_RATE
                rate = rates.get(name, default)
                if rate <= 0:
                    raise ValueError(f"rate for {name!r} must be positive")
                self.policies[name] = TopicPolicy(Policy.CONTINUOUS, rate)
        self.outbound: deque[str] = deque()
        self.sinks: dict[str, list[Mapping[str, object]]] = {
            t: [] for t, p in self.policies.items() if p.policy is Policy.SINK}
        self._seq = 0
        self._published: dict[str, int] = {}

    def path(self, topic: str) -> str:
        return element_path(self.model, self.identity, topic)

    def policy(self, topic: str) -> TopicPolicy:
        try:
            return self.policies[topic]
        except KeyError:
            raise UnknownTopic(f"{self.node} has no topic {topic!r}") from None

    def publish(self, topic: str, tick: int) -> BusRecord:
        element = self.model.element(topic)
        count = self._published.get(topic, 0)
        self._published[topic] = count + 1
        schema = self.model.resolve(element.schema_ref)
        payload = self._synthesize(schema, topic, count, prefix="")
        record = BusRecord(tick, self.path(topic), self.node, schema.name, payload, self.index, self._seq)
        self._seq += 1
        return record

    # -- payload synthesis --------------------------------------------------

    def _string(self, topic: str, name: str) -> str:
        if topic == "id":
            if name == "device_name":
                return self.model.device_name
            if name in IDENTITY_FIELDS:
                return getattr(self.identity, name)
            if name == "hrim_version":
                return HRIM_VERSION
        return f"{self.node}/{topic}/{name}"

    def _scalar(self, schema: MessageSchema, base: str, unit: Optional[str],
                topic: str, key: str, seq: int):
        h = _unit_hash(self.bus.seed, topic, key, seq)
        if base == "bool":
            return bool(h & 1)
        if base in ("string", "char"):
            return self._string(topic, key.rsplit(".", 1)[-1].split("[")[0])
        if base == "byte":
            return h & 0xFF
        lo, hi = _RANGES.get(unit or "dimensionless", (0.0, 1.0))
        frac = h / 2**64
        if base in ("float32", "float64"):
            return round(lo + frac * (hi - lo), 6)
        name = key.rsplit(".", 1)[-1]
        if topic == "id" and name == "device_kind":
            return list(DeviceKind).index(self.model.kind)
        codes = [c.value for c in schema.constants if c.const_type == base]
        if codes and unit in (None, "dimensionless"):
            return codes[h % len(codes)]
        imin, imax = _INT_BOUNDS[base]
        value = int(lo + frac * (hi - lo))
        return max(imin, min(imax, value))

    def _synthesize(self, schema: MessageSchema, topic: str, seq: int, prefix: str) -> dict:
        out: dict[str, object] = {}
        for f in schema.fields:
            ref = TypeRef.parse(f.field_type)
            key = prefix + f.name
            nested = None if ref.is_primitive else self.model.resolve(ref.base)
            if not ref.array:
                if nested is not None:
                    out[f.name] = self._synthesize(nested, topic, seq, key + ".")
                else:
                    out[f.name] = self._scalar(schema, ref.base, f.unit, topic, key, seq)
                continue
            if ref.base == "byte":
                length = ref.size if ref.size is not None else 8
                digest = hashlib.blake2b(
                    f"{self.bus.seed}\x1f{topic}\x1f{key}\x1f{seq}".encode(), digest_size=64).digest()
                out[f.name] = digest[:length].hex()
                continue
            n = ref.size if ref.size is not None else 1
            items = []
            for i in range(n):
                k = f"{key}[{i}]"
                if nested is not None:
                    items.append(self._synthesize(nested, topic, seq, k + "."))
                else:
                    items.append(self._scalar(schema, ref.base, f.unit, topic, k, seq))
            out[f.name] = items
        return out


class Bus:
    def __init__(self, seed: int = 0) -> None:
        self.seed = seed
        self.now = 0
        self.modules: list[SimModule] = []
        self.records: list[BusRecord] = []
        self.probes: list[Probe] = []
        self._pending_sends: deque[tuple[str, Mapping[str, object]]] = deque()
        self._busy = False

    # -- setup --------------------------------------------------------------

    def spawn(self, model: ComponentModel, identity: Optional[Identity] = None,
              descriptor: Optional[ModuleDescriptor] = None,
              rates: Optional[Mapping[str, int]] = None) -> SimModule:
        """Instantiate a module; with a descriptor only its claimed topics exist."""
        errors = [f for f in validate_model(model) if f.is_error]
        if errors:
            raise InvalidModel(errors)
        if descriptor is not None:
            identity = identity or descriptor.identity
            names = [e.name for e in model.elements if descriptor.element(e.name) is not None]
        else:
            names = [e.name for e in model.elements]
        if identity is None or identity.instance_id is None:
            raise InvalidIdentity("spawning needs an identity with an instance_id")
        if any(m.identity.instance_id == identity.instance_id for m in self.modules):
            raise DuplicateIdentity(f"instance {identity.instance_id} is already on the bus")
        module = SimModule(self, len(self.modules), model, identity, names, dict(rates or {}))
        self.modules.append(module)
        return module

    def module(self, instance_id: str) -> SimModule:
        for m in self.modules:
            if m.identity.instance_id == instance_id:
                return m
        raise KeyError(f"no module with instance {instance_id!r}")

    # -- interactions -------------------------------------------------------

    def request_id(self, instance_id: str) -> None:
        module = self.module(instance_id)
        if module.policy("id").policy is not Policy.ON_REQUEST:
            raise UnknownTopic(f"{module.node} does not serve id requests")
        module.outbound.append("id")

    def probe(self, instance_id: str, topic: str) -> Probe:
        module = self.module(instance_id)
        policy = module.policy(topic)
        probe = Probe(module.path(topic))
        self.probes.append(probe)
        if policy.policy is Policy.CONSUMER_GATED:
            module.outbound.append(topic)
        return probe

    def attach_simulator(self, instance_id: str) -> list[Probe]:
        """Connect a simulation framework: probes both simulation topics."""
        return [self.probe(instance_id, t) for t in _GATED]

    def send(self, path: str, payload: Mapping[str, object]) -> None:
        """Queue a message for a subscribed topic; delivered on the next tick.

        A message on the reserved ``<node>/id/request`` path is an id request.
        """
        for m in self.modules:
            if path == f"{m.node}/{ID_REQUEST}":
                self.request_id(m.identity.instance_id)
                return
        self._pending_sends.append((path, payload))

    # -- time ---------------------------------------------------------------

    def _emit(self, record: BusRecord, out: list[BusRecord]) -> None:
        out.append(record)
        for probe in self.probes:
            if probe.path == record.path:
                probe.received.append(record)

    def _deliver_sends(self) -> None:
        while self._pending_sends:
            path, payload = self._pending_sends.popleft()
            for m in self.modules:
                for topic, sink in m.sinks.items():
                    if m.path(topic) == path:
                        sink.append(payload)

    def advance(self, ticks: int) -> list[BusRecord]:
        if ticks < 0:
            raise ValueError("ticks must be >= 0")
        if self._busy:
            raise RuntimeError("Bus.advance is not reentrant")
        self._busy = True
        try:
            out: list[BusRecord] = []
            for m in self.modules:
                while m.outbound:
                    self._emit(m.publish(m.outbound.popleft(), self.now), out)
            for _ in range(ticks):
                self.now += 1
                for m in self.modules:
                    for topic, p in m.policies.items():
                        if p.policy is Policy.CONTINUOUS and self.now % p.rate == 0:
                            self._emit(m.publish(topic, self.now), out)
                self._deliver_sends()
            out.sort(key=lambda r: r.order_key)
            self.records.extend(out)
            return out
        finally:
            self._busy = False

    def trace(self) -> list[BusRecord]:
        return sorted(self.records, key=lambda r: r.order_key)

    def trace_text(self) -> str:
        return "".join(r.trace_line() + "\n" for r in self.trace())


# --- scripts -----------------------------------------------------------------


@dataclass(frozen=True)
class Directive:
    op: str
    args: tuple[str, ...]
    line: int


_ARITY = {"spawn": 4, "probe": 1, "request-id": 1, "advance": 1}


def parse_script(text: str) -> list[Directive]:
    directives = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        words = line.split()
        if not words:
            continue
        op, args = words[0], tuple(words[1:])
        col = raw.index(op) + 1
        if op not in _ARITY:
            raise ScriptError(lineno, col, f"unknown directive {op!r}")
        if len(args) != _ARITY[op]:
            raise ScriptError(lineno, col, f"{op} takes {_ARITY[op]} argument(s), got {len(args)}")
        if op == "advance" and not args[0].isdigit():
            raise ScriptError(lineno, col, f"advance needs a non-negative integer, got {args[0]!r}")
        if op == "probe" and "/" not in args[0]:
            raise ScriptError(lineno, col, "probe target must be <instance>/<topic>")
        directives.append(Directive(op, args, lineno))
    return directives


ModelResolver = Callable[[str], ComponentModel]


def default_resolver(base_dir: Union[str, Path, None] = None) -> ModelResolver:
    """Resolve ``spawn`` model names: builtin catalog names, else ``.hrim`` paths."""
    from hrim.modelc import load_model

    def resolve(name: str) -> ComponentModel:
        if name in BUILTIN_MODELS:
            return BUILTIN_MODELS[name]()
        path = Path(name)
        if not path.is_absolute() and base_dir is not None:
            path = Path(base_dir) / path
        return load_model(path)

    return resolve


def run_directives(bus: Bus, directives: Iterable[Directive],
                   resolver: Optional[ModelResolver] = None) -> Bus:
    resolver = resolver or default_resolver()
    for d in directives:
        try:
            if d.op == "spawn":
                model_name, vendor, product, instance = d.args
                bus.spawn(resolver(model_name), Identity(vendor, product, instance))
            elif d.op == "probe":
                instance, topic = d.args[0].split("/", 1)
                bus.probe(instance, topic)
            elif d.op == "request-id":
                bus.request_id(d.args[0])
            else:
                bus.advance(int(d.args[0]))
        except (SimError, KeyError, ValueError) as exc:
            if isinstance(exc, ScriptError):
                raise
            message = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
            raise ScriptError(d.line, 1, f"{d.op}: {message}") from exc
    return bus


def run_script(text: str, seed: int = 0, resolver: Optional[ModelResolver] = None) -> Bus:
    return run_directives(Bus(seed), parse_script(text), resolver)


# --- vendor swap -------------------------------------------------------------

DUT = "*"

DEFAULT_SWAP_SCRIPT = """\
request-id *
advance 7
request-id *
advance 43
probe */simulation3d
probe */simulationurdf
advance 100
"""


def _erase(value, node: str, placeholder: str, key: str = ""):
    if isinstance(value, dict):
        return {k: _erase(v, node, placeholder, k) for k, v in value.items()}
    if isinstance(value, list):
        return [_erase(v, node, placeholder, key) for v in value]
    if isinstance(value, str):
        if key in IDENTITY_FIELDS:
            return ERASED
        return value.replace(node, placeholder)
    return value


def erase_identity(record: BusRecord, module: SimModule) -> str:
    """Trace line with every trace of vendor/product/instance identity removed."""
    placeholder = module.node[: -len(module.identity.instance_id)] + ERASED
    payload = _erase(dict(record.payload), module.node, placeholder)
    erased = BusRecord(record.tick, record.path.replace(module.node, placeholder), placeholder,
                       record.schema, payload, record.spawn_index, record.seq)
    return erased.trace_line()


def _swap_run(script: Sequence[Directive], descriptor: ModuleDescriptor,
              model: ComponentModel, seed: int) -> list[str]:
    bus = Bus(seed)
    module = bus.spawn(model, descriptor=descriptor)
    instance = descriptor.identity.instance_id
    bound = []
    for d in script:
        if d.op == "spawn":
            raise ScriptError(d.line, 1, "swap scripts cannot spawn; the module under test is implicit")
        args = tuple(a.replace(DUT, instance, 1) if a.split("/")[0] == DUT else a for a in d.args)
        bound.append(Directive(d.op, args, d.line))
    run_directives(bus, bound)
    bus.advance(0)
    return [erase_identity(r, module) for r in bus.trace()]


def swap_and_verify(script: Union[str, Sequence[Directive]], a: ModuleDescriptor,
                    b: ModuleDescriptor, model: ComponentModel, seed: int = 0) -> bool:
    """Run the same probe script against a and b and compare erased traces.

    ``*`` in the script stands for the instance of the module under test.
    """
    verdict = interchangeable(a, b, model)
    if not verdict.verdict:
        raise NotInterchangeable(verdict.explanation)
    directives = parse_script(script) if isinstance(script, str) else list(script)
    return _swap_run(directives, a, model, seed) == _swap_run(directives, b, model, seed)


def swap_traces(script: Union[str, Sequence[Directive]], a: ModuleDescriptor,
                b: ModuleDescriptor, model: ComponentModel, seed: int = 0) -> tuple[list[str], list[str]]:
    directives = parse_script(script) if isinstance(script, str) else list(script)
    return _swap_run(directives, a, model, seed), _swap_run(directives, b, model, seed)
