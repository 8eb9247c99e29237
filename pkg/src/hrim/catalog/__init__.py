"""Builtin generic messages and the reference component models.

Each reference model exists twice: as a constructor here and as a ``.hrim``
source file next to this module. The test-suite keeps the two in lockstep.
"""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path
from types import MappingProxyType
from typing import Callable, Mapping

from hrim.model import (
    ComponentModel,
    ConstantDef,
    DeviceKind,
    Direction,
    ElementCategory,
    ElementKind,
    FieldDef,
    InterfaceElement,
    MessageSchema,
    Obligation,
    OptionalGroup,
    common_elements,
)

CATALOG_DIR = Path(__file__).parent
FIXTURES_DIR = CATALOG_DIR / "fixtures"
GOLDEN_DIR = CATALOG_DIR / "golden"

HRIM_VERSION = "1.0.0"

F = FieldDef
_DIMLESS = "dimensionless"


@lru_cache(maxsize=None)
def builtin_generics() -> Mapping[str, MessageSchema]:
    """The five shared messages of the ``hrim_generic_msgs`` package."""
    schemas = [
        MessageSchema(
            "ID",
            fields=(
                F("device_kind", "uint8", _DIMLESS),
                F("device_name", "string"),
                F("vendor_id", "string"),
                F("product_id", "string"),
                F("instance_id", "string"),
                F("hrim_version", "string"),
            ),
            constants=tuple(
                ConstantDef(k.name, "uint8", i) for i, k in enumerate(DeviceKind)
            ),
        ),
        MessageSchema(
            "Power",
            fields=(
                F("voltage", "float64", "V"),
                F("current", "float64", "A"),
                F("power_consumption", "float64", "W"),
                F("source", "uint8", _DIMLESS),
            ),
            constants=(ConstantDef("SUPPLY", "uint8", 0), ConstantDef("POE", "uint8", 1)),
        ),
        MessageSchema(
            "Status",
            fields=(
                F("cpu_usage", "float32", "percent"),
                F("ram_usage", "float32", "percent"),
                F("uptime", "float64", "s"),
            ),
        ),
        MessageSchema("Simulation3D", fields=(F("format", "string"), F("payload", "byte[]"))),
        MessageSchema(
            "SimulationURDF",
            fields=(F("urdf_fragment", "string"), F("mesh_references", "string[]")),
        ),
    ]
    return MappingProxyType({s.name: s for s in schemas})


def _topic(name, schema, direction, category, obligation=None, group=None):
    return InterfaceElement(
        ElementKind.TOPIC, name,
        obligation or category.required_obligation, category,
        direction=direction, schema_ref=schema, group=group,
    )


def builtin_rotary_servo() -> ComponentModel:
    cap = ElementCategory.ADDITIONAL_CAPABILITY
    hw = ElementCategory.OPTIONAL_HARDWARE
    pub, sub = Direction.PUBLISHED, Direction.SUBSCRIBED
    group = "temperature_sensing"
    elements = common_elements("rotary_servo") + (
        _topic("goal", "GoalRotaryServo", sub, ElementCategory.DEVICE_PURPOSE),
        _topic("state", "StateRotaryServo", pub, cap),
        _topic("acceleration", "GoalAcceleration", sub, cap),
        _topic("temperature", "Temperature", pub, hw, group=group),
        InterfaceElement(ElementKind.PARAMETER, "min_temperature", Obligation.OPTIONAL, hw,
                         param_type="float64", unit="celsius", default_value=0.0,
                         group=group, required_in_group=True),
        InterfaceElement(ElementKind.PARAMETER, "max_temperature", Obligation.OPTIONAL, hw,
                         param_type="float64", unit="celsius", default_value=85.0,
                         group=group, required_in_group=True),
        _topic("reconfiguration", "Reconfiguration", pub, hw),
    )
    schemas = (
        MessageSchema("SpecsRotaryServo", fields=(
            F("rated_speed", "float64", "rad/s"),
            F("range_min", "float64", "rad"),
            F("range_max", "float64", "rad"),
            F("max_torque", "float64", "N*m"),
            F("temperature_range_min", "float64", "celsius"),
            F("temperature_range_max", "float64", "celsius"),
        )),
        MessageSchema("GoalRotaryServo", fields=(
            F("position", "float64", "rad"),
            F("velocity", "float64", "rad/s"),
            F("effort", "float64", "N*m"),
        )),
        MessageSchema(
            "StateRotaryServo",
            fields=(
                F("goal_reached", "bool"),
                F("position", "float64", "rad"),
                F("velocity", "float64", "rad/s"),
                F("effort", "float64", "N*m"),
                F("error_code", "uint8", _DIMLESS),
            ),
            constants=(
                ConstantDef("NO_ERROR", "uint8", 0),
                ConstantDef("OVERHEAT", "uint8", 1),
                ConstantDef("OVERLOAD", "uint8", 2),
                ConstantDef("OUT_OF_RANGE", "uint8", 3),
                ConstantDef("COMMUNICATION", "uint8", 4),
            ),
        ),
        MessageSchema("GoalAcceleration", fields=(F("acceleration", "float64", "rad/s^2"),)),
        MessageSchema("Temperature", fields=(F("temperature", "float64", "celsius"),)),
        MessageSchema("Reconfiguration", fields=(F("descriptor", "string"),)),
    )
    return ComponentModel(
        DeviceKind.ACTUATOR, "rotary_servo", elements,
        groups=(OptionalGroup(group, ("temperature", "min_temperature", "max_temperature")),),
        schemas=schemas,
    )


def builtin_camera() -> ComponentModel:
    elements = common_elements("camera") + (
        _topic("image", "Image", Direction.PUBLISHED, ElementCategory.DEVICE_PURPOSE),
        InterfaceElement(ElementKind.PARAMETER, "brightness", Obligation.OPTIONAL,
                         ElementCategory.ADDITIONAL_CAPABILITY,
                         param_type="float64", unit="percent", default_value=50.0),
        _topic("audio", "Audio", Direction.PUBLISHED, ElementCategory.OPTIONAL_HARDWARE,
               group="microphone"),
    )
    schemas = (
        MessageSchema("SpecsCamera", fields=(
            F("max_width", "uint32", _DIMLESS),
            F("max_height", "uint32", _DIMLESS),
            F("max_frame_rate", "float64", "Hz"),
        )),
        MessageSchema("Image", fields=(
            F("width", "uint32", _DIMLESS),
            F("height", "uint32", _DIMLESS),
            F("encoding", "string"),
            F("data", "byte[]"),
        )),
        MessageSchema("Audio", fields=(
            F("sample_rate", "uint32", "Hz"),
            F("data", "byte[]"),
        )),
    )
    return ComponentModel(
        DeviceKind.SENSOR, "camera", elements,
        groups=(OptionalGroup("microphone", ("audio",)),),
        schemas=schemas,
    )


BUILTIN_MODELS: Mapping[str, Callable[[], ComponentModel]] = MappingProxyType({
    "rotary_servo": builtin_rotary_servo,
    "camera": builtin_camera,
})


def source_path(name: str) -> Path:
    """Path of the shipped ``.hrim`` source for a builtin model."""
    if name not in BUILTIN_MODELS:
        raise KeyError(name)
    return CATALOG_DIR / f"{name}.hrim"


def fixture_path(name: str) -> Path:
    return FIXTURES_DIR / name
