from __future__ import annotations

from collections import Counter

import pytest

from hrim.catalog import (
    BUILTIN_MODELS,
    builtin_camera,
    builtin_generics,
    builtin_rotary_servo,
    source_path,
)
from hrim.emitter import schema_path
from hrim.model import (
    Direction,
    ElementCategory,
    ElementKind,
    MessageSchema,
    Obligation,
    TypeRef,
    schema_fields,
    validate_model,
)
from hrim.modelc import format_model, load_model, parse_model
from hrim.naming import NameParts, NamePattern, render
from hrim.units import check_units


def test_generics_closed_set():
    assert list(builtin_generics()) == ["ID", "Power", "Status", "Simulation3D", "SimulationURDF"]
    assert builtin_generics().get("Foo") is None
    with pytest.raises(TypeError):
        builtin_generics()["Foo"] = MessageSchema("Foo")


def test_power_fields():
    power = builtin_generics()["Power"]
    assert [(f.name, f.field_type, f.unit) for f in power.fields] == [
        ("voltage", "float64", "V"), ("current", "float64", "A"),
        ("power_consumption", "float64", "W"), ("source", "uint8", "dimensionless")]


def test_id_file_name():
    assert render(NamePattern.GENERIC_MESSAGE_FILE, NameParts(message_name=builtin_generics()["ID"].name)) \
        == "hrim_generic_msgs/msg/ID.msg"


def test_rotary_servo_census():
    servo = builtin_rotary_servo()
    census = Counter((e.obligation, e.element_kind) for e in servo.elements)
    assert census == {
        (Obligation.MANDATORY, ElementKind.TOPIC): 7,
        (Obligation.OPTIONAL, ElementKind.TOPIC): 4,
        (Obligation.OPTIONAL, ElementKind.PARAMETER): 2,
    }
    goal = servo.element("goal")
    assert (goal.obligation, goal.category, goal.direction, goal.schema_ref) == (
        Obligation.MANDATORY, ElementCategory.DEVICE_PURPOSE, Direction.SUBSCRIBED, "GoalRotaryServo")
    group = servo.group("temperature_sensing")
    assert group.members == ("temperature", "min_temperature", "max_temperature")
    assert [servo.element(m).required_in_group for m in group.members] == [False, True, True]
    assert servo.element("max_temperature").default_value == 85.0


def test_camera_brightness():
    camera = builtin_camera()
    brightness = camera.element("brightness")
    assert (brightness.element_kind, brightness.obligation, brightness.category) == (
        ElementKind.PARAMETER, Obligation.OPTIONAL, ElementCategory.ADDITIONAL_CAPABILITY)
    assert camera.element("image").category is ElementCategory.DEVICE_PURPOSE


@pytest.mark.parametrize("name", sorted(BUILTIN_MODELS))
def test_builtin_models_clean(name):
    model = BUILTIN_MODELS[name]()
    assert validate_model(model) == []
    assert check_units(model) == []


@pytest.mark.parametrize("name", sorted(BUILTIN_MODELS))
def test_every_reference_resolves(name):
    model = BUILTIN_MODELS[name]()
    for e in model.elements:
        if e.schema_ref is not None:
            assert model.resolve(e.schema_ref) is not None
    for s in list(model.schemas) + list(builtin_generics().values()):
        for f in schema_fields(s):
            ref = TypeRef.parse(f.field_type)
            assert ref.is_primitive or model.resolve(ref.base) is not None


@pytest.mark.parametrize("name", sorted(BUILTIN_MODELS))
def test_source_and_constructor_agree_both_ways(name):
    built = BUILTIN_MODELS[name]()
    assert load_model(source_path(name)) == built
    assert parse_model(format_model(built)).model == built


def test_schema_paths():
    servo = builtin_rotary_servo()
    assert schema_path(servo, servo.local_schema("GoalRotaryServo")) \
        == "hrim_actuator_rotary_servo_msgs/msg/GoalRotaryServo.msg"
