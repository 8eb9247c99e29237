from __future__ import annotations

from dataclasses import replace

import pytest
from hypothesis import given

from hrim.catalog import builtin_camera, builtin_rotary_servo
from hrim.model import (
    COMMON_TOPIC_NAMES,
    ComponentModel,
    DeviceKind,
    Direction,
    ElementCategory,
    ElementKind,
    FieldDef,
    Identity,
    InterfaceElement,
    InvalidIdentity,
    MessageSchema,
    Obligation,
    OptionalGroup,
    ServiceSchema,
    TypeRef,
    common_elements,
    pascal_case,
    specs_schema_name,
    validate_model,
)
from strategies import component_models


def codes(model):
    return [(f.code, f.subject) for f in validate_model(model)]


def drop(model: ComponentModel, name: str) -> ComponentModel:
    return replace(model, elements=tuple(e for e in model.elements if e.name != name))


def swap_element(model: ComponentModel, name: str, **changes) -> ComponentModel:
    return replace(model, elements=tuple(replace(e, **changes) if e.name == name else e
                                         for e in model.elements))


def test_builtin_models_are_valid():
    assert validate_model(builtin_rotary_servo()) == []
    assert validate_model(builtin_camera()) == []


def test_missing_power():
    assert codes(drop(builtin_rotary_servo(), "power")) == [("E_MISSING_COMMON", "power")]


def test_common_only_has_no_device_purpose():
    model = ComponentModel(DeviceKind.SENSOR, "probe", common_elements("probe"),
                           schemas=(MessageSchema("SpecsProbe"),))
    assert codes(model) == [("E_NO_DEVICE_PURPOSE", "probe")]


def test_parameter_alone_is_not_a_device_purpose():
    model = ComponentModel(
        DeviceKind.SENSOR, "probe",
        common_elements("probe") + (InterfaceElement(
            ElementKind.PARAMETER, "gain", Obligation.MANDATORY, ElementCategory.DEVICE_PURPOSE,
            param_type="float64", unit="percent"),),
        schemas=(MessageSchema("SpecsProbe"),))
    assert codes(model) == [("E_NO_DEVICE_PURPOSE", "probe")]


def test_obligation_must_follow_category():
    model = swap_element(builtin_rotary_servo(), "state", obligation=Obligation.MANDATORY)
    assert codes(model) == [("E_OBLIGATION_CATEGORY", "state")]
    model = swap_element(builtin_rotary_servo(), "goal", obligation=Obligation.OPTIONAL)
    assert codes(model) == [("E_OBLIGATION_CATEGORY", "goal")]


def test_element_shape_rules():
    servo = builtin_rotary_servo()
    assert codes(swap_element(servo, "goal", direction=None)) == [("E_MISSING_DIRECTION", "goal")]
    assert codes(swap_element(servo, "min_temperature", direction=Direction.PUBLISHED)) \
        == [("E_ELEMENT_SHAPE", "min_temperature")]
    assert codes(swap_element(servo, "state", unit="rad")) == [("E_ELEMENT_SHAPE", "state")]
    assert codes(swap_element(servo, "goal", schema_ref="Nope")) == [("E_UNRESOLVED_SCHEMA", "goal")]


def test_schema_kind_must_match_element_kind():
    servo = builtin_rotary_servo()
    srv = ServiceSchema("Calibrate", request=(FieldDef("offset", "float64", "rad"),))
    extra = InterfaceElement(ElementKind.TOPIC, "calibrate", Obligation.OPTIONAL,
                             ElementCategory.ADDITIONAL_CAPABILITY, Direction.SUBSCRIBED, "Calibrate")
    model = replace(servo, elements=servo.elements + (extra,), schemas=servo.schemas + (srv,))
    assert codes(model) == [("E_SCHEMA_KIND", "calibrate")]
    ok = replace(extra, element_kind=ElementKind.SERVICE, direction=None)
    model = replace(servo, elements=servo.elements + (ok,), schemas=servo.schemas + (srv,))
    assert codes(model) == []


def test_common_topic_rules():
    servo = builtin_rotary_servo()
    assert codes(swap_element(servo, "status", schema_ref="Power")) == [("E_COMMON_SCHEMA", "status")]
    assert codes(swap_element(servo, "id", direction=Direction.SUBSCRIBED)) == [("E_COMMON_DIRECTION", "id")]


def test_group_rules():
    servo = builtin_rotary_servo()
    assert codes(swap_element(servo, "temperature", group="nowhere")) == [
        ("E_UNKNOWN_GROUP", "temperature"), ("E_GROUP_MEMBERS", "temperature_sensing")]
    assert codes(swap_element(servo, "reconfiguration", required_in_group=True)) == [
        ("E_REQUIRES_OUTSIDE_GROUP", "reconfiguration")]
    moved = list(servo.elements)
    moved.insert(6, moved.pop(moved.index(servo.element("temperature"))))
    assert codes(replace(servo, elements=tuple(moved))) == [("E_GROUP_SPLIT", "temperature_sensing")]
    empty = replace(servo, groups=servo.groups + (OptionalGroup("spare", ()),))
    assert codes(empty) == [("E_EMPTY_GROUP", "spare")]


def test_grouped_mandatory_element_rejected():
    servo = builtin_rotary_servo()
    model = swap_element(servo, "goal", group="temperature_sensing")
    assert ("E_GROUP_CATEGORY", "goal") in codes(model)


def test_schema_rules():
    servo = builtin_rotary_servo()
    bad = MessageSchema("bad_name", fields=(FieldDef("X", "float64", "m"), FieldDef("X", "Mystery")))
    found = codes(replace(servo, schemas=servo.schemas + (bad,)))
    assert found == [("E_SCHEMA_NAME", "bad_name"), ("E_FIELD_NAME", "bad_name.X"),
                     ("E_FIELD_NAME", "bad_name.X"), ("E_DUPLICATE_FIELD", "bad_name.X"),
                     ("E_UNRESOLVED_TYPE", "bad_name.X")]
    dup = replace(servo, schemas=servo.schemas + (servo.schemas[0],))
    assert codes(dup) == [("E_DUPLICATE_SCHEMA", "SpecsRotaryServo")]


def test_self_containing_schema():
    servo = builtin_rotary_servo()
    loop = MessageSchema("Loop", fields=(FieldDef("next", "Loop[]"),))
    assert codes(replace(servo, schemas=servo.schemas + (loop,))) == [("E_SCHEMA_CYCLE", "Loop")]


def test_device_name_and_element_names():
    servo = builtin_rotary_servo()
    assert codes(replace(servo, device_name="RotaryServo"))[0] == ("E_DEVICE_NAME", "RotaryServo")
    assert ("E_DUPLICATE_ELEMENT", "goal") in codes(replace(servo, elements=servo.elements + (servo.element("goal"),)))


def test_validate_is_pure():
    model = swap_element(builtin_rotary_servo(), "goal", direction=None, schema_ref="Nope")
    first = [str(f) for f in validate_model(model)]
    assert first == [str(f) for f in validate_model(model)]


def test_common_elements():
    elements = common_elements("rotary_servo")
    assert tuple(e.name for e in elements) == COMMON_TOPIC_NAMES
    assert [e.schema_ref for e in elements] == [
        "ID", "Power", "Status", "SpecsRotaryServo", "Simulation3D", "SimulationURDF"]
    assert all(e.obligation is Obligation.MANDATORY and e.direction is Direction.PUBLISHED
               for e in elements)


def test_names():
    assert pascal_case("rotary_servo") == "RotaryServo"
    assert specs_schema_name("camera") == "SpecsCamera"


@pytest.mark.parametrize("text, ref", [
    ("float64", TypeRef("float64")),
    ("byte[]", TypeRef("byte", True)),
    ("float64[3]", TypeRef("float64", True, 3)),
])
def test_type_ref(text, ref):
    assert TypeRef.parse(text) == ref
    assert str(ref) == text


def test_identity():
    assert Identity("a0b1", "c2d3", "0001").instance_id == "0001"
    assert Identity("a0b1", "c2d3").instance_id is None
    for bad in (("XYZ", "c2d3"), ("a0b1", "C2D3"), ("a0b1", "c2d3", "00001")):
        with pytest.raises(InvalidIdentity):
            Identity(*bad)


def test_finding_text():
    (finding,) = validate_model(drop(builtin_rotary_servo(), "power"))
    assert str(finding) == "error E_MISSING_COMMON power: common requirement topic 'power' is missing"


def test_category_obligation_pairs():
    assert {c: c.required_obligation for c in ElementCategory} == {
        ElementCategory.DEVICE_PURPOSE: Obligation.MANDATORY,
        ElementCategory.COMMON_REQUIREMENT: Obligation.MANDATORY,
        ElementCategory.ADDITIONAL_CAPABILITY: Obligation.OPTIONAL,
        ElementCategory.OPTIONAL_HARDWARE: Obligation.OPTIONAL,
    }


@given(component_models())
def test_generated_models_respect_category_obligation(model):
    assert validate_model(model) == []
    for e in model.elements:
        assert e.obligation is e.category.required_obligation
