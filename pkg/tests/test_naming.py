from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hrim import naming
from hrim.model import DeviceKind
from hrim.naming import (
    MalformedToken,
    MissingPart,
    NameParts,
    NamePattern,
    NoMatch,
    UnknownKind,
    parse,
    parts_for,
    render,
    validate,
)
from oracles import NAME_ORACLE as ORACLE
from oracles import foreign_chars
from strategies import any_name_parts, name_parts

# --- examples -------------------------------------------------------------------


def test_render_package():
    parts = NameParts(DeviceKind.ACTUATOR, "rotary_servo", vendor_id="a0b1", product_id="c2d3")
    assert render(NamePattern.PACKAGE, parts) == "hrim_actuator_rotary_servo_a0b1_c2d3"


def test_render_generic_message_file():
    assert render(NamePattern.GENERIC_MESSAGE_FILE, NameParts(message_name="Power")) \
        == "hrim_generic_msgs/msg/Power.msg"


def test_render_parameter_tag():
    parts = NameParts(parameter_name="max_temperature", param_type="float64", param_value="85.0")
    assert render(NamePattern.PARAMETER_TAG, parts) \
        == 'param name="max_temperature" type="float64" value="85.0"'


@pytest.mark.parametrize("pattern, parts, text", [
    (NamePattern.NODE, NameParts(DeviceKind.SENSOR, "camera", instance_id="0001"),
     "hrim_sensor_camera_0001"),
    (NamePattern.MESSAGE_FILE, NameParts(DeviceKind.ACTUATOR, "rotary_servo", message_name="GoalRotaryServo"),
     "hrim_actuator_rotary_servo_msgs/msg/GoalRotaryServo.msg"),
    (NamePattern.SERVICE_PATH, NameParts(DeviceKind.UI, "panel", instance_id="beef", service_name="reset"),
     "hrim_ui_panel_beef/reset"),
    (NamePattern.SERVICE_FILE, NameParts(DeviceKind.POWER, "battery", service_name="Reset"),
     "hrim_power_battery_srvs/srv/Reset.srv"),
    (NamePattern.ACTION_FILE, NameParts(DeviceKind.COGNITION, "planner", action_name="Plan"),
     "hrim_cognition_planner_action/Plan.action"),
])
def test_render_other_patterns(pattern, parts, text):
    assert render(pattern, parts) == text
    assert parse(pattern, text) == parts


def test_parse_package():
    assert parse(NamePattern.PACKAGE, "hrim_sensor_camera_a0b1_c2d3") == NameParts(
        DeviceKind.SENSOR, "camera", vendor_id="a0b1", product_id="c2d3")


def test_parse_topic_with_underscored_device_name():
    parts = parse(NamePattern.TOPIC, "hrim_actuator_rotary_servo_ffff/goal")
    assert parts == NameParts(DeviceKind.ACTUATOR, "rotary_servo", instance_id="ffff", topic_name="goal")


def test_parse_unknown_kind():
    with pytest.raises(UnknownKind):
        parse(NamePattern.NODE, "hrim_robot_arm_a0b1")


def test_validate_generic_id():
    assert validate(NamePattern.GENERIC_MESSAGE_FILE, "hrim_generic_msgs/msg/ID.msg") == (True, [])


def test_validate_uppercase_prefix():
    ok, findings = validate(NamePattern.PACKAGE, "HRIM_sensor_camera_a0b1_c2d3")
    assert not ok
    assert [f.code for f in findings] == [MalformedToken.code]


def test_validate_missing_product():
    ok, findings = validate(NamePattern.PACKAGE, "hrim_sensor_camera_a0b1")
    assert not ok
    assert [f.code for f in findings] == [NoMatch.code]


def test_render_missing_part():
    with pytest.raises(MissingPart):
        render(NamePattern.TOPIC, NameParts(DeviceKind.SENSOR, "camera", instance_id="0001"))


@pytest.mark.parametrize("parts", [
    NameParts(DeviceKind.SENSOR, "Camera", instance_id="0001"),
    NameParts(DeviceKind.SENSOR, "camera", instance_id="00G1"),
    NameParts(DeviceKind.SENSOR, "camera", instance_id="00001"),
    NameParts(DeviceKind.SENSOR, "cam__era", instance_id="0001"),
])
def test_render_rejects_malformed_tokens(parts):
    with pytest.raises(MalformedToken):
        render(NamePattern.NODE, parts)


def test_render_rejects_unknown_kind():
    with pytest.raises(UnknownKind):
        render(NamePattern.NODE, NameParts("robot", "arm", instance_id="0001"))


def test_parameter_tag_types():
    assert validate(NamePattern.PARAMETER_TAG, 'param name="gains" type="float64[3]" value="1 2 3"')[0]
    assert not validate(NamePattern.PARAMETER_TAG, 'param name="gains" type="real" value="1"')[0]
    assert not validate(NamePattern.PARAMETER_TAG, 'param name="x" type="bool" value="a"b"')[0]


def test_parts_for_drops_unused_fields():
    full = NameParts(DeviceKind.SENSOR, "camera", "a0b1", "c2d3", "0001", topic_name="image")
    assert parts_for(NamePattern.NODE, full) == NameParts(DeviceKind.SENSOR, "camera", instance_id="0001")


def test_exhaustive_small_tokens():
    names = ["a", "a_b", "ab1", "x_1_y"]
    ids = ["0000", "ffff", "a0b1"]
    for kind, name, inst, topic in itertools.product(DeviceKind, names, ids, names):
        parts = NameParts(kind, name, instance_id=inst, topic_name=topic)
        assert parse(NamePattern.TOPIC, render(NamePattern.TOPIC, parts)) == parts
        pkg = NameParts(kind, name, vendor_id=inst, product_id=ids[0])
        assert parse(NamePattern.PACKAGE, render(NamePattern.PACKAGE, pkg)) == pkg


def test_device_name_that_looks_like_a_suffix():
    parts = NameParts(DeviceKind.SENSOR, "lidar_msgs", message_name="Scan")
    text = render(NamePattern.MESSAGE_FILE, parts)
    assert text == "hrim_sensor_lidar_msgs_msgs/msg/Scan.msg"
    assert parse(NamePattern.MESSAGE_FILE, text) == parts
    node = NameParts(DeviceKind.SENSOR, "cam_beef", instance_id="0001")
    assert parse(NamePattern.NODE, render(NamePattern.NODE, node)) == node


# --- properties -------------------------------------------------------------------


@given(any_name_parts)
def test_round_trip(case):
    pattern, parts = case
    text = render(pattern, parts)
    assert parse(pattern, text) == parts
    assert validate(pattern, text) == (True, [])
    assert ORACLE[pattern].fullmatch(text)


@settings(max_examples=300)
@given(any_name_parts, st.data())
def test_single_character_corruption_rejected(case, data):
    pattern, parts = case
    text = render(pattern, parts)
    i = data.draw(st.integers(0, len(text) - 1))
    bad = data.draw(st.sampled_from(foreign_chars(pattern, text, i)).filter(lambda c: c != text[i]))
    mutated = text[:i] + bad + text[i + 1:]
    ok, findings = validate(pattern, mutated)
    assert not ok, mutated
    assert ORACLE[pattern].fullmatch(mutated) is None
    assert len(findings) == 1 and findings[0].code.startswith("E_")


@settings(max_examples=300)
@given(st.sampled_from(list(NamePattern)), st.text(alphabet="hrim_acturosenwgy0123456789abcdef/.ASM", max_size=40))
def test_validate_agrees_with_oracle(pattern, text):
    assert validate(pattern, text)[0] == (ORACLE[pattern].fullmatch(text) is not None)


@given(st.sampled_from(list(NamePattern)), st.text(max_size=60))
def test_parse_errors_are_naming_errors(pattern, text):
    try:
        parse(pattern, text)
    except naming.NamingError:
        pass


@given(st.sampled_from(list(NamePattern)), name_parts(NamePattern.TOPIC))
def test_render_never_yields_rejected_names(pattern, parts):
    try:
        text = render(pattern, parts)
    except MissingPart:
        return
    assert validate(pattern, text)[0]
