from __future__ import annotations

import json

from hypothesis import given
from hypothesis import strategies as st

from hrim.catalog import builtin_rotary_servo, fixture_path
from hrim.conformance import check, interchangeable, load_descriptor
from hrim.model import Identity, Obligation
from hrim.modelc import format_descriptor, parse_descriptor
from strategies import hex4

SERVO = builtin_rotary_servo()
MANDATORY = [e.name for e in SERVO.elements if e.obligation is Obligation.MANDATORY]
OPTIONAL = [e.name for e in SERVO.elements if e.obligation is Obligation.OPTIONAL]


def describe(names=None, identity=Identity("a0b1", "c2d3", "0001"), edit=None):
    text = format_descriptor(SERVO, identity, names)
    if edit is not None:
        text = edit(text)
    return parse_descriptor(text)


def codes(descriptor):
    return check(descriptor, SERVO).codes()


def expected_conformant(names) -> bool:
    """Oracle straight from the obligation and group rules."""
    present = set(names)
    if not set(MANDATORY) <= present:
        return False
    for group in SERVO.groups:
        if present & set(group.members):
            required = {m for m in group.members if SERVO.element(m).required_in_group}
            if not required <= present:
                return False
    return True


def test_fixture_matrix():
    results = {}
    for name in ("servo_vendor_a", "servo_mandatory_only", "servo_missing_power",
                 "servo_partial_temperature"):
        report = check(load_descriptor(fixture_path(f"{name}.hrimd")), SERVO)
        results[name] = (report.verdict, report.codes())
    assert results == {
        "servo_vendor_a": ("conformant", []),
        "servo_mandatory_only": ("conformant", []),
        "servo_missing_power": ("nonconformant", [("E_MISSING_MANDATORY", "power")]),
        "servo_partial_temperature": ("nonconformant", [("E_GROUP_PARTIAL", "temperature_sensing")]),
    }


def test_mandatory_only_and_removal():
    assert codes(describe(MANDATORY)) == []
    assert codes(describe([n for n in MANDATORY if n != "power"])) == [("E_MISSING_MANDATORY", "power")]


def test_kind_mismatch():
    d = describe(MANDATORY, edit=lambda t: t.replace("kind: actuator", "kind: sensor"))
    assert codes(d)[0] == ("E_KIND_MISMATCH", "rotary_servo")


def test_direction_and_schema_mismatch():
    d = describe(MANDATORY, edit=lambda t: t.replace(
        "topic goal {\n    direction: subscribed", "topic goal {\n    direction: published"))
    assert codes(d) == [("E_DIRECTION_MISMATCH", "goal")]
    d = describe(MANDATORY, edit=lambda t: t.replace('field effort: float64 unit "N*m"',
                                                     'field effort: float32 unit "N*m"'))
    report = check(d, SERVO)
    assert report.codes() == [("E_SCHEMA_MISMATCH", "goal")]
    assert "effort" in report.findings[0].message
    d = describe(MANDATORY, edit=lambda t: t.replace('unit "N*m"\n  }\n}', 'unit "m*N"\n  }\n}'))
    assert codes(d) == []


def test_parameter_mismatch():
    full = [e.name for e in SERVO.elements]
    d = describe(full, edit=lambda t: t.replace('unit "celsius"', 'unit "K"', 1))
    assert codes(d) == [("E_SCHEMA_MISMATCH", "min_temperature")]


def test_unknown_and_misnamed_elements():
    extra = "  topic extra {\n    direction: published\n    schema: Status\n  }\n}\n"
    d = describe(MANDATORY, edit=lambda t: t[: t.rindex("}")] + extra)
    report = check(d, SERVO)
    assert report.codes() == [("W_UNKNOWN_ELEMENT", "extra")]
    assert report.conformant
    bad = extra.replace("extra", "Extra")
    d = describe(MANDATORY, edit=lambda t: t[: t.rindex("}")] + bad)
    assert codes(d) == [("E_NAMING", "Extra"), ("W_UNKNOWN_ELEMENT", "Extra")]


def test_report_outputs():
    report = check(load_descriptor(fixture_path("servo_missing_power.hrimd")), SERVO)
    assert report.to_text().splitlines()[-1] == "verdict: nonconformant"
    data = json.loads(report.to_json())
    assert data["verdict"] == "nonconformant"
    assert data["findings"][0]["code"] == "E_MISSING_MANDATORY"


def test_interchangeable_examples():
    a = load_descriptor(fixture_path("servo_mandatory_only.hrimd"))
    b = load_descriptor(fixture_path("servo_vendor_b.hrimd"))
    assert (a.identity.vendor_id, b.identity.vendor_id) == ("a0b1", "ffee")
    assert interchangeable(a, b, SERVO).verdict
    assert interchangeable(a, a, SERVO).verdict
    with_temp = describe(MANDATORY + ["temperature", "min_temperature", "max_temperature"])
    verdict = interchangeable(with_temp, b, SERVO)
    assert not verdict.verdict and "temperature" in verdict.explanation
    missing = load_descriptor(fixture_path("servo_missing_power.hrimd"))
    verdict = interchangeable(a, missing, SERVO)
    assert not verdict and "not conformant" in verdict.explanation


# --- properties ---------------------------------------------------------------

optional_subsets = st.lists(st.sampled_from(OPTIONAL), unique=True)
identities = st.builds(Identity, hex4, hex4, hex4)


@given(optional_subsets, identities)
def test_verdict_matches_oracle(extra, identity):
    names = MANDATORY + extra
    assert check(describe(names, identity), SERVO).conformant == expected_conformant(names)


@given(st.lists(st.sampled_from(MANDATORY + OPTIONAL), unique=True), identities, hex4)
def test_verdict_ignores_instance(names, identity, other):
    a = check(describe(names, identity), SERVO)
    b = check(describe(names, Identity(identity.vendor_id, identity.product_id, other)), SERVO)
    assert a.verdict == b.verdict and a.codes() == b.codes()


@given(optional_subsets, st.sampled_from(OPTIONAL))
def test_adding_optional_elements_is_monotone(extra, added):
    base = MANDATORY + extra
    if not check(describe(base), SERVO).conformant or added in base:
        return
    grown = check(describe(base + [added]), SERVO)
    group = SERVO.element(added).group
    partial = group is not None and not expected_conformant(base + [added])
    assert grown.conformant or partial


@given(st.lists(st.tuples(optional_subsets, identities), min_size=3, max_size=6))
def test_interchangeable_is_an_equivalence(population):
    descriptors = [describe(MANDATORY + extra, identity) for extra, identity in population]
    descriptors = [d for d in descriptors if check(d, SERVO).conformant]
    rel = {(i, j): interchangeable(a, b, SERVO).verdict
           for i, a in enumerate(descriptors) for j, b in enumerate(descriptors)}
    n = len(descriptors)
    for i in range(n):
        assert rel[i, i]
        for j in range(n):
            assert rel[i, j] == rel[j, i]
            for k in range(n):
                if rel[i, j] and rel[j, k]:
                    assert rel[i, k]
