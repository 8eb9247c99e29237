from __future__ import annotations

import io
import re
import subprocess
import sys

import pytest

from hrim.catalog import GOLDEN_DIR, fixture_path, source_path
from hrim.cli import run
from hrim.emitter import read_tree

SERVO = str(source_path("rotary_servo"))
LOCATION = re.compile(r"^[^:]+:\d+:\d+: ")


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    for line in err.getvalue().splitlines():
        assert LOCATION.match(line), line
    return code, out.getvalue(), err.getvalue()


def fixture(name):
    return str(fixture_path(name))


def test_check_catalog():
    assert call("check", SERVO) == (0, "", "")


def test_check_reports_findings(tmp_path):
    path = tmp_path / "bad.hrim"
    path.write_text(source_path("rotary_servo").read_text().replace('unit "rad/s"', 'unit "banana"', 1))
    code, _, err = call("check", str(path))
    assert code == 1
    assert err.startswith(f"{path}:") and "E_UNKNOWN_UNIT" in err


def test_check_syntax_error(tmp_path):
    path = tmp_path / "broken.hrim"
    path.write_text("model broken {\n  kind: sensor\n  topic {\n")
    code, _, err = call("check", str(path))
    assert code == 1 and err.startswith(f"{path}:3:")


def test_conform_missing_power():
    code, out, err = call("conform", SERVO, fixture("servo_missing_power.hrimd"))
    assert code == 1
    assert [line for line in out.splitlines() if "E_MISSING_MANDATORY" in line] == [
        "error E_MISSING_MANDATORY power: mandatory topic 'power' is not exposed"]
    assert err == ""


def test_conform_ok_and_json():
    assert call("conform", SERVO, fixture("servo_vendor_a.hrimd"))[0] == 0
    code, out, _ = call("conform", "--json", SERVO, fixture("servo_partial_temperature.hrimd"))
    assert code == 1 and '"E_GROUP_PARTIAL"' in out


def test_conform_bad_identity(tmp_path):
    path = tmp_path / "bad.hrimd"
    path.write_text(fixture_path("servo_vendor_a.hrimd").read_text().replace("instance: 0001", "instance: XYZ"))
    code, _, err = call("conform", SERVO, str(path))
    assert code == 1 and err.startswith(f"{path}:7:") and "E_INVALID_IDENTITY" in err


def test_swap():
    code, out, _ = call("swap", SERVO, fixture("servo_mandatory_only.hrimd"), fixture("servo_vendor_b.hrimd"))
    assert code == 0 and out.startswith("verdict: true\n")
    code, out, _ = call("swap", SERVO, fixture("servo_vendor_a.hrimd"), fixture("servo_vendor_b.hrimd"))
    assert code == 1 and out.startswith("verdict: false\n")


def test_sim_is_deterministic():
    first = call("sim", fixture("servo_swap.script"), "--seed", "0")
    second = call("sim", fixture("servo_swap.script"), "--seed", "0")
    assert first == second and first[0] == 0 and first[1]
    assert call("sim", fixture("servo_swap.script"), "--seed", "1")[1] != first[1]


def test_sim_script_error(tmp_path):
    path = tmp_path / "bad.script"
    path.write_text("advance 3\nteleport\n")
    code, _, err = call("sim", str(path))
    assert code == 1 and err.startswith(f"{path}:2:1:")


def test_sim_with_model_file(tmp_path):
    (tmp_path / "servo.hrim").write_text(source_path("rotary_servo").read_text())
    (tmp_path / "run.script").write_text("spawn servo.hrim a0b1 c2d3 0001\nadvance 10\n")
    code, out, _ = call("sim", str(tmp_path / "run.script"))
    assert code == 0 and "hrim_actuator_rotary_servo_0001/power" in out


def test_fmt_stdout_and_write(tmp_path):
    path = tmp_path / "servo.hrim"
    path.write_text(source_path("rotary_servo").read_text())
    code, out, _ = call("fmt", str(path))
    assert code == 0 and out.startswith("model rotary_servo {\n")
    assert path.read_text() == source_path("rotary_servo").read_text()
    assert call("fmt", "--write", str(path))[0] == 0
    once = path.read_bytes()
    assert once == out.encode()
    assert call("fmt", "--write", str(path))[0] == 0
    assert path.read_bytes() == once


def test_gen_matches_golden(tmp_path):
    args = ["gen", SERVO, "--vendor", "a0b1", "--product", "c2d3", "--instance", "0001"]
    assert call(*args, "--out", str(tmp_path / "a"))[0] == 0
    assert read_tree(tmp_path / "a") == read_tree(GOLDEN_DIR / "rotary_servo")
    code, _, err = call(*args, "--out", str(tmp_path / "a"))
    assert code == 3 and "E_IO" in err
    assert call(*args, "--out", str(tmp_path / "a"), "--force")[0] == 0
    assert call(*args, "--out", str(tmp_path / "b"), "--without", "temperature_sensing")[0] == 0
    manifest = (tmp_path / "b" / "hrim_actuator_rotary_servo_a0b1_c2d3" / "manifest.txt").read_text()
    assert "temperature" not in manifest


@pytest.mark.parametrize("argv", [
    [],
    ["bogus"],
    ["check"],
    ["gen", SERVO, "--vendor", "a0b1", "--product", "c2d3", "--instance", "zz", "--out", "x"],
    ["gen", SERVO, "--vendor", "a0b1", "--product", "c2d3", "--instance", "0001", "--out", "x",
     "--without", "lighting"],
    ["lint-name", "nonsense", "x"],
    ["sim", "s", "--seed", "abc"],
])
def test_usage_errors(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, out, err = call(*argv)
    assert code == 2 and out == "" and "E_USAGE" in err
    assert list(tmp_path.iterdir()) == []


def test_io_errors(tmp_path):
    assert call("check", str(tmp_path / "missing.hrim"))[0] == 3
    assert call("sim", str(tmp_path / "missing.script"))[0] == 3
    assert call("conform", SERVO, str(tmp_path / "missing.hrimd"))[0] == 3


def test_list_and_lint_name():
    code, out, _ = call("list")
    assert code == 0 and [line.split("\t")[0] for line in out.splitlines()] == ["rotary_servo", "camera"]
    assert call("lint-name", "topic", "hrim_actuator_rotary_servo_0001/goal") == (0, "", "")
    code, _, err = call("lint-name", "package", "HRIM_sensor_camera_a0b1_c2d3")
    assert code == 1 and "E_MALFORMED_TOKEN" in err


def test_help_exits_zero():
    assert call("--help")[0] == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hrim", "check", SERVO], capture_output=True, text=True)
    assert (proc.returncode, proc.stderr) == (0, "")
