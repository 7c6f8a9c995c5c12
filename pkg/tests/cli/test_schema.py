from __future__ import annotations

import copy
import json
import math
from pathlib import Path

import pytest

from src.cli.schema import load_config, parse_angle, parse_config, resolve_path
from src.errors import ValidationError

CONFIG_DIR = Path(__file__).resolve().parents[2] / "configs"


@pytest.fixture
def base() -> dict:
    return json.loads((CONFIG_DIR / "design1.json").read_text(encoding="utf-8"))


def test_parse_angle():
    assert parse_angle("90deg") == pytest.approx(math.pi / 2)
    assert parse_angle(" 1.5 rad") == pytest.approx(1.5)
    assert parse_angle(2) == 2.0
    for bad in ("90", True, "infdeg"):
        with pytest.raises(ValueError):
            parse_angle(bad)


@pytest.mark.parametrize("name", ["design1", "design2", "design3", "design4"])
def test_shipped_configs_load(name):
    config = load_config(CONFIG_DIR / f"{name}.json")
    assert config.actuator.name == name
    assert config.sim.amplitude == pytest.approx(math.pi / 2)
    assert len(config.config_hash()) == 64


def _set(data: dict, dotted: str, value) -> None:
    *parents, leaf = dotted.split(".")
    node = data
    for key in parents:
        node = node[key]
    if value is _DELETE:
        del node[leaf]
    else:
        node[leaf] = value


_DELETE = object()

MUTATIONS = [
    ("actuator.youngs_modulus", -1.0),
    ("actuator.moment_of_inertia", _DELETE),
    ("actuator.weight_n", _DELETE),
    ("actuator.mass_kg", 0.02),
    ("actuator.damping_ratio", 1.0),
    ("actuator.damping_perturbation", 0.7),
    ("actuator.color", "red"),
    ("pump.motor_speed_max", 0.0),
    ("pump.screw_lead", _DELETE),
    ("lqr.target_settling_s", _DELETE),
    ("lqr.settling_window_s", [1.2, 0.5]),
    ("lqr.R", 0.0),
    ("lqr.settling_band", 0.2),
    ("sim.dt", 20.0),
    ("sim.amplitude", "90"),
    ("sysid.weight_order", 3),
    ("sysid.order", "best"),
    ("sysid.hankel_rows", 1),
    ("robust.samples", 0),
    ("gripper.zeta_spread", 0.2),
    ("synth.traces", 0),
    ("synth.prbs_samples", 8),
    ("synth.noise_fraction", -0.1),
    ("paths.step_pattern", ""),
    ("paths.unknown", "x"),
    ("telemetry", True),
]


@pytest.mark.parametrize("path, value", MUTATIONS, ids=[m[0] for m in MUTATIONS])
def test_invalid_config_rejected(base, path, value):
    data = copy.deepcopy(base)
    _set(data, path, value)
    with pytest.raises(ValidationError):
        parse_config(data)


def test_error_message_names_location(base):
    data = copy.deepcopy(base)
    del data["actuator"]["moment_of_inertia"]
    with pytest.raises(ValidationError) as info:
        parse_config(data)
    assert "actuator.moment_of_inertia" in str(info.value)


def test_config_hash_changes_with_content(base):
    a = parse_config(base)
    data = copy.deepcopy(base)
    data["robust"]["samples"] = 10
    assert parse_config(data).config_hash() != a.config_hash()
    assert parse_config(copy.deepcopy(base)).config_hash() == a.config_hash()


def test_load_config_errors(tmp_path):
    with pytest.raises(ValidationError):
        load_config(tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    with pytest.raises(ValidationError):
        load_config(broken)
    listed = tmp_path / "list.json"
    listed.write_text("[]", encoding="utf-8")
    with pytest.raises(ValidationError):
        load_config(listed)


def test_resolve_path_is_relative_to_config(tmp_path):
    config = tmp_path / "configs" / "design1.json"
    assert resolve_path("../traces/design1", config) == tmp_path / "configs" / ".." / "traces" / "design1"
    assert resolve_path("out", None) == Path("out")
    absolute = tmp_path / "abs"
    assert resolve_path(absolute, config) == absolute
