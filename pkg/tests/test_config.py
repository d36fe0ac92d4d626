import json

import pytest

from beamwave.config import DEFAULT_TOLERANCES, from_dict, load_config
from beamwave.errors import ConfigError


def test_defaults_filled():
    cfg = from_dict({"command": "solve", "c": 1.0})
    assert cfg.grid.n_points == 1024
    assert cfg.equation == "beam-poly"
    assert cfg.tolerances == DEFAULT_TOLERANCES
    assert cfg.to_dict()["lambda"] == 1.0


def test_nls_defaults():
    cfg = from_dict({"command": "nls-branch"})
    assert cfg.equation == "nls"
    assert (cfg.mu, cfg.continuation.param_start, cfg.continuation.param_end) == (1.0, 1.0, 2.0)


@pytest.mark.parametrize("data,fragment", [
    ({"command": "solve", "c": 1.5}, "wavespeed must satisfy"),
    ({"command": "solve"}, "needs the wavespeed"),
    ({"command": "fly", "c": 1.0}, "field 'command'"),
    ({"command": "solve", "c": 1.0, "colour": 1}, "unknown key"),
    ({"command": "solve", "c": 1.0, "grid": {"n_points": 7}}, "even integer"),
    ({"command": "solve", "c": 1.0, "grid": {"points": 7}}, "unknown key(s) in 'grid'"),
    ({"command": "solve", "c": "fast"}, "must be a number"),
    ({"command": "solve", "c": 1.0, "tolerances": {"newtn": 1e-9}}, "unknown tolerance"),
    ({"command": "branch", "c": 1.0}, "param_end"),
    ({"command": "nls-branch", "mu": 3.0}, "μ < 2√ω"),
    ({"command": "kernel", "equation": "nls"}, "only available for beam"),
    ({"command": "variational", "equation": "beam-exp", "c": 1.0}, "polynomial"),
    ({"command": "solve", "c": 1.0, "coefficients": [-1.0]}, "coefficients"),
    ({"command": "evolve", "c": 1.0, "evolution": {"dt": -1}}, "positive"),
])
def test_invalid_configs(data, fragment):
    with pytest.raises(ConfigError) as info:
        from_dict(data)
    assert fragment in str(info.value)


def test_load_reports_json_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{\n  "command": "solve",\n  "c": 1.0,,\n}')
    with pytest.raises(ConfigError) as info:
        load_config(p)
    assert "line 3" in str(info.value)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")


def test_load_roundtrip(tmp_path):
    p = tmp_path / "ok.json"
    p.write_text(json.dumps({"command": "kernel", "c": 0.5, "kernel_samples": 11}))
    cfg = load_config(p)
    assert cfg.c == 0.5 and cfg.kernel_samples == 11
