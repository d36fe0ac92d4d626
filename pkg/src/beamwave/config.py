"""Run configuration: JSON in, validated :class:`RunConfig` out."""

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .errors import ConfigError

COMMANDS = ("solve", "branch", "stability", "evolve", "kernel", "variational", "nls-branch")
EQUATIONS = ("beam-poly", "beam-exp", "nls")

DEFAULT_TOLERANCES = {
    "newton": 1e-10,
    "continuation": 1e-10,
    "eigen": 1e-4,
    "inner": 1e-12,
    "variational": 1e-10,
    "verify_residual": 1e-8,
    "verify_drift": 1e-8,
}

_SQRT2 = math.sqrt(2.0)


@dataclass
class GridConfig:
    n_points: int = 1024
    half_length: float = 12 * math.pi


@dataclass
class ContinuationConfig:
    param_start: float = None
    param_end: float = None
    ds: float = 0.01
    ds_min: float = 1e-4
    ds_max: float = 0.05
    max_points: int = 2000
    stop_at_fold: bool = False


@dataclass
class EvolutionConfig:
    T: float = 10.0
    dt: float = 1e-3
    epsilon: float = 0.0
    mode_index: int = 0
    sample_every: int = 10


@dataclass
class RunConfig:
    command: str
    equation: str = "beam-poly"
    grid: GridConfig = field(default_factory=GridConfig)
    c: float = None
    gamma: float = 1.0
    coefficients: list = field(default_factory=lambda: [1.0])
    mu: float = None
    omega: float = None
    lambda_: float = 1.0
    kernel_x_max: float = 30.0
    kernel_samples: int = 3001
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    continuation: ContinuationConfig = field(default_factory=ContinuationConfig)
    evolution: EvolutionConfig = field(default_factory=EvolutionConfig)
    output_dir: str = "beamwave-out"

    def to_dict(self):
        d = asdict(self)
        d["lambda"] = d.pop("lambda_")
        return d


_TOP_KEYS = {
    "command", "equation", "grid", "c", "gamma", "coefficients", "mu", "omega", "lambda",
    "kernel_x_max", "kernel_samples", "tolerances", "continuation", "evolution", "output_dir",
}


def _section(cls, data, name):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigError(f"field '{name}' must be an object")
    known = set(cls.__dataclass_fields__)
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown key(s) in '{name}': {', '.join(sorted(unknown))}")
    try:
        return cls(**data)
    except TypeError as exc:
        raise ConfigError(f"bad '{name}' section: {exc}") from exc


def _number(value, name, kind=float):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"field '{name}' must be a number, got {value!r}")
    if kind is int:
        if int(value) != value:
            raise ConfigError(f"field '{name}' must be an integer, got {value!r}")
        return int(value)
    if not math.isfinite(value):
        raise ConfigError(f"field '{name}' must be finite")
    return float(value)


def _check_wavespeed(c, name="c"):
    if not (0.0 <= c < _SQRT2):
        raise ConfigError(f"{name}: wavespeed must satisfy 0 ≤ c < √2 ≈ 1.41421, got {c}")


def _check_nls(mu, omega, name="omega"):
    if not (omega > 0 and mu < 2.0 * math.sqrt(omega)):
        raise ConfigError(f"{name}: NLS parameters need ω > μ²/4 (μ < 2√ω), got μ={mu}, ω={omega}")


def from_dict(data: dict) -> RunConfig:
    """Validate a config mapping and fill defaults."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown key(s): {', '.join(sorted(unknown))}")
    if "command" not in data:
        raise ConfigError("field 'command' is required")
    cmd = data["command"]
    if cmd not in COMMANDS:
        raise ConfigError(f"field 'command' must be one of {', '.join(COMMANDS)}; got {cmd!r}")
    eq = data.get("equation", "nls" if cmd == "nls-branch" else "beam-poly")
    if eq not in EQUATIONS:
        raise ConfigError(f"field 'equation' must be one of {', '.join(EQUATIONS)}; got {eq!r}")
    if cmd == "nls-branch" and eq != "nls":
        raise ConfigError("command 'nls-branch' requires equation 'nls'")

    cfg = RunConfig(command=cmd, equation=eq)
    cfg.grid = _section(GridConfig, data.get("grid"), "grid")
    cfg.grid.n_points = _number(cfg.grid.n_points, "grid.n_points", int)
    cfg.grid.half_length = _number(cfg.grid.half_length, "grid.half_length")
    if cfg.grid.n_points < 8 or cfg.grid.n_points % 2:
        raise ConfigError("grid.n_points must be an even integer >= 8")
    if cfg.grid.half_length <= 0:
        raise ConfigError("grid.half_length must be positive")

    for key in ("c", "gamma", "mu", "omega"):
        if data.get(key) is not None:
            setattr(cfg, key, _number(data[key], key))
    if "lambda" in data:
        cfg.lambda_ = _number(data["lambda"], "lambda")
        if cfg.lambda_ <= 0:
            raise ConfigError("lambda must be positive")
    for key, kind in (("kernel_x_max", float), ("kernel_samples", int)):
        if key in data:
            setattr(cfg, key, _number(data[key], key, kind))
    if "coefficients" in data:
        coeffs = data["coefficients"]
        if not isinstance(coeffs, list) or not coeffs:
            raise ConfigError("field 'coefficients' must be a non-empty list")
        cfg.coefficients = [_number(a, "coefficients") for a in coeffs]
        if any(a < 0 for a in cfg.coefficients) or not any(a > 0 for a in cfg.coefficients):
            raise ConfigError("coefficients must be >= 0 and not all zero")
    if not cfg.gamma > 0:
        raise ConfigError(f"gamma must be positive, got {cfg.gamma}")

    tol = data.get("tolerances", {})
    if not isinstance(tol, dict):
        raise ConfigError("field 'tolerances' must be an object")
    bad = set(tol) - set(DEFAULT_TOLERANCES)
    if bad:
        raise ConfigError(f"unknown tolerance(s): {', '.join(sorted(bad))}")
    for k, v in tol.items():
        v = _number(v, f"tolerances.{k}")
        if v <= 0:
            raise ConfigError(f"tolerances.{k} must be positive")
        cfg.tolerances[k] = v

    cfg.continuation = _section(ContinuationConfig, data.get("continuation"), "continuation")
    cfg.evolution = _section(EvolutionConfig, data.get("evolution"), "evolution")
    ev = cfg.evolution
    if _number(ev.T, "evolution.T") <= 0 or _number(ev.dt, "evolution.dt") <= 0:
        raise ConfigError("evolution.T and evolution.dt must be positive")
    _number(ev.epsilon, "evolution.epsilon")
    _number(ev.mode_index, "evolution.mode_index", int)
    if _number(ev.sample_every, "evolution.sample_every", int) < 1:
        raise ConfigError("evolution.sample_every must be >= 1")
    co = cfg.continuation
    if not (0 < co.ds_min <= co.ds <= co.ds_max):
        raise ConfigError("continuation needs 0 < ds_min <= ds <= ds_max")

    if "output_dir" in data:
        if not isinstance(data["output_dir"], str):
            raise ConfigError("field 'output_dir' must be a string")
        cfg.output_dir = data["output_dir"]

    _validate_parameters(cfg)
    return cfg


def _validate_parameters(cfg: RunConfig):
    cmd = cfg.command
    if cfg.equation == "nls":
        if cmd in ("kernel", "variational", "evolve"):
            raise ConfigError(f"command '{cmd}' is only available for beam equations")
        if cfg.mu is None:
            cfg.mu = 1.0
        co = cfg.continuation
        if cmd == "nls-branch":
            co.param_start = 1.0 if co.param_start is None else co.param_start
            co.param_end = 2.0 if co.param_end is None else co.param_end
            _check_nls(cfg.mu, co.param_start, "continuation.param_start")
            _check_nls(cfg.mu, co.param_end, "continuation.param_end")
        else:
            if cfg.omega is None:
                cfg.omega = 1.0
            _check_nls(cfg.mu, cfg.omega)
        return
    if cmd in ("kernel",) and cfg.c is None:
        cfg.c = 0.0
    if cmd == "branch":
        co = cfg.continuation
        if co.param_start is None:
            co.param_start = cfg.c if cfg.c is not None else 1.0
        if co.param_end is None:
            raise ConfigError("branch runs need continuation.param_end")
        _check_wavespeed(co.param_start, "continuation.param_start")
        if not (0.0 <= co.param_end <= _SQRT2):
            raise ConfigError(f"continuation.param_end: wavespeed must satisfy 0 ≤ c ≤ √2 ≈ 1.41421, got {co.param_end}")
        return
    if cfg.c is None:
        raise ConfigError(f"command '{cmd}' needs the wavespeed 'c'")
    _check_wavespeed(cfg.c)
    if cfg.equation == "beam-exp" and cmd == "variational":
        raise ConfigError("the variational problem needs a polynomial nonlinearity")


def load_config(path) -> RunConfig:
    """Read and validate a JSON config file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return from_dict(data)
