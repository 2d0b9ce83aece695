"""
Experiment configuration files.

A config is a YAML (or JSON) mapping with the top-level keys kind, model or
particles, run, analysis and output_dir. The schema is strict: unknown keys at
any level raise ConfigurationError. Command-line overrides are applied to the
raw mapping before it is parsed, so they go through the same checks.
"""

import copy
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Union

import yaml

from ..constants import DEFAULT_DT, EXPERIMENT_KINDS
from ..core.model import ModelSpec
from ..core.particles import ParticleConfig
from ..errors import ConfigurationError
from ..sim.integrators import Scheme, parse_scheme

TOP_LEVEL_KEYS = frozenset({"kind", "model", "particles", "run", "analysis", "output_dir"})
RUN_KEYS = frozenset({"dt", "T", "n_paths", "seed", "scheme"})

# Every analysis key a kind accepts, with its default
ANALYSIS_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "validate": {
        "grid_points": 401,
        "half_width": 40.0,
        "n_directions": 256,
    },
    "simulate": {
        "x0": None,
        "noise_scale": 1.0,
        "keep_every": 0,
    },
    "drift-check": {
        "lambda": None,
        "r": None,
        "shell_outer": None,
        "n_samples": 100_000,
        "eps": 0.05,
        "r_start": 16.0,
        "r_limit": 2.0 ** 20,
    },
    "stationary-check": {
        "x0": None,
        "alpha": 0.01,
        "mean_tolerance": 0.05,
        "z_rtol": 1e-6,
        "tail_lambda": None,
    },
    "mixing": {
        "x0_pair": None,
        "times": None,
        "n_times": 40,
        "observe_gaps": None,
        "max_bins": 64,
        "fit_window": None,
        "min_r2": 0.8,
        "d_list": None,
        "mu_pattern": "linear",
    },
    "rate-scaling": {
        "d_list": [8, 16, 24, 32, 48, 64],
        "mu_pattern": "unit",
    },
    "penalty-limit": {
        "betas": [1, 2, 4, 8, 16, 32],
        "z0": None,
    },
}

# Value type of every analysis key; None is allowed wherever the default is None
ANALYSIS_TYPES: Dict[str, str] = {
    "grid_points": "int",
    "half_width": "real",
    "n_directions": "int",
    "x0": "vector",
    "noise_scale": "real",
    "keep_every": "int",
    "lambda": "real",
    "r": "real",
    "shell_outer": "real",
    "n_samples": "int",
    "eps": "real",
    "r_start": "real",
    "r_limit": "real",
    "alpha": "real",
    "mean_tolerance": "real",
    "z_rtol": "real",
    "tail_lambda": "real",
    "x0_pair": "vector_pair",
    "times": "vector",
    "n_times": "int",
    "observe_gaps": "bool",
    "max_bins": "int",
    "fit_window": "interval",
    "min_r2": "real",
    "d_list": "int_list",
    "mu_pattern": "str",
    "betas": "vector",
    "z0": "vector",
}

# Kinds that simulate something and therefore need a target
TARGET_KINDS = frozenset({"validate", "simulate", "drift-check", "stationary-check", "mixing",
                          "penalty-limit"})


@dataclass
class RunSettings:
    """Simulation settings shared by every kind."""
    dt: float = DEFAULT_DT
    T: float = 1.0
    n_paths: int = 1
    seed: int = 0
    scheme: Optional[Scheme] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dt": self.dt,
            "T": self.T,
            "n_paths": self.n_paths,
            "seed": self.seed,
            "scheme": None if self.scheme is None else self.scheme.value,
        }


@dataclass
class ExperimentConfig:
    """
    One experiment, fully parsed.

    Attributes:
        kind: Experiment kind (one of EXPERIMENT_KINDS)
        model: GRBM model, when the experiment runs on one
        particles: Particle system, when the experiment runs on one
        run: Simulation settings
        analysis: Kind-specific parameters with defaults filled in
        output_dir: Directory for artifacts
    """
    kind: str
    model: Optional[ModelSpec] = None
    particles: Optional[ParticleConfig] = None
    run: RunSettings = field(default_factory=RunSettings)
    analysis: Dict[str, Any] = field(default_factory=dict)
    output_dir: str = "results"

    @property
    def target(self) -> Union[ModelSpec, ParticleConfig]:
        if self.model is not None:
            return self.model
        if self.particles is not None:
            return self.particles
        raise ConfigurationError(f"Experiment '{self.kind}' needs a 'model' or 'particles' section")

    def require_model(self) -> ModelSpec:
        if self.model is None:
            raise ConfigurationError(f"Experiment '{self.kind}' needs a 'model' section")
        return self.model

    def require_particles(self) -> ParticleConfig:
        if self.particles is None:
            raise ConfigurationError(f"Experiment '{self.kind}' needs a 'particles' section")
        return self.particles

    def to_dict(self) -> Dict[str, Any]:
        """Canonical mapping; output_dir is left out so it does not affect the digest."""
        data: Dict[str, Any] = {
            "kind": self.kind,
            "run": self.run.to_dict(),
            "analysis": self.analysis,
        }
        if self.model is not None:
            data["model"] = self.model.to_dict()
        if self.particles is not None:
            data["particles"] = self.particles.to_dict()
        return data

    def digest(self) -> str:
        """SHA-256 of the canonical config JSON."""
        text = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        """
        Parse a raw config mapping.

        Raises:
            ConfigurationError: On unknown keys, a missing kind or malformed sections
        """
        if not isinstance(data, dict):
            raise ConfigurationError("Experiment config must be a mapping")
        _reject_unknown(data, TOP_LEVEL_KEYS, "top-level")

        kind = data.get("kind")
        if kind not in EXPERIMENT_KINDS:
            raise ConfigurationError(
                f"Unknown experiment kind: {kind}. Supported kinds: {', '.join(EXPERIMENT_KINDS)}"
            )
        if "model" in data and "particles" in data:
            raise ConfigurationError("Give either 'model' or 'particles', not both")

        model = ModelSpec.from_dict(data["model"]) if "model" in data else None
        particles = (ParticleConfig.from_dict(data["particles"])
                     if "particles" in data else None)
        if kind in TARGET_KINDS and model is None and particles is None:
            raise ConfigurationError(f"Experiment '{kind}' needs a 'model' or 'particles' section")

        return cls(
            kind=kind,
            model=model,
            particles=particles,
            run=_parse_run(data.get("run") or {}),
            analysis=_parse_analysis(kind, data.get("analysis") or {}),
            output_dir=str(data.get("output_dir", "results")),
        )


def _reject_unknown(data: Dict[str, Any], allowed: Iterable[str], section: str) -> None:
    unknown = set(data) - set(allowed)
    if unknown:
        raise ConfigurationError(f"Unknown {section} keys: {', '.join(sorted(map(str, unknown)))}")


def _parse_run(raw: Dict[str, Any]) -> RunSettings:
    if not isinstance(raw, dict):
        raise ConfigurationError("'run' must be a mapping")
    _reject_unknown(raw, RUN_KEYS, "run")
    settings = RunSettings()
    try:
        if "dt" in raw:
            settings.dt = float(raw["dt"])
        if "T" in raw:
            settings.T = float(raw["T"])
    except (TypeError, ValueError):
        raise ConfigurationError("run.dt and run.T must be real numbers") from None
    for key in ("n_paths", "seed"):
        if key in raw:
            value = raw[key]
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigurationError(f"run.{key} must be an integer, got {value!r}")
            setattr(settings, key, value)
    if settings.n_paths < 1:
        raise ConfigurationError(f"run.n_paths must be >= 1, got {settings.n_paths}")
    if not 0 <= settings.seed < 2 ** 64:
        raise ConfigurationError(
            f"run.seed must be an unsigned 64-bit integer, got {settings.seed}")
    if raw.get("scheme") is not None:
        settings.scheme = parse_scheme(raw["scheme"])
    return settings


def _parse_analysis(kind: str, raw: Dict[str, Any]) -> Dict[str, Any]:
    if not isinstance(raw, dict):
        raise ConfigurationError("'analysis' must be a mapping")
    defaults = ANALYSIS_DEFAULTS[kind]
    _reject_unknown(raw, defaults, f"analysis ({kind})")
    merged = copy.deepcopy(defaults)
    for key, value in raw.items():
        if value is None and defaults[key] is None:
            merged[key] = None
        else:
            merged[key] = _check_analysis_value(f"analysis.{key}", ANALYSIS_TYPES[key], value)
    return merged


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _real(name: str, value: Any) -> float:
    # YAML 1.1 reads 1e-3 as a string, so numeric strings are accepted
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise ConfigurationError(f"{name} must be a real number, got {value!r}")
    try:
        return float(value)
    except ValueError:
        raise ConfigurationError(f"{name} must be a real number, got {value!r}") from None


def _reals(name: str, value: Any) -> list:
    if not isinstance(value, list) or not value:
        raise ConfigurationError(f"{name} must be a non-empty list of reals, got {value!r}")
    return [_real(f"{name}[{i}]", v) for i, v in enumerate(value)]


def _check_analysis_value(name: str, kind: str, value: Any) -> Any:
    """
    Type-check one analysis value and return it in canonical form.

    Raises:
        ConfigurationError: If the value does not have the expected type
    """
    if kind == "int":
        if not _is_int(value):
            raise ConfigurationError(f"{name} must be an integer, got {value!r}")
        return value
    if kind == "real":
        return _real(name, value)
    if kind == "bool":
        if not isinstance(value, bool):
            raise ConfigurationError(f"{name} must be true or false, got {value!r}")
        return value
    if kind == "str":
        if not isinstance(value, str):
            raise ConfigurationError(f"{name} must be a string, got {value!r}")
        return value
    if kind == "vector":
        return _reals(name, value)
    if kind == "interval":
        values = _reals(name, value)
        if len(values) != 2:
            raise ConfigurationError(f"{name} must be [start, end], got {value!r}")
        return values
    if kind == "vector_pair":
        if not isinstance(value, list) or len(value) != 2:
            raise ConfigurationError(f"{name} must hold exactly two initial states")
        return [_reals(f"{name}[{i}]", v) for i, v in enumerate(value)]
    if kind == "int_list":
        if not isinstance(value, list) or not all(_is_int(v) for v in value):
            raise ConfigurationError(f"{name} must be a list of integers, got {value!r}")
        return value
    raise ConfigurationError(f"{name} has no known type")


# ==============================================================================
# Loading and overrides
# ==============================================================================

def load_raw_config(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Read a YAML/JSON config file.

    Raises:
        ConfigurationError: If the file is missing or cannot be parsed
    """
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"Config file not found: {path}")
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"Cannot parse {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path} does not contain a mapping")
    return data


def apply_override(data: Dict[str, Any], assignment: str) -> None:
    """
    Apply one 'a.b.c=value' override in place; value is parsed as YAML.

    Raises:
        ConfigurationError: If the assignment is malformed
    """
    if "=" not in assignment:
        raise ConfigurationError(f"Override must look like key=value, got {assignment!r}")
    dotted, raw_value = assignment.split("=", 1)
    keys = [k for k in dotted.strip().split(".") if k]
    if not keys:
        raise ConfigurationError(f"Override has an empty key: {assignment!r}")
    try:
        value = yaml.safe_load(raw_value) if raw_value.strip() else None
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"Cannot parse override value {raw_value!r}: {exc}") from exc

    node = data
    for key in keys[:-1]:
        child = node.get(key)
        if child is None:
            child = node[key] = {}
        if not isinstance(child, dict):
            raise ConfigurationError(f"Cannot set {dotted}: '{key}' is not a mapping")
        node = child
    node[keys[-1]] = value


def build_config(
    config_path: Optional[Union[str, Path]],
    overrides: Iterable[str] = (),
    kind: Optional[str] = None,
    seed: Optional[int] = None,
    output_dir: Optional[str] = None,
) -> ExperimentConfig:
    """
    Load a config file, apply --set overrides and the dedicated flags, then parse it.

    Args:
        config_path: YAML/JSON file, or None to start from an empty mapping
        overrides: 'a.b=value' assignments
        kind: Kind implied by the subcommand; a different kind in the file is an error
        seed: Replaces run.seed
        output_dir: Replaces output_dir
    """
    data = load_raw_config(config_path) if config_path is not None else {}
    for assignment in overrides:
        apply_override(data, assignment)
    if kind is not None:
        found = data.setdefault("kind", kind)
        if found != kind:
            raise ConfigurationError(f"Config is for '{found}' but the command is '{kind}'")
    if seed is not None:
        run = data.get("run") or {}
        run["seed"] = seed
        data["run"] = run
    if output_dir is not None:
        data["output_dir"] = output_dir
    return ExperimentConfig.from_dict(data)
