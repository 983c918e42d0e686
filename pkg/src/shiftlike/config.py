"""System configuration files and the built-in system registry."""

from __future__ import annotations

import json
import math
from importlib import resources
from pathlib import Path

import jsonschema

from .errors import ConfigError
from .system_model import (
    DensityLineSystem,
    DensityPiece,
    ExtensionRule,
    MeasureProfile,
    QuadratureConfig,
)

LOG2 = math.log(2.0)


def load_schema(name: str) -> dict:
    return json.loads(resources.files("shiftlike.schemas").joinpath(name).read_text())


def _bound(value, path):
    if value == "-inf":
        return -math.inf
    if value == "inf":
        return math.inf
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    raise ConfigError(f"expected a number, '-inf' or 'inf', got {value!r}", path)


def system_from_config(data) -> DensityLineSystem | MeasureProfile:
    """Build a system from a parsed config; raises :class:`ConfigError` with a field path."""
    try:
        jsonschema.validate(data, load_schema("system.schema.json"))
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(exc.message, path) from None

    if data["kind"] == "density":
        pieces = []
        for i, raw in enumerate(data["pieces"]):
            where = f"pieces/{i}"
            try:
                pieces.append(DensityPiece(
                    _bound(raw["from"], where + "/from"), _bound(raw["to"], where + "/to"),
                    float(raw["c"]), float(raw["a"]),
                ))
            except ValueError as exc:
                if isinstance(exc, ConfigError):
                    raise
                raise ConfigError(str(exc), where) from None
        quad = data.get("quadrature", {})
        quadrature = QuadratureConfig(
            quad.get("method", QuadratureConfig.method),
            float(quad.get("abs_tol", QuadratureConfig.abs_tol)),
            float(quad.get("rel_tol", QuadratureConfig.rel_tol)),
        )
        try:
            return DensityLineSystem(tuple(pieces), quadrature)
        except ValueError as exc:
            raise ConfigError(str(exc), "pieces") from None

    log_mass = data["log_mass"]
    try:
        mapping = {int(k): float(v) for k, v in log_mass.items()}
    except ValueError:
        raise ConfigError("keys must be integers", "log_mass") from None
    try:
        return MeasureProfile.from_mapping(mapping, ExtensionRule(data.get("extension", "reject")))
    except ValueError as exc:
        raise ConfigError(str(exc), "log_mass") from None


def _forward_dominant(p: float) -> MeasureProfile:
    # w_k = 2 for k >= 1 and 1 otherwise, i.e. log m_k = -p k log 2 for k >= 0.
    return MeasureProfile.from_mapping({-1: 0.0, 0: 0.0, 1: -p * LOG2}, ExtensionRule.GEOMETRIC)


BUILTIN_SYSTEMS = {
    "paper-example-sec4": lambda p: DensityLineSystem.paper_example(),
    "unweighted": lambda p: MeasureProfile.constant(0.0, (-1, 1)),
    "forward-dominant": _forward_dominant,
    "constant": lambda p: DensityLineSystem.uniform(1.0),
}


def resolve_system(spec: str, p: float = 2.0):
    """``spec`` is a built-in name or a path to a JSON config file.

    Returns ``(system_id, system)``.
    """
    if spec in BUILTIN_SYSTEMS:
        return spec, BUILTIN_SYSTEMS[spec](p)
    path = Path(spec)
    if not path.is_file():
        raise ConfigError(f"unknown system {spec!r} (not a built-in name or a file)", "--system")
    text = path.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})",
                          str(path)) from None
    return path.stem, system_from_config(data)
