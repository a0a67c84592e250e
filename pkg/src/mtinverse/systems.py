"""Material systems: components, dispersion, measurement band and sampling floors.

Three reference systems are built in (``ms1``, ``ms2``, ``ms3``).  Custom
systems are read from JSON validated against :data:`CONFIG_SCHEMA`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import jsonschema
import numpy as np

from .errors import ConfigError
from .forward import SpheroidShape, effective_permittivity, normalized_pq
from .permittivity import (
    ColeCole,
    ColeColeUDR,
    Constant,
    Debye,
    DispersionModel,
    evaluate_hz,
    model_from_dict,
    model_to_dict,
)

_POSITIVE = {"type": "number", "exclusiveMinimum": 0}
_NONNEG = {"type": "number", "minimum": 0}


def _model_schema(kind, required, optional=()):
    props = {"type": {"const": kind}}
    props.update({name: spec for name, spec in required})
    props.update({name: spec for name, spec in optional})
    return {
        "type": "object",
        "additionalProperties": False,
        "required": ["type", *[name for name, _ in required]],
        "properties": props,
    }


_RELAX = [("eps_inf", _POSITIVE), ("delta_eps", _NONNEG), ("tau", _POSITIVE)]
_BETA = ("beta", {"type": "number", "minimum": 0, "exclusiveMaximum": 1})

MODEL_SCHEMA = {
    "oneOf": [
        _model_schema("constant", [("re", _POSITIVE)], [("im", _NONNEG)]),
        _model_schema("debye", _RELAX, [("s", _NONNEG)]),
        _model_schema("cole_cole", _RELAX + [_BETA], [("s_dc", _NONNEG)]),
        _model_schema(
            "cole_cole_udr",
            _RELAX + [_BETA, ("s_dc", _NONNEG), ("A", _NONNEG),
                      ("s_exp", {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1})],
        ),
    ]
}

CAMPAIGN_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "m_values": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "samples": {"type": "integer", "minimum": 1},
        "noise": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"delta_R": _NONNEG, "delta_I": _NONNEG},
        },
        "seed": {"type": "integer", "minimum": 0},
        "workers": {"type": "integer", "minimum": 1},
    },
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "material system",
    "type": "object",
    "additionalProperties": False,
    "required": ["name", "components", "band"],
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "components": {
            "type": "array",
            "minItems": 2,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["label", "model"],
                "properties": {
                    "label": {"type": "string"},
                    "model": MODEL_SCHEMA,
                    "aspect_ratio": _POSITIVE,
                },
            },
        },
        "normalizer_index": {"type": "integer", "minimum": 0},
        "band": {
            "type": "object",
            "additionalProperties": False,
            "required": ["f_low", "f_high"],
            "properties": {"f_low": _POSITIVE, "f_high": _POSITIVE},
        },
        "single_frequency": _POSITIVE,
        "sample_floor": {"type": "array", "items": _NONNEG},
        "campaign": CAMPAIGN_SCHEMA,
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"csv": {"type": "string"}, "aggregate": {"type": "string"}},
        },
    },
}


@dataclass(frozen=True)
class Component:
    label: str
    model: DispersionModel
    shape: SpheroidShape = SpheroidShape(1.0)


@dataclass
class MaterialSystem:
    """Ordered components (index 0 is the matrix) plus measurement settings."""

    name: str
    components: List[Component]
    band: Tuple[float, float]
    single_frequency: Optional[float] = None
    sample_floor: Optional[np.ndarray] = None
    normalizer_index: int = 0
    campaign: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.components)
        if n < 2:
            raise ConfigError("a material system needs at least two components")
        if not 0 <= self.normalizer_index < n:
            raise ConfigError(f"normalizer_index {self.normalizer_index} out of range for {n} components")
        f_low, f_high = self.band
        if not 0 < f_low <= f_high:
            raise ConfigError(f"invalid band {self.band}")
        self.band = (float(f_low), float(f_high))
        if self.single_frequency is None:
            self.single_frequency = self.band[0]
        if self.sample_floor is None:
            self.sample_floor = np.zeros(n)
        self.sample_floor = np.asarray(self.sample_floor, dtype=float)
        if self.sample_floor.shape != (n,):
            raise ConfigError(f"sample_floor needs {n} entries")
        if np.any(self.sample_floor < 0) or self.sample_floor.sum() >= 1.0:
            raise ConfigError("sample_floor entries must be >= 0 and sum to < 1")

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def labels(self) -> List[str]:
        return [c.label for c in self.components]

    @property
    def shapes(self) -> List[SpheroidShape]:
        return [c.shape for c in self.components]

    @property
    def all_spheres(self) -> bool:
        return all(s.is_sphere for s in self.shapes[1:])

    def permittivities(self, frequency_hz: float) -> np.ndarray:
        return np.array([evaluate_hz(c.model, frequency_hz) for c in self.components], dtype=complex)

    def normalizer_permittivity(self, frequency_hz: float) -> complex:
        return complex(evaluate_hz(self.components[self.normalizer_index].model, frequency_hz))

    def effective(self, phi: Sequence[float], frequency_hz: float) -> complex:
        """Un-normalized effective permittivity at ``frequency_hz``."""
        return effective_permittivity(self.permittivities(frequency_hz), phi, self.shapes)

    def pq(self, frequency_hz: float):
        if not self.all_spheres:
            raise ConfigError("the linear-fractional form exists only for spherical inclusions")
        return normalized_pq(self.permittivities(frequency_hz), self.normalizer_index, frequency_hz)

    def to_config(self) -> dict:
        comps = []
        for c in self.components:
            item = {"label": c.label, "model": model_to_dict(c.model)}
            if not c.shape.is_sphere:
                item["aspect_ratio"] = c.shape.alpha
            comps.append(item)
        cfg = {
            "name": self.name,
            "components": comps,
            "normalizer_index": self.normalizer_index,
            "band": {"f_low": self.band[0], "f_high": self.band[1]},
            "single_frequency": self.single_frequency,
            "sample_floor": [float(v) for v in self.sample_floor],
        }
        if self.campaign:
            cfg["campaign"] = self.campaign
        if self.output:
            cfg["output"] = self.output
        return cfg


def validate_config(data: dict) -> None:
    try:
        jsonschema.validate(data, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {where}: {exc.message}") from None


def system_from_config(data: dict) -> MaterialSystem:
    validate_config(data)
    comps = [
        Component(
            label=c["label"],
            model=model_from_dict(c["model"]),
            shape=SpheroidShape(c.get("aspect_ratio", 1.0)),
        )
        for c in data["components"]
    ]
    return MaterialSystem(
        name=data["name"],
        components=comps,
        band=(data["band"]["f_low"], data["band"]["f_high"]),
        single_frequency=data.get("single_frequency"),
        sample_floor=data.get("sample_floor"),
        normalizer_index=data.get("normalizer_index", 0),
        campaign=data.get("campaign", {}),
        output=data.get("output", {}),
    )


def load_system(path) -> MaterialSystem:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return system_from_config(data)


GLASS = Constant(5.5, 0.05)
AIR = Constant(1.0006)
FLOOR = (0.65, 0.10, 0.02)
GPR_BAND = (0.4e9, 3.0e9)


def ms1() -> MaterialSystem:
    """Epoxy matrix (Debye), glass microspheres, pores."""
    return MaterialSystem(
        name="ms1",
        components=[
            Component("epoxy", Debye(eps_inf=2.90, delta_eps=0.6, tau=1.5e-10, s=1e-12)),
            Component("glass", GLASS),
            Component("pores", AIR),
        ],
        band=GPR_BAND,
        single_frequency=2.0e9,
        sample_floor=FLOOR,
    )


def ms2() -> MaterialSystem:
    """Aggregate matrix, cement paste (Cole-Cole), pores."""
    return MaterialSystem(
        name="ms2",
        components=[
            Component("aggregate", GLASS),
            Component("cement_paste", ColeCole(eps_inf=4.2, delta_eps=0.8, tau=2.0e-10,
                                               beta=0.35, s_dc=2.0e-3)),
            Component("pores", AIR),
        ],
        band=GPR_BAND,
        single_frequency=2.0e9,
        sample_floor=FLOOR,
    )


def ms3() -> MaterialSystem:
    """Carbon-loaded epoxy matrix (Cole-Cole + UDR), glass microspheres, pores."""
    return MaterialSystem(
        name="ms3",
        components=[
            Component("carbon_epoxy", ColeColeUDR(eps_inf=3.0, delta_eps=150.0, tau=2.0e-5, beta=0.35,
                                                  s_dc=3.0e-4, A=1.0e-9, s_exp=0.8)),
            Component("glass", GLASS),
            Component("pores", AIR),
        ],
        band=(0.5e6, 1.0e6),
        single_frequency=0.5e6,
        sample_floor=FLOOR,
    )


BUILTIN = {"ms1": ms1, "ms2": ms2, "ms3": ms3}


def builtin_system(name: str) -> MaterialSystem:
    try:
        return BUILTIN[name.lower().replace("-", "")]()
    except KeyError:
        raise ConfigError(f"unknown system {name!r}; choose from {sorted(BUILTIN)}") from None
