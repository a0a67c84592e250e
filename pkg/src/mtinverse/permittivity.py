"""Complex relative permittivities and the dispersion models of the components.

Sign convention: loss is carried by a *positive* imaginary part, i.e. the
``exp(-i omega t)`` time convention.  A Debye term is written
``delta_eps / (1 - i omega tau)`` and a conductivity ``s`` contributes
``+ i s / (omega eps_vacuum)``.  Every complex number in the package follows
this convention.

Frequencies enter the public API in Hz; the models themselves are evaluated at
the angular frequency ``omega = 2 pi f``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from typing import Union

import numpy as np

from .errors import ConfigError, NonPositiveFrequency

#: Vacuum permittivity in F/m.
EPS_VACUUM = 8.854187817e-12

# A complex permittivity is represented by a plain Python ``complex``.
ComplexPermittivity = complex


def angular(frequency_hz):
    return 2.0 * math.pi * np.asarray(frequency_hz, dtype=float)


def _check_omega(omega):
    if np.any(np.asarray(omega) <= 0):
        raise NonPositiveFrequency(
            f"angular frequency must be > 0 for a lossy model, got {omega!r}"
        )


def _as_result(value):
    value = np.asarray(value, dtype=complex)
    return complex(value) if value.ndim == 0 else value


@dataclass(frozen=True)
class Constant:
    """Frequency independent permittivity."""

    re: float
    im: float = 0.0

    def __post_init__(self):
        if not self.re > 0:
            raise ConfigError(f"constant permittivity needs re > 0, got {self.re}")
        if self.im < 0:
            raise ConfigError(f"constant permittivity needs im >= 0, got {self.im}")

    @property
    def eps(self) -> complex:
        return complex(self.re, self.im)

    def at(self, omega):
        if np.any(np.asarray(omega) < 0):
            raise NonPositiveFrequency(f"omega must be >= 0, got {omega!r}")
        return _as_result(np.full(np.shape(omega), self.eps, dtype=complex))


@dataclass(frozen=True)
class Debye:
    """Single Debye relaxation with an ohmic conductivity ``s`` (S/m)."""

    eps_inf: float
    delta_eps: float
    tau: float
    s: float = 0.0

    def __post_init__(self):
        _validate_relaxation(self.eps_inf, self.delta_eps, self.tau)
        if self.s < 0:
            raise ConfigError("conductivity s must be >= 0")

    def at(self, omega):
        _check_omega(omega)
        omega = np.asarray(omega, dtype=float)
        eps = (
            self.eps_inf
            + self.delta_eps / (1.0 - 1j * omega * self.tau)
            + 1j * self.s / (omega * EPS_VACUUM)
        )
        return _as_result(eps)


@dataclass(frozen=True)
class ColeCole:
    """Cole-Cole relaxation with DC conductivity.

    ``beta = 0`` reduces exactly to :class:`Debye`.
    """

    eps_inf: float
    delta_eps: float
    tau: float
    beta: float
    s_dc: float = 0.0

    def __post_init__(self):
        _validate_relaxation(self.eps_inf, self.delta_eps, self.tau)
        if not 0.0 <= self.beta < 1.0:
            raise ConfigError(f"beta must lie in [0, 1), got {self.beta}")
        if self.s_dc < 0:
            raise ConfigError("s_dc must be >= 0")

    def _relaxation(self, omega):
        # principal branch; -i*omega*tau sits on the negative imaginary axis
        x = (-1j * omega * self.tau) ** (1.0 - self.beta)
        return self.delta_eps / (1.0 + x)

    def at(self, omega):
        _check_omega(omega)
        omega = np.asarray(omega, dtype=float)
        eps = (
            self.eps_inf
            + self._relaxation(omega)
            + 1j * self.s_dc / (omega * EPS_VACUUM)
        )
        return _as_result(eps)


@dataclass(frozen=True)
class ColeColeUDR(ColeCole):
    """Cole-Cole relaxation plus a universal dielectric response term.

    The extra loss is ``i A omega**s_exp / (omega eps_vacuum)``.
    """

    A: float = 0.0
    s_exp: float = 0.5

    def __post_init__(self):
        super().__post_init__()
        if self.A < 0:
            raise ConfigError("A must be >= 0")
        if not 0.0 < self.s_exp < 1.0:
            raise ConfigError(f"s_exp must lie in (0, 1), got {self.s_exp}")

    def at(self, omega):
        _check_omega(omega)
        omega = np.asarray(omega, dtype=float)
        loss = (self.s_dc + self.A * omega**self.s_exp) / (omega * EPS_VACUUM)
        return _as_result(self.eps_inf + self._relaxation(omega) + 1j * loss)


def _validate_relaxation(eps_inf, delta_eps, tau):
    if not eps_inf > 0:
        raise ConfigError(f"eps_inf must be > 0, got {eps_inf}")
    if delta_eps < 0:
        raise ConfigError(f"delta_eps must be >= 0, got {delta_eps}")
    if not tau > 0:
        raise ConfigError(f"tau must be > 0, got {tau}")


DispersionModel = Union[Constant, Debye, ColeCole, ColeColeUDR]

MODEL_TYPES = {
    "constant": Constant,
    "debye": Debye,
    "cole_cole": ColeCole,
    "cole_cole_udr": ColeColeUDR,
}
_TYPE_NAMES = {cls: name for name, cls in MODEL_TYPES.items()}


def evaluate(model: DispersionModel, omega):
    """Complex permittivity of ``model`` at angular frequency ``omega`` (rad/s)."""
    return model.at(omega)


def evaluate_hz(model: DispersionModel, frequency_hz):
    return model.at(angular(frequency_hz))


def model_from_dict(data: dict) -> DispersionModel:
    """Build a dispersion model from its JSON form (``type`` discriminator)."""
    data = dict(data)
    try:
        cls = MODEL_TYPES[data.pop("type")]
    except KeyError as exc:
        raise ConfigError(f"unknown or missing dispersion model type: {exc}") from None
    allowed = {f.name for f in fields(cls)}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown fields for {cls.__name__}: {sorted(unknown)}")
    try:
        return cls(**{k: float(v) for k, v in data.items()})
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def model_to_dict(model: DispersionModel) -> dict:
    return {"type": _TYPE_NAMES[type(model)], **asdict(model)}
