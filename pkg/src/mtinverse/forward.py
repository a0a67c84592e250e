"""Eshelby-Mori-Tanaka effective permittivity and its linear-fractional form.

Component 0 is always the matrix.  For spherical inclusions the normalized
effective permittivity is the ratio ``(p . phi) / (q . phi)`` of two linear
forms whose coefficients depend only on the contrasts
``r_i = eps_i / eps_0 - 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import SingularDenominator

SPHERE_TOL = 1e-6


@dataclass(frozen=True)
class SpheroidShape:
    """Spheroid of aspect ratio ``alpha = l / d``; ``alpha = 1`` is a sphere."""

    alpha: float = 1.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"aspect ratio must be > 0, got {self.alpha}")

    @property
    def is_sphere(self) -> bool:
        return abs(self.alpha - 1.0) < SPHERE_TOL


SPHERE = SpheroidShape(1.0)


@dataclass(frozen=True)
class PQVectors:
    """Numerator and denominator coefficients at one frequency."""

    p: np.ndarray
    q: np.ndarray
    frequency: Optional[float] = None

    @property
    def n(self) -> int:
        return len(self.p)

    def ratio(self, phi) -> complex:
        phi = np.asarray(phi, dtype=float)
        return complex(self.p @ phi / (self.q @ phi))


def depolarization_Q(shape: SpheroidShape) -> float:
    """Transverse depolarization factor of a spheroid.

    The depolarization tensor is ``diag(Q, Q, 1 - 2Q)``.  Within
    ``SPHERE_TOL`` of ``alpha = 1`` the exact sphere value 1/3 is returned to
    avoid cancellation in the closed forms.
    """
    a = float(shape.alpha)
    if shape.is_sphere:
        return 1.0 / 3.0
    if a > 1.0:
        e2 = a * a - 1.0
        return a / (2.0 * e2**1.5) * (a * math.sqrt(e2) - math.acosh(a))
    e2 = 1.0 - a * a
    return a / (2.0 * e2**1.5) * (math.acos(a) - a * math.sqrt(e2))


def depolarization_tensor(shape: SpheroidShape) -> np.ndarray:
    Q = depolarization_Q(shape)
    return np.diag([Q, Q, 1.0 - 2.0 * Q])


def concentration_R(eps_i: complex, eps_0: complex, shape: SpheroidShape = SPHERE) -> complex:
    """Orientation-averaged concentration factor of an inclusion phase."""
    if eps_0 == 0:
        raise SingularDenominator("matrix permittivity is zero")
    contrast = (eps_i - eps_0) / eps_0
    if shape.is_sphere:
        brackets = [1.0 + contrast / 3.0] * 3
    else:
        brackets = [1.0 + A * contrast for A in np.diag(depolarization_tensor(shape))]
    total = 0j
    for b in brackets:
        if b == 0:
            raise SingularDenominator(f"concentration bracket vanished for contrast {contrast}")
        total += 1.0 / b
    return complex(total / 3.0)


def effective_permittivity(
    eps: Sequence[complex],
    phi: Sequence[float],
    shapes: Optional[Sequence[SpheroidShape]] = None,
) -> complex:
    """Mori-Tanaka effective permittivity (un-normalized).

    Parameters
    ----------
    eps : sequence of complex
        Component permittivities at one frequency, matrix first.
    phi : sequence of float
        Volume fractions, same order.
    shapes : sequence of SpheroidShape, optional
        Inclusion shapes (randomly oriented).  The entry for the matrix is
        ignored.  Defaults to spheres.
    """
    eps = np.asarray(eps, dtype=complex)
    phi = np.asarray(phi, dtype=float)
    if shapes is None:
        shapes = [SPHERE] * len(eps)
    R = np.array([1.0] + [concentration_R(e, eps[0], s) for e, s in zip(eps[1:], shapes[1:])])
    den = np.sum(phi * R)
    if den == 0:
        raise SingularDenominator("concentration-weighted volume vanished")
    return complex(np.sum(phi * eps * R) / den)


def contrasts(eps: Sequence[complex]) -> np.ndarray:
    """``r_i = eps_i / eps_0 - 1`` for the inclusion phases."""
    eps = np.asarray(eps, dtype=complex)
    return eps[1:] / eps[0] - 1.0


def build_pq(r: Sequence[complex], frequency: Optional[float] = None) -> PQVectors:
    """Coefficient vectors of the spherical linear-fractional form.

    ``(p . phi) / (q . phi)`` equals the effective permittivity divided by
    the matrix permittivity.
    """
    r = np.asarray(r, dtype=complex)
    if r.ndim != 1 or len(r) < 1:
        raise ValueError("need at least one inclusion contrast (n >= 2)")
    k = len(r)
    shifted = 3.0 + r
    # product over j != i without dividing, so 3 + r_i = 0 stays harmless
    others = np.array([np.prod(np.delete(shifted, i)) for i in range(k)])
    p0 = np.prod(shifted)
    p = np.concatenate(([p0], 3.0 * (1.0 + r) * others))
    q = np.concatenate(([p0], 3.0 * others))
    return PQVectors(p=p, q=q, frequency=frequency)


def normalized_pq(eps: Sequence[complex], normalizer_index: int = 0,
                  frequency: Optional[float] = None) -> PQVectors:
    """p/q vectors whose ratio is the effective permittivity over ``eps[normalizer_index]``.

    Contrasts stay relative to the matrix, as the model requires; a
    normalizer other than the matrix only rescales ``p`` by
    ``eps_0 / eps_normalizer``.
    """
    eps = np.asarray(eps, dtype=complex)
    pq = build_pq(contrasts(eps), frequency)
    if normalizer_index == 0:
        return pq
    scale = eps[0] / eps[normalizer_index]
    return PQVectors(p=pq.p * scale, q=pq.q, frequency=frequency)
