"""Identifiability diagnostics for the multi-frequency inversion.

The sensitivity matrix ``G`` maps a tangent perturbation of the volume
fractions (expressed in an orthonormal basis of ``{dphi : sum(dphi) = 0}``)
to the scaled real and imaginary residual changes at each frequency.  Its
rank decides identifiability and its smallest singular value controls the
recovery error bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import SingularSensitivity

RANK_RTOL = 1e-10
SIGMA_FLOOR = 1e-14


def tangent_basis(n: int) -> np.ndarray:
    """Orthonormal ``n x (n-1)`` basis of the simplex tangent space.

    ``V = S (S^T S)^(-1/2)`` with ``S = [I; -1^T]``.  ``S^T S = I + 1 1^T``
    has eigenvalue ``n`` along ``1`` and ``1`` elsewhere, which gives the
    inverse square root in closed form.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    k = n - 1
    S = np.vstack([np.eye(k), -np.ones((1, k))])
    c = (1.0 / math.sqrt(n) - 1.0) / k
    inv_sqrt = np.eye(k) + c * np.ones((k, k))
    return S @ inv_sqrt


@dataclass
class SensitivityReport:
    G: np.ndarray
    singular_values: np.ndarray
    rank: int
    sigma_min: float
    bound: Optional[float] = None

    @property
    def sigma_max(self) -> float:
        return float(self.singular_values[0]) if len(self.singular_values) else 0.0

    @property
    def identifiable(self) -> bool:
        return self.rank == self.G.shape[1]

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "sigma_min": self.sigma_min,
            "sigma_max": self.sigma_max,
            "identifiable": self.identifiable,
            "bound": self.bound,
        }


def sensitivity_matrix(A, B, q_max) -> np.ndarray:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    scale = 1.0 / np.asarray(q_max, dtype=float)[:, None]
    V = tangent_basis(A.shape[1])
    return np.vstack([scale * A, scale * B]) @ V


def singular_values(G: np.ndarray) -> np.ndarray:
    """All ``G.shape[1]`` singular values, descending, zero padded for wide G."""
    k = G.shape[1]
    s = np.linalg.svd(G, compute_uv=False) if G.size else np.zeros(0)
    return np.concatenate([s, np.zeros(k - len(s))])


def sensitivity(A, B, q_max) -> SensitivityReport:
    """Sensitivity matrix, numerical rank and smallest singular value.

    ``A``, ``B`` are the ``m x n`` real and imaginary parts of the residual
    coefficients and ``q_max`` the per-frequency scale.
    """
    q_max = np.asarray(q_max, dtype=float)
    if np.any(q_max <= 0):
        raise ValueError("q_max entries must be positive")
    G = sensitivity_matrix(A, B, q_max)
    s = singular_values(G)
    two_m, k = G.shape
    threshold = RANK_RTOL * (s[0] if len(s) else 0.0) * max(two_m, k)
    rank = int(np.sum(s > threshold)) if len(s) and s[0] > 0 else 0
    return SensitivityReport(G=G, singular_values=s, rank=rank, sigma_min=float(s[-1]))


def error_bound(t_star, sigma_min, m, delta_R, delta_I, eps0_modulus) -> float:
    """Upper bound on the volume-fraction error (infinity and 2-norm).

    ``sqrt(2m) / sigma_min * (t_star + 2 (delta_R + delta_I) / |eps_0|)``.
    For a dispersive normalizer pass the smallest modulus over the measured
    frequencies.
    """
    if sigma_min <= SIGMA_FLOOR:
        raise SingularSensitivity(f"sigma_min={sigma_min:g}: no finite error bound")
    noise = 2.0 * (delta_R + delta_I) / eps0_modulus
    return math.sqrt(2 * m) / sigma_min * (t_star + noise)
