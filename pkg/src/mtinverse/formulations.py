"""Linear programs that recover volume fractions from measured permittivities.

Two formulations are provided:

* ``assemble_cc``: one real measurement.  The absolute deviation of the
  linear-fractional model from the measurement is minimized after the
  Charnes-Cooper substitution ``z = s phi_inc``, ``s = 1 / (q . phi)``.
* ``assemble_multifreq``: any number of complex measurements.  The numerator
  residuals ``(p - eps_hat q) . phi`` are bounded in real and imaginary part
  by ``c`` and ``d``, and ``c + d <= t q_max`` per frequency; ``t`` is
  minimized.  ``t`` therefore measures the scaled numerator residual, not
  ``|eps_bar - eps_hat|`` directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .diagnostics import SensitivityReport, sensitivity
from .errors import DegenerateScale, InfeasibleMeasurement
from .forward import PQVectors
from .lp import LPProblem, LPSolution, solve_lp

CC = "charnes_cooper"
MULTIFREQ = "multifreq"
CLAMP = 1e-10


@dataclass
class MeasurementSet:
    """Normalized complex measurements at increasing frequencies (Hz)."""

    frequencies: np.ndarray
    eps_hat: np.ndarray
    normalizer_index: int = 0

    def __post_init__(self):
        self.frequencies = np.atleast_1d(np.asarray(self.frequencies, dtype=float))
        self.eps_hat = np.atleast_1d(np.asarray(self.eps_hat, dtype=complex))
        if len(self.frequencies) < 1:
            raise ValueError("need at least one measurement")
        if len(self.frequencies) != len(self.eps_hat):
            raise ValueError("frequencies and eps_hat differ in length")
        if np.any(np.diff(self.frequencies) <= 0):
            raise ValueError("frequencies must be strictly increasing")
        if not np.all(np.isfinite(self.eps_hat)):
            raise ValueError("measurements must be finite")

    @property
    def m(self) -> int:
        return len(self.frequencies)

    @classmethod
    def from_raw(cls, system, frequencies, raw_eps) -> "MeasurementSet":
        """Normalize raw composite permittivities by the system's normalizer."""
        frequencies = np.atleast_1d(np.asarray(frequencies, dtype=float))
        raw_eps = np.atleast_1d(np.asarray(raw_eps, dtype=complex))
        order = np.argsort(frequencies, kind="stable")
        frequencies, raw_eps = frequencies[order], raw_eps[order]
        norm = np.array([system.normalizer_permittivity(f) for f in frequencies])
        return cls(frequencies, raw_eps / norm, system.normalizer_index)


@dataclass
class CharnesCooperLP:
    x: np.ndarray
    y: np.ndarray
    p0: float
    eps_hat: float
    problem: LPProblem

    @property
    def n(self) -> int:
        return len(self.x) + 1


@dataclass
class EpigraphLP:
    A: np.ndarray
    B: np.ndarray
    q_max: np.ndarray
    problem: LPProblem

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]


@dataclass
class RecoveryReport:
    phi_star: np.ndarray
    t_star: float
    status: str
    formulation: str
    solution: Optional[LPSolution] = field(default=None, repr=False)
    diagnostics: Optional[SensitivityReport] = field(default=None, repr=False)

    def to_dict(self) -> dict:
        out = {
            "formulation": self.formulation,
            "status": self.status,
            "phi_star": [float(v) for v in self.phi_star],
            "t_star": float(self.t_star),
        }
        if self.diagnostics is not None:
            out["diagnostics"] = self.diagnostics.to_dict()
        return out


def _real_vector(v, what):
    v = np.asarray(v)
    if np.iscomplexobj(v):
        if np.max(np.abs(v.imag), initial=0.0) > 1e-12 * (1.0 + np.max(np.abs(v.real), initial=0.0)):
            raise ValueError(f"{what} must be real for the Charnes-Cooper formulation")
        v = v.real
    return v.astype(float)


def assemble_cc(pq: PQVectors, eps_hat: float, enforce_dominance: bool = False) -> CharnesCooperLP:
    """Charnes-Cooper epigraph LP over ``(z, s, t)`` for one real measurement.

    Rows: ``y.z + p0 s = 1``; ``|x.z + p0 s - eps_hat| <= t``;
    ``sum(z) <= s``; optionally ``s - sum(z) >= z_k`` (matrix dominance).
    """
    p = _real_vector(pq.p, "p")
    q = _real_vector(pq.q, "q")
    eps_hat = float(_real_vector(eps_hat, "eps_hat"))
    k = len(p) - 1
    if k < 1:
        raise ValueError("need n >= 2")
    p0 = p[0]
    if abs(q[0] - p0) > 1e-12 * abs(p0):
        raise ValueError("Charnes-Cooper form expects p0 == q0 (matrix normalization)")
    x = p[1:] - p0
    y = q[1:] - p0
    nv = k + 2  # z (k), s, t
    c = np.zeros(nv)
    c[-1] = 1.0
    A_eq = np.concatenate([y, [p0, 0.0]])[None, :]
    b_eq = [1.0]
    rows = [
        np.concatenate([x, [p0, -1.0]]),
        np.concatenate([-x, [-p0, -1.0]]),
        np.concatenate([np.ones(k), [-1.0, 0.0]]),
    ]
    rhs = [eps_hat, -eps_hat, 0.0]
    if enforce_dominance:
        for j in range(k):
            row = np.concatenate([np.ones(k), [-1.0, 0.0]])
            row[j] += 1.0
            rows.append(row)
            rhs.append(0.0)
    problem = LPProblem(c, A_eq=A_eq, b_eq=b_eq, A_ub=np.array(rows), b_ub=rhs)
    return CharnesCooperLP(x=x, y=y, p0=p0, eps_hat=eps_hat, problem=problem)


def recover_phi_cc(solution: LPSolution, scale_floor: float = 1e-12) -> np.ndarray:
    """Undo the substitution: ``phi_i = z_i / s`` and ``phi_0 = 1 - sum``."""
    xs = np.asarray(solution.x, dtype=float)
    z, s = xs[:-2], xs[-2]
    if not s > scale_floor:
        raise DegenerateScale(f"scale variable s={s:g} collapsed")
    inc = z / s
    return np.concatenate([[1.0 - inc.sum()], inc])


def _clamp(phi):
    phi = np.array(phi, dtype=float)
    phi[phi < CLAMP] = 0.0
    return phi


def solve_cc(pq: PQVectors, eps_hat: float, enforce_dominance: bool = False) -> RecoveryReport:
    cc = assemble_cc(pq, eps_hat, enforce_dominance)
    sol = solve_lp(cc.problem)
    if not sol.optimal:
        raise InfeasibleMeasurement(f"Charnes-Cooper LP ended {sol.status.value}", sol.status)
    phi = _clamp(recover_phi_cc(sol))
    return RecoveryReport(phi, float(sol.x[-1]), sol.status.value, CC, solution=sol)


def residual_matrices(pq_list: Sequence[PQVectors], eps_hat: Sequence[complex]):
    """Rows ``Re/Im(p_k - eps_hat_k q_k)`` and ``q_max_k = max_i |q_i^(k)|``."""
    U = np.array([pq.p - e * pq.q for pq, e in zip(pq_list, eps_hat)], dtype=complex)
    q_max = np.array([np.max(np.abs(pq.q)) for pq in pq_list])
    return U.real.copy(), U.imag.copy(), q_max


def assemble_multifreq(pq_list: Sequence[PQVectors], measurements: MeasurementSet,
                       enforce_dominance: bool = False) -> EpigraphLP:
    """Epigraph LP over ``(phi, t, c, d)``, all non-negative."""
    if len(pq_list) != measurements.m:
        raise ValueError("one PQVectors per measurement frequency required")
    A, B, q_max = residual_matrices(pq_list, measurements.eps_hat)
    m, n = A.shape
    if np.any(q_max <= 0):
        raise ValueError("q_max must be positive")
    nv = n + 1 + 2 * m
    cost = np.zeros(nv)
    cost[n] = 1.0
    A_eq = np.zeros((1, nv))
    A_eq[0, :n] = 1.0
    I = np.eye(m)
    Z = np.zeros((m, m))
    blocks = [
        np.hstack([-A, np.zeros((m, 1)), -I, Z]),
        np.hstack([A, np.zeros((m, 1)), -I, Z]),
        np.hstack([-B, np.zeros((m, 1)), Z, -I]),
        np.hstack([B, np.zeros((m, 1)), Z, -I]),
        np.hstack([np.zeros((m, n)), -q_max[:, None], I, I]),
    ]
    if enforce_dominance and n > 1:
        dom = np.zeros((n - 1, nv))
        dom[:, 0] = -1.0
        dom[np.arange(n - 1), np.arange(1, n)] = 1.0
        blocks.append(dom)
    A_ub = np.vstack(blocks)
    problem = LPProblem(cost, A_eq=A_eq, b_eq=[1.0], A_ub=A_ub, b_ub=np.zeros(A_ub.shape[0]))
    return EpigraphLP(A=A, B=B, q_max=q_max, problem=problem)


def solve_multifreq(pq_list: Sequence[PQVectors], measurements: MeasurementSet,
                    enforce_dominance: bool = False, diagnostics: bool = True) -> RecoveryReport:
    ep = assemble_multifreq(pq_list, measurements, enforce_dominance)
    sol = solve_lp(ep.problem)
    if not sol.optimal:
        raise InfeasibleMeasurement(f"multi-frequency LP ended {sol.status.value}", sol.status)
    n = ep.n
    phi = _clamp(sol.x[:n])
    report = RecoveryReport(phi, float(sol.x[n]), sol.status.value, MULTIFREQ, solution=sol)
    if diagnostics:
        report.diagnostics = sensitivity(ep.A, ep.B, ep.q_max)
    return report


def system_pq(system, frequencies) -> List[PQVectors]:
    return [system.pq(f) for f in np.atleast_1d(frequencies)]


def invert(system, measurements: MeasurementSet, enforce_dominance: bool = False,
           diagnostics: bool = True) -> RecoveryReport:
    """Recover volume fractions of ``system`` from normalized measurements.

    The diagnostics attached to the report are evaluated at the measured
    (noisy) permittivities, the only ones available in practice.
    """
    if measurements.normalizer_index != system.normalizer_index:
        raise ValueError("measurements were normalized by a different component")
    pq_list = system_pq(system, measurements.frequencies)
    return solve_multifreq(pq_list, measurements, enforce_dominance, diagnostics)
