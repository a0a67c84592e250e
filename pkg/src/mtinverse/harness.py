"""Monte Carlo validation campaigns.

Each sample draws a true volume-fraction split from the floored simplex,
synthesizes noisy measurements with the forward model, inverts them with the
multi-frequency LP and records the error together with the diagnostics
evaluated at the noise-free measurement.

Random streams: sample ``i`` of a campaign seeded with ``seed`` draws its
split from ``SeedSequence(seed, spawn_key=(i,))`` and its noise for ``m``
frequencies from ``SeedSequence(seed, spawn_key=(i, m))``, both feeding
numpy's PCG64.  The same ``i`` therefore shares its split across all ``m``,
and results never depend on how samples are spread over workers.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .diagnostics import SIGMA_FLOOR, error_bound, sensitivity
from .errors import InfeasibleMeasurement
from .formulations import MeasurementSet, invert, residual_matrices, system_pq
from .systems import MaterialSystem

log = logging.getLogger(__name__)

DEFAULT_SAMPLES = 1000
FAILED = "failed"


@dataclass(frozen=True)
class NoiseSpec:
    """Uniform absolute noise half-widths on the raw real and imaginary parts."""

    delta_R: float = 0.0
    delta_I: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.delta_R < 0 or self.delta_I < 0:
            raise ValueError("noise half-widths must be >= 0")


@dataclass
class RunResult:
    sample_id: int
    m: int
    frequencies: np.ndarray
    phi_true: np.ndarray
    phi_star: np.ndarray
    t_star: float
    sigma_min: float
    bound: float
    err_inf: float
    status: str

    @property
    def failed(self) -> bool:
        return self.status == FAILED

    @property
    def err_2(self) -> float:
        return float(np.linalg.norm(self.phi_star - self.phi_true))


def phi_rng(seed: int, sample_id: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(sample_id,)))


def noise_rng(seed: int, sample_id: int, m: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(sample_id, m)))


def sample_phi_true(floor, rng: np.random.Generator) -> np.ndarray:
    """Uniform draw from ``{phi : phi >= floor, sum(phi) = 1}``.

    ``floor`` is a floor vector or a :class:`MaterialSystem`.
    """
    if isinstance(floor, MaterialSystem):
        floor = floor.sample_floor
    floor = np.asarray(floor, dtype=float)
    slack = 1.0 - floor.sum()
    if slack < -1e-12:
        raise ValueError("floors sum to more than one")
    w = rng.standard_exponential(len(floor))
    w /= w.sum()
    return floor + max(slack, 0.0) * w


def select_frequencies(system: MaterialSystem, m: int) -> np.ndarray:
    """The single designated frequency for ``m = 1``, else ``m`` equispaced band points."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if m == 1:
        return np.array([system.single_frequency])
    return np.linspace(system.band[0], system.band[1], m)


def synthesize_measurement(system: MaterialSystem, phi_true, frequencies,
                           noise: NoiseSpec, rng: Optional[np.random.Generator] = None) -> MeasurementSet:
    """Forward-model measurements with additive uniform noise, then normalized."""
    frequencies = np.atleast_1d(np.asarray(frequencies, dtype=float))
    raw = np.array([system.effective(phi_true, f) for f in frequencies])
    if noise.delta_R or noise.delta_I:
        if rng is None:
            rng = np.random.default_rng(noise.seed)
        m = len(frequencies)
        raw = raw + rng.uniform(-noise.delta_R, noise.delta_R, m) \
            + 1j * rng.uniform(-noise.delta_I, noise.delta_I, m)
    return MeasurementSet.from_raw(system, frequencies, raw)


def run_sample(system: MaterialSystem, m: int, sample_id: int, noise: NoiseSpec) -> RunResult:
    phi_true = sample_phi_true(system, phi_rng(noise.seed, sample_id))
    freqs = select_frequencies(system, m)
    truth = synthesize_measurement(system, phi_true, freqs, NoiseSpec())
    meas = synthesize_measurement(system, phi_true, freqs, noise, noise_rng(noise.seed, sample_id, m))
    pq_list = system_pq(system, freqs)

    A_t, B_t, q_max = residual_matrices(pq_list, truth.eps_hat)
    sigma_min = sensitivity(A_t, B_t, q_max).sigma_min

    nan = np.full(system.n, np.nan)
    try:
        report = invert(system, meas, diagnostics=False)
    except InfeasibleMeasurement as exc:
        log.warning("sample %d (m=%d) failed: %s", sample_id, m, exc)
        return RunResult(sample_id, m, freqs, phi_true, nan, math.nan, sigma_min,
                         math.nan, math.nan, FAILED)

    eps0 = min(abs(system.normalizer_permittivity(f)) for f in freqs)
    if sigma_min > SIGMA_FLOOR:
        bound = error_bound(report.t_star, sigma_min, m, noise.delta_R, noise.delta_I, eps0)
    else:
        bound = math.inf
    err = float(np.max(np.abs(report.phi_star - phi_true)))
    return RunResult(sample_id, m, freqs, phi_true, report.phi_star, report.t_star,
                     sigma_min, bound, err, report.status)


def _run_chunk(args):
    system, tasks, noise = args
    return [run_sample(system, m, i, noise) for m, i in tasks]


@dataclass
class CampaignResult:
    system: str
    noise: NoiseSpec
    results: List[RunResult]

    def for_m(self, m: int) -> List[RunResult]:
        return [r for r in self.results if r.m == m]

    @property
    def m_values(self) -> List[int]:
        return sorted({r.m for r in self.results})

    def aggregates(self) -> List[dict]:
        out = []
        for m in self.m_values:
            rows = self.for_m(m)
            ok = [r for r in rows if not r.failed]
            out.append({
                "system": self.system,
                "m": m,
                "samples": len(rows),
                "max_err_inf": max((r.err_inf for r in ok), default=None),
                "max_t_star": max((r.t_star for r in ok), default=None),
                "min_sigma_min": min((r.sigma_min for r in rows), default=None),
                "failures": len(rows) - len(ok),
                "failure_rate": (len(rows) - len(ok)) / len(rows) if rows else 0.0,
                "bound_violations": sum(1 for r in ok if r.err_inf > r.bound + 1e-8),
            })
        return out

    def aggregate_for(self, m: int) -> dict:
        return next(a for a in self.aggregates() if a["m"] == m)


def run_campaign(system: MaterialSystem, m_values: Sequence[int], samples: int = DEFAULT_SAMPLES,
                 noise: NoiseSpec = NoiseSpec(), workers: int = 1) -> CampaignResult:
    """Run ``samples`` inversions for every ``m`` in ``m_values``.

    ``workers > 1`` spreads samples over processes; results are identical
    for any worker count.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    tasks = [(m, i) for m in sorted(set(m_values)) for i in range(samples)]
    if workers <= 1:
        results = _run_chunk((system, tasks, noise))
    else:
        size = math.ceil(len(tasks) / workers)
        chunks = [(system, tasks[k:k + size], noise) for k in range(0, len(tasks), size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = [r for part in pool.map(_run_chunk, chunks) for r in part]
    results.sort(key=lambda r: (r.m, r.sample_id))
    return CampaignResult(system.name, noise, results)


def fmt(value) -> str:
    """17 significant digits; round-trips any double."""
    if value is None:
        return ""
    return format(float(value), ".17g")


def csv_header(n: int, max_m: int) -> List[str]:
    return (["sample_id", "m"] + [f"f{k + 1}" for k in range(max_m)]
            + [f"phi_true_{i}" for i in range(n)] + [f"phi_star_{i}" for i in range(n)]
            + ["t_star", "sigma_min", "bound", "err_inf", "status"])


def write_csv(results: Iterable[RunResult], stream, n: int, max_m: int) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(csv_header(n, max_m))
    for r in results:
        freqs = [fmt(f) for f in r.frequencies] + [""] * (max_m - len(r.frequencies))
        writer.writerow(
            [r.sample_id, r.m] + freqs
            + [fmt(v) for v in r.phi_true] + [fmt(v) for v in r.phi_star]
            + [fmt(r.t_star), fmt(r.sigma_min), fmt(r.bound), fmt(r.err_inf), r.status]
        )


def campaign_csv(campaign: CampaignResult, n: int) -> str:
    buf = io.StringIO()
    write_csv(campaign.results, buf, n, max(campaign.m_values))
    return buf.getvalue()
