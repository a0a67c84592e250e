"""Command-line interface: ``mtinverse {forward,invert,minimizers,diagnose,validate}``.

Every command takes a material system either by name (``--system ms1``) or
from a JSON file (``--config path``).  JSON results go to stdout with floats
written to 17 significant digits.  Exit codes: 0 success, 2 invalid input,
3 infeasible or non-identifiable, 4 solver numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import List, Optional

import jsonschema
import numpy as np

from .diagnostics import SIGMA_FLOOR, error_bound, sensitivity
from .errors import (
    ConfigError,
    DegenerateScale,
    EmptyMinimizerSet,
    InfeasibleMeasurement,
    MTInverseError,
    SingularSensitivity,
)
from .formulations import MeasurementSet, invert, residual_matrices, system_pq
from .harness import (
    DEFAULT_SAMPLES,
    NoiseSpec,
    campaign_csv,
    run_campaign,
    select_frequencies,
    synthesize_measurement,
)
from .lp import LPStatus
from .minimizers import build_u, ordered_simplex_minimizers, sign_partition, simplex_minimizers
from .systems import builtin_system, load_system

log = logging.getLogger("mtinverse")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERICAL = 4

PHI_SUM_TOL = 1e-9

_NUM = {"type": "number"}
_NUM_OR_NULL = {"type": ["number", "null"]}
_NUM_LIST = {"type": "array", "items": _NUM}

MEASUREMENTS_SCHEMA = {
    "type": "array",
    "minItems": 1,
    "items": {
        "type": "object",
        "additionalProperties": False,
        "required": ["frequency_hz", "eps_re", "eps_im"],
        "properties": {
            "frequency_hz": {"type": "number", "exclusiveMinimum": 0},
            "eps_re": _NUM,
            "eps_im": _NUM,
        },
    },
}

DIAGNOSTICS_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["rank", "sigma_min", "sigma_max", "identifiable", "bound"],
    "properties": {
        "rank": {"type": "integer", "minimum": 0},
        "sigma_min": _NUM,
        "sigma_max": _NUM,
        "identifiable": {"type": "boolean"},
        "bound": _NUM_OR_NULL,
        "singular_values": _NUM_LIST,
        "frequencies_hz": _NUM_LIST,
        "phi": _NUM_LIST,
        "system": {"type": "string"},
    },
}

REPORT_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["system", "formulation", "status", "phi_star", "t_star", "frequencies_hz"],
    "properties": {
        "system": {"type": "string"},
        "labels": {"type": "array", "items": {"type": "string"}},
        "formulation": {"type": "string"},
        "status": {"type": "string"},
        "phi_star": _NUM_LIST,
        "t_star": _NUM,
        "frequencies_hz": _NUM_LIST,
        "diagnostics": DIAGNOSTICS_SCHEMA,
    },
}

MINIMIZERS_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["system", "domain", "frequency_hz", "eps_hat", "u", "partition", "generators"],
    "properties": {
        "system": {"type": "string"},
        "domain": {"enum": ["simplex", "ordered_simplex"]},
        "frequency_hz": _NUM,
        "eps_hat": _NUM,
        "u": _NUM_LIST,
        "partition": {
            "type": "object",
            "additionalProperties": False,
            "required": ["positive", "negative", "zero"],
            "properties": {k: {"type": "array", "items": {"type": "integer"}}
                           for k in ("positive", "negative", "zero")},
        },
        "generators": {"type": "array", "items": _NUM_LIST},
    },
}

AGGREGATE_SCHEMA = {
    "type": "array",
    "items": {
        "type": "object",
        "additionalProperties": False,
        "required": ["system", "m", "samples", "max_err_inf", "max_t_star", "min_sigma_min", "failures"],
        "properties": {
            "system": {"type": "string"},
            "m": {"type": "integer", "minimum": 1},
            "samples": {"type": "integer", "minimum": 1},
            "max_err_inf": _NUM_OR_NULL,
            "max_t_star": _NUM_OR_NULL,
            "min_sigma_min": _NUM_OR_NULL,
            "failures": {"type": "integer", "minimum": 0},
            "failure_rate": _NUM,
            "bound_violations": {"type": "integer", "minimum": 0},
        },
    },
}


# -- JSON with 17 significant digits -------------------------------------------

def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, (bool, np.bool_)) or obj is None or isinstance(obj, str):
        return json.dumps(obj if not isinstance(obj, np.bool_) else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return format(value, ".17g") if math.isfinite(value) else "null"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON text; every float carries 17 significant digits, non-finite ones become null."""
    return _encode(obj, indent, 0)


def emit(obj, schema, stream=None) -> None:
    """Validate ``obj`` after a serialization round trip, then print it."""
    text = dumps(obj)
    jsonschema.validate(json.loads(text), schema)
    print(text, file=stream or sys.stdout)


# -- argument helpers --------------------------------------------------------

def _floats(text: str, what: str) -> List[float]:
    try:
        values = [float(v) for v in text.replace(" ", "").split(",") if v != ""]
    except ValueError:
        raise ConfigError(f"{what}: expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise ConfigError(f"{what}: no values given")
    return values


def _ints(text: str, what: str) -> List[int]:
    try:
        values = [int(v) for v in text.replace(" ", "").split(",") if v != ""]
    except ValueError:
        raise ConfigError(f"{what}: expected comma-separated integers, got {text!r}") from None
    if not values or min(values) < 1:
        raise ConfigError(f"{what}: values must be integers >= 1")
    return values


def parse_phi(text: str, n: int) -> np.ndarray:
    phi = np.array(_floats(text, "--phi"))
    if len(phi) != n:
        raise ConfigError(f"--phi: system has {n} components, got {len(phi)} fractions")
    if np.any(phi < 0) or np.any(phi > 1):
        raise ConfigError("--phi: every volume fraction must lie in [0, 1]")
    if abs(phi.sum() - 1.0) > PHI_SUM_TOL:
        raise ConfigError(f"--phi: volume fractions must sum to 1 (sum is {phi.sum():.17g})")
    return phi


def _system(args):
    if args.config:
        return load_system(args.config)
    return builtin_system(args.system)


def _frequencies(args, system) -> np.ndarray:
    if getattr(args, "freqs", None):
        freqs = np.array(_floats(args.freqs, "--freqs"))
        if np.any(freqs <= 0):
            raise ConfigError("--freqs: frequencies must be positive")
        return freqs
    if getattr(args, "m", None):
        return select_frequencies(system, args.m)
    return np.array([system.single_frequency])


def _noise(args, defaults: Optional[dict] = None) -> tuple:
    defaults = defaults or {}
    base = args.noise
    dR = args.delta_r if args.delta_r is not None else base
    dI = args.delta_i if args.delta_i is not None else base
    if dR is None:
        dR = defaults.get("delta_R", 0.0)
    if dI is None:
        dI = defaults.get("delta_I", 0.0)
    if dR < 0 or dI < 0:
        raise ConfigError("noise half-widths must be >= 0")
    return float(dR), float(dI)


def read_measurements(path, system) -> MeasurementSet:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read measurements {path}: {exc}") from None
    try:
        jsonschema.validate(data, MEASUREMENTS_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"measurements invalid: {exc.message}") from None
    freqs = [row["frequency_hz"] for row in data]
    if len(set(freqs)) != len(freqs):
        raise ConfigError("measurements repeat a frequency")
    raw = [complex(row["eps_re"], row["eps_im"]) for row in data]
    return MeasurementSet.from_raw(system, freqs, raw)


def measurement_rows(frequencies, values) -> List[dict]:
    return [{"frequency_hz": float(f), "eps_re": float(v.real), "eps_im": float(v.imag)}
            for f, v in zip(frequencies, values)]


# -- commands ---------------------------------------------------------------

def cmd_forward(args) -> int:
    system = _system(args)
    phi = parse_phi(args.phi, system.n)
    freqs = _frequencies(args, system)
    values = np.array([system.effective(phi, f) for f in freqs])
    dR, dI = _noise(args)
    if dR or dI:
        rng = np.random.default_rng(np.random.SeedSequence(args.seed))
        values = values + rng.uniform(-dR, dR, len(freqs)) + 1j * rng.uniform(-dI, dI, len(freqs))
    emit(measurement_rows(freqs, values), MEASUREMENTS_SCHEMA)
    return EXIT_OK


def _min_eps0(system, freqs) -> float:
    return min(abs(system.normalizer_permittivity(f)) for f in freqs)


def cmd_invert(args) -> int:
    system = _system(args)
    meas = read_measurements(args.measurements, system)
    report = invert(system, meas, enforce_dominance=args.dominance)
    diag = report.diagnostics
    dR, dI = _noise(args)
    if diag.sigma_min > SIGMA_FLOOR and (dR or dI or args.noise is not None):
        diag.bound = error_bound(report.t_star, diag.sigma_min, meas.m, dR, dI,
                                 _min_eps0(system, meas.frequencies))
    out = {"system": system.name, "labels": system.labels}
    out.update(report.to_dict())
    out["frequencies_hz"] = [float(f) for f in meas.frequencies]
    emit(out, REPORT_SCHEMA)
    if not diag.identifiable:
        log.error("sensitivity matrix has rank %d < %d: volume fractions not identifiable",
                  diag.rank, system.n - 1)
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_minimizers(args) -> int:
    system = _system(args)
    freq = args.freq if args.freq is not None else system.single_frequency
    if freq <= 0:
        raise ConfigError("--freq must be positive")
    pq = system.pq(freq)
    uvec = build_u(pq, args.eps_hat)
    u = np.real(uvec.u)
    part = sign_partition(u)
    if args.domain == "ordered":
        found = ordered_simplex_minimizers(u)
    else:
        found = simplex_minimizers(u)
    emit({
        "system": system.name,
        "domain": found.domain,
        "frequency_hz": float(freq),
        "eps_hat": float(args.eps_hat),
        "u": [float(v) for v in u],
        "partition": {"positive": list(part.positive), "negative": list(part.negative),
                      "zero": list(part.zero)},
        "generators": [[float(v) for v in g] for g in found.generators],
    }, MINIMIZERS_SCHEMA)
    return EXIT_OK


def _nominal_phi(system) -> np.ndarray:
    """Centre of the sampling set: floor plus an equal share of the slack."""
    floor = system.sample_floor
    return floor + (1.0 - floor.sum()) / system.n


def cmd_diagnose(args) -> int:
    system = _system(args)
    if args.measurements:
        meas = read_measurements(args.measurements, system)
        phi = None
    else:
        phi = parse_phi(args.phi, system.n) if args.phi else _nominal_phi(system)
        meas = synthesize_measurement(system, phi, _frequencies(args, system), NoiseSpec())
    A, B, q_max = residual_matrices(system_pq(system, meas.frequencies), meas.eps_hat)
    rep = sensitivity(A, B, q_max)
    dR, dI = _noise(args)
    if rep.sigma_min > SIGMA_FLOOR:
        # residual-free bound: the noise term alone, as for t* = 0
        rep.bound = error_bound(0.0, rep.sigma_min, meas.m, dR, dI, _min_eps0(system, meas.frequencies))
    out = {"system": system.name}
    out.update(rep.to_dict())
    out["singular_values"] = [float(s) for s in rep.singular_values]
    out["frequencies_hz"] = [float(f) for f in meas.frequencies]
    if phi is not None:
        out["phi"] = [float(v) for v in phi]
    emit(out, DIAGNOSTICS_SCHEMA)
    return EXIT_OK if rep.identifiable else EXIT_INFEASIBLE


def cmd_validate(args) -> int:
    system = _system(args)
    camp = dict(system.campaign)
    m_values = _ints(args.m, "--m") if args.m else camp.get("m_values", [1, 2, 3, 4, 5])
    samples = args.samples if args.samples is not None else camp.get("samples", DEFAULT_SAMPLES)
    seed = args.seed if args.seed is not None else camp.get("seed", 0)
    workers = args.workers if args.workers is not None else camp.get("workers", 1)
    if samples < 1 or workers < 1 or seed < 0:
        raise ConfigError("--samples and --workers must be >= 1 and --seed >= 0")
    dR, dI = _noise(args, camp.get("noise"))
    noise = NoiseSpec(dR, dI, seed)

    result = run_campaign(system, m_values, samples, noise, workers)
    csv_path = Path(args.csv or system.output.get("csv") or f"{system.name}_campaign.csv")
    csv_path.write_text(campaign_csv(result, system.n), encoding="utf-8")
    log.info("wrote %d rows to %s", len(result.results), csv_path)

    aggregates = result.aggregates()
    agg_path = args.aggregate or system.output.get("aggregate")
    if agg_path:
        text = dumps(aggregates)
        jsonschema.validate(json.loads(text), AGGREGATE_SCHEMA)
        Path(agg_path).write_text(text + "\n", encoding="utf-8")
    emit(aggregates, AGGREGATE_SCHEMA)
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="material-system JSON file")
    src.add_argument("--system", help="built-in system: ms1, ms2 or ms3")
    common.add_argument("--seed", type=int, default=None, help="RNG seed")
    common.add_argument("-v", "--verbose", action="store_true")

    noise = argparse.ArgumentParser(add_help=False)
    noise.add_argument("--noise", type=float, default=None,
                       help="uniform noise half-width for both real and imaginary parts")
    noise.add_argument("--delta-r", type=float, default=None, help="real-part half-width")
    noise.add_argument("--delta-i", type=float, default=None, help="imaginary-part half-width")

    freq = argparse.ArgumentParser(add_help=False)
    g = freq.add_mutually_exclusive_group()
    g.add_argument("--freqs", help="comma-separated frequencies in Hz")
    g.add_argument("--m", type=int, help="number of equispaced band frequencies (1: designated frequency)")

    parser = argparse.ArgumentParser(prog="mtinverse", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("forward", parents=[common, freq, noise],
                       help="effective permittivity of a given split")
    p.add_argument("--phi", required=True, help="comma-separated volume fractions, matrix first")
    p.set_defaults(func=cmd_forward)

    p = sub.add_parser("invert", parents=[common, noise], help="recover volume fractions")
    p.add_argument("--measurements", required=True,
                   help="JSON list of {frequency_hz, eps_re, eps_im} (un-normalized)")
    p.add_argument("--dominance", action="store_true", help="require phi_0 >= phi_i")
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("minimizers", parents=[common],
                       help="closed-form exact-solution set for one real measurement")
    p.add_argument("--eps-hat", type=float, required=True, help="normalized real measurement")
    p.add_argument("--freq", type=float, default=None, help="frequency in Hz")
    p.add_argument("--domain", choices=["simplex", "ordered"], default="simplex")
    p.set_defaults(func=cmd_minimizers)

    p = sub.add_parser("diagnose", parents=[common, freq, noise], help="sensitivity matrix diagnostics")
    p.add_argument("--phi", help="split at which to evaluate (default: centre of the sampling set)")
    p.add_argument("--measurements", help="evaluate at measured values instead of a split")
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("validate", parents=[common, noise], help="Monte Carlo validation campaign")
    p.add_argument("--m", help="comma-separated frequency counts, e.g. 1,5")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--csv", help="per-sample CSV output path")
    p.add_argument("--aggregate", help="aggregate JSON output path (also printed)")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if args.command != "validate" and args.seed is None:
        args.seed = 0
    try:
        return args.func(args)
    except (EmptyMinimizerSet, SingularSensitivity) as exc:
        log.error("%s", exc)
        return EXIT_INFEASIBLE
    except InfeasibleMeasurement as exc:
        log.error("%s", exc)
        return EXIT_NUMERICAL if exc.status is LPStatus.NUMERICAL_FAILURE else EXIT_INFEASIBLE
    except DegenerateScale as exc:
        log.error("%s", exc)
        return EXIT_NUMERICAL
    except (ConfigError, ValueError, jsonschema.ValidationError) as exc:
        log.error("%s", getattr(exc, "message", exc))
        return EXIT_INPUT
    except MTInverseError as exc:
        log.error("%s", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
