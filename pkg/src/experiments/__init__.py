"""
Scan plumbing: records, log-log fits, envelope gates, seed derivation and
the point runner.

Scan modules:
    lower_bounds: cardinality, sharpness, σ-block and Paley scans
    inequalities: Zygmund, Λ(p), weak type, dual range, Khintchine
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable, Iterable

import numpy as np

from ..envelopes import BRACKET_RTOL, ENVELOPE_NOTE, FIT_MIN_R2
from ..errors import NumericalFailure, ValidationError
from ..pool import ordered_map

log = logging.getLogger("lp-lab")

PARAM_KEYS = ("lambda", "rho", "sigma", "p", "N", "M", "grid", "seed")

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class SkipPoint(Exception):
    """Raised by a measurement that has nothing to measure at its parameters."""


# ---------------------------------------------------------------------------
# Records and fits
# ---------------------------------------------------------------------------
@dataclass
class ExperimentRecord:
    experiment: str
    params: dict
    measured: dict[str, float]
    timestamp: str = field(default_factory=utc_now, compare=False)

    def sort_key(self) -> tuple:
        key = []
        for name in PARAM_KEYS:
            value = self.params.get(name)
            key.append((value is None, value if value is not None else 0))
        return tuple(key)

    def non_finite(self) -> list[str]:
        return [k for k, v in self.measured.items() if not math.isfinite(v)]

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "params": dict(self.params),
            "measured": dict(self.measured),
        }


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    points_used: int

    @property
    def conclusive(self) -> bool:
        return self.r_squared >= FIT_MIN_R2

    def to_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "points_used": self.points_used,
        }


def fit_exponent(xs: Iterable[float], ys: Iterable[float]) -> FitResult:
    """Least squares of log y against log x."""
    x = np.asarray(list(xs), dtype=np.float64)
    y = np.asarray(list(ys), dtype=np.float64)
    if x.shape != y.shape:
        raise ValidationError(f"fit needs equal lengths, got {x.size} and {y.size}")
    if x.size < 3:
        raise ValidationError(f"fit needs at least 3 points, got {x.size}")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValidationError("fit needs positive xs and ys")

    log_x, log_y = np.log(x), np.log(y)
    A = np.vstack([log_x, np.ones_like(log_x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, log_y, rcond=None)

    ss_res = float(np.sum((log_y - (intercept + slope * log_x)) ** 2))
    ss_tot = float(np.sum((log_y - log_y.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0 else min(max(1.0 - ss_res / ss_tot, 0.0), 1.0)
    return FitResult(float(slope), float(intercept), r_squared, int(x.size))


def gate(fit: FitResult, bounds: tuple[float, float], min_r2: float = FIT_MIN_R2) -> str:
    """Slope bracket check; fits below min_r2 never pass or fail."""
    if fit.r_squared < min_r2:
        return INCONCLUSIVE
    lo, hi = bounds
    return PASS if lo <= fit.slope <= hi else FAIL


def verdict(ok: bool) -> str:
    return PASS if ok else FAIL


def within(values, bounds: tuple[float, float], rtol: float = BRACKET_RTOL) -> bool:
    """Every value inside [lo, hi], each end widened by rtol."""
    lo, hi = bounds
    values = np.asarray(values, dtype=np.float64)
    return bool(np.all((values >= lo * (1 - rtol)) & (values <= hi * (1 + rtol))))


@dataclass
class ScanResult:
    experiment: str
    records: list[ExperimentRecord]
    fits: dict[str, FitResult] = field(default_factory=dict)
    checks: dict[str, str] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def failed_checks(self) -> list[str]:
        return [name for name, v in self.checks.items() if v == FAIL]

    def summary(self) -> dict:
        return {
            "experiment": self.experiment,
            "points": len(self.records),
            "fits": {name: fit.to_dict() for name, fit in self.fits.items()},
            "checks": dict(self.checks),
            "notes": list(self.notes),
            "envelopes": ENVELOPE_NOTE if self.checks else None,
        }

    def log_outcome(self):
        for name, fit in self.fits.items():
            level = logging.INFO if fit.conclusive else logging.WARNING
            log.log(
                level, "[%s] fit %s: slope=%.4f r2=%.4f (%d points)%s",
                self.experiment, name, fit.slope, fit.r_squared, fit.points_used,
                "" if fit.conclusive else " (inconclusive)",
            )
        for name, outcome in self.checks.items():
            level = logging.ERROR if outcome == FAIL else logging.INFO
            log.log(level, "[%s] check %s: %s", self.experiment, name, outcome)


# ---------------------------------------------------------------------------
# Seeds and the runner
# ---------------------------------------------------------------------------
def derive_seed(base_seed: int, experiment: str, params: dict) -> int:
    """64-bit seed from blake2b over (base_seed, experiment, params)."""
    payload = json.dumps([base_seed, experiment, params], sort_keys=True, default=str)
    digest = hashlib.blake2b(payload.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


Measure = Callable[[dict], tuple[dict, dict]]


def run_points(
    experiment: str,
    points: list[dict],
    measure: Measure,
    base_seed: int,
    jobs: int = 1,
) -> tuple[list[ExperimentRecord], list[str]]:
    """
    Measure every point (concurrently when jobs != 1).

    `measure(params)` returns (param_updates, measured). Records come back
    sorted by params; skipped points become notes.
    """

    def task(point: dict):
        params = {**point, "seed": derive_seed(base_seed, experiment, point)}
        try:
            updates, measured = measure(params)
        except SkipPoint as e:
            log.warning("[%s] skipped %s: %s", experiment, point, e)
            return None, f"skipped {point}: {e}"
        record = ExperimentRecord(experiment, {**params, **updates}, measured)
        bad = record.non_finite()
        if bad:
            raise NumericalFailure(
                f"[{experiment}] non-finite {', '.join(bad)} at {point}",
                details={"record": record.to_dict()},
            )
        log.info("[%s] %s -> %s", experiment, point, _short(measured))
        return record, None

    outcomes = ordered_map(task, points, jobs)
    records = sorted((r for r, _ in outcomes if r is not None), key=ExperimentRecord.sort_key)
    notes = [n for _, n in outcomes if n is not None]
    return records, notes


def _short(measured: dict) -> str:
    return ", ".join(f"{k}={v:.6g}" for k, v in sorted(measured.items()))


def column(records: list[ExperimentRecord], key: str) -> np.ndarray:
    """A param or measured value across records."""
    return np.array([
        r.measured[key] if key in r.measured else r.params[key] for r in records
    ], dtype=np.float64)
