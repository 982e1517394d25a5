"""Magic Square grid sweeps producing one CSV row per (N, D) point."""

from __future__ import annotations

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Iterable

from .charge import is_subnormal_charge
from .cpd import find_cpd_weight_multipliers
from .grws import (
    DEFAULT_EPSILON,
    GrwsParams,
    classify_sector,
    grws_charge,
    grws_moments,
)
from .errors import InvalidParams
from .hankel import k_hyponormality_test
from .rational import as_fraction, fmt

THREADS_ENV = "SHIFTCHARGE_THREADS"

CSV_COLUMNS = (
    "p",
    "N",
    "D",
    "sector",
    "special_line_j",
    "depth",
    "sign_pattern",
    "khyp_max_tested",
    "khyp_level",
    "horizon",
    "charge_verdict",
    "cpd_status",
    "cpd_multipliers",
)


@dataclass(frozen=True)
class SweepSpec:
    p: Fraction
    N_range: tuple[Fraction, Fraction, int]
    D_range: tuple[Fraction, Fraction, int]
    depth: int = 12
    khyp_max: int = 2
    epsilon: Fraction = DEFAULT_EPSILON
    horizon: int = 8

    def __post_init__(self):
        for lo, hi, steps in (self.N_range, self.D_range):
            if steps < 1:
                raise InvalidParams("grid needs at least one step")
            if not (-1 < lo < 1 and -1 < hi < 1):
                raise InvalidParams("grid ranges must lie inside the open unit square")

    def grid(self) -> list[GrwsParams]:
        """Row-major: N outer, D inner."""
        return [GrwsParams(self.p, N, D) for N in _axis(*self.N_range) for D in _axis(*self.D_range)]


def _axis(lo: Fraction, hi: Fraction, steps: int) -> list[Fraction]:
    lo, hi = as_fraction(lo), as_fraction(hi)
    if steps == 1:
        return [lo]
    return [lo + (hi - lo) * i / (steps - 1) for i in range(steps)]


def khyp_level(params: GrwsParams, khyp_max: int, horizon: int) -> int:
    """Largest k <= khyp_max whose scan (and every smaller k's) passes to horizon."""
    moments = grws_moments(params)
    level = 0
    for k in range(1, khyp_max + 1):
        if not k_hyponormality_test(moments, k, horizon, stop_early=True).passed:
            break
        level = k
    return level


def sweep_row(params: GrwsParams, depth: int, khyp_max: int, epsilon: Fraction, horizon: int) -> dict:
    sector = classify_sector(params)
    gc = grws_charge(params, epsilon, depth=depth)
    cpd = find_cpd_weight_multipliers(gc.charge)
    return {
        "p": fmt(params.p),
        "N": fmt(params.N),
        "D": fmt(params.D),
        "sector": sector.label(),
        "special_line_j": "" if sector.special_line is None else str(sector.special_line),
        "depth": str(gc.depth),
        "sign_pattern": "".join(s.value for s in gc.sign_pattern()),
        "khyp_max_tested": str(khyp_max),
        "khyp_level": str(khyp_level(params, khyp_max, horizon)),
        "horizon": str(horizon),
        "charge_verdict": is_subnormal_charge(gc.charge).value,
        "cpd_status": cpd.status.value,
        "cpd_multipliers": ";".join(fmt(k) for k in cpd.multipliers),
    }


def _row_job(args) -> dict:
    return sweep_row(*args)


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def sweep_rows(spec: SweepSpec, workers: int | None = None) -> list[dict]:
    """Rows in grid order regardless of how many workers evaluate them."""
    jobs = [(pt, spec.depth, spec.khyp_max, spec.epsilon, spec.horizon) for pt in spec.grid()]
    workers = thread_count() if workers is None else workers
    if workers <= 1 or len(jobs) <= 1:
        return [_row_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_row_job, jobs))


def write_csv(rows: Iterable[dict], out: IO[str]) -> None:
    writer = csv.DictWriter(out, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
