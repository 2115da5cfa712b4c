"""Timing harness: curve generation cost per family and grid-scan throughput.

Every case is timed over at least five repetitions and reported as
median/min/max wall-clock seconds; failures are recorded per case rather
than aborting the run.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from fractalscan import curves
from fractalscan.curves import FAMILIES, make_order
from fractalscan.ssm import random_selective, random_ssm, scan_over_grid

MIN_REPS = 5

SPOT_CHECK_CELLS = 10_000

BENCH_CSV_HEADER = "case,family,H,W,reps,median_s,min_s,max_s,cells_per_s,ok,note"


@dataclass(frozen=True)
class BenchResult:
    case: str
    family: str
    height: int
    width: int
    reps: int
    median_s: float
    min_s: float
    max_s: float
    cells_per_s: float
    ok: bool
    note: str = ""


def _clear_curve_caches() -> None:
    curves._hilbert_square.cache_clear()
    curves._peano_square.cache_clear()


def _time_reps(fn, reps: int, fresh: bool) -> tuple[float, float, float]:
    """Median/min/max seconds of `fn()` over `reps` runs; `fresh` clears the
    curve caches before each run so generation cost is measured cold."""
    times = []
    for _ in range(reps):
        if fresh:
            _clear_curve_caches()
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times), min(times), max(times)


def _spot_check_bijective(order, rng, count: int = SPOT_CHECK_CELLS) -> None:
    """Sampled round-trip: rank->cell->rank on `count` random flat indices."""
    n = order.shape.cells
    flat = rng.integers(0, n, size=min(count, n))
    if not np.array_equal(order.cells[order.ranks[flat]], flat):
        raise AssertionError("forward/inverse round-trip mismatch")


def run_bench(sizes: Sequence[int] = (64, 256, 1024),
              families: Sequence[str] = FAMILIES,
              reps: int = MIN_REPS,
              seed: int = 0,
              scan_size: int = 64,
              state_dim: int = 2) -> list[BenchResult]:
    reps = max(int(reps), MIN_REPS)
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 0xBE]))
    results: list[BenchResult] = []

    for family in families:
        for size in sizes:
            cells = size * size
            try:
                med, lo, hi = _time_reps(lambda: make_order(family, (size, size)),
                                         reps, fresh=True)
                order = make_order(family, (size, size))
                _spot_check_bijective(order, rng)
                results.append(BenchResult("generate", family, size, size, reps,
                                           med, lo, hi, cells / med, True))
            except Exception as exc:  # per-case failures are data, not aborts
                results.append(BenchResult("generate", family, size, size, reps,
                                           float("nan"), float("nan"), float("nan"),
                                           float("nan"), False, str(exc)))

    base = random_ssm(state_dim, seed=seed)
    params = random_selective(state_dim, seed=seed)
    field = rng.standard_normal((scan_size, scan_size))
    cells = scan_size * scan_size
    for case, fresh in (("scan-reuse", False), ("scan-regenerate", True)):
        try:
            order = make_order("hilbert", (scan_size, scan_size))

            def run():
                o = make_order("hilbert", (scan_size, scan_size)) if fresh else order
                scan_over_grid(o, field, params, base)

            med, lo, hi = _time_reps(run, reps, fresh=fresh)
            results.append(BenchResult(case, "hilbert", scan_size, scan_size,
                                       reps, med, lo, hi, cells / med, True))
        except Exception as exc:
            results.append(BenchResult(case, "hilbert", scan_size, scan_size,
                                       reps, float("nan"), float("nan"),
                                       float("nan"), float("nan"), False, str(exc)))
    return results


def bench_to_csv(results: Sequence[BenchResult]) -> str:
    lines = [BENCH_CSV_HEADER]
    for r in results:
        lines.append(",".join((
            r.case, r.family, str(r.height), str(r.width), str(r.reps),
            format(r.median_s, ".9g"), format(r.min_s, ".9g"),
            format(r.max_s, ".9g"), format(r.cells_per_s, ".9g"),
            str(int(r.ok)), r.note.replace(",", ";"),
        )))
    return "\n".join(lines) + "\n"
