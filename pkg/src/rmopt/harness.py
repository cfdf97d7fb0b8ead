"""Repeated-experiment runner: aggregate statistics, traces, and e_0.5.

A stochastic minimizer is characterized by the spread of its results over
many seeded runs (best/average final fitness, failure counts) and by the
cost metric ``e_0.5``: the expected number of fitness evaluations needed
before repeated runs succeed at least once with probability one half,

    e_0.5 = (n_evaluations / n_exp) * ln(1/2) / ln(n_err / n_exp).

The metric is defined only for nondegenerate failure rates
``0 < n_err < n_exp``.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .benchmarks import BenchmarkProblem
from .optimizer import OptimizationResult, RmConfig, derive_seed, minimize

__all__ = [
    "ExperimentStats",
    "UndefinedMetricError",
    "e05",
    "export_trace",
    "import_trace",
    "run_experiments",
]

TRACE_HEADER = ("generation", "evaluations", "best_fitness")
AGGREGATE_HEADER = ("generation", "evaluations", "mean_best_fitness")


class UndefinedMetricError(ValueError):
    """e_0.5 requested for a degenerate error rate (all or no runs failed)."""


@dataclass
class ExperimentStats:
    """Aggregates of repeated seeded optimizations of one problem.

    ``n_err`` counts runs whose final fitness differs from
    ``reference_value`` by more than ``success_threshold``.  ``e_05`` is
    ``None`` when the error rate is degenerate.  ``run_seeds`` are the
    per-run seeds derived from the master seed, in run order.
    """

    n_exp: int
    n_evaluations: int
    n_err: int
    f_best: float
    f_avg: float
    per_run: list[OptimizationResult] = field(repr=False)
    run_seeds: list[int] = field(default_factory=list)
    success_threshold: float = 0.0
    reference_value: float = 0.0
    e_05: float | None = None


def run_experiments(problem, config: RmConfig, n_exp: int,
                    success_threshold: float, reference_value: float, *,
                    vectorized: bool = False,
                    workers: int | None = None) -> ExperimentStats:
    """Run ``n_exp`` independent optimizations and aggregate the outcomes.

    ``problem`` is a :class:`~rmopt.benchmarks.BenchmarkProblem` (its
    ``eval`` is vectorized) or a bare fitness callable, in which case
    ``vectorized`` says how to call it.  Run ``k`` uses the seed
    ``derive_seed(config.seed, k)``; ``workers`` threads may execute runs
    concurrently without affecting any result.
    """
    if n_exp < 1:
        raise ValueError(f"n_exp must be >= 1, got {n_exp!r}")
    if isinstance(problem, BenchmarkProblem):
        if problem.arity != config.n_params:
            raise ValueError(
                f"problem {problem.name!r} has arity {problem.arity}, "
                f"config.n_params is {config.n_params}")
        fitness, vectorized = problem.fitness, True
    else:
        fitness = problem

    seeds = [derive_seed(config.seed, k) for k in range(n_exp)]

    def run(k: int) -> OptimizationResult:
        return minimize(fitness, replace(config, seed=seeds[k]),
                        vectorized=vectorized)

    if workers is not None and workers > 1 and n_exp > 1:
        with ThreadPoolExecutor(max_workers=min(workers, n_exp)) as pool:
            results = list(pool.map(run, range(n_exp)))
    else:
        results = [run(k) for k in range(n_exp)]

    finals = np.array([r.f_best for r in results])
    n_err = int(np.sum(np.abs(finals - reference_value) > success_threshold))
    stats = ExperimentStats(
        n_exp=n_exp,
        n_evaluations=int(sum(r.evaluations for r in results)),
        n_err=n_err,
        f_best=float(np.min(finals)),
        f_avg=float(np.mean(finals)),
        per_run=results,
        run_seeds=seeds,
        success_threshold=success_threshold,
        reference_value=reference_value,
    )
    if 0 < n_err < n_exp:
        stats.e_05 = e05(stats)
    return stats


def e05(stats: ExperimentStats) -> float:
    """Expected evaluations to reach success probability one half.

    Raises :class:`UndefinedMetricError` when every run succeeded or every
    run failed — the success-probability model has nothing to interpolate.
    """
    if not 0 < stats.n_err < stats.n_exp:
        raise UndefinedMetricError(
            f"e_0.5 is undefined for n_err={stats.n_err} of "
            f"n_exp={stats.n_exp} runs")
    cost_per_run = stats.n_evaluations / stats.n_exp
    return cost_per_run * math.log(0.5) / math.log(stats.n_err / stats.n_exp)


# ---------------------------------------------------------------------------
# Trace CSV export

def export_trace(obj: OptimizationResult | ExperimentStats,
                 path: str | os.PathLike) -> list[str]:
    """Write convergence traces as CSV; returns the paths written.

    For a single :class:`OptimizationResult`, writes one file with columns
    ``generation,evaluations,best_fitness`` (one row per generation).  For
    :class:`ExperimentStats`, writes ``<stem>_runNNN.csv`` per run plus
    ``<stem>_mean.csv`` with the mean best-fitness curve; shorter runs are
    extended with their final value so every generation averages over all
    runs.
    """
    path = os.fspath(path)
    if isinstance(obj, OptimizationResult):
        _write_trace(obj.trace, path, TRACE_HEADER)
        return [path]
    if not isinstance(obj, ExperimentStats):
        raise TypeError(
            f"expected OptimizationResult or ExperimentStats, got {type(obj)!r}")

    stem = path[:-4] if path.lower().endswith(".csv") else path
    written = []
    for k, result in enumerate(obj.per_run):
        run_path = f"{stem}_run{k:03d}.csv"
        _write_trace(result.trace, run_path, TRACE_HEADER)
        written.append(run_path)

    mean_path = f"{stem}_mean.csv"
    _write_trace(_mean_trace(obj.per_run), mean_path, AGGREGATE_HEADER)
    written.append(mean_path)
    return written


def import_trace(path: str | os.PathLike) -> list[tuple[int, float]]:
    """Read back a trace CSV written by :func:`export_trace`.

    Returns ``(evaluations, best_fitness)`` pairs; values round-trip
    exactly because floats are written with ``repr``.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) not in (TRACE_HEADER, AGGREGATE_HEADER):
            raise ValueError(f"{path}: unexpected header {header!r}")
        return [(int(evals), float(best)) for _, evals, best in reader]


def _write_trace(trace: Sequence[tuple[int, float]], path: str,
                 header: tuple[str, ...]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for generation, (evals, best) in enumerate(trace, start=1):
            writer.writerow([generation, evals, repr(float(best))])


def _mean_trace(runs: Sequence[OptimizationResult]) -> list[tuple[int, float]]:
    """Mean best-fitness per generation; runs share the evaluation grid."""
    if not runs:
        return []
    longest = max(runs, key=lambda r: len(r.trace))
    length = len(longest.trace)
    mean = np.zeros(length)
    for r in runs:
        values = np.array([b for _, b in r.trace])
        if len(values) < length:
            values = np.concatenate(
                [values, np.full(length - len(values), values[-1])])
        mean += values
    mean /= len(runs)
    return [(longest.trace[g][0], float(mean[g])) for g in range(length)]
