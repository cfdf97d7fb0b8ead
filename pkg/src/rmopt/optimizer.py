"""Global minimization by random mutations of independent subpopulations.

The algorithm keeps ``n_pop`` candidate vectors ("subpopulations").  Each
generation every vector spawns ``n_des`` descendants by randomly mutating a
few components, and the best vector of each family (optionally including the
parent) survives.  There is no crossover and no coupling between
subpopulations; the only moving parts are the mutation kernel and elitist
selection, which makes runs cheap and easy to reason about.

A mutated component changes by ``m * base**p`` with ``m ~ U[-1, 1)`` and
``p ~ U[p_min, p_max)``, so step magnitudes are roughly log-uniform over
``base**p_min .. base**p_max`` and the search refines itself without an
explicit cooling schedule.

Determinism: every random draw comes from a counter-based bit generator
(Philox) keyed by ``config.seed`` with the counter encoding (generation,
subpopulation).  The evaluation strategy (serial, vectorized, or a thread
pool) therefore has no effect on the sequence of candidates, and identical
``(fitness, config)`` pairs produce identical results.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from enum import Enum
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "ConfigurationError",
    "OptimizationResult",
    "RmConfig",
    "TerminationReason",
    "derive_seed",
    "init_population",
    "load_config",
    "minimize",
    "mutate",
    "save_config",
    "select_winner",
    "should_terminate",
]

_MASK64 = 0xFFFFFFFFFFFFFFFF


class ConfigurationError(ValueError):
    """Raised when an :class:`RmConfig` (or a config file) is invalid."""


class TerminationReason(str, Enum):
    """Why :func:`minimize` stopped."""

    STALL = "stall"
    GENERATION_BUDGET = "generation_budget"
    EVALUATION_BUDGET = "evaluation_budget"


@dataclass(frozen=True)
class RmConfig:
    """Complete, immutable description of one optimizer run.

    Parameters
    ----------
    n_params : int
        Dimension of the search space.
    n_maxmut : int
        Largest number of components a single mutation may touch.  The
        actual count is drawn uniformly from ``1 .. n_maxmut`` per
        descendant.
    v_min, v_max : float
        Bounds of the uniform initial population, ``v_min <= x < v_max``.
        Mutations may leave this box; it constrains initialization only.
    n_pop : int
        Number of independent subpopulations.
    n_des : int
        Descendants generated per subpopulation per generation.
    p_min, p_max : float
        Exponent range of the mutation magnitude ``m * base**p``.
    base : float
        Base of the mutation magnitude; must exceed 1.
    include_parent : bool
        If true (default) the parent competes with its descendants and
        survives ties, so per-subpopulation fitness never worsens.
    n_stall : int
        Number of consecutive generations with improvement below ``eps``
        required to stop.
    eps : float
        Stall threshold on the improvement of the best fitness so far.
    max_generations, max_evaluations : int
        Hard budget caps.
    seed : int
        Master seed, a 64-bit unsigned integer.
    """

    n_params: int
    n_maxmut: int
    v_min: float
    v_max: float
    n_pop: int = 40
    n_des: int = 10
    p_min: float = -9.0
    p_max: float = 1.0
    base: float = 10.0
    include_parent: bool = True
    n_stall: int = 50
    eps: float = 1e-6
    max_generations: int = 100_000
    max_evaluations: int = 100_000_000
    seed: int = 0

    def __post_init__(self) -> None:
        def need(cond: bool, msg: str) -> None:
            if not cond:
                raise ConfigurationError(msg)

        need(isinstance(self.n_params, int) and self.n_params >= 1,
             f"n_params must be a positive integer, got {self.n_params!r}")
        need(isinstance(self.n_maxmut, int) and 1 <= self.n_maxmut <= self.n_params,
             f"n_maxmut must be in 1..n_params={self.n_params}, got {self.n_maxmut!r}")
        need(isinstance(self.n_pop, int) and self.n_pop >= 1,
             f"n_pop must be a positive integer, got {self.n_pop!r}")
        need(isinstance(self.n_des, int) and self.n_des >= 1,
             f"n_des must be a positive integer, got {self.n_des!r}")
        need(math.isfinite(self.v_min) and math.isfinite(self.v_max)
             and self.v_min < self.v_max,
             f"require finite v_min < v_max, got [{self.v_min!r}, {self.v_max!r})")
        need(math.isfinite(self.p_min) and math.isfinite(self.p_max)
             and self.p_min <= self.p_max,
             f"require finite p_min <= p_max, got {self.p_min!r}, {self.p_max!r}")
        need(math.isfinite(self.base) and self.base > 1.0,
             f"base must be > 1, got {self.base!r}")
        need(isinstance(self.n_stall, int) and self.n_stall >= 1,
             f"n_stall must be a positive integer, got {self.n_stall!r}")
        need(math.isfinite(self.eps) and self.eps > 0.0,
             f"eps must be positive, got {self.eps!r}")
        need(isinstance(self.max_generations, int) and self.max_generations >= 1,
             f"max_generations must be a positive integer, got {self.max_generations!r}")
        need(isinstance(self.max_evaluations, int) and self.max_evaluations >= 1,
             f"max_evaluations must be a positive integer, got {self.max_evaluations!r}")
        need(isinstance(self.seed, int) and 0 <= self.seed <= _MASK64,
             f"seed must be an unsigned 64-bit integer, got {self.seed!r}")


@dataclass
class OptimizationResult:
    """Outcome of one :func:`minimize` call.

    ``trace`` holds one ``(cumulative_evaluations, best_fitness_so_far)``
    pair per generation; its last entry always equals
    ``(evaluations, f_best)``.  ``best_fitness_so_far`` is a running
    minimum over everything evaluated, so the trace is non-increasing.
    """

    x_best: np.ndarray
    f_best: float
    trace: list[tuple[int, float]] = field(repr=False)
    generations: int = 0
    evaluations: int = 0
    termination_reason: TerminationReason = TerminationReason.STALL


def derive_seed(master_seed: int, index: int) -> int:
    """Expand a 64-bit master seed into a stream of decorrelated child seeds.

    Uses the splitmix64 finalizer on ``master_seed + (index + 1) * golden``,
    the standard trick for seeding families of generators from one integer.
    Same ``(master_seed, index)`` always yields the same child.
    """
    if not 0 <= master_seed <= _MASK64:
        raise ConfigurationError(f"master seed out of range: {master_seed!r}")
    if index < 0:
        raise ConfigurationError(f"index must be non-negative, got {index!r}")
    z = (master_seed + (index + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def _stream(seed: int, generation: int, subpop: int) -> np.random.Generator:
    """Independent generator for one (generation, subpopulation) cell.

    Philox is counter-based: putting the coordinates into the high counter
    words gives every cell its own block of 2**128 draws, so streams never
    overlap and the draw order inside a generation does not depend on how
    evaluations are scheduled.
    """
    bitgen = np.random.Philox(counter=[0, 0, subpop, generation], key=seed)
    return np.random.Generator(bitgen)


def init_population(config: RmConfig, rng: np.random.Generator) -> np.ndarray:
    """Draw the initial population, uniform on ``[v_min, v_max)``.

    Returns an array of shape ``(n_pop, n_params)``.
    """
    return rng.uniform(config.v_min, config.v_max,
                       size=(config.n_pop, config.n_params))


def mutate(x: np.ndarray, config: RmConfig, rng: np.random.Generator) -> np.ndarray:
    """Return a mutated copy of ``x``; the input is not modified.

    Draws ``n_mut ~ U{1..n_maxmut}``, picks that many distinct components
    uniformly at random, and adds ``m * base**p`` to each with
    ``m ~ U[-1, 1)`` and ``p ~ U[p_min, p_max)``.  Mutated values are not
    clipped to the initialization box.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (config.n_params,):
        raise ValueError(
            f"expected vector of shape ({config.n_params},), got {x.shape}")
    n_mut = int(rng.integers(1, config.n_maxmut + 1))
    idx = rng.choice(config.n_params, size=n_mut, replace=False)
    m = rng.uniform(-1.0, 1.0, size=n_mut)
    p = rng.uniform(config.p_min, config.p_max, size=n_mut)
    out = x.copy()
    out[idx] += m * config.base ** p
    return out


def _mutate_family(parent: np.ndarray, config: RmConfig,
                   rng: np.random.Generator) -> np.ndarray:
    """All ``n_des`` descendants of one parent in a single batch.

    Batch draws consume the stream in a different order than repeated
    :func:`mutate` calls would, but the per-descendant distribution is
    identical: ranks of i.i.d. uniforms form a uniform random permutation,
    so ``rank < n_mut`` selects a uniform subset of ``n_mut`` components.
    """
    n_des, n = config.n_des, config.n_params
    n_mut = rng.integers(1, config.n_maxmut + 1, size=n_des)
    ranks = np.argsort(np.argsort(rng.random((n_des, n)), axis=1), axis=1)
    mask = ranks < n_mut[:, None]
    m = rng.uniform(-1.0, 1.0, size=(n_des, n))
    p = rng.uniform(config.p_min, config.p_max, size=(n_des, n))
    return parent + mask * (m * config.base ** p)


def select_winner(descendants: np.ndarray, fitness_values: np.ndarray) -> int:
    """Index of the best candidate: minimal fitness, lowest index on ties."""
    fitness_values = np.asarray(fitness_values, dtype=float)
    if fitness_values.ndim != 1 or len(fitness_values) == 0:
        raise ValueError("fitness_values must be a non-empty 1-D array")
    if len(descendants) != len(fitness_values):
        raise ValueError(
            f"{len(descendants)} candidates but {len(fitness_values)} fitness values")
    return int(np.argmin(fitness_values))


def should_terminate(trace: Sequence[tuple[int, float]], config: RmConfig) -> bool:
    """True once the run has stalled or exhausted a budget.

    ``trace`` must contain one entry per completed generation.  The stall
    condition needs ``n_stall + 1`` entries: it looks at the last
    ``n_stall`` consecutive improvements of the best fitness and fires when
    all of them are below ``eps``.
    """
    if len(trace) == 0:
        raise ValueError("trace must contain at least one generation")
    if len(trace) >= config.max_generations:
        return True
    if trace[-1][0] >= config.max_evaluations:
        return True
    return _stalled(trace, config)


def _stalled(trace: Sequence[tuple[int, float]], config: RmConfig) -> bool:
    if len(trace) < config.n_stall + 1:
        return False
    window = [b for _, b in trace[-(config.n_stall + 1):]]
    return all(window[k] - window[k + 1] < config.eps
               for k in range(config.n_stall))


def _sanitize(values: np.ndarray) -> np.ndarray:
    """Treat NaN fitness as +inf so broken regions lose every comparison."""
    return np.where(np.isnan(values), np.inf, values)


def minimize(fitness: Callable[[np.ndarray], float], config: RmConfig, *,
             vectorized: bool = False,
             workers: int | None = None) -> OptimizationResult:
    """Minimize ``fitness`` by random mutations with elitist selection.

    Parameters
    ----------
    fitness : callable
        Maps a parameter vector of shape ``(n_params,)`` to a float.  With
        ``vectorized=True`` it must instead accept an ``(m, n_params)``
        batch and return ``m`` values; this is the fast path for
        numpy-friendly objectives.
    config : RmConfig
        Run description, including the master seed.
    workers : int, optional
        Evaluate candidates in a thread pool of this size.  Useful only
        when ``fitness`` releases the GIL or is I/O bound.  Has no effect
        on the result, only on wall time.

    Returns
    -------
    OptimizationResult
        The best vector ever evaluated, its fitness, and the per-generation
        trace.  ``evaluations == n_pop + n_pop * n_des * generations``.
    """
    cfg = config
    n_pop, n_des, n = cfg.n_pop, cfg.n_des, cfg.n_params

    pool: ThreadPoolExecutor | None = None
    if not vectorized and workers is not None and workers > 1:
        pool = ThreadPoolExecutor(max_workers=workers)

    def evaluate(batch: np.ndarray) -> np.ndarray:
        if vectorized:
            vals = np.asarray(fitness(batch), dtype=float)
            if vals.shape != (len(batch),):
                raise ValueError(
                    f"vectorized fitness returned shape {vals.shape}, "
                    f"expected ({len(batch)},)")
        elif pool is not None:
            vals = np.fromiter(pool.map(fitness, batch),
                               dtype=float, count=len(batch))
        else:
            vals = np.fromiter((fitness(v) for v in batch),
                               dtype=float, count=len(batch))
        return _sanitize(vals)

    try:
        pop = init_population(cfg, _stream(cfg.seed, 0, 0))
        fit = evaluate(pop)
        evaluations = n_pop
        best_idx = int(np.argmin(fit))
        x_best = pop[best_idx].copy()
        f_best = float(fit[best_idx])

        trace: list[tuple[int, float]] = []
        reason: TerminationReason | None = None
        if evaluations >= cfg.max_evaluations:
            reason = TerminationReason.EVALUATION_BUDGET

        generation = 0
        while reason is None:
            generation += 1
            families = np.empty((n_pop, n_des, n))
            for i in range(n_pop):
                families[i] = _mutate_family(pop[i], cfg,
                                             _stream(cfg.seed, generation, i))
            desc_fit = evaluate(families.reshape(n_pop * n_des, n))
            desc_fit = desc_fit.reshape(n_pop, n_des)
            evaluations += n_pop * n_des

            winners = np.argmin(desc_fit, axis=1)
            winner_fit = desc_fit[np.arange(n_pop), winners]
            if cfg.include_parent:
                # Parent wins ties, so family fitness never worsens.
                prev_fit = fit.copy()
                improved = winner_fit < fit
            else:
                improved = np.ones(n_pop, dtype=bool)
            pop[improved] = families[improved, winners[improved]]
            fit[improved] = winner_fit[improved]
            if cfg.include_parent:
                assert np.all(fit <= prev_fit), "elitist selection violated"

            gen_best = float(np.min(fit))
            if gen_best < f_best:
                w = int(np.argmin(fit))
                f_best = gen_best
                x_best = pop[w].copy()
            trace.append((evaluations, f_best))

            if _stalled(trace, cfg):
                reason = TerminationReason.STALL
            elif generation >= cfg.max_generations:
                reason = TerminationReason.GENERATION_BUDGET
            elif evaluations >= cfg.max_evaluations:
                reason = TerminationReason.EVALUATION_BUDGET
    finally:
        if pool is not None:
            pool.shutdown(wait=False)

    return OptimizationResult(x_best=x_best, f_best=f_best, trace=trace,
                              generations=len(trace), evaluations=evaluations,
                              termination_reason=reason)


# ---------------------------------------------------------------------------
# Flat key=value config files

_CONFIG_FIELDS = {f.name: f.type for f in fields(RmConfig)}
_REQUIRED_KEYS = ("n_params", "n_maxmut", "v_min", "v_max")
_INT_KEYS = frozenset({"n_params", "n_pop", "n_des", "n_maxmut", "n_stall",
                       "max_generations", "max_evaluations", "seed"})
_FLOAT_KEYS = frozenset({"p_min", "p_max", "base", "v_min", "v_max", "eps"})
_BOOL_KEYS = frozenset({"include_parent"})


def _parse_value(key: str, raw: str):
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
        if key in _BOOL_KEYS:
            low = raw.lower()
            if low in ("true", "1", "yes"):
                return True
            if low in ("false", "0", "no"):
                return False
            raise ValueError(raw)
    except ValueError:
        raise ConfigurationError(
            f"bad value for {key!r}: {raw!r}") from None
    raise ConfigurationError(f"unknown config key {key!r}")


def load_config(path: str | os.PathLike, **overrides) -> RmConfig:
    """Read an :class:`RmConfig` from a flat ``key = value`` file.

    One assignment per line; blank lines and ``#`` comments are ignored.
    Recognized keys are exactly the :class:`RmConfig` fields; anything else
    raises :class:`ConfigurationError`.  Keyword ``overrides`` replace file
    values (used by the CLI for e.g. ``--seed``).
    """
    values: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError(
                    f"{path}:{lineno}: expected 'key = value', got {line!r}")
            key, raw = (part.strip() for part in line.split("=", 1))
            if key not in _CONFIG_FIELDS:
                raise ConfigurationError(
                    f"{path}:{lineno}: unknown config key {key!r}")
            values[key] = _parse_value(key, raw)
    values.update(overrides)
    missing = [k for k in _REQUIRED_KEYS if k not in values]
    if missing:
        raise ConfigurationError(
            f"{path}: missing required key(s): {', '.join(missing)}")
    return RmConfig(**values)


def save_config(config: RmConfig, path: str | os.PathLike) -> None:
    """Write ``config`` as a flat ``key = value`` file readable by
    :func:`load_config`."""
    with open(path, "w", encoding="utf-8") as fh:
        for f in fields(RmConfig):
            value = getattr(config, f.name)
            if isinstance(value, bool):
                value = "true" if value else "false"
            fh.write(f"{f.name} = {value}\n")
