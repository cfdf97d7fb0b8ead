"""Minimal measurement entropy of a pure multiqubit state.

``E_Hmin`` is the minimum, over independent single-qubit basis changes, of
the Shannon entropy of the computational-basis measurement:

    E(psi) = min_{U_1..U_n} H_meas((U_1 (x) ... (x) U_n) |psi>)

Each ``U_k`` is the two-parameter unitary of :func:`rmopt.qstate.unitary_2x2`
(phases that would not move the outcome probabilities are omitted), giving a
``2n``-dimensional landscape that the random-mutations optimizer searches
directly.  The quantity vanishes exactly on product states and is invariant
under local unitaries, which is what the validity tests exercise.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .optimizer import (ConfigurationError, OptimizationResult, RmConfig,
                        derive_seed, minimize)
from .qstate import (LocalUnitaryParams, PureState, _unitary_2x2_batch,
                     apply_local_unitaries, measurement_entropy)

__all__ = ["HminResult", "default_hmin_config", "e_hmin", "hmin_fitness"]

_TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class HminResult:
    """Best measurement basis found for one state.

    ``value`` is recomputed from ``params`` through the public state
    operations, so it equals
    ``measurement_entropy(apply_local_unitaries(psi, params))`` exactly.
    ``optimizer_result`` belongs to the winning restart;
    ``total_evaluations`` counts fitness evaluations across all restarts.
    """

    value: float
    params: LocalUnitaryParams
    optimizer_result: OptimizationResult
    total_evaluations: int
    n_restarts: int


def default_hmin_config(n_qubits: int, seed: int = 0, **overrides) -> RmConfig:
    """Optimizer configuration tuned for the entropy landscape.

    Initialization covers one full period ``[0, 2*pi)`` of every angle.
    Population sizes are chosen so that the validity suite (product / GHZ
    states through 12 qubits) converges to 1e-5 in seconds; pass
    ``overrides`` to tighten or loosen.
    """
    n_params = 2 * n_qubits
    settings = dict(
        n_params=n_params,
        n_maxmut=max(2, min(5, n_params // 4)),
        v_min=0.0,
        v_max=_TWO_PI,
        n_pop=20,
        n_des=10,
        n_stall=50,
        eps=1e-8,
        seed=seed,
    )
    settings.update(overrides)
    return RmConfig(**settings)


def hmin_fitness(psi: PureState) -> Callable[[np.ndarray], float]:
    """Fitness landscape over the flat angle vector.

    The returned callable maps ``(delta_1, gamma_1, ..., delta_n, gamma_n)``
    to the measurement entropy of the locally rotated state.  It also
    accepts an ``(m, 2n)`` batch and then returns ``m`` values, so it can
    be passed to :func:`rmopt.optimizer.minimize` with ``vectorized=True``.
    """
    amps = psi.amplitudes
    n = psi.n_qubits
    dim = amps.size

    def fitness(x: np.ndarray):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        batch = x[np.newaxis, :] if single else x
        if batch.shape[1] != 2 * n:
            raise ValueError(
                f"expected {2 * n} parameters for {n} qubits, "
                f"got {batch.shape[1]}")
        m = batch.shape[0]
        mats = _unitary_2x2_batch(batch[:, 0::2], batch[:, 1::2])  # (m, n, 2, 2)
        work = np.tile(amps, (m, 1))
        for k in range(n):
            block = dim >> (k + 1)
            # Broadcasted matmul applies U_k to axis k of each state:
            # (m, 1, 2, 2) @ (m, 2**k, 2, block) -> (m, 2**k, 2, block).
            work = np.matmul(mats[:, k, np.newaxis],
                             work.reshape(m, 2 ** k, 2, block)).reshape(m, dim)
        probs = work.real ** 2 + work.imag ** 2
        # 0*log(clip) == 0, so clipping only silences log(0) warnings.
        ent = -np.sum(probs * np.log2(np.maximum(probs, 1e-300)), axis=1) + 0.0
        return float(ent[0]) if single else ent

    return fitness


def e_hmin(psi: PureState, config: RmConfig | None = None,
           n_restarts: int = 8, *, workers: int | None = None) -> HminResult:
    """Estimate the minimal measurement entropy by multistart optimization.

    Runs ``n_restarts`` independent minimizations (seeds derived from
    ``config.seed``) and keeps the best; ties go to the lowest restart
    index.  ``workers`` threads may run restarts concurrently without
    changing the result.
    """
    if config is None:
        config = default_hmin_config(psi.n_qubits)
    if config.n_params != 2 * psi.n_qubits:
        raise ConfigurationError(
            f"config.n_params = {config.n_params}, but a {psi.n_qubits}-qubit "
            f"state needs {2 * psi.n_qubits}")
    if n_restarts < 1:
        raise ValueError(f"n_restarts must be >= 1, got {n_restarts!r}")

    fitness = hmin_fitness(psi)

    def run(index: int) -> OptimizationResult:
        cfg = replace(config, seed=derive_seed(config.seed, index))
        return minimize(fitness, cfg, vectorized=True)

    results = _map_ordered(run, n_restarts, workers)
    best_index = min(range(n_restarts), key=lambda r: (results[r].f_best, r))
    best = results[best_index]
    params = LocalUnitaryParams.from_flat(best.x_best)
    value = measurement_entropy(apply_local_unitaries(psi, params))
    return HminResult(value=value, params=params, optimizer_result=best,
                      total_evaluations=sum(r.evaluations for r in results),
                      n_restarts=n_restarts)


def _map_ordered(fn: Callable[[int], OptimizationResult], count: int,
                 workers: int | None) -> list[OptimizationResult]:
    """Map over ``range(count)``, optionally threaded, preserving order."""
    if workers is not None and workers > 1 and count > 1:
        with ThreadPoolExecutor(max_workers=min(workers, count)) as pool:
            return list(pool.map(fn, range(count)))
    return [fn(k) for k in range(count)]
