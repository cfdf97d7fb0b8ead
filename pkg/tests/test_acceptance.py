"""Release-gate checks: statistical quality, oracle agreement, physics.

Unlike the per-module unit tests these run whole seeded experiments, so
the file takes on the order of twenty minutes of CPU.  Every test pins
the exact configuration it certifies; the benchmark configurations are
read from ``experiments/`` so the shipped files are what gets gated.
"""

import math
import os
import time
from dataclasses import replace

import numpy as np
import pytest

from rmopt.benchmarks import PLATEAU_MIN, get_problem
from rmopt.discord import (bell_diagonal_state, default_discord_config,
                           discord, luo_discord_analytical,
                           random_bell_diagonal)
from rmopt.harness import ExperimentStats, e05, run_experiments
from rmopt.hmin import default_hmin_config, e_hmin, hmin_fitness
from rmopt.optimizer import load_config, minimize
from rmopt.qstate import (LocalUnitaryParams, ghz_state, measurement_entropy,
                          partial_trace, product_state, random_density_matrix,
                          random_pure_state, tensor_product,
                          unitary_from_hermitian, von_neumann_entropy,
                          HermitianParams)

EXPERIMENTS = os.path.join(os.path.dirname(__file__), os.pardir,
                           "experiments")

H_GHZ_3_4 = 0.9426831892554922       # H(0.36, 0.64), frozen
E05_ONE_OF_TEN = 30.10299956639812
E05_NINE_OF_TEN = 657.8813478960584


def rng_from(seed):
    return np.random.Generator(np.random.Philox(key=seed))


def stats_with(n_exp, n_evaluations, n_err):
    return ExperimentStats(n_exp=n_exp, n_evaluations=n_evaluations,
                           n_err=n_err, f_best=0.0, f_avg=0.0, per_run=[])


# ---------------------------------------------------------------------------
# 1. benchmark statistics over twenty seeded runs each

BENCHMARKS = {
    "rastrigin": ("rastrigin.cfg", "rastrigin", 1.0,
                  dict(f_best=1e-3, f_avg=1e-2)),
    "schwefel_x100": ("schwefel_x100.cfg", "schwefel", 100.0,
                      dict(f_avg=0.1)),
    "griewank_x400": ("griewank_x400.cfg", "griewank", 400.0,
                      dict(f_best=0.1)),
    "rosenbrock": ("rosenbrock.cfg", "rosenbrock", 1.0,
                   dict(f_avg=60.0)),
}


@pytest.mark.parametrize("label", list(BENCHMARKS))
def test_benchmark_statistics(label):
    cfg_file, name, scale, bounds = BENCHMARKS[label]
    config = load_config(os.path.join(EXPERIMENTS, cfg_file))
    # the certified configuration shape
    assert config.n_params == 50
    assert config.n_pop == 40
    assert config.n_maxmut == 5
    assert config.n_des in (10, 20)
    assert config.n_stall == 50
    assert config.eps == 1e-6

    problem = get_problem(name, arity=50, scale=scale)
    stats = run_experiments(problem, config, 20, 1e-3,
                            problem.known_minimum)
    if "f_best" in bounds:
        assert stats.f_best <= bounds["f_best"], \
            f"{label}: f_best {stats.f_best:.3e} over {bounds['f_best']}"
    if "f_avg" in bounds:
        assert stats.f_avg <= bounds["f_avg"], \
            f"{label}: f_avg {stats.f_avg:.3e} over {bounds['f_avg']}"
    assert stats.f_avg >= problem.known_minimum - 1e-6


# ---------------------------------------------------------------------------
# 2. bulk agreement of the numerical discord with the closed form

def test_discord_tracks_the_analytical_oracle_in_bulk():
    started = time.monotonic()
    rng = rng_from(2024)
    config = default_discord_config(2, seed=7)
    assert config.n_pop == 10 and config.n_des == 10
    assert config.n_maxmut == 4          # five would exceed the 4 parameters

    worst = -1.0
    for _ in range(200):
        params = random_bell_diagonal(rng)
        _, _, expected = luo_discord_analytical(params)
        result = discord(bell_diagonal_state(params), config, n_restarts=2)
        worst = max(worst, abs(result.discord - expected))
        assert result.discord >= expected - 1e-9
    assert worst < 1e-6, f"worst |numerical - analytical| = {worst:.3e}"
    assert time.monotonic() - started < 600.0


# ---------------------------------------------------------------------------
# 3. minimal measurement entropy on states with known values

def test_e_hmin_validity_suite():
    # product states drop to zero and generalized GHZ to H(l0^2, l1^2),
    # out to twelve qubits
    for n in (2, 4, 8, 12):
        prod = product_state(n, rng_from(100 + n))
        res = e_hmin(prod, default_hmin_config(n, seed=1), n_restarts=2)
        assert res.value < 1e-5, f"product n={n}: {res.value:.2e}"

        ghz = ghz_state(n, 0.6, 0.8)
        res = e_hmin(ghz, default_hmin_config(n, seed=1), n_restarts=2)
        assert abs(res.value - H_GHZ_3_4) < 1e-5, \
            f"ghz n={n}: {res.value:.8f}"

    # two-qubit random states: the known optimum is the entropy of the
    # reduced state (Schmidt coefficients)
    for seed in range(5):
        psi = random_pure_state(2, rng_from(200 + seed))
        rho = np.tensordot(psi.amplitudes.reshape(2, 2),
                           psi.amplitudes.reshape(2, 2).conj(), axes=([1], [1]))
        expected = von_neumann_entropy(rho)
        res = e_hmin(psi, default_hmin_config(2, seed=2), n_restarts=4)
        assert abs(res.value - expected) < 1e-4, \
            f"2q seed={seed}: {res.value:.6f} vs {expected:.6f}"

    # additivity on product fixtures, up to eight qubits
    phi = random_pure_state(4, rng_from(21))
    psi = random_pure_state(4, rng_from(22))
    e_phi = e_hmin(phi, default_hmin_config(4, seed=3), n_restarts=8).value
    e_psi = e_hmin(psi, default_hmin_config(4, seed=3), n_restarts=8).value
    joint = e_hmin(tensor_product(phi, psi), default_hmin_config(8, seed=3),
                   n_restarts=8).value
    assert abs(joint - (e_phi + e_psi)) < 1e-4, \
        f"additivity 4+4: joint {joint:.6f} vs sum {e_phi + e_psi:.6f}"

    ghz4 = ghz_state(4, 0.6, 0.8)
    joint = e_hmin(tensor_product(ghz4, ghz4),
                   default_hmin_config(8, seed=3), n_restarts=8).value
    assert abs(joint - 2 * H_GHZ_3_4) < 1e-4, \
        f"additivity ghz4+ghz4: {joint:.6f} vs {2 * H_GHZ_3_4:.6f}"


# ---------------------------------------------------------------------------
# 4. structural invariants that need no reference numbers

def test_property_invariants():
    # optimizer: the reported best never worsens along the trace, and
    # worker threads change nothing
    problem = get_problem("rastrigin", arity=8)
    config = load_config(os.path.join(EXPERIMENTS, "rastrigin.cfg"),
                         n_params=8, max_generations=300, seed=5)
    serial = minimize(problem.fitness, config, vectorized=True)
    best = [b for _, b in serial.trace]
    assert all(b2 <= b1 + 1e-15 for b1, b2 in zip(best, best[1:]))
    threaded = minimize(problem.fitness, config, workers=4)
    assert threaded.f_best == serial.f_best
    np.testing.assert_array_equal(threaded.x_best, serial.x_best)

    # local unitaries stay unitary, measurement projectors stay complete
    rng = rng_from(77)
    angles = LocalUnitaryParams(rng.uniform(0, 2 * np.pi, size=(5, 2)))
    for u in angles.matrices():
        np.testing.assert_allclose(u @ u.conj().T, np.eye(2), atol=1e-12)
    h = HermitianParams(3, rng.uniform(-1, 1, size=9))
    u = unitary_from_hermitian(h.matrix())
    np.testing.assert_allclose(u @ u.conj().T, np.eye(3), atol=1e-12)
    _, vecs = np.linalg.eigh(h.matrix())
    projs = np.einsum("ai,bi->iab", vecs, vecs.conj())
    np.testing.assert_allclose(projs.sum(axis=0), np.eye(3), atol=1e-12)

    # entropy bounds: 0 <= E_hmin <= H_meas <= n qubits
    psi = random_pure_state(3, rng)
    plain = measurement_entropy(psi)
    res = e_hmin(psi, default_hmin_config(3, seed=4), n_restarts=2)
    assert -1e-12 <= res.value <= plain + 1e-9
    assert plain <= 3.0 + 1e-12

    # discord is nonnegative and never undercuts the closed form
    for seed in range(5):
        params = random_bell_diagonal(rng_from(300 + seed))
        _, _, expected = luo_discord_analytical(params)
        result = discord(bell_diagonal_state(params),
                         default_discord_config(2, seed=6), n_restarts=2)
        assert result.discord >= -1e-9
        assert result.discord >= expected - 1e-9


# ---------------------------------------------------------------------------
# 5. the e_0.5 cost metric

def test_e05_hand_examples_and_plateau_reproducibility():
    assert e05(stats_with(10, 1000, 5)) == 100.0
    assert e05(stats_with(10, 1000, 1)) == pytest.approx(E05_ONE_OF_TEN,
                                                         rel=1e-12)
    assert e05(stats_with(10, 1000, 9)) == pytest.approx(E05_NINE_OF_TEN,
                                                         rel=1e-12)

    config = load_config(os.path.join(EXPERIMENTS, "plateau_e05.cfg"))
    problem = get_problem("plateau")
    first = run_experiments(problem, config, 20, 1e-3, PLATEAU_MIN)
    second = run_experiments(problem, config, 20, 1e-3, PLATEAU_MIN)
    assert 0 < first.n_err < first.n_exp, \
        f"degenerate failure rate {first.n_err}/20"
    assert first.e_05 is not None and math.isfinite(first.e_05)
    assert first.e_05 > 0
    assert second.e_05 == first.e_05
    assert second.n_err == first.n_err


# ---------------------------------------------------------------------------
# 6. brute force beats nothing: dense measurement grid as an upper bound

def _grid_min_conditional_entropy(rho, n_theta=200, n_phi=400):
    """min over a theta x phi grid of Bloch-vector projective measurements
    on B of S(rho | measurement)."""
    theta = np.linspace(0.0, np.pi, n_theta)
    phi = np.linspace(0.0, 2.0 * np.pi, n_phi, endpoint=False)
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    nx = (np.sin(tt) * np.cos(pp)).ravel()
    ny = (np.sin(tt) * np.sin(pp)).ravel()
    nz = np.cos(tt).ravel()

    plus = 0.5 * np.stack([
        np.stack([1.0 + nz, nx - 1j * ny], axis=-1),
        np.stack([nx + 1j * ny, 1.0 - nz], axis=-1),
    ], axis=-2)
    rho4 = rho.entries.reshape(2, 2, 2, 2)

    total = np.zeros(plus.shape[0])
    for proj in (plus, np.eye(2) - plus):
        cond = np.einsum("abcd,gdb->gac", rho4, proj)
        prob = np.einsum("gaa->g", cond).real
        vals = np.linalg.eigvalsh(cond)
        keep = prob > 1e-12
        scaled = vals[keep] / prob[keep, None]
        scaled = np.maximum(scaled, 1e-300)
        ent = -np.sum(scaled * np.log2(scaled), axis=1)
        total[keep] += prob[keep] * ent
    return float(total.min())


def test_discord_beats_dense_measurement_grid():
    config = default_discord_config(2, seed=9)
    for seed in range(20):
        rho = random_density_matrix(2, 2, rng_from(400 + seed))
        grid_value = _grid_min_conditional_entropy(rho)
        result = discord(rho, config, n_restarts=2)
        s_a = von_neumann_entropy(partial_trace(rho, "A"))
        rm_value = s_a - result.classical_correlations
        assert rm_value <= grid_value + 1e-6, \
            f"state {seed}: rm {rm_value:.8f} grid {grid_value:.8f}"
