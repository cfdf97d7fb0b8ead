import numpy as np
import pytest

from rmopt.hmin import HminResult, default_hmin_config, e_hmin, hmin_fitness
from rmopt.optimizer import ConfigurationError
from rmopt.qstate import (PureState, apply_local_unitaries, ghz_state,
                          measurement_entropy, partial_trace, product_state,
                          random_pure_state, tensor_product,
                          von_neumann_entropy)

H_GHZ_3_4 = 0.9426831892554922    # H(0.36, 0.64)


def rng_from(seed):
    return np.random.Generator(np.random.Philox(key=seed))


def quick_config(n_qubits, **kw):
    # small populations keep unit tests fast; accuracy checks use loose tols
    defaults = dict(n_pop=8, n_des=6, n_stall=30, eps=1e-9,
                    max_generations=600)
    defaults.update(kw)
    return default_hmin_config(n_qubits, **defaults)


# ---------------------------------------------------------------------------
# fitness landscape

def test_fitness_at_zero_angles_is_measurement_entropy():
    rng = rng_from(4)
    for n in (1, 2, 3, 4):
        psi = random_pure_state(n, rng)
        fit = hmin_fitness(psi)
        assert fit(np.zeros(2 * n)) == pytest.approx(
            measurement_entropy(psi), abs=1e-12)


def test_fitness_oracle_values():
    basis = PureState(3, np.eye(8)[0])
    assert hmin_fitness(basis)(np.zeros(6)) == 0.0

    bell = ghz_state(2, 1.0, 1.0)
    assert hmin_fitness(bell)(np.zeros(4)) == pytest.approx(1.0, abs=1e-12)

    ghz34 = ghz_state(3, 0.6, 0.8)
    assert hmin_fitness(ghz34)(np.zeros(6)) == pytest.approx(H_GHZ_3_4,
                                                             rel=1e-12)


def test_fitness_batch_matches_scalar():
    psi = random_pure_state(3, rng_from(11))
    fit = hmin_fitness(psi)
    batch = rng_from(12).uniform(0.0, 2.0 * np.pi, size=(9, 6))
    vals = fit(batch)
    assert vals.shape == (9,)
    for k in range(9):
        assert vals[k] == pytest.approx(fit(batch[k]), abs=1e-12)


def test_fitness_is_two_pi_periodic():
    psi = random_pure_state(2, rng_from(13))
    fit = hmin_fitness(psi)
    x = np.array([0.3, 1.1, 4.0, 5.9])
    shifted = x + 2.0 * np.pi * np.array([1.0, -2.0, 3.0, 1.0])
    assert fit(shifted) == pytest.approx(fit(x), abs=1e-10)


def test_fitness_bounds():
    psi = random_pure_state(3, rng_from(14))
    fit = hmin_fitness(psi)
    vals = fit(rng_from(15).uniform(0.0, 2.0 * np.pi, size=(50, 6)))
    assert np.all(vals >= 0.0)
    assert np.all(vals <= 3.0 + 1e-12)      # at most n bits for n qubits


def test_fitness_rejects_wrong_parameter_count():
    psi = random_pure_state(2, rng_from(0))
    with pytest.raises(ValueError):
        hmin_fitness(psi)(np.zeros(6))


# ---------------------------------------------------------------------------
# default config

def test_default_hmin_config():
    cfg = default_hmin_config(5)
    assert cfg.n_params == 10
    assert cfg.v_min == 0.0
    assert cfg.v_max == pytest.approx(2.0 * np.pi)
    assert 1 <= cfg.n_maxmut <= cfg.n_params
    assert default_hmin_config(5, n_pop=3).n_pop == 3
    assert default_hmin_config(5, seed=77).seed == 77


# ---------------------------------------------------------------------------
# e_hmin

def test_product_state_has_zero_entanglement():
    psi = product_state(3, rng_from(2))
    res = e_hmin(psi, quick_config(3), n_restarts=2)
    assert res.value < 1e-5


def test_bell_state_value_is_one_bit():
    res = e_hmin(ghz_state(2, 1.0, 1.0), quick_config(2), n_restarts=2)
    assert res.value == pytest.approx(1.0, abs=1e-6)


def test_ghz_value_is_shannon_entropy_of_weights():
    res = e_hmin(ghz_state(3, 0.6, 0.8), quick_config(3), n_restarts=2)
    assert res.value == pytest.approx(H_GHZ_3_4, abs=1e-6)


def test_two_qubit_value_matches_reduced_entropy():
    # for two qubits the minimal measurement entropy is the entanglement
    # entropy of either marginal (Schmidt basis measurement achieves it)
    psi = random_pure_state(2, rng_from(33))
    rho = np.outer(psi.amplitudes, psi.amplitudes.conj())
    from rmopt.qstate import DensityMatrix
    ent = von_neumann_entropy(partial_trace(DensityMatrix(2, 2, rho), "A"))
    res = e_hmin(psi, quick_config(2), n_restarts=4)
    assert res.value == pytest.approx(ent, abs=1e-4)


def test_value_is_recomputed_from_params():
    psi = random_pure_state(3, rng_from(5))
    res = e_hmin(psi, quick_config(3, max_generations=80), n_restarts=2)
    again = measurement_entropy(apply_local_unitaries(psi, res.params))
    assert res.value == again


def test_value_never_exceeds_plain_measurement_entropy():
    psi = ghz_state(4, 1.0, 1.0)
    res = e_hmin(psi, quick_config(4), n_restarts=3)
    assert res.value <= measurement_entropy(psi) + 1e-9
    assert res.value >= -1e-12


def test_small_additivity_case():
    bell = ghz_state(2, 1.0, 1.0)
    single = random_pure_state(1, rng_from(6))
    res = e_hmin(tensor_product(bell, single), quick_config(3), n_restarts=3)
    assert res.value == pytest.approx(1.0, abs=1e-5)


def test_restarts_are_deterministic_and_workers_neutral():
    psi = random_pure_state(3, rng_from(7))
    cfg = quick_config(3, max_generations=60)
    serial = e_hmin(psi, cfg, n_restarts=3)
    threaded = e_hmin(psi, cfg, n_restarts=3, workers=3)
    assert serial.value == threaded.value
    np.testing.assert_array_equal(serial.params.to_flat(),
                                  threaded.params.to_flat())
    assert serial.total_evaluations == threaded.total_evaluations
    assert serial.n_restarts == 3
    assert serial.total_evaluations >= serial.optimizer_result.evaluations


def test_e_hmin_validates_inputs():
    psi = random_pure_state(2, rng_from(0))
    with pytest.raises(ConfigurationError):
        e_hmin(psi, default_hmin_config(3))       # 6 params for 2 qubits
    with pytest.raises(ValueError):
        e_hmin(psi, quick_config(2), n_restarts=0)


def test_result_dataclass_fields():
    psi = product_state(2, rng_from(9))
    res = e_hmin(psi, quick_config(2, max_generations=40), n_restarts=1)
    assert isinstance(res, HminResult)
    assert res.params.n_qubits == 2
    assert res.total_evaluations == res.optimizer_result.evaluations
