"""rmopt: global minimization by random mutations, with quantum applications.

The core optimizer (:mod:`rmopt.optimizer`) evolves a set of independent
subpopulations by mutation and elitist selection only.  On top of it sit two
quantum-information applications: the minimal measurement entropy of a pure
multiqubit state (:mod:`rmopt.hmin`) and the quantum discord of a bipartite
mixed state (:mod:`rmopt.discord`).  Classical benchmark functions
(:mod:`rmopt.benchmarks`) and a repeated-experiment harness
(:mod:`rmopt.harness`) support calibration and cost measurements.
"""

from .optimizer import (
    ConfigurationError,
    OptimizationResult,
    RmConfig,
    TerminationReason,
    derive_seed,
    init_population,
    load_config,
    minimize,
    mutate,
    save_config,
    select_winner,
    should_terminate,
)
from .benchmarks import (
    PLATEAU_ARGMIN,
    PLATEAU_MIN,
    SCHWEFEL_ARGMIN,
    BenchmarkProblem,
    get_problem,
    griewank,
    griewank_problem,
    plateau,
    plateau_fixture,
    rastrigin,
    rastrigin_problem,
    rosenbrock,
    rosenbrock_problem,
    scaled,
    schwefel,
    schwefel_problem,
)
from .qstate import (
    DensityMatrix,
    HermitianParams,
    InvalidStateError,
    LocalUnitaryParams,
    PureState,
    apply_local_unitaries,
    apply_qubit_unitaries,
    ghz_state,
    grover_state,
    hermitian_eigensystem,
    hermitian_from_flat,
    load_density_matrix,
    load_pure_state,
    measurement_entropy,
    partial_trace,
    product_state,
    random_density_matrix,
    random_pure_state,
    save_density_matrix,
    save_pure_state,
    tensor_product,
    unitary_2x2,
    unitary_from_hermitian,
    von_neumann_entropy,
)
from .hmin import HminResult, default_hmin_config, e_hmin, hmin_fitness
from .discord import (
    BellDiagonalParams,
    DiscordResult,
    bell_diagonal_state,
    classical_correlations,
    conditional_entropy,
    default_discord_config,
    discord,
    luo_discord_analytical,
    mutual_information,
    random_bell_diagonal,
)
from .harness import (
    ExperimentStats,
    UndefinedMetricError,
    e05,
    export_trace,
    import_trace,
    run_experiments,
)

__version__ = "0.1.0"

__all__ = [
    "BellDiagonalParams",
    "BenchmarkProblem",
    "ConfigurationError",
    "DensityMatrix",
    "DiscordResult",
    "ExperimentStats",
    "HermitianParams",
    "HminResult",
    "InvalidStateError",
    "LocalUnitaryParams",
    "OptimizationResult",
    "PLATEAU_ARGMIN",
    "PLATEAU_MIN",
    "PureState",
    "RmConfig",
    "SCHWEFEL_ARGMIN",
    "TerminationReason",
    "UndefinedMetricError",
    "apply_local_unitaries",
    "apply_qubit_unitaries",
    "bell_diagonal_state",
    "classical_correlations",
    "conditional_entropy",
    "default_discord_config",
    "default_hmin_config",
    "derive_seed",
    "discord",
    "e05",
    "e_hmin",
    "export_trace",
    "get_problem",
    "ghz_state",
    "griewank",
    "griewank_problem",
    "grover_state",
    "hermitian_eigensystem",
    "hermitian_from_flat",
    "hmin_fitness",
    "import_trace",
    "init_population",
    "load_config",
    "load_density_matrix",
    "load_pure_state",
    "luo_discord_analytical",
    "measurement_entropy",
    "minimize",
    "mutate",
    "mutual_information",
    "partial_trace",
    "plateau",
    "plateau_fixture",
    "product_state",
    "random_bell_diagonal",
    "random_density_matrix",
    "random_pure_state",
    "rastrigin",
    "rastrigin_problem",
    "rosenbrock",
    "rosenbrock_problem",
    "run_experiments",
    "save_config",
    "save_density_matrix",
    "save_pure_state",
    "scaled",
    "schwefel",
    "schwefel_problem",
    "select_winner",
    "should_terminate",
    "tensor_product",
    "unitary_2x2",
    "unitary_from_hermitian",
    "von_neumann_entropy",
]
