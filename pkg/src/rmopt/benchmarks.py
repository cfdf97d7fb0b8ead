"""Classical test functions for calibrating the random-mutations optimizer.

All functions accept a vector (shape ``(n,)``) or a batch (shape ``(m, n)``)
and reduce over the last axis, so they can serve directly as vectorized
fitness callables.  Each has global minimum 0 apart from the plateau
fixture, whose minimum was located independently by a dense grid scan
followed by bisection on the derivative.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

__all__ = [
    "BenchmarkProblem",
    "PLATEAU_ARGMIN",
    "PLATEAU_MIN",
    "SCHWEFEL_ARGMIN",
    "get_problem",
    "griewank",
    "griewank_problem",
    "plateau",
    "plateau_fixture",
    "rastrigin",
    "rastrigin_problem",
    "rosenbrock",
    "rosenbrock_problem",
    "scaled",
    "schwefel",
    "schwefel_problem",
]

#: Location of the Schwefel minimum along each coordinate.
SCHWEFEL_ARGMIN = 420.968750
_SCHWEFEL_C = 418.98288727

#: Plateau fixture: the narrow well at 3 is dragged slightly toward the
#: wide well at 0, so the argmin is not exactly 3.  Located independently
#: (2e6-point grid scan, then bisection on f' to 45 digits).
PLATEAU_ARGMIN = 2.9997680767352555
PLATEAU_MIN = -1.374680702401224


def _reduce(values: np.ndarray, was_vector: bool):
    return float(values) if was_vector else values


def rosenbrock(x) -> float | np.ndarray:
    """Banana-valley function, sum of ``100*(x_{i+1}-x_i^2)^2 + (1-x_i)^2``."""
    x = np.asarray(x, dtype=float)
    head, tail = x[..., :-1], x[..., 1:]
    out = np.sum(100.0 * (tail - head ** 2) ** 2 + (1.0 - head) ** 2, axis=-1)
    return _reduce(out, x.ndim == 1)


def rastrigin(x) -> float | np.ndarray:
    """Highly multimodal: ``10*n + sum(x_i^2 - 10*cos(2*pi*x_i))``."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    out = 10.0 * n + np.sum(x ** 2 - 10.0 * np.cos(2.0 * np.pi * x), axis=-1)
    return _reduce(out, x.ndim == 1)


def griewank(x) -> float | np.ndarray:
    """``1 + sum(x_i^2)/4000 - prod(cos(x_i/sqrt(i)))`` with 1-based ``i``."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    denom = np.sqrt(np.arange(1, n + 1, dtype=float))
    out = (1.0 + np.sum(x ** 2, axis=-1) / 4000.0
           - np.prod(np.cos(x / denom), axis=-1))
    return _reduce(out, x.ndim == 1)


def schwefel(x) -> float | np.ndarray:
    """``418.98288727*n - sum(x_i*sin(sqrt(|x_i|)))``; deceptive far minima."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    out = _SCHWEFEL_C * n - np.sum(x * np.sin(np.sqrt(np.abs(x))), axis=-1)
    return _reduce(out, x.ndim == 1)


def plateau(x) -> float | np.ndarray:
    """One-dimensional two-well fixture for failure-rate experiments.

    A wide shallow well at 0 (depth 1) competes with a narrow deep well
    near 3 (depth about 1.37): runs that settle in the wide well miss the
    global minimum, which makes the error fraction tunable via the budget.
    Accepts shape ``(1,)`` or ``(m, 1)``.
    """
    x = np.asarray(x, dtype=float)
    t = x[..., 0]
    out = (-1.05 * np.exp(-((t - 3.0) ** 2) / 0.002)
           - np.exp(-(t ** 2) / 8.0))
    return _reduce(out, x.ndim == 1)


@dataclass(frozen=True)
class BenchmarkProblem:
    """A named objective with its domain and known optimum.

    ``scale`` records the accumulated input premultiplier applied by
    :func:`scaled`; ``eval`` already includes it.  ``domain_low`` /
    ``domain_high`` bound the region the minimum is taken over, which also
    serves as the initialization box; ``known_argmin`` lies inside it.
    """

    name: str
    arity: int
    eval: Callable[[np.ndarray], float]
    domain_low: float
    domain_high: float
    known_minimum: float
    known_argmin: np.ndarray
    scale: float = 1.0

    def fitness(self, x) -> float | np.ndarray:
        """``eval`` restricted to the domain box; +inf outside.

        The known minima are minima *over the region* — Schwefel in
        particular has deeper wells beyond the box, and the slice
        x < -417/scale even slopes out of it, so an unconstrained search
        cannot sit at the nominal optimum.  The search itself never clips
        vectors; infeasible candidates simply lose every selection.
        """
        x = np.asarray(x, dtype=float)
        values = self.eval(x)
        inside = np.all((x >= self.domain_low) & (x <= self.domain_high),
                        axis=-1)
        if x.ndim == 1:
            return float(values) if inside else float("inf")
        return np.where(inside, values, np.inf)


def scaled(problem: BenchmarkProblem, scale: float) -> BenchmarkProblem:
    """Stretch the input of ``problem``: the result evaluates ``f(scale*x)``.

    The domain and the known argmin shrink by the same factor, which makes
    narrow basins cover a larger relative share of each coordinate's range
    without changing the optimum value.
    """
    if not np.isfinite(scale) or scale <= 0:
        raise ValueError(f"scale must be a positive finite number, got {scale!r}")
    if scale == 1.0:
        return problem
    inner = problem.eval

    def rescaled(x):
        return inner(np.asarray(x, dtype=float) * scale)

    return replace(
        problem,
        name=f"{problem.name}_x{scale:g}",
        eval=rescaled,
        domain_low=problem.domain_low / scale,
        domain_high=problem.domain_high / scale,
        known_argmin=problem.known_argmin / scale,
        scale=problem.scale * scale,
    )


def rosenbrock_problem(arity: int = 50) -> BenchmarkProblem:
    _check_arity(arity)
    return BenchmarkProblem("rosenbrock", arity, rosenbrock, -2.048, 2.048,
                            0.0, np.ones(arity))


def rastrigin_problem(arity: int = 50) -> BenchmarkProblem:
    _check_arity(arity)
    return BenchmarkProblem("rastrigin", arity, rastrigin, -5.12, 5.12,
                            0.0, np.zeros(arity))


def griewank_problem(arity: int = 50) -> BenchmarkProblem:
    _check_arity(arity)
    return BenchmarkProblem("griewank", arity, griewank, -512.0, 512.0,
                            0.0, np.zeros(arity))


def schwefel_problem(arity: int = 50) -> BenchmarkProblem:
    _check_arity(arity)
    return BenchmarkProblem("schwefel", arity, schwefel, -512.0, 512.0,
                            0.0, np.full(arity, SCHWEFEL_ARGMIN))


def plateau_fixture() -> BenchmarkProblem:
    return BenchmarkProblem("plateau", 1, plateau, -10.0, 10.0,
                            PLATEAU_MIN, np.array([PLATEAU_ARGMIN]))


_REGISTRY: dict[str, Callable[..., BenchmarkProblem]] = {
    "rosenbrock": rosenbrock_problem,
    "rastrigin": rastrigin_problem,
    "griewank": griewank_problem,
    "schwefel": schwefel_problem,
    "plateau": lambda arity=1: plateau_fixture(),
}


def get_problem(name: str, arity: int = 50, scale: float = 1.0) -> BenchmarkProblem:
    """Look up a benchmark by name, optionally rescaled.

    ``plateau`` is always one-dimensional; ``arity`` is ignored for it.
    """
    try:
        builder = _REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(_REGISTRY))
        raise KeyError(f"unknown benchmark {name!r}; known: {known}") from None
    return scaled(builder(arity=arity), scale)


def _check_arity(arity: int) -> None:
    if not isinstance(arity, int) or arity < 2:
        raise ValueError(f"arity must be an integer >= 2, got {arity!r}")
