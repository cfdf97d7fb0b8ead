"""Command-line front end.

Subcommands: ``bench`` (benchmark statistics), ``hmin`` (minimal
measurement entropy of a pure state), ``discord`` (quantum discord of a
bipartite density matrix, with a Bell-diagonal analytical mode), ``e05``
(error-cost metric over repeated runs), and ``gen-state`` (fixture state
files).  Every successful invocation prints one JSON object to stdout;
``--out`` additionally writes it (or, for ``gen-state``, the state) to a
file.

Exit codes: 0 success, 1 usage error (bad flags, files, or configs),
2 computation error (invalid state or matrix), 3 undefined metric.

Floats are serialized with 17 significant digits, so identical flags and
seeds reproduce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict

import numpy as np

from .benchmarks import get_problem
from .discord import (BellDiagonalParams, bell_diagonal_state,
                      default_discord_config, discord, luo_discord_analytical)
from .harness import UndefinedMetricError, e05, export_trace, run_experiments
from .hmin import default_hmin_config, e_hmin, hmin_fitness
from .optimizer import ConfigurationError, OptimizationResult, load_config
from .qstate import (InvalidStateError, ghz_state, grover_state,
                     load_density_matrix, load_pure_state, product_state,
                     random_pure_state, save_pure_state)

__all__ = ["main", "run"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: A003 - argparse API
        raise _UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# Deterministic JSON

def _json_dumps(value) -> str:
    """JSON with sorted keys and 17-significant-digit floats."""
    if value is None:
        return "null"
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not math.isfinite(v):
            raise ValueError(f"non-finite number in output: {v!r}")
        return format(v, ".17g")
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        parts = (f"{json.dumps(str(k))}: {_json_dumps(v)}"
                 for k, v in sorted(value.items()))
        return "{" + ", ".join(parts) + "}"
    if isinstance(value, np.ndarray):
        value = value.tolist()
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_json_dumps(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value)!r}")


def _result_summary(result: OptimizationResult) -> dict:
    return {
        "f_best": result.f_best,
        "generations": result.generations,
        "evaluations": result.evaluations,
        "termination_reason": result.termination_reason.value,
    }


def _load_cli_config(args, fallback_builder):
    """Config from ``--config`` if given, else from the builder; ``--seed``
    overrides either source when supplied."""
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if args.config is not None:
        return load_config(args.config, **overrides)
    return fallback_builder(**overrides)


# ---------------------------------------------------------------------------
# Subcommand handlers (each returns the stdout payload)

def _cmd_bench(args) -> dict:
    config = load_config(args.config)
    try:
        problem = get_problem(args.problem, arity=config.n_params,
                              scale=args.scale)
    except (KeyError, ValueError) as exc:
        raise _UsageError(exc.args[0] if exc.args else str(exc)) from exc
    if problem.arity != config.n_params:
        raise _UsageError(
            f"problem {problem.name!r} has arity {problem.arity}, but the "
            f"config sets n_params={config.n_params}")
    reference = (problem.known_minimum if args.reference is None
                 else args.reference)
    stats = run_experiments(problem, config, args.n_exp, args.threshold,
                            reference, workers=args.workers)
    payload = {
        "problem": problem.name,
        "arity": problem.arity,
        "scale": problem.scale,
        "n_exp": stats.n_exp,
        "n_evaluations": stats.n_evaluations,
        "n_err": stats.n_err,
        "f_best": stats.f_best,
        "f_avg": stats.f_avg,
        "e_05": stats.e_05,
        "success_threshold": stats.success_threshold,
        "reference_value": stats.reference_value,
        "run_seeds": stats.run_seeds,
        "per_run": [_result_summary(r) for r in stats.per_run],
        "config": asdict(config),
    }
    if args.trace is not None:
        payload["trace_files"] = export_trace(stats, args.trace)
    return payload


def _cmd_hmin(args) -> dict:
    psi = load_pure_state(args.state)
    config = _load_cli_config(
        args, lambda **kw: default_hmin_config(psi.n_qubits, **kw))
    result = e_hmin(psi, config, n_restarts=args.restarts,
                    workers=args.workers)
    return {
        "value": result.value,
        "params": result.params.to_flat().tolist(),
        "evaluations": result.total_evaluations,
        "restarts": result.n_restarts,
    }


def _parse_bell_coefficients(text: str) -> BellDiagonalParams:
    parts = text.split(",")
    if len(parts) != 3:
        raise _UsageError(
            f"--bell-diagonal expects 'c1,c2,c3', got {text!r}")
    try:
        c1, c2, c3 = (float(p) for p in parts)
    except ValueError as exc:
        raise _UsageError(f"--bell-diagonal: {exc}") from exc
    return BellDiagonalParams(c1, c2, c3)


def _cmd_discord(args) -> dict:
    payload: dict = {"side": args.side}
    if args.bell_diagonal is not None:
        params = _parse_bell_coefficients(args.bell_diagonal)
        info, classical, value = luo_discord_analytical(params)
        payload["bell_diagonal"] = [params.c1, params.c2, params.c3]
        payload["analytical"] = {
            "mutual_information": info,
            "classical_correlations": classical,
            "discord": value,
        }
        if args.analytical:
            return payload
        rho = bell_diagonal_state(params)
    else:
        if args.analytical:
            raise _UsageError("--analytical requires --bell-diagonal")
        rho = load_density_matrix(args.density)

    measured_dim = rho.dim_a if args.side == "A" else rho.dim_b
    config = _load_cli_config(
        args, lambda **kw: default_discord_config(measured_dim, **kw))
    result = discord(rho, config, n_restarts=args.restarts, side=args.side,
                     workers=args.workers)
    payload.update({
        "discord": result.discord,
        "mutual_information": result.mutual_information,
        "classical_correlations": result.classical_correlations,
        "observable_params": result.optimal_observable_params.values.tolist(),
        "evaluations": result.total_evaluations,
        "restarts": args.restarts,
        "optimizer": _result_summary(result.optimizer_result),
    })
    return payload


def _cmd_e05(args) -> dict:
    config = load_config(args.config)
    if os.path.exists(args.problem):
        psi = load_pure_state(args.problem)
        if config.n_params != 2 * psi.n_qubits:
            raise _UsageError(
                f"state has {psi.n_qubits} qubits; config must set "
                f"n_params={2 * psi.n_qubits}")
        if args.reference is None:
            raise _UsageError("--reference is required for state files")
        fitness = hmin_fitness(psi)
        name = args.problem
        stats = run_experiments(fitness, config, args.n_exp, args.threshold,
                                args.reference, vectorized=True,
                                workers=args.workers)
    else:
        try:
            problem = get_problem(args.problem, arity=config.n_params,
                                  scale=args.scale)
        except (KeyError, ValueError) as exc:
            raise _UsageError(exc.args[0] if exc.args else str(exc)) from exc
        if problem.arity != config.n_params:
            raise _UsageError(
                f"problem {problem.name!r} has arity {problem.arity}, but "
                f"the config sets n_params={config.n_params}")
        name = problem.name
        reference = (problem.known_minimum if args.reference is None
                     else args.reference)
        stats = run_experiments(problem, config, args.n_exp, args.threshold,
                                reference, workers=args.workers)
    value = e05(stats)  # raises UndefinedMetricError -> exit code 3
    return {
        "problem": name,
        "n_exp": stats.n_exp,
        "n_evaluations": stats.n_evaluations,
        "n_err": stats.n_err,
        "f_best": stats.f_best,
        "f_avg": stats.f_avg,
        "e_05": value,
        "success_threshold": stats.success_threshold,
        "reference_value": stats.reference_value,
        "run_seeds": stats.run_seeds,
    }


def _cmd_gen_state(args) -> dict:
    n = args.n
    if n is None or n < 1:
        raise _UsageError("--n must be a positive integer")
    payload: dict = {"kind": args.kind, "n_qubits": n, "path": args.out}
    if args.kind == "ghz":
        if args.l0 is None or args.l1 is None:
            raise _UsageError("--kind ghz requires --l0 and --l1")
        psi = ghz_state(n, args.l0, args.l1)
        payload["l0"] = [args.l0.real, args.l0.imag]
        payload["l1"] = [args.l1.real, args.l1.imag]
    elif args.kind == "grover":
        if args.t is None:
            raise _UsageError("--kind grover requires --t")
        psi = grover_state(n, args.t, args.target)
        payload["t"] = args.t
        payload["target"] = args.target
    elif args.kind == "product":
        rng = np.random.Generator(np.random.Philox(key=args.seed))
        psi = product_state(n, rng)
        payload["seed"] = args.seed
    else:  # random
        rng = np.random.Generator(np.random.Philox(key=args.seed))
        psi = random_pure_state(n, rng)
        payload["seed"] = args.seed
    save_pure_state(psi, args.out)
    return payload


# ---------------------------------------------------------------------------
# Parser

def _add_workers(parser) -> None:
    parser.add_argument("--workers", type=int, default=os.cpu_count(),
                        help="max concurrent runs/restarts (never affects "
                             "results; default: all cores)")


def _build_parser() -> _Parser:
    parser = _Parser(prog="rmopt",
                     description="Random-mutations optimizer toolkit")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("bench", help="benchmark statistics over seeded runs")
    p.add_argument("--problem", required=True,
                   help="rosenbrock | rastrigin | griewank | schwefel | plateau")
    p.add_argument("--scale", type=float, default=1.0,
                   help="input premultiplier (domain shrinks by the same factor)")
    p.add_argument("--config", required=True, help="flat key=value config file")
    p.add_argument("--n-exp", type=int, default=20, help="number of runs")
    p.add_argument("--threshold", type=float, default=1e-3,
                   help="success threshold on |final - reference|")
    p.add_argument("--reference", type=float, default=None,
                   help="reference value (default: known minimum)")
    p.add_argument("--trace", default=None, help="write trace CSVs here")
    p.add_argument("--out", dest="json_out", default=None,
                   help="also write the JSON payload to this file")
    _add_workers(p)
    p.set_defaults(handler=_cmd_bench)

    p = sub.add_parser("hmin", help="minimal measurement entropy of a state")
    p.add_argument("--state", required=True, help="pure-state JSON file")
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--config", default=None, help="optimizer config file")
    p.add_argument("--seed", type=int, default=None,
                   help="override the config seed")
    p.add_argument("--out", dest="json_out", default=None)
    _add_workers(p)
    p.set_defaults(handler=_cmd_hmin)

    p = sub.add_parser("discord", help="quantum discord of a bipartite state")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--density", help="density-matrix JSON file")
    source.add_argument("--bell-diagonal", metavar="C1,C2,C3",
                        help="Bell-diagonal coefficients")
    p.add_argument("--analytical", action="store_true",
                   help="closed form only (requires --bell-diagonal)")
    p.add_argument("--side", choices=("A", "B"), default="B",
                   help="measured subsystem")
    p.add_argument("--restarts", type=int, default=2)
    p.add_argument("--config", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", dest="json_out", default=None)
    _add_workers(p)
    p.set_defaults(handler=_cmd_discord)

    p = sub.add_parser("e05", help="error-cost metric over repeated runs")
    p.add_argument("--problem", required=True,
                   help="benchmark name or pure-state JSON file")
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--config", required=True)
    p.add_argument("--n-exp", type=int, default=20)
    p.add_argument("--reference", type=float, default=None)
    p.add_argument("--threshold", type=float, default=1e-3)
    p.add_argument("--out", dest="json_out", default=None)
    _add_workers(p)
    p.set_defaults(handler=_cmd_e05)

    p = sub.add_parser("gen-state", help="write fixture states as JSON")
    p.add_argument("--kind", required=True,
                   choices=("ghz", "product", "grover", "random"))
    p.add_argument("--n", type=int, required=True, help="number of qubits")
    p.add_argument("--l0", type=complex, default=None, help="GHZ weight of |0...0>")
    p.add_argument("--l1", type=complex, default=None, help="GHZ weight of |1...1>")
    p.add_argument("--t", type=int, default=None, help="search iteration count")
    p.add_argument("--target", type=int, default=0, help="marked basis index")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="state file to write")
    p.set_defaults(handler=_cmd_gen_state)

    return parser


def main(argv=None) -> int:
    """Run the CLI; returns the process exit code."""
    try:
        args = _build_parser().parse_args(argv)
        payload = args.handler(args)
        text = _json_dumps(payload)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ConfigurationError, FileNotFoundError, IsADirectoryError,
            PermissionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except UndefinedMetricError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except InvalidStateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(text)
    json_out = getattr(args, "json_out", None)
    if json_out:
        with open(json_out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return 0


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
