"""Command-line front end: CQ weights, correction tables, truncation and solver studies.

Exit codes: 0 success, 1 numeric failure, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import copy
import json
import math
import os
import sys
from dataclasses import dataclass
from importlib import resources
from typing import Any

import numpy as np

from . import expr
from .correction import correction_table
from .cq import cq_weights
from .fem1d import build_space
from .hadamard_ops import truncation_study
from .solver import ERROR_NORMS, convergence_study, final_error, problem_from_expressions, step_all
from .tables import fmt, write_csv

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2

THREADS_ENV = "HADAMARD_CQ_THREADS"


class ConfigError(ValueError):
    pass


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            n = int(raw)
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
        if n < 1:
            raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
        return n
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# run configuration

_PROBLEM_KEYS = {"alpha", "beta", "a", "T", "L", "v", "v_prime", "f_at_a", "g", "delta_g", "u_exact"}
_DISC_KEYS = {"p", "N", "N_list", "M", "k", "corrected", "error_norm", "initial"}
_OUTPUT_KEYS = {"path", "format"}


def _number(value, name: str) -> float:
    """Numeric field: a JSON number or a constant expression such as "exp(2)"."""
    if isinstance(value, bool):
        raise ConfigError(f"{name} must be a number")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            node = expr.parse(value)
        except expr.ExprSyntaxError as exc:
            raise ConfigError(f"{name}: {exc}") from None
        if expr.uses_var(node, "x") or expr.uses_var(node, "lt"):
            raise ConfigError(f"{name} must be constant")
        return float(expr.evaluate(node))
    raise ConfigError(f"{name} must be a number")


def _integer(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{name} must be an integer")
    return value


@dataclass


class RunConfig:
    """Validated view of a JSON run configuration; ``raw`` is kept for round-tripping."""

    raw: dict
    alpha: float
    beta: float
    a: float
    T: float
    L: float
    p: int
    N_list: list
    M: int
    k: int
    corrected: object  # True, False or "both"
    error_norm: str
    initial: str
    out_path: str | None
    out_format: str

    @classmethod
    def from_dict(cls, data: Any) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(data) - {"problem", "discretization", "output"}
        if unknown:
            raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
        prob = data.get("problem")
        disc = data.get("discretization")
        out = data.get("output", {})
        if not isinstance(prob, dict) or not isinstance(disc, dict) or not isinstance(out, dict):
            raise ConfigError("'problem' and 'discretization' objects are required")
        for section, allowed, name in ((prob, _PROBLEM_KEYS, "problem"), (disc, _DISC_KEYS, "discretization"), (out, _OUTPUT_KEYS, "output")):
            extra = set(section) - allowed
            if extra:
                raise ConfigError(f"unknown {name} keys: {sorted(extra)}")
        for key in ("alpha", "beta", "a", "T", "v", "f_at_a", "g"):
            if key not in prob:
                raise ConfigError(f"problem.{key} is required")

        alpha = _number(prob["alpha"], "alpha")
        beta = _number(prob["beta"], "beta")
        a = _number(prob["a"], "a")
        T = _number(prob["T"], "T")
        L = _number(prob.get("L", "pi"), "L")
        if not 0 < alpha < 1:
            raise ConfigError(f"alpha must lie in (0, 1), got {alpha}")
        if not 0 <= beta < 1:
            raise ConfigError(f"beta must lie in [0, 1), got {beta}")
        if not 0 < a < T:
            raise ConfigError("need 0 < a < T")
        if not L > 0:
            raise ConfigError("L must be positive")
        for key in ("v", "v_prime", "f_at_a", "g", "u_exact"):
            if key in prob and prob[key] is not None:
                if not isinstance(prob[key], str):
                    raise ConfigError(f"problem.{key} must be an expression string")
                try:
                    expr.parse(prob[key])
                except expr.ExprSyntaxError as exc:
                    raise ConfigError(f"problem.{key}: {exc}") from None
        delta_g = prob.get("delta_g")
        if delta_g is not None:
            if not isinstance(delta_g, list) or not all(isinstance(s, str) for s in delta_g):
                raise ConfigError("problem.delta_g must be a list of expression strings")
            for s in delta_g:
                try:
                    expr.parse(s)
                except expr.ExprSyntaxError as exc:
                    raise ConfigError(f"problem.delta_g: {exc}") from None

        p = _integer(disc.get("p"), "p")
        if not 1 <= p <= 6:
            raise ConfigError(f"p must lie in [1, 6], got {p}")
        if "N_list" in disc:
            N_list = disc["N_list"]
            if not isinstance(N_list, list) or not N_list:
                raise ConfigError("N_list must be a nonempty list of integers")
            N_list = [_integer(n, "N_list entry") for n in N_list]
        elif "N" in disc:
            N_list = [_integer(disc["N"], "N")]
        else:
            raise ConfigError("discretization needs N or N_list")
        if any(n < p for n in N_list) or sorted(set(N_list)) != N_list:
            raise ConfigError("N values must be strictly increasing and at least p")
        M = _integer(disc.get("M", 100), "M")
        k = _integer(disc.get("k", 5), "k")
        if M < 2:
            raise ConfigError("M must be at least 2")
        if not 1 <= k <= 5:
            raise ConfigError(f"k must lie in [1, 5], got {k}")
        corrected = disc.get("corrected", True)
        if corrected not in (True, False, "both"):
            raise ConfigError("corrected must be true, false or \"both\"")
        error_norm = disc.get("error_norm", "final")
        if error_norm not in ERROR_NORMS:
            raise ConfigError(f"error_norm must be one of {ERROR_NORMS}")
        initial = disc.get("initial", "ritz")
        if initial not in ("ritz", "l2"):
            raise ConfigError("initial must be 'ritz' or 'l2'")

        out_path = out.get("path")
        if out_path is not None and not isinstance(out_path, str):
            raise ConfigError("output.path must be a string")
        out_format = out.get("format", "csv")
        if out_format not in ("csv", "pretty"):
            raise ConfigError("output.format must be 'csv' or 'pretty'")
        return cls(copy.deepcopy(data), alpha, beta, a, T, L, p, N_list, M, k, corrected, error_norm, initial, out_path, out_format)

    @classmethod
    def load(cls, path: str) -> "RunConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from None
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return copy.deepcopy(self.raw)

    def problem(self):
        prob = self.raw["problem"]
        return problem_from_expressions(
            alpha=self.alpha,
            beta=self.beta,
            a=self.a,
            T=self.T,
            L=self.L,
            v=prob["v"],
            f_at_a=prob["f_at_a"],
            g=prob["g"],
            u_exact=prob.get("u_exact"),
            v_prime=prob.get("v_prime"),
            delta_g=prob.get("delta_g"),
        )

    def schemes(self) -> list[bool]:
        return [True, False] if self.corrected == "both" else [bool(self.corrected)]


def bundled_config(name: str) -> str:
    """Path of a config shipped with the package, e.g. ``table2_p3.json``."""
    return str(resources.files("hadamard_cq") / "configs" / name)


# ---------------------------------------------------------------------------
# output helpers


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _pretty_table(p: int, results: dict) -> str:
    """Corrected and standard columns side by side: N, tau_bar, then Error and Order per scheme."""
    schemes = list(results)
    names = {True: "Modified", False: "Standard"}
    head = f"{'BDF-p':>6} {'N':>6} {'tau_bar':>10}"
    for s in schemes:
        head += f"  {names[s] + ' Error':>16} {'Order':>6}"
    lines = [head]
    for i, row in enumerate(results[schemes[0]]):
        label = f"p={p}" if i == 0 else ""
        line = f"{label:>6} {row.N:>6} {row.tau_bar:>10.4g}"
        for s in schemes:
            r = results[s][i]
            order = "--" if r.order is None else f"{r.order:.2f}"
            line += f"  {r.error:>16.4E} {order:>6}"
        lines.append(line)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# subcommands


def _cmd_weights(args) -> int:
    w = cq_weights(args.p, args.alpha, args.n).omega
    _emit(write_csv([f"omega_{i}" for i in range(len(w))], [list(map(float, w))]), args.output)
    return EXIT_OK


def _cmd_correction_table(args) -> int:
    tab = correction_table(args.p, args.beta)
    exact = args.rational

    def val(x, frac):
        return str(frac) if exact and frac is not None else float(x)

    chunks = []
    if args.which in ("d", "both"):
        rows = []
        for j in range(args.p - 1):
            for n in range(1, args.p):
                frac = tab.d_exact[j][n - 1] if tab.d_exact is not None else None
                rows.append([args.p, fmt(args.beta), j, n, val(tab.d[j, n - 1], frac)])
        chunks.append(write_csv(["p", "beta", "j", "n", "d"], rows))
    if args.which in ("b", "both"):
        rows = [[args.p, n, val(tab.b[n - 1], tab.b_exact[n - 1])] for n in range(1, args.p)]
        chunks.append(write_csv(["p", "n", "b"], rows))
    _emit("\n".join(chunks), args.output)
    return EXIT_OK


def _cmd_truncation(args) -> int:
    rows = truncation_study(args.alpha, args.sigma, args.p, args.a, args.T, args.N_list, threads=_threads())
    text = write_csv(["N", "tau_bar", "error", "order"], [[r.N, r.tau_bar, r.error, r.order] for r in rows])
    _emit(text, args.output)
    return EXIT_OK


def _run_study(cfg: RunConfig, N_list) -> dict:
    spec = cfg.problem()
    space = build_space(cfg.L, cfg.M, cfg.k)
    threads = _threads()
    return {
        c: convergence_study(spec, cfg.p, space, N_list, c, threads=threads, norm=cfg.error_norm, initial=cfg.initial)
        for c in cfg.schemes()
    }


def _study_csv(cfg: RunConfig, results: dict) -> str:
    rows = []
    for c, res in results.items():
        for r in res:
            rows.append(["corrected" if c else "standard", cfg.p, r.N, r.tau_bar, r.error, r.order])
    return write_csv(["scheme", "p", "N", "tau_bar", "error", "order"], rows)


def _cmd_solve(args) -> int:
    cfg = RunConfig.load(args.config)
    N = cfg.N_list[-1] if args.N is None else args.N
    if N < cfg.p:
        raise ConfigError("N must be at least p")
    spec = cfg.problem()
    space = build_space(cfg.L, cfg.M, cfg.k)
    rows = []
    for c in cfg.schemes():
        if spec.u_exact is None:
            U = step_all(spec, cfg.p, N, space, c, initial=cfg.initial)
            if not np.all(np.isfinite(U)):
                raise FloatingPointError("non-finite values in the solution")
            rows.append(["corrected" if c else "standard", cfg.p, N, math.log(cfg.T / cfg.a) / N, ""])
        else:
            err = final_error(spec, cfg.p, N, space, c, cfg.error_norm, cfg.initial)
            if not math.isfinite(err):
                raise FloatingPointError("non-finite error")
            rows.append(["corrected" if c else "standard", cfg.p, N, math.log(cfg.T / cfg.a) / N, err])
    _emit(write_csv(["scheme", "p", "N", "tau_bar", "error"], rows), args.output or cfg.out_path)
    return EXIT_OK


def _cmd_convergence(args) -> int:
    cfg = RunConfig.load(args.config)
    if cfg.raw["problem"].get("u_exact") is None:
        raise ConfigError("convergence needs problem.u_exact")
    results = _run_study(cfg, cfg.N_list)
    for res in results.values():
        if not all(math.isfinite(r.error) for r in res):
            raise FloatingPointError("non-finite error in convergence study")
    fmt_ = args.format or cfg.out_format
    text = _pretty_table(cfg.p, results) if fmt_ == "pretty" else _study_csv(cfg, results)
    _emit(text, args.output or cfg.out_path)
    return EXIT_OK


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hadamard-cq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("weights", help="print fractional BDF-p weights omega_0..omega_N")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--output")
    p.set_defaults(func=_cmd_weights)

    p = sub.add_parser("correction-table", help="print correction coefficients d_{j,n} and b_n")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--which", choices=("d", "b", "both"), default="both")
    p.add_argument("--rational", action="store_true", help="print exact fractions where available")
    p.add_argument("--output")
    p.set_defaults(func=_cmd_correction_table)

    p = sub.add_parser("truncation", help="CQ error for (log(t/a))^sigma at t = T")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--T", type=float, default=math.e)
    p.add_argument("--N-list", dest="N_list", type=_int_list, required=True)
    p.add_argument("--output")
    p.set_defaults(func=_cmd_truncation)

    p = sub.add_parser("solve", help="run one solve from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--N", type=int, help="step count (default: last entry of N_list)")
    p.add_argument("--output")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("convergence", help="run a convergence study from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--format", choices=("csv", "pretty"))
    p.add_argument("--output")
    p.set_defaults(func=_cmd_convergence)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_USAGE
    except (ValueError, expr.ExprDomainError, expr.NonAnalyticError) as exc:
        # invalid numeric arguments on the command line (p out of range, etc.)
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        sys.stderr.write(f"numeric failure: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())
