"""Command-line front end.

JSON goes to stdout, diagnostics to stderr, data files only via --out.
Identical argv and seed give byte-identical output.  Exit codes: 0 success
(and verdict holds), 1 parse/semantic/runtime error, 2 negative verdict
(unsafe witness / not certified), 3 unknown.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys

import numpy as np

from . import analysis, mc, prctl
from .elimination import eliminate_reachability, eliminate_reward
from .errors import PacPolyError
from .model import PDtmrm, instantiate
from .parser import parse_expr, parse_formula, parse_model, parse_point
from .scenario import DEFAULT_SEED, PacPolynomial, approximate
from .space import ParamSpace

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NEGATIVE = 2
EXIT_UNKNOWN = 3


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("model", help="model file path")
    p.add_argument("-f", "--formula", help="property to analyze")
    p.add_argument("--oracle-expr", metavar="EXPR",
                   help="closed-form expression replacing the model-checking oracle")
    p.add_argument("--seed", type=lambda s: int(s, 0), default=DEFAULT_SEED,
                   help="sampling seed (default 0xC0FFEE)")
    p.add_argument("--threads", type=int, default=os.cpu_count(),
                   help="oracle evaluation threads (results are thread-count independent)")


def _add_fit_params(p: argparse.ArgumentParser):
    p.add_argument("-d", "--degree", type=int, default=1)
    p.add_argument("-e", "--eps", type=float, default=0.05)
    p.add_argument("-n", "--eta", type=float, default=0.05)


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="pacpoly",
                                  description="Polynomial surrogates with statistical "
                                              "guarantees for parametric Markov chains")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="value of a formula at a parameter point")
    _add_common(p)
    p.add_argument("-x", "--point", action="append", default=[], metavar="NAME=VALUE")

    p = sub.add_parser("exact", help="exact rational function by state elimination")
    _add_common(p)

    p = sub.add_parser("fit", help="fit a polynomial surrogate with statistical tags")
    _add_common(p)
    _add_fit_params(p)
    p.add_argument("--grid", type=int, help="emit a CSV grid at this per-dimension resolution")
    p.add_argument("--out", help="CSV output path (with --grid)")

    p = sub.add_parser("safe", help="sampled safety check of the whole box")
    _add_common(p)
    p.add_argument("-z", "--zeta", type=float, required=True)
    p.add_argument("-e", "--eps", type=float, default=0.05)
    p.add_argument("-n", "--eta", type=float, default=0.05)

    p = sub.add_parser("cex", help="search a counterexample via a linear surrogate")
    _add_common(p)
    _add_fit_params(p)
    p.add_argument("-z", "--zeta", type=float, required=True)
    p.add_argument("--max-iters", type=int, default=10)

    p = sub.add_parser("near", help="certify closeness to a reference value in L_p")
    _add_common(p)
    _add_fit_params(p)
    p.add_argument("-b", "--beta", type=float, required=True)
    p.add_argument("-z", "--zeta", type=float, required=True)
    p.add_argument("-M", "--upper-bound", type=float, dest="upper_bound",
                   help="upper bound of the approximated function (default 1 for probabilities)")
    p.add_argument("-p", "--pnorm", type=float, default=2)

    p = sub.add_parser("reward-bound", help="lower-bound the expected value of a reward function")
    _add_common(p)
    _add_fit_params(p)
    p.add_argument("-r", "--rho", type=float, required=True)

    return top


def _load_model(path: str) -> PDtmrm:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_model(handle.read())


def _make_oracle(args, model: PDtmrm):
    if args.oracle_expr:
        expr = parse_expr(args.oracle_expr, model.space)
        return expr.eval, f"expr:{args.oracle_expr}"
    if not args.formula:
        raise ValueError("a formula (-f) or --oracle-expr is required")
    formula = parse_formula(args.formula)
    return mc.formula_oracle(model, formula), f"formula:{args.formula}"


def _fit(args, model: PDtmrm) -> PacPolynomial:
    oracle, oracle_id = _make_oracle(args, model)
    threads = args.threads if args.threads and args.threads > 1 else None
    return approximate(oracle, model.space, args.degree, args.eps, args.eta,
                       seed=args.seed, oracle_id=oracle_id, threads=threads)


def _emit_json(obj: dict):
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def emit_grid(fit: PacPolynomial, oracle, space: ParamSpace, resolution: int, path: str):
    """CSV grid `x1,...,xn[,f],fhat`, one row per grid point (first parameter
    varies slowest); the f column is present only when an oracle is given."""
    if resolution < 2:
        raise ValueError("grid resolution must be at least 2 per dimension")
    axes = [np.linspace(lo, hi, resolution) for _, lo, hi in space.params]
    header = [f"x{i + 1}" for i in range(space.dim)]
    header += (["f", "fhat"] if oracle is not None else ["fhat"])
    lines = [",".join(header)]
    for combo in itertools.product(*axes):
        point = np.array(combo)
        row = [repr(float(v)) for v in combo]
        if oracle is not None:
            row.append(repr(float(oracle(point))))
        row.append(repr(fit(point)))
        lines.append(",".join(row))
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")


def _static_sat(model: PDtmrm, sf: prctl.StateFormula) -> set[int]:
    """Satisfaction of label-only formulas, independent of any evaluation."""
    all_states = set(range(model.n_states))
    if isinstance(sf, prctl.TrueF):
        return all_states
    if isinstance(sf, prctl.Ap):
        return set(model.labels.get(sf.name, frozenset()))
    if isinstance(sf, prctl.Not):
        return all_states - _static_sat(model, sf.sub)
    if isinstance(sf, prctl.And):
        return _static_sat(model, sf.lhs) & _static_sat(model, sf.rhs)
    raise ValueError("state elimination needs a label-only target formula")


def _cmd_eval(args) -> int:
    model = _load_model(args.model)
    point = parse_point(args.point, model.space)
    if args.oracle_expr:
        value = parse_expr(args.oracle_expr, model.space).eval(point)
        sys.stdout.write(f"{value!r}\n")
        return EXIT_OK
    if not args.formula:
        raise ValueError("a formula (-f) or --oracle-expr is required")
    formula = parse_formula(args.formula)
    result = mc.check(instantiate(model, point), formula)
    if result.is_value:
        sys.stdout.write(f"{result.value!r}\n")
    else:
        names = sorted(model.states[i] for i in result.sat_set)
        _emit_json({"sat": names, "init_sat": model.init in result.sat_set})
    return EXIT_OK


def _cmd_exact(args) -> int:
    model = _load_model(args.model)
    if not args.formula:
        raise ValueError("exact needs a formula (-f)")
    formula = parse_formula(args.formula)
    if isinstance(formula, prctl.ProbQuery) and isinstance(formula.path, prctl.Until) \
            and isinstance(formula.path.lhs, prctl.TrueF):
        target = _static_sat(model, formula.path.rhs)
        fn = eliminate_reachability(model, target)
    elif isinstance(formula, prctl.RewardQuery):
        target = _static_sat(model, formula.target)
        fn = eliminate_reward(model, target, formula.reward)
    else:
        raise ValueError("exact supports P=? [ F sf ] and E=? [ F sf ] formulas")
    sys.stdout.write(fn.to_text(model.space.names) + "\n")
    return EXIT_OK


def _cmd_fit(args) -> int:
    model = _load_model(args.model)
    fit = _fit(args, model)
    _emit_json(fit.to_json_dict())
    if args.grid is not None:
        if not args.out:
            raise ValueError("--grid needs --out PATH")
        oracle, _ = _make_oracle(args, model)
        emit_grid(fit, oracle, model.space, args.grid, args.out)
    return EXIT_OK


def _cmd_safe(args) -> int:
    model = _load_model(args.model)
    oracle, _ = _make_oracle(args, model)
    verdict = analysis.safe_region_check(oracle, model.space, args.zeta,
                                         args.eps, args.eta, seed=args.seed)
    _emit_json(verdict.to_json_dict())
    if verdict.verdict == analysis.SAFE:
        return EXIT_OK
    if verdict.verdict == analysis.UNSAFE_WITNESS:
        return EXIT_NEGATIVE
    return EXIT_UNKNOWN


def _cmd_cex(args) -> int:
    model = _load_model(args.model)
    if args.degree != 1:
        raise ValueError("counterexample search uses a degree-1 surrogate")
    oracle, _ = _make_oracle(args, model)
    fit = _fit(args, model)
    result = analysis.counterexample_search(oracle, fit, model.space, args.zeta,
                                            max_iters=args.max_iters, seed=args.seed)
    _emit_json(result.to_json_dict())
    return EXIT_OK


def _cmd_near(args) -> int:
    model = _load_model(args.model)
    fit = _fit(args, model)
    M = args.upper_bound
    if M is None:
        formula = parse_formula(args.formula) if args.formula else None
        if args.oracle_expr or isinstance(formula, prctl.RewardQuery):
            raise ValueError("-M/--upper-bound is required unless the oracle is a probability")
        M = 1.0
    verdict = analysis.near_beta_check(fit, model.space, args.beta, args.zeta,
                                       p_norm=args.pnorm, M=M)
    _emit_json(verdict.to_json_dict())
    return EXIT_OK if verdict.holds else EXIT_NEGATIVE


def _cmd_reward_bound(args) -> int:
    model = _load_model(args.model)
    fit = _fit(args, model)
    verdict = analysis.reward_expectation_bound(fit, model.space, args.rho)
    _emit_json(verdict.to_json_dict())
    return EXIT_OK if verdict.holds else EXIT_NEGATIVE


_COMMANDS = {
    "eval": _cmd_eval,
    "exact": _cmd_exact,
    "fit": _cmd_fit,
    "safe": _cmd_safe,
    "cex": _cmd_cex,
    "near": _cmd_near,
    "reward-bound": _cmd_reward_bound,
}


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (PacPolyError, ValueError, OSError, KeyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
