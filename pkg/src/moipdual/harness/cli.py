"""Command-line interface (``moipdual``)."""

from __future__ import annotations

import argparse
import itertools
import os
import sys

import numpy as np

from ..bounds import ch_bound_report, halfspace_union_check, lagrangian_bound_report
from ..exceptions import MoipError, NumericalError, PreconditionError
from ..model import MoipInstance, nondominated_set, supported_frontier
from ..pareto import preceq
from ..relaxations import (
    MultiplierGrid,
    MultiplierMatrix,
    check_fr_lag,
    ch_relaxation_frontier,
    dual_approx,
    lagrangian_relaxation,
    ldlp_bound,
    molp_relaxation_frontier,
)
from ..superadditive import _dual_rows, build_sdmolp, value_function_sample, vsdp_solve
from .experiment import TrialError, run_experiment
from .generators import ExperimentConfig, Problem, generate
from .io import format_number, format_points, parse_instance, serialize_instance


def _load(path: str) -> MoipInstance:
    with open(path, encoding="utf-8") as fh:
        inst = parse_instance(fh.read())
    return MoipInstance(inst.C, inst.A, inst.b, inst.lower, inst.upper, inst.dualized,
                        os.path.basename(path))


def _print_set(s) -> None:
    if not s.is_finite:
        print(repr(s))
    else:
        sys.stdout.write(format_points(s.points))


def _frontier_out(front) -> None:
    if not front.ok:
        print({"infeasible": "MINUS_MINF", "unbounded": "PLUS_MINF"}[front.status])
        return
    sys.stdout.write(format_points(front.points()))


def cmd_solve(args) -> None:
    _print_set(nondominated_set(_load(args.file)))


def cmd_supported(args) -> None:
    front = supported_frontier(_load(args.file))
    if not front.ok:
        print("MINUS_MINF")
        return
    print("x ; y ; weight")
    for e in front.entries:
        print(" ".join(str(v) for v in e.x) + " ; " + " ".join(format_number(v) for v in e.y)
              + " ; " + " ".join(f"{v:.6g}" for v in e.weight))


def _parse_lambda(inst: MoipInstance, text: str | None) -> MultiplierMatrix:
    if text is None:
        return MultiplierMatrix.of(inst, np.zeros(inst.k * len(inst.dualized)))
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise PreconditionError(f"--lambda expects comma-separated numbers, got {text!r}") from None
    return MultiplierMatrix.of(inst, vals)


def cmd_relax(args) -> None:
    inst = _load(args.file)
    if args.kind == "lr":
        _print_set(lagrangian_relaxation(inst, _parse_lambda(inst, args.lam)))
    elif args.kind == "molp":
        _frontier_out(molp_relaxation_frontier(inst))
    elif args.kind == "ch":
        _frontier_out(ch_relaxation_frontier(inst))
    else:
        _frontier_out(ldlp_bound(inst))


def _grid(inst, args) -> MultiplierGrid:
    return MultiplierGrid.for_instance(inst, args.grid_max, args.grid_count)


def cmd_dual_approx(args) -> None:
    inst = _load(args.file)
    _print_set(dual_approx(inst, _grid(inst, args)))


def cmd_bounds(args) -> None:
    inst = _load(args.file)
    if args.method == "lagrangian":
        rep = lagrangian_bound_report(inst, _grid(inst, args))
    else:
        rep = ch_bound_report(inst)
    print(f"method {rep.method.value}")
    print(f"d {rep.d!r}")
    print(f"gamma {rep.gamma!r}")
    print(f"strong {str(rep.strong).lower()}")
    print(f"discretization {rep.discretization}")
    print(f"L {len(rep.L)}")
    sys.stdout.write(format_points(rep.L))
    print(f"U {len(rep.U)}")
    sys.stdout.write(format_points(rep.U.points))


def cmd_vsdp(args) -> None:
    inst = _load(args.file)
    if args.export_lp:
        with open(args.export_lp, "w", encoding="utf-8") as fh:
            fh.write(build_sdmolp(inst).to_lp_text())
    print(" ".join(format_number(v) for v in vsdp_solve(inst, args.backend)))


def _verdict(ok: bool, detail: str = "") -> None:
    print("holds" if ok else f"violated {detail}".rstrip())


def cmd_check(args) -> None:
    inst = _load(args.file)
    if args.property == "weak-duality":
        nd = nondominated_set(inst)
        for lam in _grid(inst, args):
            if not preceq(nd, lagrangian_relaxation(inst, lam)):
                _verdict(False, f"at lambda {','.join(format_number(v) for v in lam.values.ravel())}")
                return
        _verdict(True)
    elif args.property == "fr-lag":
        rng = np.random.default_rng(args.seed)
        eye = np.eye(inst.n)
        dirs = list(eye) + list(-eye) + list(inst.C) + [np.ones(inst.n)]
        dirs += list(rng.normal(size=(args.samples, inst.n)))
        res = check_fr_lag(inst, dirs)
        if res.violated:
            print(f"violated direction {' '.join(f'{v:.6g}' for v in res.direction)} gap {res.gap:.6g}")
        else:
            print("not falsified")
    elif args.property in ("halfspace-union", "prop9"):
        U = dual_approx(inst, _grid(inst, args))
        Y = inst.feasible_values
        bad = [u for u in (U.points if U.is_finite else ()) if not halfspace_union_check(u, Y)]
        _verdict(not bad, f"at {bad[0]}" if bad else "")
    else:
        _check_value_function(inst, args)


def _check_value_function(inst: MoipInstance, args) -> None:
    A, b = _dual_rows(inst)
    base = MoipInstance(inst.C, A, b, inst.lower, np.full(inst.n, np.inf))
    if np.any(b != np.round(b)) or np.any(b < 0):
        raise PreconditionError("the value-function check needs a nonnegative integer rhs")
    lattice = list(itertools.product(*(range(int(v) + 1) for v in b)))
    rng = np.random.default_rng(args.seed)
    picks = rng.integers(0, len(lattice), size=(args.samples, 2))
    for i, j in picks:
        b1, b2 = np.array(lattice[i], float), np.array(lattice[j], float)
        lo, hi = np.minimum(b1, b2), np.maximum(b1, b2)
        z = value_function_sample(base, [lo, hi, b1, b2, b1 + b2])
        zl, zh, z1, z2, zs = (z[tuple(v)] for v in (lo, hi, b1, b2, b1 + b2))
        if not preceq(zl, zh):
            _verdict(False, f"monotonicity at {lo.tolist()} <= {hi.tolist()}")
            return
        if z1.is_finite and z2.is_finite:
            from ..pareto import max_filter, minkowski_sum

            if not preceq(max_filter(minkowski_sum(z1, z2)), zs):
                _verdict(False, f"superadditivity at {b1.tolist()} + {b2.tolist()}")
                return
    _verdict(True)


def _config(args) -> ExperimentConfig:
    return ExperimentConfig(
        problem=Problem(args.problem),
        trials=args.trials,
        seed=args.seed,
        n_vars=args.n if args.n is not None else 20,
        size=args.size,
        grid_max=args.grid_max,
        grid_count=args.grid_count,
    )


def cmd_experiment(args) -> None:
    cfg = _config(args)
    rep = run_experiment(cfg, workers=args.workers)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "report.csv"), "w", encoding="utf-8") as fh:
            fh.write(rep.to_csv())
        with open(os.path.join(args.out, "summary.json"), "w", encoding="utf-8") as fh:
            fh.write(rep.to_json())
        with open(os.path.join(args.out, "points_trial0.csv"), "w", encoding="utf-8") as fh:
            fh.write(rep.points_csv(0))
    sys.stdout.write(rep.to_csv() if args.csv else rep.summary_text())


def cmd_gen(args) -> None:
    args.trials = 1
    args.grid_count = None
    args.grid_max = 2.5
    text = serialize_instance(generate(_config(args), args.trial))
    if args.output and args.output != "-":
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="moipdual", description="Relaxations and duals of multiobjective integer programs.")
    sub = p.add_subparsers(dest="command", required=True)

    def grid_opts(sp, count=51):
        sp.add_argument("--grid-max", type=float, default=2.5)
        sp.add_argument("--grid-count", type=int, default=count)

    sp = sub.add_parser("solve", help="nondominated set")
    sp.add_argument("file")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("supported", help="supported nondominated points with weights")
    sp.add_argument("file")
    sp.set_defaults(func=cmd_supported)

    sp = sub.add_parser("relax", help="a relaxation's nondominated points")
    sp.add_argument("file")
    sp.add_argument("--kind", choices=["molp", "ch", "lr", "ldlp"], required=True)
    sp.add_argument("--lambda", dest="lam", help="multipliers, row-major k x m1, comma separated")
    sp.set_defaults(func=cmd_relax)

    sp = sub.add_parser("dual-approx", help="grid approximation of the Lagrangian dual")
    sp.add_argument("file")
    grid_opts(sp)
    sp.set_defaults(func=cmd_dual_approx)

    sp = sub.add_parser("bounds", help="bound report with the scaled distance")
    sp.add_argument("file")
    sp.add_argument("--method", choices=["lagrangian", "ch"], required=True)
    grid_opts(sp)
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("vsdp", help="vector-valued superadditive dual point")
    sp.add_argument("file")
    sp.add_argument("--backend", choices=["auto", "simplex", "highs"], default="auto")
    sp.add_argument("--export-lp", metavar="PATH")
    sp.set_defaults(func=cmd_vsdp)

    sp = sub.add_parser("check", help="check a duality property")
    sp.add_argument("file")
    sp.add_argument("--property", choices=["weak-duality", "fr-lag", "halfspace-union", "prop9", "value-fn"], required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples", type=int, default=50)
    grid_opts(sp, count=11)
    sp.set_defaults(func=cmd_check)

    def exp_opts(sp):
        sp.add_argument("--problem", choices=[p.value for p in Problem], default="knapsack")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--n", type=int, default=None, help="knapsack items (default 20)")
        sp.add_argument("--size", type=int, default=4, help="assignment side length")

    sp = sub.add_parser("experiment", help="run the bound-quality experiment")
    exp_opts(sp)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--grid-count", type=int, default=None)
    sp.add_argument("--grid-max", type=float, default=2.5)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--csv", action="store_true", help="print the per-trial CSV instead of the summary")
    sp.add_argument("--out", metavar="DIR")
    sp.set_defaults(func=cmd_experiment)

    sp = sub.add_parser("gen", help="write a generated instance")
    exp_opts(sp)
    sp.add_argument("--trial", type=int, default=0)
    sp.add_argument("-o", "--output", default="-")
    sp.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except TrialError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3 if isinstance(exc.__cause__, NumericalError) else 2
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except (PreconditionError, MoipError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
