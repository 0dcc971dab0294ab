"""Command-line interface.

Exit codes: 0 all checks passed, 1 a check failed or the solver did not
converge, 2 usage or input errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import (
    ConfigurationError,
    DimensionError,
    NumericError,
    ParseError,
    StructuralError,
    UsageError,
)
from .experiments import run_experiment
from .funcapprox import (
    approx_error,
    builtin,
    fourier_fit,
    fourier_to_poly,
    lsq_poly_fit,
    trig_term_budget,
    unipoly_to_text,
)
from .multipoly import poly_from_text, poly_to_text
from .network import expand_network, load_network, load_dataset, save_network
from .report import emit_report
from .synthesis import (
    RandomRestarts,
    SolverConfig,
    build_coefficient_system,
    build_data_system,
    compress_network,
    solve_system,
)


def _add_solver_flags(sub) -> None:
    sub.add_argument("--seed", type=int, default=0, help="seed for solver restarts")
    sub.add_argument("--max-iters", type=int, default=None)
    sub.add_argument("--tol", type=float, default=None)
    sub.add_argument("--trace", action="store_true", help="solver iterations to stderr")


def _solver_config(args) -> SolverConfig:
    kwargs = {"fallback": RandomRestarts(seed=args.seed)}
    if args.max_iters is not None:
        kwargs["max_iters"] = args.max_iters
    if args.tol is not None:
        kwargs["tol_residual"] = args.tol
    return SolverConfig(**kwargs)


def _trace(args):
    return sys.stderr if args.trace else None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polynet",
        description="expand polynomial-activation networks, approximate activations, "
        "and synthesize weights by coefficient matching",
    )
    subs = parser.add_subparsers(dest="verb", required=True)

    p = subs.add_parser("approx", help="fit a polynomial surrogate for an activation")
    p.add_argument("--fn", required=True, help="sigmoid, tanh, relu or square")
    p.add_argument("--interval", nargs=2, type=float, required=True, metavar=("LO", "HI"))
    p.add_argument("--method", choices=("fourier", "lsq"), default="fourier")
    p.add_argument("--fourier-n", type=int, default=8, help="harmonics for the fourier method")
    p.add_argument("--panels", type=int, default=2048, help="quadrature panels")
    p.add_argument("--terms", type=int, default=None, help="series terms substituted per harmonic")
    p.add_argument("--degree", type=int, default=9, help="degree for the lsq method")
    p.add_argument("--gridpoints", type=int, default=1001)
    p.add_argument("--out", default=None, help="write the polynomial here")
    p.add_argument("--machine", action="store_true")
    p.set_defaults(handler=_cmd_approx)

    p = subs.add_parser("expand", help="expand a network into explicit polynomials")
    p.add_argument("--net", required=True)
    p.add_argument("--out", required=True, help="output path; multi-output nets get .<k> inserted")
    p.set_defaults(handler=_cmd_expand)

    p = subs.add_parser("synth", help="solve for weights matching target polynomials")
    p.add_argument("--arch", required=True, help="architecture file; weight values are placeholders")
    p.add_argument("--targets", nargs="+", required=True, help="one polynomial file per output")
    p.add_argument("--out", default=None, help="write the solved network here")
    _add_solver_flags(p)
    p.set_defaults(handler=_cmd_synth)

    p = subs.add_parser("fit-data", help="solve for weights matching a dataset")
    p.add_argument("--arch", required=True)
    p.add_argument("--data", required=True, help="CSV with header f1,...,fd,y")
    p.add_argument("--out", default=None)
    _add_solver_flags(p)
    p.set_defaults(handler=_cmd_fit_data)

    p = subs.add_parser("compress", help="fit a smaller network to a truncated expansion")
    p.add_argument("--teacher", required=True)
    p.add_argument("--student-arch", required=True)
    p.add_argument("--degree", type=int, required=True, help="truncation degree for the teacher")
    p.add_argument("--out", default=None)
    _add_solver_flags(p)
    p.set_defaults(handler=_cmd_compress)

    for exp_id in (1, 2, 3, 4):
        p = subs.add_parser(f"verify-exp{exp_id}", help=f"run reference experiment {exp_id}")
        p.add_argument("--machine", action="store_true", help="stable key=value output")
        _add_solver_flags(p)
        p.set_defaults(handler=_cmd_verify, exp_id=exp_id)

    return parser


def _cmd_approx(args) -> int:
    lo, hi = args.interval
    f = builtin(args.fn, lo, hi)
    if args.method == "fourier":
        if lo != -hi:
            raise ConfigurationError("the fourier method needs a symmetric interval [-l, l]")
        fs = fourier_fit(f, hi, args.fourier_n, args.panels)
        terms = args.terms if args.terms is not None else trig_term_budget(args.fourier_n)
        poly = fourier_to_poly(fs, terms)
    else:
        poly = lsq_poly_fit(f, (lo, hi), args.degree, args.gridpoints)
    err = approx_error(f, poly, (lo, hi), args.gridpoints)
    line = unipoly_to_text(poly)
    if args.out:
        Path(args.out).write_text(line)
    if args.machine:
        sys.stdout.write(f"approx.degree={poly.degree}\n")
        sys.stdout.write(f"approx.max_abs={err.max_abs:.17g}\n")
        sys.stdout.write(f"approx.rmse={err.rmse:.17g}\n")
        if not args.out:
            sys.stdout.write(line)
    else:
        sys.stdout.write(line)
        sys.stdout.write(f"degree={poly.degree}\n")
        sys.stdout.write(f"max_abs={err.max_abs:.6e}\n")
        sys.stdout.write(f"rmse={err.rmse:.6e}\n")
    return 0


def _expand_out_path(base: str, k: int, n: int) -> Path:
    if n == 1:
        return Path(base)
    p = Path(base)
    return p.with_name(f"{p.stem}.{k}{p.suffix}")


def _cmd_expand(args) -> int:
    net = load_network(args.net)
    polys = expand_network(net)
    for k, poly in enumerate(polys):
        path = _expand_out_path(args.out, k, len(polys))
        path.write_text(poly_to_text(poly))
        sys.stdout.write(f"wrote {path} (terms={len(poly.terms)}, degree={poly.degree()})\n")
    return 0


def _report_solution(report) -> None:
    sys.stdout.write(f"converged={report.converged}\n")
    sys.stdout.write(f"residual_norm={report.final_residual_norm:.17g}\n")
    sys.stdout.write(f"iterations={report.iterations}\n")
    sys.stdout.write(f"restarts={report.restarts_used}\n")


def _cmd_synth(args) -> int:
    arch = load_network(args.arch)
    targets = [poly_from_text(Path(p).read_text()) for p in args.targets]
    system = build_coefficient_system(arch, targets)
    w, report = solve_system(system, _solver_config(args), _trace(args))
    if args.out:
        save_network(system.layout.instantiate(arch, w), args.out)
    _report_solution(report)
    return 0 if report.converged else 1


def _cmd_fit_data(args) -> int:
    arch = load_network(args.arch)
    ds = load_dataset(args.data)
    system = build_data_system(arch, ds)
    w, report = solve_system(system, _solver_config(args), _trace(args))
    if args.out:
        save_network(system.layout.instantiate(arch, w), args.out)
    _report_solution(report)
    return 0 if report.converged else 1


def _cmd_compress(args) -> int:
    teacher = load_network(args.teacher)
    student_arch = load_network(args.student_arch)
    student, report = compress_network(teacher, student_arch, args.degree, _solver_config(args), _trace(args))
    if args.out:
        save_network(student, args.out)
    _report_solution(report)
    return 0 if report.converged else 1


def _cmd_verify(args) -> int:
    doc = run_experiment(args.exp_id, seed=args.seed, max_iters=args.max_iters, tol=args.tol, trace=_trace(args))
    return emit_report(doc, "machine" if args.machine else "text")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (ParseError, StructuralError, UsageError, DimensionError, ConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
