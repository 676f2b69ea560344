"""Command-line harness.

Subcommands: ``run`` (execute a spec, write CSV + summary + figure),
``selftest-prox`` / ``selftest-grad`` (built-in agreement suites),
``plot`` (figure from an existing CSV), ``eval-quant`` (accuracy of a
grid-projected model on held-out data).

Exit codes: 0 success, 1 validation or input error, 2 a run diverged
(outputs are still written), 3 a self-test failed.

Output paths resolve against --out, then $SPGLAB_OUT, then the working
directory.
"""

from __future__ import annotations

import argparse
import os
import sys

OUT_ENV = "SPGLAB_OUT"


def resolve_out_dir(cli_out):
    out = cli_out or os.environ.get(OUT_ENV) or "."
    os.makedirs(out, exist_ok=True)
    return out


def _place(path, out_dir):
    return path if os.path.isabs(path) else os.path.join(out_dir, path)


def cmd_run(args):
    from .experiments import (
        build_problem,
        load_spec,
        run_experiment,
        write_models_csv,
        write_summary,
        write_trace_csv,
    )
    from .plotting import render_plot

    spec = load_spec(args.spec)
    out_dir = resolve_out_dir(args.out)
    problem = build_problem(spec)
    seeds = args.seed if args.seed else None
    result = run_experiment(spec, jobs=args.jobs, seeds=seeds, obj=problem.obj)

    csv_path = _place(spec.outputs["csv"], out_dir)
    write_trace_csv(result, csv_path)
    summary = write_summary(result, _place(spec.outputs["summary"], out_dir))
    sys.stdout.write(summary)
    if spec.outputs.get("models"):
        write_models_csv(result, _place(spec.outputs["models"], out_dir))
    if spec.outputs.get("svg"):
        info = render_plot(csv_path, _place(spec.outputs["svg"], out_dir))
        print(f"figure: {info['out']} ({info['groups']} curves)")
    print(f"traces: {csv_path}")
    return 2 if result.any_diverged else 0


def cmd_selftest_prox(args):
    from .selftest import format_report, prox_selftest

    report = prox_selftest(n_cases=args.cases, seed=args.seed_value)
    print(format_report(report))
    return 0 if report.passed else 3


def cmd_selftest_grad(args):
    from .selftest import format_report, grad_selftest

    report = grad_selftest(n_cases=args.cases, seed=args.seed_value)
    print(format_report(report))
    return 0 if report.passed else 3


def cmd_plot(args):
    from .plotting import render_plot

    out_dir = resolve_out_dir(args.out)
    target = args.target or os.path.basename(args.csv).rsplit(".", 1)[0] + ".svg"
    info = render_plot(
        args.csv, _place(target, out_dir), x_axis=args.x, y_axis=args.y, log_y=args.log_y
    )
    print(f"figure: {info['out']} ({info['groups']} curves"
          + (", floor-clamped" if info["clamped"] else "") + ")")
    return 0


def cmd_eval_quant(args):
    from .datasets import parse_libsvm
    from .experiments import evaluate_quantized, read_model_file

    grid = tuple(args.grid)
    data = parse_libsvm(args.data, d=args.d)
    rc = 0
    for label, x in read_model_file(args.model):
        rep = evaluate_quantized(x, grid, data)
        print(
            f"{label}: accuracy {rep['accuracy']:.4f} ({rep['correct']}/{rep['total']})"
            f"  tp={rep['tp']} tn={rep['tn']} fp={rep['fp']} fn={rep['fn']}"
            f"  nnz(projected)={rep['nnz_quantized']}"
        )
    return rc


def build_parser():
    p = argparse.ArgumentParser(prog="spglab", description=__doc__.strip().splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="execute an experiment spec")
    runp.add_argument("spec", help="YAML experiment spec")
    runp.add_argument("--seed", type=int, action="append", default=None,
                      help="override the spec's seed list (repeatable)")
    runp.add_argument("--jobs", type=int, default=1, help="parallel (entry, seed) runs")
    runp.add_argument("--out", default=None, help=f"output directory (default ${OUT_ENV} or .)")
    runp.set_defaults(fn=cmd_run)

    for name, fn in (("selftest-prox", cmd_selftest_prox), ("selftest-grad", cmd_selftest_grad)):
        sp = sub.add_parser(name, help=f"run the built-in {name.split('-')[1]} agreement suite")
        sp.add_argument("--cases", type=int, default=1000 if name == "selftest-prox" else 100)
        sp.add_argument("--seed", dest="seed_value", type=int, default=0)
        sp.set_defaults(fn=fn)

    pl = sub.add_parser("plot", help="render a figure from a trace CSV")
    pl.add_argument("csv")
    pl.add_argument("--x", choices=("grad_evals", "t"), default="grad_evals")
    pl.add_argument("--y", choices=("F", "exact_residual"), default="F")
    pl.add_argument("--log-y", action=argparse.BooleanOptionalAction, default=True)
    pl.add_argument("--target", default=None, help="output file name (extension picks the format)")
    pl.add_argument("--out", default=None, help=f"output directory (default ${OUT_ENV} or .)")
    pl.set_defaults(fn=cmd_plot)

    ev = sub.add_parser("eval-quant", help="score a grid-projected model on held-out data")
    ev.add_argument("model", help="models CSV from a run, or a plain one-value-per-line vector")
    ev.add_argument("--data", required=True, help="held-out data file (libsvm format)")
    ev.add_argument("--d", type=int, default=None, help="feature dimension override")
    ev.add_argument("--grid", nargs="+", type=float, default=[-1.0, 1.0],
                    help="grid points, e.g. --grid -1 1")
    ev.set_defaults(fn=cmd_eval_quant)
    return p


def main(argv=None):
    from .datasets import DataError
    from .experiments import SpecError
    from .solvers import ConfigError

    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (SpecError, ConfigError, DataError, FileNotFoundError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
