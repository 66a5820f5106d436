"""``robust-frechet`` command line.

Subcommands::

    estimate   run one estimator on one simulated sample and print the result
    sweep      Monte-Carlo sweep to CSV
    bounds     evaluate every error-radius formula for given inputs
    plotscript write a matplotlib script that plots a sweep CSV

Exit codes: 0 success, 2 configuration error, 3 solver failure, 4 I/O error.
"""

import argparse
import sys

import numpy as np

from .. import bounds as B
from ..exceptions import FrechetError
from ..spaces import Gaussian
from .config import ConfigError, base_estimator, load_config
from .runner import HEADER, Task, fmt, resolve_threads, simulate, sweep, theory_radius

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_IO = 0, 2, 3, 4


def _format_point(x):
    if isinstance(x, Gaussian):
        return (
            f"mean = {_format_array(x.mean)}\n"
            f"cov = {_format_array(x.cov)}"
        )
    return f"estimate = {_format_array(np.atleast_1d(x))}"


def _format_array(a):
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        return "[" + ", ".join(fmt(float(v)) for v in a) + "]"
    return "[" + ", ".join(_format_array(r) for r in a) + "]"


def cmd_estimate(args):
    cfg = load_config(args.config).with_overrides(seed=args.seed)
    estimator = args.estimator or cfg.estimators[0]
    if base_estimator(estimator) not in ("empirical", "trimmed", "mom"):
        raise ConfigError(f"--estimator: unknown estimator {estimator!r}")
    task = Task(0, cfg.m[0], cfg.n[0], cfg.epsilon[0], cfg.delta[0], estimator, args.trial)
    result, error, status, seed = simulate(cfg, task)
    lines = [
        f'estimator = "{estimator}"',
        f'space = "{cfg.space}"',
        f"m = {task.m}",
        f"n = {task.n}",
        f"epsilon = {fmt(task.epsilon)}",
        f"delta = {fmt(task.delta)}",
        f"trial = {task.trial}",
        f"seed = {seed}",
        f'status = "{status}"',
    ]
    if result is not None:
        if "t" in result.diagnostics:
            lines.append(f"t = {result.diagnostics['t']}")
        lines += [
            f"iterations = {result.iterations}",
            f"converged = {fmt(result.converged)}",
            f"final_objective = {fmt(result.final_objective)}",
            f"error = {fmt(error)}",
            f"theory_radius = {fmt(theory_radius(cfg, task, result.diagnostics.get('n_blocks')))}",
            _format_point(result.estimate),
        ]
    print("\n".join(lines))
    return EXIT_OK if status == "ok" else EXIT_SOLVER


def cmd_sweep(args):
    cfg = load_config(args.config).with_overrides(seed=args.seed, out=args.out)
    out = cfg.out or "results.csv"
    threads = resolve_threads(args.threads)
    rows = sweep(cfg, out, threads=threads, timestamps=not args.no_timestamp, resume=args.resume)
    status = HEADER.index("status")
    failed = sum(r[status] == "failed" for r in rows)
    unconverged = sum(r[status] == "not_converged" for r in rows)
    print(f"wrote {len(rows)} rows to {out} ({failed} failed, {unconverged} not converged)")
    return EXIT_SOLVER if failed else EXIT_OK


def cmd_bounds(args):
    try:
        inp = B.BoundInputs(
            n=args.n,
            delta=args.delta,
            epsilon=args.epsilon,
            global_variance=args.global_variance,
            sigma_w=args.sigma_w,
            nu=dict(args.nu or []),
            k_min=args.k_min,
            C_X=args.C_X,
            alpha=args.alpha,
            beta=args.beta,
            kappa0=args.kappa0,
            kappa1=args.kappa1,
            subgaussian_L=args.L,
            abs_const_C=args.abs_const,
        )
    except FrechetError as err:
        raise ConfigError(str(err)) from None
    for name, value in B.bound_table(inp, args.R_ell).items():
        if isinstance(value, float):
            value = fmt(value)
        print(f"{name} = {value}")
    for delta in args.delta_grid or []:
        try:
            k, ell = B.mom_block_size(args.n, delta)
            print(f"mom_blocks[delta={fmt(delta)}] = k {k}, ell {ell}")
        except FrechetError as err:
            print(f"mom_blocks[delta={fmt(delta)}] = n/a ({err})")
    return EXIT_OK


PLOT_TEMPLATE = '''"""Plots for {csv}: error vs n (log-log), error vs epsilon, error quantile vs delta."""
import csv
import sys
from collections import defaultdict

import matplotlib.pyplot as plt
import numpy as np

path = sys.argv[1] if len(sys.argv) > 1 else {csv!r}
with open(path, newline="") as fh:
    rows = [r for r in csv.DictReader(line for line in fh if not line.startswith("#"))
            if r["status"] != "failed"]


def grouped(x_key, keep):
    out = defaultdict(lambda: defaultdict(list))
    for r in rows:
        if keep(r):
            out[r["estimator"]][float(r[x_key])].append(
                (float(r["error"]), float(r["theory_radius"]))
            )
    return out


fig, axes = plt.subplots(1, 3, figsize=(15, 4.5))
eps0 = min(float(r["epsilon"]) for r in rows)
delta0 = min(float(r["delta"]) for r in rows)

ax = axes[0]
for est, cells in sorted(grouped("n", lambda r: float(r["epsilon"]) == eps0
                                 and float(r["delta"]) == delta0).items()):
    xs = sorted(cells)
    ys = [np.median([e for e, _ in cells[x]]) for x in xs]
    ax.loglog(xs, ys, "o-", label=est)
    if len(xs) > 1:
        slope = np.polyfit(np.log(xs), np.log(ys), 1)[0]
        ax.plot([], [], " ", label=f"{{est}} slope {{slope:.2f}}")
ax.set_xlabel("n")
ax.set_ylabel("median error")
ax.set_title("error vs n")
ax.legend()

ax = axes[1]
n_max = max(int(r["n"]) for r in rows)
for est, cells in sorted(grouped("epsilon", lambda r: int(r["n"]) == n_max
                                 and float(r["delta"]) == delta0).items()):
    xs = sorted(cells)
    ax.semilogy(xs, [np.median([e for e, _ in cells[x]]) for x in xs], "o-", label=est)
ax.set_xlabel("epsilon")
ax.set_ylabel("median error")
ax.set_title(f"error vs epsilon (n={{n_max}})")
ax.legend()

ax = axes[2]
for est, cells in sorted(grouped("delta", lambda r: int(r["n"]) == n_max
                                 and float(r["epsilon"]) == eps0).items()):
    xs = sorted(cells)
    ax.semilogx(xs, [np.quantile([e for e, _ in cells[x]], 1 - x) for x in xs], "o-",
                label=f"{{est}} (1-delta) quantile")
    finite = [[r for _, r in cells[x] if np.isfinite(r)] for x in xs]
    radius = [np.median(v) if v else np.nan for v in finite]
    if np.isfinite(radius).any():
        ax.semilogx(xs, radius, "--", label=f"{{est}} radius")
ax.set_xlabel("delta")
ax.set_ylabel("error")
ax.set_yscale("log")
ax.set_title("error quantile vs delta")
ax.legend()

fig.tight_layout()
fig.savefig({png!r}, dpi=150)
print("saved", {png!r})
'''


def cmd_plotscript(args):
    out = args.out or (args.csv.rsplit(".", 1)[0] + "_plot.py")
    with open(args.csv, newline="") as fh:
        header = next(line for line in fh if not line.startswith("#")).strip().split(",")
    if header != HEADER:
        raise ConfigError(f"{args.csv}: not a sweep CSV (unexpected header)")
    png = out.rsplit(".", 1)[0] + ".png"
    with open(out, "w") as fh:
        fh.write(PLOT_TEMPLATE.format(csv=args.csv, png=png))
    print(f"wrote {out}")
    return EXIT_OK


def _nu_pair(text):
    try:
        p, v = text.split(":")
        return float(p), float(v)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected P:VALUE, got {text!r}") from None


def build_parser():
    parser = argparse.ArgumentParser(
        prog="robust-frechet", description="Robust Fréchet-mean simulations and error radii."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="experiment TOML file")
        p.add_argument("--seed", type=int, help="override the master seed")
        p.add_argument("--threads", type=int, help="worker processes (env ROBUST_FRECHET_THREADS)")
        p.add_argument("--no-timestamp", action="store_true",
                       help="omit the timestamp line and zero runtime_ms for byte-stable output")

    p = sub.add_parser("estimate", help="run one estimator on one simulated sample")
    common(p)
    p.add_argument("--estimator", help="empirical, trimmed, mom (optionally with _clean)")
    p.add_argument("--trial", type=int, default=0)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("sweep", help="Monte-Carlo sweep to CSV")
    common(p)
    p.add_argument("--out", help="CSV path (overrides the config)")
    p.add_argument("--resume", action="store_true", help="keep finished cells of an existing CSV")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bounds", help="evaluate the error-radius formulas")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--global-variance", type=float, default=0.0)
    p.add_argument("--sigma-w", type=float, default=0.0)
    p.add_argument("--nu", type=_nu_pair, action="append", help="moment bound P:VALUE (repeatable)")
    p.add_argument("--k-min", type=float)
    p.add_argument("--C-X", type=float, dest="C_X")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--kappa0", type=float)
    p.add_argument("--kappa1", type=float)
    p.add_argument("--L", type=float, default=1.0, help="sub-Gaussian constant")
    p.add_argument("--abs-const", type=float, default=1.0, help="absolute constant (shape only)")
    p.add_argument("--R-ell", type=float, dest="R_ell", help="block-mean error level for MoM")
    p.add_argument("--delta-grid", type=float, nargs="+", help="print MoM block sizes for these deltas")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("plotscript", help="write a plotting script for a sweep CSV")
    p.add_argument("csv")
    p.add_argument("--out", help="script path (default: <csv>_plot.py)")
    p.set_defaults(func=cmd_plotscript)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as err:
        print(f"I/O error: {err}", file=sys.stderr)
        return EXIT_IO
    except FrechetError as err:
        print(f"solver failure: {err}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
