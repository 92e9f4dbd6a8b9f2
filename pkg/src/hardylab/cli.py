"""Command-line front door for the laboratory.

Subcommands: verify-example, iterate, hardy, evolve, convexity, gauge-check,
appell-check.  Outputs are CSV ('.' decimal, LF endings, shortest
round-trip doubles) and JSON summaries carrying a schema_version field.

Exit codes: 0 pass, 1 check failed, 2 bad input, 3 budget exceeded.

A flat key=value config file may supply defaults (--config); command-line
flags override it.  HARDYLAB_THREADS caps the linear-algebra thread pools.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import appell, convexity, exact_example, gauge, propagator
from .errors import IterationBudgetExceededError

SCHEMA_VERSION = 1

EXIT_PASS = 0
EXIT_CHECK_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_BUDGET = 3


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_csv(path: str, header: list[str], columns: list[np.ndarray]) -> None:
    rows = len(columns[0])
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(rows):
            fh.write(",".join(_fmt(col[i]) for col in columns) + "\n")


def emit_json(report: dict, path: str | None) -> None:
    report = {"schema_version": SCHEMA_VERSION, **report}
    text = json.dumps(report, indent=2, sort_keys=True)
    if path:
        with open(path, "w", newline="\n") as fh:
            fh.write(text + "\n")
    else:
        print(text)


# -- subcommands ----------------------------------------------------------------

def cmd_verify_example(args) -> int:
    if args.k <= 1.5:
        print("error: k must exceed 3/2", file=sys.stderr)
        return EXIT_BAD_INPUT
    if args.samples <= 0 or args.h <= 0:
        print("error: samples and h must be positive", file=sys.stderr)
        return EXIT_BAD_INPUT
    rng = np.random.default_rng(args.seed)
    pts, ts = [], []
    while len(pts) < args.samples:
        p = rng.uniform(-3.0, 3.0, size=3)
        if np.linalg.norm(p) <= 3.0 and p[0] ** 2 + p[1] ** 2 >= 0.1:
            pts.append(p)
            ts.append(rng.uniform(-1.0, 1.0))
    residuals = np.array([
        exact_example.pde_residual_relative(p, t, args.k, args.h) for p, t in zip(pts, ts)
    ])
    # convergence order from a Richardson pair at a few sample points
    orders = []
    for p, t in zip(pts[:5], ts[:5]):
        r1 = abs(exact_example.pde_residual(p, t, args.k, args.h))
        r2 = abs(exact_example.pde_residual(p, t, args.k, args.h / 2.0))
        if r2 > 0:
            orders.append(np.log2(r1 / r2))
    order = float(np.mean(orders))
    report = {
        "max_rel_residual": float(residuals.max()),
        "order_estimate": order,
        "norm_t_minus1": exact_example.critical_weighted_norm(-1.0, args.k),
        "norm_t_plus1": exact_example.critical_weighted_norm(1.0, args.k),
    }
    emit_json(report, args.json)
    if args.csv:
        P = np.array(pts)
        write_csv(args.csv, ["x", "y", "z", "t", "h", "rel_residual"],
                  [P[:, 0], P[:, 1], P[:, 2], np.array(ts),
                   np.full(len(pts), args.h), residuals])
    return EXIT_PASS if report["max_rel_residual"] < args.threshold else EXIT_CHECK_FAILED


def cmd_iterate(args) -> int:
    if args.mu is None or args.mu <= 0:
        print("error: mu must be positive", file=sys.stderr)
        return EXIT_BAD_INPUT
    try:
        verdict = convexity.run_iteration(args.mu, tol=args.tol, k_max=args.k_max,
                                          nodes=args.grid_nodes)
    except IterationBudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    t = convexity.make_grid(args.grid_nodes)
    header = ["t"] + [f"a_{j+1}" for j in range(len(verdict.history))]
    write_csv(args.out + ".csv", header, [t] + list(verdict.history))
    report = {"verdict": verdict.kind, "k_final": verdict.k}
    if verdict.kind == "Converged":
        R = convexity.smallest_root_R(args.mu) if args.mu <= 0.125 else None
        if R is not None:
            limit = convexity.limit_profile(args.mu, args.grid_nodes)
            report["R"] = float(R)
            report["sup_error_vs_closed_form"] = float(
                np.max(np.abs(verdict.profile.a - limit.a)))
    emit_json(report, args.out + ".json")
    return EXIT_PASS


def cmd_hardy(args) -> int:
    if args.alpha is None or args.beta is None or args.alpha <= 0 or args.beta <= 0:
        print("error: alpha and beta must be positive", file=sys.stderr)
        return EXIT_BAD_INPUT
    res = convexity.hardy_verdict(args.alpha, args.beta)
    report = {"verdict": res["verdict"]}
    if res["verdict"] == "Profile":
        report["R"] = float(res["R"])
        report["a_endpoints"] = [float(v) for v in res["a_endpoints"]]
    emit_json(report, args.json)
    return EXIT_PASS


def _evolve_setup(args):
    if args.preset == "free-gaussian":
        V = None
    elif args.preset == "constant-potential":
        V = lambda x: args.v0
    else:
        return None
    u0 = np.exp(-args.a0 * np.linspace(-args.L, args.L, args.N) ** 2).astype(complex)
    return u0, V


def cmd_evolve(args) -> int:
    setup = _evolve_setup(args)
    if setup is None:
        print(f"error: unknown preset {args.preset!r}", file=sys.stderr)
        return EXIT_BAD_INPUT
    u0, V = setup
    steps = int(round(args.t_final / args.dt))
    grid = propagator.GridSpec(1, args.L, args.N, args.dt, steps)
    store = max(steps // 200, 1)
    times, states = propagator.evolve_cn(u0, None, V, grid, store_every=store)
    trace = propagator.trace_H(times, states, args.L, lambda t: args.mu)
    scan = propagator.log_convexity_scan(trace)
    if args.csv:
        write_csv(args.csv, ["t", "H", "norm2", "admissible_flag"],
                  [trace.times, trace.H, trace.norm2, trace.admissible])
    emit_json({"preset": args.preset, "min_second_difference": scan,
               "final_norm2": float(trace.norm2[-1])}, args.json)
    return EXIT_PASS


def cmd_convexity(args) -> int:
    if args.preset != "free-gaussian":
        print(f"error: unknown preset {args.preset!r}", file=sys.stderr)
        return EXIT_BAD_INPUT
    x = np.linspace(-args.L, args.L, args.N)
    times = np.linspace(args.t_min, args.t_max, args.num)
    states = [propagator.free_gaussian_oracle(args.a0, x, t) for t in times]
    trace = propagator.trace_H(times, states, args.L, lambda t: args.weight_a)
    scan = propagator.log_convexity_scan(trace)
    if args.csv:
        write_csv(args.csv, ["t", "H", "norm2", "admissible_flag"],
                  [trace.times, trace.H, trace.norm2, trace.admissible])
    emit_json({"preset": args.preset, "min_second_difference": scan}, args.json)
    return EXIT_PASS if scan >= -1e-6 else EXIT_CHECK_FAILED


def cmd_gauge_check(args) -> int:
    if args.preset not in gauge.FIELD_PRESETS:
        print(f"error: unknown preset {args.preset!r}", file=sys.stderr)
        return EXIT_BAD_INPUT
    if args.preset in ("landau", "symmetric"):
        field = gauge.FIELD_PRESETS[args.preset](args.b0)
    else:
        field = gauge.FIELD_PRESETS[args.preset]()
    rng = np.random.default_rng(args.seed)
    samples = rng.uniform(-args.box, args.box, size=(args.samples, field.n))
    if field.n == 3:
        samples = samples[samples[:, 0] ** 2 + samples[:, 1] ** 2 > 0.1]
    transformed = gauge.transformed_field(field, nodes=args.nodes)
    rep = gauge.verify_gauge(field, transformed, samples)
    report = dict(rep)
    if args.preset == "landau":
        sym = gauge.symmetric_field(args.b0)
        report["max_error_vs_symmetric"] = max(
            float(np.max(np.abs(transformed.eval(x) - sym.eval(x)))) for x in samples)
    if args.csv:
        devs = np.array([abs(float(np.asarray(x) @ transformed.eval(x))) for x in samples])
        cols = [samples[:, i] for i in range(field.n)] + [devs]
        write_csv(args.csv, [f"x{i}" for i in range(field.n)] + ["x_dot_A"], cols)
    emit_json(report, args.json)
    return EXIT_PASS if rep["max_x_dot_A"] < 1e-8 else EXIT_CHECK_FAILED


def cmd_appell_check(args) -> int:
    if args.preset != "free-gaussian":
        print(f"error: unknown preset {args.preset!r}", file=sys.stderr)
        return EXIT_BAD_INPUT
    if args.alpha is None or args.beta is None or args.alpha <= 0 or args.beta <= 0:
        print("error: alpha and beta must be positive", file=sys.stderr)
        return EXIT_BAD_INPUT
    ab = appell.AlphaBeta(args.alpha, args.beta)

    def wave(x, s):
        return propagator.free_gaussian_oracle(args.a0, x, s)

    report = {"alpha": args.alpha, "beta": args.beta, "mu": appell.mu_of(ab)}
    if args.alpha == args.beta:
        src = appell.sample_wave(wave, args.L, args.N, appell.source_time(ab, 0.5))
        out, clipped = appell.appell_wave(src, ab, 0.5)
        report["identity_deviation"] = float(np.max(np.abs(out.values - src.values)))
        report["clipped_mass"] = clipped
    src0 = appell.sample_wave(wave, args.L, args.N, 0.0)
    out0, clipped0 = appell.appell_wave(src0, ab, 0.0)
    lhs = np.sqrt(out0.weighted_norm2(1.0 / (args.alpha * args.beta)))
    rhs = np.sqrt(src0.weighted_norm2(1.0 / args.beta**2))
    report["weighted_identity_rel_error"] = abs(lhs - rhs) / rhs
    report["clipped_mass_t0"] = clipped0
    emit_json(report, args.json)
    return EXIT_PASS


# -- argument plumbing ------------------------------------------------------------

def _apply_config(parser: argparse.ArgumentParser, args: list[str]):
    """Pull --config out of argv and turn key=value lines into defaults."""
    if "--config" not in args:
        return args, None
    i = args.index("--config")
    path = args[i + 1]
    rest = args[:i] + args[i + 2:]
    overrides = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            overrides[key.strip().replace("-", "_")] = value.strip()
    return rest, overrides


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hardylab", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("verify-example", help="pointwise PDE residuals of the closed-form example")
    q.add_argument("--k", type=float, default=2.0)
    q.add_argument("--samples", type=int, default=100)
    q.add_argument("--h", type=float, default=1e-3)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--threshold", type=float, default=1e-6)
    q.add_argument("--json", default=None)
    q.add_argument("--csv", default=None)
    q.set_defaults(func=cmd_verify_example)

    q = sub.add_parser("iterate", help="run the weight-profile iteration from a constant profile")
    q.add_argument("--mu", type=float, default=None)
    q.add_argument("--grid-nodes", type=int, default=513)
    q.add_argument("--tol", type=float, default=1e-8)
    q.add_argument("--k-max", type=int, default=200)
    q.add_argument("--out", default="iterate")
    q.set_defaults(func=cmd_iterate)

    q = sub.add_parser("hardy", help="vanishing verdict and weight profile for (alpha, beta)")
    q.add_argument("--alpha", type=float, default=None)
    q.add_argument("--beta", type=float, default=None)
    q.add_argument("--json", default=None)
    q.set_defaults(func=cmd_hardy)

    q = sub.add_parser("evolve", help="Crank-Nicolson run with a weighted-norm trace")
    q.add_argument("--preset", default="free-gaussian")
    q.add_argument("--a0", type=float, default=0.25)
    q.add_argument("--mu", type=float, default=0.005, help="constant weight coefficient")
    q.add_argument("--v0", type=float, default=1.0)
    q.add_argument("--L", type=float, default=20.0)
    q.add_argument("--N", type=int, default=1024)
    q.add_argument("--dt", type=float, default=1e-3)
    q.add_argument("--t-final", type=float, default=0.5)
    q.add_argument("--csv", default=None)
    q.add_argument("--json", default=None)
    q.set_defaults(func=cmd_evolve)

    q = sub.add_parser("convexity", help="log-convexity scan of a closed-form trace")
    q.add_argument("--preset", default="free-gaussian")
    q.add_argument("--a0", type=float, default=0.25)
    q.add_argument("--weight-a", type=float, default=0.05)
    q.add_argument("--t-min", type=float, default=-1.0)
    q.add_argument("--t-max", type=float, default=1.0)
    q.add_argument("--num", type=int, default=201)
    q.add_argument("--L", type=float, default=15.0)
    q.add_argument("--N", type=int, default=1025)
    q.add_argument("--csv", default=None)
    q.add_argument("--json", default=None)
    q.set_defaults(func=cmd_convexity)

    q = sub.add_parser("gauge-check", help="transverse-gauge invariants for a field preset")
    q.add_argument("--preset", default="landau")
    q.add_argument("--b0", type=float, default=1.0)
    q.add_argument("--nodes", type=int, default=64)
    q.add_argument("--samples", type=int, default=32)
    q.add_argument("--box", type=float, default=1.0)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--csv", default=None)
    q.add_argument("--json", default=None)
    q.set_defaults(func=cmd_gauge_check)

    q = sub.add_parser("appell-check", help="pseudoconformal norm identities on a preset")
    q.add_argument("--alpha", type=float, default=None)
    q.add_argument("--beta", type=float, default=None)
    q.add_argument("--preset", default="free-gaussian")
    q.add_argument("--a0", type=float, default=1.0)
    q.add_argument("--L", type=float, default=12.0)
    q.add_argument("--N", type=int, default=1024)
    q.add_argument("--json", default=None)
    q.set_defaults(func=cmd_appell_check)

    return p


def _dest_types(parser: argparse.ArgumentParser) -> dict:
    """Map argument dest names to their declared types, across all subcommands."""
    out = {}
    for act in parser._actions:
        if isinstance(act, argparse._SubParsersAction):
            for sub in act.choices.values():
                out.update(_dest_types(sub))
        elif act.type is not None:
            out.setdefault(act.dest, act.type)
    return out


def main(argv=None) -> int:
    threads = os.environ.get("HARDYLAB_THREADS")
    if threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, threads)
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv, overrides = _apply_config(build_parser(), argv)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_BAD_INPUT if exc.code not in (0, None) else 0
    if overrides:
        valid = set(vars(args))
        casters = _dest_types(parser)
        for key, value in overrides.items():
            if key in ("command", "func") or key not in valid:
                print(f"error: unknown config key {key!r}", file=sys.stderr)
                return EXIT_BAD_INPUT
            current = getattr(args, key)
            caster = casters.get(key) or (type(current) if current is not None else str)
            if caster is bool:
                value = value.lower() in ("1", "true", "yes")
            else:
                try:
                    value = caster(value)
                except ValueError:
                    print(f"error: bad value for config key {key!r}: {value!r}",
                          file=sys.stderr)
                    return EXIT_BAD_INPUT
            # command-line flags win: only fill values the user left at default
            default = parser.get_default(key)
            if current == default:
                setattr(args, key, value)
    try:
        return args.func(args)
    except (ValueError, propagator.WeightExceedsDecayError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
