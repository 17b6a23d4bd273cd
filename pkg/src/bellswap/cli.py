"""Command-line front end: single trials, sweeps, analytic queries, self-check.

Exit codes: 0 = clean execution (protocol non-success is data, not an
error), 1 = runtime or verification failure, 2 = usage error. The default
seed can be overridden with the ``BELLSWAP_SEED`` environment variable.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__, analytic, experiments, kernels, modes, protocol, verify

DEFAULT_SEED = 12345

FIG_PRESETS = {
    "fig2": "minimum squeezing (dB) vs Bell-pair count for targets 0.30/0.40/0.48, c=2.2",
    "fig3": "success vs squeezing 10..24 dB at n_b=3, threshold 0.99, blocks s_c=0..3, c=2.17",
    "fig4a": "success vs fidelity threshold at n_b=4, 10 dB, blocks s_c=0..3",
    "fig4b": "success vs fidelity threshold at n_b=4, 15 dB, blocks s_c=0..3",
    "fig5": "success vs fidelity threshold at n=2, s_c=0, blocks sigma_db=5/10/15",
}

_THRESHOLD_GRID = (0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99, 0.995, 0.999)


def _default_seed() -> int:
    return int(os.environ.get("BELLSWAP_SEED", DEFAULT_SEED))


def _sigma_from_flags(args, parser) -> float:
    if getattr(args, "sigma_linear", None) is not None:
        if args.sigma_db is not None:
            parser.error("--sigma-db and --sigma-linear are mutually exclusive")
        return args.sigma_linear
    if args.sigma_db is None:
        parser.error("one of --sigma-db or --sigma-linear is required")
    return modes.sigma_from_db(args.sigma_db)


def _config_from_flags(args, parser) -> protocol.ProtocolConfig:
    try:
        return protocol.ProtocolConfig(args.n, _sigma_from_flags(args, parser),
                                       args.sc, args.threshold)
    except ValueError as exc:
        parser.error(str(exc))


def cmd_trial(args, parser) -> int:
    config = _config_from_flags(args, parser)
    rng = np.random.default_rng(args.seed)
    result = protocol.run_trial(config, rng)
    print(f"x_d        = {result.x_d:.17g}")
    print(f"p_d        = {result.p_d:.17g}")
    print(f"t          = {result.t}")
    print(f"delta_p    = {result.delta_p:.17g}")
    print(f"abandoned  = {result.abandoned}")
    if result.outcome is not None:
        print(f"qubits     = {list(result.outcome.qubit_indices)}")
        print(f"bits_alice = {list(result.outcome.bits_alice)}")
        print(f"bits_bob   = {list(result.outcome.bits_bob)}")
    print(f"success    = {result.success}")
    print(f"fidelity   = {result.fidelity:.17g}")
    print(f"bell_pairs = {result.bell_pairs}")
    if args.transcript:
        with open(args.transcript, "w") as fh:
            fh.write("\n".join(protocol.format_transcript(result.transcript)) + "\n")
        print(f"transcript -> {args.transcript}")
    return 0


def _preset_blocks(preset: str, trials: int, seed: int):
    """Sweep blocks (block_label, SweepSpec) for a figure preset."""
    blocks = []
    if preset == "fig3":
        for i, s_c in enumerate((0, 1, 2, 3)):
            blocks.append((
                f"s_c={s_c}",
                experiments.SweepSpec(
                    variable="sigma_db", grid=tuple(float(v) for v in range(10, 25)),
                    trials_per_point=trials, seed=experiments.derive_seed(seed, 100 + i),
                    n=3 + 1 + s_c, s_c=s_c, fidelity_threshold=0.99,
                    cutoff=analytic.MC_FIT_CUTOFF,
                ),
            ))
    elif preset in ("fig4a", "fig4b"):
        sigma_db = 10.0 if preset == "fig4a" else 15.0
        for i, s_c in enumerate((0, 1, 2, 3)):
            blocks.append((
                f"s_c={s_c}",
                experiments.SweepSpec(
                    variable="fidelity_threshold", grid=_THRESHOLD_GRID,
                    trials_per_point=trials, seed=experiments.derive_seed(seed, 200 + i),
                    n=4 + 1 + s_c, sigma_db=sigma_db, s_c=s_c,
                ),
            ))
    elif preset == "fig5":
        for i, sigma_db in enumerate((5.0, 10.0, 15.0)):
            blocks.append((
                f"sigma_db={sigma_db:g}",
                experiments.SweepSpec(
                    variable="fidelity_threshold", grid=_THRESHOLD_GRID,
                    trials_per_point=trials, seed=experiments.derive_seed(seed, 300 + i),
                    n=2, sigma_db=sigma_db, s_c=0,
                ),
            ))
    else:
        raise ValueError(f"unknown preset {preset!r}")
    return blocks


def _emit_fig2(args, metadata) -> None:
    lines = []
    for p_target in (0.30, 0.40, 0.48):
        points, slope, intercept = experiments.fig2_curve(p_target, range(3, 9), c=2.2)
        metadata[f"fit_p{p_target:g}"] = f"slope={slope:.6f} intercept={intercept:.6f}"
        for n_b, db in points:
            lines.append((p_target, n_b, db))
    with open(args.output, "w") as fh:
        for key, val in metadata.items():
            fh.write(f"# {key}={val}\n")
        fh.write("p_target,n_b,sigma_db_min\n")
        for p_target, n_b, db in lines:
            fh.write(f"{p_target:.17g},{n_b},{db:.17g}\n")


def cmd_sweep(args, parser) -> int:
    seed = args.seed
    metadata = {
        "artifact": f"bellswap {__version__}",
        "command": " ".join(sys.argv[1:]) or "sweep",
        "seed": seed,
        "kernel": args.impl or kernels.DEFAULT_IMPL,
    }
    if args.preset and (args.variable or args.grid):
        parser.error("--preset conflicts with an explicit --variable/--grid sweep")
    if not args.preset and not (args.variable and args.grid):
        parser.error("either --preset or both --variable and --grid are required")

    try:
        if args.preset == "fig2":
            metadata["preset"] = f"fig2: {FIG_PRESETS['fig2']}"
            _emit_fig2(args, metadata)
            print(f"wrote {args.output}")
            return 0
        if args.preset:
            metadata["preset"] = f"{args.preset}: {FIG_PRESETS[args.preset]}"
            rows = []
            offset = 1
            for label, spec in _preset_blocks(args.preset, args.trials, seed):
                block = experiments.sweep(spec, impl=args.impl, threads=args.threads)
                metadata[f"block_rows_{offset}-{offset + len(block) - 1}"] = label
                rows.extend(block)
                offset += len(block)
        else:
            grid = tuple(float(v) for v in args.grid.split(","))
            spec = experiments.SweepSpec(
                variable=args.variable, grid=grid, trials_per_point=args.trials,
                seed=seed, n=args.n, sigma_db=args.sigma_db, s_c=args.sc,
                fidelity_threshold=args.threshold, cutoff=args.cutoff,
            )
            rows = experiments.sweep(spec, impl=args.impl, threads=args.threads)
            metadata.update(variable=args.variable, trials=args.trials)
        experiments.emit(rows, args.format, args.output, metadata=metadata)
    except ValueError as exc:
        parser.error(str(exc))
    except OSError as exc:
        print(f"error: cannot write {args.output}: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.output}")
    return 0


def cmd_analytic(args, parser) -> int:
    try:
        if args.analytic_cmd == "sc":
            print(analytic.min_sc(modes.sigma_from_db(args.sigma_db), args.nb, args.c))
        elif args.analytic_cmd == "bounds":
            lower, upper = analytic.prob_bounds(modes.sigma_from_db(args.sigma_db), args.nb, args.c)
            print(f"p_lower = {lower:.17g}")
            print(f"p_upper = {upper:.17g}")
        elif args.analytic_cmd == "prob":
            value = analytic.success_prob(modes.sigma_from_db(args.sigma_db), args.sc, args.nb)
            print(f"p_success = {value:.17g}")
        elif args.analytic_cmd == "min-squeezing":
            db = analytic.min_squeezing_db(args.p_target, args.nb, args.c)
            print(f"sigma_db_min = {db:.17g}")
        else:
            parser.error("missing analytic subcommand")
    except analytic.NoSolutionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        parser.error(str(exc))
    return 0


def cmd_verify(args, parser) -> int:
    results = verify.run_checks(quick=args.quick, u_scale=args.perturb_u)
    failed = [r for r in results if not r.passed]
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}")
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bellswap",
        description="Simulator and analytic model for the hybrid CV-DV entanglement swapping protocol",
    )
    parser.add_argument("--version", action="version", version=f"bellswap {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_trial = sub.add_parser("trial", help="run one protocol trial and print its record")
    p_trial.add_argument("--n", type=int, required=True, help="register size (qubits per side)")
    p_trial.add_argument("--sigma-db", type=float, help="squeezing strength in dB")
    p_trial.add_argument("--sigma-linear", type=float, help="linear sigma instead of dB")
    p_trial.add_argument("--sc", type=int, default=0, help="purification qubit count")
    p_trial.add_argument("--threshold", type=float, default=0.99, help="fidelity threshold")
    p_trial.add_argument("--seed", type=int, default=_default_seed())
    p_trial.add_argument("--transcript", help="write the classical-message transcript to this file")
    p_trial.set_defaults(func=cmd_trial)

    p_sweep = sub.add_parser("sweep", help="Monte Carlo sweep; emits a CSV/JSON table")
    p_sweep.add_argument("--preset", choices=sorted(FIG_PRESETS),
                         help="; ".join(f"{k}: {v}" for k, v in sorted(FIG_PRESETS.items())))
    p_sweep.add_argument("--variable", choices=("sigma_db", "fidelity_threshold", "n_b"))
    p_sweep.add_argument("--grid", help="comma-separated grid values for --variable")
    p_sweep.add_argument("--n", type=int, help="register size (fixed sweeps)")
    p_sweep.add_argument("--sigma-db", type=float, help="squeezing in dB (fixed sweeps)")
    p_sweep.add_argument("--sc", type=int, default=0)
    p_sweep.add_argument("--threshold", type=float, default=0.99)
    p_sweep.add_argument("--cutoff", type=float, default=analytic.MC_FIT_CUTOFF,
                         help="cutoff c for the attached analytic bounds")
    p_sweep.add_argument("--trials", type=int, default=20000, help="trials per grid point")
    p_sweep.add_argument("--seed", type=int, default=_default_seed())
    p_sweep.add_argument("--threads", type=int, default=1)
    p_sweep.add_argument("--impl", choices=("compiled", "python"),
                         help="force a kernel backend (default: compiled when built)")
    p_sweep.add_argument("--format", choices=("csv", "json"), default="csv")
    p_sweep.add_argument("-o", "--output", required=True)
    p_sweep.set_defaults(func=cmd_sweep)

    p_an = sub.add_parser("analytic", help="closed-form predictions")
    an_sub = p_an.add_subparsers(dest="analytic_cmd", required=True)
    p_sc = an_sub.add_parser("sc", help="minimum purification count for cutoff c")
    p_bounds = an_sub.add_parser("bounds", help="lower/upper bounds on the best success probability")
    p_prob = an_sub.add_parser("prob", help="success probability at (sigma, s_c, n_b)")
    for p in (p_sc, p_bounds, p_prob):
        p.add_argument("--sigma-db", type=float, required=True)
        p.add_argument("--nb", type=int, required=True)
    p_sc.add_argument("--c", type=float, default=analytic.DESIGN_CUTOFF)
    p_bounds.add_argument("--c", type=float, default=analytic.DESIGN_CUTOFF)
    p_prob.add_argument("--sc", type=int, required=True)
    p_min = an_sub.add_parser("min-squeezing", help="squeezing needed for a target success probability")
    p_min.add_argument("--p-target", type=float, required=True)
    p_min.add_argument("--nb", type=int, required=True)
    p_min.add_argument("--c", type=float, default=analytic.DESIGN_CUTOFF)
    p_an.set_defaults(func=cmd_analytic)

    p_verify = sub.add_parser("verify", help="run the invariant and oracle-triangle checks")
    p_verify.add_argument("--quick", action="store_true", help="subset finishing in under a minute")
    p_verify.add_argument("--perturb-u", type=float, default=1.0, help=argparse.SUPPRESS)
    p_verify.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args, parser)


if __name__ == "__main__":
    sys.exit(main())
