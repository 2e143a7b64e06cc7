"""Command-line interface.

Commands: ``bounds``, ``generate``, ``simulate``, ``analyze``, ``verify``.
Exit codes: 0 success / equilibrium, 1 input error, 2 non-convergence or
failed verification, 3 enumeration budget exceeded.  All output is
deterministic for identical invocations.  The environment variable
``BAG_ENUM_BUDGET`` overrides the default profile enumeration cap.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import analysis, bounds, constructions, dynamics, io, model

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NO_CONVERGENCE = 2
EXIT_BUDGET = 3


def _round4(x: float) -> float:
    """Round half away from zero to 4 decimals, for table output."""
    scaled = abs(x) * 10_000.0
    out = int(scaled + 0.5) / 10_000.0
    return -out if x < 0 else out


def _parse_range(spec: str) -> list[float]:
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError(f"range must be start:stop:step, got {spec!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0 or stop < start:
        raise ValueError(f"bad range {spec!r}")
    n = int((stop - start) / step + 0.5)
    values = [round(start + i * step, 12) for i in range(n + 1)]
    return [v for v in values if v <= stop + 1e-12]


def _cmd_bounds(args: argparse.Namespace) -> int:
    if args.table:
        deltas = _parse_range(args.table)
    elif args.delta is not None:
        deltas = [args.delta]
    else:
        print("bounds: provide --delta or --table", file=sys.stderr)
        return EXIT_INPUT
    rows = []
    for d in deltas:
        if d <= 0:
            print(f"bounds: delta must be positive, got {d}", file=sys.stderr)
            return EXIT_INPUT
        try:
            t = bounds.thresholds(d)
        except ValueError as exc:
            print(f"bounds: {exc}", file=sys.stderr)
            return EXIT_INPUT
        rows.append((d, t.alpha_upper, t.alpha_lower))
    if args.table:
        print("delta alpha_upper alpha_lower")
        for d, up, lo in rows:
            print(f"{d:g} {_round4(up):.4f} {_round4(lo):.4f}")
    else:
        for _, up, lo in rows:
            print(f"{_round4(up):.4f} {_round4(lo):.4f}")
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fp:
            fp.write("delta,alpha_upper,alpha_lower\n")
            for d, up, lo in rows:
                fp.write(f"{d!r},{up!r},{lo!r}\n")
    return EXIT_OK


def _cmd_generate(args: argparse.Namespace) -> int:
    try:
        if args.family == "b0":
            game = constructions.build_b0(
                args.delta, args.gamma, args.sigma, args.n_aux
            )
            echo = (
                f"b0 delta={args.delta:g} gamma={args.gamma:g} "
                f"players={game.n_players} resources={game.n_resources}"
            )
        elif args.family == "x3c":
            instance = io.load_x3c(args.instance)
            game = constructions.build_x3c_game(
                instance, args.delta, args.alpha, gamma=args.gamma
            )
            echo = (
                f"x3c m={instance.m} q={instance.q} delta={args.delta:g} "
                f"alpha={args.alpha:g} players={game.n_players} "
                f"resources={game.n_resources}"
            )
        elif args.family == "poa":
            game = constructions.build_poa_game(
                args.delta, args.alpha, args.n1, args.n2
            )
            echo = (
                f"poa delta={args.delta:g} alpha={args.alpha:g} n1={args.n1} "
                f"n2={args.n2} players={game.n_players} resources={game.n_resources}"
            )
        else:
            game = constructions.random_game(
                args.seed, args.players, args.resources,
                args.strategies, args.delta, args.density,
            )
            echo = (
                f"random seed={args.seed} players={game.n_players} "
                f"resources={game.n_resources} strategies={args.strategies} "
                f"delta={args.delta:g} density={args.density:g}"
            )
    except (constructions.ConstructionError, io.GameFileError, OSError) as exc:
        print(f"generate: {exc}", file=sys.stderr)
        return EXIT_INPUT
    io.save_game(game, args.out)
    print(echo)
    return EXIT_OK


def _load_checked(path: str) -> model.Game:
    try:
        return io.load_game(path)
    except io.GameFileError as exc:
        print(f"invalid game file: {exc}", file=sys.stderr)
        for v in exc.violations:
            print(f"  {v}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)
    except OSError as exc:
        print(f"cannot read game file: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _parse_profile(game: model.Game, raw: str | None) -> model.Profile:
    if raw is None:
        return (0,) * game.n_players
    try:
        return model.validate_profile(
            game, [int(tok) for tok in raw.split(",") if tok != ""]
        )
    except ValueError as exc:
        print(f"bad profile: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _cmd_simulate(args: argparse.Namespace) -> int:
    game = _load_checked(args.game)
    initial = _parse_profile(game, args.initial)
    try:
        config = dynamics.DynamicsConfig(
            alpha=args.alpha,
            scheduler=args.scheduler,
            seed=args.seed,
            max_steps=args.max_steps,
        )
    except ValueError as exc:
        print(f"simulate: {exc}", file=sys.stderr)
        return EXIT_INPUT
    trace = dynamics.run_dynamics(game, initial, config)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fp:
            dynamics.write_trace_csv(trace, fp)
    final = trace.final_profile
    print(f"terminal: {trace.terminal}")
    print(f"steps: {trace.step_count}")
    print(f"final_profile: {','.join(str(c) for c in final)}")
    print(f"final_welfare: {model.social_welfare(game, final)!r}")
    print(f"final_potential: {model.potential(game, final).total!r}")
    return EXIT_OK if trace.terminal == dynamics.TERMINAL_EQUILIBRIUM else EXIT_NO_CONVERGENCE


def _cmd_analyze(args: argparse.Namespace) -> int:
    game = _load_checked(args.game)
    try:
        alphas = [float(tok) for tok in args.alpha.split(",") if tok != ""]
    except ValueError as exc:
        print(f"bad alpha list: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        report = analysis.full_report(game, alphas)
    except analysis.EnumerationBudgetError as exc:
        print(f"analyze: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    payload = json.dumps(io.report_to_dict(report), indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fp:
            fp.write(payload + "\n")
    print(payload)
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    game = _load_checked(args.game)
    profile = _parse_profile(game, args.profile)
    ok, witness = analysis.is_alpha_ne(game, profile, args.alpha)
    if ok:
        print(f"equilibrium: yes (alpha={args.alpha:g})")
        return EXIT_OK
    print(
        f"equilibrium: no (alpha={args.alpha:g}); player {witness.player} "
        f"improves to strategy {witness.strategy} with ratio {witness.ratio!r}"
    )
    return EXIT_NO_CONVERGENCE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bagsim",
        description="Bandwidth allocation games: thresholds, dynamics, analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="existence threshold values")
    p.add_argument("--delta", type=float, help="single share bound")
    p.add_argument("--table", help="delta range start:stop:step")
    p.add_argument("--csv", help="also write full-precision CSV to this path")
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("generate", help="write a game file for a family")
    fam = p.add_subparsers(dest="family", required=True)

    f = fam.add_parser("b0", help="equilibrium-free swap family")
    f.add_argument("--delta", type=float, required=True)
    f.add_argument("--gamma", type=float, required=True)
    f.add_argument("--sigma", type=float, default=None)
    f.add_argument("--n-aux", dest="n_aux", type=int, default=None)
    f.add_argument("--out", required=True)
    f.set_defaults(func=_cmd_generate)

    f = fam.add_parser("x3c", help="exact-cover encoding")
    f.add_argument("--instance", required=True, help="JSON instance file")
    f.add_argument("--delta", type=float, required=True)
    f.add_argument("--alpha", type=float, required=True)
    f.add_argument("--gamma", type=float, default=None)
    f.add_argument("--out", required=True)
    f.set_defaults(func=_cmd_generate)

    f = fam.add_parser("poa", help="near-worst-welfare stable family")
    f.add_argument("--delta", type=float, required=True)
    f.add_argument("--alpha", type=float, required=True)
    f.add_argument("--n1", type=int, required=True)
    f.add_argument("--n2", type=int, required=True)
    f.add_argument("--out", required=True)
    f.set_defaults(func=_cmd_generate)

    f = fam.add_parser("random", help="seeded random game")
    f.add_argument("--seed", type=int, required=True)
    f.add_argument("--players", type=int, required=True)
    f.add_argument("--resources", type=int, required=True)
    f.add_argument("--strategies", type=int, required=True)
    f.add_argument("--delta", type=float, required=True)
    f.add_argument("--density", type=float, default=0.5)
    f.add_argument("--out", required=True)
    f.set_defaults(func=_cmd_generate)

    p = sub.add_parser("simulate", help="run improvement dynamics on a game file")
    p.add_argument("game")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--scheduler", choices=dynamics.SCHEDULERS, default="round-robin")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-steps", dest="max_steps", type=int, default=10_000)
    p.add_argument("--initial", help="comma-separated strategy indices (default all 0)")
    p.add_argument("--trace", help="write the step trace as CSV to this path")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("analyze", help="brute-force report for a game file")
    p.add_argument("game")
    p.add_argument("--alpha", required=True, help="comma-separated factors")
    p.add_argument("--out", help="also write the JSON report to this path")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("verify", help="check one profile at one factor")
    p.add_argument("game")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--profile", help="comma-separated strategy indices (default all 0)")
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:  # from _load_checked / _parse_profile
        code = exc.code
        return code if isinstance(code, int) else EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
