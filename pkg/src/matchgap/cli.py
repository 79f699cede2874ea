"""Command-line interface.

Subcommands:

* ``gen``     - write instance files (worst-case family or random metric);
* ``run``     - run a pipeline on an instance and emit its report;
* ``verify``  - randomized verification suites (exit code gates CI);
* ``report``  - the worst-case ratio experiment: CSV + JSON tables and a
                rendered figure, written side by side into a directory.

Exit codes: 0 on success/pass, 1 on verification or bound failure,
2 on usage errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import MatchgapError
from .instances import (gen_random_metric, gen_worst_case_family,
                        parse_instance, serialize_instance)
from .rational import parse_rat
from .reports import (build_run_report, ratio_points_to_csv,
                      ratio_points_to_json, render_ratio_figure,
                      worst_case_ratio_experiment, RATIO_TARGET)
from .twomo import ALPHA_DEFAULT
from .verify import (verify_np_bound, verify_oracles, verify_polytopes,
                     verify_ratios)

USAGE_ERROR = 2


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _cmd_gen(args: argparse.Namespace) -> int:
    if args.kind == "worstcase":
        if args.ell is None or args.ell < 1:
            print("gen worstcase: --ell must be a positive integer",
                  file=sys.stderr)
            return USAGE_ERROR
        inst = gen_worst_case_family(args.ell).instance
    else:
        if args.n is None or args.n < 3:
            print("gen random: --n must be at least 3", file=sys.stderr)
            return USAGE_ERROR
        inst = gen_random_metric(args.n, args.seed)
    _write(args.out, serialize_instance(inst))
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        inst = parse_instance(Path(args.instance).read_text())
        alpha = parse_rat(args.alpha)
        report = build_run_report(inst, args.pipeline, alpha)
    except MatchgapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _write(args.out, report.to_csv() if args.format == "csv"
           else report.to_json())
    return 0 if report.all_passed() else 1


def _cmd_verify(args: argparse.Namespace) -> int:
    if args.suite == "oracles":
        outcome = verify_oracles(max_vertices=args.n or 12,
                                 trials=args.trials or 200, seed=args.seed)
    elif args.suite == "polytopes":
        n = args.n or 5
        if n > 6:
            print("verify polytopes: --n is capped at 6 (12 split nodes)",
                  file=sys.stderr)
            return USAGE_ERROR
        outcome = verify_polytopes(n=n, trials=args.trials or 20,
                                   seed=args.seed)
    elif args.suite == "ratios":
        outcome = verify_ratios(max_n=args.n or 9, trials=args.trials or 50,
                                seed=args.seed)
    else:
        outcome = verify_np_bound(trials=args.trials or 100, seed=args.seed,
                                  max_vertices=args.n or 14)
    print(outcome.summary())
    return 0 if outcome.passed else 1


def _cmd_report(args: argparse.Namespace) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    points = worst_case_ratio_experiment(args.points)
    (out_dir / "ratios.csv").write_text(ratio_points_to_csv(points))
    (out_dir / "ratios.json").write_text(ratio_points_to_json(points))
    render_ratio_figure(points, str(out_dir / "ratios.png"))
    ok = True
    for p in points:
        flag = "ok" if p.ratio <= RATIO_TARGET else "EXCEEDS 10/9"
        ok = ok and p.ratio <= RATIO_TARGET
        print(f"index {p.index}: n={p.n} path_length={p.path_length} "
              f"ratio={p.ratio.numerator}/{p.ratio.denominator} [{flag}]")
    print(f"wrote {out_dir}/ratios.csv, ratios.json, ratios.png")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matchgap",
        description="Exact 2-matching ratio certification toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an instance file")
    gen.add_argument("kind", choices=("worstcase", "random"))
    gen.add_argument("--ell", type=int, help="path length of the family")
    gen.add_argument("--n", type=int, help="vertex count (random)")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", default="-", help="output path (default stdout)")
    gen.set_defaults(func=_cmd_gen)

    run = sub.add_parser("run", help="run a pipeline and emit its report")
    run.add_argument("--instance", required=True)
    run.add_argument("--pipeline", default="all",
                     choices=("f2m", "subtour", "g2m43", "g2m109",
                              "boydcarr", "all"))
    run.add_argument("--alpha", default=str(ALPHA_DEFAULT),
                     help="scaling parameter (default 1/9)")
    run.add_argument("--format", default="json", choices=("json", "csv"))
    run.add_argument("--out", default="-")
    run.set_defaults(func=_cmd_run)

    verify = sub.add_parser("verify", help="randomized verification suites")
    verify.add_argument("suite",
                        choices=("oracles", "polytopes", "ratios", "npbound"))
    verify.add_argument("--n", type=int, help="size bound for the suite")
    verify.add_argument("--trials", type=int)
    verify.add_argument("--seed", type=int, default=0)
    verify.set_defaults(func=_cmd_verify)

    report = sub.add_parser(
        "report", help="worst-case ratio experiment: tables and figure")
    report.add_argument("--out-dir", required=True)
    report.add_argument("--points", type=int, default=5,
                        help="family members to evaluate (default 5)")
    report.set_defaults(func=_cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MatchgapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
