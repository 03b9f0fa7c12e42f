"""Command-line entry point.

Exit codes: 0 success, 1 bad input, 2 validation failure, 3 no decomposition.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import formats
from .discrete import MAX_CELLS, to_mask
from .errors import InvalidTD, KTreeLearnError, NoDecomposition
from .estimation import EstimatorBudget
from .modelgen import GeneratorSpec, draw_samples, generate_model, measure_alpha
from .projection import LearnConfig, learn, materialize, project, projection_divergence, projection_kl
from .submodular import SetFunctionOracle, brute_force_minimize, queyranne_minimize
from .treedecomp import validate_td

EXIT_OK, EXIT_INPUT, EXIT_INVALID, EXIT_NO_TD = 0, 1, 2, 3


def num(x: float) -> str:
    return format(float(x), ".15g")


def _positive(kind):
    def parse(text):
        value = kind(text)
        if value <= 0:
            raise argparse.ArgumentTypeError(f"expected a positive value, got {text}")
        return value

    return parse


def _nonneg_float(text):
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative value, got {text}")
    return value


def _cmd_learn(args) -> int:
    text = formats.read_text(args.input)
    source = formats.parse_distribution(text) if args.mode == "exact" else formats.parse_samples(text)
    cfg = LearnConfig(
        k=args.k,
        eps=args.epsilon,
        delta=args.delta,
        alpha=args.alpha,
        eps1_override=args.eps1_override,
        eps2_override=args.eps2_override,
    )
    if args.verbose:
        tol = cfg.derive(source.n, exact=args.mode == "exact")
        print(
            f"# eps1={num(tol.eps1)} eps2={num(tol.eps2)} delta1={num(tol.delta1)} "
            f"threshold={num(tol.threshold(source.n))}",
            file=sys.stderr,
        )
        if args.mode == "samples" and tol.eps1 > 0 and tol.delta1 < 1:
            budget = EstimatorBudget.for_problem(source.n, max(source.cards), tol.eps1, tol.delta1)
            print(f"# samples={source.m} required={budget.m}", file=sys.stderr)
    result = learn(source, cfg)
    if args.out_td:
        formats.write_text(args.out_td, formats.format_td(result.td))
    if args.out_dist:
        if source.vars.size <= MAX_CELLS:
            formats.write_text(args.out_dist, formats.format_distribution(materialize(result.model)))
    if args.out_family:
        formats.write_text(args.out_family, result.family.dump())
    print(
        f"kl={num(result.kl)} divergence={num(result.divergence)} "
        f"width={result.td.width} bags={len(result.td.bags)}"
    )
    return EXIT_OK


def _cmd_project(args) -> int:
    P = formats.parse_distribution(formats.read_text(args.dist))
    td = formats.parse_td(formats.read_text(args.td))
    kl = projection_kl(P, td)
    divergence = projection_divergence(P, td)
    if args.out_dist:
        formats.write_text(args.out_dist, formats.format_distribution(materialize(project(P, td))))
    print(f"kl={num(kl)} divergence={num(divergence)}")
    return EXIT_OK


def _cmd_minimize(args) -> int:
    n, values = formats.parse_oracle_table(formats.read_text(args.oracle_file))

    def fn(A):
        mask = to_mask(A)
        if mask not in values:
            raise KTreeLearnError(f"oracle file has no value for mask {mask}")
        return values[mask]

    f = SetFunctionOracle(range(n), fn)
    res = brute_force_minimize(f) if args.brute_force else queyranne_minimize(f)
    print("set={" + ",".join(map(str, res.set)) + "} value=" + num(res.value))
    return EXIT_OK


def _cmd_validate_td(args) -> int:
    td = formats.parse_td(formats.read_text(args.td))
    if args.dist:
        n = formats.parse_distribution(formats.read_text(args.dist)).n
    elif args.n is not None:
        n = args.n
    else:
        n = max(td.vertices) + 1
    validate_td(td, range(n))
    print(f"ok width={td.width} bags={len(td.bags)}")
    return EXIT_OK


def _cmd_gen_model(args) -> int:
    spec = GeneratorSpec(args.n, args.k, args.seed, args.card, args.strength)
    gm = generate_model(spec, min_alpha=args.min_alpha)
    formats.write_text(args.out_dist, formats.format_distribution(gm.dist))
    formats.write_text(args.out_td, formats.format_td(gm.td))
    print(f"alpha={num(gm.alpha)} width={gm.td.width} bags={len(gm.td.bags)} attempts={gm.attempts}")
    return EXIT_OK


def _cmd_sample(args) -> int:
    P = formats.parse_distribution(formats.read_text(args.dist))
    formats.write_text(args.out, formats.format_samples(draw_samples(P, args.m, args.seed)))
    return EXIT_OK


def _cmd_measure_alpha(args) -> int:
    P = formats.parse_distribution(formats.read_text(args.dist))
    td = formats.parse_td(formats.read_text(args.td))
    print(f"alpha={num(measure_alpha(P, td))}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ktreelearn", description="Learn bounded tree-width graphical models.")
    sub = p.add_subparsers(dest="command", required=True)

    lp = sub.add_parser("learn", help="learn a width-k decomposition and its projected model")
    lp.add_argument("--input", required=True, help="distribution file (exact) or sample file (samples)")
    lp.add_argument("--mode", choices=("exact", "samples"), default="exact")
    lp.add_argument("--k", type=_positive(int), required=True)
    lp.add_argument("--epsilon", type=_positive(float), required=True)
    lp.add_argument("--delta", type=_positive(float), required=True)
    lp.add_argument("--alpha", type=_positive(float))
    lp.add_argument("--eps1-override", type=_nonneg_float)
    lp.add_argument("--eps2-override", type=_nonneg_float)
    lp.add_argument("--out-td")
    lp.add_argument("--out-dist")
    lp.add_argument("--out-family")
    lp.add_argument("--verbose", action="store_true")
    lp.set_defaults(func=_cmd_learn)

    pp = sub.add_parser("project", help="KL divergence to the projection onto a decomposition")
    pp.add_argument("--dist", required=True)
    pp.add_argument("--td", required=True)
    pp.add_argument("--out-dist")
    pp.set_defaults(func=_cmd_project)

    mp = sub.add_parser("minimize", help="minimize a symmetric submodular function given as a table")
    mp.add_argument("--oracle-file", required=True)
    mp.add_argument("--brute-force", action="store_true")
    mp.set_defaults(func=_cmd_minimize)

    vp = sub.add_parser("validate-td", help="check a tree-decomposition file")
    vp.add_argument("--td", required=True)
    vp.add_argument("--n", type=_positive(int))
    vp.add_argument("--dist")
    vp.set_defaults(func=_cmd_validate_td)

    gp = sub.add_parser("gen-model", help="random k-tree and a distribution factorizing over it")
    gp.add_argument("--n", type=_positive(int), required=True)
    gp.add_argument("--k", type=_positive(int), required=True)
    gp.add_argument("--seed", type=int, default=0)
    gp.add_argument("--card", type=int, default=2)
    gp.add_argument("--strength", type=float, default=0.3)
    gp.add_argument("--min-alpha", type=_nonneg_float, default=0.0)
    gp.add_argument("--out-dist", required=True)
    gp.add_argument("--out-td", required=True)
    gp.set_defaults(func=_cmd_gen_model)

    sp = sub.add_parser("sample", help="draw i.i.d. samples from a distribution file")
    sp.add_argument("--dist", required=True)
    sp.add_argument("--m", type=_positive(int), required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_sample)

    ap = sub.add_parser("measure-alpha", help="strong-connectivity floor of a model over its decomposition")
    ap.add_argument("--dist", required=True)
    ap.add_argument("--td", required=True)
    ap.set_defaults(func=_cmd_measure_alpha)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except NoDecomposition as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_TD
    except InvalidTD as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (KTreeLearnError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
