"""Command line front end.

Exit codes for ``analyze`` and ``classify``: 0 subnormal, 1 not subnormal,
2 inconclusive. ``verify``, ``matrix`` and ``sequence`` return 0 when every check passes
and 1 otherwise. Unreadable or malformed input gives 3, a rejected
construction or failed computation gives 4.
"""
from __future__ import annotations

import argparse
import os
import sys

from . import io
from .base import ParseError, fmt
from .classify import classify_space
from .consistency import (
    Family,
    MassOverflow,
    SpecViolation,
    Status,
    decide_subnormal_discrete,
    generate_fixed_point_example,
    verify_cc,
    verify_moment_identity,
    verify_scc,
)
from .lifting import build_lift, lift_to_json, verify_lift_derivative, verify_lift_quasinormal
from .matsym import AtomBudgetExceeded, sample_points, verify_matrix_scc
from .moments import AtomicMeasure, carleman_determinate, representing_measure_window, stieltjes_witness
from .mspace import derivative_table
from .trees import (
    BoundaryIncomplete,
    SizeOverflow,
    WindowExceeded,
    materialize_tree,
    regular_weighted_tree,
    shift_to_composition,
    tree_subnormal,
)

EXIT_BY_STATUS = {Status.SUBNORMAL: 0, Status.NOT_SUBNORMAL: 1, Status.INCONCLUSIVE: 2}
DOMAIN_ERRORS = (
    SpecViolation,
    MassOverflow,
    AtomBudgetExceeded,
    SizeOverflow,
    WindowExceeded,
    BoundaryIncomplete,
    ArithmeticError,
)


def atom_budget() -> int:
    raw = os.environ.get("SUBNORM_ATOM_BUDGET", "10000")
    try:
        return int(raw)
    except ValueError:
        raise ParseError(f"SUBNORM_ATOM_BUDGET must be an integer, got {raw!r}") from None


def emit(report: dict, fmt_name: str) -> None:
    if fmt_name == "json":
        print(io.dumps(report))
        return
    for key in sorted(report):
        value = report[key]
        if isinstance(value, (dict, list)):
            value = io.dumps(value).replace("\n", "\n  ")
        print(f"{key}: {value}")


def _load_space(args):
    doc = io.load_json(args.space)
    map_doc = io.load_json(args.map) if getattr(args, "map", None) else None
    return doc, *io.space_from_json(doc, map_doc)


def cmd_analyze(args) -> int:
    _, space, phi = _load_space(args)
    verdict = decide_subnormal_discrete(space, phi, args.depth)
    report = verdict.as_dict()
    if args.certificate and verdict.family is not None:
        with open(args.certificate, "w") as fh:
            fh.write(io.dumps(io.family_to_json(verdict.family)) + "\n")
    emit(report, args.format)
    return EXIT_BY_STATUS[verdict.status]


def cmd_classify(args) -> int:
    _, space, phi = _load_space(args)
    rows = []
    worst = Status.SUBNORMAL
    for comp, verdict in classify_space(space, phi, args.depth, args.bilateral):
        rows.append({"kind": comp.kind.value, "points": list(comp.points), "verdict": verdict.as_dict()})
        if verdict.status is Status.NOT_SUBNORMAL:
            worst = Status.NOT_SUBNORMAL
        elif verdict.status is Status.INCONCLUSIVE and worst is Status.SUBNORMAL:
            worst = Status.INCONCLUSIVE
    emit({"components": rows, "window": {"depth": args.depth}}, args.format)
    return EXIT_BY_STATUS[worst]


def cmd_verify(args) -> int:
    doc, space, phi = _load_space(args)
    family = io.family_from_json(io.load_json(args.family) if args.family else doc)
    table = derivative_table(space, phi, args.depth)
    checks = {
        "cc": verify_cc(space, phi, family),
        "moment_identity": verify_moment_identity(space, phi, family, table),
    }
    if args.scc:
        checks["scc"] = verify_scc(space, phi, family)
    report = {"checks": {}, "window": {"depth": args.depth, "truncated": phi.truncated}}
    if args.lift:
        product = build_lift(space, phi, family)
        checks["lift_derivative"] = verify_lift_derivative(product)
        checks["lift_quasinormal"] = verify_lift_quasinormal(product)
        report["lift"] = lift_to_json(product)
    report["checks"] = {k: v.as_dict() for k, v in checks.items()}
    emit(report, args.format)
    return 0 if all(checks.values()) else 1


def _bundle(space, phi, family, extra: dict) -> dict:
    out = io.space_to_json(space, phi)
    out.update(io.family_to_json(family))
    out.update(extra)
    return out


def cmd_construct(args) -> int:
    spec = io.load_json(args.spec)
    kind = spec.get("kind")
    if kind == "fixed_point":
        theta = io.measure_from_json(spec["theta"], "theta")
        depth = int(spec.get("depth", args.depth))
        ex = generate_fixed_point_example(theta, io.parse_number(spec["mu1"], "mu1"), depth)
        extra = {
            "expected": {f"{n},{k}": fmt(v) for (n, k), v in sorted(ex.expected.items())},
            "norm_squared": fmt(ex.norm_squared),
            "epsilon": fmt(ex.epsilon),
            "window": {"depth": depth},
        }
        report = _bundle(ex.space, ex.map, ex.family, extra)
    elif kind == "tree":
        profile = io.profile_from_json(spec["profile"])
        verdict = tree_subnormal(profile)
        if verdict.status is not Status.SUBNORMAL:
            emit(verdict.as_dict(), args.format)
            return EXIT_BY_STATUS[verdict.status]
        sl = materialize_tree(profile, int(spec.get("depth", 3)), int(spec.get("anchor", 0)))
        family = sl.family(verdict.notes["generations"])
        nu = verdict.notes["nu"]
        extra = {
            "nu": io.measure_to_json(nu),
            "generation": {str(v): m for v, m in sorted(sl.generation.items())},
            "window": {"m_lo": profile.m_lo, "m_hi": profile.m_hi},
        }
        report = _bundle(sl.space, sl.map, family, extra)
    elif kind == "shift":
        tree = regular_weighted_tree(
            int(spec["branching"]), int(spec["depth"]), io.parse_number(spec["lambda2"], "lambda2")
        )
        space, phi = shift_to_composition(tree)
        atom = io.parse_number(spec.get("atom", "1"), "atom")
        family = Family({v: AtomicMeasure.dirac(atom) for v in space.points})
        report = _bundle(space, phi, family, {"window": {"depth": int(spec["depth"])}})
    else:
        raise ParseError(f"unknown construction kind {kind!r}")
    emit(report, args.format)
    return 0


def cmd_matrix(args) -> int:
    symbol = io.symbol_from_json(io.load_json(args.symbol))
    density = io.density_from_json(io.load_json(args.density))
    if not symbol.exact and args.tolerance is not None:
        symbol = type(symbol)(
            symbol.dim, symbol.eigenvalues, symbol.basis, symbol.complex_linear, args.tolerance
        )
    samples = sample_points(symbol.dim, args.samples)
    check = verify_matrix_scc(symbol, density, samples, atom_budget())
    report = {
        "scc": check.as_dict(),
        "samples": [[fmt(c) for c in x] for x in samples],
        "exact": symbol.exact,
        "window": {"samples": args.samples, "tolerance": symbol.tolerance},
    }
    emit(report, args.format)
    return 0 if check else 1


def cmd_sequence(args) -> int:
    values = io.sequence_from_json(io.load_json(args.sequence))
    if args.window is not None:
        values = values[: args.window]
    witness = stieltjes_witness(values)
    report = {"stieltjes": witness is None, "window": {"length": len(values)}}
    if witness is not None:
        report["witness"] = witness
    else:
        measure = representing_measure_window(values)
        report["measure"] = io.measure_to_json(measure) if measure is not None else None
        report["carleman"] = carleman_determinate(values)
    emit(report, args.format)
    return 0 if witness is None else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subnormal", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--depth", type=int, default=12, help="highest iterate examined")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="decide subnormality of a discrete system")
    p.add_argument("space")
    p.add_argument("--map", help="separate file holding the map")
    p.add_argument("--certificate", help="write the certifying family here")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("classify", parents=[common], help="orbit types of an injective map")
    p.add_argument("space")
    p.add_argument("--map")
    p.add_argument("--bilateral", action="store_true", help="treat cut chains as two-sided")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("verify", parents=[common], help="check a family of measures")
    p.add_argument("space")
    p.add_argument("family", nargs="?", help="defaults to the measures inside SPACE")
    p.add_argument("--map")
    p.add_argument("--lift", action="store_true", help="also check the lifted system")
    p.add_argument("--scc", action="store_true", help="also check the strong condition")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("construct", parents=[common], help="build a system from a recipe")
    p.add_argument("spec")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("matrix", parents=[common], help="check a matrix symbol at sample points")
    p.add_argument("symbol")
    p.add_argument("density")
    p.add_argument("--samples", type=int, default=4)
    p.add_argument("--tolerance", type=float)
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("sequence", parents=[common], help="window tests for a moment sequence")
    p.add_argument("sequence")
    p.add_argument("--window", type=int, help="use only the first W entries")
    p.set_defaults(func=cmd_sequence)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, OSError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except DOMAIN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

