"""Command-line entry point: ``seqspace {norm,criteria,verify,construct}``.

Exit codes: 0 success, 1 a verification assertion failed, 2 parse error,
3 precondition violated, 4 every requested criterion inconclusive.
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
from pathlib import Path

from . import literals as lit
from . import marcinkiewicz as mz
from . import orlicz as oz
from . import suites
from . import weights as W
from .errors import HypothesisViolated, LiteralParseError, PreconditionError
from .report import INCONCLUSIVE, dumps, jsonable
from .seqvec import IndexSetSpec, interleave_map

log = logging.getLogger("seqspace")

EXIT_OK, EXIT_FAILED, EXIT_PARSE, EXIT_PRECONDITION, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4
OUTPUT_DIR_ENV = "SEQSPACE_OUTPUT_DIR"
SPACES = ("marcinkiewicz", "lorentz1", "lorentzinf", "orlicz", "musielak", "linf")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise LiteralParseError(message)


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number")
    if not v > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--tol", type=_positive_float, help="verdict tolerance (module default if omitted)")
    g.add_argument("--kmax", type=_positive_int, help="truncation index K / k_max")
    g.add_argument("--nmax", type=_positive_int, help="largest n probed by the S-criterion")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--format", choices=("json", "csv", "text"), default="json")
    g.add_argument("--output", help=f"output file (relative paths resolve against ${OUTPUT_DIR_ENV})")
    g.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="seqspace", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("norm", parents=[common], help="evaluate a norm of a finitely supported vector")
    p.add_argument("--space", choices=SPACES, required=True)
    p.add_argument("--weight", help="weight literal (marcinkiewicz, lorentz1, lorentzinf)")
    p.add_argument("--weight-role", choices=("s", "w"),
                   help="whether the literal gives s (primitive) or w (derivative); "
                        "defaults to what the space uses")
    p.add_argument("--fn", action="append", help="Orlicz literal; repeat for a cycled Musielak sequence")
    p.add_argument("--vec", required=True, help="vector file (JSON or 'index value' lines), '-' or inline values")

    p = sub.add_parser("criteria", parents=[common], help="weight or Orlicz-function criteria")
    tgt = p.add_mutually_exclusive_group(required=True)
    tgt.add_argument("--weight", help="weight literal, read as s")
    tgt.add_argument("--orliczfn", help="Orlicz literal")

    p = sub.add_parser("verify", parents=[common], help="run a randomized verification suite")
    p.add_argument("--suite", choices=list(suites.SUITES) + ["all"], default="all")
    p.add_argument("--scale", action="append", help="key=value overrides, e.g. J=200 or n=100")

    p = sub.add_parser("construct", parents=[common], help="build a block family or an interleave map")
    p.add_argument("what", choices=("blockfamily", "interleavemap"))
    p.add_argument("--weight", help="weight literal for blockfamily (used as w)")
    p.add_argument("--blocks", help="blockfamily: number of blocks; interleavemap: '1,3;2'")
    p.add_argument("--len", type=_positive_int, help="coordinates per block (J)")
    p.add_argument("--scheme", choices=mz.SCHEMES, default="column-major")
    p.add_argument("--targets", help="interleavemap targets, e.g. 'odd;even' or 'mult:3;prog:1,3'")
    return parser


# -- commands -----------------------------------------------------------------


def _weight_for(literal: str | None, role: str | None, needed: str) -> W.Weight:
    if not literal:
        raise LiteralParseError("--weight is required for this space")
    w = lit.parse_weight(literal)
    role = role or needed
    if role == needed:
        return w
    return W.primitive(w) if needed == "s" else W.discrete_derivative(w)


def cmd_norm(args) -> tuple[dict, int]:
    f = lit.parse_vector(args.vec)
    params: dict = {}
    space = args.space
    if space == "marcinkiewicz":
        s = _weight_for(args.weight, args.weight_role, "s")
        params["weight"] = s.label
        value = mz.m_norm(f, s)
    elif space in ("lorentz1", "lorentzinf"):
        w = _weight_for(args.weight, args.weight_role, "w")
        params["weight"] = w.label
        value = (mz.lorentz_d1_norm if space == "lorentz1" else mz.lorentz_dinf_norm)(f, w)
    elif space in ("orlicz", "musielak"):
        if not args.fn:
            raise LiteralParseError("--fn is required for this space")
        fns = [lit.parse_orlicz(x) for x in args.fn]
        if space == "orlicz" and len(fns) != 1:
            raise LiteralParseError("--space orlicz takes exactly one --fn")
        params["fn"] = [M.label for M in fns] if space == "musielak" else fns[0].label
        target = oz.MusielakSequence(fns) if space == "musielak" else fns[0]
        value = oz.luxemburg_norm(target, f, rtol=args.tol or 1e-13)
    else:
        value = f.sup_norm()
    return {"space": space, "params": params, "norm": value, "support_size": len(f)}, EXIT_OK


def _criteria_weight(args) -> dict:
    s = lit.parse_weight(args.weight)
    w = W.discrete_derivative(s)
    K = args.kmax or 10_000
    n_max, k_max = args.nmax or 64, args.kmax or 100_000
    band = {"band": args.tol} if args.tol else {}
    runs = {
        "w_class": lambda: W.w_class_check(w, K=K),
        "regular": lambda: W.is_regular(w, K=K),
        "lrp": lambda: W.has_lrp(s, K=K),
        "derivative_essentially_decreasing": lambda: W.essentially_monotone(w, "decreasing", K=K),
        "s_criterion": lambda: W.s_criterion(s, n_max=n_max, k_max=k_max, **band),
        "lechner": lambda: mz.lechner_verdict_marcinkiewicz(s, n_max=n_max, k_max=k_max),
    }
    return {"target": "weight", "literal": args.weight, "label": s.label, "runs": runs}


def _criteria_orlicz(args) -> dict:
    M = lit.parse_orlicz(args.orliczfn)
    margin = {"margin": args.tol} if args.tol else {}
    runs = {
        "delta2_at_zero": lambda: oz.delta2_at_zero(M),
        "indices": lambda: oz.indices_estimate(M),
        "lechner": lambda: oz.lechner_verdict_orlicz(M, **margin),
    }
    return {"target": "orliczfn", "literal": args.orliczfn, "label": M.label, "runs": runs}


def cmd_criteria(args) -> tuple[dict, int]:
    spec = _criteria_weight(args) if args.weight else _criteria_orlicz(args)
    reports, errors = {}, {}
    for name, run in spec.pop("runs").items():
        try:
            reports[name] = run()
        except PreconditionError as exc:
            errors[name] = {"error": type(exc).__name__, "message": str(exc),
                            "hypothesis": getattr(exc, "hypothesis", None)}
    doc = {**spec, "reports": reports, "errors": errors}
    verdicts = [r.verdict for r in reports.values() if hasattr(r, "verdict")]
    if errors:
        first = next(iter(errors.values()))
        log.error("precondition violated: %s", first["message"])
        return doc, EXIT_PRECONDITION
    if verdicts and all(v == INCONCLUSIVE for v in verdicts):
        return doc, EXIT_INCONCLUSIVE
    return doc, EXIT_OK


def cmd_verify(args) -> tuple[dict, int]:
    scale = lit.parse_scale(args.scale)
    if args.kmax:
        scale.setdefault("kmax", args.kmax)
    results = suites.run(args.suite, seed=args.seed, scale=scale, tol=args.tol)
    doc = {"suite": args.suite, "seed": args.seed,
           "passed": sum(r.passed for r in results), "failed": sum(not r.passed for r in results),
           "results": [r.to_dict() for r in results]}
    for r in results:
        log.info("%s: %d checks, %d failed", r.suite, r.checks, r.failed)
    return doc, EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


def _parse_blocks(text: str) -> list[IndexSetSpec]:
    blocks = lit.parse_index_sets(text)
    seen: list[int] = []
    for b in blocks:
        if b.kind != "explicit":
            raise LiteralParseError("blocks must be explicit index lists")
        seen.extend(b.values)
    if sorted(seen) != list(range(1, len(seen) + 1)):
        raise LiteralParseError(f"blocks {text!r} do not partition 1..{len(seen)}")
    return blocks


def cmd_construct(args) -> tuple[dict, int]:
    if args.what == "blockfamily":
        if not args.blocks or not args.len:
            raise LiteralParseError("blockfamily needs --blocks N and --len J")
        try:
            n_blocks = int(args.blocks)
        except ValueError as exc:
            raise LiteralParseError("--blocks must be an integer for blockfamily") from exc
        if n_blocks < 1:
            raise LiteralParseError("--blocks must be >= 1")
        w = _weight_for(args.weight, None, "w")
        fam = mz.block_family(w, n_blocks, args.len, args.scheme)
        return {"kind": "blockfamily", **fam.to_json_obj()}, EXIT_OK
    if not args.blocks or not args.targets:
        raise LiteralParseError("interleavemap needs --blocks and --targets")
    blocks = _parse_blocks(args.blocks)
    targets = lit.parse_index_sets(args.targets)
    phi = interleave_map(blocks, targets)
    return {"kind": "interleavemap", "blocks": args.blocks, "targets": args.targets,
            **phi.to_json_obj()}, EXIT_OK


COMMANDS = {"norm": cmd_norm, "criteria": cmd_criteria, "verify": cmd_verify,
            "construct": cmd_construct}


# -- output -------------------------------------------------------------------


def _flatten(obj, prefix: str = "") -> list[tuple[str, object]]:
    if isinstance(obj, dict):
        out = []
        for k in sorted(obj):
            out += _flatten(obj[k], f"{prefix}.{k}" if prefix else str(k))
        return out
    if isinstance(obj, list):
        out = []
        for i, v in enumerate(obj):
            out += _flatten(v, f"{prefix}[{i}]")
        return out
    return [(prefix, obj)]


def render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps(doc) + "\n"
    rows = _flatten(jsonable(doc))
    if fmt == "text":
        return "".join(f"{k}: {v}\n" for k, v in rows)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["key", "value"])
    writer.writerows(rows)
    return buf.getvalue()


def _output_path(args) -> Path | None:
    base = os.environ.get(OUTPUT_DIR_ENV)
    if args.output:
        path = Path(args.output)
        return Path(base) / path if base and not path.is_absolute() else path
    if base:
        return Path(base) / f"{args.command}.{args.format}"
    return None


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except LiteralParseError as exc:
        print(f"seqspace: error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="seqspace: %(levelname)s: %(message)s")
    try:
        doc, code = COMMANDS[args.command](args)
    except LiteralParseError as exc:
        print(f"seqspace: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except HypothesisViolated as exc:
        print(f"seqspace: precondition violated ({exc.hypothesis}): {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except PreconditionError as exc:
        print(f"seqspace: precondition violated ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    text = render(doc, args.format)
    path = _output_path(args)
    if path is None:
        sys.stdout.write(text)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        log.info("wrote %s", path)
    return code


if __name__ == "__main__":
    sys.exit(main())
