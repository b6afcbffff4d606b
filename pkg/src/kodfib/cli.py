"""Command line entry point: ``kodfib validate|coinv|verdict|cover|signature``.

Exit codes: 0 ok/unobstructed, 1 excluded, 2 schema error, 3 invariant
violation, 4 unobstructed with inconclusive checks, 5 unsupported on the
given content (declared block or restricted generating set).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .document import BuildError, as_generating_set_leaf, dumps, load
from .errors import (DeclaredBlockUnsupported, InvariantViolation, SchemaError,
                     UnsupportedOperation)
from .meyer import bundle_signature
from .monodromy import (BundleSpec, GeneratingSetRep, SymplecticRep, bundle_coinvariants,
                        restrict_to_cover, validate_rep)
from .obstructions import CheckConfig, Verdict, chern_invariants, verdict
from .surface import CyclicCoverSpec, parse_generator_name

EXIT_OK = 0
EXIT_EXCLUDED = 1
EXIT_SCHEMA = 2
EXIT_INVARIANT = 3
EXIT_INCONCLUSIVE = 4
EXIT_UNSUPPORTED = 5


class CommandError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _load(path: str) -> BundleSpec:
    try:
        return load(path)
    except OSError as exc:
        raise CommandError(EXIT_SCHEMA, f"cannot read {path}: {exc}") from exc
    except SchemaError as exc:
        raise CommandError(EXIT_SCHEMA, f"schema error: {exc}") from exc
    except (BuildError, InvariantViolation) as exc:
        raise CommandError(EXIT_INVARIANT, f"invariant violation: {exc}") from exc


def _emit(args, text: str, payload: dict):
    if args.output == "json":
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _sig_text(sig) -> str:
    if sig is None:
        return "unknown"
    if isinstance(sig, tuple):
        return f"[{sig[0]}, {sig[1]}]"
    return str(sig)


def _sig_json(sig):
    return list(sig) if isinstance(sig, tuple) else sig


def cmd_validate(args) -> int:
    bundle = _load(args.path)
    content = bundle.content
    lines = [f"ok: {bundle.provenance.op} document, fiber genus {bundle.fiber_genus}, "
             f"base genus {bundle.base_genus}"]
    if isinstance(content, (SymplecticRep, GeneratingSetRep)):
        report = validate_rep(content)
        if not report.ok:
            for f in report.failures:
                print(f"invariant violation: {f.message}", file=sys.stderr)
            return EXIT_INVARIANT
        if isinstance(content, GeneratingSetRep):
            lines.append("relator check skipped: validity inherited from the covered bundle")
    _emit(args, "\n".join(lines), {"valid": True, "kind": bundle.provenance.op,
                                   "fiber_genus": bundle.fiber_genus, "base_genus": bundle.base_genus})
    return EXIT_OK


def coinvariants_payload(bundle: BundleSpec) -> tuple[str, dict]:
    g, b = bundle.fiber_genus, bundle.base_genus
    if bundle.is_declared:
        block = bundle.content
        ranks = block.candidate_ranks()
        parity = {0: "even", 1: "odd"}.get(block.rank_parity, "unknown")
        s_values = sorted({g - r // 2 for r in ranks if r % 2 == 0})
        text = (f"declared: rank in [{block.rank_lo}, {block.rank_hi}] (parity {parity})\n"
                f"admissible ranks: {ranks}\n"
                f"s in {s_values}\n"
                f"b1 in [{2 * b + block.rank_lo}, {2 * b + block.rank_hi}]\n")
        return text, {"declared": True, "fiber_genus": g, "base_genus": b,
                      "rank_lo": block.rank_lo, "rank_hi": block.rank_hi, "rank_parity": parity,
                      "admissible_ranks": ranks, "s_values": s_values}
    rep = bundle_coinvariants(bundle)
    text = (f"fiber genus {g}, base genus {b}\n"
            f"rank: {rep.rank}\n"
            f"torsion: {list(rep.torsion)}\n"
            f"s: {'undefined (odd rank)' if rep.s is None else rep.s}\n"
            f"q_f: {'undefined (odd rank)' if rep.q_f is None else rep.q_f}\n"
            f"b1: {rep.b1}\n")
    return text, {"declared": False, "fiber_genus": g, "base_genus": b, "rank": rep.rank,
                  "torsion": list(rep.torsion), "s": rep.s, "q_f": rep.q_f, "b1": rep.b1}


def cmd_coinv(args) -> int:
    text, payload = coinvariants_payload(_load(args.path))
    _emit(args, text, payload)
    return EXIT_OK


def verdict_report(bundle: BundleSpec, v: Verdict, config: CheckConfig) -> tuple[str, dict]:
    lines = [f"overall: {v.overall}",
             f"fiber genus {bundle.fiber_genus}, base genus {bundle.base_genus}, "
             f"tracked signature {_sig_text(bundle.signature)}"]
    for o in v.unconditional:
        lines.append(f"[{o.status.value}] {o.name}: {o.detail} ({o.rule})")
    if v.conditional:
        lines.append("conditional on the modified Xiao conjecture (does not affect overall):")
        for o in v.conditional:
            lines.append(f"[{o.status.value}] {o.name}: {o.detail} ({o.rule})")
    chern = None
    if config.chi is not None and bundle.fiber_genus >= 2 and bundle.base_genus >= 2:
        c = chern_invariants(bundle.fiber_genus, bundle.base_genus, config.chi)
        slope = c.slope
        slope_text = "undefined" if slope is None else f"{slope.numerator}/{slope.denominator} ({float(slope)})"
        lines.append(f"invariants for chi = {c.chi}: e = {c.e}, sigma = {c.sigma}, K^2 = {c.K2}, "
                     f"slope = {slope_text}")
        chern = {"chi": c.chi, "e": c.e, "sigma": c.sigma, "K2": c.K2,
                 "slope": None if slope is None else f"{slope.numerator}/{slope.denominator}"}
    payload = {
        "format": 1,
        "overall": v.overall,
        "fiber_genus": bundle.fiber_genus,
        "base_genus": bundle.base_genus,
        "signature": _sig_json(bundle.signature),
        "outcomes": [{"name": o.name, "status": o.status.value, "detail": o.detail, "rule": o.rule,
                      "witness": o.witness, "conditional": o.conditional_check} for o in v.outcomes],
        "chern": chern,
    }
    return "\n".join(lines) + "\n", payload


def _parse_degrees(text: str) -> tuple[int, ...]:
    try:
        degrees = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad degree list {text!r}") from None
    if not degrees or any(n < 2 for n in degrees):
        raise argparse.ArgumentTypeError("cover degrees must be integers >= 2")
    return degrees


def cmd_verdict(args) -> int:
    bundle = _load(args.path)
    config = CheckConfig(enable_modified_xiao=args.modified_xiao, cover_degrees=args.cover_degrees,
                         cover_strategy=args.cover_strategy, exhaustive_cap=args.exhaustive_cap,
                         chi=args.chi)
    v = verdict(bundle, config)
    text, payload = verdict_report(bundle, v, config)
    _emit(args, text, payload)
    if v.overall == "excluded":
        return EXIT_EXCLUDED
    return EXIT_INCONCLUSIVE if v.has_inconclusive else EXIT_OK


def _generator_index(text: str) -> int:
    if text.isdigit():
        return int(text)
    return parse_generator_name(text)


def cmd_cover(args) -> int:
    bundle = _load(args.path)
    if bundle.is_declared:
        raise CommandError(EXIT_UNSUPPORTED, "cannot build a cover of a declared block: monodromy unknown")
    if not isinstance(bundle.content, SymplecticRep):
        raise CommandError(EXIT_UNSUPPORTED, "covers need a standard-presentation rep")
    try:
        index = _generator_index(args.twist_generator)
        spec = CyclicCoverSpec.twisting(args.degree, index, bundle.base_genus)
    except ValueError as exc:
        raise CommandError(EXIT_SCHEMA, str(exc)) from exc
    restricted = as_generating_set_leaf(restrict_to_cover(bundle, spec))
    text = dumps(restricted)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_signature(args) -> int:
    bundle = _load(args.path)
    if bundle.is_declared:
        raise CommandError(EXIT_UNSUPPORTED, "declared blocks carry no monodromy to evaluate")
    if not isinstance(bundle.content, SymplecticRep):
        raise CommandError(EXIT_UNSUPPORTED, "signature needs a rep with the surface relator, "
                                             "not a restricted generating set")
    computed = bundle_signature(bundle.content)
    tracked = bundle.signature
    lines = [f"computed signature: {computed}"]
    agrees = None
    if tracked is not None:
        lo, hi = bundle.signature_bounds
        agrees = lo <= computed <= hi
        lines.append(f"tracked signature: {_sig_text(tracked)} ({'agrees' if agrees else 'MISMATCH'})")
    _emit(args, "\n".join(lines), {"computed": computed, "tracked": _sig_json(tracked), "agrees": agrees})
    return EXIT_INVARIANT if agrees is False else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kodfib", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, read=True):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("path", help="bundle document (JSON)")
        if read:
            p.add_argument("--output", choices=("text", "json"), default="text")
        p.set_defaults(func=func)
        return p

    add("validate", cmd_validate, "check a document and its rep invariants")
    add("coinv", cmd_coinv, "coinvariant homology of the fiber")
    p = add("verdict", cmd_verdict, "run every obstruction")
    p.add_argument("--chi", type=int, default=None, help="holomorphic Euler characteristic to test")
    p.add_argument("--modified-xiao", action="store_true", help="also run the conjectural checks")
    p.add_argument("--cover-degrees", type=_parse_degrees, default=(2, 3, 4, 5, 6),
                   help="comma-separated cyclic cover degrees (default 2,3,4,5,6)")
    p.add_argument("--cover-strategy", choices=("single-generator", "exhaustive-capped"),
                   default="single-generator")
    p.add_argument("--exhaustive-cap", type=int, default=10000)
    p = add("cover", cmd_cover, "restrict to a cyclic cover of the base", read=False)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--twist-generator", default="a1",
                   help="generator mapped to 1 (name like a1 or 0-based index)")
    p.add_argument("--out", default=None, help="write the document here instead of stdout")
    add("signature", cmd_signature, "bundle signature from the Meyer cocycle")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CommandError as exc:
        print(exc, file=sys.stderr)
        return exc.code
    except DeclaredBlockUnsupported as exc:
        print(exc, file=sys.stderr)
        return EXIT_UNSUPPORTED
    except UnsupportedOperation as exc:
        print(exc, file=sys.stderr)
        return EXIT_UNSUPPORTED


if __name__ == "__main__":
    sys.exit(main())
