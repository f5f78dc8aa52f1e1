"""Command-line front end.

Exit codes: 0 success (valid, certificate found, all checks passed),
1 a negative answer (invalid, NONE, failed check or fuzz failure),
2 bad input (syntax errors and usage errors).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from . import __version__
from . import covering as C
from . import jtree as J
from . import nperiodic as N
from .logic import Frame, eval_formula, is_valid_on_frame, max_modality, parse, to_text
from .ordinal import Ordinal, format_ordinal, parse_ordinal
from .sexp import SExpError, format_sexp, parse_sexp
from .suites import DEFAULT_BOUNDS, SUITES, Params, run_suite

CACHE_ENV = "GLPWB_CACHE_DIR"


class InputError(Exception):
    """Bad user input; reported with exit code 2."""


# helpers --------------------------------------------------------------------------


def _read_arg(text: str) -> str:
    """``@path`` reads a file, ``-`` reads stdin, anything else is literal."""
    if text == "-":
        return sys.stdin.read()
    if text.startswith("@"):
        try:
            return Path(text[1:]).read_text()
        except OSError as e:
            raise InputError(str(e)) from e
    return text


def _ordinal(text: str) -> Ordinal:
    try:
        return parse_ordinal(text)
    except SyntaxError as e:
        raise InputError(f"bad ordinal: {e}") from e


def _formula(text: str):
    try:
        return parse(_read_arg(text))
    except SyntaxError as e:
        raise InputError(f"bad formula: {e}") from e


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_valuation(args, frame: Frame) -> Dict[str, N.HSet]:
    """Valuations come from ``--valuation FILE`` holding ``(valuation (p SET) ...)``
    or a JSON object, plus any ``--let p=SET`` items."""
    items: List[tuple] = []
    if args.valuation:
        text = _read_arg("@" + args.valuation if not args.valuation.startswith("@") else args.valuation)
        stripped = text.strip()
        if stripped.startswith("{"):
            try:
                data = json.loads(stripped)
            except json.JSONDecodeError as e:
                raise InputError(f"bad valuation JSON: {e}") from e
            items.extend(data.items())
        else:
            try:
                x = parse_sexp(stripped)
            except SExpError as e:
                raise InputError(f"bad valuation: {e}") from e
            if not isinstance(x, list) or not x or x[0] != "valuation":
                raise InputError("valuation file must be (valuation (p SET) ...)")
            for entry in x[1:]:
                if not isinstance(entry, list) or len(entry) != 2 or not isinstance(entry[0], str):
                    raise InputError("valuation entries are (name SET)")
                items.append((entry[0], format_sexp(entry[1])))
    for item in args.let or []:
        if "=" not in item:
            raise InputError(f"--let needs NAME=SET, got {item!r}")
        k, v = item.split("=", 1)
        items.append((k.strip(), v))
    out: Dict[str, N.HSet] = {}
    for name, text in items:
        try:
            s = N.parse_hset(text, frame.omega)
        except SyntaxError as e:
            raise InputError(f"bad set for {name}: {e}") from e
        if s.bound != frame.omega:
            raise InputError(f"set for {name} has bound {s.bound}; the frame needs {frame.omega}")
        out[name] = s
    return out


def _cache_path(tree: J.JTree) -> Optional[Path]:
    root = os.environ.get(CACHE_ENV)
    if not root:
        return None
    key = hashlib.sha256(format_sexp(J.tree_to_sexp(tree)).encode()).hexdigest()[:32]
    return Path(root) / f"{key}.cover"


def _cover_text(tree: J.JTree) -> str:
    path = _cache_path(tree)
    if path is not None and path.exists():
        return path.read_text()
    text = C.format_cover(C.cover(tree)) + "\n"
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    return text


def _tree(text: str) -> J.JTree:
    try:
        t = J.parse_tree(_read_arg(text))
    except (SyntaxError, J.MalformedTree) as e:
        raise InputError(f"bad tree: {e}") from e
    bad = J.check_frame(t)
    if bad or not J.is_derivable(t):
        raise InputError("not a J_n-tree: " + ("; ".join(bad) or "not derivable from the grammar"))
    return t


def _checks_text(checks: Sequence[C.Check], fmt: str) -> str:
    if fmt == "json":
        return json.dumps([{"name": c.name, "ok": c.ok, "detail": c.detail} for c in checks], indent=2) + "\n"
    return "".join(format_sexp(c.to_sexp()) + "\n" for c in checks)


# commands -------------------------------------------------------------------------


def cmd_eval(args) -> int:
    f = _formula(args.formula)
    n = args.signature if args.signature is not None else max(0, max_modality(f))
    frame = Frame(_ordinal(args.bound), n)
    v = _load_valuation(args, frame)
    try:
        s = eval_formula(f, v, frame=frame)
    except KeyError as e:
        raise InputError(f"unbound variable {e}") from e
    except ValueError as e:
        raise InputError(str(e)) from e
    w = frame.witness(s)
    if args.format == "json":
        doc = {"formula": to_text(f), "truth": N.format_hset(s), "full": w is None,
               "counterexample": None if w is None else str(w)}
        _emit(json.dumps(doc, indent=2) + "\n", args.output)
    else:
        lines = [N.format_hset(s)]
        if w is not None:
            lines.append(f"(counterexample {w})")
        _emit("\n".join(lines) + "\n", args.output)
    return 0


def cmd_validate(args) -> int:
    f = _formula(args.formula)
    n = args.signature if args.signature is not None else max(0, max_modality(f))
    r = is_valid_on_frame(f, _ordinal(args.bound), n, count=args.budget_vals, seed=args.seed)
    if args.format == "json":
        doc = {"formula": to_text(f), "valid": r.valid, "tried": r.tried,
               "witness": None if r.witness is None else str(r.witness),
               "valuation": None if r.valuation is None else {k: N.format_hset(s) for k, s in sorted(r.valuation.items())}}
        _emit(json.dumps(doc, indent=2) + "\n", args.output)
    elif r.valid:
        _emit(f"VALID on {r.tried} valuations\n", args.output)
    else:
        lines = [f"INVALID at {r.witness}"]
        lines += [f"({k} {N.format_hset(s)})" for k, s in sorted(r.valuation.items())]
        _emit("\n".join(lines) + "\n", args.output)
    return 0 if r.valid else 1


def cmd_countermodel(args) -> int:
    f = _formula(args.formula)
    n = args.signature if args.signature is not None else max(0, max_modality(f))
    if max_modality(f) > n:
        raise InputError(f"formula uses modality {max_modality(f)} above signature {n}")
    cert = C.completeness_pipeline(f, n, args.budget_nodes, args.budget_vals, args.seed)
    if cert is None:
        _emit("NONE\n", args.output)
        return 1
    _emit(cert.render(args.format), args.output)
    return 0 if cert.ok else 1


def cmd_cover(args) -> int:
    t = _tree(args.tree)
    text = _cover_text(t)
    if args.format == "json":
        c = C.parse_cover(text)
        doc = {"tree": format_sexp(J.tree_to_sexp(c.tree)), "lambda": str(c.lam),
               "preimages": {str(w): N.format_hset(s) for w, s in enumerate(c.preimages)}}
        text = json.dumps(doc, indent=2) + "\n"
    _emit(text, args.output)
    return 0


def cmd_verify_cover(args) -> int:
    text = _read_arg(args.cover)
    try:
        x = parse_sexp(text)
    except SExpError as e:
        raise InputError(f"bad cover: {e}") from e
    try:
        if isinstance(x, list) and x and x[0] == "jtree":
            c = C.cover(_tree(text))
        else:
            c = C.cover_from_sexp(x)
    except (SyntaxError, ValueError) as e:
        raise InputError(f"bad cover: {e}") from e
    checks = C.verify(c, probes=args.probes)
    _emit(_checks_text(checks, args.format), args.output)
    return 0 if C.all_passed(checks) else 1


def cmd_fuzz(args) -> int:
    if args.suite not in SUITES:
        raise InputError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    bound = _ordinal(args.bound) if args.bound else DEFAULT_BOUNDS[args.suite]
    n = args.signature if args.signature is not None else 3
    p = Params(bound, n, mutate=args.mutate)
    rep = run_suite(args.suite, args.count, args.seed, p, jobs=args.jobs)
    if args.format == "json":
        doc = {"suite": rep.suite, "count": rep.count, "passed": rep.count - len(rep.failures),
               "failures": [{"case": f.case, "message": f.message, "sets": f.sets} for f in rep.failures]}
        _emit(json.dumps(doc, indent=2) + "\n", args.output)
    else:
        _emit(rep.render() + "\n", args.output)
    return 0 if rep.ok else 1


def cmd_normalize_ordinal(args) -> int:
    a = _ordinal(args.ordinal)
    if args.format == "json":
        _emit(json.dumps({"input": args.ordinal, "normal_form": format_ordinal(a)}) + "\n", args.output)
    else:
        _emit(format_ordinal(a) + "\n", args.output)
    return 0


# parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("sexp", "json"), default="sexp")
    common.add_argument("-o", "--output", help="write the result to a file instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=1, help="worker processes for fuzz suites")
    common.add_argument("-n", "--signature", type=int, help="largest modality index")
    common.add_argument("--bound", help="frame bound as an ordinal literal, e.g. 'w^(w)'")
    common.add_argument("--budget-nodes", type=int, default=6)
    common.add_argument("--budget-vals", type=int, default=None)

    p = argparse.ArgumentParser(prog="glpwb", description="Periodic ordinal frames for polymodal provability logic.")
    p.add_argument("--version", action="version", version=f"glpwb {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", parents=[common], help="truth set of a formula over [1, bound]")
    e.add_argument("formula")
    e.add_argument("--valuation", help="file with (valuation (p SET) ...) or a JSON object")
    e.add_argument("--let", action="append", metavar="NAME=SET", help="bind one variable inline")
    e.set_defaults(func=cmd_eval, bound_default="w^(w)")

    v = sub.add_parser("validate", parents=[common], help="check a formula against seeded random valuations")
    v.add_argument("formula")
    v.set_defaults(func=cmd_validate, bound_default="w^(w^(w))", vals_default=100)

    c = sub.add_parser("countermodel", parents=[common], help="J_n countermodel, cover and transfer certificate")
    c.add_argument("formula")
    c.set_defaults(func=cmd_countermodel, vals_default=4096)

    cv = sub.add_parser("cover", parents=[common], help="covering map of a J_n-tree")
    cv.add_argument("tree", help="(jtree ...) text, @file or -")
    cv.set_defaults(func=cmd_cover)

    vc = sub.add_parser("verify-cover", parents=[common], help="check a cover (or the cover of a tree)")
    vc.add_argument("cover", help="(cover ...) or (jtree ...) text, @file or -")
    vc.add_argument("--probes", type=int, default=200)
    vc.set_defaults(func=cmd_verify_cover)

    fz = sub.add_parser("fuzz", parents=[common], help="run a seeded property suite")
    fz.add_argument("suite", help=", ".join(SUITES))
    fz.add_argument("-k", "--count", type=int, default=50)
    fz.add_argument("--mutate", action="store_true", help="inject a known bug to exercise the shrinker")
    fz.set_defaults(func=cmd_fuzz)

    no = sub.add_parser("normalize-ordinal", parents=[common], help="print the Cantor normal form")
    no.add_argument("ordinal")
    no.set_defaults(func=cmd_normalize_ordinal)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.bound is None and hasattr(args, "bound_default"):
        args.bound = args.bound_default
    if args.budget_vals is None:
        args.budget_vals = getattr(args, "vals_default", 100)
    try:
        return args.func(args)
    except InputError as e:
        print(f"glpwb: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
