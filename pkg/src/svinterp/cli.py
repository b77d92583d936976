"""Command line front end.

Subcommands
-----------
norm              norm of a rearrangement in a space descriptor
derive            apply the matching reiteration rule
verify-rule       numerical equivalence check of one rule
verify-holmstedt  T14 / T17 formula check on a random discrete couple
selftest          invariant suite with one PASS/FAIL line per item

All JSON output is written with sorted keys and no timestamps, so identical
arguments give byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .errors import HypothesisFailed, InvalidDescriptor, NonConvergent, NoRuleMatches, SvInterpError
from .grid import DEFAULT_GRID, LogGrid

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_HYPOTHESIS, EXIT_NONCONVERGENT = 0, 1, 2, 3, 4
LORENTZ_KINDS = {"karamata", "ltype", "rtype", "small", "grand"}
FORMATS = {"json", "csv", "svg"}


class UsageError(SvInterpError):
    """Invalid command line input."""


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_default) + "\n"


def _default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _load_json(path: str):
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"input file not found: {path}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from exc


def _formats(text: str) -> list:
    fmts = [f.strip() for f in text.split(",") if f.strip()]
    bad = set(fmts) - FORMATS
    if bad or not fmts:
        raise UsageError(f"unknown format(s) {sorted(bad)}; choose from {sorted(FORMATS)}")
    return fmts


def _grid(args) -> LogGrid:
    if not args.grid:
        return DEFAULT_GRID
    try:
        return LogGrid.parse(args.grid)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _outdir(args) -> Path | None:
    out = args.out or os.environ.get("SVINTERP_OUT")
    if not out:
        return None
    p = Path(out)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _emit(args, stem: str, payloads: dict) -> None:
    """Write ``{format: text-or-callable}`` to ``--out`` or print JSON/CSV to stdout."""
    out = _outdir(args)
    for fmt in _formats(args.format):
        if fmt not in payloads:
            continue
        item = payloads[fmt]
        if out is None:
            if fmt == "svg":
                raise UsageError("svg output needs --out")
            sys.stdout.write(item)
            continue
        path = out / f"{stem}.{fmt}"
        if callable(item):
            item(path)
        else:
            path.write_text(item)


def _descriptor(d: dict):
    from .spaces import LorentzDescriptor, SpaceDescriptor
    try:
        if d.get("kind") in LORENTZ_KINDS:
            return LorentzDescriptor.from_json(d)
        return SpaceDescriptor.from_json(d)
    except (KeyError, TypeError, AttributeError) as exc:
        raise UsageError(f"malformed descriptor {d!r}: missing or invalid field {exc}") from exc


# -- subcommands ---------------------------------------------------------------------------

def cmd_norm(args) -> int:
    from .kfunc import DecreasingProfile, k_l1_linf
    from .spaces import LorentzDescriptor, interp_norm, lorentz_norm

    grid = _grid(args)
    d = _descriptor(_load_json(args.space))
    f = DecreasingProfile.from_json(_load_json(args.profile))
    if isinstance(d, LorentzDescriptor):
        res = lorentz_norm(d, f, grid, details=True)
        K = None
    else:
        K = k_l1_linf(f, grid)
        res = interp_norm(d, K, details=True)
    payload = {"norm": res.value, "tail_fraction": res.tail_fraction, "space": d.to_json(),
               "grid": grid.to_json()}
    pay = {"json": _dumps(payload)}
    if K is not None:
        pay["csv"] = K.to_csv()
    _emit(args, "norm", pay)
    return EXIT_OK


def _rule_input(args):
    from .reiteration import RuleId, default_instance, default_lorentz_instance
    from .reiteration.rules import Outer, RuleInput

    if args.input:
        data = _load_json(args.input)
        kinds = {data.get("left", {}).get("kind"), data.get("right", {}).get("kind")}
        if kinds & LORENTZ_KINDS:
            return ("lorentz", (_descriptor(data["left"]), _descriptor(data["right"]),
                                Outer.from_json(data["outer"])))
        try:
            return ("rule", RuleInput(_descriptor(data["left"]), _descriptor(data["right"]),
                                      Outer.from_json(data["outer"]), data.get("mode", "full")))
        except (KeyError, TypeError) as exc:
            raise UsageError(f"malformed rule input: missing or invalid field {exc}") from exc
    if not args.rule:
        raise UsageError("give --rule ID or --input FILE")
    try:
        rid = RuleId(args.rule)
    except ValueError as exc:
        raise UsageError(f"unknown rule id {args.rule!r}") from exc
    if rid.family == "C":
        return ("lorentz", default_lorentz_instance(rid))
    if rid.family == "P":
        return ("property", rid)
    return ("rule", default_instance(rid))


def _derive(kind, payload, grid):
    from .reiteration import derive, specialize_lorentz
    if kind == "lorentz":
        return specialize_lorentz(*payload, grid)
    return derive(payload, grid)


def cmd_derive(args) -> int:
    grid = _grid(args)
    kind, payload = _rule_input(args)
    if kind == "property":
        from .reiteration import default_property_instance, identify
        first, second = identify(payload, default_property_instance(payload), grid)
        doc = {"rule": payload.value, "first": first.to_json(), "second": None if second is None else second.to_json()}
    else:
        doc = _derive(kind, payload, grid).to_json()
    _emit(args, "derive", {"json": _dumps(doc)})
    return EXIT_OK


def cmd_verify_rule(args) -> int:
    from .reiteration import check_property, verify_equivalence
    from .reiteration.verify import default_family, unit_family

    grid = _grid(args)
    kind, payload = _rule_input(args)
    if kind == "property":
        p = check_property(payload, grid=grid, bound=args.spread_bound)
        pays = {"json": _dumps(p.to_json())}
        if p.report is not None:
            pays["csv"] = p.report.to_csv()
            pays["svg"] = p.report.to_svg
        _emit(args, f"verify-{payload.value}", pays)
        return EXIT_OK if p.passed else EXIT_FAILED
    out = _derive(kind, payload, grid)
    fam = (unit_family if out.mode == "unit" else default_family)(seed=args.seed, grid=grid)
    rep = verify_equivalence(out, family=fam, refine=args.refine_check)
    ok = rep.passed(args.spread_bound, 0.1 if args.refine_check else None)
    doc = rep.summary()
    doc.update({"passed": ok, "spread_bound": args.spread_bound, "seed": args.seed})
    _emit(args, f"verify-{out.label}", {"json": _dumps(doc), "csv": rep.to_csv(), "svg": rep.to_svg})
    return EXIT_OK if ok else EXIT_FAILED


def cmd_verify_holmstedt(args) -> int:
    from . import holmstedt as hm

    inst = hm.default_instance(args.theorem, args.seed, args.n)
    fam = hm.default_family(inst.couple.n, args.seed, args.per_shape)
    rep = hm.verify(inst, fam)
    ok = rep.passed(args.spread_bound, None)
    doc = rep.summary()
    doc.update({"passed": ok, "instance": inst.to_json(), "spread_bound": args.spread_bound, "seed": args.seed})
    _emit(args, f"holmstedt-{args.theorem}", {"json": _dumps(doc), "csv": rep.to_csv(), "svg": rep.to_svg})
    return EXIT_OK if ok else EXIT_FAILED


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    lines, ok = [], True
    for key, passed, detail in run_selftest(_grid(args), args.seed, args.spread_bound, args.refine_check,
                                            not args.skip_holmstedt):
        ok &= bool(passed)
        lines.append({"check": key, "passed": bool(passed), "detail": detail})
        print(f"{key}: {'PASS' if passed else 'FAIL'}  ({detail})", flush=True)
    out = _outdir(args)
    if out is not None:
        (out / "selftest.json").write_text(_dumps({"passed": ok, "checks": lines}))
    return EXIT_OK if ok else EXIT_FAILED


# -- parser -------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid", help="grid override 'tmin,tmax,points_per_decade' (default 1e-8,1e8,32)")
    common.add_argument("--seed", type=int, default=0, help="seed for verification families (default 0)")
    common.add_argument("--format", default="json", help="comma list from json,csv,svg (default json)")
    common.add_argument("--out", help="output directory (default: stdout; env SVINTERP_OUT)")
    common.add_argument("--spread-bound", type=float, default=100.0, help="acceptance bound on max/min ratio")
    common.add_argument("--refine-check", action="store_true", help="also require <=10%% drift on a 2x grid")
    common.add_argument("--error-json", action="store_true", help="report errors as JSON on stdout")

    p = argparse.ArgumentParser(prog="svinterp", description="Interpolation norms and reiteration rules.")
    sub = p.add_subparsers(dest="command", required=True)
    n = sub.add_parser("norm", parents=[common], help="norm of f* in a space")
    n.add_argument("--space", required=True, help="descriptor JSON file")
    n.add_argument("--profile", required=True, help="decreasing profile JSON file")
    n.set_defaults(func=cmd_norm)
    for name, fn, hlp in (("derive", cmd_derive, "apply a reiteration rule"),
                          ("verify-rule", cmd_verify_rule, "ratio check of a rule")):
        s = sub.add_parser(name, parents=[common], help=hlp)
        s.add_argument("--rule", help="rule id for its built-in instance, e.g. T25 or C37")
        s.add_argument("--input", help="rule input JSON file (left, right, outer, mode)")
        s.set_defaults(func=fn)
    h = sub.add_parser("verify-holmstedt", parents=[common], help="Holmstedt formula check")
    h.add_argument("--theorem", choices=["T14", "T17"], required=True)
    h.add_argument("--n", type=int, default=16, help="couple dimension (default 16)")
    h.add_argument("--per-shape", type=int, default=10, help="sequences per family shape (default 10)")
    h.set_defaults(func=cmd_verify_holmstedt)
    st = sub.add_parser("selftest", parents=[common], help="run the invariant suite")
    st.add_argument("--skip-holmstedt", action="store_true", help="omit the slower oracle checks")
    st.set_defaults(func=cmd_selftest)
    return p


def _fail(args, code: int, exc: Exception) -> int:
    if getattr(args, "error_json", False):
        sys.stdout.write(_dumps({"error": type(exc).__name__, "message": str(exc), "exit_status": code}))
    else:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if not math.isfinite(args.spread_bound) or args.spread_bound < 1:
            raise UsageError("--spread-bound must be a finite number >= 1")
        return args.func(args)
    except HypothesisFailed as exc:
        return _fail(args, EXIT_HYPOTHESIS, exc)
    except NonConvergent as exc:
        return _fail(args, EXIT_NONCONVERGENT, exc)
    except (UsageError, InvalidDescriptor, NoRuleMatches, KeyError, ValueError) as exc:
        return _fail(args, EXIT_INPUT, exc)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
