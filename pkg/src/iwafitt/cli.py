"""Command-line front end: ``iwafitt <subcommand> [file] [options]``.

Reports are canonical JSON (sorted keys, schema 1) written to --out or
stdout.  Exit status: 2 for unreadable or invalid input, 1 when any verdict
fails or a computation cannot finish, 0 otherwise.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import linalg as la
from .arith import (PreconditionError, PlaceData, Scenario, check_lemma79, ledger_apply_eq100,
                    ledger_apply_eq101, ledger_remove_eq100)
from .complexes import (ComplexError, NonTorsion, PdWitnessNotFound, PerfectComplex, det,
                        k0_det_of_reduction, k0_reduce)
from .fitting import fitt, sf, shift_fitt
from .fpmod import FPModule, NotTorsion
from .ideals import FracIdeal, compare
from .ring import PrecisionExhausted, RingElem, RingSpec
from .suites import SUITES, run_suite

SCHEMA = 1


class InputError(Exception):
    """Input that does not parse or validate (exit status 2)."""


def _precision(text: str):
    try:
        N, M = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("precision must look like N,M") from None
    if N < 1 or M < 1:
        raise argparse.ArgumentTypeError("precision entries must be positive")
    return N, M


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for every randomized choice")
    common.add_argument("--precision", type=_precision, metavar="N,M",
                        help="override the truncation precision of TRUNCATED inputs")
    common.add_argument("--out", help="write the report here instead of stdout")

    p = argparse.ArgumentParser(prog="iwafitt", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, what in (("fitt", "Fitting ideal of a module"), ("det", "determinant of a complex"),
                       ("k0-reduce", "signed module decomposition of a complex")):
        s = sub.add_parser(name, parents=[common], help=what)
        s.add_argument("input", help="JSON file")
    for name, what in (("shift-fitt", "shifted Fitting ideal Fitt^(n)"),
                       ("sf", "SF^(n) through a finite free resolution")):
        s = sub.add_parser(name, parents=[common], help=what)
        s.add_argument("input", help="module JSON file")
        s.add_argument("-n", type=int, default=1, help="shift (default 1)")
    s = sub.add_parser("ledger", parents=[common], help="Euler-factor ledger operations")
    s.add_argument("input", help="ledger JSON file")
    s = sub.add_parser("verify", parents=[common], help="run a verification suite")
    s.add_argument("suite_name", nargs="?", choices=SUITES + ("all",), metavar="SUITE")
    s.add_argument("--suite", choices=SUITES + ("all",))
    s.add_argument("--cases", type=int, help="number of random cases")
    s.add_argument("--scenario", help="scenario JSON file (lemma79 only)")
    return p


# -- input ----------------------------------------------------------------

def _load(path: str, precision=None) -> dict:
    try:
        with open(path) as fh:
            d = json.load(fh)
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON ({e.msg} at line {e.lineno})") from None
    if not isinstance(d, dict) or "ring" not in d:
        raise InputError(f"{path}: expected a JSON object with a 'ring' entry")
    if precision is not None and d["ring"].get("mode") == "truncated":
        d["ring"] = dict(d["ring"], precision=list(precision))
        # a stored m-adic precision belongs to the old ring
        d.pop("madic_precision", None)
    return d


def _parse(fn, d):
    try:
        return fn(d)
    except (KeyError, TypeError, ValueError, IndexError) as e:
        raise InputError(f"invalid input: {e}") from None


def _ideal_report(op: str, inputs: dict, I: FracIdeal) -> dict:
    return {"op": op, "inputs": inputs, "ideal": I.to_json(),
            "ideal_normal_form": I.to_json()["normal_form"],
            "effective_precision": la.report_precision(I.spec, I.K)}


# -- subcommands ----------------------------------------------------------

def cmd_fitt(args) -> dict:
    d = _load(args.input, args.precision)
    M = _parse(FPModule.from_json, d)
    return _ideal_report("fitt", d, fitt(M))


def cmd_shift_fitt(args) -> dict:
    d = _load(args.input, args.precision)
    M = _parse(FPModule.from_json, d)
    if args.n < 0:
        raise InputError("shift-fitt needs n >= 0")
    rep = _ideal_report("shift-fitt", d, shift_fitt(M, args.n))
    rep["n"] = args.n
    return rep


def cmd_sf(args) -> dict:
    d = _load(args.input, args.precision)
    M = _parse(FPModule.from_json, d)
    rep = _ideal_report("sf", d, sf(M, args.n, seed=args.seed))
    rep["n"] = args.n
    return rep


def _complex(d) -> PerfectComplex:
    try:
        return PerfectComplex.from_json(d)
    except ComplexError as e:
        raise InputError(str(e)) from None
    except (KeyError, TypeError, ValueError, IndexError) as e:
        raise InputError(f"invalid complex: {e}") from None


def cmd_det(args) -> dict:
    d = _load(args.input, args.precision)
    F = _complex(d)
    return _ideal_report("det", d, det(F, args.seed))


def cmd_k0_reduce(args) -> dict:
    d = _load(args.input, args.precision)
    F = _complex(d)
    signed = k0_reduce(F, args.seed)
    D = det(F, args.seed)
    R = k0_det_of_reduction(signed, F.spec)
    ok, K = compare(D, R)
    return {"op": "k0-reduce", "inputs": d,
            "classes": [{"sign": s, "module": Q.to_json()} for s, Q in signed],
            "det": D.to_json(), "det_of_reduction": R.to_json(), "verdict": ok,
            "effective_precision": la.report_precision(F.spec, K)}


LEDGER_OPS = {"eq100": ledger_apply_eq100, "eq101": ledger_apply_eq101,
              "remove-eq100": ledger_remove_eq100}


def cmd_ledger(args) -> dict:
    """Input: {ring, base: {gens, den}, places: [...], apply: eq100 | eq101 | remove-eq100}."""
    d = _load(args.input, args.precision)

    def parse(d):
        spec = RingSpec.from_json(d["ring"])
        b = d.get("base", {"gens": [[{"num": 1}]]})
        gens = [RingElem.from_json(spec, g) for g in b["gens"]]
        den = RingElem.from_json(spec, b["den"]) if b.get("den") else None
        places = [PlaceData.from_json(spec, v) for v in d.get("places", [])]
        op = d.get("apply", "eq100")
        if op not in LEDGER_OPS:
            raise ValueError(f"unknown ledger operation {op!r}")
        return FracIdeal(spec, gens, den), places, op

    base, places, op = _parse(parse, d)
    rep = _ideal_report("ledger", d, LEDGER_OPS[op](base, places))
    rep["apply"] = op
    return rep


def cmd_verify(args) -> dict:
    name = args.suite or args.suite_name
    if name is None:
        raise InputError("verify needs a suite name")
    if args.suite and args.suite_name and args.suite != args.suite_name:
        raise InputError("conflicting suite names")
    if args.cases is not None and args.cases < 0:
        raise InputError("--cases must be non-negative")
    if args.scenario:
        if name != "lemma79":
            raise InputError("--scenario applies to the lemma79 suite only")
        d = _load(args.scenario, args.precision)
        sc = _parse(Scenario.from_json, d)
        parts = [int(c.split(".")[1]) for c in sc.checks if c.startswith("lemma79.")] or [1]
        reports = []
        for part in parts:
            try:
                reports.append(check_lemma79(part, sc))
            except PreconditionError as e:
                raise InputError(str(e)) from None
        return {"op": "verify", "suite": name, "scenario": d, "reports": reports,
                "verdict": all(r["verdict"] for r in reports)}
    rep = run_suite(name, args.seed, args.cases, args.precision)
    return {"op": "verify", "seed": args.seed, "cases": args.cases,
            "precision": list(args.precision) if args.precision else None, "report": rep,
            "verdict": rep["verdict"]}


COMMANDS = {"fitt": cmd_fitt, "shift-fitt": cmd_shift_fitt, "sf": cmd_sf, "det": cmd_det,
            "k0-reduce": cmd_k0_reduce, "ledger": cmd_ledger, "verify": cmd_verify}


def _emit(report: dict, out) -> None:
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = COMMANDS[args.command](args)
    except InputError as e:
        print(f"iwafitt: error: {e}", file=sys.stderr)
        return 2
    except (NotTorsion, NonTorsion, PreconditionError) as e:
        print(f"iwafitt: error: {e}", file=sys.stderr)
        return 2
    except (PrecisionExhausted, PdWitnessNotFound) as e:
        report = {"op": args.command, "error": str(e), "verdict": False}
        status = 1
    else:
        status = 0 if report.get("verdict", True) else 1
    report["schema"] = SCHEMA
    _emit(report, args.out)
    return status


if __name__ == "__main__":
    sys.exit(main())
