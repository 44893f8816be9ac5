"""Command-line front end: human-readable and JSON verification reports.

Exit status is 0 when every asserted check passes, 1 when one fails and 2 on
usage errors (unknown subcommand or system, malformed point or expression).
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from random import Random

from .algebra import ExtScalar, ParseError, parse_expr

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2
DRIFT_TOL = 1e-8
ORDER_RANGE = (8.0, 32.0)
DEFAULT_POINT = "1,2,3"


class UsageError(Exception):
    pass


class CheckFailed(Exception):
    def __init__(self, report):
        super().__init__(f"{sum(not c.ok for c in report.checks)} check(s) failed")
        self.report = report


@dataclass
class Check:
    name: str
    status: str           # pass, fail or info
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def ok(self):
        return self.status != "fail"


@dataclass
class Report:
    command: list
    checks: list = field(default_factory=list)
    exit_status: int = EXIT_OK
    timing: float = 0.0

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        return cls(list(d["command"]), [Check(**c) for c in d["checks"]], d["exit_status"],
                   d["timing"])

    def render(self):
        lines = [f"$ si3 {' '.join(self.command)}"]
        for c in self.checks:
            lines.append(f"{c.status.upper():5} {c.name}{_summary(c.details)}")
        lines.append(f"exit {self.exit_status} ({self.timing:.2f}s)")
        return "\n".join(lines)


def _summary(details):
    if not details:
        return ""
    parts = []
    for k, v in details.items():
        if isinstance(v, (list, dict)) and len(json.dumps(v)) > 60:
            v = f"<{len(v)} entries>"
        parts.append(f"{k}={v}")
    return "  " + ", ".join(parts)


def _timed(name, fn, *args, **kw):
    t0 = time.perf_counter()
    status, details = fn(*args, **kw)
    return Check(name, status, details, round(time.perf_counter() - t0, 3))


def _status(ok):
    return "pass" if ok else "fail"


# -- per-system checks -----------------------------------------------------------------

def _check_symmetries(rec):
    from .mechanics import bd_residuals, hamiltonian, is_killing, poisson

    syms = rec.symmetry_basis
    H = hamiltonian(rec.potential)
    killing = [is_killing(s.tensor) for s in syms]
    bd = [all(r.is_zero() for r in bd_residuals(s.tensor, rec.potential)) for s in syms]
    commute = [poisson(H, s.phase()).is_zero() for s in syms]
    ok = all(killing) and all(bd) and all(commute)
    return _status(ok), {"killing": killing, "bertrand_darboux": bd, "commutes_with_H": commute}


def _check_dimension(rec):
    from .mechanics import DegenerateInput, symmetry_space_dim

    try:
        dim, _ = symmetry_space_dim(rec.potential, with_w=False)
    except DegenerateInput as e:
        return "fail", {"dimension": e.dimension, "error": str(e)}
    return _status(dim == 6), {"dimension": dim, "expected": 6}


def _check_brackets(rec, representations=True):
    from .mechanics import RepresentationNotFound, bracket_structure

    try:
        rep = bracket_structure(rec, check_representations=representations)
    except RepresentationNotFound as e:
        return "fail", {"error": str(e)}
    n = rep["third_order_dim"]
    details = {"third_order_dim": n, "expected": 4,
               "representations": len(rep["representations"])}
    return _status(n == 4 and not rep["failures"]), details


def _check_canonical(rec):
    from .canonical import extract_from_potential, integrability_ok

    cc = extract_from_potential(rec.potential)
    ok = integrability_ok(cc)
    return _status(ok), {"integrability": ok}


def random_rational_points(seed=0, size=9):
    """Endless seeded exact points {0: x, 1: y, 2: z} with small rational coordinates."""
    rng = Random(seed)
    while True:
        yield {v: ExtScalar(Fraction(rng.randint(-size, size), rng.randint(1, size)))
               for v in range(3)}


def identities_at_points(xy, n=100, seed=0):
    """Evaluate the identities at ``n`` regular random rational points.

    Returns (points evaluated, singular points skipped, failures)."""
    from .variety import XYTuple, identities_hold

    done = skipped = 0
    fails = []
    for pt in random_rational_points(seed):
        if done == n:
            break
        try:
            vals = [f.evaluate(pt) for f in xy.values()]
        except ZeroDivisionError:
            skipped += 1
            continue
        vals = [v if isinstance(v, ExtScalar) else ExtScalar._coerce(v) for v in vals]
        done += 1
        if not identities_hold(XYTuple.from_values(vals)):
            fails.append({k: str(v) for k, v in pt.items()})
    return done, skipped, fails


def _check_identities(rec, xy, points=100):
    from .variety import eval_identities

    res = eval_identities(xy)
    symbolic = {k: all(not r for r in v) for k, v in res.items()}
    done, skipped, fails = identities_at_points(xy, points)
    ok = all(symbolic.values()) and not fails
    return _status(ok), {"symbolic": symbolic, "points": done, "singular_points": skipped,
                         "point_failures": fails}


def _check_diffconds(rec, xy):
    from .variety import verify_diffconds

    rep = verify_diffconds(rec, xy)
    return _status(not rep["failures"]), {"checked": rep["checked"],
                                          "failures": [list(f) for f in rep["failures"]]}


def _check_invariants(rec, xy):
    from .variety import relative_invariants

    got = relative_invariants(rec, xy)
    return _status(got == rec.expected_invariants), {
        "vanishing": list(got), "expected": list(rec.expected_invariants)}


def _check_table(rec, xy):
    from .variety import table_form

    X, Y = table_form(xy)
    s2 = X[0] * X[0] + X[1] * X[1] + X[2] * X[2]
    sum_ok = s2 == rec.sum_x2
    x_ok = [a == b for a, b in zip(X, rec.table_x)]
    y_ok = [a == b for a, b in zip(Y, rec.table_y)]
    ok = sum_ok and all(x_ok) and all(y_ok)
    return _status(ok), {"sum_x2": sum_ok, "x_match": x_ok, "y_match": y_ok}


def _check_numeric(rec, seed=0):
    from . import numeric as nu

    comp = nu.Compiled(rec)
    draw = nu.admissible_starts(rec, seed, comp=comp)
    drifts = [max(d.values()) for _, d in nu.conservation(comp, draw.traj, draw.params)]
    oc = nu.order_check(rec, seed, comp=comp, draw=draw)
    pts = nu.regular_points(rec, 10, seed, comp)
    ranks = [nu.independence_rank(rec, p, prm, comp) for p, prm in pts]
    full = [nu.jacobian_rank(comp, p, prm, which=range(7)) for p, prm in pts]
    ok = (max(drifts) <= DRIFT_TOL and ORDER_RANGE[0] <= oc.ratio <= ORDER_RANGE[1]
          and all(r == 5 for r in ranks) and all(r == 5 for r in full))
    return _status(ok), {
        "max_drift": max(drifts), "rejected_starts": draw.rejected,
        "order_dt": oc.dt, "order_ratio": oc.ratio,
        "independence_ranks": ranks, "full_ranks": full,
    }


def system_checks(rec, skip_numeric=False):
    """Every exact (and optionally numeric) check for one catalog system."""
    from .variety import system_xy

    xy = system_xy(rec)
    checks = [
        _timed("symmetries", _check_symmetries, rec),
        _timed("symmetry-dimension", _check_dimension, rec),
        _timed("brackets", _check_brackets, rec),
        _timed("canonical", _check_canonical, rec),
        _timed("identities", _check_identities, rec, xy),
        _timed("diffconds", _check_diffconds, rec, xy),
        _timed("invariants", _check_invariants, rec, xy),
        _timed("table", _check_table, rec, xy),
    ]
    if not skip_numeric:
        checks.append(_timed("numeric", _check_numeric, rec))
    for c in checks:
        c.name = f"{rec.name}:{c.name}"
    return checks


def variety_checks():
    from . import variety as va

    def closure():
        cs = va.closure_suite()
        full = sum(cs["full"].values())
        partial = sum(cs["partial"].values())
        ok = full == len(cs["full"]) and partial < len(cs["partial"]) and cs["sixth_independent"]
        return _status(ok), {"full_members": full, "full_total": len(cs["full"]),
                             "partial_members": partial, "partial_total": len(cs["partial"]),
                             "sixth_independent": cs["sixth_independent"]}

    def span():
        full, five = va.span_equivalence(), va.span_equivalence(va.IDEAL[:5])
        return _status(full and not five), {"six_generators": full, "five_generators": five}

    def xmodule():
        res = va.x_module_check()
        return _status(all(res.values())), {"members": sum(res.values()), "total": len(res)}

    return [_timed("variety:closure", closure), _timed("variety:span", span),
            _timed("variety:x-module", xmodule)]


def separability_checks(catalog):
    from .catalog import empty_families, separability_matrix

    t0 = time.perf_counter()
    mat = separability_matrix(catalog)
    checks = []
    for name, row in mat.items():
        rec = catalog.systems[name]
        expected = rec.separability | rec.also_separates
        got = {f for f, v in row.items() if v}
        details = {"separates": sorted(got), "expected": sorted(expected),
                   "concluded": sorted(rec.separability)}
        checks.append(Check(f"{name}:separability", _status(got == expected), details))
    empty = empty_families(mat)
    checks.append(Check("families-nonempty", _status(not empty), {"empty": empty}))
    elapsed = round(time.perf_counter() - t0, 3)
    for c in checks:
        c.seconds = elapsed
    return checks, mat


# -- subcommands ---------------------------------------------------------------------

def _catalog():
    from .catalog import CatalogError, load_catalog

    try:
        return load_catalog()
    except (CatalogError, KeyError) as e:
        raise UsageError(f"cannot load catalog: {e}") from None


def _system(name):
    cat = _catalog()
    if name not in cat.systems:
        raise UsageError(f"unknown system {name!r}; known: {' '.join(cat.systems)}")
    return cat.systems[name]


def cmd_verify(args):
    if args.target == "variety":
        if args.name:
            raise UsageError("verify variety takes no system name")
        return variety_checks()
    if args.target == "system":
        if not args.name:
            raise UsageError("verify system needs a system name")
        return system_checks(_system(args.name), args.skip_numeric)
    if args.name:
        raise UsageError("verify all takes no system name")
    cat = _catalog()
    checks = variety_checks()
    for name in sorted(cat.systems):
        checks += system_checks(cat.systems[name], args.skip_numeric)
    checks += separability_checks(cat)[0]
    return checks


def cmd_table(args):
    from .variety import system_xy, table_form

    cat = _catalog()
    checks = []
    for name, rec in cat.systems.items():
        X, Y = table_form(system_xy(rec))
        s2 = X[0] * X[0] + X[1] * X[1] + X[2] * X[2]
        ok = s2 == rec.sum_x2 and all(a == b for a, b in zip(X, rec.table_x)) \
            and all(a == b for a, b in zip(Y, rec.table_y))
        checks.append(Check(f"{name}:table", _status(ok), {
            "sum_x2": str(s2), "X": [str(v) for v in X], "Y": [str(v) for v in Y]}))
    return checks


def cmd_separability(args):
    checks, _ = separability_checks(_catalog())
    return checks


def cmd_isotropy(args):
    from .liegroup import SingularPoint, isotropy, parse_point

    rec = _system(args.name)
    try:
        point = parse_point(args.point)
    except (ValueError, ParseError) as e:
        raise UsageError(f"bad point {args.point!r}: {e}") from None
    t0 = time.perf_counter()
    try:
        dim, basis = isotropy(rec, point)
    except (SingularPoint, ZeroDivisionError):
        raise UsageError(f"point {args.point} is singular for system {rec.name}") from None
    return [Check(f"{rec.name}:isotropy", "info", {
        "point": args.point, "dimension": dim, "basis": [str(b) for b in basis]},
        round(time.perf_counter() - t0, 3))]


def cmd_dim_symmetries(args):
    from .mechanics import DegenerateInput, symmetry_space_dim

    rec = _system(args.name)
    t0 = time.perf_counter()
    try:
        dim, syms = symmetry_space_dim(rec.potential, with_w=False)
        basis = [str(s.tensor.quadratic()) for s in syms]
    except DegenerateInput as e:
        dim, basis = e.dimension, []
    return [Check(f"{rec.name}:symmetry-dimension", _status(dim == 6),
                  {"dimension": dim, "basis": basis}, round(time.perf_counter() - t0, 3))]


def cmd_brackets(args):
    rec = _system(args.name)
    return [_timed(f"{rec.name}:brackets", _check_brackets, rec)]


def cmd_simulate(args):
    from . import numeric as nu

    rec = _system(args.name)
    if args.dt <= 0 or args.t <= 0:
        raise UsageError("--dt and --t must be positive")
    t0 = time.perf_counter()
    try:
        reports, rejected = nu.simulate(rec, args.seed, args.dt, args.t)
    except nu.SingularityEncountered as e:
        return [Check(f"{rec.name}:simulate", "fail", {"error": str(e)})]
    elapsed = round(time.perf_counter() - t0, 3)
    worst = max(r.max_drift() for r in reports)
    return [Check(f"{rec.name}:simulate", _status(worst <= args.tol), {
        "reports": [asdict(r) for r in reports], "rejected_starts": rejected,
        "max_drift": worst, "tolerance": args.tol}, elapsed)]


def cmd_parse(args):
    try:
        r = parse_expr(args.expr)
    except (ParseError, ValueError, ZeroDivisionError) as e:
        raise UsageError(f"cannot parse {args.expr!r}: {e}") from None
    return [Check("parse", "info", {"input": args.expr, "canonical": str(r),
                                    "polynomial": r.is_polynomial()})]


# -- driver ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    from . import numeric as nu

    p = _Parser(prog="si3", description="Verify second-order superintegrable systems.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.set_defaults(func=fn)
        return sp

    v = add("verify", cmd_verify, "run verification suites")
    v.add_argument("target", choices=["system", "variety", "all"])
    v.add_argument("name", nargs="?")
    v.add_argument("--skip-numeric", action="store_true")
    add("table", cmd_table, "X/Y table reconciliation")
    add("separability", cmd_separability, "separable-coordinate matrix")
    s = add("isotropy", cmd_isotropy, "isotropy subalgebra at a point")
    s.add_argument("name")
    s.add_argument("--point", default=DEFAULT_POINT, help='"x,y,z" with entries like 1/2+3i')
    s = add("dim-symmetries", cmd_dim_symmetries, "dimension of the symmetry space")
    s.add_argument("name")
    s = add("brackets", cmd_brackets, "third-order brackets and quadratic algebra")
    s.add_argument("name")
    s = add("simulate", cmd_simulate, "conservation drift along complex trajectories")
    s.add_argument("name")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--dt", type=float, default=nu.DEFAULT_DT)
    s.add_argument("--t", type=float, default=nu.DEFAULT_T)
    s.add_argument("--tol", type=float, default=DRIFT_TOL)
    s = add("parse", cmd_parse, "parse an expression and print its canonical form")
    s.add_argument("expr")
    return p


def run(argv, strict=False):
    """Parse and execute; returns the Report.

    Raises UsageError on bad input and, with ``strict``, CheckFailed when an
    asserted check fails."""
    argv = list(argv)
    t0 = time.perf_counter()
    args = build_parser().parse_args(argv)
    checks = args.func(args)
    status = EXIT_OK if all(c.ok for c in checks) else EXIT_FAILED
    report = Report(argv, checks, status, round(time.perf_counter() - t0, 3))
    if strict and status != EXIT_OK:
        raise CheckFailed(report)
    return report


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    want_json = "--json" in argv
    try:
        report = run(argv, strict=True)
    except CheckFailed as e:
        report = e.report
    except UsageError as e:
        if want_json:
            print(json.dumps({"command": list(argv), "error": str(e), "exit_status": EXIT_USAGE}))
        else:
            print(f"si3: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    print(report.to_json() if want_json else report.render())
    return report.exit_status


if __name__ == "__main__":
    sys.exit(main())
