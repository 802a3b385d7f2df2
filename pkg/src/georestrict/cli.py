"""Command-line interface: field inspection, L-value tables and verification suites.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from . import lfunctions as lf
from . import quadfield as qf
from . import verify

DATA_ENV = "GEOD_DATA_DIR"
SUITES = ("quadfield", "geodesics", "hecke", "gamma", "afe", "restriction", "analysis", "all")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    D: int = 5
    form: str | None = None
    precision: int = 50
    delta: float = 0.1
    eps: float = 0.05
    n_max: int = 6
    out: str | None = None
    suites: list = field(default_factory=list)
    jobs: int = 1
    dmax: int = 200
    t: float = 20.0

    def validate(self) -> "RunConfig":
        if not qf.is_fundamental(self.D):
            raise UsageError(f"{self.D} is not a positive fundamental discriminant")
        if self.precision < 30:
            raise UsageError("precision must be at least 30 digits")
        if self.form is not None and not Path(self.form).exists():
            raise UsageError(f"form file {self.form} not found")
        if self.jobs < 1:
            raise UsageError("--jobs must be positive")
        return self


def resolve_form_path(name: str | None, data_dir: str | None = None) -> str | None:
    """Explicit paths win; bare names are looked up in --data-dir, then $GEOD_DATA_DIR."""
    if name is None:
        return None
    p = Path(name)
    if p.exists():
        return str(p)
    base = data_dir or os.environ.get(DATA_ENV)
    if base and (Path(base) / name).exists():
        return str(Path(base) / name)
    raise UsageError(f"form file {name!r} not found (checked ./ and {DATA_ENV}={base!r})")


def _emit(text: str, out: str | None, name: str) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    d = Path(out)
    d.mkdir(parents=True, exist_ok=True)
    (d / name).write_text(text)


# ---------------------------------------------------------------------------
# field-info
# ---------------------------------------------------------------------------

def field_info(D: int) -> dict:
    qf.check_fundamental(D)
    F = qf.quad_field(D)
    G = qf.narrow_class_group(D)
    return {
        "D": D,
        "pell": [F.xD, F.yD],
        "eps_D": mp_str(F.eps),
        "beta_D": mp_str(F.beta),
        "c_D": mp_str(F.c_D),
        "h_plus": G.h_plus,
        "class_group": list(G.orders) or [1],
        "representative_forms": [list(f) for f in G.reps],
    }


def mp_str(x) -> str:
    import mpmath as mp
    return mp.nstr(x, 20)


def cmd_field_info(args) -> int:
    D = args.D
    if not qf.is_fundamental(D):
        raise UsageError(f"{D} is not a fundamental discriminant" + (f" (try {4 * D})" if D % 4 in (2, 3) else ""))
    info = field_info(D)
    if args.json:
        _emit(json.dumps(info, indent=2) + "\n", args.out, f"field_{D}.json")
    else:
        lines = [f"D = {D}", f"Pell solution (x_D, y_D) = ({info['pell'][0]}, {info['pell'][1]})",
                 f"eps_D = {info['eps_D']}", f"beta_D = {info['beta_D']}", f"c_D = {info['c_D']}",
                 f"h+ = {info['h_plus']}", f"class group = {' x '.join(f'Z/{h}' for h in info['class_group'])}",
                 "representative forms: " + ", ".join(str(tuple(f)) for f in info["representative_forms"])]
        _emit("\n".join(lines) + "\n", args.out, f"field_{D}.txt")
    return 0


# ---------------------------------------------------------------------------
# lvalues
# ---------------------------------------------------------------------------

CSV_FIELDS = ["D", "psi_index", "n", "value", "error", "q_infty", "truncation"]


def _lvalue_row(task):
    path, D, psi_e, n, delta = task
    from .hecke import ClassCharacter, HeckeCharacter
    f = lf.load_maass_form(path)
    res = lf.rankin_selberg_central(f, HeckeCharacter(ClassCharacter(D, psi_e), n), "plain", lf.AFEConfig(delta=delta))
    return res


def lvalue_rows(path: str, D: int, n_lo: int, n_hi: int, delta: float = 0.1, jobs: int = 1) -> list[dict]:
    from .hecke import class_characters
    f = lf.load_maass_form(path)
    want = 0 if f.parity == "even" else 1
    psis = class_characters(D)
    tasks = [(path, D, psi.e, n, delta) for i, psi in enumerate(psis)
             for n in range(n_lo, n_hi + 1) if n % 2 == want]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            results = list(ex.map(_lvalue_row, tasks))
    else:
        results = [_lvalue_row(t) for t in tasks]
    index = {psi.e: i for i, psi in enumerate(psis)}
    return [{"D": D, "psi_index": index[t[2]], "n": t[3], "value": repr(float(r.value)), "error": repr(float(r.error)),
             "q_infty": repr(float(r.q_infty)), "truncation": int(r.truncation)} for t, r in zip(tasks, results)]


def cmd_lvalues(args) -> int:
    cfg = RunConfig(D=args.D, form=resolve_form_path(args.form, args.data_dir), jobs=args.jobs or os.cpu_count() or 1,
                    delta=args.delta).validate()
    try:
        rows = lvalue_rows(cfg.form, cfg.D, args.n_min, args.n_max, cfg.delta, cfg.jobs)
    except lf.InsufficientCoefficients as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    _emit(buf.getvalue(), args.out, f"lvalues_D{cfg.D}.csv")
    neg = [r for r in rows if float(r["value"]) < -10 * float(r["error"])]
    return 1 if neg else 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

SUITE_CRITERIA = {
    "quadfield": [1], "geodesics": [2], "hecke": [3], "gamma": [10], "afe": [4, 8, 9],
    "restriction": [5], "analysis": [6, 7],
}


def _run_criterion(task):
    c, kwargs, form_path = task
    fn = verify.CRITERIA[c]
    if c in verify.FORM_CRITERIA:
        return fn(lf.load_maass_form(form_path), **kwargs)
    return fn(**kwargs)


def _criterion_kwargs(c: int, cfg: RunConfig) -> dict:
    if c == 1:
        return {"dmax_class": cfg.dmax, "dmax_pell": max(cfg.dmax, 2)}
    if c == 2:
        return {"dmax": min(cfg.dmax, 100)}
    if c == 6:
        return {"D": cfg.D, "t": cfg.t}
    if c in (8, 9):
        return {"D": cfg.D}
    return {}


def cmd_verify(args) -> int:
    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    cfg = RunConfig(D=args.D, form=resolve_form_path(args.form, args.data_dir), out=args.out, dmax=args.dmax,
                    t=args.t, jobs=args.jobs or os.cpu_count() or 1, suites=[args.suite]).validate()
    names = [s for s in SUITES[:-1]] if args.suite == "all" else [args.suite]
    crits = [c for s in names for c in SUITE_CRITERIA[s]]
    skipped = [c for c in crits if c in verify.FORM_CRITERIA and cfg.form is None]
    tasks = [(c, _criterion_kwargs(c, cfg), cfg.form) for c in crits if c not in skipped]
    if cfg.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(min(cfg.jobs, len(tasks))) as ex:
            reports = list(ex.map(_run_criterion, tasks))
    else:
        reports = [_run_criterion(t) for t in tasks]
    for r in reports:
        sys.stderr.write(r.summary() + "\n")
    for c in skipped:
        sys.stderr.write(f"[SKIP] criterion {c}: needs --form\n")
    ok = all(r.passed for r in reports)
    doc = {"version": __version__, "config": asdict(cfg), "passed": ok, "skipped": skipped,
           "criteria": [r.to_dict() for r in reports],
           "fitted_constants": {f"criterion_{r.number}": r.fitted for r in reports}}
    _emit(json.dumps(doc, indent=2, default=_json_default) + "\n", cfg.out, f"verify_{args.suite}.json")
    return 0 if ok else 1


def _json_default(o):
    if hasattr(o, "item"):
        return o.item()
    if isinstance(o, float) and math.isinf(o):
        return "inf"
    return str(o)


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="georestrict", description="Geodesic restrictions and toric periods.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("field-info", help="Pell solution, unit, class group and forms of Q(sqrt D)")
    p.add_argument("D", type=int)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_field_info)

    p = sub.add_parser("lvalues", help="CSV of L(1/2, f x theta_chi) over characters and n")
    p.add_argument("D", type=int)
    p.add_argument("form", help=f"coefficient file (path, or name inside ${DATA_ENV})")
    p.add_argument("--n-min", type=int, default=-6)
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--data-dir")
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_lvalues)

    p = sub.add_parser("verify", help="run verification suites and write a JSON report")
    p.add_argument("suite")
    p.add_argument("--D", type=int, default=5)
    p.add_argument("--t", type=float, default=20.0)
    p.add_argument("--dmax", type=int, default=200)
    p.add_argument("--form")
    p.add_argument("--data-dir")
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) if exc.code in (0, None) else 2
    try:
        return args.func(args)
    except (UsageError, qf.NotFundamentalError, lf.SchemaError, lf.HeckeRelationError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
