#!/usr/bin/env python3
"""Run the acceptance criteria outside pytest and write a JSON report.

    python3 scripts/run_acceptance.py --form data/maass_even_13.78.json --out reports/
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from georestrict import __version__, verify
from georestrict.cli import _json_default
from georestrict.lfunctions import load_maass_form


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--form", type=Path, default=Path("data/maass_even_13.78.json"))
    ap.add_argument("--only", type=int, nargs="*", help="criterion numbers (default: all)")
    ap.add_argument("--out", type=Path, default=None)
    args = ap.parse_args(argv)

    form = load_maass_form(args.form)
    reports = []
    for c in args.only or sorted(verify.CRITERIA):
        fn = verify.CRITERIA[c]
        r = fn(form) if c in verify.FORM_CRITERIA else fn()
        print(r.summary(), flush=True)
        reports.append(r)
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        doc = {"version": __version__, "form": str(args.form), "passed": all(r.passed for r in reports),
               "criteria": [r.to_dict() for r in reports]}
        (args.out / "acceptance.json").write_text(json.dumps(doc, indent=2, default=_json_default) + "\n")
    return 0 if all(r.passed for r in reports) else 1


if __name__ == "__main__":
    sys.exit(main())
