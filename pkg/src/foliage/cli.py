"""Command line runner.

    foliage verify <scenario.json | gallery-name> [--seed N] [--samples N]
            [--tol X] [--order K] [--fd-check] [--format json|markdown]
            [--out PATH]
    foliage gallery list
    foliage gallery <name> [--emit PATH]

Exit codes: 0 all checks pass, 1 at least one check fails, 2 scenario or
schema error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import report as report_mod
from .chart import load_chart
from .checks import CheckContext, fd_audit, run_check
from .errors import FoliageError, SchemaError, UnknownGallery
from .gallery import gallery_listing, gallery_names, gallery_scenario
from .maps import load_map

EXIT_PASS, EXIT_FAIL, EXIT_SCHEMA, EXIT_INTERNAL = 0, 1, 2, 3


def load_scenario(source):
    """Scenario from a JSON file path or a gallery name."""
    if os.path.exists(source):
        try:
            with open(source, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as err:
            raise SchemaError(f"cannot read scenario {source!r}: {err}")
    else:
        if source in gallery_names() or source == "all":
            doc = gallery_scenario(source)
        else:
            raise SchemaError(f"{source!r} is neither a file nor a built-in "
                              f"scenario (try: {', '.join(gallery_names())})")
    if not isinstance(doc, dict) or "checks" not in doc:
        raise SchemaError("scenario must be an object with a 'checks' list")
    return doc


def build_objects(doc, probe_seed=42):
    charts = {}
    for name, spec in (doc.get("charts") or {}).items():
        charts[name] = load_chart(spec, name=name, probe_seed=probe_seed)
    maps = {}
    for name, spec in (doc.get("maps") or {}).items():
        maps[name] = load_map(spec, charts, name=name, probe_seed=probe_seed)
    return charts, maps


def run_scenario(doc, overrides=None, fd_check=False):
    overrides = overrides or {}
    charts, maps = build_objects(doc)
    ctx = CheckContext(doc.get("name", "scenario"), charts, maps, overrides)
    rows = [run_check(ctx, spec) for spec in doc["checks"]]
    fd_rows = None
    if fd_check:
        fd_rows = fd_audit(ctx, int(overrides.get("seed") or 42),
                           min(int(overrides.get("order") or 3), 3))
    return report_mod.assemble(doc.get("name", "scenario"), rows, overrides,
                               fd_rows)


def _cmd_verify(args):
    doc = load_scenario(args.scenario)
    overrides = {"seed": args.seed, "samples": args.samples,
                 "tolerance": args.tol, "order": args.order}
    rep = run_scenario(doc, overrides, fd_check=args.fd_check)
    fmt = args.format or doc.get("output", "json")
    text = (report_mod.to_markdown(rep) if fmt == "markdown"
            else report_mod.to_json(rep))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_PASS if rep["summary"]["status"] == "pass" else EXIT_FAIL


def _cmd_gallery(args):
    if args.name == "list":
        for name, desc in gallery_listing():
            print(f"{name:26s} {desc}")
        return EXIT_PASS
    doc = gallery_scenario(args.name)
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.emit:
        with open(args.emit, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_PASS


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="foliage",
        description="Pointwise verification of foliated-geometry identities "
                    "and curvature bounds on model charts.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run a scenario's checks")
    p_verify.add_argument("scenario",
                          help="scenario JSON path or built-in name")
    p_verify.add_argument("--seed", type=int, default=None)
    p_verify.add_argument("--samples", type=int, default=None)
    p_verify.add_argument("--tol", type=float, default=None,
                          dest="tol", help="override every check tolerance")
    p_verify.add_argument("--order", type=int, default=None,
                          help="jet truncation order (3 or 4)")
    p_verify.add_argument("--fd-check", action="store_true",
                          help="cross-validate jet derivatives against "
                               "finite differences")
    p_verify.add_argument("--format", choices=("json", "markdown"),
                          default=None)
    p_verify.add_argument("--out", default=None, help="write report here")
    p_verify.set_defaults(fn=_cmd_verify)

    p_gal = sub.add_parser("gallery", help="list or emit built-in scenarios")
    p_gal.add_argument("name", help="'list' or a scenario name")
    p_gal.add_argument("--emit", default=None, help="write scenario JSON here")
    p_gal.set_defaults(fn=_cmd_gallery)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (SchemaError, UnknownGallery) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_SCHEMA
    except FoliageError as err:
        print(f"check error: {err}", file=sys.stderr)
        return EXIT_FAIL
    except Exception as err:  # noqa: BLE001 - the CLI contract wants exit 3
        print(f"internal error: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
