"""Batch front door: import, convert, cluster, merge, analyze, filter, serve.

Pipeline state travels between subcommands as `.cre` files, so every step is
resumable and shareable. Exit codes: 0 success, 1 usage error, 2 data error.
Diagnostics go to stderr; requested data goes to stdout or the output file.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
from typing import Optional

from . import analysis, matching, scopus, store, wos
from .model import Dataset, Origin, display_details, merge_datasets

log = logging.getLogger("crkit")


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit(2); we want exit(1)
        raise UsageError(message)


def _setup_logging() -> None:
    level = {"quiet": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}.get(
        os.environ.get("CRX_LOG", "info").lower(), logging.INFO
    )
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(message)s")


def _build_parser() -> _Parser:
    parser = _Parser(prog="crkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("import", help="import vendor export files into a .cre state")
    p.add_argument("--format", required=True, choices=["wos", "scopus"])
    p.add_argument("files", nargs="+", metavar="FILE")
    p.add_argument("-o", "--output", required=True, metavar="STATE.cre")

    p = sub.add_parser("export", help="export a .cre state to a vendor format")
    p.add_argument("--format", required=True, choices=["wos", "scopus"])
    p.add_argument("state", metavar="STATE.cre")
    p.add_argument("-o", "--output", required=True, metavar="FILE")

    p = sub.add_parser("cluster", help="cluster equivalent cited references")
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--rpy-slack", type=int, default=None)
    p.add_argument("--all-years", action="store_true", help="compare across all years")
    p.add_argument("state", metavar="STATE.cre")

    p = sub.add_parser("merge", help="merge cited references of the same cluster")
    p.add_argument("state", metavar="STATE.cre")

    p = sub.add_parser("rpys", help="write the year spectrum as CSV")
    p.add_argument("state", metavar="STATE.cre")
    p.add_argument("-o", "--output", default=None, metavar="SPECTRUM.csv")

    p = sub.add_parser("top", help="most cited references of one year")
    p.add_argument("--rpy", type=int, required=True)
    p.add_argument("-k", type=int, default=10)
    p.add_argument("state", metavar="STATE.cre")

    p = sub.add_parser("remove-year", help="remove cited references by year range")
    p.add_argument("--from", dest="year_from", type=int, required=True)
    p.add_argument("--to", dest="year_to", type=int, required=True)
    p.add_argument("--drop-missing", action="store_true", help="also drop CRs without a year")
    p.add_argument("state", metavar="STATE.cre")

    p = sub.add_parser("details", help="show all fields of one cited reference")
    p.add_argument("--cr", required=True, metavar="CR_ID")
    p.add_argument("state", metavar="STATE.cre")

    p = sub.add_parser("serve", help="serve the curation API and UI")
    p.add_argument("state", metavar="STATE.cre")
    p.add_argument("--port", type=int, default=8600)
    p.add_argument("--host", default="127.0.0.1")

    return parser


def _import(args: argparse.Namespace) -> int:
    if args.format == "wos":
        texts = []
        for name in args.files:
            with open(name, "r", encoding="utf-8", errors="surrogateescape") as fh:
                texts.append(fh.read())
        ds = wos.parse_wos(texts, names=list(args.files))
    else:
        parts = []
        for name in args.files:
            with open(name, "r", encoding="utf-8", errors="surrogateescape", newline="") as fh:
                parts.append(scopus.parse_scopus_csv(fh.read(), name=name))
        ds = merge_datasets(parts, Origin.SCOPUS) if len(parts) > 1 else parts[0]
    ds.validate()
    store.save_cre_path(store.new_state(ds), args.output)
    log.info(
        "imported %d publications, %d cited references (%d occurrences) -> %s",
        len(ds.publications),
        len(ds.crs),
        ds.total_n_cr(),
        args.output,
    )
    for src in ds.sources:
        if src.skipped:
            print(f"warning: {src.name}: {src.skipped} records skipped", file=sys.stderr)
    return 0


def _loss_report(ds: Dataset, target: str) -> list[str]:
    """Fields the target format cannot carry, per the conversion rules."""
    lines: list[str] = []
    if target == "wos" and ds.origin is not Origin.WOS:
        extra_authors = sum(max(0, len(cr.authors) - 1) for cr in ds.crs.values())
        titles = sum(1 for cr in ds.crs.values() if cr.title)
        if extra_authors:
            lines.append(f"loss: {extra_authors} cited-reference authors beyond the first")
        if titles:
            lines.append(f"loss: titles of {titles} cited references")
        mapped = {c.lower() for c, _ in wos._SCOPUS_TAG_MAP}
        dropped = sorted(
            {
                key
                for pub in ds.publications
                for key in pub.fields
                if key.strip().lower() not in mapped
            }
        )
        if dropped:
            lines.append(f"loss: publication columns {', '.join(dropped)}")
    elif target == "scopus" and ds.origin is Origin.WOS:
        volumes = sum(1 for cr in ds.crs.values() if cr.volume)
        dois = sum(1 for cr in ds.crs.values() if cr.doi)
        if volumes:
            lines.append(f"loss: volumes of {volumes} cited references")
        if dois:
            lines.append(f"loss: DOIs of {dois} cited references")
        mapped = {tag for _, tag in scopus._WOS_COLUMN_MAP}
        dropped = sorted(
            {
                tag
                for pub in ds.publications
                for tag in pub.fields
                if tag not in mapped and tag not in ("CR", "NR")
            }
        )
        if dropped:
            lines.append(f"loss: record tags {', '.join(dropped)}")
    return lines


def _export(args: argparse.Namespace) -> int:
    state = store.load_cre_path(args.state)
    text = wos.write_wos(state.dataset) if args.format == "wos" else scopus.write_scopus_csv(
        state.dataset
    )
    newline = "" if args.format == "scopus" else None
    with open(args.output, "w", encoding="utf-8", errors="surrogateescape", newline=newline) as fh:
        fh.write(text)
    for line in _loss_report(state.dataset, args.format):
        print(line, file=sys.stderr)
    log.info("exported %d publications -> %s", len(state.dataset.publications), args.output)
    return 0


def _cluster(args: argparse.Namespace) -> int:
    if args.threshold is not None and not 0.0 <= args.threshold <= 1.0:
        raise UsageError(f"--threshold must be in [0, 1], got {args.threshold}")
    if args.rpy_slack is not None and args.rpy_slack < 0:
        raise UsageError("--rpy-slack must be >= 0")
    state = store.load_cre_path(args.state)
    cfg = state.config
    if args.threshold is not None:
        cfg.threshold = args.threshold
    if args.rpy_slack is not None:
        cfg.rpy_slack = args.rpy_slack
    if args.all_years:
        cfg.same_rpy_only = False
    state = store.clustered_state(state, cfg)
    store.save_cre_path(state, args.state)
    multi = sum(1 for members in state.cluster_state.clusters().values() if len(members) > 1)
    print(
        f"{len(state.dataset.crs)} cited references, {multi} clusters with 2+ members "
        f"(threshold {cfg.threshold})"
    )
    return 0


def _merge(args: argparse.Namespace) -> int:
    state = store.load_cre_path(args.state)
    before = len(state.dataset.crs)
    state = store.merged_state(state)
    store.save_cre_path(state, args.state)
    print(
        f"merged {before} cited references into {len(state.dataset.crs)} "
        f"({state.dataset.total_n_cr()} occurrences conserved)"
    )
    return 0


def _rpys(args: argparse.Namespace) -> int:
    state = store.load_cre_path(args.state)
    spectrum = analysis.rpy_histogram(state.dataset)
    out = io.StringIO(newline="")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["rpy", "n_cr", "median_dev"])
    for row in spectrum.rows:
        writer.writerow([row.rpy, row.n_cr, row.median_dev])
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(out.getvalue())
    else:
        sys.stdout.write(out.getvalue())
    if spectrum.excluded_n_cr:
        print(
            f"note: {spectrum.excluded_n_cr} occurrences lack a publication year",
            file=sys.stderr,
        )
    return 0


def _top(args: argparse.Namespace) -> int:
    if args.k < 1:
        raise UsageError("-k must be >= 1")
    state = store.load_cre_path(args.state)
    for cr in analysis.top_crs_for_rpy(state.dataset, args.rpy, args.k):
        sys.stdout.write(f"{cr.n_cr}\t{cr.raw}\n")
    return 0


def _remove_year(args: argparse.Namespace) -> int:
    if args.year_from > args.year_to:
        raise UsageError(f"empty year range [{args.year_from}, {args.year_to}]")
    state = store.load_cre_path(args.state)
    before = state.dataset.total_n_cr()
    state = store.removed_years_state(
        state, args.year_from, args.year_to, keep_missing=not args.drop_missing
    )
    store.save_cre_path(state, args.state)
    print(f"removed {before - state.dataset.total_n_cr()} occurrences")
    return 0


def _details(args: argparse.Namespace) -> int:
    state = store.load_cre_path(args.state)
    cr = state.dataset.crs.get(args.cr)
    if cr is None:
        print(f"error: unknown cited reference id {args.cr}", file=sys.stderr)
        return 2
    for label, value in display_details(cr):
        sys.stdout.write(f"{label}: {value}\n")
    return 0


def _serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(args.state)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


_COMMANDS = {
    "import": _import,
    "export": _export,
    "cluster": _cluster,
    "merge": _merge,
    "rpys": _rpys,
    "top": _top,
    "remove-year": _remove_year,
    "details": _details,
    "serve": _serve,
}

_DATA_ERRORS = (
    wos.MalformedFile,
    wos.MalformedRecord,
    scopus.MissingColumn,
    store.CreError,
    matching.UnknownCrId,
    OSError,
)


def run(argv: list[str]) -> int:
    _setup_logging()
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except SystemExit as exc:  # --help and friends
        code = exc.code
        return int(code) if isinstance(code, int) else 0
    except _DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
