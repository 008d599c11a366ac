"""Scopus CSV codec (export "CSV" with the References column).

The References cell holds the reference strings joined by "; ". Scopus
reference strings are frequently fragmented, so the string parser assigns
only what it can confidently place and leaves the rest in the raw text.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass
from typing import IO, Optional

from .model import (
    YEAR_MAX,
    YEAR_MIN,
    CitedReference,
    CitingPublication,
    Dataset,
    Origin,
    SourceFile,
    add_occurrence,
    cr_id_for,
    raw_digest,
)


class MissingColumn(ValueError):
    """The CSV lacks a required column."""

    def __init__(self, column: str):
        super().__init__(f"required column {column!r} not found in header")
        self.column = column


@dataclass
class RowError:
    """A skipped CSV row, kept for reporting."""

    row: int
    message: str


# One author as "Surname I." / "SURNAME I" (initials with optional dots),
# possibly a multi-word surname.
_NAME_SINGLE = re.compile(r"^(?:[A-Z][A-Za-z'’-]+ )+(?:[A-Z]\.?-?){1,5}\.?$")
# Pair shape "Surname, I." split across two comma segments.
_NAME_SURNAME = re.compile(r"^[A-Z][A-Za-z'’ -]+$")
_NAME_INITIALS = re.compile(r"^(?:[A-Z]\.?-?){1,5}\.?$")

_YEAR_PAREN = re.compile(r"\((\d{4})\)")
_PAGE_BEFORE = re.compile(r"(\d+)\s*pp?\.")
_PAGE_AFTER = re.compile(r"\bpp?\.\s*(\d+)")


def _take_authors(head: str) -> tuple[list[str], str]:
    """Greedily consume leading name-like tokens; returns (authors, rest)."""
    parts = head.split(", ")
    authors: list[str] = []
    i = 0
    while i < len(parts):
        part = parts[i].strip()
        if part and _NAME_SINGLE.match(part):
            authors.append(part)
            i += 1
            continue
        if (
            part
            and i + 1 < len(parts)
            and _NAME_SURNAME.match(part)
            and _NAME_INITIALS.match(parts[i + 1].strip())
        ):
            authors.append(part + ", " + parts[i + 1].strip())
            i += 2
            continue
        break
    rest = ", ".join(parts[i:])
    return authors, rest


def parse_scopus_cr(text: str) -> CitedReference:
    """Parse one Scopus reference string. Never raises.

    The RPY is the first "(dddd)" whose value is a plausible year. Authors
    are leading name-like tokens, the title is what sits between them and the
    year, the source is the first non-empty comma segment after the year, and
    the page is the number adjacent to "p."/"pp.". Unassigned text is not
    guessed at; it stays in the raw string.
    """
    raw = text
    rpy: Optional[int] = None
    year_match = None
    for m in _YEAR_PAREN.finditer(text):
        year = int(m.group(1))
        if YEAR_MIN <= year <= YEAR_MAX:
            rpy = year
            year_match = m
            break

    head = text[: year_match.start()] if year_match else text
    tail = text[year_match.end() :] if year_match else ""

    authors, rest = _take_authors(head)
    title: Optional[str] = None
    if year_match is not None:
        cleaned = rest.strip().strip(",").strip()
        if cleaned:
            title = cleaned

    source: Optional[str] = None
    for segment in tail.split(","):
        segment = segment.strip()
        if segment:
            source = segment
            break

    page: Optional[str] = None
    m = _PAGE_BEFORE.search(text) or _PAGE_AFTER.search(text)
    if m:
        page = m.group(1)

    return CitedReference(
        id=cr_id_for(raw),
        raw=raw,
        origin=Origin.SCOPUS,
        authors=authors,
        title=title,
        source=source,
        rpy=rpy,
        page=page,
    )


def split_references_cell(cell: str) -> list[str]:
    """Top-level split of a References cell; whitespace-only pieces drop."""
    return [piece for piece in cell.split("; ") if piece.strip()]


def parse_scopus_csv(stream: IO[str] | str, name: str = "<stream>") -> Dataset:
    """Parse one Scopus CSV export into a dataset.

    Raises MissingColumn when no References column exists. Malformed rows
    (extra cells, CSV errors) are skipped and counted, never fatal.
    """
    text = stream if isinstance(stream, str) else stream.read()
    if text.startswith("﻿"):
        text = text[1:]
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except (StopIteration, csv.Error):
        raise MissingColumn("References")

    ref_idx: Optional[int] = None
    for idx, column in enumerate(header):
        if column.strip().lower() == "references":
            ref_idx = idx
    if ref_idx is None:
        raise MissingColumn("References")

    eid_idx = next(
        (i for i, c in enumerate(header) if c.strip().lower() == "eid"), None
    )

    ds = Dataset(origin=Origin.SCOPUS)
    errors: list[RowError] = []
    rowno = 1
    while True:
        rowno += 1
        try:
            row = next(reader)
        except StopIteration:
            break
        except csv.Error as exc:
            errors.append(RowError(rowno, f"csv error: {exc}"))
            break
        if len(row) > len(header) and any(c.strip() for c in row[len(header) :]):
            errors.append(RowError(rowno, f"row has {len(row)} cells, header has {len(header)}"))
            continue
        row = row + [""] * (len(header) - len(row))

        fields: dict[str, list[str]] = {}
        for idx, column in enumerate(header):
            if idx == ref_idx:
                continue
            fields[column] = [row[idx]]

        cr_ids = [
            add_occurrence(ds.crs, parse_scopus_cr(piece))
            for piece in split_references_cell(row[ref_idx])
        ]

        pub_year: Optional[int] = None
        for column, values in fields.items():
            if column.strip().lower() == "year" and values[0].strip().isdigit():
                pub_year = int(values[0].strip())
                break

        if eid_idx is not None and row[eid_idx].strip():
            pub_id = row[eid_idx].strip()
        else:
            pub_id = "row" + raw_digest("\x1f".join(row))[:16] + f"-{rowno}"
        ds.publications.append(
            CitingPublication(id=pub_id, fields=fields, pub_year=pub_year, cr_ids=cr_ids)
        )

    ds.sources.append(
        SourceFile(
            name=name, kind="scopus", text=text, records=len(ds.publications), skipped=len(errors)
        )
    )
    return ds


MIN_COLUMNS = ["Authors", "Title", "Year", "Source title", "Volume", "Page start", "DOI", "References"]


def render_scopus_cr(cr: CitedReference) -> str:
    """Render a CR in the Scopus reference-string grammar.

    Scopus-origin CRs are emitted verbatim so nothing is lost; other origins
    are rendered as "Authors, Title (year) Source, pp. N" with the title
    segment left empty when the CR has none (WoS never supplies one).
    """
    if cr.origin is Origin.SCOPUS:
        return cr.raw
    out = ""
    if cr.authors:
        out = ", ".join(a.strip() for a in cr.authors) + ", "
    if cr.title:
        out += cr.title.strip() + " "
    if cr.rpy is not None:
        out += f"({cr.rpy})"
    if cr.source:
        out += " " + cr.source.strip()
    if cr.page:
        digits = re.sub(r"\D", "", cr.page)
        if digits:
            out += f", pp. {digits}"
    out = out.strip().strip(",").strip()
    if not out:
        out = cr.raw
    # keep the rendered string to one cell slot
    return out.replace("; ", ", ").replace("\r", " ").replace("\n", " ")


_WOS_COLUMN_MAP = [
    ("Authors", "AU"),
    ("Title", "TI"),
    ("Year", "PY"),
    ("Source title", "SO"),
    ("Volume", "VL"),
    ("Page start", "BP"),
    ("DOI", "DI"),
]


def _wos_pub_cells(pub: CitingPublication) -> dict[str, str]:
    cells: dict[str, str] = {}
    for column, tag in _WOS_COLUMN_MAP:
        values = pub.fields.get(tag)
        if not values:
            continue
        if tag == "AU":
            cells[column] = "; ".join(v.strip() for v in values if v.strip())
        else:
            cells[column] = " ".join(v.strip() for v in values).strip()
    return cells


def write_scopus_csv(ds: Dataset) -> str:
    """Serialize a dataset as a Scopus-style CSV.

    Scopus-origin publications keep all their original columns; other
    origins are mapped onto the minimum column set. The References cell is
    rebuilt from the publication's CR slots.
    """
    out = io.StringIO(newline="")
    writer = csv.writer(out, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")

    if ds.origin is Origin.SCOPUS and ds.publications:
        columns = list(ds.publications[0].fields.keys()) + ["References"]
    else:
        columns = list(MIN_COLUMNS)
    writer.writerow(columns)

    for pub in ds.publications:
        if ds.origin is Origin.SCOPUS:
            cells = {column: values[0] if values else "" for column, values in pub.fields.items()}
        else:
            cells = _wos_pub_cells(pub)
        references = "; ".join(render_scopus_cr(ds.crs[cid]) for cid in pub.cr_ids)
        row = [references if c == "References" else cells.get(c, "") for c in columns]
        writer.writerow(row)
    return out.getvalue()
