"""Web of Science tagged plain-text codec ("Other Reference Software" export).

File grammar: each line is a 2-character tag, a space, and a value;
continuation lines are 3 spaces plus a value and extend the most recent tag.
A file opens with FN, each record runs PT..ER, and the file closes with EF.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass
from typing import IO, Iterable, Optional

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


class MalformedFile(ValueError):
    """Structural file error (missing FN header or EF terminator)."""

    def __init__(self, message: str, line: int, name: str = "<stream>"):
        super().__init__(f"{name}:{line}: {message}")
        self.line = line
        self.name = name


class MalformedRecord(ValueError):
    """A record block is not terminated by ER."""

    def __init__(self, message: str, line: int, name: str = "<stream>"):
        super().__init__(f"{name}:{line}: {message}")
        self.line = line
        self.name = name


_TAG_LINE = re.compile(r"^([A-Z0-9]{2})(?: (.*))?$")
_VOLUME_SEG = re.compile(r"^[Vv]\d+$")
_PAGE_SEG = re.compile(r"^[Pp][A-Za-z0-9]+$")


def parse_wos_cr(line: str) -> CitedReference:
    """Parse one CR line into a CitedReference. Never raises.

    Comma-separated segments are assigned positionally: the first segment is
    the (single) author unless it matches a marker; the first four-digit
    segment inside the plausible year range is the RPY; the first non-marker
    segment after the RPY is the source; "V<digits>" is the volume,
    "P<alnum>" the page, and "DOI <rest>" the DOI. Anything else stays only
    in the preserved raw string.
    """
    raw = line
    authors: list[str] = []
    rpy: Optional[int] = None
    source: Optional[str] = None
    volume: Optional[str] = None
    page: Optional[str] = None
    doi: Optional[str] = None

    segments = [seg.strip() for seg in line.split(",")]
    for idx, seg in enumerate(segments):
        if not seg:
            continue
        is_year = seg.isdigit() and len(seg) == 4 and YEAR_MIN <= int(seg) <= YEAR_MAX
        if rpy is None and is_year:
            rpy = int(seg)
            continue
        if idx == 0:
            authors.append(seg)
            continue
        if _VOLUME_SEG.match(seg):
            if volume is None:
                volume = seg
            continue
        if _PAGE_SEG.match(seg):
            if page is None:
                page = seg
            continue
        if seg.startswith("DOI "):
            if doi is None:
                doi = seg[4:].strip().lower() or None
            continue
        if is_year:
            continue  # extra year-shaped segment, rpy already taken
        if rpy is not None and source is None:
            source = seg

    return CitedReference(
        id=cr_id_for(raw),
        raw=raw,
        origin=Origin.WOS,
        authors=authors,
        source=source,
        rpy=rpy,
        volume=volume,
        page=page,
        doi=doi,
    )


@dataclass
class _Block:
    """One PT..ER record as ordered (tag, values) pairs."""

    tags: list[tuple[str, list[str]]]
    first_line: int

    def value_of(self, tag: str) -> Optional[str]:
        for t, values in self.tags:
            if t == tag and values:
                return values[0]
        return None


def _read_blocks(text: str, name: str) -> list[_Block]:
    lines = text.splitlines()
    blocks: list[_Block] = []
    current: Optional[_Block] = None
    current_values: Optional[list[str]] = None
    saw_fn = False
    saw_ef = False

    for lineno, rawline in enumerate(lines, start=1):
        line = rawline.rstrip()
        if not line:
            continue
        if not saw_fn:
            if line[:2] != "FN":
                raise MalformedFile("file does not start with an FN header", lineno, name)
            saw_fn = True
            continue
        if line == "EF":
            if current is not None:
                raise MalformedRecord("record not terminated by ER before EF", lineno, name)
            saw_ef = True
            break
        if line.startswith("   "):
            if current_values is not None:
                current_values.append(line[3:])
            continue
        m = _TAG_LINE.match(line)
        if m is None:
            # salvage: treat stray text as a continuation of the open tag
            if current_values is not None:
                current_values.append(line.strip())
            continue
        tag, value = m.group(1), m.group(2) or ""
        if tag == "PT":
            if current is not None:
                raise MalformedRecord("new record starts before ER", lineno, name)
            current = _Block(tags=[], first_line=lineno)
        if current is None:
            continue  # header tags such as VR live outside records
        if tag == "ER":
            blocks.append(current)
            current = None
            current_values = None
            continue
        current_values = [value]
        current.tags.append((tag, current_values))

    if current is not None:
        raise MalformedRecord("record not terminated by ER", current.first_line, name)
    if not saw_fn and lines:
        raise MalformedFile("file does not start with an FN header", 1, name)
    if not saw_ef:
        raise MalformedFile("missing EF terminator", len(lines) + 1, name)
    return blocks


def _publication_from_block(block: _Block, table: dict[str, CitedReference]) -> CitingPublication:
    fields: dict[str, list[str]] = {}
    cr_ids: list[str] = []
    for tag, values in block.tags:
        if tag == "CR":
            for value in values:
                if not value.strip():
                    continue
                cr_ids.append(add_occurrence(table, parse_wos_cr(value)))
            continue
        if tag in fields:
            fields[tag].extend(values)
        else:
            fields[tag] = list(values)

    pub_year: Optional[int] = None
    py = fields.get("PY")
    if py and py[0].strip().isdigit():
        pub_year = int(py[0].strip())

    ut = fields.get("UT")
    if ut and ut[0].strip():
        pub_id = ut[0].strip()
    else:
        blob = "\n".join(f"{t} {v}" for t, vs in block.tags for v in vs)
        pub_id = "rec" + raw_digest(blob)[:16]
    return CitingPublication(id=pub_id, fields=fields, pub_year=pub_year, cr_ids=cr_ids)


def parse_wos(streams: Iterable[IO[str] | str], names: Optional[list[str]] = None) -> Dataset:
    """Parse one or more WoS export files into a single dataset.

    Records that share a UT accession value across the inputs are kept once,
    first occurrence wins (records without UT deduplicate on full block text).
    """
    ds = Dataset(origin=Origin.WOS)
    seen: set[str] = set()
    for idx, stream in enumerate(streams):
        name = names[idx] if names else getattr(stream, "name", f"stream-{idx}")
        text = stream if isinstance(stream, str) else stream.read()
        blocks = _read_blocks(text, name)
        kept = 0
        for block in blocks:
            ut = block.value_of("UT")
            key = ut.strip() if ut and ut.strip() else "text:" + raw_digest(
                "\n".join(f"{t} {v}" for t, vs in block.tags for v in vs)
            )
            if key in seen:
                continue
            seen.add(key)
            ds.publications.append(_publication_from_block(block, ds.crs))
            kept += 1
        ds.sources.append(
            SourceFile(name=name, kind="wos", text=text, records=kept, skipped=len(blocks) - kept)
        )
    return ds


def _render_cr_line(cr: CitedReference) -> str:
    """Render a CR in the WoS line grammar: at most one author, no title."""
    if cr.origin is Origin.WOS:
        return cr.raw
    segments: list[str] = []
    if cr.authors:
        segments.append(cr.authors[0].replace(",", "").strip())
    if cr.rpy is not None:
        segments.append(str(cr.rpy))
    if cr.source:
        segments.append(cr.source.replace(",", " ").strip())
    if cr.volume:
        vol = cr.volume.strip()
        segments.append(vol if _VOLUME_SEG.match(vol) else "V" + re.sub(r"\D", "", vol))
    if cr.page:
        page = cr.page.strip()
        segments.append(page if _PAGE_SEG.match(page) else "P" + re.sub(r"[^A-Za-z0-9]", "", page))
    if cr.doi:
        segments.append("DOI " + cr.doi)
    line = ", ".join(s for s in segments if s)
    return re.sub(r"[\r\n]+", " ", line) or cr.raw.replace("\n", " ").replace("\r", " ")


_SCOPUS_TAG_MAP = [
    ("AU", "Authors"),
    ("TI", "Title"),
    ("SO", "Source title"),
    ("PY", "Year"),
    ("VL", "Volume"),
    ("BP", "Page start"),
    ("DI", "DOI"),
    ("UT", "EID"),
]


def _scopus_fields_to_tags(pub: CitingPublication) -> list[tuple[str, list[str]]]:
    lookup = {key.strip().lower(): key for key in pub.fields}
    tags: list[tuple[str, list[str]]] = [("PT", ["J"])]
    for tag, column in _SCOPUS_TAG_MAP:
        key = lookup.get(column.lower())
        if key is None:
            continue
        value = pub.fields[key][0] if pub.fields[key] else ""
        if not value.strip():
            continue
        value = re.sub(r"[\r\n]+", " ", value)
        if tag == "AU":
            tags.append((tag, [a.strip() for a in value.split(";") if a.strip()]))
        else:
            tags.append((tag, [value]))
    return tags


def _emit_tag(out: io.StringIO, tag: str, values: list[str]) -> None:
    first = True
    for value in values:
        value = value.rstrip()
        if first:
            out.write(f"{tag} {value}".rstrip() + "\n")
            first = False
        else:
            out.write(f"   {value}".rstrip() + "\n")
    if first:  # tag present with no values
        out.write(tag + "\n")


def write_wos(ds: Dataset) -> str:
    """Serialize a dataset in the WoS tagged format.

    WoS-origin publications keep their vendor tags verbatim; Scopus-origin
    publications are mapped onto the WoS tag set. CR lines always carry at
    most the first author and never a title.
    """
    out = io.StringIO()
    out.write("FN CRKit Export\n")
    out.write("VR 1.0\n")
    for pub in ds.publications:
        if ds.origin is Origin.WOS:
            tags = [(tag, list(values)) for tag, values in pub.fields.items()]
        else:
            tags = _scopus_fields_to_tags(pub)
        cr_lines = [_render_cr_line(ds.crs[cid]) for cid in pub.cr_ids]
        has_nr = any(tag == "NR" for tag, _ in tags)
        for tag, values in tags:
            _emit_tag(out, tag, values)
        if cr_lines:
            _emit_tag(out, "CR", cr_lines)
            if not has_nr:
                _emit_tag(out, "NR", [str(len(cr_lines))])
        _emit_tag(out, "ER", [])
        out.write("\n")
    out.write("EF\n")
    return out.getvalue()
