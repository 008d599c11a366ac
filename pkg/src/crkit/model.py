"""Shared data model: citing publications, cited references, match decisions.

Every other module builds on these types. Values are treated as immutable
after construction; operations that "change" a dataset return a new one.
"""

from __future__ import annotations

import hashlib
import re
import unicodedata
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, NamedTuple, Optional

YEAR_MIN = 1000  # bounds reject page numbers misparsed as years
YEAR_MAX = 2999


class Origin(str, Enum):
    WOS = "WOS"
    SCOPUS = "SCOPUS"
    MIXED = "MIXED"


class Verdict(str, Enum):
    SAME = "SAME"
    DIFFERENT = "DIFFERENT"


class Provenance(str, Enum):
    ALGORITHM = "ALGORITHM"
    MANUAL = "MANUAL"


def raw_digest(raw: str) -> str:
    """Content digest of a cited-reference string (used for stable ids and
    for storing manual decisions so they survive re-import)."""
    return hashlib.sha256(raw.encode("utf-8", "surrogatepass")).hexdigest()


def cr_id_for(raw: str) -> str:
    """Stable opaque id for a cited reference, derived from its trimmed text."""
    return "cr" + raw_digest(raw.strip())[:16]


@dataclass
class CitedReference:
    """One cited-reference occurrence group.

    ``raw`` is the exact source text. Bibliographic fields are best-effort
    parses and may be absent. ``n_cr`` counts how many citing-publication CR
    slots this entry represents.
    """

    id: str
    raw: str
    origin: Origin
    authors: list[str] = field(default_factory=list)
    title: Optional[str] = None
    source: Optional[str] = None
    rpy: Optional[int] = None
    volume: Optional[str] = None
    page: Optional[str] = None
    doi: Optional[str] = None
    n_cr: int = 1

    def __post_init__(self) -> None:
        if self.doi is not None:
            self.doi = self.doi.lower()


@dataclass
class CitingPublication:
    """One exported record with its ordered cited-reference slot list.

    ``fields`` keeps every vendor field verbatim and in vendor order, except
    the reference list itself, which lives in ``cr_ids`` (one id per slot).
    """

    id: str
    fields: dict[str, list[str]]
    pub_year: Optional[int] = None
    cr_ids: list[str] = field(default_factory=list)


@dataclass
class SourceFile:
    """Provenance of one imported file, including its original text."""

    name: str
    kind: str
    text: str
    records: int = 0
    skipped: int = 0


@dataclass
class Dataset:
    origin: Origin
    publications: list[CitingPublication] = field(default_factory=list)
    crs: dict[str, CitedReference] = field(default_factory=dict)
    sources: list[SourceFile] = field(default_factory=list)

    def total_slots(self) -> int:
        return sum(len(p.cr_ids) for p in self.publications)

    def total_n_cr(self) -> int:
        return sum(cr.n_cr for cr in self.crs.values())

    def validate(self) -> None:
        """Check the dataset invariants; raises ValueError on violation."""
        for pub in self.publications:
            for cid in pub.cr_ids:
                if cid not in self.crs:
                    raise ValueError(f"publication {pub.id} references unknown CR {cid}")
        for cid, cr in self.crs.items():
            if cr.id != cid:
                raise ValueError(f"CR table key {cid} does not match entry id {cr.id}")
            if not cr.raw:
                raise ValueError(f"CR {cid} has empty raw text")
            if cr.n_cr < 1:
                raise ValueError(f"CR {cid} has n_cr {cr.n_cr} < 1")
            if cr.rpy is not None and not (YEAR_MIN <= cr.rpy <= YEAR_MAX):
                raise ValueError(f"CR {cid} has rpy {cr.rpy} outside [{YEAR_MIN}, {YEAR_MAX}]")
            if cr.origin is Origin.WOS and len(cr.authors) > 1:
                raise ValueError(f"WoS-origin CR {cid} carries {len(cr.authors)} authors")
        if self.total_n_cr() != self.total_slots():
            raise ValueError(
                f"occurrence conservation broken: sum n_cr {self.total_n_cr()} "
                f"!= total slots {self.total_slots()}"
            )


def add_occurrence(table: dict[str, CitedReference], cr: CitedReference) -> str:
    """Register one CR slot in a dataset's table.

    Entries that are byte-identical after trimming collapse into one row with
    summed n_cr; the first-seen parse wins. Returns the id to put in cr_ids.
    """
    existing = table.get(cr.id)
    if existing is None:
        table[cr.id] = cr
    else:
        existing.n_cr += cr.n_cr
    return cr.id


@dataclass(frozen=True)
class MatchDecision:
    """A same/different verdict on an orderless CR pair."""

    a: str
    b: str
    verdict: Verdict
    provenance: Provenance
    score: Optional[float] = None

    def __post_init__(self) -> None:
        if self.a == self.b:
            raise ValueError("a decision needs two distinct CR ids")
        if self.a > self.b:
            first, second = self.b, self.a
            object.__setattr__(self, "a", first)
            object.__setattr__(self, "b", second)

    @property
    def pair(self) -> tuple[str, str]:
        return (self.a, self.b)


def find_decision(decisions: Iterable[MatchDecision], a: str, b: str) -> Optional[MatchDecision]:
    """Orderless lookup: (a, b) and (b, a) find the same decision."""
    key = (a, b) if a <= b else (b, a)
    for d in decisions:
        if d.pair == key:
            return d
    return None


# --- normalization -----------------------------------------------------------

_NON_ALNUM = re.compile(r"[^0-9a-z ]+")
_WS = re.compile(r"\s+")


def fold_text(text: str) -> str:
    """Lowercase with diacritics folded via compatibility decomposition."""
    decomposed = unicodedata.normalize("NFKD", text)
    stripped = "".join(ch for ch in decomposed if not unicodedata.combining(ch))
    return stripped.lower()


def normalize_field(text: str) -> str:
    """Fold, lowercase, strip punctuation, collapse whitespace."""
    folded = fold_text(text)
    cleaned = _NON_ALNUM.sub("", folded)
    return _WS.sub(" ", cleaned).strip()


def _looks_like_initials(token: str) -> bool:
    alpha = [c for c in token if c.isalpha()]
    return 0 < len(alpha) <= 4 and (any(c.isupper() for c in token) or "." in token)


def surname_of(author: str) -> str:
    """Family-name part of a person-name string.

    "Garfield, E." takes the part before the comma; "GARFIELD E" drops the
    trailing initials token; anything else is taken whole.
    """
    name = author.strip()
    if "," in name:
        return name.split(",", 1)[0]
    tokens = name.split()
    if len(tokens) >= 2 and _looks_like_initials(tokens[-1]):
        return " ".join(tokens[:-1])
    return name


class NormalizedKey(NamedTuple):
    surname: str
    rpy: Optional[int]
    source_norm: str
    volume_norm: str
    page_norm: str
    doi: Optional[str]


def canonical_key(cr: CitedReference) -> NormalizedKey:
    """Deterministic normalized key used for similarity scoring.

    Absent fields map to empty strings; leading volume/page markers ("V122",
    "P108") are dropped when followed by a digit.
    """
    surname = normalize_field(surname_of(cr.authors[0])) if cr.authors else ""
    source_norm = normalize_field(cr.source) if cr.source else ""
    volume_norm = normalize_field(cr.volume) if cr.volume else ""
    volume_norm = re.sub(r"^v(?=\d)", "", volume_norm)
    page_norm = normalize_field(cr.page) if cr.page else ""
    page_norm = re.sub(r"^pp?(?=\d)", "", page_norm)
    doi = cr.doi.lower() if cr.doi else None
    return NormalizedKey(surname, cr.rpy, source_norm, volume_norm, page_norm, doi)


def display_details(cr: CitedReference) -> list[tuple[str, str]]:
    """Labeled rows covering raw plus every present field, n_cr, and origin."""
    rows: list[tuple[str, str]] = [("raw", cr.raw)]
    if cr.authors:
        rows.append(("authors", "; ".join(cr.authors)))
    if cr.title is not None:
        rows.append(("title", cr.title))
    if cr.source is not None:
        rows.append(("source", cr.source))
    if cr.rpy is not None:
        rows.append(("rpy", str(cr.rpy)))
    if cr.volume is not None:
        rows.append(("volume", cr.volume))
    if cr.page is not None:
        rows.append(("page", cr.page))
    if cr.doi is not None:
        rows.append(("doi", cr.doi))
    rows.append(("n_cr", str(cr.n_cr)))
    rows.append(("origin", cr.origin.value))
    return rows


def merge_datasets(datasets: list[Dataset], origin: Origin) -> Dataset:
    """Concatenate several datasets of one vendor format into one.

    CR entries shared across inputs (same trimmed raw, hence same id) are
    collapsed with summed occurrence counts.
    """
    merged = Dataset(origin=origin)
    for ds in datasets:
        merged.publications.extend(ds.publications)
        merged.sources.extend(ds.sources)
        for cr in ds.crs.values():
            existing = merged.crs.get(cr.id)
            if existing is None:
                merged.crs[cr.id] = replace(cr)
            else:
                existing.n_cr += cr.n_cr
    return merged
