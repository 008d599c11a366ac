"""Reference publication year spectroscopy and year-based filtering.

The spectrum counts CR occurrences per reference publication year and
reports, for each year, the deviation of its count from the 5-year median
around it. Pronounced positive deviations mark historically influential
years.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .model import CitedReference, Dataset, canonical_key


@dataclass
class SpectrumRow:
    rpy: int
    n_cr: int
    median_dev: int


@dataclass
class RpySpectrum:
    """Contiguous per-year rows plus the occurrence total that had no year."""

    rows: list[SpectrumRow]
    excluded_n_cr: int = 0

    def total_n_cr(self) -> int:
        return sum(r.n_cr for r in self.rows)


def _round_half_away(numerator: int, denominator: int) -> int:
    """Round numerator/denominator to an integer, halves away from zero."""
    q, r = divmod(abs(numerator), denominator)
    if 2 * r >= denominator:
        q += 1
    return q if numerator >= 0 else -q


def compute_median_deviation(counts: Sequence[int]) -> list[int]:
    """Per-year deviation from the median of the 5-year window around it.

    Windows truncate at the series boundaries; the median of an even-length
    window is the mean of the two central values rounded half away from zero.
    """
    deviations: list[int] = []
    for i, count in enumerate(counts):
        window = sorted(counts[max(0, i - 2) : i + 3])
        mid = len(window) // 2
        if len(window) % 2 == 1:
            median = window[mid]
        else:
            median = _round_half_away(window[mid - 1] + window[mid], 2)
        deviations.append(count - median)
    return deviations


def rpy_histogram(ds: Dataset) -> RpySpectrum:
    """Occurrence counts per reference publication year, gap years at zero."""
    by_year: dict[int, int] = {}
    excluded = 0
    for cr in ds.crs.values():
        if cr.rpy is None:
            excluded += cr.n_cr
        else:
            by_year[cr.rpy] = by_year.get(cr.rpy, 0) + cr.n_cr
    if not by_year:
        return RpySpectrum(rows=[], excluded_n_cr=excluded)
    lo, hi = min(by_year), max(by_year)
    years = list(range(lo, hi + 1))
    counts = [by_year.get(y, 0) for y in years]
    deviations = compute_median_deviation(counts)
    rows = [SpectrumRow(y, n, d) for y, n, d in zip(years, counts, deviations)]
    return RpySpectrum(rows=rows, excluded_n_cr=excluded)


def top_crs_for_rpy(ds: Dataset, rpy: int, k: int) -> list[CitedReference]:
    """The k most frequently cited CRs of one year.

    Sorted by occurrence count descending; ties fall back to the author
    surname, then the id.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    candidates = [cr for cr in ds.crs.values() if cr.rpy == rpy]
    candidates.sort(key=lambda cr: (-cr.n_cr, canonical_key(cr).surname, cr.id))
    return candidates[:k]


def remove_by_rpy(
    ds: Dataset, year_from: int, year_to: int, keep_missing: bool = True
) -> Dataset:
    """Drop every CR whose year falls inside [year_from, year_to].

    With keep_missing false, CRs lacking a year are dropped too. Publications
    stay, with the removed slots pruned from their reference lists.
    """
    if year_from > year_to:
        raise ValueError(f"empty year range [{year_from}, {year_to}]")

    def doomed(cr: CitedReference) -> bool:
        if cr.rpy is None:
            return not keep_missing
        return year_from <= cr.rpy <= year_to

    new_crs = {
        cid: replace(cr, authors=list(cr.authors))
        for cid, cr in ds.crs.items()
        if not doomed(cr)
    }
    new_pubs = [
        replace(
            pub,
            fields={t: list(v) for t, v in pub.fields.items()},
            cr_ids=[cid for cid in pub.cr_ids if cid in new_crs],
        )
        for pub in ds.publications
    ]
    return Dataset(origin=ds.origin, publications=new_pubs, crs=new_crs, sources=list(ds.sources))
