"""Seeded generators for random datasets, vendor files, and working states."""

from __future__ import annotations

import random

from crkit.matching import SimilarityConfig, cluster_equivalent
from crkit.model import (
    CitedReference,
    CitingPublication,
    Dataset,
    MatchDecision,
    Origin,
    Provenance,
    SourceFile,
    Verdict,
    cr_id_for,
)
from crkit.store import StoredDecision, WorkingState, new_state

SURNAMES = [
    "garfield", "garfeld", "bornmann", "bornman", "marx", "leydesdorff",
    "thor", "smith", "smyth", "merton", "price", "pryce",
]
SOURCES = [
    "SCIENCE", "NATURE", "SCIENTOMETRICS", "J INFORMETR",
    "J ASSOC INF SCI TECH", "EUR PHYS J PLUS",
]
DOIS = ["10.1000/a1", "10.1000/a2", "10.2000/b7", "10.5555/zz.9"]


def rand_cr(rng: random.Random, tag: str, origin: Origin = Origin.SCOPUS,
            year_pool: tuple[int, int] = (1988, 1994)) -> CitedReference:
    """One random CR; the tag keeps raw strings distinct across calls."""
    surname = rng.choice(SURNAMES)
    authors: list[str] = []
    if rng.random() < 0.85:
        initial = rng.choice("ABEJ")
        if origin is Origin.WOS:
            authors = [f"{surname.upper()} {initial}"]
        else:
            authors = [f"{surname.title()} {initial}."]
            while rng.random() < 0.3:
                authors.append(f"{rng.choice(SURNAMES).title()} {rng.choice('KLM')}.")
    rpy = rng.randint(*year_pool) if rng.random() < 0.85 else None
    source = rng.choice(SOURCES) if rng.random() < 0.7 else None
    title = f"On {rng.choice(SURNAMES)} effects" if origin is Origin.SCOPUS and rng.random() < 0.5 else None
    volume = f"V{rng.randint(1, 40)}" if rng.random() < 0.5 else None
    page = f"P{rng.randint(1, 999)}" if rng.random() < 0.5 else None
    doi = rng.choice(DOIS) if rng.random() < 0.12 else None
    raw = ", ".join(
        [x for x in (authors[0] if authors else None, str(rpy) if rpy else None,
                     source, volume, page) if x]
        + [f"ref:{tag}"]
    )
    if origin is Origin.WOS and len(authors) > 1:
        authors = authors[:1]
    return CitedReference(
        id=cr_id_for(raw), raw=raw, origin=origin, authors=authors, title=title,
        source=source, rpy=rpy, volume=volume, page=page, doi=doi, n_cr=1,
    )


def rand_dataset(rng: random.Random, n_crs: int = 25, n_pubs: int = 8,
                 origin: Origin = Origin.SCOPUS,
                 year_pool: tuple[int, int] = (1988, 1994)) -> Dataset:
    """Random dataset with occurrence conservation holding by construction."""
    crs: dict[str, CitedReference] = {}
    ids: list[str] = []
    i = 0
    while len(ids) < n_crs:
        cr = rand_cr(rng, f"{i}", origin=origin, year_pool=year_pool)
        i += 1
        if cr.id in crs:
            continue
        cr.n_cr = 0
        crs[cr.id] = cr
        ids.append(cr.id)

    pubs: list[CitingPublication] = []
    for p in range(n_pubs):
        slots = [ids[j % len(ids)] for j in range(p, p + max(1, n_crs // n_pubs))]
        slots += [rng.choice(ids) for _ in range(rng.randint(0, 4))]
        for cid in slots:
            crs[cid].n_cr += 1
        fields = {"TI": [f"Citing work {p}"]} if origin is Origin.WOS else {"Title": [f"Citing work {p}"]}
        pubs.append(
            CitingPublication(id=f"pub-{p}", fields=fields, pub_year=2000 + p, cr_ids=slots)
        )

    for cid in list(crs):
        if crs[cid].n_cr == 0:
            pubs[0].cr_ids.append(cid)
            crs[cid].n_cr = 1
    return Dataset(origin=origin, publications=pubs, crs=crs,
                   sources=[SourceFile(name="gen", kind=origin.value.lower(), text="")])


def rand_decisions(rng: random.Random, ds: Dataset, n: int = 3) -> list[MatchDecision]:
    ids = sorted(ds.crs)
    decisions: dict[tuple[str, str], MatchDecision] = {}
    attempts = 0
    while len(decisions) < n and attempts < 50:
        attempts += 1
        a, b = rng.sample(ids, 2)
        verdict = rng.choice([Verdict.SAME, Verdict.DIFFERENT])
        d = MatchDecision(a=a, b=b, verdict=verdict, provenance=Provenance.MANUAL)
        decisions.setdefault(d.pair, d)
    return sorted(decisions.values(), key=lambda d: d.pair)


WOS_CR_LINES = [
    "GARFIELD E, 1955, SCIENCE, V122, P108, DOI 10.1126/science.122.3159.108",
    "MERTON RK, 1968, SCIENCE, V159, P56",
    "PRICE DJD, 1965, SCIENCE, V149, P510",
    "ANON, [no year]",
    "1999, NATURE",
    "*WHO, 2001, TECH REP SER",
]


def rand_wos_cr_line(rng: random.Random) -> str:
    if rng.random() < 0.4:
        return rng.choice(WOS_CR_LINES)
    surname = rng.choice(SURNAMES).upper()
    bits = [f"{surname} {rng.choice('ABEJ')}", str(rng.randint(1900, 2015))]
    if rng.random() < 0.8:
        bits.append(rng.choice(SOURCES))
    if rng.random() < 0.5:
        bits.append(f"V{rng.randint(1, 200)}")
    if rng.random() < 0.5:
        bits.append(f"P{rng.randint(1, 2000)}")
    if rng.random() < 0.2:
        bits.append(f"DOI 10.{rng.randint(1000, 9999)}/x{rng.randint(1, 999)}")
    return ", ".join(bits)


def rand_wos_file(rng: random.Random, n_records: int, ut_start: int = 0) -> str:
    lines = ["FN Clarivate Analytics Web of Science", "VR 1.0"]
    for i in range(n_records):
        lines.append("PT J")
        lines.append(f"AU {rng.choice(SURNAMES).title()}, {rng.choice('ABEJ')}")
        if rng.random() < 0.4:
            lines.append(f"   {rng.choice(SURNAMES).title()}, {rng.choice('KLM')}")
        lines.append(f"TI Study {ut_start + i} of {rng.choice(SURNAMES)} phenomena")
        lines.append(f"SO {rng.choice(SOURCES)}")
        if rng.random() < 0.3:
            lines.append(f"AB Abstract text {rng.randint(0, 10**6)}")
        lines.append(f"PY {rng.randint(1990, 2015)}")
        if rng.random() < 0.5:
            lines.append(f"VL {rng.randint(1, 120)}")
        n_cr = rng.randint(0, 5)
        if n_cr:
            cr_lines = [rand_wos_cr_line(rng) for _ in range(n_cr)]
            lines.append("CR " + cr_lines[0])
            lines.extend("   " + line for line in cr_lines[1:])
            lines.append(f"NR {n_cr}")
        if rng.random() < 0.2:
            lines.append(f"Z9 {rng.randint(0, 400)}")
        lines.append(f"UT WOS:{ut_start + i:012d}")
        lines.append("ER")
        lines.append("")
    lines.append("EF")
    return "\n".join(lines) + "\n"


SCOPUS_REF_STRINGS = [
    "Garfield E., Citation indexes for science (1955) Science, 122 (3159), pp. 108-111",
    "Merton R.K., The Matthew effect in science (1968) Science, 159, pp. 56-63",
    "Rothschild: Where's the debate? (1971) New Scientist, , (10 December), RS/ARF.879",
    "(1981) Reason, Truth, and History, 113p. , Cambridge",
    "(2000) National Development Plan 2000 – 2006, , The Stationery Office, Dublin: 2000",
    "Thor A., Marx W., Leydesdorff L., Bornmann L., Introducing CRE (2016) J Informetr, 10 (2)",
]


def rand_scopus_ref(rng: random.Random) -> str:
    if rng.random() < 0.35:
        return rng.choice(SCOPUS_REF_STRINGS)
    bits = []
    if rng.random() < 0.7:
        bits.append(f"{rng.choice(SURNAMES).title()} {rng.choice('ABEJ')}.")
        if rng.random() < 0.4:
            bits.append(f"{rng.choice(SURNAMES).title()} {rng.choice('KLM')}.")
    if rng.random() < 0.6:
        bits.append(f"A study of {rng.choice(SURNAMES)} {rng.randint(1, 99)}")
    piece = ", ".join(bits)
    if rng.random() < 0.85:
        piece = f"{piece} ({rng.randint(1900, 2015)})" if piece else f"({rng.randint(1900, 2015)})"
        piece += f" {rng.choice(SOURCES).title()}"
        if rng.random() < 0.5:
            piece += f", pp. {rng.randint(1, 900)}"
    return piece or f"fragment {rng.randint(0, 10**6)}"


SCOPUS_HEADERS = [
    "Authors", "Author(s) ID", "Title", "Year", "Source title", "Volume",
    "Issue", "Page start", "Cited by", "DOI", "References", "EID",
]


def rand_scopus_csv(rng: random.Random, n_rows: int, eid_start: int = 0) -> str:
    import csv as _csv
    import io as _io

    out = _io.StringIO(newline="")
    writer = _csv.writer(out, lineterminator="\r\n")
    writer.writerow(SCOPUS_HEADERS)
    for i in range(n_rows):
        refs = "; ".join(rand_scopus_ref(rng) for _ in range(rng.randint(0, 5)))
        title = f'Work "{rng.choice(SURNAMES)}" no {i}' if rng.random() < 0.3 else f"Work {i}"
        if rng.random() < 0.1:
            title += "\nwith a second line"
        writer.writerow(
            [
                f"{rng.choice(SURNAMES).title()} {rng.choice('ABEJ')}.",
                f"{rng.randint(10**8, 10**9)}",
                title,
                str(rng.randint(1995, 2016)),
                rng.choice(SOURCES).title(),
                str(rng.randint(1, 99)) if rng.random() < 0.7 else "",
                str(rng.randint(1, 20)) if rng.random() < 0.5 else "",
                str(rng.randint(1, 999)) if rng.random() < 0.6 else "",
                str(rng.randint(0, 500)),
                f"10.{rng.randint(1000, 9999)}/s{i}" if rng.random() < 0.6 else "",
                refs,
                f"2-s2.0-{eid_start + i:010d}",
            ]
        )
    return out.getvalue()


def rand_state(rng: random.Random, with_dormant: bool = False) -> WorkingState:
    ds = rand_dataset(rng, n_crs=rng.randint(8, 30), n_pubs=rng.randint(3, 8))
    cfg = SimilarityConfig(
        threshold=round(rng.uniform(0.55, 0.9), 2), rpy_slack=rng.choice([0, 0, 1])
    )
    decisions = rand_decisions(rng, ds, n=rng.randint(0, 4))
    state = new_state(ds, cfg)
    state.cluster_state = cluster_equivalent(ds, cfg, decisions)
    if with_dormant:
        state.dormant_decisions.append(
            StoredDecision(digest_a="0" * 64, digest_b="f" * 64, verdict=Verdict.SAME)
        )
    return state
