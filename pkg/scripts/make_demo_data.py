#!/usr/bin/env python3
"""Generate small demo exports (one WoS file, one Scopus CSV) to play with.

Usage:
    python scripts/make_demo_data.py [OUTDIR]

Writes demo_wos.txt and demo_scopus.csv into OUTDIR (default: ./demo).
"""

from __future__ import annotations

import csv
import random
import sys
from pathlib import Path

SURNAMES = ["Garfield", "Garfeld", "Bornmann", "Marx", "Leydesdorff", "Merton", "Price"]
SOURCES = ["SCIENCE", "NATURE", "SCIENTOMETRICS", "J INFORMETR"]

FRAGMENTED = [
    "Rothschild: Where's the debate? (1971) New Scientist, , (10 December), RS/ARF.879",
    "(1981) Reason, Truth, and History, 113p. , Cambridge",
    "(2000) National Development Plan 2000 – 2006, , The Stationery Office, Dublin: 2000",
]


def wos_cr(rng: random.Random) -> str:
    name = rng.choice(SURNAMES).upper()
    bits = [f"{name} {rng.choice('ABE')}", str(rng.randint(1950, 2010)), rng.choice(SOURCES)]
    if rng.random() < 0.6:
        bits.append(f"V{rng.randint(1, 200)}")
    if rng.random() < 0.6:
        bits.append(f"P{rng.randint(1, 999)}")
    return ", ".join(bits)


def scopus_ref(rng: random.Random) -> str:
    if rng.random() < 0.15:
        return rng.choice(FRAGMENTED)
    names = [f"{rng.choice(SURNAMES)} {rng.choice('ABE')}."]
    while rng.random() < 0.5:
        names.append(f"{rng.choice(SURNAMES)} {rng.choice('KLM')}.")
    year = rng.randint(1950, 2010)
    return (
        f"{', '.join(names)}, A study of citation patterns no {rng.randint(1, 99)} "
        f"({year}) {rng.choice(SOURCES).title()}, pp. {rng.randint(1, 900)}"
    )


def write_wos(path: Path, rng: random.Random, n: int) -> None:
    lines = ["FN Clarivate Analytics Web of Science", "VR 1.0"]
    for i in range(n):
        refs = [wos_cr(rng) for _ in range(rng.randint(1, 6))]
        lines += [
            "PT J",
            f"AU {rng.choice(SURNAMES)}, {rng.choice('ABE')}",
            f"TI Citing work number {i}",
            f"SO {rng.choice(SOURCES)}",
            f"PY {rng.randint(2005, 2016)}",
            "CR " + refs[0],
            *("   " + r for r in refs[1:]),
            f"NR {len(refs)}",
            f"UT WOS:{i:012d}",
            "ER",
            "",
        ]
    lines.append("EF")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_scopus(path: Path, rng: random.Random, n: int) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["Authors", "Title", "Year", "Source title", "References", "EID"])
        for i in range(n):
            refs = "; ".join(scopus_ref(rng) for _ in range(rng.randint(1, 6)))
            writer.writerow(
                [
                    f"{rng.choice(SURNAMES)} {rng.choice('ABE')}.",
                    f"Citing work number {i}",
                    str(rng.randint(2005, 2016)),
                    rng.choice(SOURCES).title(),
                    refs,
                    f"2-s2.0-{i:010d}",
                ]
            )


def main() -> None:
    outdir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo")
    outdir.mkdir(parents=True, exist_ok=True)
    rng = random.Random(2016)
    write_wos(outdir / "demo_wos.txt", rng, 40)
    write_scopus(outdir / "demo_scopus.csv", rng, 40)
    print(f"wrote {outdir}/demo_wos.txt and {outdir}/demo_scopus.csv")


if __name__ == "__main__":
    main()
