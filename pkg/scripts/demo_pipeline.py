#!/usr/bin/env python3
"""End-to-end walkthrough: import -> cluster -> merge -> spectrum -> export.

Usage:
    python scripts/make_demo_data.py demo
    python scripts/demo_pipeline.py demo
"""

from __future__ import annotations

import sys
from pathlib import Path

from crkit.cli import run


def step(argv: list[str]) -> None:
    print(f"$ crkit {' '.join(argv)}")
    code = run(argv)
    if code != 0:
        sys.exit(code)


def main() -> None:
    workdir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo")
    state = workdir / "demo.cre"
    step(["import", "--format", "scopus", str(workdir / "demo_scopus.csv"), "-o", str(state)])
    step(["cluster", "--threshold", "0.75", str(state)])
    step(["merge", str(state)])
    step(["rpys", str(state), "-o", str(workdir / "spectrum.csv")])
    step(["top", "--rpy", "1981", "-k", "5", str(state)])
    step(["export", "--format", "wos", str(state), "-o", str(workdir / "converted_wos.txt")])
    print(f"done; see {workdir}/spectrum.csv and {workdir}/converted_wos.txt")


if __name__ == "__main__":
    main()
