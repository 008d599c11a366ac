"""CLI: workflows over .cre files, exit codes, stream discipline."""

from __future__ import annotations

import csv
import io
import random

import pytest

from conftest import rand_scopus_csv, rand_wos_file
from crkit.cli import run
from crkit.model import Origin
from crkit.store import load_cre_path

WOS_FIXTURE = """FN Clarivate Analytics Web of Science
VR 1.0
PT J
AU Bornmann, L.
TI A study of historical roots
SO SCIENTOMETRICS
PY 2014
CR GARFIELD E, 1955, SCIENCE, V122, P108
   GARFIELD F, 1955, SCIENCE, V122, P108
   MERTON RK, 1968, SCIENCE, V159, P56
NR 3
UT WOS:000000000001
ER

PT J
AU Marx, W.
TI Another study
SO J INFORMETR
PY 2015
CR GARFIELD E, 1955, SCIENCE, V122, P108
   PRICE DJD, 1965, SCIENCE, V149, P510
NR 2
UT WOS:000000000002
ER

EF
"""

SCOPUS_FIXTURE = (
    "Authors,Title,Year,Source title,References,EID\r\n"
    '"Thor A.; Marx W.","Tooling",2016,"J Informetr","Garfield E., Citation indexes (1955) '
    'Science, pp. 108; Merton R.K., The Matthew effect (1968) Science",2-s2.0-7\r\n'
)


@pytest.fixture
def wos_file(tmp_path):
    path = tmp_path / "wos.txt"
    path.write_text(WOS_FIXTURE, encoding="utf-8")
    return path


@pytest.fixture
def scopus_file(tmp_path):
    path = tmp_path / "scopus.csv"
    path.write_text(SCOPUS_FIXTURE, encoding="utf-8", newline="")
    return path


class TestImportExport:
    def test_wos_import_creates_state(self, tmp_path, wos_file):
        state_path = tmp_path / "w.cre"
        assert run(["import", "--format", "wos", str(wos_file), "-o", str(state_path)]) == 0
        state = load_cre_path(state_path)
        assert len(state.dataset.publications) == 2
        assert state.dataset.total_n_cr() == 5
        assert len(state.dataset.crs) == 4  # the shared Garfield line collapsed

    def test_scopus_to_wos_conversion_single_authors(self, tmp_path, scopus_file, capsys):
        state_path = tmp_path / "s.cre"
        out_path = tmp_path / "out.txt"
        assert run(["import", "--format", "scopus", str(scopus_file), "-o", str(state_path)]) == 0
        assert run(["export", "--format", "wos", str(state_path), "-o", str(out_path)]) == 0
        err = capsys.readouterr().err
        assert "loss:" in err
        text = out_path.read_text(encoding="utf-8")
        cr_values = [
            line[3:]
            for line in text.splitlines()
            if line.startswith("CR ") or line.startswith("   ")
        ]
        from crkit.wos import parse_wos, parse_wos_cr

        for value in cr_values:
            assert len(parse_wos_cr(value).authors) <= 1
        reparsed = parse_wos([text])
        assert reparsed.total_n_cr() == 2

    def test_wos_to_scopus_conversion_empty_titles(self, tmp_path, wos_file, capsys):
        state_path = tmp_path / "w.cre"
        out_path = tmp_path / "out.csv"
        run(["import", "--format", "wos", str(wos_file), "-o", str(state_path)])
        assert run(["export", "--format", "scopus", str(state_path), "-o", str(out_path)]) == 0
        from crkit.scopus import parse_scopus_csv

        reparsed = parse_scopus_csv(out_path.read_text(encoding="utf-8"))
        assert len(reparsed.crs) == 4
        for cr in reparsed.crs.values():
            assert cr.title is None

    def test_import_missing_file_is_data_error(self, tmp_path):
        assert run(["import", "--format", "wos", "no-such.txt", "-o", str(tmp_path / "x.cre")]) == 2

    def test_import_malformed_file_is_data_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.txt"
        bad.write_text("PT J\nER\n", encoding="utf-8")
        assert run(["import", "--format", "wos", str(bad), "-o", str(tmp_path / "x.cre")]) == 2
        assert "error" in capsys.readouterr().err


class TestPipeline:
    def test_full_workflow(self, tmp_path, wos_file, capsys):
        state_path = tmp_path / "w.cre"
        run(["import", "--format", "wos", str(wos_file), "-o", str(state_path)])

        assert run(["cluster", "--threshold", "0.9", str(state_path)]) == 0
        state = load_cre_path(state_path)
        multi = [m for m in state.cluster_state.clusters().values() if len(m) > 1]
        assert len(multi) == 1  # GARFIELD E / GARFIELD F variants

        total_before = state.dataset.total_n_cr()
        assert run(["merge", str(state_path)]) == 0
        state = load_cre_path(state_path)
        assert len(state.dataset.crs) == 3
        assert state.dataset.total_n_cr() == total_before

        spectrum_path = tmp_path / "spectrum.csv"
        assert run(["rpys", str(state_path), "-o", str(spectrum_path)]) == 0
        rows = list(csv.reader(io.StringIO(spectrum_path.read_text(encoding="utf-8"))))
        assert rows[0] == ["rpy", "n_cr", "median_dev"]
        by_year = {int(r[0]): int(r[1]) for r in rows[1:]}
        assert by_year[1955] == 3 and by_year[1968] == 1 and by_year[1965] == 1
        assert set(by_year) == set(range(1955, 1966)) | {1966, 1967, 1968}

        capsys.readouterr()
        assert run(["top", "--rpy", "1955", "-k", "1", str(state_path)]) == 0
        out = capsys.readouterr().out
        assert out.startswith("3\tGARFIELD E, 1955, SCIENCE, V122, P108")

        assert run(["remove-year", "--from", "1960", "--to", "1970", str(state_path)]) == 0
        state = load_cre_path(state_path)
        assert {cr.rpy for cr in state.dataset.crs.values()} == {1955}

        export_path = tmp_path / "final.txt"
        assert run(["export", "--format", "wos", str(state_path), "-o", str(export_path)]) == 0
        from crkit.wos import parse_wos

        final = parse_wos([export_path.read_text(encoding="utf-8")])
        assert final.total_n_cr() == 3

    def test_scopus_workflow(self, tmp_path, capsys):
        rng = random.Random(77)
        src = tmp_path / "s.csv"
        src.write_text(rand_scopus_csv(rng, 12), encoding="utf-8", newline="")
        state_path = tmp_path / "s.cre"
        assert run(["import", "--format", "scopus", str(src), "-o", str(state_path)]) == 0
        assert run(["cluster", "--threshold", "0.8", "--rpy-slack", "1", str(state_path)]) == 0
        assert run(["merge", str(state_path)]) == 0
        state = load_cre_path(state_path)
        state.dataset.validate()
        assert state.dataset.origin is Origin.SCOPUS

    def test_details(self, tmp_path, wos_file, capsys):
        state_path = tmp_path / "w.cre"
        run(["import", "--format", "wos", str(wos_file), "-o", str(state_path)])
        state = load_cre_path(state_path)
        cid = sorted(state.dataset.crs)[0]
        capsys.readouterr()
        assert run(["details", "--cr", cid, str(state_path)]) == 0
        out = capsys.readouterr().out
        assert out.startswith("raw: ")
        assert "origin: WOS" in out
        assert run(["details", "--cr", "missing", str(state_path)]) == 2


class TestExitCodes:
    def test_unknown_subcommand(self, capsys):
        assert run(["frobnicate"]) == 1
        assert "usage" in capsys.readouterr().err.lower()

    def test_no_subcommand(self):
        assert run([]) == 1

    def test_threshold_out_of_range(self, tmp_path, wos_file):
        state_path = tmp_path / "w.cre"
        run(["import", "--format", "wos", str(wos_file), "-o", str(state_path)])
        assert run(["cluster", "--threshold", "1.01", str(state_path)]) == 1

    def test_rpys_on_empty_state(self, tmp_path, capsys):
        empty = tmp_path / "empty.csv"
        empty.write_text("Authors,References\r\n", encoding="utf-8", newline="")
        state_path = tmp_path / "e.cre"
        run(["import", "--format", "scopus", str(empty), "-o", str(state_path)])
        capsys.readouterr()
        assert run(["rpys", str(state_path)]) == 0
        assert capsys.readouterr().out == "rpy,n_cr,median_dev\n"

    def test_bad_year_range(self, tmp_path, wos_file):
        state_path = tmp_path / "w.cre"
        run(["import", "--format", "wos", str(wos_file), "-o", str(state_path)])
        assert run(["remove-year", "--from", "2000", "--to", "1990", str(state_path)]) == 1

    def test_corrupt_state_file(self, tmp_path):
        bad = tmp_path / "bad.cre"
        bad.write_bytes(b"garbage")
        assert run(["rpys", str(bad)]) == 2

    def test_help_exits_zero(self, capsys):
        assert run(["--help"]) == 0
        assert "COMMAND" in capsys.readouterr().out

    def test_k_validation(self, tmp_path, wos_file):
        state_path = tmp_path / "w.cre"
        run(["import", "--format", "wos", str(wos_file), "-o", str(state_path)])
        assert run(["top", "--rpy", "1955", "-k", "0", str(state_path)]) == 1


class TestMultiFileImport:
    def test_wos_multiple_files_dedup(self, tmp_path):
        rng = random.Random(3)
        a = tmp_path / "a.txt"
        b = tmp_path / "b.txt"
        a.write_text(rand_wos_file(rng, 6, ut_start=0), encoding="utf-8")
        # second file shares the first three UT values
        b.write_text(rand_wos_file(rng, 6, ut_start=3), encoding="utf-8")
        state_path = tmp_path / "m.cre"
        assert run(["import", "--format", "wos", str(a), str(b), "-o", str(state_path)]) == 0
        state = load_cre_path(state_path)
        assert len(state.dataset.publications) == 9
        state.dataset.validate()

    def test_scopus_multiple_files(self, tmp_path):
        rng = random.Random(4)
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        a.write_text(rand_scopus_csv(rng, 4, eid_start=0), encoding="utf-8", newline="")
        b.write_text(rand_scopus_csv(rng, 5, eid_start=100), encoding="utf-8", newline="")
        state_path = tmp_path / "m.cre"
        assert run(["import", "--format", "scopus", str(a), str(b), "-o", str(state_path)]) == 0
        state = load_cre_path(state_path)
        assert len(state.dataset.publications) == 9
        state.dataset.validate()
