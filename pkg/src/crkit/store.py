"""Versioned `.cre` working-file persistence and working-state transitions.

A `.cre` file is the 4-byte magic "CRE1", a big-endian 4-byte format
version, then a zip archive holding one JSON document (``state.json``) and
the verbatim source texts (``sources/NNN.txt``). Serialization is
deterministic: identical states produce identical bytes.

Manual decisions are stored as digests of the two CR raw strings, so they
survive re-import of the same sources; digests that do not resolve against
the current dataset ride along as dormant decisions instead of being lost.
"""

from __future__ import annotations

import io
import json
import os
import struct
import zipfile
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import IO, Optional

from .analysis import remove_by_rpy
from .matching import (
    ClusterState,
    SimilarityConfig,
    _partition,
    cluster_equivalent,
    merge_clusters,
)
from .model import (
    CitedReference,
    CitingPublication,
    Dataset,
    MatchDecision,
    Origin,
    Provenance,
    SourceFile,
    Verdict,
    raw_digest,
)

MAGIC = b"CRE1"
FORMAT_VERSION = 1


class CreError(Exception):
    pass


class BadMagic(CreError):
    def __init__(self) -> None:
        super().__init__("not a .cre file (bad magic)")


class UnsupportedVersion(CreError):
    def __init__(self, version: int):
        super().__init__(f"unsupported .cre format version {version}")
        self.version = version


class CorruptPayload(CreError):
    def __init__(self, detail: str):
        super().__init__(f"corrupt .cre payload: {detail}")
        self.detail = detail


@dataclass
class StoredDecision:
    """A manual decision keyed by raw-string digests, possibly dormant."""

    digest_a: str
    digest_b: str
    verdict: Verdict
    score: Optional[float] = None


@dataclass
class WorkingState:
    dataset: Dataset
    cluster_state: ClusterState
    config: SimilarityConfig
    format_version: int = FORMAT_VERSION
    dormant_decisions: list[StoredDecision] = field(default_factory=list)


def new_state(dataset: Dataset, config: Optional[SimilarityConfig] = None) -> WorkingState:
    config = config or SimilarityConfig()
    cluster_state = ClusterState(
        parent={cid: cid for cid in dataset.crs}, threshold=config.threshold
    )
    return WorkingState(dataset=dataset, cluster_state=cluster_state, config=config)


# --- serialization -----------------------------------------------------------


def _config_to_json(cfg: SimilarityConfig) -> dict:
    return {
        "threshold": cfg.threshold,
        "weights": {
            "author": cfg.weight_author,
            "source_or_title": cfg.weight_source_or_title,
            "volume": cfg.weight_volume,
            "page": cfg.weight_page,
        },
        "same_rpy_only": cfg.same_rpy_only,
        "rpy_slack": cfg.rpy_slack,
    }


def _config_from_json(data: dict) -> SimilarityConfig:
    weights = data["weights"]
    return SimilarityConfig(
        threshold=data["threshold"],
        weight_author=weights["author"],
        weight_source_or_title=weights["source_or_title"],
        weight_volume=weights["volume"],
        weight_page=weights["page"],
        same_rpy_only=data["same_rpy_only"],
        rpy_slack=data["rpy_slack"],
    )


def _cr_to_json(cr: CitedReference) -> dict:
    return {
        "id": cr.id,
        "raw": cr.raw,
        "origin": cr.origin.value,
        "authors": list(cr.authors),
        "title": cr.title,
        "source": cr.source,
        "rpy": cr.rpy,
        "volume": cr.volume,
        "page": cr.page,
        "doi": cr.doi,
        "n_cr": cr.n_cr,
    }


def _cr_from_json(data: dict) -> CitedReference:
    return CitedReference(
        id=data["id"],
        raw=data["raw"],
        origin=Origin(data["origin"]),
        authors=list(data["authors"]),
        title=data["title"],
        source=data["source"],
        rpy=data["rpy"],
        volume=data["volume"],
        page=data["page"],
        doi=data["doi"],
        n_cr=data["n_cr"],
    )


def _state_to_json(state: WorkingState) -> dict:
    ds = state.dataset
    digest_of = {cid: raw_digest(cr.raw) for cid, cr in ds.crs.items()}
    decisions = []
    for d in state.cluster_state.decisions:
        if d.a not in digest_of or d.b not in digest_of:
            raise ValueError(f"decision references unknown CR pair {d.pair}")
        decisions.append(
            {
                "a": digest_of[d.a],
                "b": digest_of[d.b],
                "verdict": d.verdict.value,
                "score": d.score,
            }
        )
    return {
        "format_version": state.format_version,
        "config": _config_to_json(state.config),
        "dataset": {
            "origin": ds.origin.value,
            "sources": [
                {
                    "name": s.name,
                    "kind": s.kind,
                    "records": s.records,
                    "skipped": s.skipped,
                    "text_entry": f"sources/{i:03d}.txt",
                }
                for i, s in enumerate(ds.sources)
            ],
            "publications": [
                {
                    "id": p.id,
                    "pub_year": p.pub_year,
                    "fields": [[tag, list(values)] for tag, values in p.fields.items()],
                    "cr_ids": list(p.cr_ids),
                }
                for p in ds.publications
            ],
            "crs": [_cr_to_json(ds.crs[cid]) for cid in sorted(ds.crs)],
        },
        "cluster_state": {
            "threshold": state.cluster_state.threshold,
            "parent": [[cid, root] for cid, root in sorted(state.cluster_state.parent.items())],
            "pair_scores": [
                [a, b, score]
                for (a, b), score in sorted(state.cluster_state.pair_scores.items())
            ],
            "decisions": decisions,
        },
        "dormant_decisions": [
            {"a": d.digest_a, "b": d.digest_b, "verdict": d.verdict.value, "score": d.score}
            for d in state.dormant_decisions
        ],
    }


def save_cre(state: WorkingState, sink: IO[bytes]) -> None:
    """Write the complete working state; deterministic for identical states."""
    payload = json.dumps(
        _state_to_json(state), sort_keys=True, ensure_ascii=False, separators=(",", ":")
    ).encode("utf-8")

    archive = io.BytesIO()
    with zipfile.ZipFile(archive, "w") as zf:
        entries = [("state.json", payload)] + [
            (f"sources/{i:03d}.txt", s.text.encode("utf-8", "surrogatepass"))
            for i, s in enumerate(state.dataset.sources)
        ]
        for name, data in entries:
            info = zipfile.ZipInfo(name, date_time=(1980, 1, 1, 0, 0, 0))
            info.compress_type = zipfile.ZIP_DEFLATED
            info.create_system = 3
            info.external_attr = 0o644 << 16
            zf.writestr(info, data)

    sink.write(MAGIC)
    sink.write(struct.pack(">I", state.format_version))
    sink.write(archive.getvalue())


def load_cre(source: IO[bytes]) -> WorkingState:
    """Read and validate a `.cre` file; raises instead of returning partial state."""
    blob = source.read()
    if len(blob) < 4 or blob[:4] != MAGIC:
        raise BadMagic()
    if len(blob) < 8:
        raise CorruptPayload("file truncated before version field")
    (version,) = struct.unpack(">I", blob[4:8])
    if version < 1 or version > FORMAT_VERSION:
        raise UnsupportedVersion(version)

    try:
        with zipfile.ZipFile(io.BytesIO(blob[8:])) as zf:
            data = json.loads(zf.read("state.json").decode("utf-8"))
            texts = {}
            for entry in data["dataset"]["sources"]:
                texts[entry["text_entry"]] = zf.read(entry["text_entry"]).decode(
                    "utf-8", "surrogatepass"
                )
    except CreError:
        raise
    except (zipfile.BadZipFile, KeyError, ValueError, OSError) as exc:
        raise CorruptPayload(str(exc))

    try:
        config = _config_from_json(data["config"])
        dsj = data["dataset"]
        crs = {c["id"]: _cr_from_json(c) for c in dsj["crs"]}
        publications = [
            CitingPublication(
                id=p["id"],
                fields={tag: list(values) for tag, values in p["fields"]},
                pub_year=p["pub_year"],
                cr_ids=list(p["cr_ids"]),
            )
            for p in dsj["publications"]
        ]
        sources = [
            SourceFile(
                name=s["name"],
                kind=s["kind"],
                text=texts[s["text_entry"]],
                records=s["records"],
                skipped=s["skipped"],
            )
            for s in dsj["sources"]
        ]
        dataset = Dataset(
            origin=Origin(dsj["origin"]), publications=publications, crs=crs, sources=sources
        )

        csj = data["cluster_state"]
        parent = {cid: root for cid, root in csj["parent"]}
        pair_scores = {(a, b): score for a, b, score in csj["pair_scores"]}

        by_digest = {raw_digest(cr.raw): cid for cid, cr in crs.items()}
        by_pair: dict[tuple[str, str], MatchDecision] = {}
        dormant: list[StoredDecision] = []
        promoted = False
        tagged = [(dj, False) for dj in csj["decisions"]] + [
            (dj, True) for dj in data["dormant_decisions"]
        ]
        for dj, was_dormant in tagged:
            ida, idb = by_digest.get(dj["a"]), by_digest.get(dj["b"])
            if ida is not None and idb is not None and ida != idb:
                decision = MatchDecision(
                    a=ida,
                    b=idb,
                    verdict=Verdict(dj["verdict"]),
                    provenance=Provenance.MANUAL,
                    score=dj["score"],
                )
                if decision.pair not in by_pair:
                    by_pair[decision.pair] = decision
                    promoted = promoted or was_dormant
            else:
                dormant.append(
                    StoredDecision(
                        digest_a=dj["a"],
                        digest_b=dj["b"],
                        verdict=Verdict(dj["verdict"]),
                        score=dj["score"],
                    )
                )
        cluster_state = ClusterState(
            parent=parent,
            pair_scores=pair_scores,
            decisions=tuple(sorted(by_pair.values(), key=lambda d: d.pair)),
            threshold=csj["threshold"],
        )
        state = WorkingState(
            dataset=dataset,
            cluster_state=cluster_state,
            config=config,
            format_version=data["format_version"],
            dormant_decisions=dormant,
        )
    except CreError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptPayload(f"schema error: {exc!r}")

    _validate_state(state)
    if promoted:
        state.cluster_state = ClusterState(
            parent=_partition(
                sorted(dataset.crs),
                cluster_state.pair_scores,
                cluster_state.threshold,
                cluster_state.decisions,
            ),
            pair_scores=cluster_state.pair_scores,
            decisions=cluster_state.decisions,
            threshold=cluster_state.threshold,
        )
    return state


def _validate_state(state: WorkingState) -> None:
    try:
        state.dataset.validate()
        state.config.validate()
    except ValueError as exc:
        raise CorruptPayload(str(exc))
    crs = state.dataset.crs
    cs = state.cluster_state
    if set(cs.parent) != set(crs):
        raise CorruptPayload("cluster parent map does not cover the CR table")
    for cid, root in cs.parent.items():
        if root not in crs:
            raise CorruptPayload(f"cluster root {root} is not a known CR")
    for a, b in cs.pair_scores:
        if a not in crs or b not in crs:
            raise CorruptPayload(f"pair score references unknown CRs ({a}, {b})")


def save_cre_path(state: WorkingState, path: str | Path) -> None:
    """Atomic save: write a sibling temp file, then rename over the target."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        save_cre(state, fh)
    os.replace(tmp, path)


def load_cre_path(path: str | Path) -> WorkingState:
    with open(path, "rb") as fh:
        return load_cre(fh)


# --- working-state transitions ------------------------------------------------


def _split_decisions(
    decisions: tuple[MatchDecision, ...],
    old_crs: dict[str, CitedReference],
    new_crs: dict[str, CitedReference],
) -> tuple[list[MatchDecision], list[StoredDecision]]:
    """Partition decisions into still-active and newly dormant ones."""
    active: list[MatchDecision] = []
    dormant: list[StoredDecision] = []
    for d in decisions:
        if d.a in new_crs and d.b in new_crs:
            active.append(d)
        else:
            dormant.append(
                StoredDecision(
                    digest_a=raw_digest(old_crs[d.a].raw),
                    digest_b=raw_digest(old_crs[d.b].raw),
                    verdict=d.verdict,
                    score=d.score,
                )
            )
    return active, dormant


def clustered_state(state: WorkingState, config: SimilarityConfig) -> WorkingState:
    """Recluster the dataset under a (possibly updated) configuration."""
    manual = state.cluster_state.decisions
    cs = cluster_equivalent(state.dataset, config, manual)
    return replace(state, cluster_state=cs, config=config)


def merged_state(state: WorkingState) -> WorkingState:
    """Merge clusters and reset the clustering evidence over the new table."""
    old_crs = state.dataset.crs
    dataset = merge_clusters(state.dataset, state.cluster_state)
    active, newly_dormant = _split_decisions(
        state.cluster_state.decisions, old_crs, dataset.crs
    )
    decisions = tuple(sorted(active, key=lambda d: d.pair))
    cluster_state = ClusterState(
        parent=_partition(sorted(dataset.crs), {}, state.config.threshold, decisions),
        pair_scores={},
        decisions=decisions,
        threshold=state.config.threshold,
    )
    return WorkingState(
        dataset=dataset,
        cluster_state=cluster_state,
        config=state.config,
        format_version=state.format_version,
        dormant_decisions=state.dormant_decisions + newly_dormant,
    )


def removed_years_state(
    state: WorkingState, year_from: int, year_to: int, keep_missing: bool = True
) -> WorkingState:
    """Apply the year filter; surviving pair evidence and decisions carry over."""
    old_crs = state.dataset.crs
    dataset = remove_by_rpy(state.dataset, year_from, year_to, keep_missing)
    active, newly_dormant = _split_decisions(
        state.cluster_state.decisions, old_crs, dataset.crs
    )
    decisions = tuple(sorted(active, key=lambda d: d.pair))
    pair_scores = {
        pair: score
        for pair, score in state.cluster_state.pair_scores.items()
        if pair[0] in dataset.crs and pair[1] in dataset.crs
    }
    cluster_state = ClusterState(
        parent=_partition(
            sorted(dataset.crs), pair_scores, state.cluster_state.threshold, decisions
        ),
        pair_scores=pair_scores,
        decisions=decisions,
        threshold=state.cluster_state.threshold,
    )
    return WorkingState(
        dataset=dataset,
        cluster_state=cluster_state,
        config=state.config,
        format_version=state.format_version,
        dormant_decisions=state.dormant_decisions + newly_dormant,
    )
