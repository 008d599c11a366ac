"""Local HTTP service exposing the working state to the curation UI.

Single-session, localhost workbench: browse and sort CRs, inspect details,
review clusters, record manual decisions, merge, filter years, fetch the
spectrum, and save back to the `.cre` file. Mutations are serialized through
one lock and applied atomically: a failing request leaves the state as it
was.
"""

from __future__ import annotations

import os
import threading
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import HTMLResponse
from fastapi.staticfiles import StaticFiles

from . import analysis, store
from .matching import apply_manual_decision
from .model import (
    CitedReference,
    MatchDecision,
    Provenance,
    Verdict,
    canonical_key,
    display_details,
)


class ApiSession:
    """The one working state behind the API, with its dirty flag."""

    def __init__(self, state: store.WorkingState, state_path: Path):
        self.state = state
        self.state_path = state_path
        self.dirty = False
        self.merged_away: set[str] = set()
        self.lock = threading.Lock()


def _cr_row(cr: CitedReference, cluster: str) -> dict:
    return {
        "id": cr.id,
        "authors": list(cr.authors),
        "title": cr.title,
        "source": cr.source,
        "rpy": cr.rpy,
        "volume": cr.volume,
        "page": cr.page,
        "doi": cr.doi,
        "n_cr": cr.n_cr,
        "origin": cr.origin.value,
        "cluster": cluster,
    }


_SORT_KEYS = {
    "authors": lambda cr: canonical_key(cr).surname or None,
    "rpy": lambda cr: cr.rpy,
    "n_cr": lambda cr: cr.n_cr,
}


def _ordered_crs(state: store.WorkingState, sort: str, direction: str) -> list[CitedReference]:
    key = _SORT_KEYS[sort]
    crs = list(state.dataset.crs.values())
    present = [cr for cr in crs if key(cr) is not None]
    missing = [cr for cr in crs if key(cr) is None]
    present.sort(key=lambda cr: (key(cr), cr.id))
    if direction == "desc":
        present.reverse()
    missing.sort(key=lambda cr: cr.id)
    # rows without the sort value always collate last so fragmented CRs group
    return present + missing


def _clusters_payload(state: store.WorkingState, min_size: int) -> list[dict]:
    groups = state.cluster_state.clusters()
    payload = []
    for root in sorted(groups, key=lambda r: (-len(groups[r]), r)):
        members = groups[root]
        if len(members) < min_size:
            continue
        pairs = []
        for i, a in enumerate(members):
            for b in members[i + 1 :]:
                score = state.cluster_state.pair_scores.get((a, b) if a < b else (b, a))
                if score is not None:
                    pairs.append({"a": a, "b": b, "score": score})
        payload.append(
            {
                "id": root,
                "size": len(members),
                "members": [_cr_row(state.dataset.crs[m], root) for m in members],
                "pairs": pairs,
            }
        )
    return payload


def _summary(session: ApiSession) -> dict:
    state = session.state
    groups = state.cluster_state.clusters()
    return {
        "publications": len(state.dataset.publications),
        "crs": len(state.dataset.crs),
        "total_n_cr": state.dataset.total_n_cr(),
        "origin": state.dataset.origin.value,
        "dirty": session.dirty,
        "decisions": len(state.cluster_state.decisions),
        "multi_clusters": sum(1 for members in groups.values() if len(members) > 1),
    }


def create_app(state_path: str | Path, ui_dir: Optional[str | Path] = None) -> FastAPI:
    session = ApiSession(store.load_cre_path(state_path), Path(state_path))
    app = FastAPI(title="crkit curation API")
    app.state.session = session

    @app.get("/api/summary")
    def get_summary() -> dict:
        return _summary(session)

    @app.get("/api/crs")
    def get_crs(
        sort: str = "authors",
        dir: str = "asc",
        offset: int = 0,
        limit: int = 50,
        rpy: Optional[int] = None,
    ) -> dict:
        if sort not in _SORT_KEYS:
            raise HTTPException(400, f"unknown sort key {sort!r}")
        if dir not in ("asc", "desc"):
            raise HTTPException(400, f"dir must be asc or desc, got {dir!r}")
        if offset < 0 or limit < 0:
            raise HTTPException(400, "offset and limit must be >= 0")
        state = session.state
        ordered = _ordered_crs(state, sort, dir)
        if rpy is not None:
            ordered = [cr for cr in ordered if cr.rpy == rpy]
        page = ordered[offset : offset + limit]
        parent = state.cluster_state.parent
        return {
            "total": len(ordered),
            "offset": offset,
            "limit": limit,
            "rows": [_cr_row(cr, parent.get(cr.id, cr.id)) for cr in page],
        }

    @app.get("/api/crs/{cr_id}")
    def get_cr(cr_id: str) -> dict:
        cr = session.state.dataset.crs.get(cr_id)
        if cr is None:
            raise HTTPException(404, f"unknown cited reference {cr_id}")
        return {
            "id": cr.id,
            "details": [[label, value] for label, value in display_details(cr)],
        }

    @app.get("/api/clusters")
    def get_clusters(min_size: int = 2) -> dict:
        return {"clusters": _clusters_payload(session.state, max(1, min_size))}

    @app.post("/api/decisions")
    async def post_decision(request: Request) -> dict:
        body = await _json_body(request)
        a, b, verdict = body.get("a"), body.get("b"), body.get("verdict")
        if not isinstance(a, str) or not isinstance(b, str) or verdict not in ("SAME", "DIFFERENT"):
            raise HTTPException(400, "body must be {a, b, verdict: SAME|DIFFERENT}")
        if a == b:
            raise HTTPException(400, "a and b must be two different CR ids")
        with session.lock:
            state = session.state
            for cr_id in (a, b):
                if cr_id not in state.dataset.crs:
                    if cr_id in session.merged_away:
                        raise HTTPException(409, f"{cr_id} was merged away; reload clusters")
                    raise HTTPException(404, f"unknown cited reference {cr_id}")
            decision = MatchDecision(
                a=a, b=b, verdict=Verdict(verdict), provenance=Provenance.MANUAL
            )
            cluster_state = apply_manual_decision(state.cluster_state, decision)
            session.state = store.WorkingState(
                dataset=state.dataset,
                cluster_state=cluster_state,
                config=state.config,
                format_version=state.format_version,
                dormant_decisions=state.dormant_decisions,
            )
            session.dirty = True
            roots = {cluster_state.parent[a], cluster_state.parent[b]}
            affected = [
                c for c in _clusters_payload(session.state, 1) if c["id"] in roots
            ]
            return {"affected": affected}

    @app.post("/api/merge")
    async def post_merge() -> dict:
        with session.lock:
            before = set(session.state.dataset.crs)
            merged = store.merged_state(session.state)
            session.merged_away |= before - set(merged.dataset.crs)
            session.state = merged
            session.dirty = True
            return _summary(session)

    @app.get("/api/rpys")
    def get_rpys() -> dict:
        spectrum = analysis.rpy_histogram(session.state.dataset)
        return {
            "rows": [
                {"rpy": r.rpy, "n_cr": r.n_cr, "median_dev": r.median_dev}
                for r in spectrum.rows
            ],
            "excluded_n_cr": spectrum.excluded_n_cr,
        }

    @app.post("/api/remove-rpy")
    async def post_remove_rpy(request: Request) -> dict:
        body = await _json_body(request)
        year_from, year_to = body.get("from"), body.get("to")
        keep_missing = body.get("keep_missing", True)
        if (
            not isinstance(year_from, int)
            or not isinstance(year_to, int)
            or not isinstance(keep_missing, bool)
            or year_from > year_to
        ):
            raise HTTPException(400, "body must be {from <= to, keep_missing?}")
        with session.lock:
            before = set(session.state.dataset.crs)
            state = store.removed_years_state(session.state, year_from, year_to, keep_missing)
            session.merged_away |= before - set(state.dataset.crs)
            session.state = state
            session.dirty = True
            return _summary(session)

    @app.post("/api/save")
    async def post_save() -> dict:
        with session.lock:
            store.save_cre_path(session.state, session.state_path)
            session.dirty = False
            return {"saved": str(session.state_path), "dirty": False}

    static_dir = _find_ui_dir(ui_dir)
    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    else:

        @app.get("/", response_class=HTMLResponse)
        def index() -> str:
            return (
                "<!doctype html><title>crkit</title>"
                "<p>curation API is running; the UI bundle was not found. "
                "Build the frontend (frontend/dist) or set CRX_UI_DIR.</p>"
            )

    return app


async def _json_body(request: Request) -> dict:
    try:
        body = await request.json()
    except Exception:
        raise HTTPException(400, "malformed JSON body")
    if not isinstance(body, dict):
        raise HTTPException(400, "body must be a JSON object")
    return body


def _find_ui_dir(ui_dir: Optional[str | Path]) -> Optional[str]:
    candidates = []
    if ui_dir:
        candidates.append(Path(ui_dir))
    env = os.environ.get("CRX_UI_DIR")
    if env:
        candidates.append(Path(env))
    candidates.append(Path(__file__).resolve().parents[2] / "frontend" / "dist")
    for candidate in candidates:
        if candidate.is_dir() and (candidate / "index.html").exists():
            return str(candidate)
    return None
