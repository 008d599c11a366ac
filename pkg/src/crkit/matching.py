"""Variant detection for cited references: scoring, clustering, merging.

Pairs are blocked by reference publication year, scored with a weighted
normalized Levenshtein over the canonical key fields (with a DOI
short-circuit), joined transitively above a threshold, and constrained by
manual must-link / cannot-link decisions. Merging collapses every cluster
onto its most complete member and sums the occurrence counts.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

from .model import (
    CitedReference,
    Dataset,
    MatchDecision,
    Origin,
    Provenance,
    Verdict,
    canonical_key,
    normalize_field,
)


class UnknownCrId(KeyError):
    """A decision references a CR id that does not exist."""


@dataclass
class SimilarityConfig:
    """Tunable knobs for pair scoring and blocking.

    The field weights must sum to 1. With same_rpy_only set, only CRs whose
    publication years differ by at most rpy_slack are ever compared (CRs
    without a year compare only with each other).
    """

    threshold: float = 0.75
    weight_author: float = 0.40
    weight_source_or_title: float = 0.30
    weight_volume: float = 0.15
    weight_page: float = 0.15
    same_rpy_only: bool = True
    rpy_slack: int = 0

    def validate(self) -> None:
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold {self.threshold} outside [0, 1]")
        total = (
            self.weight_author
            + self.weight_source_or_title
            + self.weight_volume
            + self.weight_page
        )
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"weights sum to {total}, expected 1.0")
        if self.rpy_slack < 0:
            raise ValueError("rpy_slack must be >= 0")


def levenshtein(a: str, b: str) -> int:
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost))
        previous = current
    return previous[-1]


def _string_sim(a: str, b: str) -> float:
    return 1.0 - levenshtein(a, b) / max(len(a), len(b))


def pair_similarity(a: CitedReference, b: CitedReference, cfg: SimilarityConfig) -> float:
    """Similarity in [0, 1]; symmetric.

    Matching DOIs decide outright (1.0 equal, 0.0 different). Otherwise the
    score is a weighted sum of per-field similarities over the canonical key;
    a field absent on either side contributes its weight at the neutral 0.5,
    so sparse fragmented CRs can still clear the threshold when the fields
    they do have agree.
    """
    ka = canonical_key(a)
    kb = canonical_key(b)
    if ka.doi and kb.doi:
        return 1.0 if ka.doi == kb.doi else 0.0

    def contribution(va: str, vb: str) -> float:
        if not va or not vb:
            return 0.5
        return _string_sim(va, vb)

    score = cfg.weight_author * contribution(ka.surname, kb.surname)

    if ka.source_norm and kb.source_norm:
        score += cfg.weight_source_or_title * _string_sim(ka.source_norm, kb.source_norm)
    elif a.title and b.title:
        ta = normalize_field(a.title)
        tb = normalize_field(b.title)
        score += cfg.weight_source_or_title * contribution(ta, tb)
    else:
        score += cfg.weight_source_or_title * 0.5

    score += cfg.weight_volume * contribution(ka.volume_norm, kb.volume_norm)
    score += cfg.weight_page * contribution(ka.page_norm, kb.page_norm)
    return score


def block_candidates(ds: Dataset, cfg: SimilarityConfig) -> list[tuple[str, str]]:
    """Orderless candidate pairs under the year-blocking rule, no duplicates."""
    ids = sorted(ds.crs)
    pairs: list[tuple[str, str]] = []
    if not cfg.same_rpy_only:
        for i, a in enumerate(ids):
            for b in ids[i + 1 :]:
                pairs.append((a, b))
        return pairs
    for i, a in enumerate(ids):
        ya = ds.crs[a].rpy
        for b in ids[i + 1 :]:
            yb = ds.crs[b].rpy
            if ya is None and yb is None:
                pairs.append((a, b))
            elif ya is not None and yb is not None and abs(ya - yb) <= cfg.rpy_slack:
                pairs.append((a, b))
    return pairs


@dataclass
class ClusterState:
    """Partition of CR ids plus the evidence that produced it.

    parent maps every CR id to its cluster representative (the smallest id in
    the cluster). pair_scores keeps the score of every blocked pair so manual
    decisions can recluster without the dataset. decisions holds the manual
    corrections currently in force.
    """

    parent: dict[str, str]
    pair_scores: dict[tuple[str, str], float] = field(default_factory=dict)
    decisions: tuple[MatchDecision, ...] = ()
    threshold: float = 0.75

    def cluster_of(self, cr_id: str) -> str:
        return self.parent[cr_id]

    def clusters(self) -> dict[str, list[str]]:
        groups: dict[str, list[str]] = {}
        for cr_id in sorted(self.parent):
            groups.setdefault(self.parent[cr_id], []).append(cr_id)
        return groups


def _connected(
    start: str, goal: str, adjacency: dict[str, set[str]]
) -> bool:
    if start == goal:
        return True
    seen = {start}
    frontier = [start]
    while frontier:
        node = frontier.pop()
        for neighbor in adjacency.get(node, ()):
            if neighbor == goal:
                return True
            if neighbor not in seen:
                seen.add(neighbor)
                frontier.append(neighbor)
    return False


def _components(universe: Iterable[str], edges: Iterable[tuple[str, str]]) -> dict[str, str]:
    parent = {u: u for u in universe}

    def find(x: str) -> str:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            parent[rb] = ra
    return {u: find(u) for u in parent}


def _partition(
    universe: list[str],
    pair_scores: dict[tuple[str, str], float],
    threshold: float,
    decisions: Iterable[MatchDecision],
) -> dict[str, str]:
    """Components of SAME edges, split to honor cannot-link decisions.

    When a component contains a cannot-link pair, algorithmic edges are
    removed lowest score first (score ties remove the lexicographically
    larger pair first) until the pair separates; removals that turn out to be
    unnecessary are rolled back. Manual must-link edges fall only when no
    algorithmic edge is left to cut, i.e. a cannot-link beats a conflicting
    chain of must-links.
    """
    manual: dict[tuple[str, str], MatchDecision] = {}
    for d in decisions:
        if d.pair in manual:
            raise ValueError(f"more than one manual decision on pair {d.pair}")
        manual[d.pair] = d
    must_link = {p for p, d in manual.items() if d.verdict is Verdict.SAME}
    cannot_link = {p for p, d in manual.items() if d.verdict is Verdict.DIFFERENT}

    algorithmic = {
        p: s for p, s in pair_scores.items() if s >= threshold and p not in manual
    }
    edges: set[tuple[str, str]] = set(algorithmic) | must_link
    parent = _components(universe, edges)

    for component_root in sorted({parent[u] for a, b in cannot_link for u in (a, b)}):
        members = {u for u in universe if parent[u] == component_root}
        forbidden = [p for p in cannot_link if p[0] in members and p[1] in members]
        if not forbidden:
            continue
        local_alg = [e for e in algorithmic if e[0] in members and e[1] in members]
        local_manual = [e for e in must_link if e[0] in members and e[1] in members]
        order = sorted(local_alg, reverse=True)
        order.sort(key=lambda e: algorithmic[e])
        order.extend(sorted(local_manual, reverse=True))

        present = set(local_alg) | set(local_manual)

        def adjacency() -> dict[str, set[str]]:
            adj: dict[str, set[str]] = {}
            for x, y in present:
                adj.setdefault(x, set()).add(y)
                adj.setdefault(y, set()).add(x)
            return adj

        def violated() -> bool:
            adj = adjacency()
            return any(_connected(a, b, adj) for a, b in forbidden)

        removed: list[tuple[str, str]] = []
        for edge in order:
            if not violated():
                break
            present.discard(edge)
            removed.append(edge)
        for edge in reversed(removed):
            present.add(edge)
            if violated():
                present.discard(edge)

        edges -= (set(local_alg) | set(local_manual)) - present

    return _components(universe, edges)


def cluster_equivalent(
    ds: Dataset, cfg: SimilarityConfig, manual: Iterable[MatchDecision] = ()
) -> ClusterState:
    """Score all blocked pairs and build the constrained cluster partition."""
    cfg.validate()
    manual = tuple(manual)
    for d in manual:
        for cr_id in d.pair:
            if cr_id not in ds.crs:
                raise UnknownCrId(cr_id)
    pair_scores = {
        pair: pair_similarity(ds.crs[pair[0]], ds.crs[pair[1]], cfg)
        for pair in block_candidates(ds, cfg)
    }
    parent = _partition(sorted(ds.crs), pair_scores, cfg.threshold, manual)
    return ClusterState(
        parent=parent,
        pair_scores=pair_scores,
        decisions=tuple(sorted(manual, key=lambda d: d.pair)),
        threshold=cfg.threshold,
    )


def apply_manual_decision(st: ClusterState, d: MatchDecision) -> ClusterState:
    """Record a manual verdict and recluster.

    Observationally equivalent to rerunning cluster_equivalent with the
    updated decision set; the retained pair scores make the dataset
    unnecessary. A new decision on a pair replaces any prior manual one.
    """
    if d.provenance is not Provenance.MANUAL:
        raise ValueError("only MANUAL decisions can be applied")
    for cr_id in d.pair:
        if cr_id not in st.parent:
            raise UnknownCrId(cr_id)
    by_pair = {dec.pair: dec for dec in st.decisions}
    by_pair[d.pair] = d
    decisions = tuple(sorted(by_pair.values(), key=lambda dec: dec.pair))
    parent = _partition(sorted(st.parent), st.pair_scores, st.threshold, decisions)
    return ClusterState(
        parent=parent,
        pair_scores=dict(st.pair_scores),
        decisions=decisions,
        threshold=st.threshold,
    )


def completeness(cr: CitedReference) -> int:
    """Number of present bibliographic fields (authors counting as one)."""
    return sum(
        (
            bool(cr.authors),
            cr.title is not None,
            cr.source is not None,
            cr.rpy is not None,
            cr.volume is not None,
            cr.page is not None,
            cr.doi is not None,
        )
    )


def merge_clusters(ds: Dataset, st: ClusterState) -> Dataset:
    """Collapse every multi-member cluster onto one representative CR.

    The representative is the most complete member (ties: larger n_cr, then
    smaller id). It absorbs the cluster's occurrence count and adopts field
    values it lacks from the next-ranked members; its own values win
    conflicts. Publication slot lists are rewritten member -> representative,
    so per-publication slot counts never change.
    """
    new_crs: dict[str, CitedReference] = {}
    rewrite: dict[str, str] = {}
    for root, member_ids in st.clusters().items():
        members = [ds.crs[m] for m in member_ids if m in ds.crs]
        if not members:
            continue
        if len(members) == 1:
            cr = members[0]
            new_crs[cr.id] = replace(cr, authors=list(cr.authors))
            continue
        ranked = sorted(members, key=lambda c: (-completeness(c), -c.n_cr, c.id))
        rep = ranked[0]
        merged = replace(rep, authors=list(rep.authors), n_cr=sum(m.n_cr for m in members))
        for donor in ranked[1:]:
            if not merged.authors and donor.authors:
                merged.authors = list(donor.authors)
            if merged.title is None and donor.title is not None:
                merged.title = donor.title
            if merged.source is None and donor.source is not None:
                merged.source = donor.source
            if merged.rpy is None and donor.rpy is not None:
                merged.rpy = donor.rpy
            if merged.volume is None and donor.volume is not None:
                merged.volume = donor.volume
            if merged.page is None and donor.page is not None:
                merged.page = donor.page
            if merged.doi is None and donor.doi is not None:
                merged.doi = donor.doi
        if merged.origin is Origin.WOS and len(merged.authors) > 1:
            merged.authors = merged.authors[:1]
        new_crs[rep.id] = merged
        for m in members:
            if m.id != rep.id:
                rewrite[m.id] = rep.id

    for cr_id, cr in ds.crs.items():
        if cr_id not in new_crs and cr_id not in rewrite:
            new_crs[cr_id] = replace(cr, authors=list(cr.authors))

    new_pubs = [
        replace(
            pub,
            fields={t: list(v) for t, v in pub.fields.items()},
            cr_ids=[rewrite.get(cid, cid) for cid in pub.cr_ids],
        )
        for pub in ds.publications
    ]
    return Dataset(origin=ds.origin, publications=new_pubs, crs=new_crs, sources=list(ds.sources))
