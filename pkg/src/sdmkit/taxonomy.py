"""The three-layer subject model: tree, auto-mapping and audited curation.

Layer 1 holds exactly two roots (PE for natural subject matter, IE for
conventional interpretation), layer 2 the categories and layer 3 the
subjects that clusters map onto.  Cluster-to-subject mapping is automatic
above a similarity threshold; everything below lands in an UNMAPPED pool
for expert review.  Manual corrections are per-term overrides layered on
top of the cluster assignment and every successful mutation appends one
audit entry.
"""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable, Iterable, Sequence

import numpy as np

from .embedding import cosine, l2_normalize

ELEMENT_KINDS = ("PE", "IE")
DEFAULT_TAU = 0.3

#: Key used for the unmapped pool in exported per-subject term lists.
UNMAPPED_KEY = "UNMAPPED"


class TaxonomyError(ValueError):
    """The tree or a curation request violated a structural invariant."""


@dataclass(frozen=True)
class SdmNode:
    id: str
    label: str
    layer: int
    parent: str | None = None
    element_kind: str | None = None  # set on layer-1 roots, inherited below
    seed_terms: tuple[str, ...] = ()


class SdmTaxonomy:
    """Validated three-layer tree with a monotonically increasing version."""

    def __init__(self, nodes: Iterable[SdmNode], version: int = 1):
        self.nodes: dict[str, SdmNode] = {}
        for node in nodes:
            if node.id in self.nodes:
                raise TaxonomyError(f"duplicate node id {node.id!r}")
            self.nodes[node.id] = node
        self.version = version
        self._children: dict[str, list[str]] = {}
        self._validate()

    def _validate(self) -> None:
        roots = [n for n in self.nodes.values() if n.layer == 1]
        for node in self.nodes.values():
            if node.layer not in (1, 2, 3):
                raise TaxonomyError(f"node {node.id!r}: layer must be 1, 2 or 3")
            if not node.label:
                raise TaxonomyError(f"node {node.id!r}: label must be non-empty")
            if node.layer == 1:
                if node.parent is not None:
                    raise TaxonomyError(f"node {node.id!r}: layer-1 nodes have no parent")
                if node.element_kind not in ELEMENT_KINDS:
                    raise TaxonomyError(
                        f"node {node.id!r}: layer-1 element_kind must be PE or IE"
                    )
            else:
                if node.parent is None:
                    raise TaxonomyError(f"node {node.id!r}: missing parent")
                parent = self.nodes.get(node.parent)
                if parent is None:
                    raise TaxonomyError(f"node {node.id!r}: unknown parent {node.parent!r}")
                if parent.layer + 1 != node.layer:
                    raise TaxonomyError(
                        f"node {node.id!r}: layer {node.layer} under layer-{parent.layer} "
                        f"parent {parent.id!r}"
                    )
                self._children.setdefault(node.parent, []).append(node.id)
        if len(roots) != 2 or {n.element_kind for n in roots} != set(ELEMENT_KINDS):
            raise TaxonomyError("taxonomy requires exactly two layer-1 roots: one PE, one IE")
        for parent_id, child_ids in self._children.items():
            labels = [self.nodes[c].label for c in child_ids]
            if len(labels) != len(set(labels)):
                duplicated = sorted({l for l in labels if labels.count(l) > 1})
                raise TaxonomyError(
                    f"duplicate sibling label(s) {duplicated} under {parent_id!r}"
                )

    def node(self, node_id: str) -> SdmNode:
        node = self.nodes.get(node_id)
        if node is None:
            raise TaxonomyError(f"unknown node {node_id!r}")
        return node

    def children(self, node_id: str) -> list[SdmNode]:
        return [self.nodes[c] for c in self._children.get(node_id, [])]

    def subjects(self) -> list[SdmNode]:
        """All layer-3 nodes, sorted by id."""
        return sorted((n for n in self.nodes.values() if n.layer == 3),
                      key=lambda n: n.id)

    def element_kind_of(self, node_id: str) -> str:
        node = self.node(node_id)
        while node.parent is not None:
            node = self.node(node.parent)
        return node.element_kind  # type: ignore[return-value]

    def path_labels(self, node_id: str) -> list[str]:
        labels: list[str] = []
        node = self.node(node_id)
        while True:
            labels.append(node.label)
            if node.parent is None:
                break
            node = self.node(node.parent)
        return list(reversed(labels))

    def to_dicts(self) -> list[dict]:
        return [
            {
                "id": n.id,
                "label": n.label,
                "layer": n.layer,
                "parent": n.parent,
                "element_kind": self.element_kind_of(n.id),
                "seed_terms": list(n.seed_terms),
            }
            for n in sorted(self.nodes.values(), key=lambda n: n.id)
        ]


def _node_from_dict(obj: dict) -> SdmNode:
    try:
        return SdmNode(
            id=obj["id"],
            label=obj["label"],
            layer=int(obj["layer"]),
            parent=obj.get("parent"),
            element_kind=obj.get("element_kind") if int(obj["layer"]) == 1 else None,
            seed_terms=tuple(obj.get("seed_terms", ())),
        )
    except KeyError as exc:
        raise TaxonomyError(f"node object missing field {exc.args[0]!r}") from None


def taxonomy_from_dicts(node_dicts: Iterable[dict], version: int = 1) -> SdmTaxonomy:
    return SdmTaxonomy((_node_from_dict(obj) for obj in node_dicts), version=version)


def load_taxonomy(path) -> SdmTaxonomy:
    """Load and validate a taxonomy file (JSON node list with parent ids)."""
    with open(path, encoding="utf-8") as handle:
        doc = json.load(handle)
    if isinstance(doc, dict):
        nodes = doc.get("nodes")
        version = int(doc.get("version", 1))
    else:
        nodes, version = doc, 1
    if not isinstance(nodes, list):
        raise TaxonomyError(f"{path}: expected a node list")
    return taxonomy_from_dicts(nodes, version=version)


def save_taxonomy(taxonomy: SdmTaxonomy, path) -> None:
    doc = {"version": taxonomy.version, "nodes": taxonomy.to_dicts()}
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(doc, handle, ensure_ascii=False, sort_keys=True, indent=2)
        handle.write("\n")


def subject_embedding(node: SdmNode, embedder) -> np.ndarray:
    """Mean embedding of a subject's label and seed terms, L2-normalized."""
    if node.layer != 3:
        raise TaxonomyError(f"node {node.id!r} is not a layer-3 subject")
    texts = [node.label, *node.seed_terms]
    vectors = np.stack([embedder.embed(text) for text in texts])
    return l2_normalize(vectors.mean(axis=0))


@dataclass
class SubjectMapping:
    cluster_id: int
    subject_id: str | None  # None == UNMAPPED
    score: float
    provenance: str = "AUTO"  # AUTO | MANUAL
    term_overrides: dict[str, str] = field(default_factory=dict)


def auto_map_clusters(clusters, taxonomy: SdmTaxonomy, embedder,
                      tau: float = DEFAULT_TAU) -> list[SubjectMapping]:
    """Assign each cluster to the most similar subject, or UNMAPPED below tau.

    Similarity is cosine between the cluster centroid and the subject
    embedding; ties break by lexicographic node id.  Each cluster is mapped
    independently, so the result is idempotent and order-free.
    """
    subjects = taxonomy.subjects()
    if not subjects:
        raise TaxonomyError("taxonomy has no layer-3 subjects to map onto")
    subject_vectors = [(node.id, subject_embedding(node, embedder)) for node in subjects]
    mappings = []
    for cluster in sorted(clusters, key=lambda c: c.id):
        best_id, best_score = None, -np.inf
        for node_id, vector in subject_vectors:  # ids ascend, so ties keep the first
            score = cosine(cluster.centroid, vector)
            if score > best_score:
                best_id, best_score = node_id, score
        mappings.append(SubjectMapping(
            cluster_id=cluster.id,
            subject_id=best_id if best_score >= tau else None,
            score=float(best_score),
            provenance="AUTO",
        ))
    return mappings


@dataclass(frozen=True)
class AuditEntry:
    seq: int
    timestamp: str
    actor: str
    action: str  # MOVE_TERM | REASSIGN_CLUSTER | EDIT_NODE
    before: dict
    after: dict

    def to_dict(self) -> dict:
        return {
            "seq": self.seq,
            "timestamp": self.timestamp,
            "actor": self.actor,
            "action": self.action,
            "before": self.before,
            "after": self.after,
        }


@dataclass(frozen=True)
class ClusterTerms:
    """A cluster reduced to what the model document needs: id and members."""

    id: int
    members: tuple[str, ...]


@dataclass(frozen=True)
class ModelTerm:
    normalized: str
    surface: str
    relevance: float
    origin: str
    sources: tuple[str, ...]


MODEL_FORMAT = "sdm-model/1"


class SdmModel:
    """The curated model: taxonomy + clusters + mappings + terms + audit log.

    A single-writer object: mutations validate first and only then touch
    state, so a failed call leaves the model bit-identical.  The audit log
    is in-memory and append-only; it is not part of the export document
    (exports must be byte-stable, timestamps are not).
    """

    def __init__(self, taxonomy: SdmTaxonomy, clusters: Sequence[ClusterTerms],
                 mappings: Sequence[SubjectMapping], terms: Sequence[ModelTerm],
                 clock: Callable[[], str] | None = None):
        self.taxonomy = taxonomy
        self.clusters = sorted(clusters, key=lambda c: c.id)
        self.mappings = {m.cluster_id: m for m in mappings}
        self.terms = {t.normalized: t for t in terms}
        self.audit: list[AuditEntry] = []
        self._clock = clock or (lambda: datetime.now(timezone.utc).isoformat())
        self._cluster_of: dict[str, int] = {}
        for cluster in self.clusters:
            if cluster.id not in self.mappings:
                raise TaxonomyError(f"cluster {cluster.id} has no mapping")
            for member in cluster.members:
                if member in self._cluster_of:
                    raise TaxonomyError(
                        f"term {member!r} appears in clusters "
                        f"{self._cluster_of[member]} and {cluster.id}"
                    )
                self._cluster_of[member] = cluster.id

    @property
    def version(self) -> int:
        return self.taxonomy.version

    def cluster_of(self, term: str) -> int:
        if term not in self._cluster_of:
            raise TaxonomyError(f"unknown term {term!r}")
        return self._cluster_of[term]

    def effective_subject(self, term: str) -> str | None:
        """Override target if present, else the term's cluster subject."""
        mapping = self.mappings[self.cluster_of(term)]
        return mapping.term_overrides.get(term, mapping.subject_id)

    def subject_terms(self) -> dict[str, list[str]]:
        """Per-subject term lists with overrides applied; UNMAPPED pooled."""
        out: dict[str, list[str]] = {}
        for cluster in self.clusters:
            for member in cluster.members:
                subject = self.effective_subject(member)
                out.setdefault(subject if subject is not None else UNMAPPED_KEY,
                               []).append(member)
        return {key: sorted(values) for key, values in sorted(out.items())}

    def move_term(self, term: str, to_subject: str, actor: str) -> AuditEntry:
        """Manually move one term to a layer-3 subject (audited, last-write-wins)."""
        cluster_id = self.cluster_of(term)
        target = self.taxonomy.node(to_subject)
        if target.layer != 3:
            raise TaxonomyError(
                f"move target {to_subject!r} is a layer-{target.layer} node, not a subject"
            )
        mapping = self.mappings[cluster_id]
        before = {"term": term, "subject_id": self.effective_subject(term),
                  "provenance": mapping.provenance}
        mapping.term_overrides[term] = to_subject
        mapping.provenance = "MANUAL"
        self.taxonomy.version += 1
        entry = AuditEntry(
            seq=len(self.audit) + 1,
            timestamp=self._clock(),
            actor=actor,
            action="MOVE_TERM",
            before=before,
            after={"term": term, "subject_id": to_subject, "provenance": "MANUAL"},
        )
        self.audit.append(entry)
        return entry

    def to_document(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "version": self.version,
            "taxonomy": self.taxonomy.to_dicts(),
            "clusters": [
                {"id": c.id, "members": list(c.members)} for c in self.clusters
            ],
            "mappings": [
                {
                    "cluster_id": m.cluster_id,
                    "subject_id": m.subject_id,
                    "score": m.score,
                    "provenance": m.provenance,
                    "term_overrides": dict(sorted(m.term_overrides.items())),
                }
                for m in sorted(self.mappings.values(), key=lambda m: m.cluster_id)
            ],
            "terms": [
                {
                    "normalized": t.normalized,
                    "surface": t.surface,
                    "relevance": t.relevance,
                    "origin": t.origin,
                    "sources": sorted(t.sources),
                }
                for t in sorted(self.terms.values(), key=lambda t: t.normalized)
            ],
            "subject_terms": self.subject_terms(),
        }

    @classmethod
    def from_document(cls, doc: dict, clock: Callable[[], str] | None = None) -> "SdmModel":
        if doc.get("format") != MODEL_FORMAT:
            raise TaxonomyError(f"unsupported model format {doc.get('format')!r}")
        taxonomy = taxonomy_from_dicts(doc["taxonomy"], version=int(doc["version"]))
        clusters = [ClusterTerms(id=int(c["id"]), members=tuple(c["members"]))
                    for c in doc["clusters"]]
        mappings = [
            SubjectMapping(
                cluster_id=int(m["cluster_id"]),
                subject_id=m["subject_id"],
                score=float(m["score"]),
                provenance=m["provenance"],
                term_overrides=dict(m.get("term_overrides", {})),
            )
            for m in doc["mappings"]
        ]
        terms = [
            ModelTerm(
                normalized=t["normalized"],
                surface=t["surface"],
                relevance=float(t["relevance"]),
                origin=t["origin"],
                sources=tuple(t["sources"]),
            )
            for t in doc.get("terms", [])
        ]
        return cls(taxonomy, clusters, mappings, terms, clock=clock)

    def export(self, path) -> None:
        write_model_document(self.to_document(), path)

    @classmethod
    def load(cls, path, clock: Callable[[], str] | None = None) -> "SdmModel":
        with open(path, encoding="utf-8") as handle:
            return cls.from_document(json.load(handle), clock=clock)

    def state_hash(self) -> str:
        return hashlib.sha256(render_model_document(self.to_document()).encode("utf-8")).hexdigest()

    def snapshot(self) -> "SdmModel":
        """Deep copy for copy-mutate-swap writers."""
        return copy.deepcopy(self)


def render_model_document(doc: dict) -> str:
    """Canonical byte-stable rendering of a model document."""
    return json.dumps(doc, ensure_ascii=False, sort_keys=True, indent=2) + "\n"


def write_model_document(doc: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(render_model_document(doc))
