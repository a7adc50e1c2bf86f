"""Term merging and seeded K-means partitioning into subject clusters.

The ranked pool is unioned with corpus keywords under an aggressive string
normalization (NFC, full-width folding, trim, ASCII case-fold) and the
merged terms are clustered on their embeddings.  K-means is implemented
here rather than borrowed because the pipeline depends on behavior the
usual libraries do not pin down: seeded k-means++ initialization, an
inertia trace asserted non-increasing at every Lloyd iteration, and empty
clusters repaired by stealing the point farthest from its centroid.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin

from .ranking import PooledTerm
from .validation import as_float_matrix

_FULLWIDTH_TABLE = {code: code - 0xFEE0 for code in range(0xFF01, 0xFF5F)}
_FULLWIDTH_TABLE[0x3000] = 0x20  # ideographic space


def normalize_term(text: str) -> str:
    """Canonical merge key: NFC, full-width to half-width, trim, ASCII case-fold."""
    text = unicodedata.normalize("NFC", text)
    text = text.translate(_FULLWIDTH_TABLE)
    text = text.strip()
    return "".join(ch.lower() if ch.isascii() else ch for ch in text)


@dataclass(frozen=True)
class Term:
    """A merged subject-term with its embedding."""

    normalized: str
    surface: str
    relevance: float
    origin: str  # "candidate" | "keyword"
    sources: frozenset[str]
    vector: np.ndarray = field(compare=False, repr=False)


@dataclass(frozen=True)
class TermCluster:
    id: int
    members: tuple[Term, ...]
    centroid: np.ndarray = field(compare=False, repr=False)


@dataclass(frozen=True)
class KMeansConfig:
    k: int
    seed: int = 0
    max_iter: int = 100
    tol: float = 1e-6

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k!r}")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.tol < 0:
            raise ValueError("tol must be non-negative")


@dataclass(frozen=True)
class KMeansResult:
    assignments: np.ndarray
    centroids: np.ndarray
    inertia: float
    n_iter: int
    inertia_history: tuple[float, ...]


def merge_with_keywords(pool: Sequence[PooledTerm],
                        keyword_sources: Iterable[tuple[str, Iterable[str]]],
                        embedder) -> list[Term]:
    """Union the ranked pool with per-record corpus keywords.

    Keyword-only terms enter with relevance 0; terms already in the pool
    keep their relevance and gain the keyword's record as a source.  All
    terms are embedded on their merge-normalized form.
    """
    merged: dict[str, dict] = {}
    for pooled in pool:
        key = normalize_term(pooled.term.normalized)
        if not key:
            continue
        entry = merged.get(key)
        if entry is None:
            merged[key] = {
                "surface": pooled.term.surface,
                "relevance": pooled.relevance,
                "origin": "candidate",
                "sources": set(pooled.term.source_ids),
            }
        else:
            entry["relevance"] = max(entry["relevance"], pooled.relevance)
            entry["sources"] |= pooled.term.source_ids
            entry["origin"] = "candidate"
    for record_id, keywords in keyword_sources:
        for keyword in keywords:
            key = normalize_term(keyword)
            if not key:
                continue
            entry = merged.get(key)
            if entry is None:
                merged[key] = {
                    "surface": keyword.strip(),
                    "relevance": 0.0,
                    "origin": "keyword",
                    "sources": {record_id},
                }
            else:
                entry["sources"].add(record_id)
    return [
        Term(
            normalized=key,
            surface=merged[key]["surface"],
            relevance=merged[key]["relevance"],
            origin=merged[key]["origin"],
            sources=frozenset(merged[key]["sources"]),
            vector=embedder.embed(key),
        )
        for key in sorted(merged)
    ]


def _squared_distances(X: np.ndarray, centroid: np.ndarray) -> np.ndarray:
    diff = X - centroid
    return np.einsum("ij,ij->i", diff, diff)


def _kmeans_pp_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Seeded k-means++ seeding: D^2-weighted sampling of successive centers."""
    n = X.shape[0]
    centers = [X[int(rng.integers(n))]]
    d2 = _squared_distances(X, centers[0])
    for _ in range(1, k):
        total = float(d2.sum())
        if total <= 0.0:
            index = int(rng.integers(n))
        else:
            index = int(rng.choice(n, p=d2 / total))
        centers.append(X[index])
        d2 = np.minimum(d2, _squared_distances(X, X[index]))
    return np.stack(centers)


def _assign(X: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    distances = np.stack([_squared_distances(X, c) for c in centroids])
    return distances.argmin(axis=0)  # ties resolve to the lowest centroid index


def _inertia(X: np.ndarray, centroids: np.ndarray, assignments: np.ndarray) -> float:
    diff = X - centroids[assignments]
    return float(np.einsum("ij,ij->", diff, diff))


def _repair_empty(X: np.ndarray, centroids: np.ndarray,
                  assignments: np.ndarray, k: int) -> None:
    """Give each empty cluster the point farthest from its current centroid.

    Donors must keep at least one member, so exactly k non-empty clusters
    survive.  Mutates centroids and assignments in place.
    """
    for cluster in range(k):
        if np.any(assignments == cluster):
            continue
        counts = np.bincount(assignments, minlength=k)
        d2 = _squared_distances(X, centroids[assignments])
        d2[counts[assignments] <= 1] = -np.inf
        thief = int(d2.argmax())
        donor = int(assignments[thief])
        assignments[thief] = cluster
        centroids[cluster] = X[thief]
        donor_members = assignments == donor
        centroids[donor] = X[donor_members].mean(axis=0)


def kmeans(points, config: KMeansConfig) -> KMeansResult:
    """Seeded k-means++ plus Lloyd iterations on the squared-Euclidean objective.

    The inertia after every iteration is recorded and asserted
    non-increasing; iteration stops when the maximum centroid movement
    drops below ``tol`` or after ``max_iter`` rounds.  The final
    assignments are recomputed against the final centroids so every point
    sits with its nearest one.
    """
    X = as_float_matrix(points, "points")
    n = X.shape[0]
    if config.k > n:
        raise ValueError(f"k={config.k} exceeds the number of points ({n})")
    rng = np.random.default_rng(config.seed)
    centroids = _kmeans_pp_init(X, config.k, rng)
    history: list[float] = []
    n_iter = 0
    for n_iter in range(1, config.max_iter + 1):
        assignments = _assign(X, centroids)
        new_centroids = centroids.copy()
        for cluster in range(config.k):
            members = assignments == cluster
            if members.any():
                new_centroids[cluster] = X[members].mean(axis=0)
        _repair_empty(X, new_centroids, assignments, config.k)
        inertia = _inertia(X, new_centroids, assignments)
        if history and inertia > history[-1] * (1.0 + 1e-12) + 1e-12:
            raise AssertionError(
                f"inertia increased at iteration {n_iter}: {history[-1]} -> {inertia}"
            )
        history.append(inertia)
        shift = float(np.sqrt(((new_centroids - centroids) ** 2).sum(axis=1)).max())
        centroids = new_centroids
        if shift < config.tol:
            break
    assignments = _assign(X, centroids)
    # Duplicate centroids can empty a cluster through the lowest-index tie
    # break; repair once more so exactly k non-empty clusters come out.
    _repair_empty(X, centroids, assignments, config.k)
    final_inertia = _inertia(X, centroids, assignments)
    history.append(final_inertia)
    return KMeansResult(
        assignments=assignments,
        centroids=centroids,
        inertia=final_inertia,
        n_iter=n_iter,
        inertia_history=tuple(history),
    )


def kmeans_scan(points, ks: Iterable[int], seed: int = 0, max_iter: int = 100,
                tol: float = 1e-6) -> list[tuple[int, float]]:
    """Inertia per k over a range, for elbow inspection."""
    X = as_float_matrix(points, "points")
    results = []
    for k in ks:
        if k < 1 or k > X.shape[0]:
            continue
        result = kmeans(X, KMeansConfig(k=k, seed=seed, max_iter=max_iter, tol=tol))
        results.append((k, result.inertia))
    return results


def cluster_terms(terms: Sequence[Term], config: KMeansConfig) -> list[TermCluster]:
    """K-means over term embeddings, with stable cluster ids.

    Clusters are relabeled 0..k-1 in order of their lexicographically first
    member, so ids do not depend on initialization internals.
    """
    if not terms:
        raise ValueError("cluster_terms requires at least one term")
    X = np.stack([term.vector for term in terms])
    result = kmeans(X, config)
    groups: dict[int, list[Term]] = {}
    for term, label in zip(terms, result.assignments):
        groups.setdefault(int(label), []).append(term)
    ordered = sorted(groups, key=lambda label: min(t.normalized for t in groups[label]))
    return [
        TermCluster(
            id=new_id,
            members=tuple(sorted(groups[label], key=lambda t: t.normalized)),
            centroid=result.centroids[label],
        )
        for new_id, label in enumerate(ordered)
    ]


class TermKMeans(BaseEstimator, ClusterMixin):
    """Estimator facade over :func:`kmeans` (fit/predict, sklearn params)."""

    def __init__(self, n_clusters: int = 8, seed: int = 0, max_iter: int = 100,
                 tol: float = 1e-6):
        self.n_clusters = n_clusters
        self.seed = seed
        self.max_iter = max_iter
        self.tol = tol

    def fit(self, X, y=None):
        result = kmeans(X, KMeansConfig(k=self.n_clusters, seed=self.seed,
                                        max_iter=self.max_iter, tol=self.tol))
        self.cluster_centers_ = result.centroids
        self.labels_ = result.assignments
        self.inertia_ = result.inertia
        self.n_iter_ = result.n_iter
        self.inertia_history_ = result.inertia_history
        return self

    def predict(self, X) -> np.ndarray:
        if not hasattr(self, "cluster_centers_"):
            raise ValueError("TermKMeans must be fitted before predict")
        return _assign(as_float_matrix(X, "X"), self.cluster_centers_)
