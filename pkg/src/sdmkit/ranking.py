"""Stage-2 term ranking: embedding relevance with MMR diversification.

The first pick is always an argmax of plain relevance; every later pick
maximizes ``lambda * cos(term, document) - (1 - lambda) * max cos(term,
selected)``.  Cosines enter the objective raw (no min-max rescaling) and
score ties break by lexicographic normalized form, so a ranking is a pure
function of its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .embedding import cosine, l2_normalize
from .textproc import CandidateTerm, split_sentences


@dataclass(frozen=True)
class RankingConfig:
    lam: float = 0.5
    top_n: int = 15

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lambda must lie in [0, 1], got {self.lam!r}")
        if self.top_n < 1:
            raise ValueError(f"top_n must be >= 1, got {self.top_n!r}")


@dataclass(frozen=True)
class RankedTerm:
    term: CandidateTerm
    relevance: float
    mmr_score: float
    rank: int


@dataclass(frozen=True)
class PooledTerm:
    """A term surviving into the corpus-level pool with its best relevance."""

    term: CandidateTerm
    relevance: float


def document_embedding(text: str, embedder) -> np.ndarray:
    """Mean of the document's sentence embeddings, L2-normalized.

    An empty document embeds to the zero vector and therefore ranks last
    everywhere (cosine against zero is 0).
    """
    sentences = split_sentences(text)
    if not sentences:
        return np.zeros(embedder.embed("x").shape, dtype=float)
    vectors = np.stack([embedder.embed(sentence.text) for sentence in sentences])
    return l2_normalize(vectors.mean(axis=0))


def mmr_select(keys: Sequence[str], relevance: Mapping[str, float],
               similarity: Callable[[str, str], float], lam: float,
               top_n: int) -> list[tuple[str, float, float]]:
    """Greedy MMR selection over opaque keys.

    Returns ``(key, relevance, mmr_score)`` in selection order; the first
    pick's mmr_score is its relevance.  Ties take the lexicographically
    smallest key.
    """
    remaining = sorted(set(keys))
    if len(remaining) != len(keys):
        raise ValueError("mmr_select requires unique keys")
    selected: list[tuple[str, float, float]] = []
    max_sim: dict[str, float] = {}
    while remaining and len(selected) < top_n:
        if not selected:
            best = max(remaining, key=lambda k: relevance[k])
            score = relevance[best]
        else:
            best = max(remaining,
                       key=lambda k: lam * relevance[k] - (1.0 - lam) * max_sim[k])
            score = lam * relevance[best] - (1.0 - lam) * max_sim[best]
        selected.append((best, relevance[best], score))
        remaining.remove(best)
        for key in remaining:
            sim = similarity(key, best)
            if key not in max_sim or sim > max_sim[key]:
                max_sim[key] = sim
    return selected


def rank_terms(candidates: Sequence[CandidateTerm], doc_vec: np.ndarray,
               embedder, config: RankingConfig | None = None) -> list[RankedTerm]:
    """Rank a document's candidates by MMR against its embedding."""
    config = config or RankingConfig()
    if not candidates:
        return []
    by_norm = {c.normalized: c for c in candidates}
    if len(by_norm) != len(candidates):
        raise ValueError("candidates must be deduplicated by normalized form")
    vectors = {norm: embedder.embed(norm) for norm in by_norm}
    relevance = {norm: cosine(vectors[norm], doc_vec) for norm in by_norm}
    picks = mmr_select(
        list(by_norm),
        relevance,
        lambda a, b: cosine(vectors[a], vectors[b]),
        config.lam,
        config.top_n,
    )
    return [
        RankedTerm(term=by_norm[key], relevance=rel, mmr_score=score, rank=index + 1)
        for index, (key, rel, score) in enumerate(picks)
    ]


def rank_corpus(candidates: Sequence[CandidateTerm],
                corpus_texts: Iterable[tuple[str, str]], embedder,
                config: RankingConfig | None = None,
                ) -> tuple[dict[str, list[RankedTerm]], list[PooledTerm]]:
    """Rank every document and merge the winners into one pool.

    The pool is the union of all per-document top-N terms, deduplicated by
    normalized form with the maximum relevance retained, sorted by
    descending relevance (normalized form on ties).
    """
    config = config or RankingConfig()
    per_document: dict[str, list[RankedTerm]] = {}
    pool: dict[str, PooledTerm] = {}
    for doc_id, text in sorted(corpus_texts):
        doc_candidates = [c for c in candidates if doc_id in c.source_ids]
        doc_vec = document_embedding(text, embedder)
        ranked = rank_terms(doc_candidates, doc_vec, embedder, config)
        per_document[doc_id] = ranked
        for entry in ranked:
            norm = entry.term.normalized
            current = pool.get(norm)
            if current is None or entry.relevance > current.relevance:
                pool[norm] = PooledTerm(term=entry.term, relevance=entry.relevance)
    merged = sorted(pool.values(), key=lambda p: (-p.relevance, p.term.normalized))
    return per_document, merged
