"""Candidate term recognition: the stage-1 text pipeline.

Sentence splitting, lexicon-driven forward-maximum-matching tokenization,
unigram POS tagging, stopword masking and pattern chunking.  Chunks are the
maximal token runs matching ``ADJ* NOUN+`` (which contains the noun,
adjective+noun and noun+noun families).  Stopwords are masked to OTHER
rather than deleted so a chunk can never span a stopword, and whitespace is
kept as OTHER tokens for the same reason: masking instead of deleting never
fabricates adjacency the text does not contain.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from sklearn.base import BaseEstimator, TransformerMixin

POS_TAGS = ("NOUN", "ADJ", "VERB", "ADV", "PRON", "NUM", "PUNCT", "OTHER")
TAGSET = frozenset(POS_TAGS)
OTHER = "OTHER"

#: Tags allowed inside a chunk; every chunk must end in NOUN.
CHUNK_TAGS = frozenset({"ADJ", "NOUN"})

_SENTENCE_DELIMITERS = frozenset("。！？；.!?;")


@dataclass(frozen=True)
class Token:
    surface: str
    pos: str
    start: int
    end: int


@dataclass
class Sentence:
    text: str
    tokens: list[Token] = field(default_factory=list)


@dataclass(frozen=True)
class CandidateTerm:
    """A chunked noun phrase aggregated over the corpus."""

    surface: str
    normalized: str
    source_ids: frozenset[str]
    frequency: int


class Lexicon:
    """Surface-form table: one POS tag and weight per entry, plus stopwords.

    When the same surface appears more than once at build time the entry
    with the highest frequency wins (first occurrence on ties), so tagging
    stays a deterministic unigram lookup.
    """

    def __init__(self, entries: Mapping[str, tuple[str, float]],
                 stopwords: Iterable[str] = ()):
        for surface, (pos, _weight) in entries.items():
            if not surface:
                raise ValueError("lexicon entries must have non-empty surface forms")
            if pos not in TAGSET:
                raise ValueError(f"unknown POS tag {pos!r} for entry {surface!r}")
        self.entries = dict(entries)
        self.stopwords = frozenset(s for s in stopwords if s)
        self.max_entry_length = max((len(s) for s in self.entries), default=1)

    @classmethod
    def from_rows(cls, rows: Iterable[tuple[str, str, float]],
                  stopwords: Iterable[str] = ()) -> "Lexicon":
        entries: dict[str, tuple[str, float]] = {}
        for surface, pos, freq in rows:
            freq = float(freq)
            current = entries.get(surface)
            if current is None or freq > current[1]:
                entries[surface] = (pos, freq)
        return cls(entries, stopwords)

    @classmethod
    def from_tsv(cls, path, stopwords_path=None) -> "Lexicon":
        """Load ``surface<TAB>pos<TAB>frequency`` rows plus an optional stopword file."""
        rows = []
        with open(path, encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, start=1):
                line = line.rstrip("\n")
                if not line.strip() or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 3:
                    raise ValueError(f"{path}: line {lineno}: expected 3 tab-separated fields")
                surface, pos, freq = parts
                try:
                    rows.append((surface, pos, float(freq)))
                except ValueError:
                    raise ValueError(f"{path}: line {lineno}: bad frequency {freq!r}") from None
        stopwords = load_stopwords(stopwords_path) if stopwords_path else ()
        return cls.from_rows(rows, stopwords)

    def pos_of(self, surface: str) -> str:
        entry = self.entries.get(surface)
        return entry[0] if entry else OTHER

    def is_stopword(self, surface: str) -> bool:
        return surface in self.stopwords


def load_stopwords(path) -> frozenset[str]:
    with open(path, encoding="utf-8") as handle:
        return frozenset(line.strip() for line in handle if line.strip())


def split_sentences(text: str) -> list[Sentence]:
    """Split at CJK/ASCII terminal punctuation and newlines.

    Punctuation delimiters stay attached to the sentence they end; segment
    edges are stripped of whitespace and empty segments are dropped.
    """
    sentences: list[Sentence] = []
    buffer: list[str] = []

    def flush() -> None:
        segment = "".join(buffer).strip()
        buffer.clear()
        if segment:
            sentences.append(Sentence(text=segment))

    for char in text:
        if char == "\n":
            flush()
        else:
            buffer.append(char)
            if char in _SENTENCE_DELIMITERS:
                flush()
    flush()
    return sentences


def tokenize(sentence: Sentence, lexicon: Lexicon) -> Sentence:
    """Greedy forward maximum matching against the lexicon.

    Characters not covered by any entry become single-character tokens.
    All tokens start out tagged OTHER; ``tag_pos`` assigns real tags.
    """
    if not lexicon.entries:
        raise ValueError("tokenize requires a non-empty lexicon")
    text = sentence.text
    tokens: list[Token] = []
    i, n = 0, len(text)
    while i < n:
        limit = min(lexicon.max_entry_length, n - i)
        surface = text[i]
        for length in range(limit, 1, -1):
            if text[i:i + length] in lexicon.entries:
                surface = text[i:i + length]
                break
        tokens.append(Token(surface=surface, pos=OTHER, start=i, end=i + len(surface)))
        i += len(surface)
    return Sentence(text=text, tokens=tokens)


def tag_pos(tokens: Sequence[Token], lexicon: Lexicon) -> list[Token]:
    """Assign each token its lexicon tag; out-of-lexicon tokens stay OTHER."""
    return [replace(token, pos=lexicon.pos_of(token.surface)) for token in tokens]


def mask_stopwords(tokens: Sequence[Token], lexicon: Lexicon) -> list[Token]:
    """Rewrite stopword tags to OTHER without deleting the tokens."""
    return [
        replace(token, pos=OTHER) if lexicon.is_stopword(token.surface) else token
        for token in tokens
    ]


def chunk_spans(tags: Sequence[str]) -> list[tuple[int, int]]:
    """Leftmost maximal-munch ``ADJ* NOUN+`` spans over a POS sequence."""
    spans: list[tuple[int, int]] = []
    i, n = 0, len(tags)
    while i < n:
        j = i
        while j < n and tags[j] == "ADJ":
            j += 1
        k = j
        while k < n and tags[k] == "NOUN":
            k += 1
        if k > j:
            spans.append((i, k))
            i = k
        else:
            i += 1
    return spans


def chunk_candidates(sentence: Sentence) -> list[tuple[Token, ...]]:
    """Extract non-overlapping chunk token runs from a tagged sentence."""
    tokens = sentence.tokens
    return [
        tuple(tokens[start:end])
        for start, end in chunk_spans([token.pos for token in tokens])
    ]


def analyze(text: str, lexicon: Lexicon) -> list[Sentence]:
    """Run the full per-text stage-1 pipeline, returning tagged sentences."""
    sentences = []
    for sentence in split_sentences(text):
        sentence = tokenize(sentence, lexicon)
        tokens = tag_pos(sentence.tokens, lexicon)
        tokens = mask_stopwords(tokens, lexicon)
        sentences.append(Sentence(text=sentence.text, tokens=tokens))
    return sentences


def normalize_surface(surface: str) -> str:
    return unicodedata.normalize("NFC", surface)


def extract_candidates(documents: Iterable[tuple[str, str]],
                       lexicon: Lexicon) -> list[CandidateTerm]:
    """Aggregate chunk occurrences over ``(doc_id, text)`` pairs.

    Candidates are keyed by NFC-normalized surface; frequency counts every
    occurrence and source_ids collects the contributing documents.  Output
    is sorted by normalized form so aggregation order never leaks through.
    """
    surfaces: dict[str, str] = {}
    frequencies: dict[str, int] = {}
    sources: dict[str, set[str]] = {}
    for doc_id, text in documents:
        for sentence in analyze(text, lexicon):
            for chunk in chunk_candidates(sentence):
                surface = "".join(token.surface for token in chunk)
                normalized = normalize_surface(surface)
                if normalized not in surfaces:
                    surfaces[normalized] = surface
                    frequencies[normalized] = 0
                    sources[normalized] = set()
                frequencies[normalized] += 1
                sources[normalized].add(doc_id)
    return [
        CandidateTerm(
            surface=surfaces[normalized],
            normalized=normalized,
            source_ids=frozenset(sources[normalized]),
            frequency=frequencies[normalized],
        )
        for normalized in sorted(surfaces)
    ]


class CandidateExtractor(BaseEstimator, TransformerMixin):
    """Transformer facade over the stage-1 pipeline.

    ``transform`` maps an iterable of raw texts to the per-text lists of
    chunk surfaces, so the extractor drops into sklearn-style pipelines.
    """

    def __init__(self, lexicon: Lexicon):
        self.lexicon = lexicon

    def fit(self, X=None, y=None):
        if not isinstance(self.lexicon, Lexicon):
            raise ValueError("lexicon must be a Lexicon instance")
        return self

    def transform(self, X) -> list[list[str]]:
        self.fit()
        results = []
        for text in X:
            chunks = []
            for sentence in analyze(text, self.lexicon):
                chunks.extend(
                    "".join(token.surface for token in chunk)
                    for chunk in chunk_candidates(sentence)
                )
            results.append(chunks)
        return results
