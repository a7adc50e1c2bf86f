"""Deterministic text-embedding providers and the shared cosine kernel.

Documents, candidate terms and taxonomy subjects all live in one vector
space.  The built-in provider hashes character n-grams into signed buckets,
which keeps the whole pipeline reproducible without a pretrained model;
vectors exported from any real sentence encoder can be dropped in through
``load_vector_table`` and out-of-table text falls back to the hasher at the
same dimension.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .validation import as_float_vector, check_same_dim

DEFAULT_DIM = 256

# Frozen hash seed: changing it changes every vector, score and cluster
# downstream, so it is part of the on-disk artifact contract.
DEFAULT_HASH_SEED = "sdmkit.embedding/1"


def l2_normalize(v: np.ndarray) -> np.ndarray:
    """Scale to unit L2 norm; the zero vector is returned unchanged."""
    norm = float(np.linalg.norm(v))
    return v / norm if norm > 0.0 else v


def cosine(u, v) -> float:
    """Cosine similarity in [-1, 1]; zero-norm inputs yield 0.0 by convention."""
    u = as_float_vector(u, "u")
    v = as_float_vector(v, "v")
    check_same_dim(u, v)
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


def _seed_key(seed: str) -> bytes:
    return hashlib.sha256(seed.encode("utf-8")).digest()[:32]


class HashingEmbedder(BaseEstimator, TransformerMixin):
    """Signed feature hashing of character n-grams, L2-normalized.

    Stateless and fully deterministic: the same text always maps to the
    same vector, across processes and platforms.  Empty text embeds to the
    zero vector (callers treat it as "no signal"; cosine against it is 0).
    """

    def __init__(self, dim: int = DEFAULT_DIM, ngram_min: int = 1,
                 ngram_max: int = 3, seed: str = DEFAULT_HASH_SEED):
        self.dim = dim
        self.ngram_min = ngram_min
        self.ngram_max = ngram_max
        self.seed = seed

    @property
    def name(self) -> str:
        return "baseline"

    def _check_params(self) -> None:
        if not isinstance(self.dim, int) or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim!r}")
        if self.ngram_min < 1 or self.ngram_max < self.ngram_min:
            raise ValueError("require 1 <= ngram_min <= ngram_max")

    def _slot(self, tag: int, gram: str, key: bytes) -> tuple[int, float]:
        h = hashlib.blake2b(f"{tag}:{gram}".encode("utf-8"),
                            digest_size=9, key=key).digest()
        index = int.from_bytes(h[:8], "big") % self.dim
        sign = 1.0 if h[8] & 1 else -1.0
        return index, sign

    def embed(self, text: str) -> np.ndarray:
        self._check_params()
        vec = np.zeros(self.dim, dtype=float)
        if text:
            key = _seed_key(self.seed)
            for n in range(self.ngram_min, self.ngram_max + 1):
                for i in range(len(text) - n + 1):
                    index, sign = self._slot(n, text[i:i + n], key)
                    vec[index] += sign
            if not vec.any():
                # Signed buckets can cancel exactly; pin one bucket so
                # non-empty text never embeds to zero.
                index, _ = self._slot(0, text, key)
                vec[index] = 1.0
        return l2_normalize(vec)

    def fit(self, X=None, y=None):
        self._check_params()
        return self

    def transform(self, X) -> np.ndarray:
        return np.stack([self.embed(text) for text in X]) if len(X) \
            else np.zeros((0, self.dim), dtype=float)


class TableEmbedder(BaseEstimator, TransformerMixin):
    """Embedding lookup over precomputed vectors with hashed fallback.

    ``table`` maps exact text to its vector.  Text outside the table is
    embedded by a :class:`HashingEmbedder` at the same dimension, so the
    provider stays total and deterministic.
    """

    def __init__(self, table: dict, dim: int | None = None,
                 seed: str = DEFAULT_HASH_SEED):
        self.table = table
        self.dim = dim
        self.seed = seed

    @property
    def name(self) -> str:
        return "table"

    def _resolved_dim(self) -> int:
        if self.dim is not None:
            return self.dim
        for vec in self.table.values():
            return len(vec)
        return DEFAULT_DIM

    def embed(self, text: str) -> np.ndarray:
        dim = self._resolved_dim()
        hit = self.table.get(text)
        if hit is not None:
            vec = as_float_vector(hit, f"vector for {text!r}")
            if len(vec) != dim:
                raise ValueError(
                    f"vector for {text!r} has dimension {len(vec)}, expected {dim}"
                )
            return vec
        return HashingEmbedder(dim=dim, seed=self.seed).embed(text)

    def fit(self, X=None, y=None):
        self._resolved_dim()
        return self

    def transform(self, X) -> np.ndarray:
        dim = self._resolved_dim()
        return np.stack([self.embed(text) for text in X]) if len(X) \
            else np.zeros((0, dim), dtype=float)


def load_vector_table(path, seed: str = DEFAULT_HASH_SEED) -> TableEmbedder:
    """Load a ``text<TAB>c1 c2 ...`` vector table into a TableEmbedder.

    Every row must share one dimension; violations are rejected with the
    offending 1-based row number.
    """
    table: dict[str, np.ndarray] = {}
    dim: int | None = None
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if "\t" not in line:
                raise ValueError(f"{path}: row {lineno}: expected 'text<TAB>components'")
            text, _, rest = line.partition("\t")
            try:
                components = [float(part) for part in rest.split()]
            except ValueError as exc:
                raise ValueError(f"{path}: row {lineno}: {exc}") from None
            if not components:
                raise ValueError(f"{path}: row {lineno}: empty vector")
            if dim is None:
                dim = len(components)
            elif len(components) != dim:
                raise ValueError(
                    f"{path}: row {lineno}: dimension {len(components)} != {dim}"
                )
            if text in table:
                raise ValueError(f"{path}: row {lineno}: duplicate text {text!r}")
            table[text] = np.asarray(components, dtype=float)
    return TableEmbedder(table=table, dim=dim, seed=seed)


def provider_from_spec(spec: str, dim: int = DEFAULT_DIM,
                       seed: str = DEFAULT_HASH_SEED):
    """Build a provider from its CLI/config spelling: ``baseline`` or ``table:<path>``."""
    if spec == "baseline":
        return HashingEmbedder(dim=dim, seed=seed)
    if spec.startswith("table:"):
        path = Path(spec[len("table:"):])
        return load_vector_table(path, seed=seed)
    raise ValueError(f"unknown embedding provider {spec!r}")
