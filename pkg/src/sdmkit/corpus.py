"""Ingestion, validation, filtering and persistence of the two corpora.

Records travel as UTF-8 JSON lines (one object per line) with fixed field
sets.  Ingestion normalizes keywords (NFC + trim, duplicates dropped) and
rejects structural violations with the offending line number, so later
stages can trust every record.
"""

from __future__ import annotations

import json
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable


class CorpusError(ValueError):
    """A corpus file violated the record format or an invariant."""


PAINTING_FIELDS = ("id", "title", "image_ref", "description", "keywords", "era")
DOCUMENT_FIELDS = ("id", "title", "authors", "journal", "year", "abstract", "keywords")


@dataclass(frozen=True)
class PaintingRecord:
    id: str
    title: str
    image_ref: str
    description: str = ""
    keywords: tuple[str, ...] = ()
    era: str | None = None


@dataclass(frozen=True)
class ScholarlyDocument:
    id: str
    title: str
    authors: tuple[str, ...]
    journal: str
    year: int
    abstract: str = ""
    keywords: tuple[str, ...] = ()


@dataclass(frozen=True)
class CorpusFilter:
    """Journal selection rule: top journals by document count, floor on count."""

    max_journals: int = 20
    min_docs_per_journal: int = 5

    def __post_init__(self):
        if self.max_journals < 1:
            raise ValueError("max_journals must be >= 1")
        if self.min_docs_per_journal < 1:
            raise ValueError("min_docs_per_journal must be >= 1")


def normalize_keywords(raw: Iterable[str]) -> tuple[str, ...]:
    """NFC-normalize and trim keywords, dropping empties and duplicates."""
    seen: dict[str, None] = {}
    for keyword in raw:
        keyword = unicodedata.normalize("NFC", keyword).strip()
        if keyword:
            seen.setdefault(keyword)
    return tuple(seen)


def _expect_str(obj: dict, key: str, lineno: int, allow_empty: bool = True) -> str:
    value = obj.get(key)
    if not isinstance(value, str):
        raise CorpusError(f"line {lineno}: field {key!r} must be a string")
    if not allow_empty and not value.strip():
        raise CorpusError(f"line {lineno}: field {key!r} must be non-empty")
    return value


def _expect_str_list(obj: dict, key: str, lineno: int) -> list[str]:
    value = obj.get(key)
    if not isinstance(value, list) or not all(isinstance(x, str) for x in value):
        raise CorpusError(f"line {lineno}: field {key!r} must be a list of strings")
    return value


def _check_fields(obj: dict, fields: tuple[str, ...], optional: frozenset[str],
                  lineno: int) -> None:
    unknown = set(obj) - set(fields)
    if unknown:
        raise CorpusError(f"line {lineno}: unknown field(s) {sorted(unknown)}")
    missing = [f for f in fields if f not in obj and f not in optional]
    if missing:
        raise CorpusError(f"line {lineno}: missing field(s) {missing}")


def _painting_from_obj(obj: dict, lineno: int) -> PaintingRecord:
    _check_fields(obj, PAINTING_FIELDS, frozenset({"era", "description"}), lineno)
    era = obj.get("era")
    if era is not None and not isinstance(era, str):
        raise CorpusError(f"line {lineno}: field 'era' must be a string or null")
    return PaintingRecord(
        id=_expect_str(obj, "id", lineno, allow_empty=False),
        title=_expect_str(obj, "title", lineno, allow_empty=False),
        image_ref=_expect_str(obj, "image_ref", lineno),
        description=_expect_str(obj, "description", lineno) if "description" in obj else "",
        keywords=normalize_keywords(_expect_str_list(obj, "keywords", lineno)),
        era=era,
    )


def _document_from_obj(obj: dict, lineno: int) -> ScholarlyDocument:
    _check_fields(obj, DOCUMENT_FIELDS, frozenset({"abstract"}), lineno)
    year = obj.get("year")
    if not isinstance(year, int) or isinstance(year, bool):
        raise CorpusError(f"line {lineno}: field 'year' must be an integer")
    if not 1900 <= year <= 2100:
        raise CorpusError(f"line {lineno}: year {year} outside [1900, 2100]")
    return ScholarlyDocument(
        id=_expect_str(obj, "id", lineno, allow_empty=False),
        title=_expect_str(obj, "title", lineno, allow_empty=False),
        authors=tuple(_expect_str_list(obj, "authors", lineno)),
        journal=_expect_str(obj, "journal", lineno, allow_empty=False),
        year=year,
        abstract=_expect_str(obj, "abstract", lineno) if "abstract" in obj else "",
        keywords=normalize_keywords(_expect_str_list(obj, "keywords", lineno)),
    )


def _ingest(path, builder, kind: str):
    records = []
    seen_ids: set[str] = set()
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"line {lineno}: malformed {kind} row: {exc.msg}") from None
            if not isinstance(obj, dict):
                raise CorpusError(f"line {lineno}: {kind} row must be a JSON object")
            record = builder(obj, lineno)
            if record.id in seen_ids:
                raise CorpusError(f"line {lineno}: duplicate id {record.id!r}")
            seen_ids.add(record.id)
            records.append(record)
    return records


def ingest_paintings(path) -> list[PaintingRecord]:
    """Read painting records from a JSONL file, preserving order."""
    return _ingest(path, _painting_from_obj, "painting")


def ingest_documents(path) -> list[ScholarlyDocument]:
    """Read scholarly documents from a JSONL file, preserving order."""
    return _ingest(path, _document_from_obj, "document")


def _painting_to_obj(record: PaintingRecord) -> dict:
    return {
        "id": record.id,
        "title": record.title,
        "image_ref": record.image_ref,
        "description": record.description,
        "keywords": list(record.keywords),
        "era": record.era,
    }


def _document_to_obj(doc: ScholarlyDocument) -> dict:
    return {
        "id": doc.id,
        "title": doc.title,
        "authors": list(doc.authors),
        "journal": doc.journal,
        "year": doc.year,
        "abstract": doc.abstract,
        "keywords": list(doc.keywords),
    }


def _write_jsonl(objs: Iterable[dict], path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for obj in objs:
            handle.write(json.dumps(obj, ensure_ascii=False, sort_keys=True))
            handle.write("\n")


def export_paintings(records: Iterable[PaintingRecord], path) -> None:
    _write_jsonl((_painting_to_obj(r) for r in records), path)


def export_documents(docs: Iterable[ScholarlyDocument], path) -> None:
    _write_jsonl((_document_to_obj(d) for d in docs), path)


def journal_counts(docs: Iterable[ScholarlyDocument]) -> Counter:
    return Counter(doc.journal for doc in docs)


def filter_documents(docs: list[ScholarlyDocument],
                     flt: CorpusFilter | None = None) -> list[ScholarlyDocument]:
    """Keep documents of the top journals that also clear the document floor.

    Journal counts come from the pre-filter input; ranking ties at the
    max_journals boundary break by lexicographic journal name.  Empty input
    yields empty output.
    """
    flt = flt or CorpusFilter()
    if not docs:
        return []
    counts = journal_counts(docs)
    ranked = sorted(counts, key=lambda journal: (-counts[journal], journal))
    surviving = {
        journal for journal in ranked[:flt.max_journals]
        if counts[journal] >= flt.min_docs_per_journal
    }
    return [doc for doc in docs if doc.journal in surviving]


def corpus_stats(paintings: list[PaintingRecord],
                 docs: list[ScholarlyDocument]) -> dict:
    """Summary counts over both corpora."""
    vocabulary: set[str] = set()
    for record in paintings:
        vocabulary.update(record.keywords)
    for doc in docs:
        vocabulary.update(doc.keywords)
    return {
        "paintings": len(paintings),
        "documents": len(docs),
        "journals": len({doc.journal for doc in docs}),
        "keyword_vocabulary": len(vocabulary),
    }
