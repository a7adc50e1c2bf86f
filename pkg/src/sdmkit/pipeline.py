"""The end-to-end batch pipeline with manifest-based stage skipping.

Stages run in order (ingest, filter, extract, rank, cluster, map, export),
each persisting its artifact under the data directory.  A manifest records
a fingerprint of every stage's inputs plus the hashes of its outputs;
reruns skip stages whose fingerprint and outputs are unchanged, so
deleting one artifact recomputes only from that stage onward.  A stage
failure aborts the run with the stage name while keeping the artifacts of
the stages that already finished.
"""

from __future__ import annotations

import hashlib
import json
import logging
from pathlib import Path

from . import clustering, corpus, ranking, taxonomy, textproc
from .config import ProjectConfig
from .embedding import provider_from_spec

log = logging.getLogger("sdmkit.pipeline")

ARTIFACTS = {
    "paintings": "paintings.jsonl",
    "documents": "documents.jsonl",
    "filtered": "filtered_documents.jsonl",
    "candidates": "candidates.jsonl",
    "ranked": "ranked.jsonl",
    "pool": "pool.jsonl",
    "terms": "terms.jsonl",
    "clusters": "clusters.json",
    "mappings": "mappings.json",
    "model": "model.json",
}
MANIFEST_NAME = "manifest.json"

STAGE_ORDER = ("ingest", "filter", "extract", "rank", "cluster", "map", "export")


class PipelineError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"stage '{stage}': {message}")
        self.stage = stage


def _sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(65536), b""):
            digest.update(block)
    return digest.hexdigest()


def _fingerprint(parts) -> str:
    return hashlib.sha256(
        json.dumps(parts, sort_keys=True, ensure_ascii=False).encode("utf-8")
    ).hexdigest()


def _write_jsonl(rows, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for row in rows:
            handle.write(json.dumps(row, ensure_ascii=False, sort_keys=True))
            handle.write("\n")


def _read_jsonl(path: Path) -> list[dict]:
    with open(path, encoding="utf-8") as handle:
        return [json.loads(line) for line in handle if line.strip()]


def _write_json(doc, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(doc, handle, ensure_ascii=False, sort_keys=True, indent=2)
        handle.write("\n")


def _read_json(path: Path):
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)


class Pipeline:
    def __init__(self, config: ProjectConfig, force: bool = False):
        self.config = config
        self.force = force
        self.data_dir = Path(config.data_dir)
        self.manifest_path = self.data_dir / MANIFEST_NAME
        self.manifest: dict = {"stages": {}}

    def artifact(self, name: str) -> Path:
        return self.data_dir / ARTIFACTS[name]

    def _load_manifest(self) -> None:
        if self.manifest_path.exists():
            try:
                self.manifest = json.loads(self.manifest_path.read_text(encoding="utf-8"))
            except json.JSONDecodeError:
                self.manifest = {"stages": {}}
        self.manifest.setdefault("stages", {})

    def _save_manifest(self) -> None:
        _write_json(self.manifest, self.manifest_path)

    def _stage(self, name: str, fingerprint_parts, outputs: list[str], runner) -> bool:
        """Run one stage unless the manifest proves it is already done.

        Returns True when the stage executed, False when it was skipped.
        """
        try:
            fingerprint = _fingerprint(fingerprint_parts())
            recorded = self.manifest["stages"].get(name)
            paths = {out: self.artifact(out) for out in outputs}
            if (not self.force and recorded
                    and recorded.get("fingerprint") == fingerprint
                    and all(p.exists() for p in paths.values())
                    and all(recorded.get("outputs", {}).get(out) == _sha256_file(p)
                            for out, p in paths.items())):
                log.info("stage %s: up to date, skipped", name)
                return False
            runner()
            self.manifest["stages"][name] = {
                "fingerprint": fingerprint,
                "outputs": {out: _sha256_file(p) for out, p in paths.items()},
            }
            self._save_manifest()
            log.info("stage %s: done", name)
            return True
        except PipelineError:
            raise
        except Exception as exc:
            raise PipelineError(name, str(exc)) from exc

    # -- stage bodies ------------------------------------------------------

    def run_ingest(self) -> None:
        cfg = self.config
        paintings = corpus.ingest_paintings(cfg.paintings)
        documents = corpus.ingest_documents(cfg.documents)
        corpus.export_paintings(paintings, self.artifact("paintings"))
        corpus.export_documents(documents, self.artifact("documents"))
        log.info("ingested %d paintings, %d documents", len(paintings), len(documents))

    def run_filter(self) -> None:
        cfg = self.config
        documents = corpus.ingest_documents(self.artifact("documents"))
        flt = corpus.CorpusFilter(max_journals=cfg.max_journals,
                                  min_docs_per_journal=cfg.min_docs)
        kept = corpus.filter_documents(documents, flt)
        corpus.export_documents(kept, self.artifact("filtered"))
        log.info("filter kept %d of %d documents", len(kept), len(documents))

    def _corpus_texts(self) -> list[tuple[str, str]]:
        paintings = corpus.ingest_paintings(self.artifact("paintings"))
        documents = corpus.ingest_documents(self.artifact("filtered"))
        texts = [(p.id, p.description) for p in paintings]
        texts.extend((d.id, d.abstract) for d in documents)
        return texts

    def run_extract(self) -> None:
        cfg = self.config
        lexicon = textproc.Lexicon.from_tsv(cfg.lexicon, stopwords_path=cfg.stopwords)
        candidates = textproc.extract_candidates(self._corpus_texts(), lexicon)
        _write_jsonl(
            (
                {
                    "surface": c.surface,
                    "normalized": c.normalized,
                    "frequency": c.frequency,
                    "source_ids": sorted(c.source_ids),
                }
                for c in candidates
            ),
            self.artifact("candidates"),
        )
        log.info("extracted %d candidate terms", len(candidates))

    def _load_candidates(self) -> list[textproc.CandidateTerm]:
        return [
            textproc.CandidateTerm(
                surface=row["surface"],
                normalized=row["normalized"],
                source_ids=frozenset(row["source_ids"]),
                frequency=int(row["frequency"]),
            )
            for row in _read_jsonl(self.artifact("candidates"))
        ]

    def _provider(self):
        return provider_from_spec(self.config.provider, dim=self.config.dim)

    def run_rank(self) -> None:
        cfg = self.config
        candidates = self._load_candidates()
        rank_cfg = ranking.RankingConfig(lam=cfg.lam, top_n=cfg.top_n)
        per_doc, pool = ranking.rank_corpus(candidates, self._corpus_texts(),
                                            self._provider(), rank_cfg)
        _write_jsonl(
            (
                {
                    "doc_id": doc_id,
                    "term": entry.term.surface,
                    "normalized": entry.term.normalized,
                    "relevance": entry.relevance,
                    "mmr_score": entry.mmr_score,
                    "rank": entry.rank,
                }
                for doc_id in sorted(per_doc)
                for entry in per_doc[doc_id]
            ),
            self.artifact("ranked"),
        )
        _write_jsonl(
            (
                {
                    "normalized": p.term.normalized,
                    "surface": p.term.surface,
                    "relevance": p.relevance,
                    "source_ids": sorted(p.term.source_ids),
                    "frequency": p.term.frequency,
                }
                for p in pool
            ),
            self.artifact("pool"),
        )
        log.info("ranked %d documents; pool holds %d terms", len(per_doc), len(pool))

    def merged_terms(self) -> list[clustering.Term]:
        """Pool terms unioned with corpus keywords (the clustering input)."""
        pool = [
            ranking.PooledTerm(
                term=textproc.CandidateTerm(
                    surface=row["surface"],
                    normalized=row["normalized"],
                    source_ids=frozenset(row["source_ids"]),
                    frequency=int(row["frequency"]),
                ),
                relevance=float(row["relevance"]),
            )
            for row in _read_jsonl(self.artifact("pool"))
        ]
        paintings = corpus.ingest_paintings(self.artifact("paintings"))
        documents = corpus.ingest_documents(self.artifact("filtered"))
        keyword_sources = [(p.id, p.keywords) for p in paintings]
        keyword_sources.extend((d.id, d.keywords) for d in documents)
        return clustering.merge_with_keywords(pool, keyword_sources, self._provider())

    def run_cluster(self) -> None:
        cfg = self.config
        terms = self.merged_terms()
        _write_jsonl(
            (
                {
                    "normalized": t.normalized,
                    "surface": t.surface,
                    "relevance": t.relevance,
                    "origin": t.origin,
                    "sources": sorted(t.sources),
                }
                for t in terms
            ),
            self.artifact("terms"),
        )
        kmeans_cfg = clustering.KMeansConfig(k=cfg.k, seed=cfg.seed,
                                             max_iter=cfg.max_iter, tol=cfg.tol)
        clusters = clustering.cluster_terms(terms, kmeans_cfg)
        _write_json(
            {
                "k": cfg.k,
                "seed": cfg.seed,
                "clusters": [
                    {
                        "id": c.id,
                        "members": [t.normalized for t in c.members],
                        "centroid": [float(x) for x in c.centroid],
                    }
                    for c in clusters
                ],
            },
            self.artifact("clusters"),
        )
        log.info("merged %d terms into %d clusters", len(terms), len(clusters))

    def run_map(self) -> None:
        cfg = self.config
        tax = taxonomy.load_taxonomy(cfg.taxonomy)
        clusters_doc = _read_json(self.artifact("clusters"))
        clusters = [
            _CentroidCluster(id=int(c["id"]), centroid=c["centroid"])
            for c in clusters_doc["clusters"]
        ]
        mappings = taxonomy.auto_map_clusters(clusters, tax, self._provider(), tau=cfg.tau)
        _write_json(
            [
                {
                    "cluster_id": m.cluster_id,
                    "subject_id": m.subject_id,
                    "score": m.score,
                    "provenance": m.provenance,
                    "term_overrides": m.term_overrides,
                }
                for m in mappings
            ],
            self.artifact("mappings"),
        )
        mapped = sum(1 for m in mappings if m.subject_id is not None)
        log.info("mapped %d of %d clusters (tau=%s)", mapped, len(mappings), cfg.tau)

    def run_export(self) -> None:
        model = build_model(self.config)
        model.export(self.artifact("model"))
        log.info("exported model version %d", model.version)

    # -- driver ------------------------------------------------------------

    def run(self) -> dict[str, Path]:
        cfg = self.config
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._load_manifest()
        self._stage(
            "ingest",
            lambda: {"paintings": _sha256_file(Path(cfg.paintings)),
                     "documents": _sha256_file(Path(cfg.documents))},
            ["paintings", "documents"],
            self.run_ingest,
        )
        self._stage(
            "filter",
            lambda: {"documents": _sha256_file(self.artifact("documents")),
                     "max_journals": cfg.max_journals, "min_docs": cfg.min_docs},
            ["filtered"],
            self.run_filter,
        )
        self._stage(
            "extract",
            lambda: {"paintings": _sha256_file(self.artifact("paintings")),
                     "filtered": _sha256_file(self.artifact("filtered")),
                     "lexicon": _sha256_file(Path(cfg.lexicon)),
                     "stopwords": _sha256_file(Path(cfg.stopwords))},
            ["candidates"],
            self.run_extract,
        )
        self._stage(
            "rank",
            lambda: {"candidates": _sha256_file(self.artifact("candidates")),
                     "paintings": _sha256_file(self.artifact("paintings")),
                     "filtered": _sha256_file(self.artifact("filtered")),
                     "provider": cfg.provider, "dim": cfg.dim,
                     "lambda": cfg.lam, "top_n": cfg.top_n},
            ["ranked", "pool"],
            self.run_rank,
        )
        self._stage(
            "cluster",
            lambda: {"pool": _sha256_file(self.artifact("pool")),
                     "paintings": _sha256_file(self.artifact("paintings")),
                     "filtered": _sha256_file(self.artifact("filtered")),
                     "provider": cfg.provider, "dim": cfg.dim, "k": cfg.k,
                     "seed": cfg.seed, "max_iter": cfg.max_iter, "tol": cfg.tol},
            ["terms", "clusters"],
            self.run_cluster,
        )
        self._stage(
            "map",
            lambda: {"clusters": _sha256_file(self.artifact("clusters")),
                     "taxonomy": _sha256_file(Path(cfg.taxonomy)),
                     "provider": cfg.provider, "dim": cfg.dim, "tau": cfg.tau},
            ["mappings"],
            self.run_map,
        )
        self._stage(
            "export",
            lambda: {"clusters": _sha256_file(self.artifact("clusters")),
                     "mappings": _sha256_file(self.artifact("mappings")),
                     "terms": _sha256_file(self.artifact("terms")),
                     "taxonomy": _sha256_file(Path(cfg.taxonomy))},
            ["model"],
            self.run_export,
        )
        return {name: self.artifact(name) for name in ARTIFACTS}


class _CentroidCluster:
    """Duck-typed cluster view (id + centroid) for the mapping stage."""

    def __init__(self, id: int, centroid):
        self.id = id
        self.centroid = centroid


def build_model(config: ProjectConfig) -> taxonomy.SdmModel:
    """Assemble the curated model object from pipeline artifacts."""
    data_dir = Path(config.data_dir)
    tax = taxonomy.load_taxonomy(config.taxonomy)
    clusters_doc = _read_json(data_dir / ARTIFACTS["clusters"])
    clusters = [
        taxonomy.ClusterTerms(id=int(c["id"]), members=tuple(c["members"]))
        for c in clusters_doc["clusters"]
    ]
    mappings = [
        taxonomy.SubjectMapping(
            cluster_id=int(m["cluster_id"]),
            subject_id=m["subject_id"],
            score=float(m["score"]),
            provenance=m["provenance"],
            term_overrides=dict(m.get("term_overrides", {})),
        )
        for m in _read_json(data_dir / ARTIFACTS["mappings"])
    ]
    terms = [
        taxonomy.ModelTerm(
            normalized=row["normalized"],
            surface=row["surface"],
            relevance=float(row["relevance"]),
            origin=row["origin"],
            sources=tuple(row["sources"]),
        )
        for row in _read_jsonl(data_dir / ARTIFACTS["terms"])
    ]
    return taxonomy.SdmModel(tax, clusters, mappings, terms)


def run_pipeline(config: ProjectConfig, force: bool = False) -> dict[str, Path]:
    """Execute every stage in order; see the module docstring for skipping."""
    return Pipeline(config, force=force).run()
