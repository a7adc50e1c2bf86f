"""sdmkit: semi-automatic construction of a semantic descriptive model.

Two-stage subject-term extraction (lexicon chunking, then embedding
ranking with MMR), K-means term clustering, mapping onto a three-layer
PE/IE taxonomy with audited expert curation, and the agreement/t-test
machinery used to validate the result.
"""

from .clustering import (KMeansConfig, KMeansResult, Term, TermCluster,
                         TermKMeans, cluster_terms, kmeans, kmeans_scan,
                         merge_with_keywords, normalize_term)
from .corpus import (CorpusError, CorpusFilter, PaintingRecord,
                     ScholarlyDocument, corpus_stats, filter_documents,
                     ingest_documents, ingest_paintings)
from .embedding import (HashingEmbedder, TableEmbedder, cosine,
                        load_vector_table, provider_from_spec)
from .ranking import (PooledTerm, RankedTerm, RankingConfig,
                      document_embedding, mmr_select, rank_corpus, rank_terms)
from .stats import (CodingMatrix, LikertResponse, StatsError, TTestResult,
                    aggregate_likert, cohen_kappa, fleiss_kappa,
                    one_sample_ttest, stars, student_t_cdf, student_t_sf)
from .taxonomy import (AuditEntry, SdmModel, SdmNode, SdmTaxonomy,
                       SubjectMapping, TaxonomyError, auto_map_clusters,
                       load_taxonomy, subject_embedding)
from .textproc import (CandidateExtractor, CandidateTerm, Lexicon, Sentence,
                       Token, chunk_candidates, chunk_spans,
                       extract_candidates, mask_stopwords, split_sentences,
                       tag_pos, tokenize)

__version__ = "0.1.0"

__all__ = [
    "AuditEntry", "CandidateExtractor", "CandidateTerm", "CodingMatrix",
    "CorpusError", "CorpusFilter", "HashingEmbedder", "KMeansConfig",
    "KMeansResult", "Lexicon", "LikertResponse", "PaintingRecord",
    "PooledTerm", "RankedTerm", "RankingConfig", "ScholarlyDocument",
    "SdmModel", "SdmNode", "SdmTaxonomy", "Sentence", "StatsError",
    "SubjectMapping", "TTestResult", "TableEmbedder", "TaxonomyError",
    "Term", "TermCluster", "TermKMeans", "Token", "aggregate_likert",
    "auto_map_clusters", "chunk_candidates", "chunk_spans", "cluster_terms",
    "cohen_kappa", "corpus_stats", "cosine", "document_embedding",
    "extract_candidates", "filter_documents", "fleiss_kappa",
    "ingest_documents", "ingest_paintings", "kmeans", "kmeans_scan",
    "load_taxonomy", "load_vector_table", "mask_stopwords",
    "merge_with_keywords", "mmr_select", "normalize_term",
    "one_sample_ttest", "provider_from_spec", "rank_corpus", "rank_terms",
    "split_sentences", "stars", "student_t_cdf", "student_t_sf",
    "subject_embedding", "tag_pos", "tokenize",
]
