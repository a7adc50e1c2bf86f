"""Command-line interface: one verb per pipeline stage plus service/stat verbs.

Stage verbs read and write the artifact files of a data directory, so the
whole run can be driven step by step or all at once with ``pipeline``.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

import click
import numpy as np

from . import corpus, stats
from .clustering import kmeans_scan
from .config import ProjectConfig, load_config, with_overrides
from .pipeline import ARTIFACTS, Pipeline, PipelineError, run_pipeline
from .taxonomy import SdmModel

log = logging.getLogger("sdmkit")


def _echo_json(obj) -> None:
    click.echo(json.dumps(obj, ensure_ascii=False, indent=2, sort_keys=True))


def _load(ctx, config_path) -> ProjectConfig:
    overrides = {"seed": ctx.obj.get("seed")}
    return load_config(config_path, overrides=overrides)


@click.group()
@click.option("--seed", type=int, default=None,
              help="Override the configured RNG seed for this invocation.")
@click.option("-v", "--verbose", is_flag=True, help="Log stage progress.")
@click.pass_context
def main(ctx, seed, verbose):
    """Build and serve a semantic descriptive model from annotated corpora."""
    ctx.ensure_object(dict)
    ctx.obj["seed"] = seed
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(name)s: %(message)s",
    )


def _pipeline_for(ctx, data_dir, **overrides) -> Pipeline:
    config = ProjectConfig(data_dir=Path(data_dir),
                           **{k: v for k, v in overrides.items() if v is not None})
    config = with_overrides(config, seed=ctx.obj.get("seed"))
    pipeline = Pipeline(config)
    pipeline.data_dir.mkdir(parents=True, exist_ok=True)
    return pipeline


@main.command()
@click.option("--paintings", required=True, type=click.Path(exists=True))
@click.option("--documents", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.pass_context
def ingest(ctx, paintings, documents, out_dir):
    """Validate and copy both corpora into the data directory."""
    pipeline = _pipeline_for(ctx, out_dir, paintings=Path(paintings),
                             documents=Path(documents))
    pipeline.run_ingest()
    loaded_p = corpus.ingest_paintings(pipeline.artifact("paintings"))
    loaded_d = corpus.ingest_documents(pipeline.artifact("documents"))
    _echo_json(corpus.corpus_stats(loaded_p, loaded_d))


@main.command("filter")
@click.option("--in", "data_dir", required=True, type=click.Path(exists=True))
@click.option("--max-journals", default=20, show_default=True)
@click.option("--min-docs", default=5, show_default=True)
@click.pass_context
def filter_cmd(ctx, data_dir, max_journals, min_docs):
    """Keep documents from the top journals clearing the document floor."""
    pipeline = _pipeline_for(ctx, data_dir, max_journals=max_journals,
                             min_docs=min_docs)
    pipeline.run_filter()
    kept = corpus.ingest_documents(pipeline.artifact("filtered"))
    _echo_json({"kept": len(kept),
                "journals": sorted({d.journal for d in kept})})


@main.command()
@click.option("--in", "data_dir", required=True, type=click.Path(exists=True))
@click.option("--lexicon", required=True, type=click.Path(exists=True))
@click.option("--stopwords", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", default=None, type=click.Path(),
              help="Candidate file destination (default: <in>/candidates.jsonl).")
@click.pass_context
def extract(ctx, data_dir, lexicon, stopwords, out_path):
    """Run stage-1 term recognition over descriptions and abstracts."""
    pipeline = _pipeline_for(ctx, data_dir, lexicon=Path(lexicon),
                             stopwords=Path(stopwords))
    pipeline.run_extract()
    result = pipeline.artifact("candidates")
    if out_path and Path(out_path) != result:
        Path(out_path).write_bytes(result.read_bytes())
        result = Path(out_path)
    count = sum(1 for _ in open(result, encoding="utf-8"))
    click.echo(f"{count} candidate terms -> {result}")


@main.command()
@click.option("--in", "data_dir", required=True, type=click.Path(exists=True))
@click.option("--lambda", "lam", default=0.5, show_default=True,
              help="MMR relevance/diversity weight.")
@click.option("--top-n", default=15, show_default=True)
@click.option("--provider", default="baseline", show_default=True)
@click.option("--dim", default=256, show_default=True)
@click.pass_context
def rank(ctx, data_dir, lam, top_n, provider, dim):
    """Rank candidates per document and build the merged pool."""
    pipeline = _pipeline_for(ctx, data_dir, lam=lam, top_n=top_n,
                             provider=provider, dim=dim)
    pipeline.run_rank()
    pool_size = sum(1 for _ in open(pipeline.artifact("pool"), encoding="utf-8"))
    click.echo(f"pool holds {pool_size} terms -> {pipeline.artifact('pool')}")


@main.command()
@click.option("--in", "data_dir", required=True, type=click.Path(exists=True))
@click.option("--k", default=None, type=int, help="Number of clusters.")
@click.option("--seed", "cluster_seed", default=42, show_default=True, type=int)
@click.option("--provider", default="baseline", show_default=True)
@click.option("--dim", default=256, show_default=True)
@click.option("--scan-k", default=None,
              help="Range 'LO..HI': emit k,inertia CSV instead of clustering.")
@click.pass_context
def cluster(ctx, data_dir, k, cluster_seed, provider, dim, scan_k):
    """Merge pool with keywords and partition terms with K-means."""
    if scan_k:
        lo, _, hi = scan_k.partition("..")
        try:
            ks = range(int(lo), int(hi) + 1)
        except ValueError:
            raise click.UsageError("--scan-k expects a range like 2..30")
        pipeline = _pipeline_for(ctx, data_dir, provider=provider, dim=dim,
                                 seed=cluster_seed)
        terms = pipeline.merged_terms()
        matrix = np.stack([t.vector for t in terms])
        click.echo("k,inertia")
        for k_value, inertia in kmeans_scan(matrix, ks, seed=pipeline.config.seed):
            click.echo(f"{k_value},{inertia}")
        return
    if k is None:
        raise click.UsageError("--k is required unless --scan-k is given")
    pipeline = _pipeline_for(ctx, data_dir, k=k, seed=cluster_seed,
                             provider=provider, dim=dim)
    pipeline.run_cluster()
    doc = json.loads(pipeline.artifact("clusters").read_text(encoding="utf-8"))
    click.echo(f"{len(doc['clusters'])} clusters -> {pipeline.artifact('clusters')}")


@main.command("map")
@click.option("--in", "data_dir", required=True, type=click.Path(exists=True))
@click.option("--taxonomy", "taxonomy_path", required=True,
              type=click.Path(exists=True))
@click.option("--tau", default=0.3, show_default=True,
              help="Minimum similarity for an automatic assignment.")
@click.option("--provider", default="baseline", show_default=True)
@click.option("--dim", default=256, show_default=True)
@click.pass_context
def map_cmd(ctx, data_dir, taxonomy_path, tau, provider, dim):
    """Map clusters onto taxonomy subjects by semantic matching."""
    pipeline = _pipeline_for(ctx, data_dir, taxonomy=Path(taxonomy_path),
                             tau=tau, provider=provider, dim=dim)
    pipeline.run_map()
    mappings = json.loads(pipeline.artifact("mappings").read_text(encoding="utf-8"))
    mapped = sum(1 for m in mappings if m["subject_id"] is not None)
    click.echo(f"{mapped}/{len(mappings)} clusters mapped "
               f"-> {pipeline.artifact('mappings')}")


@main.command()
@click.option("--in", "data_dir", required=True, type=click.Path(exists=True))
@click.option("--taxonomy", "taxonomy_path", required=True,
              type=click.Path(exists=True))
@click.option("--out", "out_path", default=None, type=click.Path())
@click.pass_context
def export(ctx, data_dir, taxonomy_path, out_path):
    """Assemble and write the model document from existing artifacts."""
    pipeline = _pipeline_for(ctx, data_dir, taxonomy=Path(taxonomy_path))
    pipeline.run_export()
    result = pipeline.artifact("model")
    if out_path and Path(out_path) != result:
        Path(out_path).write_bytes(result.read_bytes())
        result = Path(out_path)
    click.echo(f"model -> {result}")


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True))
@click.option("--force", is_flag=True, help="Ignore the manifest and rerun.")
@click.pass_context
def pipeline(ctx, config_path, force):
    """Run ingest, filter, extract, rank, cluster, map and export in order."""
    config = _load(ctx, config_path)
    try:
        artifacts = run_pipeline(config, force=force)
    except PipelineError as exc:
        raise click.ClickException(str(exc))
    _echo_json({name: str(path) for name, path in artifacts.items()})


@main.command("move-term")
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--term", required=True)
@click.option("--to", "to_subject", required=True)
@click.option("--actor", required=True)
def move_term(model_path, term, to_subject, actor):
    """Move one term to a layer-3 subject and rewrite the model file."""
    model = SdmModel.load(model_path)
    entry = model.move_term(term, to_subject, actor)
    model.export(model_path)
    _echo_json({"ok": True, "version": model.version,
                "audit": entry.to_dict()})


@main.group()
def stats_cmd():
    """Agreement and questionnaire statistics."""


main.add_command(stats_cmd, name="stats")


@stats_cmd.command()
@click.option("--codings", "codings_path", required=True,
              type=click.Path(exists=True))
def kappa(codings_path):
    """Fleiss and pairwise Cohen kappa over an item,coder,label CSV."""
    matrix = stats.CodingMatrix.from_csv(codings_path)
    pairwise = {}
    for i, coder_a in enumerate(matrix.coders):
        for coder_b in matrix.coders[i + 1:]:
            pairwise[f"{coder_a}/{coder_b}"] = stats.cohen_kappa(
                matrix.column(coder_a), matrix.column(coder_b))
    _echo_json({
        "n_items": len(matrix.items),
        "n_coders": len(matrix.coders),
        "fleiss_kappa": stats.fleiss_kappa(matrix),
        "pairwise_cohen": pairwise,
    })


@stats_cmd.command()
@click.option("--ratings", "ratings_path", required=True,
              type=click.Path(exists=True))
@click.option("--mu0", default=3.0, show_default=True)
@click.option("--alt", default="greater", show_default=True,
              type=click.Choice(["greater", "two-sided"]))
@click.option("--condition", default=None,
              type=click.Choice(["SDM", "BASELINE"]))
def ttest(ratings_path, mu0, alt, condition):
    """Per-question one-sample t-tests over a ratings CSV."""
    responses = stats.load_ratings(ratings_path)
    rows = []
    grouped: dict[str, list[int]] = {q: [] for q in stats.LIKERT_QUESTIONS}
    for response in responses:
        if condition and response.condition != condition:
            continue
        grouped[response.question].append(response.score)
    for question in stats.LIKERT_QUESTIONS:
        scores = grouped[question]
        if len(scores) < 2:
            rows.append({"question": question, "n": len(scores),
                         "sufficient": False})
            continue
        result = stats.one_sample_ttest(scores, mu0=mu0, alternative=alt)
        rows.append({
            "question": question, "n": result.n, "sufficient": True,
            "mean": result.mean, "sd": result.sd, "t": result.t,
            "df": result.df, "p": result.p, "stars": result.stars,
        })
    _echo_json({"mu0": mu0, "alternative": alt, "rows": rows})


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True))
@click.option("--port", default=None, type=int, help="Override config port.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--sample", default=None, type=int,
              help="Serve only a seeded random sample of paintings.")
@click.pass_context
def serve(ctx, config_path, port, host, sample):
    """Start the HTTP service over existing pipeline artifacts."""
    from .service import serve as run_service

    config = _load(ctx, config_path)
    config = with_overrides(config, port=port, sample=sample)
    config.validate_paths()
    run_service(config, host=host)


if __name__ == "__main__":
    main()
