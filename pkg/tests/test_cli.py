import json

import pytest
from click.testing import CliRunner

from sdmkit.cli import main


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def built(toy_dir, tmp_path, runner):
    """Full pipeline run driven through the CLI config verb."""
    config_text = (toy_dir / "project.toml").read_text(encoding="utf-8")
    config_text = config_text.replace('data_dir = "../../build/toy"',
                                      f'data_dir = "{tmp_path}/build"')
    config_path = tmp_path / "project.toml"
    config_path.write_text(config_text, encoding="utf-8")
    # referenced inputs stay in toy_dir; rewrite relative paths
    for key in ("paintings", "documents", "lexicon", "stopwords", "taxonomy",
                "ratings", "codings"):
        config_text = config_text.replace(f'{key} = "',
                                          f'{key} = "{toy_dir}/')
    config_path.write_text(config_text, encoding="utf-8")
    result = runner.invoke(main, ["pipeline", "--config", str(config_path)])
    assert result.exit_code == 0, result.output
    return config_path, tmp_path / "build"


class TestStageVerbs:
    def test_ingest_reports_stats(self, toy_dir, tmp_path, runner):
        result = runner.invoke(main, [
            "ingest",
            "--paintings", str(toy_dir / "paintings.jsonl"),
            "--documents", str(toy_dir / "documents.jsonl"),
            "--out", str(tmp_path / "build"),
        ])
        assert result.exit_code == 0, result.output
        stats = json.loads(result.output)
        assert stats["paintings"] == 12
        assert stats["documents"] == 30

    def test_filter_verb(self, toy_dir, tmp_path, runner):
        runner.invoke(main, [
            "ingest", "--paintings", str(toy_dir / "paintings.jsonl"),
            "--documents", str(toy_dir / "documents.jsonl"),
            "--out", str(tmp_path / "build")])
        result = runner.invoke(main, [
            "filter", "--in", str(tmp_path / "build"),
            "--max-journals", "5", "--min-docs", "2"])
        assert result.exit_code == 0, result.output
        body = json.loads(result.output)
        assert body["kept"] == 27
        assert len(body["journals"]) == 5

    def test_stagewise_equals_pipeline(self, toy_dir, tmp_path, runner, built):
        _, pipeline_build = built
        stage_build = tmp_path / "stage-build"
        steps = [
            ["ingest", "--paintings", str(toy_dir / "paintings.jsonl"),
             "--documents", str(toy_dir / "documents.jsonl"),
             "--out", str(stage_build)],
            ["filter", "--in", str(stage_build),
             "--max-journals", "5", "--min-docs", "2"],
            ["extract", "--in", str(stage_build),
             "--lexicon", str(toy_dir / "lexicon.tsv"),
             "--stopwords", str(toy_dir / "stopwords.txt")],
            ["rank", "--in", str(stage_build), "--lambda", "0.5",
             "--top-n", "10"],
            ["cluster", "--in", str(stage_build), "--k", "8", "--seed", "42"],
            ["map", "--in", str(stage_build),
             "--taxonomy", str(toy_dir / "taxonomy.json"), "--tau", "0.25"],
            ["export", "--in", str(stage_build),
             "--taxonomy", str(toy_dir / "taxonomy.json")],
        ]
        for step in steps:
            result = runner.invoke(main, step)
            assert result.exit_code == 0, (step, result.output)
        assert (stage_build / "model.json").read_bytes() == \
            (pipeline_build / "model.json").read_bytes()

    def test_scan_k_emits_csv(self, built, runner):
        _, build_dir = built
        result = runner.invoke(main, [
            "cluster", "--in", str(build_dir), "--scan-k", "2..4"])
        assert result.exit_code == 0, result.output
        lines = result.output.strip().splitlines()
        assert lines[0] == "k,inertia"
        assert len(lines) == 4


class TestModelVerbs:
    def test_move_term_rewrites_model(self, built, runner):
        _, build_dir = built
        model_path = build_dir / "model.json"
        doc = json.loads(model_path.read_text(encoding="utf-8"))
        term = doc["clusters"][0]["members"][0]
        result = runner.invoke(main, [
            "move-term", "--model", str(model_path), "--term", term,
            "--to", "pe.form.color", "--actor", "expert1"])
        assert result.exit_code == 0, result.output
        body = json.loads(result.output)
        assert body["version"] == 2
        updated = json.loads(model_path.read_text(encoding="utf-8"))
        overrides = {}
        for mapping in updated["mappings"]:
            overrides.update(mapping["term_overrides"])
        assert overrides[term] == "pe.form.color"

    def test_move_term_invalid_target_fails(self, built, runner):
        _, build_dir = built
        model_path = build_dir / "model.json"
        before = model_path.read_bytes()
        doc = json.loads(before)
        term = doc["clusters"][0]["members"][0]
        result = runner.invoke(main, [
            "move-term", "--model", str(model_path), "--term", term,
            "--to", "pe.form", "--actor", "expert1"])
        assert result.exit_code != 0
        assert model_path.read_bytes() == before


class TestStatsVerbs:
    def test_kappa(self, toy_dir, runner):
        result = runner.invoke(main, [
            "stats", "kappa", "--codings", str(toy_dir / "codings.csv")])
        assert result.exit_code == 0, result.output
        body = json.loads(result.output)
        assert body["n_coders"] == 3
        assert 0.0 < body["fleiss_kappa"] <= 1.0
        assert len(body["pairwise_cohen"]) == 3

    def test_ttest(self, toy_dir, runner):
        result = runner.invoke(main, [
            "stats", "ttest", "--ratings", str(toy_dir / "ratings.csv"),
            "--mu0", "3", "--alt", "greater"])
        assert result.exit_code == 0, result.output
        body = json.loads(result.output)
        assert len(body["rows"]) == 4
        for row in body["rows"]:
            assert row["sufficient"]
            assert row["n"] == 8
            assert row["p"] < 0.05

    def test_ttest_two_sided(self, toy_dir, runner):
        result = runner.invoke(main, [
            "stats", "ttest", "--ratings", str(toy_dir / "ratings.csv"),
            "--alt", "two-sided"])
        assert result.exit_code == 0, result.output


class TestPipelineVerb:
    def test_missing_config_fails(self, runner):
        result = runner.invoke(main, ["pipeline", "--config", "/none.toml"])
        assert result.exit_code != 0

    def test_pipeline_abort_names_stage(self, toy_dir, tmp_path, runner):
        config_path = tmp_path / "broken.toml"
        config_path.write_text(
            f'paintings = "{toy_dir}/paintings.jsonl"\n'
            f'documents = "{toy_dir}/documents.jsonl"\n'
            f'lexicon = "/missing/lexicon.tsv"\n'
            f'stopwords = "{toy_dir}/stopwords.txt"\n'
            f'taxonomy = "{toy_dir}/taxonomy.json"\n'
            f'data_dir = "{tmp_path}/build"\n'
            "k = 4\n",
            encoding="utf-8",
        )
        result = runner.invoke(main, ["pipeline", "--config", str(config_path)])
        assert result.exit_code != 0
        assert "extract" in result.output
        assert "lexicon.tsv" in result.output
