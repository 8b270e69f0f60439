"""Command-line interface: exit codes, stage wiring, artifact layout."""

from __future__ import annotations

import filecmp
from pathlib import Path

import pytest

from supptopics.cli import (
    ACCURACY_ARTIFACT,
    CORPUS_ARTIFACT,
    DTM_ARTIFACT,
    LEXICON_ARTIFACT,
    MATCHED_ARTIFACT,
    MODEL_ARTIFACT,
    REPORT_DIR,
    SUMMARY_ARTIFACT,
    SWEEP_ARTIFACT,
    main,
)

from conftest import FIXTURES

MINI = str(FIXTURES / "mini.conf")

PIPELINE_ARTIFACTS = (
    CORPUS_ARTIFACT,
    MATCHED_ARTIFACT,
    LEXICON_ARTIFACT,
    DTM_ARTIFACT,
    SUMMARY_ARTIFACT,
    MODEL_ARTIFACT,
    f"{REPORT_DIR}/topics.csv",
    f"{REPORT_DIR}/top_questions.csv",
    f"{REPORT_DIR}/ingredients.csv",
    ACCURACY_ARTIFACT,
)


def run(*argv: str) -> int:
    return main(list(argv))


class TestExitCodes:
    def test_pipeline_succeeds(self, tmp_path, capsys):
        code = run("pipeline", "--config", MINI, "--output-dir", str(tmp_path))
        assert code == 0
        out = capsys.readouterr().out
        for stage in ("ingest:", "match:", "preprocess:", "train:", "report:", "evaluate:"):
            assert stage in out
        for name in PIPELINE_ARTIFACTS:
            assert (tmp_path / name).exists(), name

    def test_missing_artifact_is_exit_2(self, tmp_path, capsys):
        code = run("train", "--config", MINI, "--output-dir", str(tmp_path))
        assert code == 2
        err = capsys.readouterr().err
        assert "supptopics: error: train:" in err
        assert "run preprocess first" in err

    def test_unconfigured_input_is_exit_2(self, tmp_path, capsys):
        code = run("ingest", "--output-dir", str(tmp_path))
        assert code == 2
        err = capsys.readouterr().err
        assert "no corpus file configured" in err
        assert "--corpus" in err

    def test_validation_error_is_exit_3(self, tmp_path, capsys):
        code = run(
            "pipeline", "--config", MINI, "--output-dir", str(tmp_path),
            "--n-topics", "0",
        )
        assert code == 3
        assert "n_topics" in capsys.readouterr().err

    def test_malformed_input_is_exit_3(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("not,a,real,header\n", encoding="utf-8")
        code = run("ingest", "--corpus", str(bad), "--output-dir", str(tmp_path / "o"))
        assert code == 3
        assert "supptopics: error:" in capsys.readouterr().err


class TestStagewiseEqualsPipeline:
    def test_artifacts_byte_identical(self, tmp_path):
        staged = tmp_path / "staged"
        piped = tmp_path / "piped"
        for stage in ("ingest", "match", "preprocess", "train", "report", "evaluate"):
            assert run(stage, "--config", MINI, "--output-dir", str(staged)) == 0
        assert run("pipeline", "--config", MINI, "--output-dir", str(piped)) == 0
        for name in PIPELINE_ARTIFACTS:
            assert filecmp.cmp(staged / name, piped / name, shallow=False), name


@pytest.fixture(scope="module")
def trained(tmp_path_factory):
    out = tmp_path_factory.mktemp("trained")
    for stage in ("ingest", "match", "preprocess", "train"):
        assert run(stage, "--config", MINI, "--output-dir", str(out)) == 0
    return out


class TestReportCommand:
    def test_topics_subset(self, trained, capsys):
        code = run(
            "report", "--config", MINI, "--output-dir", str(trained),
            "--topics", "0,2",
        )
        assert code == 0
        assert "report: 2 topics (csv)" in capsys.readouterr().out
        topics_csv = (trained / REPORT_DIR / "topics.csv").read_text(encoding="utf-8")
        body = topics_csv.splitlines()[1:]
        assert [line.split(",")[0] for line in body] == ["0", "2"]

    def test_text_format(self, trained):
        code = run(
            "report", "--config", MINI, "--output-dir", str(trained),
            "--format", "text", "--topics", "0",
        )
        assert code == 0
        text = (trained / REPORT_DIR / "report.txt").read_text(encoding="utf-8")
        assert text.startswith("Topic 0 — ")
        assert "keywords:" in text

    def test_bad_topics_list_is_exit_3(self, trained, capsys):
        code = run(
            "report", "--config", MINI, "--output-dir", str(trained),
            "--topics", "0,x",
        )
        assert code == 3
        assert "--topics" in capsys.readouterr().err

    def test_sweep_writes_expected_csv(self, trained, capsys):
        code = run(
            "sweep", "--config", MINI, "--output-dir", str(trained),
            "--sizes", "2,3",
        )
        assert code == 0
        lines = (trained / SWEEP_ARTIFACT).read_text(encoding="utf-8").splitlines()
        assert lines[0] == "n_topics,total_tc,mean_tc"
        assert len(lines) == 3
        assert lines[1].startswith("2,")
        assert lines[2].startswith("3,")
        total, mean = map(float, lines[1].split(",")[1:])
        assert mean == pytest.approx(total / 2, abs=1e-5)

    def test_bad_sizes_is_exit_3(self, trained, capsys):
        code = run(
            "sweep", "--config", MINI, "--output-dir", str(trained),
            "--sizes", "two",
        )
        assert code == 3
        assert "--sizes" in capsys.readouterr().err


class TestTaxonomyCommand:
    def test_validate_reports_cardinality(self, capsys):
        code = run(
            "taxonomy", "validate", str(FIXTURES / "mini_taxonomy.txt"),
            "--n-topics", "20",
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "taxonomy: 15 mapped topics, categories=20, groups=7" in out

    def test_validate_reference_shape(self, capsys):
        code = run(
            "taxonomy", "validate", str(FIXTURES / "taxonomy_paper_shape.txt"),
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "taxonomy: 200 mapped topics, categories=38, groups=12" in out

    def test_invalid_taxonomy_is_exit_3(self, tmp_path, capsys):
        bad = tmp_path / "bad.txt"
        bad.write_text("[groups]\nA\n[topics]\n0 = Ghost\n", encoding="utf-8")
        code = run("taxonomy", "validate", str(bad), "--n-topics", "5")
        assert code == 3
        assert "undeclared category" in capsys.readouterr().err

    def test_missing_taxonomy_is_exit_2(self, tmp_path, capsys):
        code = run("taxonomy", "validate", str(tmp_path / "none.txt"))
        assert code == 2


class TestLayering:
    def test_env_overrides_config_file(self, tmp_path, monkeypatch, capsys):
        env_dir = tmp_path / "from_env"
        monkeypatch.setenv("SUPPTOPICS_OUTPUT_DIR", str(env_dir))
        assert run("ingest", "--config", MINI) == 0
        assert (env_dir / CORPUS_ARTIFACT).exists()

    def test_flag_overrides_env(self, tmp_path, monkeypatch):
        env_dir = tmp_path / "from_env"
        flag_dir = tmp_path / "from_flag"
        monkeypatch.setenv("SUPPTOPICS_OUTPUT_DIR", str(env_dir))
        assert run("ingest", "--config", MINI, "--output-dir", str(flag_dir)) == 0
        assert (flag_dir / CORPUS_ARTIFACT).exists()
        assert not env_dir.exists()

    def test_bad_env_value_is_exit_3(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("SUPPTOPICS_SEED", "eleven")
        code = run("ingest", "--config", MINI, "--output-dir", str(tmp_path))
        assert code == 3
        assert "SUPPTOPICS_SEED" in capsys.readouterr().err


class TestIngestFormat:
    def test_format_flag_selects_parser(self, tmp_path, capsys):
        src = tmp_path / "c.jsonl"
        src.write_text(
            '{"id": "q1", "title": "Iron?", "body": "b", "subcategory": "S"}\n',
            encoding="utf-8",
        )
        out = tmp_path / "o"
        code = run(
            "ingest", "--corpus", str(src), "--format", "record-per-line",
            "--subcategory", "S", "--output-dir", str(out),
        )
        assert code == 0
        assert "kept 1 of 1" in capsys.readouterr().out
        assert (out / CORPUS_ARTIFACT).exists()
