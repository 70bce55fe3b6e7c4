from __future__ import annotations

import json
import subprocess
import sys

import pytest

import minidump
from aspectsum.cli import main


def run_cli(*argv) -> int:
    return main([str(a) for a in argv])


@pytest.fixture(scope="module")
def built_corpus(minidump_path, tmp_path_factory):
    outdir = tmp_path_factory.mktemp("corpus")
    assert run_cli("build", minidump_path, "-o", outdir, "--jobs", 1) == 0
    return outdir


def corpus_files(outdir):
    return [outdir / f"{split}.jsonl" for split in ("train", "valid", "test")]


class TestIngest:
    def test_ingest_writes_pages(self, minidump_path, tmp_path, capsys):
        out = tmp_path / "pages.jsonl"
        assert run_cli("ingest", minidump_path, "-o", out) == 0
        stdout = capsys.readouterr().out
        assert f"pages read: {len(minidump.PAGES)}, kept: {minidump.KEPT_PAGE_COUNT}" in stdout
        assert len(out.read_text().splitlines()) == minidump.KEPT_PAGE_COUNT

    def test_ingest_max_pages(self, minidump_path, tmp_path):
        out = tmp_path / "pages.jsonl"
        assert run_cli("ingest", minidump_path, "-o", out, "--max-pages", 2) == 0
        assert len(out.read_text().splitlines()) == 2

    def test_missing_dump_is_usage_error(self, tmp_path):
        with pytest.raises(SystemExit) as excinfo:
            run_cli("ingest", tmp_path / "nope.xml", "-o", tmp_path / "out.jsonl")
        assert excinfo.value.code == 2


class TestBuild:
    def test_build_reports_counts(self, minidump_path, tmp_path, capsys):
        assert run_cli("build", minidump_path, "-o", tmp_path / "out",
                       "--jobs", 1) == 0
        stdout = capsys.readouterr().out
        expected = len(minidump.EXPECTED_INSTANCES_HALF)
        assert f"lambda=0.5: {expected} instances" in stdout
        assert f"from {minidump.KEPT_PAGE_COUNT} pages" in stdout
        assert str(tmp_path / "out") in stdout

    def test_build_threshold_sweep(self, minidump_path, tmp_path, capsys):
        assert run_cli("build", minidump_path, "-o", tmp_path,
                       "--lambda", "1/2", "--lambda", "7/10",
                       "--jobs", 1, "--force") == 0
        stdout = capsys.readouterr().out
        assert "lambda=0.5:" in stdout and "lambda=0.7:" in stdout
        assert (tmp_path / "lambda_0.5" / "train.jsonl").exists()
        assert (tmp_path / "lambda_0.7" / "manifest.json").exists()

    def test_decimal_lambda_accepted(self, minidump_path, tmp_path):
        assert run_cli("build", minidump_path, "-o", tmp_path / "out",
                       "--lambda", "0.7", "--jobs", 1) == 0
        manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
        assert manifest["lambda_exact"] == "7/10"

    def test_invalid_lambda_is_usage_error(self, minidump_path, tmp_path):
        with pytest.raises(SystemExit) as excinfo:
            run_cli("build", minidump_path, "-o", tmp_path / "out",
                    "--lambda", "zap")
        assert excinfo.value.code == 2

    def test_nonempty_output_is_runtime_error(self, minidump_path, tmp_path,
                                              capsys):
        (tmp_path / "blocker.txt").write_text("here first")
        assert run_cli("build", minidump_path, "-o", tmp_path, "--jobs", 1) == 1
        err = capsys.readouterr().err
        assert err.startswith("error:")
        assert "--force" in err

    def test_bad_split_ratios_is_runtime_error(self, minidump_path, tmp_path,
                                               capsys):
        assert run_cli("build", minidump_path, "-o", tmp_path / "out",
                       "--split-ratios", "0.5", "0.3", "0.1",
                       "--jobs", 1) == 1
        assert "error:" in capsys.readouterr().err


class TestStats:
    def test_stats_end_to_end(self, built_corpus, tmp_path, capsys):
        out = tmp_path / "stats"
        assert run_cli("stats", *corpus_files(built_corpus), "-o", out) == 0
        stdout = capsys.readouterr().out
        expected = len(minidump.EXPECTED_INSTANCES_HALF)
        assert f"instances: {expected}" in stdout
        payload = json.loads((out / "stats.json").read_text())
        assert payload["instances"] == expected
        assert (out / "lengths_pdf.csv").exists()
        assert (out / "coverage_density.csv").exists()

    def test_missing_corpus_is_usage_error(self, tmp_path):
        with pytest.raises(SystemExit) as excinfo:
            run_cli("stats", tmp_path / "nope.jsonl", "-o", tmp_path / "out")
        assert excinfo.value.code == 2


class TestBaseline:
    def test_lead_predictions(self, built_corpus, tmp_path, capsys):
        out = tmp_path / "lead.jsonl"
        assert run_cli("baseline", *corpus_files(built_corpus),
                       "--method", "lead", "-o", out) == 0
        expected = len(minidump.EXPECTED_INSTANCES_HALF)
        assert f"wrote {expected} predictions" in capsys.readouterr().out
        records = [json.loads(line) for line in out.read_text().splitlines()]
        assert len(records) == expected
        assert all(list(record) == ["instance_id", "method", "candidate", "indices"]
                   for record in records)
        assert {record["method"] for record in records} == {"lead"}
        assert {record["instance_id"] for record in records} == set(
            minidump.EXPECTED_INSTANCES_HALF)

    def test_random_predictions_seed_stable(self, built_corpus, tmp_path):
        a, b, c = tmp_path / "a.jsonl", tmp_path / "b.jsonl", tmp_path / "c.jsonl"
        assert run_cli("baseline", *corpus_files(built_corpus),
                       "--method", "random", "-o", a, "--seed", 5) == 0
        assert run_cli("baseline", *corpus_files(built_corpus),
                       "--method", "random", "-o", b, "--seed", 5) == 0
        assert run_cli("baseline", *corpus_files(built_corpus),
                       "--method", "random", "-o", c, "--seed", 6) == 0
        assert a.read_bytes() == b.read_bytes()
        assert a.read_bytes() != c.read_bytes()

    def test_unknown_method_is_usage_error(self, built_corpus, tmp_path):
        with pytest.raises(SystemExit) as excinfo:
            run_cli("baseline", *corpus_files(built_corpus),
                    "--method", "zap", "-o", tmp_path / "out.jsonl")
        assert excinfo.value.code == 2


class TestEval:
    def test_eval_identity_predictions(self, built_corpus, tmp_path, capsys):
        preds = tmp_path / "echo.jsonl"
        with open(preds, "w", encoding="utf-8") as handle:
            for path in corpus_files(built_corpus):
                for line in path.read_text().splitlines():
                    record = json.loads(line)
                    handle.write(json.dumps({
                        "method": "echo",
                        "instance_id": record["instance_id"],
                        "candidate": " ".join(record["summary_sentences"]),
                    }) + "\n")
        per_instance = tmp_path / "per_instance.jsonl"
        assert run_cli("eval", preds,
                       "--references", *corpus_files(built_corpus),
                       "--per-instance", per_instance) == 0
        stdout = capsys.readouterr().out
        assert "echo" in stdout
        assert "100.00" in stdout
        payload = json.loads(stdout[stdout.index("{"):])
        entry = payload["methods"]["echo"]
        assert (entry["rouge1"], entry["rouge2"], entry["rougeL"],
                entry["rougeLsum"]) == (100.0, 100.0, 100.0, 100.0)
        rows = per_instance.read_text().splitlines()
        assert len(rows) == len(minidump.EXPECTED_INSTANCES_HALF)

    def test_eval_baseline_predictions(self, built_corpus, tmp_path, capsys):
        preds = tmp_path / "lead.jsonl"
        assert run_cli("baseline", *corpus_files(built_corpus),
                       "--method", "lead", "-o", preds) == 0
        capsys.readouterr()
        assert run_cli("eval", preds,
                       "--references", *corpus_files(built_corpus)) == 0
        stdout = capsys.readouterr().out
        assert stdout.splitlines()[0].split() == [
            "method", "rouge1", "rouge2", "rougeL", "rougeLsum", "instances"]

    def test_missing_predictions_is_usage_error(self, built_corpus, tmp_path):
        with pytest.raises(SystemExit) as excinfo:
            run_cli("eval", tmp_path / "nope.jsonl",
                    "--references", *corpus_files(built_corpus))
        assert excinfo.value.code == 2

    def test_empty_references_is_runtime_error(self, built_corpus, tmp_path,
                                               capsys):
        preds = tmp_path / "preds.jsonl"
        preds.write_text(json.dumps({
            "method": "m", "instance_id": "x", "candidate": "Hi."}) + "\n")
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        assert run_cli("eval", preds, "--references", empty) == 1
        assert "error: no references" in capsys.readouterr().err


class TestSample:
    def _parse_objects(self, text):
        decoder = json.JSONDecoder()
        objects, index = [], 0
        while index < len(text):
            obj, end = decoder.raw_decode(text, index)
            objects.append(obj)
            index = end
            while index < len(text) and text[index] in "\r\n ":
                index += 1
        return objects

    def test_sample_k_instances(self, built_corpus, capsys):
        assert run_cli("sample", *corpus_files(built_corpus), "-k", 2,
                       "--seed", 3) == 0
        objects = self._parse_objects(capsys.readouterr().out)
        assert len(objects) == 2
        ids = {record["instance_id"] for record in objects}
        assert ids <= set(minidump.EXPECTED_INSTANCES_HALF)

    def test_sample_reproducible(self, built_corpus, capsys):
        run_cli("sample", *corpus_files(built_corpus), "-k", 3, "--seed", 9)
        first = capsys.readouterr().out
        run_cli("sample", *corpus_files(built_corpus), "-k", 3, "--seed", 9)
        assert capsys.readouterr().out == first

    def test_sample_k_larger_than_corpus(self, built_corpus, capsys):
        assert run_cli("sample", *corpus_files(built_corpus), "-k", 999) == 0
        objects = self._parse_objects(capsys.readouterr().out)
        assert len(objects) == len(minidump.EXPECTED_INSTANCES_HALF)


class TestEntryPoints:
    def test_no_command_is_usage_error(self):
        with pytest.raises(SystemExit) as excinfo:
            run_cli()
        assert excinfo.value.code == 2

    def test_module_invocation(self, minidump_path, tmp_path):
        result = subprocess.run(
            [sys.executable, "-m", "aspectsum.cli", "ingest",
             str(minidump_path), "-o", str(tmp_path / "pages.jsonl")],
            capture_output=True, text=True)
        assert result.returncode == 0
        assert "pages read" in result.stdout

    def test_help_lists_subcommands(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            run_cli("--help")
        assert excinfo.value.code == 0
        stdout = capsys.readouterr().out
        for name in ("ingest", "build", "stats", "baseline", "eval", "sample"):
            assert name in stdout
