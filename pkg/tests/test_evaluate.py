from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest

import minidump
from aspectsum.aspects import build_instances, dump_record, from_record, score_page
from aspectsum.dump_ingest import clean_pages
from aspectsum.evaluate import (
    METRIC_NAMES,
    evaluate,
    load_predictions,
    load_references,
    reference_text,
    report_json,
    report_table,
    score_pair,
)


def corpus_references(minidump_path):
    instances = []
    for page in clean_pages(minidump_path):
        instances.extend(build_instances(score_page(page), Fraction(1, 2), "test"))
    assert len(instances) == len(minidump.EXPECTED_INSTANCES_HALF)
    return instances


def hand_references():
    refs = []
    for instance_id, text in [
        ("e-1", "The cat sat. The dog ran."),
        ("e-2", "Alpha beta gamma delta."),
        ("e-3", "Red or blue."),
    ]:
        refs.append(from_record({
            "instance_id": instance_id,
            "page_id": 1,
            "page_title": "T",
            "aspect": "A",
            "document": text,
            "summary_sentences": [text],
            "sentence_scores": ["1"],
            "split": "test",
        }))
    return refs


HAND_PREDICTIONS = [
    {"method": "m", "instance_id": "e-1", "candidate": "The cat sat. A dog barked."},
    {"method": "m", "instance_id": "e-2", "candidate": "Gamma delta alpha beta."},
    {"method": "m", "instance_id": "e-3", "candidate": "Green and yellow here."},
]


class TestScorePair:
    def test_keys_and_types(self):
        scores = score_pair("The cat sat.", "The cat sat there.")
        assert tuple(scores) == METRIC_NAMES
        assert all(isinstance(v, Fraction) for v in scores.values())

    def test_hand_values(self):
        scores = score_pair("The cat sat. A dog barked.",
                            "The cat sat. The dog ran.")
        assert scores["rouge1"] == Fraction(2, 3)
        assert scores["rouge2"] == Fraction(2, 5)
        assert scores["rougeL"] == Fraction(2, 3)
        # Union-LCS can credit "the" only once: the candidate contains a
        # single "the", so the second reference sentence's match is spent.
        assert scores["rougeLsum"] == Fraction(2, 3)

    def test_word_order_distinguishes_metrics(self):
        scores = score_pair("Gamma delta alpha beta.", "Alpha beta gamma delta.")
        assert scores["rouge1"] == 1
        assert scores["rouge2"] == Fraction(2, 3)
        assert scores["rougeL"] == Fraction(1, 2)
        assert scores["rougeLsum"] == Fraction(1, 2)

    def test_disjoint_is_zero(self):
        scores = score_pair("Green and yellow here.", "Red or blue.")
        assert all(v == 0 for v in scores.values())


class TestEvaluate:
    def test_identity_predictions_score_hundred(self, minidump_path):
        refs = corpus_references(minidump_path)
        predictions = [
            {"method": "echo", "instance_id": r.instance_id,
             "candidate": reference_text(r)}
            for r in refs
        ]
        report = evaluate(predictions, refs)
        (row,) = report.methods
        assert (row.rouge1, row.rouge2, row.rougeL, row.rougeLsum) == (
            100.0, 100.0, 100.0, 100.0)
        assert row.instances == len(refs)
        assert row.missing_references == 0
        assert row.unmatched_predictions == 0
        assert report.reference_count == len(refs)

    def test_empty_predictions_score_zero(self, minidump_path):
        refs = corpus_references(minidump_path)
        predictions = [
            {"method": "blank", "instance_id": r.instance_id, "candidate": ""}
            for r in refs
        ]
        (row,) = evaluate(predictions, refs).methods
        assert (row.rouge1, row.rouge2, row.rougeL, row.rougeLsum) == (
            0.0, 0.0, 0.0, 0.0)

    def test_hand_fixture_means(self):
        (row,) = evaluate(HAND_PREDICTIONS, hand_references()).methods
        assert row.method == "m"
        assert row.instances == 3
        assert row.rouge1 == pytest.approx(55.56, abs=0.005)
        assert row.rouge2 == pytest.approx(35.56, abs=0.005)
        assert row.rougeL == pytest.approx(38.89, abs=0.005)
        assert row.rougeLsum == pytest.approx(38.89, abs=0.005)

    def test_order_independence(self):
        refs = hand_references()
        base = evaluate(HAND_PREDICTIONS, refs)
        rng = random.Random(5)
        for _ in range(5):
            preds = HAND_PREDICTIONS.copy()
            shuffled_refs = refs.copy()
            rng.shuffle(preds)
            rng.shuffle(shuffled_refs)
            assert evaluate(preds, shuffled_refs) == base

    def test_methods_sorted_in_report(self):
        refs = hand_references()
        preds = [
            {"method": "zeta", "instance_id": "e-1", "candidate": "The cat."},
            {"method": "alpha", "instance_id": "e-1", "candidate": "The cat."},
        ]
        report = evaluate(preds, refs)
        assert [row.method for row in report.methods] == ["alpha", "zeta"]

    def test_missing_references_counted(self):
        refs = hand_references()
        preds = [HAND_PREDICTIONS[0]]
        (row,) = evaluate(preds, refs).methods
        assert row.instances == 1
        assert row.missing_references == 2
        # The mean covers only the joined instance.
        assert row.rouge1 == pytest.approx(66.67, abs=0.005)

    def test_unmatched_predictions_counted_not_scored(self):
        refs = hand_references()
        preds = HAND_PREDICTIONS + [
            {"method": "m", "instance_id": "ghost", "candidate": "The cat sat."}
        ]
        (row,) = evaluate(preds, refs).methods
        assert row.unmatched_predictions == 1
        assert row.instances == 3
        assert row.rouge1 == pytest.approx(55.56, abs=0.005)

    def test_duplicate_reference_id_raises(self):
        refs = hand_references()
        with pytest.raises(ValueError, match="duplicate instance_id in references"):
            evaluate(HAND_PREDICTIONS, refs + [refs[0]])

    def test_duplicate_prediction_raises(self):
        with pytest.raises(ValueError, match="duplicate instance_id in predictions"):
            evaluate(HAND_PREDICTIONS + [HAND_PREDICTIONS[0]], hand_references())

    def test_same_instance_two_methods_allowed(self):
        preds = [
            {"method": "a", "instance_id": "e-1", "candidate": "The cat."},
            {"method": "b", "instance_id": "e-1", "candidate": "The cat."},
        ]
        report = evaluate(preds, hand_references())
        assert len(report.methods) == 2

    def test_no_references_raises(self):
        with pytest.raises(ValueError, match="no references"):
            evaluate(HAND_PREDICTIONS, [])

    def test_no_predictions_raises(self):
        with pytest.raises(ValueError, match="no predictions"):
            evaluate([], hand_references())

    def test_method_joining_nothing_raises(self):
        preds = [{"method": "m", "instance_id": "ghost", "candidate": "Hi."}]
        with pytest.raises(ValueError, match="match any reference"):
            evaluate(preds, hand_references())


class TestPerInstanceRows:
    def test_rows_written_and_consistent_with_means(self, tmp_path):
        out = tmp_path / "per_instance.jsonl"
        report = evaluate(HAND_PREDICTIONS, hand_references(), out)
        assert report.per_instance_path == str(out)
        rows = [json.loads(line) for line in out.read_text().splitlines()]
        assert len(rows) == 3
        assert [r["instance_id"] for r in rows] == ["e-1", "e-2", "e-3"]
        assert rows[0]["scores"]["rouge1"] == "2/3"
        assert rows[0]["percent"]["rouge1"] == pytest.approx(100 * 2 / 3)
        # Report means are exactly the means of the emitted fraction rows.
        (method_row,) = report.methods
        for name in METRIC_NAMES:
            total = sum(Fraction(r["scores"][name]) for r in rows)
            expected = round(float(total / len(rows) * 100), 2)
            assert getattr(method_row, name) == expected

    def test_no_path_no_file(self):
        report = evaluate(HAND_PREDICTIONS, hand_references())
        assert report.per_instance_path is None


class TestReportOutputs:
    def test_report_json_structure(self):
        report = evaluate(HAND_PREDICTIONS, hand_references())
        payload = json.loads(report_json(report))
        assert payload["reference_count"] == 3
        assert payload["per_instance_file"] is None
        entry = payload["methods"]["m"]
        assert entry["rouge1"] == pytest.approx(55.56, abs=0.005)
        assert entry["instances"] == 3
        assert entry["missing_references"] == 0
        assert entry["unmatched_predictions"] == 0

    def test_report_table_layout(self):
        report = evaluate(HAND_PREDICTIONS, hand_references())
        lines = report_table(report).splitlines()
        assert lines[0].split() == [
            "method", "rouge1", "rouge2", "rougeL", "rougeLsum", "instances"]
        assert set(lines[1]) <= {"-", " "}
        assert lines[2].split() == ["m", "55.56", "35.56", "38.89", "38.89", "3"]


class TestLoaders:
    def test_load_predictions_skips_blank_lines(self, tmp_path):
        path = tmp_path / "preds.jsonl"
        path.write_text(
            json.dumps(HAND_PREDICTIONS[0]) + "\n\n" +
            json.dumps(HAND_PREDICTIONS[1]) + "\n")
        assert load_predictions(path) == HAND_PREDICTIONS[:2]

    def test_load_references_multiple_files(self, tmp_path):
        refs = hand_references()
        a = tmp_path / "a.jsonl"
        b = tmp_path / "b.jsonl"
        a.write_text(dump_record(refs[0]) + "\n" + dump_record(refs[1]) + "\n")
        b.write_text("\n" + dump_record(refs[2]) + "\n")
        assert load_references([a, b]) == refs
