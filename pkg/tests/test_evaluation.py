import json

import numpy as np
import pytest

from signlookup.errors import ManifestError
from signlookup.evaluation import (
    LabeledQuery,
    evaluate,
    load_queries_manifest,
    run_eval,
)
from signlookup.features import dumps_features, save_feature_file
from signlookup.matcher import QueryMode, build_index
from signlookup.signbank import import_bank

from conftest import jitter, make_walk_seq, simple_gallery_doc


@pytest.fixture(scope="module")
def small_gallery():
    bank = import_bank(simple_gallery_doc([f"S-{i:02d}" for i in range(8)], seed=60))
    return bank, build_index(bank)


def self_queries(bank):
    out = []
    for ex in bank.exemplars.values():
        out.append(LabeledQuery(ex.features, bank.variants[ex.variant_id].entry_id))
    return out


class TestEvaluate:
    def test_gallery_self_queries_are_perfect(self, small_gallery):
        bank, index = small_gallery
        for mode in QueryMode:
            report = evaluate(index, self_queries(bank), mode)
            assert report.n_queries == len(bank.exemplars)
            assert report.top1_acc == 1.0
            assert report.top5_acc == 1.0

    def test_confusion_diagonal_for_self_queries(self, small_gallery):
        bank, index = small_gallery
        report = evaluate(index, self_queries(bank), QueryMode.CITATION)
        for truth, row in report.confusion.items():
            assert row == {truth: 1}

    def test_top1_never_exceeds_top5(self, small_gallery):
        bank, index = small_gallery
        rng = np.random.default_rng(61)
        queries = [
            LabeledQuery(jitter(ex.features, rng, sigma=0.3), bank.variants[ex.variant_id].entry_id)
            for ex in bank.exemplars.values()
        ]
        report = evaluate(index, queries, QueryMode.CITATION)
        assert report.top1_acc <= report.top5_acc

    def test_unknown_truth_label_rejected(self, small_gallery):
        _, index = small_gallery
        rng = np.random.default_rng(62)
        queries = [LabeledQuery(make_walk_seq(rng, 10, 8), "e-nope")]
        with pytest.raises(ManifestError):
            evaluate(index, queries, QueryMode.CITATION)

    def test_worker_fanout_is_deterministic(self, small_gallery):
        bank, index = small_gallery
        rng = np.random.default_rng(63)
        queries = [
            LabeledQuery(jitter(ex.features, rng, sigma=0.05), bank.variants[ex.variant_id].entry_id)
            for ex in bank.exemplars.values()
        ]
        serial = evaluate(index, queries, QueryMode.CITATION, workers=1)
        parallel = evaluate(index, queries, QueryMode.CITATION, workers=4)
        assert serial.to_dict() == parallel.to_dict()

    def test_run_eval_both_modes(self, small_gallery):
        bank, index = small_gallery
        report = run_eval(index, self_queries(bank), list(QueryMode))
        assert set(report.modes) == {"citation", "segmented"}
        assert all("top1=" in line for line in report.summary_lines())


class TestQueriesManifest:
    def test_load_with_relative_paths(self, tmp_path, small_gallery):
        bank, _ = small_gallery
        qdir = tmp_path / "queries"
        qdir.mkdir()
        records = []
        for i, ex in enumerate(list(bank.exemplars.values())[:3]):
            rel = f"q{i:02d}.features"
            save_feature_file(ex.features, qdir / rel)
            records.append({"features": rel, "entry_id": bank.variants[ex.variant_id].entry_id})
        manifest = qdir / "queries.json"
        manifest.write_text(
            json.dumps({"schema": "query-manifest/1", "queries": records}), encoding="utf-8"
        )
        queries = load_queries_manifest(manifest)
        assert len(queries) == 3
        assert queries[0].entry_id == records[0]["entry_id"]

    def test_inline_features(self, tmp_path, small_gallery):
        bank, _ = small_gallery
        ex = next(iter(bank.exemplars.values()))
        manifest = tmp_path / "queries.json"
        manifest.write_text(
            json.dumps(
                {
                    "schema": "query-manifest/1",
                    "queries": [
                        {
                            "features": json.loads(dumps_features(ex.features)),
                            "entry_id": bank.variants[ex.variant_id].entry_id,
                        }
                    ],
                }
            ),
            encoding="utf-8",
        )
        assert len(load_queries_manifest(manifest)) == 1

    def test_unlabeled_query_rejected(self, tmp_path):
        manifest = tmp_path / "queries.json"
        manifest.write_text(
            json.dumps(
                {
                    "schema": "query-manifest/1",
                    "queries": [{"features": {"kpcount": 1, "frames": [[[0, 0, 1]]]}}],
                }
            ),
            encoding="utf-8",
        )
        with pytest.raises(ManifestError):
            load_queries_manifest(manifest)

    def test_wrong_schema_rejected(self, tmp_path):
        manifest = tmp_path / "queries.json"
        manifest.write_text('{"schema": "other/9", "queries": []}', encoding="utf-8")
        with pytest.raises(ManifestError):
            load_queries_manifest(manifest)
