"""Top-1/Top-5 accuracy harness over a labeled queries manifest.

Queries manifest (UTF-8 JSON, feature paths relative to the manifest file):

    {
      "schema": "query-manifest/1",
      "queries": [
        {"features": "queries/q000.features", "entry_id": "e-dance"},
        ...
      ]
    }

Every query must carry the true `entry_id`; an unlabeled query aborts the run.
Evaluation is deterministic: queries may fan out across worker threads (the
alignment kernel releases the GIL), but results are reduced in query order.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ManifestError
from .features import FeatureSequence, load_feature_file, loads_features
from .matcher import DEFAULT_K, GalleryIndex, QueryMode, rank

QUERIES_SCHEMA = "query-manifest/1"


@dataclass(frozen=True)
class LabeledQuery:
    features: FeatureSequence
    entry_id: str


@dataclass
class ModeReport:
    n_queries: int = 0
    top1_correct: int = 0
    top5_correct: int = 0
    # confusion[truth][top-1 prediction] = count
    confusion: dict[str, dict[str, int]] = field(default_factory=dict)

    @property
    def top1_acc(self) -> float:
        return self.top1_correct / self.n_queries if self.n_queries else 0.0

    @property
    def top5_acc(self) -> float:
        return self.top5_correct / self.n_queries if self.n_queries else 0.0

    def to_dict(self) -> dict:
        return {
            "n_queries": self.n_queries,
            "top1_acc": self.top1_acc,
            "top5_acc": self.top5_acc,
            "confusion": {t: dict(p) for t, p in sorted(self.confusion.items())},
        }


REPORT_SCHEMA = "eval-report/1"


@dataclass
class EvalReport:
    modes: dict[str, ModeReport] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "modes": {m: r.to_dict() for m, r in sorted(self.modes.items())},
        }

    def summary_lines(self) -> list[str]:
        lines = []
        for mode, report in sorted(self.modes.items()):
            lines.append(
                f"{mode}: n={report.n_queries}  "
                f"top1={report.top1_acc:.4f}  top5={report.top5_acc:.4f}"
            )
        return lines


def load_queries_manifest(path: str | Path) -> list[LabeledQuery]:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestError(f"cannot read queries manifest {path}: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("schema") != QUERIES_SCHEMA:
        raise ManifestError(f"expected a {QUERIES_SCHEMA} document")
    queries = []
    for i, qdoc in enumerate(doc.get("queries", [])):
        entry_id = qdoc.get("entry_id")
        if not entry_id:
            raise ManifestError(f"query {i} carries no true entry_id label")
        ref = qdoc.get("features")
        if isinstance(ref, str):
            fpath = Path(ref)
            if not fpath.is_absolute():
                fpath = path.parent / fpath
            features = load_feature_file(fpath)
        elif isinstance(ref, dict):
            features = loads_features(json.dumps(ref))
        else:
            raise ManifestError(f"query {i} has no features reference")
        queries.append(LabeledQuery(features, entry_id))
    return queries


def evaluate(
    index: GalleryIndex,
    queries: list[LabeledQuery],
    mode: QueryMode,
    k: int = DEFAULT_K,
    workers: int = 1,
) -> ModeReport:
    """Score every query and tally Top-1/Top-5 hits plus a confusion table."""
    for q in queries:
        if q.entry_id not in index.entry_gloss:
            raise ManifestError(f"query labeled with unknown entry {q.entry_id!r}")

    def run(q: LabeledQuery):
        return rank(index, q.features, mode, k)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, queries))  # map preserves query order
    else:
        results = [run(q) for q in queries]

    report = ModeReport(n_queries=len(queries))
    for q, candidates in zip(queries, results):
        ids = [c.entry_id for c in candidates.candidates]
        predicted = ids[0] if ids else None
        if predicted == q.entry_id:
            report.top1_correct += 1
        if q.entry_id in ids:
            report.top5_correct += 1
        if predicted is not None:
            report.confusion.setdefault(q.entry_id, {})
            report.confusion[q.entry_id][predicted] = (
                report.confusion[q.entry_id].get(predicted, 0) + 1
            )
    return report


def run_eval(
    index: GalleryIndex,
    queries: list[LabeledQuery],
    modes: list[QueryMode],
    k: int = DEFAULT_K,
    workers: int = 1,
) -> EvalReport:
    report = EvalReport()
    for mode in modes:
        report.modes[mode.value] = evaluate(index, queries, mode, k, workers)
    return report
