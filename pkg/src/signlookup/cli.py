"""Operator command line: ingest, serve, recognize, search, eval, annotate.

Exit codes: 0 success, 2 usage (argparse), 3 bad input data (manifest,
artifact, feature file), 4 I/O failure, 5 domain error (unknown id, empty
query, empty gallery, bad range/overlap). `--json` emits the same structures
as the HTTP API.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .annotation import (
    insert_all_data,
    load_annotation_file,
    lookup_segment,
    save_annotation_file,
)
from .artifact import ArtifactParams, load_index, save_artifact
from .errors import (
    ArtifactError,
    BankImportError,
    EmptyGallery,
    InvalidInput,
    ManifestError,
    NotFound,
    Overlap,
    ParseError,
    QueryError,
    RangeError,
    SignLookupError,
)
from .evaluation import load_queries_manifest, run_eval
from .features import load_feature_file
from .matcher import DEFAULT_BAND_FRACTION, DtwRecognizer, QueryMode, rank
from .signbank import SearchQuery, import_bank, load_handshape_inventory

EXIT_OK = 0
EXIT_DATA = 3
EXIT_IO = 4
EXIT_DOMAIN = 5

_DATA_ERRORS = (BankImportError, ManifestError, ParseError, ArtifactError)
_DOMAIN_ERRORS = (NotFound, QueryError, EmptyGallery, InvalidInput, RangeError, Overlap)


def _cmd_ingest(args) -> int:
    inventory = load_handshape_inventory(args.handshapes) if args.handshapes else None
    bank = import_bank(args.manifest, handshape_inventory=inventory)
    params = ArtifactParams(ref_keypoint=args.ref_keypoint, band_fraction=args.band_fraction)
    save_artifact(args.out, bank, params)
    print(
        f"ingested {len(bank.entries)} entries / {len(bank.variants)} variants / "
        f"{len(bank.exemplars)} exemplars -> {args.out}"
    )
    return EXIT_OK


def _cmd_recognize(args) -> int:
    bank, index = load_index(args.artifact)
    query = load_feature_file(args.features)
    candidates = rank(index, query, QueryMode(args.mode), k=args.k)
    if args.json:
        print(json.dumps(candidates.to_dict(), indent=2, sort_keys=True))
    else:
        for i, c in enumerate(candidates.candidates, start=1):
            print(f"{i}. {c.base_gloss}  (score {c.score:.6f})")
            for v in c.variants:
                print(f"     variant {v.variant_id} {v.label}  (score {v.score:.6f})")
    return EXIT_OK


def _cmd_search(args) -> int:
    bank, _ = load_index(args.artifact)
    query = SearchQuery(
        gloss_substring=args.gloss,
        english_word=args.word,
        start_handshape=args.start_hs,
        end_handshape=args.end_hs,
    )
    hits = bank.search(query)
    if args.json:
        print(
            json.dumps(
                {
                    "variants": [
                        {
                            "variant_id": v.variant_id,
                            "label": v.label,
                            "entry_id": v.entry_id,
                            "base_gloss": bank.entries[v.entry_id].base_gloss,
                        }
                        for v in hits
                    ]
                },
                indent=2,
                sort_keys=True,
            )
        )
    else:
        for v in hits:
            words = ", ".join(v.related_english_words)
            print(f"{v.variant_id}  {v.label}  [{bank.entries[v.entry_id].base_gloss}]  {words}")
        if not hits:
            print("no matches")
    return EXIT_OK


def _cmd_eval(args) -> int:
    _, index = load_index(args.artifact)
    queries = load_queries_manifest(args.queries)
    modes = [QueryMode(args.mode)] if args.mode != "both" else list(QueryMode)
    report = run_eval(index, queries, modes, k=args.k, workers=args.workers)
    for line in report.summary_lines():
        print(line)
    if args.out:
        Path(args.out).write_text(
            json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        print(f"report written to {args.out}")
    if args.json:
        print(json.dumps(report.to_dict(), sort_keys=True))
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app_from_config, load_config

    config = load_config(args.config)
    app = create_app_from_config(config)
    uvicorn.run(app, host=config.host, port=config.port)
    return EXIT_OK


def _cmd_annotate_lookup(args) -> int:
    _, index = load_index(args.artifact)
    doc = load_annotation_file(args.doc)
    recognizer = DtwRecognizer(index, k=args.k)
    candidates = lookup_segment(doc, args.utterance, args.start, args.end, recognizer)
    if args.json:
        print(json.dumps(candidates.to_dict(), indent=2, sort_keys=True))
    else:
        for i, c in enumerate(candidates.candidates, start=1):
            print(f"{i}. {c.base_gloss}  (score {c.score:.6f})")
    return EXIT_OK


def _cmd_annotate_insert(args) -> int:
    bank, _ = load_index(args.artifact)
    doc = load_annotation_file(args.doc)
    updated = insert_all_data(doc, args.utterance, args.start, args.end, args.variant, bank)
    out = args.out or args.doc
    save_annotation_file(updated, out)
    print(f"inserted {args.variant} at [{args.start}, {args.end}) -> {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="signlookup", description="Sign lookup from pose-feature video examples"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="build a versioned bank+gallery artifact from a manifest")
    p.add_argument("manifest", help="bank manifest path")
    p.add_argument("--out", required=True, help="artifact output path")
    p.add_argument("--handshapes", help="handshape inventory JSON file")
    p.add_argument("--ref-keypoint", type=int, default=0)
    p.add_argument("--band-fraction", type=float, default=DEFAULT_BAND_FRACTION)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("recognize", help="rank the top-k signs for a feature file")
    p.add_argument("features", help="query feature-sequence file")
    p.add_argument("--artifact", required=True)
    p.add_argument("--mode", choices=[m.value for m in QueryMode], default="citation")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_recognize)

    p = sub.add_parser("search", help="search the sign bank")
    p.add_argument("--artifact", required=True)
    p.add_argument("--gloss", help="case-insensitive substring of the variant label")
    p.add_argument("--word", help="exact related English word")
    p.add_argument("--start-hs", help="dominant-hand start handshape")
    p.add_argument("--end-hs", help="dominant-hand end handshape")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("eval", help="Top-1/Top-5 accuracy over a labeled queries manifest")
    p.add_argument("queries", help="queries manifest path")
    p.add_argument("--artifact", required=True)
    p.add_argument("--mode", choices=[m.value for m in QueryMode] + ["both"], default="both")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--config", required=True, help="service config JSON")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("annotate", help="annotation-document operations")
    asub = p.add_subparsers(dest="annotate_command", required=True)

    pl = asub.add_parser("lookup", help="recognize a frame segment of an utterance")
    pl.add_argument("doc", help="annotation document path")
    pl.add_argument("--artifact", required=True)
    pl.add_argument("--utterance", required=True)
    pl.add_argument("--start", type=int, required=True)
    pl.add_argument("--end", type=int, required=True)
    pl.add_argument("--k", type=int, default=5)
    pl.add_argument("--json", action="store_true")
    pl.set_defaults(func=_cmd_annotate_lookup)

    pi = asub.add_parser("insert", help="insert a confirmed variant's properties as a sign token")
    pi.add_argument("doc", help="annotation document path")
    pi.add_argument("--artifact", required=True)
    pi.add_argument("--utterance", required=True)
    pi.add_argument("--start", type=int, required=True)
    pi.add_argument("--end", type=int, required=True)
    pi.add_argument("--variant", required=True)
    pi.add_argument("--out", help="write the updated document here (default: in place)")
    pi.set_defaults(func=_cmd_annotate_insert)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except _DOMAIN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SignLookupError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
