"""HTTP API for the lookup loop: recognize, confirm, stats, and bank browsing.

Recognition requests run concurrently over the immutable bank/gallery
snapshots; the session store and stats log are the only mutable state and are
mutated under serialized access. Upload bytes live solely in the spool
directory and are purged before any response leaves the service, on success
and failure paths alike.

Endpoints (all JSON unless noted):

    POST /api/recognize                multipart: file, sign_type -> token + candidates
    POST /api/sessions/{token}/confirm {"selection": "none" | {"rank": r, "variant_id": v}}
    GET  /api/stats                    confirmation-rank histogram per sign type
    GET  /api/signs/{entry_id}         entry view (variants, exemplars by provenance)
    GET  /api/search                   ?gloss=&word=&start_hs=&end_hs=
    GET  /api/media/{exemplar_id}      exemplar preview bytes (file response)
"""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, File, Form, Request, UploadFile
from fastapi.responses import FileResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from . import intake
from .artifact import load_artifact
from .errors import (
    EmptyGallery,
    ExtractorUnavailable,
    InvalidInput,
    NotFound,
    ParseError,
    PurgeError,
    QueryError,
    RecognitionError,
    SelectionError,
    SessionConflict,
    SessionExpired,
)
from .intake import Spool, UploadDescriptor, build_descriptor, extract_features, validate
from .matcher import (
    DEFAULT_BAND_FRACTION,
    CandidateList,
    DtwRecognizer,
    QueryMode,
    Recognizer,
    build_index,
    warm_up,
)
from .sessions import SessionStore, StatsLog
from .signbank import Bank, SearchQuery, import_bank, load_handshape_inventory

log = logging.getLogger(__name__)


@dataclass
class ServiceConfig:
    """Service settings; loadable from a JSON config file."""

    manifest_path: str | None = None
    artifact_path: str | None = None
    spool_dir: str = "spool"
    stats_log_path: str = "confirmations.jsonl"
    session_ttl_s: float = 3600.0
    band_fraction: float = DEFAULT_BAND_FRACTION
    ref_keypoint: int = 0
    k: int = 5
    max_payload_bytes: int = intake.DEFAULT_MAX_PAYLOAD_BYTES
    default_fps: float = intake.DEFAULT_FPS
    handshapes_path: str | None = None
    ui_dist: str | None = None
    host: str = "127.0.0.1"
    port: int = 8000


def load_config(path: str | Path) -> ServiceConfig:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    known = {f for f in ServiceConfig.__dataclass_fields__}
    unknown = set(doc) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return ServiceConfig(**doc)


@dataclass
class AppState:
    """Everything a running service needs; assembled once, shared read-only
    except for sessions/stats/spool."""

    bank: Bank | None
    recognizer: Recognizer
    sessions: SessionStore
    spool: Spool
    config: ServiceConfig
    purge_events: list[str] = field(default_factory=list)  # instrumentation hook
    lock: threading.Lock = field(default_factory=threading.Lock)


def build_state(
    config: ServiceConfig,
    bank: Bank | None = None,
    recognizer: Recognizer | None = None,
) -> AppState:
    """Assemble service state from config, allowing injected bank/recognizer."""
    if bank is None:
        if config.artifact_path:
            bank, params = load_artifact(config.artifact_path)
            ref_keypoint, band_fraction = params.ref_keypoint, params.band_fraction
        elif config.manifest_path:
            inventory = (
                load_handshape_inventory(config.handshapes_path)
                if config.handshapes_path
                else None
            )
            bank = import_bank(config.manifest_path, handshape_inventory=inventory)
            ref_keypoint, band_fraction = config.ref_keypoint, config.band_fraction
        else:
            raise ValueError("config names neither an artifact nor a manifest")
    else:
        ref_keypoint, band_fraction = config.ref_keypoint, config.band_fraction

    if recognizer is None:
        index = build_index(bank, ref_keypoint=ref_keypoint, band_fraction=band_fraction)
        recognizer = DtwRecognizer(index, k=config.k)
        warm_up()

    stats_log = StatsLog(config.stats_log_path)
    sessions = SessionStore(
        ttl_s=config.session_ttl_s, stats=stats_log.replay(), stats_log=stats_log
    )
    return AppState(
        bank=bank,
        recognizer=recognizer,
        sessions=sessions,
        spool=Spool(config.spool_dir),
        config=config,
    )


def _error(status: int, code: str, detail: str) -> JSONResponse:
    return JSONResponse({"error": code, "detail": detail}, status_code=status)


def _preview_url(state: AppState, variant_id: str) -> str | None:
    if state.bank is None:
        return None
    variant = state.bank.variants.get(variant_id)
    if variant is None or not variant.exemplar_ids:
        return None
    return f"/api/media/{variant.exemplar_ids[0]}"


def _candidates_payload(state: AppState, candidates: CandidateList) -> list[dict]:
    out = []
    for i, c in enumerate(candidates.candidates):
        out.append(
            {
                "rank": i + 1,
                "entry_id": c.entry_id,
                "base_gloss": c.base_gloss,
                "score": c.score,
                "entry_url": f"/api/signs/{c.entry_id}",
                "variants": [
                    {
                        "variant_id": v.variant_id,
                        "label": v.label,
                        "score": v.score,
                        "preview_url": _preview_url(state, v.variant_id),
                    }
                    for v in c.variants
                ],
            }
        )
    return out


def create_app(state: AppState) -> FastAPI:
    app = FastAPI(title="sign lookup service")
    app.state.lookup = state

    @app.post("/api/recognize")
    def recognize_upload(file: UploadFile = File(...), sign_type: str = Form(...)):
        """Validate, extract, recognize, purge - in that order - then answer."""
        try:
            mode = QueryMode(sign_type)
        except ValueError:
            return _error(400, "validation", f"sign_type must be one of "
                          f"{[m.value for m in QueryMode]}, got {sign_type!r}")
        payload = file.file.read()
        desc = build_descriptor(
            file.filename or "", payload, mode, default_fps=state.config.default_fps
        )
        state.spool.store(desc)
        try:
            report = validate(desc, max_payload_bytes=state.config.max_payload_bytes)
            if not report.accepted:
                return JSONResponse(
                    {"error": "validation", **report.to_dict()}, status_code=400
                )
            try:
                seq = extract_features(desc)
            except ParseError as exc:
                return _error(422, "parse", str(exc))
            except ExtractorUnavailable as exc:
                return _error(503, "extractor_unavailable", str(exc))
            try:
                candidates = state.recognizer.recognize(seq, mode)
            except EmptyGallery as exc:
                return _error(422, "empty_gallery", str(exc))
            except (InvalidInput, RecognitionError) as exc:
                return _error(422, "recognition", str(exc))
            except Exception as exc:  # contract: surface backend failures, don't 500
                log.exception("recognizer failed")
                return _error(422, "recognition", f"recognizer failed: {exc}")
            session = state.sessions.create(candidates, mode)
            return JSONResponse(
                {
                    "token": session.token,
                    "sign_type": mode.value,
                    "candidates": _candidates_payload(state, candidates),
                }
            )
        finally:
            _purge_quietly(state, desc)

    @app.post("/api/sessions/{token}/confirm")
    async def confirm(token: str, request: Request):
        try:
            body = await request.json()
        except json.JSONDecodeError:
            return _error(400, "selection", "body must be JSON")
        selection = body.get("selection") if isinstance(body, dict) else None
        try:
            if selection == "none":
                outcome = state.sessions.reject_none(token)
                return JSONResponse(
                    {
                        "state": outcome.session.state.value,
                        "redirect": {"kind": "bank_search", "url": "/api/search"},
                    }
                )
            if isinstance(selection, dict) and "rank" in selection and "variant_id" in selection:
                outcome = state.sessions.confirm(
                    token, selection["rank"], selection["variant_id"]
                )
                return JSONResponse(
                    {
                        "state": outcome.session.state.value,
                        "rank": outcome.session.confirmed_rank,
                        "variant_id": outcome.session.confirmed_variant,
                        "entry_id": outcome.entry_id,
                        "redirect": {"kind": "entry", "url": f"/api/signs/{outcome.entry_id}"},
                    }
                )
            return _error(400, "selection", 'selection must be "none" or {rank, variant_id}')
        except NotFound as exc:
            return _error(404, "not_found", str(exc))
        except SessionConflict as exc:
            return _error(409, "conflict", str(exc))
        except SessionExpired as exc:
            return _error(410, "expired", str(exc))
        except SelectionError as exc:
            return _error(400, "selection", str(exc))

    @app.get("/api/stats")
    def stats():
        return JSONResponse(state.sessions.stats.snapshot())

    @app.get("/api/signs/{entry_id}")
    def entry(entry_id: str):
        if state.bank is None:
            return _error(404, "not_found", "no bank configured")
        try:
            view = state.bank.entry_view(entry_id)
        except NotFound as exc:
            return _error(404, "not_found", str(exc))
        variants = []
        for v in view.variants:
            bank_variant = state.bank.variants[v.variant_id]
            variants.append(
                {
                    "variant_id": v.variant_id,
                    "label": v.label,
                    "related_english_words": list(bank_variant.related_english_words),
                    "start_handshape_dom": bank_variant.start_handshape_dom,
                    "end_handshape_dom": bank_variant.end_handshape_dom,
                    "start_handshape_nondom": bank_variant.start_handshape_nondom,
                    "end_handshape_nondom": bank_variant.end_handshape_nondom,
                    "isolated": [
                        {"exemplar_id": x.exemplar_id, "media_url": f"/api/media/{x.exemplar_id}"}
                        for x in v.isolated
                    ],
                    "from_sentence": [
                        {
                            "exemplar_id": x.exemplar_id,
                            "media_url": f"/api/media/{x.exemplar_id}",
                            "source_utterance": x.source_utterance,
                        }
                        for x in v.from_sentence
                    ],
                }
            )
        return JSONResponse(
            {
                "entry_id": view.entry_id,
                "base_gloss": view.base_gloss,
                "sign_class": view.sign_class.value,
                "variants": variants,
            }
        )

    @app.get("/api/search")
    def search(
        gloss: str | None = None,
        word: str | None = None,
        start_hs: str | None = None,
        end_hs: str | None = None,
    ):
        if state.bank is None:
            return _error(400, "query", "no bank configured")
        query = SearchQuery(
            gloss_substring=gloss,
            english_word=word,
            start_handshape=start_hs,
            end_handshape=end_hs,
        )
        try:
            hits = state.bank.search(query)
        except QueryError as exc:
            return _error(400, "query", str(exc))
        return JSONResponse(
            {
                "variants": [
                    {
                        "variant_id": v.variant_id,
                        "label": v.label,
                        "entry_id": v.entry_id,
                        "base_gloss": state.bank.entries[v.entry_id].base_gloss,
                        "entry_url": f"/api/signs/{v.entry_id}",
                    }
                    for v in hits
                ]
            }
        )

    @app.get("/api/media/{exemplar_id}")
    def media(exemplar_id: str):
        if state.bank is None:
            return _error(404, "not_found", "no bank configured")
        ex = state.bank.exemplars.get(exemplar_id)
        if ex is None:
            return _error(404, "not_found", f"unknown exemplar {exemplar_id!r}")
        base = state.bank.base_dir or Path(".")
        for candidate in (ex.media_path, ex.features_path):
            if candidate is None:
                continue
            path = Path(candidate)
            if not path.is_absolute():
                path = base / path
            if path.is_file():
                return FileResponse(path)
        return _error(404, "not_found", f"exemplar {exemplar_id!r} has no preview media on disk")

    ui_dist = state.config.ui_dist
    if ui_dist and Path(ui_dist).is_dir():
        app.mount("/", StaticFiles(directory=ui_dist, html=True), name="ui")

    return app


def _purge_quietly(state: AppState, desc: UploadDescriptor) -> None:
    """Purge before the response leaves; deletion failures are logged, queued
    for retry, and never block the response."""
    try:
        state.spool.purge(desc)
    except PurgeError as exc:
        log.error("%s", exc)
    state.purge_events.append(desc.filename)


def create_app_from_config(config: ServiceConfig) -> FastAPI:
    return create_app(build_state(config))
