"""HTTP moderation service: thread registration, on-demand scoring, the
flagged review queue, dispositions, and corpus stats over the monitored set.

All endpoints speak JSON with snake_case fields; errors follow
``{"error": {"code", "message", "detail"}}``. Interventions are log events
only; no GitHub write adapter is wired in by default.
"""

from __future__ import annotations

import threading
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .analytics import compute_stats
from .errors import (
    ContextOverflowError,
    EmptyCorpusError,
    FirstCommentToxicError,
    GatewayError,
    ParseFailureError,
    ScriptExhaustedError,
)
from .model import ConversationThread
from .predictor import (
    InterventionPolicy,
    predict,
    recommend_action,
)
from .prompts import ScdStrategy
from .store import (
    Disposition,
    ErrorCategory,
    ModerationStore,
    MonitoredThread,
    make_thread_id,
)

DEFAULT_POLICY = InterventionPolicy(low_threshold=0.4, high_threshold=0.6)


def _error(status: int, code: str, message: str, detail: str = "") -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"error": {"code": code, "message": message, "detail": detail}},
    )


def _prediction_json(prediction) -> dict | None:
    return prediction.to_dict() if prediction else None


def _thread_json(record: MonitoredThread, policy: InterventionPolicy) -> dict:
    latest = record.latest_prediction
    return {
        "id": record.id,
        "repo": record.thread.repo,
        "number": record.thread.number,
        "title": record.thread.title,
        "kind": record.thread.kind.value,
        "updated_at": record.updated_at.strftime("%Y-%m-%dT%H:%M:%SZ"),
        "latest_prediction": _prediction_json(latest),
        "action_band": recommend_action(latest.probability, policy).value
        if latest
        else None,
        "dispositions": [d.to_dict() for d in record.dispositions],
        "comment_count": len(record.thread.comments),
    }


def create_app(
    store: ModerationStore,
    gateway,
    github_client=None,
    policy: InterventionPolicy = DEFAULT_POLICY,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="derailwatch moderation service")
    score_locks: dict[str, threading.Lock] = {}
    score_locks_guard = threading.Lock()

    def lock_for(thread_id: str) -> threading.Lock:
        with score_locks_guard:
            return score_locks.setdefault(thread_id, threading.Lock())

    @app.post("/threads")
    async def post_thread(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _error(400, "invalid_json", "request body is not valid JSON")
        if not isinstance(body, dict):
            return _error(400, "invalid_schema", "request body must be an object")
        if set(body) == {"repo", "number"}:
            if github_client is None:
                return _error(
                    502, "no_upstream", "live fetch requested but no GitHub client configured"
                )
            try:
                thread = github_client.fetch_thread(body["repo"], body["number"])
            except Exception as exc:
                return _error(502, "upstream_fetch_failed", str(exc))
        else:
            try:
                thread = ConversationThread.from_dict(body)
            except KeyError as exc:
                return _error(
                    400, "invalid_schema", "missing field", detail=str(exc)
                )
            except (ValueError, TypeError) as exc:
                return _error(400, "invalid_schema", "bad field value", detail=str(exc))
            problems = thread.validate()
            if problems:
                return _error(400, "invalid_thread", "; ".join(problems))
        record = store.upsert_thread(thread)
        return _thread_json(record, policy)

    @app.post("/threads/{thread_id}/score")
    def score_thread(thread_id: str, strategy: str = "ltm"):
        record = store.get(thread_id)
        if record is None:
            return _error(404, "not_found", f"unknown thread {thread_id}")
        try:
            scd_strategy = ScdStrategy(strategy)
        except ValueError:
            return _error(400, "invalid_strategy", f"unknown strategy {strategy!r}")
        if not record.thread.valid_for_derailment_analysis:
            return _error(
                409,
                "unscorable",
                "thread's initiating comment is toxic; no prefix to score",
            )
        with lock_for(thread_id):
            try:
                prediction = predict(
                    record.thread,
                    scd_strategy,
                    gateway,
                    now=datetime.now(timezone.utc).replace(microsecond=0),
                )
            except ContextOverflowError as exc:
                return _error(502, "gateway_failure", str(exc), detail=f"step={exc.step}")
            except ParseFailureError as exc:
                return _error(502, "gateway_failure", str(exc), detail=f"step={exc.step}")
            except (GatewayError, ScriptExhaustedError) as exc:
                return _error(502, "gateway_failure", str(exc))
            store.add_prediction(thread_id, prediction)
        return prediction.to_dict()

    @app.get("/flagged")
    def flagged(threshold: float = 0.5):
        rows = [
            {
                "id": record.id,
                "thread_ref": record.thread.ref,
                "title": record.thread.title,
                "probability": record.latest_prediction.probability,
                "updated_at": record.updated_at.strftime("%Y-%m-%dT%H:%M:%SZ"),
                "action_band": recommend_action(
                    record.latest_prediction.probability, policy
                ).value,
            }
            for record in store.flagged(threshold)
        ]
        return {"threshold": threshold, "rows": rows}

    @app.get("/threads/{thread_id}")
    def get_thread(thread_id: str):
        record = store.get(thread_id)
        if record is None:
            return _error(404, "not_found", f"unknown thread {thread_id}")
        payload = _thread_json(record, policy)
        payload["predictions"] = [p.to_dict() for p in record.predictions]
        return payload

    @app.post("/threads/{thread_id}/disposition")
    async def post_disposition(thread_id: str, request: Request):
        record = store.get(thread_id)
        if record is None:
            return _error(404, "not_found", f"unknown thread {thread_id}")
        try:
            body = await request.json()
        except Exception:
            return _error(400, "invalid_json", "request body is not valid JSON")
        category = body.get("error_category")
        if category is not None:
            try:
                category = ErrorCategory(category)
            except ValueError:
                return _error(
                    400, "invalid_category", f"unknown error_category {category!r}"
                )
        try:
            disposition = Disposition(
                action_taken=body.get("action_taken", ""),
                error_category=category,
                note=body.get("note", ""),
                actor=body.get("actor", "unknown"),
                at=datetime.now(timezone.utc).replace(microsecond=0),
            )
        except ValueError as exc:
            return _error(400, "invalid_disposition", str(exc))
        try:
            store.add_disposition(thread_id, disposition)
        except ValueError:
            return _error(409, "no_prediction", "thread has not been scored yet")
        return disposition.to_dict()

    @app.get("/stats")
    def stats():
        threads = [record.thread for record in store.all_threads()]
        try:
            return compute_stats(threads).to_dict()
        except EmptyCorpusError:
            return _error(409, "empty_store", "no threads registered")

    if ui_dir is not None and Path(ui_dir).exists():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
