"""HTTP API backing the review dashboard.

Read-mostly: sessions and the review queue are exposed as JSON; the
only mutation is the review endpoint, which routes straight through the
sample store's optimistic-versioned review (the API adds transport,
never logic).  Stale versions surface as 409, schema problems as 422,
unknown ids as 404.
"""

from __future__ import annotations

import os

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import FileResponse
from fastapi.staticfiles import StaticFiles

from . import labeling
from .engine import BisectSession, SessionStore, result_to_dict
from .errors import StorageFailure
from .evaluate import NoSteps, SessionOutcome, avg_time_per_step
from .labeling import (
    InvalidTransition,
    SampleStore,
    StaleVersion,
    UnknownSample,
    _sample_to_dict,
)
from .schema import SchemaViolation


def _session_summary(session_id: str, session: BisectSession) -> dict:
    return {
        "session_id": session_id,
        "mode": session.mode,
        "target_behaviour": session.target_behaviour,
        "steps": len(session.steps),
        "result": result_to_dict(session.result),
    }


def _session_detail(session_id: str, session: BisectSession) -> dict:
    return {
        "session_id": session_id,
        "mode": session.mode,
        "target_behaviour": session.target_behaviour,
        "repo_path": session.sequence.repo_path,
        "commits": [c.value for c in session.sequence.commits],
        "known_good": session.sequence.known_good,
        "known_bad": session.sequence.known_bad,
        "result": result_to_dict(session.result),
        "steps": [
            {
                "step_number": s.step_number,
                "commit_index": s.commit_index,
                "commit": session.sequence.commits[s.commit_index].value,
                "elapsed": s.elapsed,
                "prompt_hash": s.prompt_hash,
                "verdict": {
                    "mark": s.verdict.mark,
                    "confidence": s.verdict.confidence,
                    "reason": s.verdict.reason,
                    "latency": s.verdict.latency,
                    "samples": [r.to_document() for r in s.verdict.samples],
                },
            }
            for s in session.steps
        ],
    }


def create_app(
    samples_dir: str = "samples",
    sessions_dir: str = "sessions",
    frontend_dir: str = "",
) -> FastAPI:
    app = FastAPI(title="sembisect review service")
    samples = SampleStore(samples_dir)
    sessions = SessionStore(sessions_dir)

    @app.get("/api/sessions")
    def list_sessions():
        out = []
        for session_id in sessions.list_ids():
            out.append(_session_summary(session_id, sessions.load(session_id)))
        return out

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str):
        try:
            session = sessions.load(session_id)
        except StorageFailure:
            raise HTTPException(status_code=404, detail=f"no session {session_id}")
        return _session_detail(session_id, session)

    @app.get("/api/queue")
    def get_queue():
        return [_sample_to_dict(s) for s in samples.pending()]

    @app.post("/api/samples/{sample_id}/review")
    async def post_review(sample_id: str, request: Request):
        body = await request.json()
        action = body.get("action")
        version = body.get("version")
        reviewer = body.get("reviewer", "anonymous")
        corrected = body.get("corrected_response")
        if action not in (
            labeling.ACTION_ACCEPT,
            labeling.ACTION_CORRECT,
            labeling.ACTION_DISCARD,
        ):
            raise HTTPException(status_code=422, detail=f"unknown action {action!r}")
        if not isinstance(version, int):
            raise HTTPException(status_code=422, detail="version must be an integer")
        try:
            updated = samples.review(sample_id, action, reviewer, version, corrected)
        except UnknownSample:
            raise HTTPException(status_code=404, detail=f"no sample {sample_id}")
        except StaleVersion as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except InvalidTransition as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except SchemaViolation as exc:
            raise HTTPException(
                status_code=422,
                detail={"field": exc.field, "reason": exc.reason},
            )
        return _sample_to_dict(updated)

    @app.get("/api/metrics")
    def get_metrics():
        state_counts: dict[str, int] = {}
        for sample in samples.all_samples():
            state_counts[sample.review_state] = (
                state_counts.get(sample.review_state, 0) + 1
            )
        session_outcomes = []
        results = {"localized": 0, "range": 0, "aborted": 0}
        for session_id in sessions.list_ids():
            session = sessions.load(session_id)
            results[result_to_dict(session.result)["kind"]] += 1
            session_outcomes.append(
                SessionOutcome(
                    session_id=session_id,
                    category="",
                    step_verdict_correct=tuple(True for _ in session.steps),
                    wall_time=sum(s.elapsed for s in session.steps),
                    steps=len(session.steps),
                )
            )
        try:
            avg = avg_time_per_step(session_outcomes)
        except NoSteps:
            avg = None
        return {
            "samples_by_state": state_counts,
            "sessions": len(session_outcomes),
            "session_results": results,
            "avg_time_per_step": avg,
        }

    if frontend_dir and os.path.isdir(frontend_dir):
        index_path = os.path.join(frontend_dir, "index.html")

        @app.get("/")
        def index():
            return FileResponse(index_path)

        app.mount("/", StaticFiles(directory=frontend_dir, html=True), name="ui")

    return app
