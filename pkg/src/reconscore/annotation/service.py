"""HTTP endpoints for the double-blind ranking protocol.

JSON over HTTP: create-session, next-task, submit-ranking, adjudicate,
export; image bytes served by checksum path; static assets for the browser
client. Errors come back as {"error": {"code", "message"}} with status 400.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from ..backends.blobstore import BlobStore
from .store import AnnotationError, AnnotationStore


class CreateSessionBody(BaseModel):
    annotator_id: str
    shuffle_seed: int = 0


class RankingBody(BaseModel):
    ranking: list[int]


def create_app(store: AnnotationStore, blobs: BlobStore,
               static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="preference-annotation")

    @app.exception_handler(AnnotationError)
    async def _annotation_error(request: Request, exc: AnnotationError):
        return JSONResponse(status_code=400, content={
            "error": {"code": exc.code, "message": str(exc)}})

    @app.post("/api/sessions")
    def create_session(body: CreateSessionBody):
        session = store.create_session(body.annotator_id, body.shuffle_seed)
        return {
            "session_id": session.session_id,
            "task_count": len(session.task_order),
        }

    @app.get("/api/sessions/{session_id}/next")
    def next_task(session_id: str):
        view = store.next_task(session_id)
        if view is None:
            session = store.get_session(session_id)
            return {"done": True,
                    "progress": {"done": len(session.completed),
                                 "total": len(session.task_order)}}
        view = dict(view)
        view["image_url"] = f"/images/{view.pop('image_checksum')}"
        view["done"] = False
        return view

    @app.post("/api/sessions/{session_id}/tasks/{task_id}/ranking")
    def submit_ranking(session_id: str, task_id: str, body: RankingBody):
        return store.submit_ranking(session_id, task_id, body.ranking)

    @app.post("/api/sessions/{session_id}/tasks/{task_id}/adjudicate")
    def adjudicate(session_id: str, task_id: str, body: RankingBody):
        return store.adjudicate(session_id, task_id, body.ranking)

    @app.get("/api/export")
    def export():
        records = store.export_preferences()
        text = "\n".join(json.dumps(r, sort_keys=True, ensure_ascii=False)
                         for r in records) + "\n"
        return PlainTextResponse(text, media_type="application/jsonl")

    @app.get("/images/{checksum}")
    def image(checksum: str):
        if not blobs.has(checksum):
            return JSONResponse(status_code=404, content={
                "error": {"code": "unknown-image", "message": checksum}})
        return Response(content=blobs.get(checksum), media_type="image/png")

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True),
                  name="ui")
    return app
