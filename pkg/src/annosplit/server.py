"""HTTP wire API over the annotation queue.

Endpoints (all JSON unless noted):
  GET  /tasks/{task_id}                 task metadata (labels, schema, instruction)
  GET  /tasks/{task_id}/queue/next      claim the next pending item (204 when drained)
  POST /tasks/{task_id}/annotations     submit {claim_token, label, annotator_id}
  GET  /tasks/{task_id}/ledger          queue counts, accrued costs, running alignment
  GET  /tasks/{task_id}/labels/export   labeled items as NDJSON
  GET  /tasks/{task_id}/pareto          point set + frontier for the dashboard

CORS is wide open: the console is served from its own origin.
"""

from __future__ import annotations

import json

from fastapi import FastAPI, HTTPException, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .model import ParetoPoint
from .errors import InvalidLabel, StaleToken
from .service import DEFAULT_LEASE_SECONDS, AnnotationQueue


class SubmitBody(BaseModel):
    claim_token: str
    label: str
    annotator_id: str = "anonymous"


def create_app(
    queue: AnnotationQueue,
    points: list[ParetoPoint] | None = None,
    frontier: list[ParetoPoint] | None = None,
) -> FastAPI:
    app = FastAPI(title="annosplit annotation service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    task_id = queue.config.task_id

    def check_task(requested: str) -> None:
        if requested != task_id:
            raise HTTPException(status_code=404, detail=f"unknown task {requested!r}")

    @app.get("/tasks/{task_id}")
    def task_info(task_id: str):
        check_task(task_id)
        cfg = queue.config
        return {
            "task_id": cfg.task_id,
            "label_set": list(cfg.label_set),
            "field_schema": list(cfg.field_schema),
            "instruction_text": cfg.instruction_text,
        }

    @app.get("/tasks/{task_id}/queue/next")
    def claim_next(
        task_id: str,
        annotator_id: str = "anonymous",
        lease_seconds: float = DEFAULT_LEASE_SECONDS,
    ):
        check_task(task_id)
        item = queue.claim(annotator_id, lease_seconds)
        if item is None:
            return Response(status_code=204)
        return {
            "instance_id": item.instance_id,
            "fields": item.fields,
            "claim_token": item.claim_token,
            "lease_seconds": item.lease_seconds,
            "lease_expires_at": item.claimed_at + item.lease_seconds,
            "escalated": item.escalated,
        }

    @app.post("/tasks/{task_id}/annotations")
    def submit(task_id: str, body: SubmitBody):
        check_task(task_id)
        try:
            instance_id = queue.submit(body.claim_token, body.label, body.annotator_id)
        except StaleToken as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except InvalidLabel as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"status": "ok", "instance_id": instance_id}

    @app.get("/tasks/{task_id}/ledger")
    def ledger(task_id: str):
        check_task(task_id)
        return queue.ledger()

    @app.get("/tasks/{task_id}/labels/export")
    def export(task_id: str):
        check_task(task_id)
        lines = "".join(
            json.dumps(row, sort_keys=True, ensure_ascii=False) + "\n"
            for row in queue.export_labels()
        )
        return Response(content=lines, media_type="application/x-ndjson")

    @app.get("/tasks/{task_id}/pareto")
    def pareto(task_id: str):
        check_task(task_id)
        if points is None:
            raise HTTPException(status_code=404, detail="no pareto analysis configured")
        return {
            "points": [p.to_dict() for p in points],
            "frontier": [p.to_dict() for p in (frontier or [])],
        }

    return app
