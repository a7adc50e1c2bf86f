"""HTTP API serving the corpus, model, curation actions and statistics.

The service is read-mostly: GET endpoints render immutable snapshots of the
pipeline artifacts, while the two writes (term moves, rating submissions)
are serialized through per-resource locks.  A term move mutates a deep copy
of the model, persists it, and only then swaps the reference, so a failed
request leaves both memory and disk untouched.  Every response carries the
current model version in the ``X-SDM-Version`` header.

Paintings come in two views: ``baseline`` exposes only the museum fields,
``sdm`` additionally attaches the effective subjects and terms, which is
the comparison the evaluation questionnaire is built around.
"""

from __future__ import annotations

import json
import random
import threading
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import stats
from .config import ProjectConfig
from .corpus import PaintingRecord, ingest_paintings
from .pipeline import ARTIFACTS, build_model
from .taxonomy import UNMAPPED_KEY, AuditEntry, SdmModel

AUDIT_FILE = "audit.jsonl"


class ApiError(Exception):
    """Structured error surfaced as the JSON body of every non-2xx response."""

    def __init__(self, code: str, message: str, http_status: int = 400):
        super().__init__(message)
        self.code = code
        self.message = message
        self.http_status = http_status

    def body(self) -> dict:
        return {"code": self.code, "message": self.message,
                "http_status": self.http_status}


class MoveRequest(BaseModel):
    term: str
    to_subject: str
    actor: str


class RatingRequest(BaseModel):
    rater: str
    question: str
    condition: str
    score: int


class ServiceState:
    """Everything the endpoints read, plus the single-writer locks."""

    def __init__(self, config: ProjectConfig):
        self.config = config
        data_dir = Path(config.data_dir)
        self.model_path = data_dir / ARTIFACTS["model"]
        self.audit_path = data_dir / AUDIT_FILE
        self.ratings_path = Path(config.ratings_path)
        self.codings_path = Path(config.codings) if config.codings else None
        if self.model_path.exists():
            self.model = SdmModel.load(self.model_path)
        else:
            # Fall back to assembling from stage artifacts.
            self.model = build_model(config)
        if self.audit_path.exists():
            # Replay the persisted log so audit counts survive restarts.
            with open(self.audit_path, encoding="utf-8") as handle:
                for line in handle:
                    if line.strip():
                        self.model.audit.append(AuditEntry(**json.loads(line)))
        self.paintings = ingest_paintings(data_dir / ARTIFACTS["paintings"])
        if config.sample and config.sample < len(self.paintings):
            rng = random.Random(config.seed)
            chosen = set(rng.sample(range(len(self.paintings)), config.sample))
            self.paintings = [p for i, p in enumerate(self.paintings)
                              if i in chosen]
        self.paintings_by_id = {p.id: p for p in self.paintings}
        self.clusters_path = data_dir / ARTIFACTS["clusters"]
        self.model_lock = threading.Lock()
        self.ratings_lock = threading.Lock()

    # -- painting views -----------------------------------------------------

    def painting_terms(self, painting_id: str) -> list[str]:
        return sorted(
            term.normalized for term in self.model.terms.values()
            if painting_id in term.sources
        )

    def painting_view(self, record: PaintingRecord, view: str) -> dict:
        body = {
            "id": record.id,
            "title": record.title,
            "image_ref": record.image_ref,
            "description": record.description,
            "keywords": list(record.keywords),
            "era": record.era,
        }
        if view != "sdm":
            return body
        subjects: dict[str, list[str]] = {}
        unmapped: list[str] = []
        for norm in self.painting_terms(record.id):
            try:
                subject = self.model.effective_subject(norm)
            except Exception:
                continue  # term absent from clustering (filtered document)
            if subject is None:
                unmapped.append(norm)
            else:
                subjects.setdefault(subject, []).append(norm)
        body["subjects"] = [
            {
                "subject_id": subject_id,
                "label": self.model.taxonomy.node(subject_id).label,
                "path": self.model.taxonomy.path_labels(subject_id),
                "element_kind": self.model.taxonomy.element_kind_of(subject_id),
                "terms": terms,
            }
            for subject_id, terms in sorted(subjects.items())
        ]
        body["unmapped"] = unmapped
        return body


def _check_view(view: str) -> str:
    if view not in ("sdm", "baseline"):
        raise ApiError("bad_view", "view must be 'sdm' or 'baseline'", 422)
    return view


def create_app(config: ProjectConfig) -> FastAPI:
    state = ServiceState(config)
    app = FastAPI(title="sdmkit service", version="0.1.0")
    app.state.sdm = state

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.http_status, content=exc.body())

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(request: Request, exc: RequestValidationError):
        error = ApiError("validation_error", str(exc.errors()[:1]), 422)
        return JSONResponse(status_code=422, content=error.body())

    @app.middleware("http")
    async def add_version_header(request: Request, call_next):
        response = await call_next(request)
        response.headers["X-SDM-Version"] = str(state.model.version)
        return response

    @app.get("/api/paintings")
    def list_paintings(offset: int = 0, limit: int = 20, view: str = "baseline"):
        _check_view(view)
        if offset < 0 or limit < 1:
            raise ApiError("bad_range", "offset must be >= 0 and limit >= 1", 422)
        window = state.paintings[offset:offset + limit]
        return {
            "total": len(state.paintings),
            "offset": offset,
            "limit": limit,
            "view": view,
            "items": [state.painting_view(p, view) for p in window],
        }

    @app.get("/api/paintings/{painting_id}")
    def get_painting(painting_id: str, view: str = "baseline"):
        _check_view(view)
        record = state.paintings_by_id.get(painting_id)
        if record is None:
            raise ApiError("not_found", f"unknown painting {painting_id!r}", 404)
        return state.painting_view(record, view)

    @app.get("/api/taxonomy")
    def get_taxonomy():
        return {
            "version": state.model.version,
            "nodes": state.model.taxonomy.to_dicts(),
        }

    @app.get("/api/clusters")
    def get_clusters():
        return {
            "clusters": [
                {"id": c.id, "members": list(c.members)}
                for c in state.model.clusters
            ],
        }

    @app.get("/api/mappings")
    def get_mappings():
        return {
            "mappings": [
                {
                    "cluster_id": m.cluster_id,
                    "subject_id": m.subject_id,
                    "score": m.score,
                    "provenance": m.provenance,
                    "term_overrides": dict(sorted(m.term_overrides.items())),
                }
                for m in sorted(state.model.mappings.values(),
                                key=lambda m: m.cluster_id)
            ],
        }

    @app.get("/api/audit")
    def get_audit():
        return {
            "length": len(state.model.audit),
            "entries": [entry.to_dict() for entry in state.model.audit],
        }

    @app.post("/api/curation/move")
    def move_term(body: MoveRequest):
        with state.model_lock:
            draft = state.model.snapshot()
            try:
                entry = draft.move_term(body.term, body.to_subject, body.actor)
            except Exception as exc:
                raise ApiError("invalid_move", str(exc), 422) from exc
            draft.export(state.model_path)
            with open(state.audit_path, "a", encoding="utf-8") as handle:
                handle.write(json.dumps(entry.to_dict(), ensure_ascii=False,
                                        sort_keys=True) + "\n")
            state.model = draft
        return {
            "ok": True,
            "term": body.term,
            "subject_id": body.to_subject,
            "version": state.model.version,
            "audit_length": len(state.model.audit),
        }

    @app.post("/api/ratings", status_code=201)
    def post_rating(body: RatingRequest):
        try:
            response = stats.LikertResponse(
                rater=body.rater, question=body.question,
                condition=body.condition, score=body.score,
            )
        except stats.StatsError as exc:
            raise ApiError("invalid_rating", str(exc), 422) from exc
        with state.ratings_lock:
            state.ratings_path.parent.mkdir(parents=True, exist_ok=True)
            stats.append_rating(state.ratings_path, response)
            count = len(stats.load_ratings(state.ratings_path))
        return {"ok": True, "count": count}

    @app.get("/api/stats/ratings")
    def get_rating_stats(condition: str | None = None):
        if condition is not None and condition not in stats.LIKERT_CONDITIONS:
            raise ApiError("bad_condition",
                           f"condition must be one of {stats.LIKERT_CONDITIONS}", 422)
        with state.ratings_lock:
            if state.ratings_path.exists():
                responses = stats.load_ratings(state.ratings_path)
            else:
                responses = []
        rows = stats.aggregate_likert(responses, condition=condition)
        return {
            "mu0": stats.LIKERT_MIDPOINT,
            "alternative": stats.GREATER,
            "n_total": len(responses),
            "rows": [
                {
                    "question": r.question,
                    "n": r.n,
                    "sufficient": r.sufficient,
                    "mean": r.mean,
                    "sd": r.sd,
                    "t": r.t,
                    "df": r.df,
                    "p": r.p,
                    "stars": r.stars,
                }
                for r in rows
            ],
        }

    @app.get("/api/stats/agreement")
    def get_agreement():
        if state.codings_path is None or not state.codings_path.exists():
            return {"available": False,
                    "reason": "no codings file configured or present"}
        matrix = stats.CodingMatrix.from_csv(state.codings_path)
        pairwise = []
        for i, coder_a in enumerate(matrix.coders):
            for coder_b in matrix.coders[i + 1:]:
                pairwise.append({
                    "coder_a": coder_a,
                    "coder_b": coder_b,
                    "kappa": stats.cohen_kappa(matrix.column(coder_a),
                                               matrix.column(coder_b)),
                })
        return {
            "available": True,
            "n_items": len(matrix.items),
            "n_coders": len(matrix.coders),
            "fleiss_kappa": stats.fleiss_kappa(matrix),
            "pairwise": pairwise,
        }

    @app.get("/api/unmapped")
    def get_unmapped():
        return {"terms": state.model.subject_terms().get(UNMAPPED_KEY, [])}

    frontend = config.frontend
    if frontend is not None and Path(frontend).is_dir():
        app.mount("/", StaticFiles(directory=frontend, html=True), name="ui")

    return app


def serve(config: ProjectConfig, host: str = "127.0.0.1") -> None:
    """Run the service until interrupted; fails fast if the port is taken."""
    import uvicorn

    uvicorn.run(create_app(config), host=host, port=config.port, log_level="info")
