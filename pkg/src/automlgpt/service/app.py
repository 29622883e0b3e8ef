"""HTTP API over the card-to-recommendation pipeline.

Errors follow one envelope: {"error": {"code", "message", "field"?}}
with 400 for schema problems, 404 unknown session, 409 wrong state or
busy session, 422 when constraints filter out every candidate, and 502
for backend failures.
"""

from __future__ import annotations

import threading
import time
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .. import transfer, tuner
from ..cards import (
    CARD_SCHEMA,
    canon_text,
    data_card_from_obj,
    data_card_to_obj,
    model_card_from_obj,
    model_card_to_obj,
    validate_config,
)
from ..composer import UserRequest, compose_followup, compose_prompt
from ..constraints import looks_like_constraint, parse_constraint
from ..encoder import HashEmbedder
from ..errors import (
    AllCandidatesFiltered,
    AutoMlError,
    BackendError,
    BadConstraint,
    CardError,
    CorruptRegistry,
    InvalidRecord,
    IoFailure,
    RegressionRejected,
    SchemaViolation,
    SessionBusy,
    UnknownModelCard,
    UnknownSession,
    WrongState,
)
from ..oracle import HttpBackend, MockBackend, parse_response
from ..registry import (
    BestMetric,
    Registry,
    TuningRecord,
    add_record,
    load_registry,
    save_registry,
)
from .schemas import (
    AddRecordRequest,
    CardsSubmitRequest,
    CardsSubmitResponse,
    HistoryItemModel,
    PostRequestBody,
    PostRequestResponse,
    PromptModel,
    RecommendationModel,
    RecommendRequest,
    RecommendResponse,
    RecordModel,
    RegistryRecordsResponse,
    RequestModel,
    SessionCreated,
    SessionView,
    TrainingLogModel,
    TuneResultModel,
)
from .sessions import (
    STATE_CARDS_SET,
    STATE_EMPTY,
    STATE_RECOMMENDED,
    HistoryEntry,
    SessionStore,
    require_state,
)

_STATUS_BY_ERROR = (
    (UnknownSession, 404),
    ((WrongState, SessionBusy, RegressionRejected), 409),
    (AllCandidatesFiltered, 422),
    (BackendError, 502),
    ((IoFailure, CorruptRegistry), 500),
    ((CardError, BadConstraint, InvalidRecord, UnknownModelCard), 400),
)


def _status_for(error: AutoMlError) -> int:
    for classes, status in _STATUS_BY_ERROR:
        if isinstance(error, classes):
            return status
    return 400


def create_app(registry_path: str | Path | None = None,
               default_backend: str = "mock",
               static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="automlgpt", version="0.1.0")
    app.state.registry_path = Path(registry_path) if registry_path else None
    app.state.registry = (load_registry(app.state.registry_path)
                          if app.state.registry_path else Registry())
    app.state.registry_lock = threading.Lock()
    app.state.sessions = SessionStore()
    app.state.default_backend = default_backend
    app.state.embedder = HashEmbedder()

    @app.exception_handler(AutoMlError)
    async def handle_domain_error(_: Request, error: AutoMlError):
        detail = {"code": error.code, "message": str(error)}
        if getattr(error, "field", None):
            detail["field"] = error.field
        return JSONResponse(status_code=_status_for(error),
                            content={"error": detail})

    def make_backend(choice: str):
        if choice == "http":
            return HttpBackend()
        return MockBackend()

    def predicted_log_for(session, backend, config):
        prompt = compose_prompt(session.data_card,
                                session.model_card.with_defaults(config), ())
        return parse_response(backend.complete(prompt)).predicted_log

    def finish_tuning(session, backend, seed, result):
        log = predicted_log_for(session, backend, result.best_config)
        source = seed.source if result.best_config == seed.config else "backend"
        recommendation = transfer.Recommendation(
            config=result.best_config, source=source,
            neighbor_summary=seed.neighbor_summary,
            rationale=(seed.rationale if result.best_config == seed.config else
                       f"{seed.rationale}; refined by {result.queries_used} "
                       f"predicted-log evaluations"))
        return recommendation, log

    # --- sessions ---------------------------------------------------------

    @app.post("/v1/sessions", response_model=SessionCreated, status_code=201)
    def create_session():
        session = app.state.sessions.create()
        return SessionCreated(id=session.id, state=session.state)

    @app.get("/v1/sessions/{session_id}", response_model=SessionView,
             response_model_exclude_none=True)
    def get_session(session_id: str):
        session = app.state.sessions.get(session_id)
        view = SessionView(id=session.id, state=session.state,
                           created_at=session.created_at)
        if session.data_card is not None:
            view.data_card = data_card_to_obj(session.data_card)
            view.model_card = model_card_to_obj(session.model_card)
            view.prompt = PromptModel.from_paragraph(session.prompt)
        view.history = [
            HistoryItemModel(
                request=(RequestModel(kind=entry.request.kind,
                                      text=entry.request.text())
                         if entry.request else None),
                recommendation=RecommendationModel.from_recommendation(
                    entry.recommendation),
                predicted_log=TrainingLogModel.from_log(entry.predicted_log))
            for entry in session.history
        ]
        return view

    @app.post("/v1/sessions/{session_id}/cards",
              response_model=CardsSubmitResponse)
    def submit_cards(session_id: str, body: CardsSubmitRequest):
        with app.state.sessions.exclusive(session_id) as session:
            require_state(session, STATE_EMPTY, STATE_CARDS_SET)
            session.data_card = data_card_from_obj(body.data_card)
            session.model_card = model_card_from_obj(body.model_card)
            session.prompt = compose_prompt(session.data_card, session.model_card)
            session.state = STATE_CARDS_SET
            return CardsSubmitResponse(
                state=session.state,
                prompt=PromptModel.from_paragraph(session.prompt))

    @app.post("/v1/sessions/{session_id}/recommend",
              response_model=RecommendResponse)
    def recommend_endpoint(session_id: str, body: RecommendRequest | None = None):
        body = body or RecommendRequest()
        with app.state.sessions.exclusive(session_id) as session:
            require_state(session, STATE_CARDS_SET, STATE_RECOMMENDED)
            backend = make_backend(body.backend)
            seed = transfer.recommend(session.data_card, session.model_card,
                                      app.state.registry, app.state.embedder,
                                      k=body.k, tau=body.tau)
            result = tuner.tune(seed, session.data_card, session.model_card,
                                backend, session.constraints, body.budget)
            recommendation, log = finish_tuning(session, backend, seed, result)
            session.history.append(HistoryEntry(
                request=None, recommendation=recommendation, predicted_log=log,
                tune_result=result))
            session.state = STATE_RECOMMENDED
            return RecommendResponse(
                state=session.state,
                recommendation=RecommendationModel.from_recommendation(
                    recommendation),
                predicted_log=TrainingLogModel.from_log(log),
                tune_result=TuneResultModel.from_result(result))

    @app.post("/v1/sessions/{session_id}/requests",
              response_model=PostRequestResponse)
    def post_request(session_id: str, body: PostRequestBody):
        text = canon_text(body.text)
        if not text:
            raise SchemaViolation("request text must be non-empty", field="text")
        with app.state.sessions.exclusive(session_id) as session:
            require_state(session, STATE_RECOMMENDED)
            if looks_like_constraint(text):
                request = UserRequest(kind="constraint",
                                      payload=parse_constraint(text))
            else:
                request = UserRequest(kind="free_text", payload=text)

            backend = make_backend(app.state.default_backend)
            previous = session.current
            followup = compose_followup(session.prompt, previous.predicted_log,
                                        request)
            suggestion = parse_response(backend.complete(followup)).hyperparameters
            space = session.model_card.arch_hparams
            config = {k: v for k, v in suggestion.items() if k in space}
            if not config or validate_config(config, space):
                config = dict(previous.recommendation.config)
            seed = transfer.Recommendation(
                config=config, source="backend",
                neighbor_summary=previous.recommendation.neighbor_summary,
                rationale="backend follow-up suggestion")

            constraints = list(session.constraints)
            if request.kind == "constraint":
                constraints.append(request.payload)
            result = tuner.tune(seed, session.data_card, session.model_card,
                                backend, constraints)
            recommendation, log = finish_tuning(session, backend, seed, result)
            session.constraints = constraints
            session.history.append(HistoryEntry(
                request=request, recommendation=recommendation,
                predicted_log=log, tune_result=result))
            return PostRequestResponse(
                state=session.state,
                request=RequestModel(kind=request.kind, text=request.text()),
                recommendation=RecommendationModel.from_recommendation(
                    recommendation),
                predicted_log=TrainingLogModel.from_log(log))

    # --- registry ---------------------------------------------------------

    @app.get("/v1/registry/records", response_model=RegistryRecordsResponse)
    def list_records():
        records = sorted(app.state.registry.records,
                         key=lambda r: (r.data_card.name.lower(),
                                        r.model_card_name.lower()))
        return RegistryRecordsResponse(
            records=[RecordModel.from_record(r) for r in records])

    @app.post("/v1/registry/records", response_model=RecordModel,
              status_code=201)
    def post_record(body: AddRecordRequest):
        record = TuningRecord(
            data_card=data_card_from_obj(body.data_card),
            model_card_name=body.model_card_name,
            config=body.config,
            best_metric=BestMetric(name=body.best_metric.name,
                                   value=body.best_metric.value),
            provenance=body.provenance,
            created_at=(body.created_at if body.created_at is not None
                        else int(time.time())))
        with app.state.registry_lock:
            app.state.registry = add_record(app.state.registry, record)
            if app.state.registry_path:
                save_registry(app.state.registry, app.state.registry_path)
        return RecordModel.from_record(record)

    # --- misc --------------------------------------------------------------

    @app.get("/v1/health")
    def health():
        return {"status": "ok"}

    @app.get("/v1/schema/cards")
    def card_schema():
        return CARD_SCHEMA

    static = Path(static_dir) if static_dir else None
    if static and static.is_dir():
        app.mount("/", StaticFiles(directory=static, html=True), name="console")

    return app
