"""Request/response models for the HTTP API.

Card payloads stay raw dicts here: the cards module is the single source
of truth for the card schema (strict unknown-key rejection, field paths
in errors), so pydantic only shapes the envelope.
"""

from __future__ import annotations

from typing import Any, Literal, Optional

from pydantic import BaseModel, Field

from ..composer import PromptParagraph
from ..registry import TuningRecord
from ..training_log import TrainingLog
from ..transfer import Recommendation
from ..tuner import TuneResult


class SpanModel(BaseModel):
    field_path: str
    start: int
    end: int


class PromptModel(BaseModel):
    text: str
    spans: list[SpanModel]

    @classmethod
    def from_paragraph(cls, paragraph: PromptParagraph) -> "PromptModel":
        return cls(text=paragraph.text,
                   spans=[SpanModel(field_path=s.field_path, start=s.start,
                                    end=s.end) for s in paragraph.spans])


class LogEntryModel(BaseModel):
    epoch: int
    train_loss: float
    val_loss: float
    val_metric: float


class TrainingLogModel(BaseModel):
    entries: list[LogEntryModel]

    @classmethod
    def from_log(cls, log: TrainingLog) -> "TrainingLogModel":
        return cls(entries=[LogEntryModel(epoch=e.epoch, train_loss=e.train_loss,
                                          val_loss=e.val_loss,
                                          val_metric=e.val_metric)
                            for e in log.entries])


class NeighborWeightModel(BaseModel):
    dataset: str
    weight: float


class RecommendationModel(BaseModel):
    config: dict[str, Any]
    source: str
    neighbors: list[NeighborWeightModel]
    rationale: str

    @classmethod
    def from_recommendation(cls, rec: Recommendation) -> "RecommendationModel":
        return cls(config=rec.config, source=rec.source,
                   neighbors=[NeighborWeightModel(dataset=n, weight=w)
                              for n, w in rec.neighbor_summary],
                   rationale=rec.rationale)


class TrajectoryPointModel(BaseModel):
    config: dict[str, Any]
    final_metric: float


class TuneResultModel(BaseModel):
    best_config: dict[str, Any]
    best_final_metric: float
    queries_used: int
    stop_reason: str
    trajectory: list[TrajectoryPointModel]

    @classmethod
    def from_result(cls, result: TuneResult) -> "TuneResultModel":
        return cls(best_config=result.best_config,
                   best_final_metric=result.best_final_metric,
                   queries_used=result.queries_used,
                   stop_reason=result.stop_reason,
                   trajectory=[TrajectoryPointModel(config=c, final_metric=m)
                               for c, m in result.trajectory])


class RequestModel(BaseModel):
    kind: str
    text: str


class SessionCreated(BaseModel):
    id: str
    state: str


class CardsSubmitRequest(BaseModel):
    data_card: dict[str, Any]
    model_card: dict[str, Any]


class CardsSubmitResponse(BaseModel):
    state: str
    prompt: PromptModel


class RecommendRequest(BaseModel):
    backend: Literal["mock", "http"] = "mock"
    k: int = Field(default=3, ge=1)
    tau: float = Field(default=0.05, ge=0.0, lt=1.0)
    budget: int = Field(default=40, ge=1)


class RecommendResponse(BaseModel):
    state: str
    recommendation: RecommendationModel
    predicted_log: TrainingLogModel
    tune_result: TuneResultModel


class PostRequestBody(BaseModel):
    text: str


class PostRequestResponse(BaseModel):
    state: str
    request: RequestModel
    recommendation: RecommendationModel
    predicted_log: TrainingLogModel


class HistoryItemModel(BaseModel):
    request: Optional[RequestModel] = None
    recommendation: RecommendationModel
    predicted_log: TrainingLogModel


class SessionView(BaseModel):
    id: str
    state: str
    created_at: int
    data_card: Optional[dict[str, Any]] = None
    model_card: Optional[dict[str, Any]] = None
    prompt: Optional[PromptModel] = None
    history: list[HistoryItemModel] = []


class BestMetricModel(BaseModel):
    name: str
    value: float


class RecordModel(BaseModel):
    data_card: dict[str, Any]
    model_card_name: str
    config: dict[str, Any]
    best_metric: BestMetricModel
    provenance: str
    created_at: int

    @classmethod
    def from_record(cls, record: TuningRecord) -> "RecordModel":
        from ..cards import data_card_to_obj
        return cls(data_card=data_card_to_obj(record.data_card),
                   model_card_name=record.model_card_name,
                   config=record.config,
                   best_metric=BestMetricModel(name=record.best_metric.name,
                                               value=record.best_metric.value),
                   provenance=record.provenance,
                   created_at=record.created_at)


class AddRecordRequest(BaseModel):
    data_card: dict[str, Any]
    model_card_name: str
    config: dict[str, Any]
    best_metric: BestMetricModel
    provenance: str = "manual"
    created_at: Optional[int] = None


class RegistryRecordsResponse(BaseModel):
    records: list[RecordModel]


class ErrorDetail(BaseModel):
    code: str
    message: str
    field: Optional[str] = None


class ErrorBody(BaseModel):
    error: ErrorDetail
