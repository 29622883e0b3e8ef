"""Persistent corpus of tuned (dataset, model, config, metric) records.

At most one record is kept per (dataset name, model card name) pair, and
re-insertion must match or improve the stored metric, so the registry
always holds each dataset's best known configuration. On disk a registry
is a directory with `registry.json` plus a `registry.sha256` integrity
file; saves are write-temp-then-rename.

Single-writer, multi-reader: callers serialize mutations; a loaded
snapshot is freely shareable.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .cards import (
    DataCard,
    HyperParamConfig,
    ModelCard,
    data_card_from_obj,
    data_card_to_obj,
    model_card_from_obj,
    model_card_to_obj,
    validate_config,
)
from .errors import (
    CardError,
    CorruptRegistry,
    InvalidRecord,
    IoFailure,
    RegressionRejected,
    UnknownModelCard,
)

PROVENANCES = ("grid_search", "manual", "backend")

REGISTRY_FILE = "registry.json"
CHECKSUM_FILE = "registry.sha256"


@dataclass(frozen=True)
class BestMetric:
    name: str
    value: float


@dataclass(frozen=True)
class TuningRecord:
    data_card: DataCard
    model_card_name: str
    config: HyperParamConfig
    best_metric: BestMetric
    provenance: str
    created_at: int

    def key(self) -> tuple[str, str]:
        return (self.data_card.name.lower(), self.model_card_name.lower())


@dataclass(frozen=True)
class Registry:
    records: tuple[TuningRecord, ...] = ()
    model_cards: dict[str, ModelCard] = field(default_factory=dict)

    def model_card(self, name: str) -> ModelCard | None:
        for card_name, card in self.model_cards.items():
            if card_name.lower() == name.lower():
                return card
        return None


def _check_record(registry: Registry, record: TuningRecord) -> None:
    if record.provenance not in PROVENANCES:
        raise InvalidRecord(f"unknown provenance {record.provenance!r}")
    if record.best_metric.name not in record.data_card.eval_metrics:
        raise InvalidRecord(
            f"best_metric {record.best_metric.name!r} is not one of the data "
            f"card's eval_metrics {list(record.data_card.eval_metrics)}")
    card = registry.model_card(record.model_card_name)
    if card is None:
        raise UnknownModelCard(
            f"registry has no model card named {record.model_card_name!r}")
    violations = validate_config(record.config, card.arch_hparams)
    if violations:
        details = "; ".join(f"{v.key}: {v.reason}" for v in violations)
        raise InvalidRecord(f"config does not validate: {details}")


def add_record(registry: Registry, record: TuningRecord) -> Registry:
    """Insert or replace; replacement must not regress the stored metric."""
    _check_record(registry, record)
    existing = [r for r in registry.records if r.key() == record.key()]
    if existing and record.best_metric.value < existing[0].best_metric.value:
        raise RegressionRejected(
            f"stored metric {existing[0].best_metric.value} beats "
            f"new metric {record.best_metric.value} for {record.key()}")
    kept = tuple(r for r in registry.records if r.key() != record.key())
    return Registry(records=kept + (record,), model_cards=dict(registry.model_cards))


def query_records(registry: Registry, model_card_name: str) -> list[TuningRecord]:
    matches = [r for r in registry.records
               if r.model_card_name.lower() == model_card_name.lower()]
    return sorted(matches, key=lambda r: r.data_card.name.lower())


# --- persistence -----------------------------------------------------------------

def _record_to_obj(record: TuningRecord) -> dict[str, Any]:
    return {
        "data_card": data_card_to_obj(record.data_card),
        "model_card_name": record.model_card_name,
        "config": record.config,
        "best_metric": {"name": record.best_metric.name,
                        "value": record.best_metric.value},
        "provenance": record.provenance,
        "created_at": record.created_at,
    }


def _record_from_obj(obj: dict[str, Any]) -> TuningRecord:
    metric = obj["best_metric"]
    return TuningRecord(
        data_card=data_card_from_obj(obj["data_card"]),
        model_card_name=obj["model_card_name"],
        config=dict(obj["config"]),
        best_metric=BestMetric(name=metric["name"], value=float(metric["value"])),
        provenance=obj["provenance"],
        created_at=int(obj["created_at"]),
    )


def save_registry(registry: Registry, path: str | Path) -> None:
    directory = Path(path)
    try:
        directory.mkdir(parents=True, exist_ok=True)
        payload = json.dumps({
            "records": [_record_to_obj(r) for r in registry.records],
            "model_cards": {name: model_card_to_obj(card)
                            for name, card in registry.model_cards.items()},
        }, indent=2).encode("utf-8")
        digest = hashlib.sha256(payload).hexdigest()
        _atomic_write(directory / REGISTRY_FILE, payload)
        _atomic_write(directory / CHECKSUM_FILE, (digest + "\n").encode("ascii"))
    except OSError as exc:
        raise IoFailure(f"cannot save registry to {directory}: {exc}") from exc


def _atomic_write(target: Path, payload: bytes) -> None:
    fd, tmp_name = tempfile.mkstemp(dir=target.parent, prefix=target.name + ".")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(payload)
        os.replace(tmp_name, target)
    except OSError:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def load_registry(path: str | Path) -> Registry:
    directory = Path(path)
    registry_path = directory / REGISTRY_FILE
    if not registry_path.exists():
        return Registry()
    try:
        payload = registry_path.read_bytes()
        checksum = (directory / CHECKSUM_FILE).read_text(encoding="ascii").strip()
    except OSError as exc:
        raise CorruptRegistry(f"registry at {directory} lacks a readable "
                              f"checksum file: {exc}") from exc
    if hashlib.sha256(payload).hexdigest() != checksum:
        raise CorruptRegistry(f"checksum mismatch for {registry_path}")
    try:
        obj = json.loads(payload.decode("utf-8"))
        model_cards = {name: model_card_from_obj(card)
                       for name, card in obj["model_cards"].items()}
        records = tuple(_record_from_obj(r) for r in obj["records"])
    except (KeyError, TypeError, ValueError, CardError) as exc:
        raise CorruptRegistry(f"registry schema invalid: {exc}") from exc
    keys = [r.key() for r in records]
    if len(set(keys)) != len(keys):
        raise CorruptRegistry("registry holds duplicate (dataset, model) records")
    return Registry(records=records, model_cards=model_cards)
