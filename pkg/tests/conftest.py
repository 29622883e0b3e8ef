import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from automlgpt.cards import parse_data_card, parse_model_card  # noqa: E402
from automlgpt.registry import (  # noqa: E402
    BestMetric,
    Registry,
    TuningRecord,
    add_record,
)

FIXTURES = Path(__file__).parent.parent / "fixtures"


def load_data_card(name: str):
    return parse_data_card((FIXTURES / "cards" / f"{name}.json").read_bytes())


def load_model_card(name: str):
    return parse_model_card((FIXTURES / "cards" / f"{name}.json").read_bytes())


def golden_prompt(name: str) -> str:
    return (FIXTURES / "prompts" / f"{name}.txt").read_text(encoding="utf-8")


@pytest.fixture
def coco_cards():
    return load_data_card("coco"), load_model_card("detector")


@pytest.fixture
def unseen_registry():
    """Datasets A and B tuned on vit-base: the two-neighbor transfer fixture."""
    vit = load_model_card("vit_base")
    registry = Registry(model_cards={vit.name: vit})
    registry = add_record(registry, TuningRecord(
        data_card=load_data_card("dataset_a"), model_card_name="vit-base",
        config={"learning_rate": 1e-4, "epochs": 90},
        best_metric=BestMetric("accuracy", 0.93),
        provenance="grid_search", created_at=1700000000))
    registry = add_record(registry, TuningRecord(
        data_card=load_data_card("dataset_b"), model_card_name="vit-base",
        config={"learning_rate": 1e-5, "epochs": 40},
        best_metric=BestMetric("accuracy", 0.91),
        provenance="grid_search", created_at=1700000001))
    return registry
