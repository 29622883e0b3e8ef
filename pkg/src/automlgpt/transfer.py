"""Hyperparameter transfer from similar, already-tuned datasets.

Neighbours are registry records whose card similarity to the unseen card
clears a threshold; their best configs are blended per parameter kind:
geometric mean for log-scale parameters, arithmetic mean for linear,
banker's rounding for integers, weighted vote for categoricals. Weights
are the similarities normalized to sum to 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .cards import DataCard, HyperParamConfig, HyperParamSpace, ModelCard, validate_config
from .encoder import Embedder, card_text, similarity
from .errors import IncompatibleConfigs, NoNeighbors
from .registry import Registry, TuningRecord, query_records

DEFAULT_K = 3
DEFAULT_TAU = 0.05


@dataclass(frozen=True)
class Neighbor:
    record: TuningRecord
    similarity: float
    weight: float


@dataclass(frozen=True)
class NeighborSet:
    entries: tuple[Neighbor, ...]
    k: int
    tau: float


@dataclass(frozen=True)
class Recommendation:
    config: HyperParamConfig
    source: str  # transfer | backend | default
    neighbor_summary: tuple[tuple[str, float], ...]
    rationale: str


def select_neighbors(card: DataCard, registry: Registry, model_card_name: str,
                     embedder: Embedder, k: int = DEFAULT_K,
                     tau: float = DEFAULT_TAU) -> NeighborSet:
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 0 <= tau < 1:
        raise ValueError("tau must be in [0, 1)")
    target = embedder.embed(card_text(card))
    scored = []
    for record in query_records(registry, model_card_name):
        s = similarity(target, embedder.embed(card_text(record.data_card)))
        # Zero-similarity records carry no signal even when tau == 0.
        if s >= tau and s > 0:
            scored.append((record, s))
    scored.sort(key=lambda pair: (-pair[1], pair[0].data_card.name.lower()))
    scored = scored[:k]
    if not scored:
        raise NoNeighbors(
            f"no records for {model_card_name!r} with similarity >= {tau}")
    total = sum(s for _, s in scored)
    entries = tuple(Neighbor(record=r, similarity=s, weight=s / total)
                    for r, s in scored)
    return NeighborSet(entries=entries, k=k, tau=tau)


def blend_configs(neighbors: NeighborSet, space: HyperParamSpace) -> HyperParamConfig:
    """Kind-aware weighted blend of the neighbour configs over `space`."""
    if not neighbors.entries:
        raise NoNeighbors("cannot blend an empty neighbor set")
    blended: HyperParamConfig = {}
    for name, spec in space.items():
        values = []
        for entry in neighbors.entries:
            if name not in entry.record.config:
                raise IncompatibleConfigs(
                    f"record for {entry.record.data_card.name!r} lacks "
                    f"parameter {name!r}")
            values.append(entry.record.config[name])
        weights = [entry.weight for entry in neighbors.entries]

        if spec.kind == "continuous_log":
            blended[name] = math.exp(sum(w * math.log(v)
                                         for w, v in zip(weights, values)))
        elif spec.kind == "continuous_linear":
            blended[name] = sum(w * v for w, v in zip(weights, values))
        elif spec.kind == "integer":
            mean = sum(w * v for w, v in zip(weights, values))
            value = round(mean)  # round-half-to-even: platform-stable
            blended[name] = min(max(value, spec.domain[0]), spec.domain[1])
        else:
            tallies: dict[str, float] = {}
            for w, v in zip(weights, values):
                tallies[v] = tallies.get(v, 0.0) + w
            best = max(sorted(tallies), key=lambda cat: tallies[cat])
            blended[name] = best

    violations = validate_config(blended, space)
    if violations:
        raise IncompatibleConfigs(
            "blend fell outside the space: "
            + "; ".join(f"{v.key}: {v.reason}" for v in violations))
    return blended


def recommend(card: DataCard, model: ModelCard, registry: Registry,
              embedder: Embedder, k: int = DEFAULT_K,
              tau: float = DEFAULT_TAU) -> Recommendation:
    """Transfer recommendation, falling back to the model card defaults."""
    try:
        neighbors = select_neighbors(card, registry, model.name, embedder, k, tau)
    except NoNeighbors:
        return Recommendation(
            config=model.defaults(), source="default", neighbor_summary=(),
            rationale=(f"no tuned dataset within similarity {tau} of "
                       f"{card.name!r}; using {model.name!r} defaults"))
    config = blend_configs(neighbors, model.arch_hparams)
    summary = tuple((n.record.data_card.name, n.weight) for n in neighbors.entries)
    described = ", ".join(f"{name} ({weight:.2f})" for name, weight in summary)
    return Recommendation(
        config=config, source="transfer", neighbor_summary=summary,
        rationale=f"blended best configs of {len(summary)} similar "
                  f"dataset(s): {described}")


def assign_model(card: DataCard, model_cards: list[ModelCard],
                 embedder: Embedder) -> ModelCard:
    """Pick the model card whose description best matches the data card."""
    if not model_cards:
        raise ValueError("model_cards must be non-empty")
    target = embedder.embed(card_text(card))
    scored = [
        (similarity(target, embedder.embed(f"{m.description} {m.structure}")), m)
        for m in model_cards
    ]
    scored.sort(key=lambda pair: (-pair[0], pair[1].name.lower()))
    return scored[0][1]
