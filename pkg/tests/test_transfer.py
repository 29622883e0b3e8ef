import math
import random

import pytest

from automlgpt.cards import DataCard, HyperParamSpec, ModelCard
from automlgpt.encoder import DIM, Embedding, HashEmbedder, card_text
from automlgpt.errors import IncompatibleConfigs, NoNeighbors
from automlgpt.registry import BestMetric, Registry, TuningRecord, add_record
from automlgpt.transfer import (
    Neighbor,
    NeighborSet,
    assign_model,
    blend_configs,
    recommend,
    select_neighbors,
)
from conftest import load_data_card, load_model_card


class PlantedEmbedder:
    """Returns prescribed unit vectors per text: exact similarity control."""

    id = "planted"

    def __init__(self, plan: dict[str, tuple[float, ...]]):
        self.plan = plan

    def embed(self, text: str) -> Embedding:
        values = list(self.plan.get(text, ()))
        if not values:
            return Embedding((0.0,) * DIM)
        values += [0.0] * (DIM - len(values))
        return Embedding(tuple(values))


def planted_for(similarities: dict[str, float], target_text: str,
                texts: dict[str, str]) -> PlantedEmbedder:
    """Unit vectors with cos(target, card_i) exactly similarities[i]."""
    plan = {target_text: (1.0,) + (0.0,) * 3}
    for axis, (name, s) in enumerate(similarities.items(), start=1):
        vec = [0.0] * 4
        vec[0] = s
        vec[axis] = math.sqrt(1 - s * s)
        plan[texts[name]] = tuple(vec)
    return PlantedEmbedder(plan)


@pytest.fixture
def three_dataset_registry(unseen_registry):
    """A, B plus a low-similarity C on the same model card."""
    c_card = DataCard(name="C", input_type="text",
                      label_space="assorted prose",
                      task_description="something else entirely",
                      eval_metrics=("accuracy",))
    return add_record(unseen_registry, TuningRecord(
        data_card=c_card, model_card_name="vit-base",
        config={"learning_rate": 1e-2, "epochs": 10},
        best_metric=BestMetric("accuracy", 0.5),
        provenance="manual", created_at=0))


class TestSelectNeighbors:
    def test_paper_scenario_filters_and_normalizes(self, three_dataset_registry):
        new_card = load_data_card("new")
        texts = {r.data_card.name: card_text(r.data_card)
                 for r in three_dataset_registry.records}
        embedder = planted_for({"A": 0.6, "B": 0.4, "C": 0.02},
                               card_text(new_card), texts)
        neighbors = select_neighbors(new_card, three_dataset_registry,
                                     "vit-base", embedder, k=3, tau=0.05)
        assert [n.record.data_card.name for n in neighbors.entries] == ["A", "B"]
        weights = [n.weight for n in neighbors.entries]
        assert weights[0] == pytest.approx(0.6, abs=1e-12)
        assert weights[1] == pytest.approx(0.4, abs=1e-12)

    def test_singleton_weight_is_one(self, unseen_registry):
        new_card = load_data_card("new")
        texts = {r.data_card.name: card_text(r.data_card)
                 for r in unseen_registry.records}
        embedder = planted_for({"A": 0.7, "B": 0.01}, card_text(new_card), texts)
        neighbors = select_neighbors(new_card, unseen_registry, "vit-base",
                                     embedder, k=3, tau=0.05)
        assert len(neighbors.entries) == 1
        assert neighbors.entries[0].weight == 1.0

    def test_all_below_tau_raises(self, unseen_registry):
        new_card = load_data_card("new")
        embedder = PlantedEmbedder({})  # everything embeds to zero
        with pytest.raises(NoNeighbors):
            select_neighbors(new_card, unseen_registry, "vit-base", embedder)

    def test_weights_sum_to_one(self, three_dataset_registry):
        new_card = load_data_card("new")
        neighbors = select_neighbors(new_card, three_dataset_registry,
                                     "vit-base", HashEmbedder(), k=3, tau=0.0)
        assert sum(n.weight for n in neighbors.entries) == pytest.approx(1.0, abs=1e-12)

    def test_parameter_preconditions(self, unseen_registry):
        new_card = load_data_card("new")
        with pytest.raises(ValueError):
            select_neighbors(new_card, unseen_registry, "vit-base",
                             HashEmbedder(), k=0)
        with pytest.raises(ValueError):
            select_neighbors(new_card, unseen_registry, "vit-base",
                             HashEmbedder(), tau=1.0)


def neighbor_set(weighted_configs, space_card_name="vit-base") -> NeighborSet:
    entries = []
    for i, (weight, config) in enumerate(weighted_configs):
        card = DataCard(name=f"d{i}", input_type="image", label_space=("x",),
                        task_description="t", eval_metrics=("accuracy",))
        record = TuningRecord(card, space_card_name, config,
                              BestMetric("accuracy", 0.9), "manual", 0)
        entries.append(Neighbor(record=record, similarity=weight, weight=weight))
    return NeighborSet(entries=tuple(entries), k=len(entries), tau=0.0)


VIT_SPACE = {
    "learning_rate": HyperParamSpec("learning_rate", "continuous_log",
                                    (1e-6, 1e-1), 1e-4),
    "epochs": HyperParamSpec("epochs", "integer", (1, 300), 90),
}


class TestBlendConfigs:
    def test_log_kind_geometric_mean(self):
        neighbors = neighbor_set([
            (0.6, {"learning_rate": 1e-4, "epochs": 90}),
            (0.4, {"learning_rate": 1e-5, "epochs": 40}),
        ])
        blended = blend_configs(neighbors, VIT_SPACE)
        assert blended["learning_rate"] == pytest.approx(10 ** -4.4, rel=1e-12)
        assert blended["learning_rate"] == pytest.approx(3.981e-5, rel=1e-3)

    def test_integer_weighted_round(self):
        neighbors = neighbor_set([
            (0.6, {"learning_rate": 1e-4, "epochs": 90}),
            (0.4, {"learning_rate": 1e-4, "epochs": 40}),
        ])
        assert blend_configs(neighbors, VIT_SPACE)["epochs"] == 70

    def test_unanimous_categorical(self):
        space = dict(VIT_SPACE)
        space["optimizer"] = HyperParamSpec("optimizer", "categorical",
                                            ("adamw", "sgd"), "adamw")
        neighbors = neighbor_set([
            (0.6, {"learning_rate": 1e-4, "epochs": 90, "optimizer": "adamw"}),
            (0.4, {"learning_rate": 1e-5, "epochs": 40, "optimizer": "adamw"}),
        ])
        assert blend_configs(neighbors, space)["optimizer"] == "adamw"

    def test_categorical_tie_lexicographic(self):
        space = {"opt": HyperParamSpec("opt", "categorical", ("sgd", "adamw"),
                                       "sgd")}
        neighbors = neighbor_set([
            (0.5, {"opt": "sgd"}),
            (0.5, {"opt": "adamw"}),
        ])
        assert blend_configs(neighbors, space)["opt"] == "adamw"

    def test_missing_parameter_incompatible(self):
        neighbors = neighbor_set([
            (0.6, {"learning_rate": 1e-4, "epochs": 90}),
            (0.4, {"learning_rate": 1e-5}),
        ])
        with pytest.raises(IncompatibleConfigs):
            blend_configs(neighbors, VIT_SPACE)

    def test_linear_kind_weighted_mean(self):
        space = {"dropout": HyperParamSpec("dropout", "continuous_linear",
                                           (0.0, 1.0), 0.1)}
        neighbors = neighbor_set([(0.25, {"dropout": 0.2}),
                                  (0.75, {"dropout": 0.6})])
        blended = blend_configs(neighbors, space)
        assert blended["dropout"] == pytest.approx(0.25 * 0.2 + 0.75 * 0.6)


class TestRecommend:
    def test_two_neighbor_blend(self, unseen_registry):
        rec = recommend(load_data_card("new"), load_model_card("vit_base"),
                        unseen_registry, HashEmbedder())
        assert rec.source == "transfer"
        assert rec.config["learning_rate"] == pytest.approx(10 ** -4.4, rel=1e-9)
        assert rec.config["epochs"] == 70
        assert [n for n, _ in rec.neighbor_summary] == ["A", "B"]

    def test_empty_registry_falls_back_to_defaults(self):
        model = load_model_card("vit_base")
        rec = recommend(load_data_card("new"), model,
                        Registry(model_cards={model.name: model}), HashEmbedder())
        assert rec.source == "default"
        assert rec.config == model.defaults()
        assert rec.neighbor_summary == ()

    def test_identical_singleton_returns_record_config(self, unseen_registry):
        model = load_model_card("vit_base")
        registry = Registry(model_cards={model.name: model})
        a = load_data_card("dataset_a")
        registry = add_record(registry, TuningRecord(
            a, "vit-base", {"learning_rate": 3e-4, "epochs": 55},
            BestMetric("accuracy", 0.88), "grid_search", 0))
        rec = recommend(a, model, registry, HashEmbedder())
        assert rec.source == "transfer"
        assert rec.config == {"learning_rate": pytest.approx(3e-4, rel=1e-12),
                              "epochs": 55}


class TestAssignModel:
    def test_detection_card_picks_detector(self):
        # Expected winner derived by running the reference bag-of-words
        # cosine on the fixture card texts before the build.
        winner = assign_model(load_data_card("coco"),
                              [load_model_card("detector"),
                               load_model_card("dpr")], HashEmbedder())
        assert winner.name == "vitdet-base"

    def test_single_candidate(self):
        model = load_model_card("dpr")
        assert assign_model(load_data_card("nq"), [model],
                            HashEmbedder()) is model

    def test_identical_descriptions_tie_on_name(self):
        a = ModelCard(name="bravo", structure="s", description="same words")
        b = ModelCard(name="alpha", structure="s", description="same words")
        card = load_data_card("new")
        assert assign_model(card, [a, b], HashEmbedder()).name == "alpha"


class TestInvariants:
    def random_neighbors(self, rng, kinds=("continuous_log",)):
        n = rng.randint(1, 5)
        sims = [rng.uniform(0.05, 1.0) for _ in range(n)]
        total = sum(sims)
        configs = [{"p": 10.0 ** rng.uniform(-6, -1)} for _ in range(n)]
        entries = tuple(
            Neighbor(record=TuningRecord(
                DataCard(name=f"d{i}", input_type="image", label_space=("x",),
                         task_description="t", eval_metrics=("m",)),
                "m", configs[i], BestMetric("m", 0.9), "manual", 0),
                similarity=sims[i], weight=sims[i] / total)
            for i in range(n))
        return NeighborSet(entries=entries, k=n, tau=0.0)

    SPACE = {"p": HyperParamSpec("p", "continuous_log", (1e-7, 1.0), 1e-3)}

    def test_weight_normalization(self):
        rng = random.Random(61)
        for _ in range(200):
            ns = self.random_neighbors(rng)
            assert sum(e.weight for e in ns.entries) == pytest.approx(1.0, abs=1e-12)

    def test_blend_interpolation_bounds(self):
        rng = random.Random(67)
        for _ in range(200):
            ns = self.random_neighbors(rng)
            values = [e.record.config["p"] for e in ns.entries]
            blended = blend_configs(ns, self.SPACE)["p"]
            assert min(values) * (1 - 1e-12) <= blended <= max(values) * (1 + 1e-12)

    def test_singleton_blend_identity(self):
        rng = random.Random(71)
        space = {
            "lr": HyperParamSpec("lr", "continuous_log", (1e-7, 1.0), 1e-3),
            "width": HyperParamSpec("width", "continuous_linear", (0.0, 512.0), 10.0),
            "epochs": HyperParamSpec("epochs", "integer", (1, 100), 5),
            "opt": HyperParamSpec("opt", "categorical", ("adamw", "sgd"), "sgd"),
        }
        for _ in range(100):
            config = {"lr": 10.0 ** rng.uniform(-7, 0),
                      "width": rng.uniform(0, 512),
                      "epochs": rng.randint(1, 100),
                      "opt": rng.choice(("adamw", "sgd"))}
            ns = neighbor_set([(1.0, config)])
            blended = blend_configs(ns, space)
            assert blended["epochs"] == config["epochs"]
            assert blended["opt"] == config["opt"]
            assert blended["lr"] == pytest.approx(config["lr"], rel=1e-12)
            assert blended["width"] == pytest.approx(config["width"], rel=1e-12)

    def test_monotone_in_similarity(self):
        # raising one neighbor's similarity pulls the blend toward its value
        lo, hi = 1e-5, 1e-3
        def blended_for(s0):
            sims = [s0, 0.5]
            total = sum(sims)
            ns = NeighborSet(entries=tuple(
                Neighbor(record=TuningRecord(
                    DataCard(name=f"d{i}", input_type="image",
                             label_space=("x",), task_description="t",
                             eval_metrics=("m",)),
                    "m", {"p": v}, BestMetric("m", 0.9), "manual", 0),
                    similarity=s, weight=s / total)
                for i, (s, v) in enumerate(zip(sims, (lo, hi)))),
                k=2, tau=0.0)
            return blend_configs(ns, self.SPACE)["p"]

        results = [blended_for(s) for s in (0.1, 0.3, 0.5, 0.7, 0.9)]
        assert results == sorted(results, reverse=True)
        assert all(lo <= r <= hi for r in results)

    def test_argmax_invariance_under_positive_scaling(self, unseen_registry):
        new_card = load_data_card("new")
        texts = {r.data_card.name: card_text(r.data_card)
                 for r in unseen_registry.records}

        for scale in (1.0, 0.5, 0.125):
            sims = {"A": 0.8 * scale, "B": 0.6 * scale}
            embedder = planted_for(sims, card_text(new_card), texts)
            ns = select_neighbors(new_card, unseen_registry, "vit-base",
                                  embedder, k=2, tau=0.0)
            assert [n.record.data_card.name for n in ns.entries] == ["A", "B"]
            assert ns.entries[0].weight == pytest.approx(0.8 / 1.4, rel=1e-9)
