import math
import random

import httpx
import pytest

from automlgpt.cards import DataCard, HyperParamSpec, ModelCard
from automlgpt.composer import UserRequest, compose_prompt
from automlgpt.errors import (
    AuthFailure,
    BadLogLine,
    BudgetExceeded,
    EmptyHyperparameters,
    EndpointUnreachable,
    MalformedPrompt,
    MissingSection,
    NonMonotoneEpochs,
)
from automlgpt.oracle import (
    HttpBackend,
    MockBackend,
    mock_complete,
    mock_final_metric,
    mock_optimal_lr,
    parse_response,
    parse_training_log,
    serialize_training_log,
)
from automlgpt.training_log import LogEntry, TrainingLog
from conftest import load_data_card, load_model_card
from reference_fnv import ref_fnv1a64

# Derived with the independent FNV-1a reference: name -> hash mod 3.
#   "delta" -> 1 (lr* = 1e-4), "alpha" -> 0 (1e-3), "beta" -> 2 (1e-5)
NAME_MOD = {"alpha": 0, "delta": 1, "beta": 2}


def simple_cards(dataset_name: str, lr_default: float = 1e-4):
    data = DataCard(name=dataset_name, input_type="image",
                    label_space=("x", "y"), task_description="classify",
                    eval_metrics=("accuracy",))
    model = ModelCard(name="m", structure="s", description="d", arch_hparams={
        "learning_rate": HyperParamSpec("learning_rate", "continuous_log",
                                        (1e-6, 1e-1), lr_default),
    })
    return data, model


def test_reference_hash_mods():
    for name, mod in NAME_MOD.items():
        assert ref_fnv1a64(name.encode()) % 3 == mod
        assert mock_optimal_lr(name) == 10.0 ** -(3 + mod)


class TestMockComplete:
    def test_optimal_lr_final_metric(self):
        # hash("delta") mod 3 == 1 so lr* = 1e-4; at lr = lr* the final
        # val_metric is 0.95 * (1 - e^-3) = 0.9027 (4 dp).
        data, model = simple_cards("delta", lr_default=1e-4)
        response = parse_response(mock_complete(compose_prompt(data, model)))
        assert response.predicted_log.final.val_metric == pytest.approx(0.9027)
        assert mock_final_metric(1e-4, 1e-4) == pytest.approx(0.9027022850505292)

    def test_off_optimum_score(self):
        # one decade off: S = 0.95 - 0.15 = 0.80 -> final 0.7602 (4 dp)
        data, model = simple_cards("delta", lr_default=1e-3)
        response = parse_response(mock_complete(compose_prompt(data, model)))
        assert response.predicted_log.final.val_metric == pytest.approx(0.7602)
        assert mock_final_metric(1e-3, 1e-4) == pytest.approx(0.7601703453057088)

    def test_equal_prompts_byte_identical_responses(self, coco_cards):
        prompt = compose_prompt(*coco_cards)
        assert mock_complete(prompt) == mock_complete(prompt)

    def test_missing_section_rejected(self, coco_cards):
        prompt = compose_prompt(*coco_cards)
        truncated = prompt.text[:prompt.text.index("MODEL CARD:")]
        with pytest.raises(MalformedPrompt):
            mock_complete(type(prompt)(text=truncated, spans=()))

    def test_processing_steps_keyed_on_input_type(self):
        expectations = {
            "coco": ("resize", "normalize", "augment"),
            "nq": ("tokenize", "lowercase", "remove_stopwords"),
            "adult": ("impute", "standardize", "encode_categoricals"),
        }
        models = {"coco": "detector", "nq": "dpr", "adult": "xgb"}
        for data_name, steps in expectations.items():
            prompt = compose_prompt(load_data_card(data_name),
                                    load_model_card(models[data_name]))
            response = parse_response(mock_complete(prompt))
            assert response.data_processing == steps

    def test_requests_nudge_lr_toward_optimum(self):
        data, model = simple_cards("delta", lr_default=1e-3)  # lr* = 1e-4
        request = UserRequest("free_text", "please tune faster")
        parsed = parse_response(mock_complete(compose_prompt(data, model, [request])))
        assert math.log10(parsed.hyperparameters["learning_rate"]) == \
            pytest.approx(-3.25)

    def test_nudge_clamps_at_optimum(self):
        data, model = simple_cards("delta", lr_default=1.2e-4)  # within one step
        request = UserRequest("free_text", "go")
        parsed = parse_response(mock_complete(compose_prompt(data, model, [request])))
        assert parsed.hyperparameters["learning_rate"] == pytest.approx(1e-4)

    def test_defaults_echoed_without_requests(self, coco_cards):
        data, model = coco_cards
        parsed = parse_response(mock_complete(compose_prompt(data, model)))
        assert parsed.hyperparameters == model.defaults()


class TestParseResponse:
    def test_mock_fixture_has_three_steps_and_twelve_epochs(self, coco_cards):
        raw = MockBackend().complete(compose_prompt(*coco_cards))
        response = parse_response(raw)
        assert len(response.data_processing) == 3
        assert len(response.predicted_log.entries) == 12
        assert response.raw_text == raw
        assert response.warnings == ()

    def test_missing_log_section(self, coco_cards):
        raw = MockBackend().complete(compose_prompt(*coco_cards))
        truncated = raw[:raw.index("## Predicted Training Log")]
        with pytest.raises(MissingSection):
            parse_response(truncated)

    def test_scientific_notation_hyperparameter(self):
        raw = ("## Data Processing\n- resize\n## Model Architecture\nnet\n"
               "## Hyperparameter Tuning\nlearning_rate: 1e-4\n"
               "## Predicted Training Log\n"
               "epoch 1: train_loss=0.5000 val_loss=0.5000 val_metric=0.5000\n")
        response = parse_response(raw)
        assert response.hyperparameters == {"learning_rate": 1e-4}

    def test_unparseable_lines_become_warnings(self):
        raw = ("## Data Processing\n- resize\n## Model Architecture\nnet\n"
               "## Hyperparameter Tuning\nlearning_rate: 1e-4\nNOT A LINE\n"
               "## Predicted Training Log\n"
               "epoch 1: train_loss=0.5000 val_loss=0.5000 val_metric=0.5000\n")
        response = parse_response(raw)
        assert len(response.warnings) == 1

    def test_empty_hyperparameters(self):
        raw = ("## Data Processing\n- resize\n## Model Architecture\nnet\n"
               "## Hyperparameter Tuning\n\n## Predicted Training Log\n"
               "epoch 1: train_loss=0.5000 val_loss=0.5000 val_metric=0.5000\n")
        with pytest.raises(EmptyHyperparameters):
            parse_response(raw)


class TestTrainingLogGrammar:
    def test_grammar_example_line(self):
        text = ("epoch 1: train_loss=0.9000 val_loss=0.9000 val_metric=0.1000\n"
                "epoch 2: train_loss=0.6000 val_loss=0.7000 val_metric=0.3000\n"
                "epoch 3: train_loss=0.4120 val_loss=0.5300 val_metric=0.8100")
        log = parse_training_log(text)
        assert log.entries[2] == LogEntry(3, 0.412, 0.53, 0.81)

    def test_epoch_gap_rejected(self):
        text = ("epoch 1: train_loss=0.9000 val_loss=0.9000 val_metric=0.1000\n"
                "epoch 2: train_loss=0.6000 val_loss=0.7000 val_metric=0.3000\n"
                "epoch 4: train_loss=0.4120 val_loss=0.5300 val_metric=0.8100")
        with pytest.raises(NonMonotoneEpochs):
            parse_training_log(text)

    def test_bad_line_reports_line_number(self):
        with pytest.raises(BadLogLine) as err:
            parse_training_log("epoch one: train_loss=bad")
        assert err.value.line_no == 1

    def test_round_trip_on_random_logs(self):
        rng = random.Random(41)
        for _ in range(200):
            entries = tuple(
                LogEntry(epoch=e,
                         train_loss=rng.randrange(0, 30000) / 10000,
                         val_loss=rng.randrange(0, 30000) / 10000,
                         val_metric=rng.randrange(0, 10001) / 10000)
                for e in range(1, rng.randint(1, 20) + 1))
            log = TrainingLog(entries)
            assert parse_training_log(serialize_training_log(log)) == log


def test_lone_later_epoch_is_a_gap():
    with pytest.raises(NonMonotoneEpochs):
        parse_training_log(
            "epoch 3: train_loss=0.4120 val_loss=0.5300 val_metric=0.8100")


class TestHttpBackend:
    def fake_prompt(self):
        data, model = simple_cards("delta")
        return compose_prompt(data, model)

    def test_unreachable_after_three_attempts(self, monkeypatch):
        calls = []

        def boom(url, **kwargs):
            calls.append(url)
            raise httpx.ConnectError("refused")

        monkeypatch.setattr(httpx, "post", boom)
        backend = HttpBackend(url="http://127.0.0.1:9/llm", backoff_base=0.0)
        with pytest.raises(EndpointUnreachable):
            backend.complete(self.fake_prompt())
        assert len(calls) == 3

    def test_401_fails_without_retry(self, monkeypatch):
        calls = []

        def unauthorized(url, **kwargs):
            calls.append(url)
            return httpx.Response(401, request=httpx.Request("POST", url))

        monkeypatch.setattr(httpx, "post", unauthorized)
        backend = HttpBackend(url="http://e/llm", backoff_base=0.0)
        with pytest.raises(AuthFailure):
            backend.complete(self.fake_prompt())
        assert len(calls) == 1

    def test_budget_exceeded_on_fourth_request(self, monkeypatch):
        def ok(url, **kwargs):
            return httpx.Response(200, text="fine",
                                  request=httpx.Request("POST", url))

        monkeypatch.setattr(httpx, "post", ok)
        backend = HttpBackend(url="http://e/llm", max_requests=3,
                              backoff_base=0.0)
        prompt = self.fake_prompt()
        for _ in range(3):
            assert backend.complete(prompt) == "fine"
        with pytest.raises(BudgetExceeded):
            backend.complete(prompt)
