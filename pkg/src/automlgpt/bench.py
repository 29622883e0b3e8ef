"""Desk-scale benchmark for the transfer method.

Synthetic classification families: Gaussian class clusters whose noise
scale sigma sets both the difficulty and the stable learning-rate range,
so families with similar sigma have similar optimal learning rates. The
sigma bucket leaks into the data card's task description as overlapping
descriptor tokens, which makes card similarity track closeness in
log(sigma) - the world in which transfer is supposed to work, small
enough that grid search is exact.

The trainer is real: multinomial logistic regression by mini-batch
gradient descent, emitting genuine per-epoch training logs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .cards import DataCard, HyperParamConfig, HyperParamSpec, ModelCard
from .encoder import HashEmbedder, fnv1a64
from .errors import DivergedTraining
from .registry import BestMetric, Registry, TuningRecord, add_record
from .training_log import LogEntry, TrainingLog
from .transfer import recommend
from .tuner import grid_search_oracle

FEATURE_DIM = 16
SAMPLES_PER_CLASS = 200
MEAN_RADIUS = 3.0
TRAIN_FRACTION = 0.8

# 100-word class-name vocabulary shared by every synthetic family.
VOCABULARY = (
    "otter heron lynx ibis stoat viper crane finch moose gecko "
    "bison mole hare seal wren newt shrew raven koala lemur "
    "tapir skink quail dingo badger weasel falcon osprey plover swift "
    "marten corgi vole toad eel carp pike perch bream trout "
    "walrus puffin auk tern gull skua fulmar gannet loon grebe "
    "adder boa cobra gila iguana anole tegu monitor agama chameleon "
    "cicada mantis beetle weevil aphid hornet wasp sawfly earwig cricket "
    "urchin limpet whelk cockle mussel oyster scallop abalone conch nautilus "
    "yak zebu okapi oryx eland kudu nyala duiker gazelle impala "
    "stork egret bittern spoonbill avocet curlew godwit snipe lapwing dunlin"
).split()

MODEL_CARD_NAME = "tiny-logreg"


def tiny_model_card() -> ModelCard:
    return ModelCard(
        name=MODEL_CARD_NAME,
        structure="multinomial logistic regression with bias",
        description="linear classifier trained by mini-batch gradient descent "
                    "with weight decay on dense feature vectors",
        arch_hparams={
            "batch_size": HyperParamSpec("batch_size", "integer", (16, 64), 32),
            "epochs": HyperParamSpec("epochs", "integer", (8, 16), 12),
            "learning_rate": HyperParamSpec("learning_rate", "continuous_log",
                                            (1e-5, 10.0), 0.01),
            "weight_decay": HyperParamSpec("weight_decay", "continuous_log",
                                           (1e-8, 1e-1), 1e-4),
        },
    )


@dataclass(frozen=True)
class TaskFamily:
    family_id: str
    sigma: float
    n_classes: int
    class_names: tuple[str, ...]
    seed: int

    def __post_init__(self) -> None:
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if not 2 <= self.n_classes <= 15:
            raise ValueError("n_classes must be in [2, 15]")
        if len(set(self.class_names)) != self.n_classes:
            raise ValueError("class_names must be distinct and match n_classes")


@dataclass(frozen=True)
class SyntheticDataset:
    features: np.ndarray
    labels: np.ndarray
    n_train: int

    @property
    def train(self) -> tuple[np.ndarray, np.ndarray]:
        return self.features[:self.n_train], self.labels[:self.n_train]

    @property
    def validation(self) -> tuple[np.ndarray, np.ndarray]:
        return self.features[self.n_train:], self.labels[self.n_train:]


def _sigma_band_tokens(sigma: float) -> list[str]:
    # Two descriptor tokens for each of four overlapping quarter-decade
    # buckets: graded overlap over about one decade of sigma, weighted
    # heavily enough that sigma closeness dominates label-sampling noise.
    bucket = round(4 * math.log10(sigma)) + 20
    return [f"{family}{bucket + j}" for j in range(4)
            for family in ("noise", "grain")]


def generate_task(family: TaskFamily) -> tuple[SyntheticDataset, DataCard]:
    rng = np.random.default_rng([family.seed % 2 ** 64,
                                 fnv1a64(family.family_id.encode("utf-8"))])
    k = family.n_classes
    means = rng.standard_normal((k, FEATURE_DIM))
    means *= MEAN_RADIUS / np.linalg.norm(means, axis=1, keepdims=True)

    # Per-dimension noise scales spanning a decade make the problem
    # ill-conditioned, so accuracy genuinely depends on the learning rate:
    # the stable step size shrinks as sigma grows.
    scales = family.sigma * np.logspace(-1, 0, FEATURE_DIM)
    features = np.concatenate([
        means[c] + scales * rng.standard_normal((SAMPLES_PER_CLASS, FEATURE_DIM))
        for c in range(k)
    ])
    labels = np.repeat(np.arange(k), SAMPLES_PER_CLASS)
    order = rng.permutation(len(labels))
    features, labels = features[order], labels[order]
    n_train = int(len(labels) * TRAIN_FRACTION)

    bands = " ".join(_sigma_band_tokens(family.sigma))
    card = DataCard(
        name=family.family_id,
        input_type="tabular",
        label_space=tuple(sorted(family.class_names)),
        task_description=f"classify gaussian clusters {bands}",
        eval_metrics=("accuracy",),
        scale=len(labels),
    )
    return SyntheticDataset(features=features, labels=labels, n_train=n_train), card


def train_tiny(dataset: SyntheticDataset, config: HyperParamConfig,
               seed: int) -> TrainingLog:
    """Mini-batch gradient descent on softmax regression; seed-deterministic."""
    for key in ("learning_rate", "weight_decay", "batch_size", "epochs"):
        if key not in config:
            raise ValueError(f"config must contain {key!r}")
    lr = float(config["learning_rate"])
    decay = float(config["weight_decay"])
    batch_size = int(config["batch_size"])
    epochs = int(config["epochs"])

    x_train, y_train = dataset.train
    x_val, y_val = dataset.validation
    n_classes = int(dataset.labels.max()) + 1
    xb_train = np.hstack([x_train, np.ones((len(x_train), 1))])
    xb_val = np.hstack([x_val, np.ones((len(x_val), 1))])
    weights = np.zeros((FEATURE_DIM + 1, n_classes))

    rng = np.random.default_rng(seed)
    entries: list[LogEntry] = []
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for epoch in range(1, epochs + 1):
            order = rng.permutation(len(xb_train))
            batch_losses = []
            for start in range(0, len(order), batch_size):
                idx = order[start:start + batch_size]
                probs = _softmax(xb_train[idx] @ weights)
                loss = -np.mean(np.log(probs[np.arange(len(idx)), y_train[idx]]))
                if not np.isfinite(loss):
                    raise DivergedTraining(
                        f"training loss became non-finite at epoch {epoch} (lr={lr})")
                batch_losses.append(float(loss))
                grad_logits = probs
                grad_logits[np.arange(len(idx)), y_train[idx]] -= 1.0
                grad = xb_train[idx].T @ grad_logits / len(idx) + decay * weights
                weights -= lr * grad
            if not np.all(np.isfinite(weights)):
                raise DivergedTraining(f"weights became non-finite at epoch {epoch}")

            val_probs = _softmax(xb_val @ weights)
            val_loss = float(-np.mean(
                np.log(val_probs[np.arange(len(y_val)), y_val])))
            if not math.isfinite(val_loss):
                raise DivergedTraining(f"validation loss non-finite at epoch {epoch}")
            accuracy = float(np.mean(np.argmax(val_probs, axis=1) == y_val))
            entries.append(LogEntry(epoch=epoch,
                                    train_loss=float(np.mean(batch_losses)),
                                    val_loss=val_loss, val_metric=accuracy))
    return TrainingLog(entries=tuple(entries))


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


# --- benchmark harness -----------------------------------------------------------

LR_GRID_POINTS = 13  # half-decade steps over [1e-5, 10]

# Sigma regimes where accuracy is neither saturated nor at chance; the
# held-out range sits inside the known range so transfer interpolates.
KNOWN_LOG_SIGMA_RANGE = (0.18, 1.08)
HELDOUT_LOG_SIGMA_RANGE = (0.30, 0.95)


def final_accuracy(dataset: SyntheticDataset, config: HyperParamConfig,
                   seed: int) -> float:
    """Final-epoch validation accuracy; a diverged run scores 0."""
    try:
        return train_tiny(dataset, config, seed).final.val_metric
    except DivergedTraining:
        return 0.0


def grid_best_config(dataset: SyntheticDataset, model: ModelCard,
                     seed: int) -> tuple[HyperParamConfig, float]:
    return grid_search_oracle(
        model.arch_hparams,
        lambda config: final_accuracy(dataset, config, seed),
        {"learning_rate": LR_GRID_POINTS},
    )


def random_config(model: ModelCard, rng: np.random.Generator) -> HyperParamConfig:
    config: HyperParamConfig = {}
    for name, spec in model.arch_hparams.items():
        if spec.kind == "continuous_log":
            lo, hi = math.log10(spec.domain[0]), math.log10(spec.domain[1])
            config[name] = float(10.0 ** rng.uniform(lo, hi))
        elif spec.kind == "continuous_linear":
            config[name] = float(rng.uniform(spec.domain[0], spec.domain[1]))
        elif spec.kind == "integer":
            config[name] = int(rng.integers(spec.domain[0], spec.domain[1] + 1))
        else:
            config[name] = str(rng.choice(list(spec.domain)))
    return config


@dataclass(frozen=True)
class TrialResult:
    seed: int
    heldout_sigma: float
    recommended_accuracy: float
    random_accuracy: float
    default_accuracy: float
    nearest_accuracy: float  # k=1 copy of the single most similar dataset
    recommended_config: HyperParamConfig
    neighbor_summary: tuple[tuple[str, float], ...]


@dataclass(frozen=True)
class BenchReport:
    n_known: int
    n_trials: int
    trials: tuple[TrialResult, ...]
    mean_recommended: float
    mean_random: float
    mean_default: float
    mean_nearest: float
    win_rate_vs_random: float
    win_rate_vs_default: float

    def to_obj(self) -> dict[str, Any]:
        return {
            "n_known": self.n_known,
            "n_trials": self.n_trials,
            "mean_recommended": self.mean_recommended,
            "mean_random": self.mean_random,
            "mean_default": self.mean_default,
            "mean_nearest": self.mean_nearest,
            "win_rate_vs_random": self.win_rate_vs_random,
            "win_rate_vs_default": self.win_rate_vs_default,
            "trials": [
                {
                    "seed": t.seed,
                    "heldout_sigma": t.heldout_sigma,
                    "recommended_accuracy": t.recommended_accuracy,
                    "random_accuracy": t.random_accuracy,
                    "default_accuracy": t.default_accuracy,
                    "nearest_accuracy": t.nearest_accuracy,
                    "recommended_config": t.recommended_config,
                    "neighbors": [{"dataset": n, "weight": w}
                                  for n, w in t.neighbor_summary],
                }
                for t in self.trials
            ],
        }

    def format_table(self) -> str:
        lines = [
            f"{'trial':>5}  {'sigma':>7}  {'recommended':>11}  "
            f"{'random':>7}  {'default':>7}  {'nearest':>7}",
        ]
        for i, t in enumerate(self.trials):
            lines.append(f"{i:>5}  {t.heldout_sigma:>7.3f}  "
                         f"{t.recommended_accuracy:>11.4f}  "
                         f"{t.random_accuracy:>7.4f}  {t.default_accuracy:>7.4f}  "
                         f"{t.nearest_accuracy:>7.4f}")
        lines.append("")
        lines.append(f"mean accuracy  recommended={self.mean_recommended:.4f}  "
                     f"random={self.mean_random:.4f}  default={self.mean_default:.4f}  "
                     f"nearest={self.mean_nearest:.4f}")
        lines.append(f"win rate vs random={self.win_rate_vs_random:.2f}  "
                     f"vs default={self.win_rate_vs_default:.2f}")
        return "\n".join(lines)


def sample_family(rng: np.random.Generator, family_id: str, n_classes: int,
                  log_sigma_range: tuple[float, float]) -> TaskFamily:
    sigma = float(10.0 ** rng.uniform(*log_sigma_range))
    names = tuple(str(w) for w in rng.choice(VOCABULARY, n_classes, replace=False))
    return TaskFamily(family_id=family_id, sigma=sigma, n_classes=n_classes,
                      class_names=names, seed=int(rng.integers(0, 2 ** 62)))


def run_unseen_benchmark(n_known: int, n_trials: int,
                         seeds: Sequence[int] | None = None) -> BenchReport:
    if n_known < 2:
        raise ValueError("n_known must be >= 2")
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    if seeds is None:
        seeds = list(range(n_trials))
    if len(seeds) != n_trials:
        raise ValueError("need exactly one seed per trial")

    model = tiny_model_card()
    embedder = HashEmbedder()
    trials: list[TrialResult] = []

    for trial_no, seed in enumerate(seeds):
        rng = np.random.default_rng([int(seed) % 2 ** 64, 0xBE7C])
        train_seed = int(rng.integers(0, 2 ** 62))

        registry = Registry(model_cards={model.name: model})
        for i in range(n_known):
            family = sample_family(rng, f"known-{trial_no}-{i}", 15,
                                   KNOWN_LOG_SIGMA_RANGE)
            dataset, card = generate_task(family)
            best_config, best_value = grid_best_config(dataset, model, train_seed)
            registry = add_record(registry, TuningRecord(
                data_card=card, model_card_name=model.name, config=best_config,
                best_metric=BestMetric("accuracy", best_value),
                provenance="grid_search", created_at=0))

        heldout = sample_family(rng, f"heldout-{trial_no}", 10,
                                HELDOUT_LOG_SIGMA_RANGE)
        dataset, card = generate_task(heldout)
        recommendation = recommend(card, model, registry, embedder)
        nearest = recommend(card, model, registry, embedder, k=1)

        trials.append(TrialResult(
            seed=int(seed),
            heldout_sigma=heldout.sigma,
            recommended_accuracy=final_accuracy(dataset, recommendation.config,
                                                train_seed),
            random_accuracy=final_accuracy(dataset, random_config(model, rng),
                                           train_seed),
            default_accuracy=final_accuracy(dataset, model.defaults(), train_seed),
            nearest_accuracy=final_accuracy(dataset, nearest.config, train_seed),
            recommended_config=recommendation.config,
            neighbor_summary=recommendation.neighbor_summary,
        ))

    n = len(trials)
    return BenchReport(
        n_known=n_known, n_trials=n_trials, trials=tuple(trials),
        mean_recommended=sum(t.recommended_accuracy for t in trials) / n,
        mean_random=sum(t.random_accuracy for t in trials) / n,
        mean_default=sum(t.default_accuracy for t in trials) / n,
        mean_nearest=sum(t.nearest_accuracy for t in trials) / n,
        win_rate_vs_random=sum(
            t.recommended_accuracy >= t.random_accuracy for t in trials) / n,
        win_rate_vs_default=sum(
            t.recommended_accuracy >= t.default_accuracy for t in trials) / n,
    )
