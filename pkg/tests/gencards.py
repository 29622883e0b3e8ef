"""Seeded random card generators for round-trip and property tests."""

import math
import random
import string

from automlgpt.cards import DataCard, HyperParamSpec, ModelCard

WORDS = ("swift drab ochre umber slate quartz maple alder birch aspen "
         "gravel basalt shale flint amber jade onyx topaz beryl garnet").split()


def rand_word(rng: random.Random) -> str:
    return rng.choice(WORDS) + rng.choice(("", str(rng.randrange(100))))


def rand_text(rng: random.Random, lo=1, hi=8) -> str:
    return " ".join(rand_word(rng) for _ in range(rng.randint(lo, hi)))


def rand_name(rng: random.Random) -> str:
    return "-".join(rand_word(rng) for _ in range(rng.randint(1, 3)))


def rand_hparam_name(rng: random.Random) -> str:
    first = rng.choice(string.ascii_lowercase + "_")
    rest = "".join(rng.choices(string.ascii_lowercase + string.digits + "_",
                               k=rng.randint(2, 10)))
    return first + rest


def rand_spec(rng: random.Random, name: str) -> HyperParamSpec:
    kind = rng.choice(("continuous_linear", "continuous_log", "integer",
                       "categorical"))
    flexibility = rng.choice(("fixed", "tunable"))
    if kind == "categorical":
        cats = tuple(sorted({rand_word(rng) for _ in range(rng.randint(1, 4))}))
        return HyperParamSpec(name, kind, cats, rng.choice(cats), flexibility)
    if kind == "integer":
        lo = rng.randint(-50, 50)
        hi = lo + rng.randint(1, 200)
        return HyperParamSpec(name, kind, (lo, hi), rng.randint(lo, hi),
                              flexibility)
    if kind == "continuous_log":
        lo = 10.0 ** rng.uniform(-8, 0)
        hi = lo * 10.0 ** rng.uniform(0.5, 6)
        default = 10.0 ** rng.uniform(math.log10(lo), math.log10(hi))
    else:
        lo = rng.uniform(-100, 100)
        hi = lo + rng.uniform(0.5, 200)
        default = rng.uniform(lo, hi)
    return HyperParamSpec(name, kind, (lo, hi), min(max(default, lo), hi),
                          flexibility)


def random_data_card(rng: random.Random) -> DataCard:
    if rng.random() < 0.3:
        label_space = rand_text(rng, 2, 10)
    else:
        labels = {rand_word(rng) for _ in range(rng.randint(1, 12))}
        label_space = tuple(sorted(labels))
    metrics = []
    for _ in range(rng.randint(1, 4)):
        metric = rand_word(rng)
        if metric not in metrics:
            metrics.append(metric)
    return DataCard(
        name=rand_name(rng),
        input_type=rng.choice(("image", "text", "tabular")),
        label_space=label_space,
        task_description=rand_text(rng, 0, 10),
        eval_metrics=tuple(metrics),
        scale=rng.randrange(1, 10 ** 9) if rng.random() < 0.7 else None,
    )


def random_model_card(rng: random.Random) -> ModelCard:
    hparams = {}
    for _ in range(rng.randint(0, 5)):
        name = rand_hparam_name(rng)
        if name not in hparams:
            hparams[name] = rand_spec(rng, name)
    return ModelCard(
        name=rand_name(rng),
        structure=rand_text(rng, 1, 8),
        description=rand_text(rng, 0, 12),
        arch_hparams=dict(sorted(hparams.items())),
    )
