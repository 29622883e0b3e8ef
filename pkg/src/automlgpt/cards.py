"""Data cards, model cards, and hyperparameter domains.

Card documents are strict UTF-8 JSON: unknown keys are rejected, enum
tokens are closed-world. Canonicalization trims and collapses whitespace
in every string field, lowercases enum tokens and label entries, and
sorts label lists; hyperparameter names are lowercase snake_case. Label
lists are treated as sets (sorted on parse); eval_metrics keep author
order because the first metric is the primary one.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field, replace
from typing import Any, Mapping

from .errors import (
    DefaultOutOfDomain,
    EmptyLabelSpace,
    MalformedDocument,
    SchemaViolation,
)

INPUT_TYPES = ("image", "text", "tabular")
KINDS = ("continuous_linear", "continuous_log", "integer", "categorical")
FLEXIBILITIES = ("fixed", "tunable")

_WS_RE = re.compile(r"\s+")
_HPARAM_NAME_RE = re.compile(r"^[a-z_][a-z0-9_]*$")

DATA_CARD_KEYS = ("name", "input_type", "label_space", "scale",
                  "task_description", "eval_metrics")
MODEL_CARD_KEYS = ("name", "structure", "description", "arch_hparams")
HPARAM_KEYS = ("kind", "domain", "default", "flexibility")

# Machine-readable description of the card document format; the web console
# generates its card forms from this same structure (served by the API).
CARD_SCHEMA: dict[str, Any] = {
    "data_card": {
        "name": {"type": "string", "required": True},
        "input_type": {"type": "enum", "values": list(INPUT_TYPES), "required": True},
        "label_space": {"type": "string_list_or_text", "required": True},
        "scale": {"type": "positive_integer", "required": False},
        "task_description": {"type": "string", "required": True},
        "eval_metrics": {"type": "string_list", "required": True},
    },
    "model_card": {
        "name": {"type": "string", "required": True},
        "structure": {"type": "string", "required": True},
        "description": {"type": "string", "required": True},
        "arch_hparams": {
            "type": "hparam_map",
            "required": True,
            "entry": {
                "kind": {"type": "enum", "values": list(KINDS)},
                "domain": {"type": "range_or_categories"},
                "default": {"type": "value_in_domain"},
                "flexibility": {"type": "enum", "values": list(FLEXIBILITIES)},
            },
        },
    },
}


def canon_text(value: str) -> str:
    """Trim and collapse internal whitespace runs to single spaces."""
    return _WS_RE.sub(" ", value.strip())


def canon_token(value: str) -> str:
    """Canonical form for enum tokens and label entries: trimmed, lowercased."""
    return canon_text(value).lower()


def render_number(value: int | float) -> str:
    """Canonical decimal rendering used in prompts and responses."""
    if isinstance(value, bool):
        raise ValueError("booleans are not card values")
    if isinstance(value, int):
        return str(value)
    if float(value).is_integer() and abs(value) < 1e16:
        return str(int(value))
    return repr(float(value))


def render_value(value: Any) -> str:
    if isinstance(value, str):
        return value
    return render_number(value)


@dataclass(frozen=True)
class HyperParamSpec:
    name: str
    kind: str
    domain: tuple[Any, ...]
    default: Any
    flexibility: str = "tunable"

    def contains(self, value: Any) -> bool:
        """Domain membership with kind-correct typing."""
        if isinstance(value, bool):
            return False
        if self.kind == "categorical":
            return isinstance(value, str) and value in self.domain
        if self.kind == "integer":
            return isinstance(value, int) and self.domain[0] <= value <= self.domain[1]
        if not isinstance(value, (int, float)):
            return False
        return self.domain[0] <= float(value) <= self.domain[1]


HyperParamSpace = Mapping[str, HyperParamSpec]
HyperParamConfig = dict[str, Any]


@dataclass(frozen=True)
class DataCard:
    name: str
    input_type: str
    label_space: tuple[str, ...] | str
    task_description: str
    eval_metrics: tuple[str, ...]
    scale: int | None = None

    @property
    def has_class_list(self) -> bool:
        return isinstance(self.label_space, tuple)


@dataclass(frozen=True)
class ModelCard:
    name: str
    structure: str
    description: str
    arch_hparams: dict[str, HyperParamSpec] = field(default_factory=dict)

    def defaults(self) -> HyperParamConfig:
        return {name: spec.default for name, spec in self.arch_hparams.items()}

    def with_defaults(self, config: HyperParamConfig) -> "ModelCard":
        """Copy of this card whose spec defaults are replaced by `config`."""
        hparams = {}
        for name, spec in self.arch_hparams.items():
            if name in config:
                hparams[name] = replace(spec, default=config[name])
            else:
                hparams[name] = spec
        return replace(self, arch_hparams=hparams)


@dataclass(frozen=True)
class ConfigViolation:
    key: str
    reason: str


# --- parsing helpers ----------------------------------------------------------

def _load_json(document: bytes | str) -> Any:
    if isinstance(document, bytes):
        try:
            document = document.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedDocument(f"document is not UTF-8: {exc}") from exc
    try:
        return json.loads(document)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"invalid JSON: {exc}") from exc


def _require_keys(obj: dict, allowed: tuple[str, ...], required: tuple[str, ...],
                  where: str) -> None:
    for key in obj:
        if key not in allowed:
            raise SchemaViolation(f"unknown field {key!r}", field=f"{where}.{key}")
    for key in required:
        if key not in obj:
            raise SchemaViolation(f"missing field {key!r}", field=f"{where}.{key}")


def _require_string(value: Any, path: str, non_empty: bool = False) -> str:
    if not isinstance(value, str):
        raise SchemaViolation(f"{path} must be a string", field=path)
    out = canon_text(value)
    if non_empty and not out:
        raise SchemaViolation(f"{path} must be non-empty", field=path)
    return out


def data_card_from_obj(obj: Any) -> DataCard:
    """Build a canonical DataCard from parsed JSON; strict schema."""
    if not isinstance(obj, dict):
        raise SchemaViolation("data card must be a JSON object", field="data_card")
    _require_keys(obj, DATA_CARD_KEYS,
                  ("name", "input_type", "label_space", "task_description",
                   "eval_metrics"), "data_card")

    name = _require_string(obj["name"], "data_card.name", non_empty=True)

    input_type = canon_token(_require_string(obj["input_type"], "data_card.input_type"))
    if input_type not in INPUT_TYPES:
        raise SchemaViolation(
            f"input_type must be one of {INPUT_TYPES}, got {obj['input_type']!r}",
            field="data_card.input_type")

    raw_labels = obj["label_space"]
    label_space: tuple[str, ...] | str
    if isinstance(raw_labels, str):
        label_space = canon_text(raw_labels)
        if not label_space:
            raise EmptyLabelSpace("label_space text is empty",
                                  field="data_card.label_space")
    elif isinstance(raw_labels, list):
        if not raw_labels:
            raise EmptyLabelSpace("label_space list is empty",
                                  field="data_card.label_space")
        labels = []
        for i, entry in enumerate(raw_labels):
            if not isinstance(entry, str):
                raise SchemaViolation("label entries must be strings",
                                      field=f"data_card.label_space[{i}]")
            labels.append(canon_token(entry))
        if any(not lbl for lbl in labels):
            raise EmptyLabelSpace("label entry empty after canonicalization",
                                  field="data_card.label_space")
        if len(set(labels)) != len(labels):
            dupes = sorted({l for l in labels if labels.count(l) > 1})
            raise EmptyLabelSpace(
                f"label entries collide after canonicalization: {dupes}",
                field="data_card.label_space")
        label_space = tuple(sorted(labels))
    else:
        raise SchemaViolation("label_space must be a string or array of strings",
                              field="data_card.label_space")

    scale = None
    if "scale" in obj:
        raw_scale = obj["scale"]
        if not isinstance(raw_scale, int) or isinstance(raw_scale, bool) or raw_scale <= 0:
            raise SchemaViolation("scale must be a positive integer",
                                  field="data_card.scale")
        scale = raw_scale

    task = _require_string(obj["task_description"], "data_card.task_description")

    raw_metrics = obj["eval_metrics"]
    if not isinstance(raw_metrics, list) or not raw_metrics:
        raise SchemaViolation("eval_metrics must be a non-empty array",
                              field="data_card.eval_metrics")
    metrics = []
    for i, entry in enumerate(raw_metrics):
        if not isinstance(entry, str):
            raise SchemaViolation("eval_metrics entries must be strings",
                                  field=f"data_card.eval_metrics[{i}]")
        metrics.append(canon_text(entry))
    if any(not m for m in metrics):
        raise SchemaViolation("eval_metrics entries must be non-empty",
                              field="data_card.eval_metrics")
    if len(set(metrics)) != len(metrics):
        raise SchemaViolation("eval_metrics entries must be distinct",
                              field="data_card.eval_metrics")

    return DataCard(name=name, input_type=input_type, label_space=label_space,
                    task_description=task, eval_metrics=tuple(metrics), scale=scale)


def _hparam_spec_from_obj(name_raw: str, obj: Any) -> HyperParamSpec:
    path = f"model_card.arch_hparams.{name_raw}"
    name = canon_token(name_raw)
    if not _HPARAM_NAME_RE.match(name):
        raise SchemaViolation(
            f"hyperparameter name {name_raw!r} is not lowercase snake_case",
            field=path)
    if not isinstance(obj, dict):
        raise SchemaViolation("hyperparameter spec must be an object", field=path)
    _require_keys(obj, HPARAM_KEYS, HPARAM_KEYS, path)

    kind = canon_token(_require_string(obj["kind"], f"{path}.kind"))
    if kind not in KINDS:
        raise SchemaViolation(f"kind must be one of {KINDS}, got {obj['kind']!r}",
                              field=f"{path}.kind")

    raw_domain = obj["domain"]
    if not isinstance(raw_domain, list) or not raw_domain:
        raise SchemaViolation("domain must be a non-empty array", field=f"{path}.domain")

    domain: tuple[Any, ...]
    if kind == "categorical":
        cats = []
        for entry in raw_domain:
            if not isinstance(entry, str):
                raise SchemaViolation("categorical domain entries must be strings",
                                      field=f"{path}.domain")
            cats.append(canon_text(entry))
        if len(set(cats)) != len(cats):
            raise SchemaViolation("categorical domain entries must be distinct",
                                  field=f"{path}.domain")
        domain = tuple(cats)
    else:
        if len(raw_domain) != 2:
            raise SchemaViolation("numeric domain must be [min, max]",
                                  field=f"{path}.domain")
        lo, hi = raw_domain
        for bound in (lo, hi):
            if isinstance(bound, bool) or not isinstance(bound, (int, float)):
                raise SchemaViolation("domain bounds must be numbers",
                                      field=f"{path}.domain")
            if not math.isfinite(bound):
                raise SchemaViolation("domain bounds must be finite",
                                      field=f"{path}.domain")
        if kind == "integer":
            if not (isinstance(lo, int) and isinstance(hi, int)):
                raise SchemaViolation("integer domain bounds must be integers",
                                      field=f"{path}.domain")
        if not lo < hi:
            raise SchemaViolation("domain requires min < max", field=f"{path}.domain")
        if kind == "continuous_log" and lo <= 0:
            raise SchemaViolation("continuous_log domain requires min > 0",
                                  field=f"{path}.domain")
        if kind == "integer":
            domain = (int(lo), int(hi))
        else:
            domain = (float(lo), float(hi))

    default = obj["default"]
    if isinstance(default, str):
        default = canon_text(default)
    spec = HyperParamSpec(name=name, kind=kind, domain=domain, default=default,
                          flexibility="tunable")
    if not spec.contains(default):
        raise DefaultOutOfDomain(
            f"default {default!r} outside domain of {name!r}",
            field=f"{path}.default")

    flexibility = canon_token(_require_string(obj["flexibility"], f"{path}.flexibility"))
    if flexibility not in FLEXIBILITIES:
        raise SchemaViolation(
            f"flexibility must be one of {FLEXIBILITIES}, got {obj['flexibility']!r}",
            field=f"{path}.flexibility")
    return replace(spec, flexibility=flexibility)


def model_card_from_obj(obj: Any) -> ModelCard:
    if not isinstance(obj, dict):
        raise SchemaViolation("model card must be a JSON object", field="model_card")
    _require_keys(obj, MODEL_CARD_KEYS, MODEL_CARD_KEYS, "model_card")

    name = _require_string(obj["name"], "model_card.name", non_empty=True)
    structure = _require_string(obj["structure"], "model_card.structure")
    description = _require_string(obj["description"], "model_card.description")

    raw_hparams = obj["arch_hparams"]
    if not isinstance(raw_hparams, dict):
        raise SchemaViolation("arch_hparams must be an object",
                              field="model_card.arch_hparams")
    hparams: dict[str, HyperParamSpec] = {}
    for raw_name, raw_spec in raw_hparams.items():
        spec = _hparam_spec_from_obj(raw_name, raw_spec)
        if spec.name in hparams:
            raise SchemaViolation(
                f"hyperparameter names collide after canonicalization: {spec.name!r}",
                field=f"model_card.arch_hparams.{raw_name}")
        hparams[spec.name] = spec
    hparams = dict(sorted(hparams.items()))
    return ModelCard(name=name, structure=structure, description=description,
                     arch_hparams=hparams)


def parse_data_card(document: bytes | str) -> DataCard:
    return data_card_from_obj(_load_json(document))


def parse_model_card(document: bytes | str) -> ModelCard:
    return model_card_from_obj(_load_json(document))


# --- serialization ------------------------------------------------------------

def data_card_to_obj(card: DataCard) -> dict[str, Any]:
    obj: dict[str, Any] = {
        "name": card.name,
        "input_type": card.input_type,
        "label_space": list(card.label_space) if card.has_class_list else card.label_space,
    }
    if card.scale is not None:
        obj["scale"] = card.scale
    obj["task_description"] = card.task_description
    obj["eval_metrics"] = list(card.eval_metrics)
    return obj


def model_card_to_obj(card: ModelCard) -> dict[str, Any]:
    return {
        "name": card.name,
        "structure": card.structure,
        "description": card.description,
        "arch_hparams": {
            name: {
                "kind": spec.kind,
                "domain": list(spec.domain),
                "default": spec.default,
                "flexibility": spec.flexibility,
            }
            for name, spec in card.arch_hparams.items()
        },
    }


def serialize_data_card(card: DataCard) -> bytes:
    return json.dumps(data_card_to_obj(card), indent=2).encode("utf-8")


def serialize_model_card(card: ModelCard) -> bytes:
    return json.dumps(model_card_to_obj(card), indent=2).encode("utf-8")


# --- config validation ----------------------------------------------------------

def validate_config(config: HyperParamConfig,
                    space: HyperParamSpace) -> list[ConfigViolation]:
    """Check every config entry against the space; empty report means valid."""
    violations = []
    for key in sorted(config):
        value = config[key]
        spec = space.get(key)
        if spec is None:
            violations.append(ConfigViolation(key, "no such hyperparameter in space"))
            continue
        if spec.kind == "categorical":
            if not isinstance(value, str):
                violations.append(ConfigViolation(key, "kind mismatch: expected category string"))
            elif value not in spec.domain:
                violations.append(ConfigViolation(
                    key, f"value {value!r} not in categories {list(spec.domain)}"))
        elif spec.kind == "integer":
            if isinstance(value, bool) or not isinstance(value, int):
                violations.append(ConfigViolation(key, "kind mismatch: expected integer"))
            elif not spec.domain[0] <= value <= spec.domain[1]:
                violations.append(ConfigViolation(
                    key, f"value {value} outside domain {list(spec.domain)}"))
        else:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                violations.append(ConfigViolation(key, "kind mismatch: expected number"))
            elif not math.isfinite(float(value)):
                violations.append(ConfigViolation(key, "value must be finite"))
            elif not spec.domain[0] <= float(value) <= spec.domain[1]:
                violations.append(ConfigViolation(
                    key, f"value {render_number(value)} outside domain {list(spec.domain)}"))
    return violations
