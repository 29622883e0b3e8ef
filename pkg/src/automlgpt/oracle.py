"""Language-model backend interface, deterministic mock, and response grammar.

A backend turns a prompt paragraph into a four-section response:

    ## Data Processing
    ## Model Architecture
    ## Hyperparameter Tuning
    ## Predicted Training Log

The mock backend ("mock-v1") is a pure function of the prompt text with a
closed-form performance surface, unimodal in log10(learning_rate), so
tuning behaviour can be verified against a known optimum:

    S(config)     = max(0, 0.95 - 0.15 * (log10 lr - log10 lr*)^2)
    lr*           = 10^-(3 + FNV1a64(dataset name) mod 3)
    val_metric(e) = S * (1 - exp(-e/4)),  e = 1..12
    train_loss(e) = exp(-e/3)
    val_loss(e)   = 1 - val_metric(e)
"""

from __future__ import annotations

import json
import math
import os
import re
import threading
import time
from dataclasses import dataclass, field
from typing import Protocol

import httpx

from .cards import HyperParamConfig, render_value
from .composer import PromptParagraph
from .encoder import fnv1a64
from .errors import (
    AuthFailure,
    BudgetExceeded,
    EmptyHyperparameters,
    EndpointUnreachable,
    MalformedPrompt,
    MissingSection,
)
from .training_log import (  # re-exported: log parsing is part of this surface
    LogEntry,
    TrainingLog,
    parse_training_log,
    serialize_training_log,
)

__all__ = [
    "BackendResponse", "Backend", "MockBackend", "HttpBackend",
    "mock_complete", "http_complete", "parse_response",
    "LogEntry", "TrainingLog", "parse_training_log", "serialize_training_log",
    "MOCK_EPOCHS", "mock_surface_score", "mock_optimal_lr", "mock_final_metric",
]

SECTION_HEADERS = ("## Data Processing", "## Model Architecture",
                   "## Hyperparameter Tuning", "## Predicted Training Log")
PROMPT_SECTIONS = ("TASK:", "DATA CARD:", "MODEL CARD:", "EVALUATION:", "REQUESTS:")

PROCESSING_STEPS = {
    "image": ("resize", "normalize", "augment"),
    "text": ("tokenize", "lowercase", "remove_stopwords"),
    "tabular": ("impute", "standardize", "encode_categoricals"),
}

MOCK_EPOCHS = 12
_LR_STEP = 0.25  # log10 step the mock nudges lr by on follow-ups

_HPARAM_LINE_RE = re.compile(r"^[a-z_][a-z0-9_]*: .+$")
_PROMPT_HPARAM_RE = re.compile(r"^- ([a-z_][a-z0-9_]*): kind=(\S+) domain=")


@dataclass(frozen=True)
class BackendResponse:
    data_processing: tuple[str, ...]
    architecture: str
    hyperparameters: HyperParamConfig
    predicted_log: TrainingLog
    raw_text: str
    warnings: tuple[str, ...] = ()


class Backend(Protocol):
    id: str

    def complete(self, prompt: PromptParagraph) -> str: ...


# --- mock surface --------------------------------------------------------------

def mock_optimal_lr(dataset_name: str) -> float:
    return 10.0 ** -(3 + fnv1a64(dataset_name.encode("utf-8")) % 3)


def mock_surface_score(lr: float, optimal_lr: float) -> float:
    offset = math.log10(lr) - math.log10(optimal_lr)
    return max(0.0, 0.95 - 0.15 * offset * offset)


def mock_final_metric(lr: float, optimal_lr: float, epochs: int = MOCK_EPOCHS) -> float:
    return mock_surface_score(lr, optimal_lr) * (1 - math.exp(-epochs / 4))


# --- prompt introspection (mock side) -------------------------------------------

@dataclass
class _PromptFacts:
    dataset_name: str
    input_type: str
    hyperparameters: dict[str, object]
    lr_domain: tuple[float, float] | None
    has_requests: bool
    has_log: bool


def _parse_prompt_hparam_line(line: str) -> tuple[str, str, str, object] | None:
    m = _PROMPT_HPARAM_RE.match(line)
    if m is None:
        return None
    name, kind = m.group(1), m.group(2)
    rest = line[m.end():]
    try:
        domain, end = json.JSONDecoder().raw_decode(rest)
    except json.JSONDecodeError:
        return None
    rest = rest[end:]
    if not rest.startswith(" default="):
        return None
    body = rest[len(" default="):]
    # flexibility is the final field and enum-valued, so rsplit is unambiguous
    # even when a categorical default contains " flexibility=".
    value_text, sep, flex = body.rpartition(" flexibility=")
    if not sep or flex not in ("fixed", "tunable"):
        return None
    return name, kind, value_text, domain


def _coerce_value(text: str) -> object:
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def _read_prompt(prompt_text: str) -> _PromptFacts:
    seen = {header: False for header in PROMPT_SECTIONS}
    section = None
    dataset_name = ""
    input_type = ""
    hyperparameters: dict[str, object] = {}
    lr_domain = None
    has_requests = False
    has_log = False

    for line in prompt_text.splitlines():
        matched_header = next(
            (h for h in PROMPT_SECTIONS if line.startswith(h)), None)
        if matched_header:
            seen[matched_header] = True
            section = matched_header
            if matched_header == "REQUESTS:" and line.strip() != "REQUESTS: none":
                has_requests = True
            continue
        if line.startswith("LOG: "):
            has_log = True
            section = None
            continue
        if section == "DATA CARD:":
            if line.startswith("name: "):
                dataset_name = line[len("name: "):]
            elif line.startswith("input type: "):
                input_type = line[len("input type: "):]
        elif section == "MODEL CARD:":
            parsed = _parse_prompt_hparam_line(line)
            if parsed:
                name, kind, value_text, domain = parsed
                value = value_text if kind == "categorical" else _coerce_value(value_text)
                hyperparameters[name] = value
                if name == "learning_rate" and kind != "categorical":
                    lr_domain = (float(domain[0]), float(domain[1]))
        elif section == "REQUESTS:":
            if line.startswith("- "):
                has_requests = True

    missing = [h for h, ok in seen.items() if not ok]
    if missing:
        raise MalformedPrompt(f"prompt is missing sections: {missing}")
    if not dataset_name or input_type not in PROCESSING_STEPS:
        raise MalformedPrompt("prompt DATA CARD lacks a usable name/input type")
    return _PromptFacts(dataset_name, input_type, hyperparameters, lr_domain,
                        has_requests, has_log)


# --- mock backend ---------------------------------------------------------------

def mock_complete(prompt: PromptParagraph) -> str:
    """Deterministic four-section response derived from the prompt alone."""
    facts = _read_prompt(prompt.text)
    config = dict(facts.hyperparameters)
    optimal_lr = mock_optimal_lr(facts.dataset_name)

    lr = config.get("learning_rate")
    if isinstance(lr, (int, float)) and not isinstance(lr, bool) and lr > 0:
        lr = float(lr)
        if facts.has_requests or facts.has_log:
            # Nudge one step toward the surface optimum, clamped to the domain.
            offset = math.log10(optimal_lr) - math.log10(lr)
            step = math.copysign(min(_LR_STEP, abs(offset)), offset)
            lr = 10.0 ** (math.log10(lr) + step)
            if facts.lr_domain:
                lr = min(max(lr, facts.lr_domain[0]), facts.lr_domain[1])
            config["learning_rate"] = lr
        score = mock_surface_score(lr, optimal_lr)
    else:
        score = 0.95  # no usable learning rate: flat surface

    lines = [SECTION_HEADERS[0]]
    lines += [f"- {step}" for step in PROCESSING_STEPS[facts.input_type]]
    lines.append(SECTION_HEADERS[1])
    lines.append(f"Train {facts.dataset_name} end to end; the architecture "
                 f"follows the model card unchanged.")
    lines.append(SECTION_HEADERS[2])
    lines += [f"{name}: {render_value(value)}" for name, value in sorted(config.items())]
    lines.append(SECTION_HEADERS[3])
    for epoch in range(1, MOCK_EPOCHS + 1):
        val_metric = score * (1 - math.exp(-epoch / 4))
        entry = LogEntry(epoch=epoch, train_loss=math.exp(-epoch / 3),
                         val_loss=1 - val_metric, val_metric=val_metric)
        lines.append(serialize_training_log(TrainingLog((entry,))))
    return "\n".join(lines) + "\n"


class MockBackend:
    id = "mock-v1"

    def complete(self, prompt: PromptParagraph) -> str:
        return mock_complete(prompt)


# --- response parsing -------------------------------------------------------------

def parse_response(raw: str) -> BackendResponse:
    positions = []
    lines = raw.splitlines()
    for header in SECTION_HEADERS:
        try:
            positions.append(lines.index(header))
        except ValueError:
            raise MissingSection(f"response lacks section {header!r}") from None
    if positions != sorted(positions):
        raise MissingSection("response sections out of order")

    def section(i: int) -> list[str]:
        end = positions[i + 1] if i + 1 < len(positions) else len(lines)
        return lines[positions[i] + 1:end]

    steps = tuple(line[2:].strip() for line in section(0)
                  if line.startswith("- "))
    architecture = "\n".join(section(1)).strip()

    hyperparameters: HyperParamConfig = {}
    warnings: list[str] = []
    for line in section(2):
        if not line.strip():
            continue
        if not _HPARAM_LINE_RE.match(line):
            warnings.append(f"unparseable hyperparameter line: {line!r}")
            continue
        name, value_text = line.split(": ", 1)
        hyperparameters[name] = _coerce_value(value_text)
    if not hyperparameters:
        raise EmptyHyperparameters("hyperparameter section has no parseable lines")

    predicted_log = parse_training_log("\n".join(section(3)))
    return BackendResponse(data_processing=steps, architecture=architecture,
                           hyperparameters=hyperparameters,
                           predicted_log=predicted_log, raw_text=raw,
                           warnings=tuple(warnings))


# --- HTTP backend -----------------------------------------------------------------

_RETRYABLE_STATUS = (429, 502, 503, 504)


@dataclass
class HttpBackend:
    """Client for a real completion endpoint (POST {"prompt": text} -> text)."""

    url: str = ""
    api_key: str = ""
    max_requests: int | None = None
    attempts: int = 3
    backoff_base: float = 1.0
    backoff_factor: float = 2.0
    timeout: float = 60.0
    _sent: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self) -> None:
        self.url = self.url or os.environ.get("AUTOMLGPT_API_URL", "")
        self.api_key = self.api_key or os.environ.get("AUTOMLGPT_API_KEY", "")
        self.id = self.url or "http"

    def _charge_budget(self) -> None:
        with self._lock:
            if self.max_requests is not None and self._sent >= self.max_requests:
                raise BudgetExceeded(
                    f"request budget of {self.max_requests} exhausted")
            self._sent += 1

    def complete(self, prompt: PromptParagraph) -> str:
        self._charge_budget()
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        last_error: Exception | None = None
        for attempt in range(self.attempts):
            if attempt:
                time.sleep(self.backoff_base * self.backoff_factor ** (attempt - 1))
            try:
                response = httpx.post(self.url, json={"prompt": prompt.text},
                                      headers=headers, timeout=self.timeout)
            except httpx.HTTPError as exc:
                last_error = exc
                continue
            if response.status_code in (401, 403):
                raise AuthFailure(f"endpoint rejected credentials "
                                  f"({response.status_code})")
            if response.status_code in _RETRYABLE_STATUS:
                last_error = RuntimeError(f"status {response.status_code}")
                continue
            if response.status_code >= 400:
                raise EndpointUnreachable(
                    f"endpoint returned status {response.status_code}")
            return response.text
        raise EndpointUnreachable(
            f"endpoint unreachable after {self.attempts} attempts: {last_error}")


def http_complete(prompt: PromptParagraph, **kwargs) -> str:
    return HttpBackend(**kwargs).complete(prompt)
