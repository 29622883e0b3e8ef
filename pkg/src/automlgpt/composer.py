"""Fixed-format prompt rendering.

The prompt paragraph has five sections in fixed order: TASK, DATA CARD,
MODEL CARD, EVALUATION, REQUESTS (a follow-up inserts a LOG section
before REQUESTS). Every substituted card field is tracked as a
provenance span over the UTF-8 byte range it occupies, and rendering is
byte-deterministic so prompts can be frozen as golden fixtures. Card
values are inserted canonicalized; class lists and metric lists render
as JSON arrays, which keeps the text injective in the card content.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .cards import DataCard, ModelCard, render_number, render_value
from .constraints import Constraint, render_constraint
from .errors import EmptyLog
from .training_log import TrainingLog, format_log_line

REQUEST_LINE_PREFIX = {"constraint": "- constraint: ", "metric_addition": "- metric: ",
                       "free_text": "- note: "}


@dataclass(frozen=True)
class Span:
    field_path: str
    start: int  # byte offset into the UTF-8 encoding of the text
    end: int


@dataclass(frozen=True)
class PromptParagraph:
    text: str
    spans: tuple[Span, ...]


@dataclass(frozen=True)
class UserRequest:
    kind: str  # constraint | metric_addition | free_text
    payload: Constraint | str

    def text(self) -> str:
        if isinstance(self.payload, Constraint):
            return render_constraint(self.payload)
        return self.payload


class _Builder:
    def __init__(self) -> None:
        self._parts: list[str] = []
        self._blen = 0
        self.spans: list[Span] = []

    def lit(self, text: str) -> None:
        self._parts.append(text)
        self._blen += len(text.encode("utf-8"))

    def field(self, path: str, value: str) -> None:
        if not value:
            self.lit(value)
            return
        start = self._blen
        self.lit(value)
        self.spans.append(Span(path, start, self._blen))

    def json_str_list(self, path_prefix: str, entries: tuple[str, ...]) -> None:
        # Spans are only attached when the JSON-escaped form equals the raw
        # value; escaped entries are still rendered, just without a marker.
        self.lit("[")
        for i, entry in enumerate(entries):
            if i:
                self.lit(", ")
            escaped = json.dumps(entry)[1:-1]
            self.lit('"')
            if escaped == entry:
                self.field(f"{path_prefix}[{i}]", entry)
            else:
                self.lit(escaped)
            self.lit('"')
        self.lit("]")

    def build(self) -> PromptParagraph:
        return PromptParagraph(text="".join(self._parts), spans=tuple(self.spans))


def _render_domain(b: _Builder, path: str, spec) -> None:
    if spec.kind == "categorical":
        b.json_str_list(f"{path}.domain", spec.domain)
    else:
        b.lit("[")
        b.field(f"{path}.domain[0]", render_number(spec.domain[0]))
        b.lit(", ")
        b.field(f"{path}.domain[1]", render_number(spec.domain[1]))
        b.lit("]")


def _render_requests(b: _Builder, requests: tuple[UserRequest, ...] | list[UserRequest]) -> None:
    if not requests:
        b.lit("REQUESTS: none\n")
        return
    b.lit("REQUESTS:\n")
    for i, request in enumerate(requests):
        b.lit(REQUEST_LINE_PREFIX[request.kind])
        b.field(f"requests[{i}]", request.text())
        b.lit("\n")


def compose_prompt(data: DataCard, model: ModelCard,
                   requests: list[UserRequest] | tuple[UserRequest, ...] = ()) -> PromptParagraph:
    b = _Builder()

    b.lit("TASK: ")
    b.field("data.task_description", data.task_description)
    b.lit("\n")

    b.lit("DATA CARD:\nname: ")
    b.field("data.name", data.name)
    b.lit("\ninput type: ")
    b.field("data.input_type", data.input_type)
    b.lit("\n")
    if data.has_class_list:
        b.lit("label space (classes): ")
        b.json_str_list("data.label_space", data.label_space)
    else:
        b.lit("label space (text): ")
        b.field("data.label_space", data.label_space)
    b.lit("\n")
    if data.scale is not None:
        b.lit("scale: ")
        b.field("data.scale", render_number(data.scale))
        b.lit("\n")

    b.lit("MODEL CARD:\nname: ")
    b.field("model.name", model.name)
    b.lit("\nstructure: ")
    b.field("model.structure", model.structure)
    b.lit("\ndescription: ")
    b.field("model.description", model.description)
    b.lit("\nhyperparameters:\n")
    for name in sorted(model.arch_hparams):
        spec = model.arch_hparams[name]
        path = f"model.arch_hparams.{name}"
        b.lit("- ")
        b.field(f"{path}.name", name)
        b.lit(": kind=")
        b.field(f"{path}.kind", spec.kind)
        b.lit(" domain=")
        _render_domain(b, path, spec)
        b.lit(" default=")
        b.field(f"{path}.default", render_value(spec.default))
        b.lit(" flexibility=")
        b.field(f"{path}.flexibility", spec.flexibility)
        b.lit("\n")

    b.lit("EVALUATION:\nmetrics: ")
    b.json_str_list("data.eval_metrics", data.eval_metrics)
    b.lit("\n")

    _render_requests(b, tuple(requests))
    return b.build()


def compose_followup(previous: PromptParagraph, log: TrainingLog,
                     new_request: UserRequest) -> PromptParagraph:
    """Follow-up prompt: carried card sections, final-epoch LOG line, new request."""
    if len(log) == 0:
        raise EmptyLog("cannot compose a follow-up from an empty training log")

    cut = _requests_section_offset(previous.text)
    head = previous.text[:cut]
    head_bytes = len(head.encode("utf-8"))

    b = _Builder()
    b.lit(head)
    b.spans.extend(s for s in previous.spans if s.end <= head_bytes)
    b.lit(f"LOG: {format_log_line(log.final)}\n")
    _render_requests(b, (new_request,))
    paragraph = b.build()
    return PromptParagraph(text=paragraph.text,
                           spans=tuple(sorted(paragraph.spans, key=lambda s: s.start)))


def _requests_section_offset(text: str) -> int:
    offset = 0
    for line in text.splitlines(keepends=True):
        if line.startswith("REQUESTS:") or line.startswith("LOG: "):
            return offset
        offset += len(line)
    raise ValueError("prompt has no REQUESTS section to replace")
