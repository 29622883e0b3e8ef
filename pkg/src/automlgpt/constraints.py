"""User-request constraint mini-language.

Grammar: `<metric_ident> <op> <number> [<unit_ident>]` with op one of
<, <=, >, >= and identifiers in lowercase snake_case.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .cards import render_number
from .errors import BadConstraint

OPS = {"<": "lt", "<=": "le", ">": "gt", ">=": "ge"}
OP_SYMBOLS = {v: k for k, v in OPS.items()}

_CONSTRAINT_RE = re.compile(
    r"^\s*([a-z_][a-z0-9_]*)\s*(<=|>=|<|>)\s*"
    r"([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*"
    r"(?:([a-z_][a-z0-9_]*)\s*)?$"
)


@dataclass(frozen=True)
class Constraint:
    metric: str
    op: str
    value: float
    unit: str = ""

    def holds(self, observed: float) -> bool:
        if self.op == "lt":
            return observed < self.value
        if self.op == "le":
            return observed <= self.value
        if self.op == "gt":
            return observed > self.value
        return observed >= self.value


def parse_constraint(text: str) -> Constraint:
    m = _CONSTRAINT_RE.match(text)
    if m is None:
        # Report where parsing stopped making progress: the first char that
        # cannot begin a metric identifier, or the op/number position.
        stripped = text.lstrip()
        offset = len(text) - len(stripped)
        ident = re.match(r"[a-z_][a-z0-9_]*", stripped)
        if ident is None:
            raise BadConstraint("expected metric identifier", position=offset)
        raise BadConstraint("expected `<metric> <op> <number> [unit]`",
                            position=offset + ident.end())
    metric, op, number, unit = m.groups()
    value = float(number)
    if not math.isfinite(value):
        raise BadConstraint("constraint value must be finite", position=m.start(3))
    return Constraint(metric=metric, op=OPS[op], value=value, unit=unit or "")


def render_constraint(constraint: Constraint) -> str:
    text = (f"{constraint.metric} {OP_SYMBOLS[constraint.op]} "
            f"{render_number(constraint.value)}")
    if constraint.unit:
        text += f" {constraint.unit}"
    return text


def looks_like_constraint(text: str) -> bool:
    return _CONSTRAINT_RE.match(text) is not None
