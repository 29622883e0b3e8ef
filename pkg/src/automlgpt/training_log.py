"""Training-log records and their line grammar.

One line per epoch:

    epoch <uint>: train_loss=<float> val_loss=<float> val_metric=<float>

Floats serialize canonically to 4 decimal places. Epochs start at 1 and
increase by exactly 1. Both predicted logs (backend) and real logs
(bench trainer) share this shape.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import BadLogLine, NonMonotoneEpochs

_LINE_RE = re.compile(
    r"^epoch (\d+): train_loss=(\d+\.\d{4}) val_loss=(\d+\.\d{4}) "
    r"val_metric=(\d+\.\d{4})$"
)


@dataclass(frozen=True)
class LogEntry:
    epoch: int
    train_loss: float
    val_loss: float
    val_metric: float


@dataclass(frozen=True)
class TrainingLog:
    entries: tuple[LogEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def final(self) -> LogEntry:
        return self.entries[-1]

    def metrics_of_final(self) -> dict[str, float]:
        last = self.final
        return {"train_loss": last.train_loss, "val_loss": last.val_loss,
                "val_metric": last.val_metric}


def format_log_line(entry: LogEntry) -> str:
    return (f"epoch {entry.epoch}: train_loss={entry.train_loss:.4f} "
            f"val_loss={entry.val_loss:.4f} val_metric={entry.val_metric:.4f}")


def serialize_training_log(log: TrainingLog) -> str:
    return "\n".join(format_log_line(e) for e in log.entries)


def parse_training_log(text: str) -> TrainingLog:
    entries: list[LogEntry] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        m = _LINE_RE.match(line)
        if m is None:
            raise BadLogLine(line_no, f"does not match log grammar: {line!r}")
        epoch = int(m.group(1))
        if epoch < 1:
            raise BadLogLine(line_no, "epoch must be >= 1")
        train_loss, val_loss, val_metric = (float(m.group(i)) for i in (2, 3, 4))
        if val_metric > 1.0:
            raise BadLogLine(line_no, "val_metric must be in [0, 1]")
        entries.append(LogEntry(epoch, train_loss, val_loss, val_metric))
    expected = list(range(1, len(entries) + 1))
    if [e.epoch for e in entries] != expected:
        raise NonMonotoneEpochs(
            f"epochs must be 1..{len(entries)} without gaps, "
            f"got {[e.epoch for e in entries]}")
    return TrainingLog(entries=tuple(entries))
