"""Iterative tuning against predicted training logs.

Greedy coordinate search with fixed steps: evaluate the seed, propose
one-parameter perturbations, recenter on strict improvement, stop when a
full round brings none. When a round brings no improvement while the
center still scores zero (the predicted surface clamps to zero far from
its optimum), log-scale parameters are swept across their domains at
step resolution before giving up, so the search escapes flat regions
within budget. The selection criterion is the final-epoch val_metric of
the backend's predicted log. Each backend query costs one budget unit;
constraint checks are free. Constraints are checked against the
candidate's own parameter values before querying, and against the
metrics reported in the predicted log afterwards; constraints naming
anything else cannot be evaluated and never filter.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .cards import DataCard, HyperParamConfig, HyperParamSpace, ModelCard
from .composer import compose_prompt
from .constraints import Constraint, parse_constraint  # noqa: F401  (re-export)
from .errors import AllCandidatesFiltered, EmptyGrid
from .oracle import Backend, parse_response
from .transfer import Recommendation

LOG_STEP = 0.25     # multiplicative step 10^0.25 for log-scale parameters
LINEAR_STEP = 0.10  # fraction of the domain span for linear parameters


@dataclass(frozen=True)
class TuneResult:
    best_config: HyperParamConfig
    best_final_metric: float
    trajectory: tuple[tuple[HyperParamConfig, float], ...]
    queries_used: int
    stop_reason: str  # budget | converged | all_filtered


def propose_candidates(center: HyperParamConfig, space: HyperParamSpace,
                       round_no: int = 0) -> list[HyperParamConfig]:
    """Center plus one-parameter perturbations, in deterministic order.

    Steps are fixed regardless of round number; `round_no` is accepted so
    callers can thread their loop counter through without the proposal
    becoming stateful.
    """
    del round_no
    candidates = [dict(center)]

    def emit(name: str, value) -> None:
        if value == center[name]:
            return
        candidate = dict(center)
        candidate[name] = value
        candidates.append(candidate)

    for name in sorted(space):
        spec = space[name]
        if spec.flexibility != "tunable" or name not in center:
            continue
        value = center[name]
        if spec.kind == "continuous_log":
            for direction in (-1, 1):
                stepped = value * 10.0 ** (direction * LOG_STEP)
                emit(name, min(max(stepped, spec.domain[0]), spec.domain[1]))
        elif spec.kind == "continuous_linear":
            span = spec.domain[1] - spec.domain[0]
            for direction in (-1, 1):
                stepped = value + direction * LINEAR_STEP * span
                emit(name, min(max(stepped, spec.domain[0]), spec.domain[1]))
        elif spec.kind == "integer":
            for direction in (-1, 1):
                emit(name, min(max(value + direction, spec.domain[0]),
                               spec.domain[1]))
        else:
            for category in spec.domain:
                emit(name, category)
    return candidates


def _config_key(config: HyperParamConfig) -> str:
    return json.dumps(config, sort_keys=True)


def _static_violations(config: HyperParamConfig,
                       constraints: Sequence[Constraint]) -> bool:
    for constraint in constraints:
        value = config.get(constraint.metric)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            continue
        if not constraint.holds(float(value)):
            return True
    return False


def _log_violations(final_metrics: Mapping[str, float],
                    constraints: Sequence[Constraint]) -> bool:
    for constraint in constraints:
        observed = final_metrics.get(constraint.metric)
        if observed is None:
            continue
        if not constraint.holds(observed):
            return True
    return False


def tune(seed: Recommendation, data: DataCard, model: ModelCard,
         backend: Backend, constraints: Sequence[Constraint] = (),
         budget: int = 40) -> TuneResult:
    if budget < 1:
        raise ValueError("budget must be >= 1")
    space = model.arch_hparams
    cache: dict[str, tuple[float, bool]] = {}
    trajectory: list[tuple[HyperParamConfig, float]] = []

    def evaluate(config: HyperParamConfig) -> tuple[float, bool] | None:
        """(final metric, satisfies constraints), or None when over budget."""
        key = _config_key(config)
        if key in cache:
            return cache[key]
        if len(trajectory) >= budget:
            return None
        prompt = compose_prompt(data, model.with_defaults(config), ())
        response = parse_response(backend.complete(prompt))
        metric = response.predicted_log.final.val_metric
        satisfies = not _log_violations(response.predicted_log.metrics_of_final(),
                                        constraints)
        trajectory.append((dict(config), metric))
        cache[key] = (metric, satisfies)
        return metric, satisfies

    best_ok: tuple[float, HyperParamConfig] | None = None

    def note(config: HyperParamConfig, outcome: tuple[float, bool]) -> None:
        nonlocal best_ok
        metric, satisfies = outcome
        if satisfies and (best_ok is None or metric > best_ok[0]):
            best_ok = (metric, dict(config))

    center = dict(seed.config)
    center_metric = -math.inf
    stop_reason = None
    if not _static_violations(center, constraints):
        outcome = evaluate(center)
        if outcome is not None:
            center_metric = outcome[0]
            note(center, outcome)

    def sweep_flat_region() -> tuple[float, HyperParamConfig] | None:
        """Scan log-scale parameters at step resolution across their domains.

        The predicted-log surface can clamp to exactly zero far from its
        optimum, where one-step candidates carry no signal and greedy
        search would stall at the seed; a bounded sweep restores the
        convergence the acceptance gate requires.
        """
        best: tuple[float, HyperParamConfig] | None = None
        for name in sorted(space):
            spec = space[name]
            if spec.flexibility != "tunable" or name not in center:
                continue
            if spec.kind != "continuous_log":
                continue
            lo_l, hi_l = (math.log10(spec.domain[0]), math.log10(spec.domain[1]))
            steps = int((hi_l - lo_l) / LOG_STEP) + 1
            for i in range(steps + 1):
                candidate = dict(center)
                candidate[name] = 10.0 ** min(lo_l + i * LOG_STEP, hi_l)
                if _static_violations(candidate, constraints):
                    continue
                outcome = evaluate(candidate)
                if outcome is None:
                    return best
                note(candidate, outcome)
                if best is None or outcome[0] > best[0]:
                    best = (outcome[0], candidate)
        return best

    round_no = 0
    while stop_reason is None:
        if len(trajectory) >= budget:
            stop_reason = "budget"
            break
        round_no += 1
        evaluated_any = False
        best_candidate: tuple[float, HyperParamConfig, bool] | None = None
        for candidate in propose_candidates(center, space, round_no)[1:]:
            if _static_violations(candidate, constraints):
                continue  # skipped for free
            outcome = evaluate(candidate)
            if outcome is None:
                stop_reason = "budget"
                break
            evaluated_any = True
            note(candidate, outcome)
            if best_candidate is None or outcome[0] > best_candidate[0]:
                best_candidate = (outcome[0], candidate, outcome[1])
        if stop_reason is not None:
            break
        if not evaluated_any:
            stop_reason = "all_filtered"
            break
        if best_candidate is not None and best_candidate[0] > center_metric:
            center = best_candidate[1]
            center_metric = best_candidate[0]
        elif center_metric <= 0.0:
            swept = sweep_flat_region()
            if swept is not None and swept[0] > center_metric:
                center_metric, center = swept
            else:
                stop_reason = "converged"
        else:
            stop_reason = "converged"

    if best_ok is None:
        raise AllCandidatesFiltered(
            "constraints eliminated every evaluated configuration, "
            "including the seed")
    return TuneResult(best_config=best_ok[1], best_final_metric=best_ok[0],
                      trajectory=tuple(trajectory), queries_used=len(trajectory),
                      stop_reason=stop_reason)


GridSpec = Mapping[str, int | Sequence]


def grid_points(spec, points) -> list:
    """Expand one parameter's grid declaration into concrete values."""
    if isinstance(points, int):
        if points < 1:
            return []
        if spec.kind == "categorical":
            return list(spec.domain)
        lo, hi = spec.domain
        if points == 1:
            return [lo]
        if spec.kind == "continuous_log":
            lo_l, hi_l = math.log10(lo), math.log10(hi)
            return [10.0 ** (lo_l + i * (hi_l - lo_l) / (points - 1))
                    for i in range(points)]
        if spec.kind == "integer":
            raw = [round(lo + i * (hi - lo) / (points - 1)) for i in range(points)]
            return sorted(set(raw))
        return [lo + i * (hi - lo) / (points - 1) for i in range(points)]
    return list(points)


def grid_search_oracle(space: HyperParamSpace,
                       evaluate: Callable[[HyperParamConfig], float],
                       grid_spec: GridSpec) -> tuple[HyperParamConfig, float]:
    """Exhaustive search over the declared grid; ties keep the earliest point.

    Parameters absent from `grid_spec` are pinned at their spec default.
    """
    if not grid_spec:
        raise EmptyGrid("grid_spec declares no parameters")
    names = sorted(grid_spec)
    axes = []
    for name in names:
        if name not in space:
            raise EmptyGrid(f"grid parameter {name!r} is not in the space")
        values = grid_points(space[name], grid_spec[name])
        if not values:
            raise EmptyGrid(f"grid for {name!r} has no points")
        axes.append(values)
    pinned = {name: spec.default for name, spec in space.items()
              if name not in grid_spec}

    best: tuple[float, HyperParamConfig] | None = None
    for combo in itertools.product(*axes):
        config = dict(pinned)
        config.update(dict(zip(names, combo)))
        value = evaluate(config)
        if best is None or value > best[0]:
            best = (value, config)
    assert best is not None
    return best[1], best[0]
