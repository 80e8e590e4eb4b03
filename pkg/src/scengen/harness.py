"""Oracles and metrics over compiled games.

``enumerate_paths`` brute-forces every player action sequence (bounded by
per-state visit counts so penalty loops stay finite) and is the ground
truth the linearity guarantee is checked against: in a linear scenario
every completed run must end at the same exit, whatever the choices.
``measure_pipeline`` times the parse/validate/compile chain, the
artifact-scale counterpart of comparing generator hours against developer
weeks.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .analyzer import validate
from .assets import AssetCatalog, EMPTY_CATALOG
from .compiler import GameDefinition, compile, emit_bundle
from .engine import (
    EventKind,
    Outcome,
    Status,
    apply_action,
    available_actions,
    run_script,
    start_session,
    tick,
)
from .parser import parse_or_raise


@dataclass(frozen=True)
class Path:
    actions: tuple[tuple[str, str | None], ...]
    terminal: str
    score: int


@dataclass(frozen=True)
class PathSet:
    paths: tuple[Path, ...]
    truncated: bool  # the max_paths cap stopped enumeration early


@dataclass(frozen=True)
class PipelineMetrics:
    parse_ms: float
    validate_ms: float
    compile_ms: float
    states: int
    transitions: int
    entities: int
    bundle_bytes: int


@dataclass(frozen=True)
class RunComparison:
    outcomes: tuple[Outcome, ...]
    verdict: str  # "invariant" or "violated"


def enumerate_paths(definition: GameDefinition, max_loop_visits: int = 1,
                    max_paths: int = 100000) -> PathSet:
    """Depth-first enumeration of all player action sequences.

    Any state may be visited at most ``max_loop_visits + 1`` times along
    one path (NPC-driven state changes count too); sequences that would
    exceed the bound are abandoned.  Recorded paths are exactly those
    reaching a terminal status, each with its final state and score.
    """
    limit = max_loop_visits + 1
    paths: list[Path] = []
    truncated = False

    base = start_session(definition, seed=0)
    base_visits = {base.current_state_index: 1}

    def walk(session, visits: dict[int, int],
             actions: tuple[tuple[str, str | None], ...]) -> None:
        nonlocal truncated
        if truncated:
            return
        if session.status is not Status.RUNNING:
            if len(paths) >= max_paths:
                truncated = True
                return
            terminal = definition.states[session.current_state_index].name
            paths.append(Path(actions=actions, terminal=terminal, score=session.score))
            return
        for action, _label in available_actions(session):
            child = session.clone()
            result = apply_action(child, action.name, action.target)
            events = list(result.events)
            if child.status is Status.RUNNING:
                events.extend(tick(child))
            child_visits = dict(visits)
            within_bound = True
            for event in events:
                if event.kind is EventKind.STATE_ENTERED:
                    index = event.payload["index"]
                    child_visits[index] = child_visits.get(index, 0) + 1
                    if child_visits[index] > limit:
                        within_bound = False
            if not within_bound:
                continue
            walk(child, child_visits, actions + ((action.name, action.target),))

    walk(base, base_visits, ())
    ordered = tuple(sorted(paths, key=lambda p: p.actions))
    return PathSet(paths=ordered, truncated=truncated)


def measure_pipeline(source: str,
                     catalog: AssetCatalog = EMPTY_CATALOG) -> PipelineMetrics:
    """Time the full generation chain on one scenario source."""
    t0 = time.monotonic()
    doc = parse_or_raise(source)
    t1 = time.monotonic()
    report = validate(doc)
    t2 = time.monotonic()
    if not report.ok:
        raise ValueError("scenario failed validation: "
                         + "; ".join(str(d) for d in report.errors()))
    definition = compile(doc, catalog)
    bundle = emit_bundle(definition)
    t3 = time.monotonic()
    return PipelineMetrics(
        parse_ms=(t1 - t0) * 1000.0,
        validate_ms=(t2 - t1) * 1000.0,
        compile_ms=(t3 - t2) * 1000.0,
        states=len(doc.states),
        transitions=len(doc.transitions),
        entities=len(doc.entities),
        bundle_bytes=len(bundle.encode("utf-8")),
    )


def compare_runs(definition: GameDefinition,
                 scripts: list[list[tuple[str, str | None]]],
                 seed: int = 0) -> RunComparison:
    """Replay several scripts and check the linear-outcome guarantee:
    all winning runs must end at the same state."""
    outcomes = tuple(run_script(definition, seed, script) for script in scripts)
    terminals = {o.visited[-1] for o in outcomes if o.status is Status.WON}
    verdict = "invariant" if len(terminals) <= 1 else "violated"
    return RunComparison(outcomes=outcomes, verdict=verdict)
