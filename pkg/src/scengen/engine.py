"""Deterministic turn-based execution of a compiled game.

One player action, then one NPC tick: the engine interleaves discrete
turns instead of real time so runs are replayable and path spaces are
enumerable.  Every mutation is driven by the definition's action table;
score, health and feedback follow the transition effects; NPC behaviors
(scripts, chase, attack, interact, priority lists) execute one step per
tick in role-index order.  Identical (definition, seed, script) inputs
always produce identical outcomes and event streams.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

from .compiler import CompiledNpc, CompiledTransition, GameDefinition
from .core import ActionSpec, BehaviorKind, GridPos


class Status(Enum):
    RUNNING = "running"
    WON = "won"
    LOST = "lost"


class EngineError(Exception):
    pass


class ActOnFinished(EngineError):
    """A mutating call was made on a finished session."""


class QueryOnFinished(EngineError):
    """The action menu was requested on a finished session."""


class EventKind(Enum):
    STATE_ENTERED = "state_entered"
    SCORE_CHANGED = "score_changed"
    HEALTH_CHANGED = "health_changed"
    NPC_MOVED = "npc_moved"
    NPC_ATTACKED = "npc_attacked"
    NPC_INTERACTED = "npc_interacted"
    FEEDBACK = "feedback"
    GAME_WON = "game_won"
    GAME_LOST = "game_lost"


@dataclass(frozen=True)
class EngineEvent:
    kind: EventKind
    payload: dict

    def to_json(self) -> str:
        obj = {"kind": self.kind.value}
        obj.update(sorted(self.payload.items()))
        return json.dumps(obj, sort_keys=True, ensure_ascii=False)


def events_to_replay(events: list[EngineEvent]) -> str:
    """Line-delimited event stream for ``.replay`` files."""
    return "".join(e.to_json() + "\n" for e in events)


@dataclass
class GameSession:
    """Live mutable play state over an immutable definition."""

    definition: GameDefinition
    current_state_index: int
    score: int
    health: dict[int, int]
    positions: dict[int, GridPos]
    feedback_log: deque[str]
    turn: int
    rng_state: int  # seed-derived; v1 behaviors are deterministic, reserved
    status: Status
    script_cursor: dict[int, int] = field(default_factory=dict)
    priority_done: dict[int, set[int]] = field(default_factory=dict)

    def clone(self) -> "GameSession":
        return GameSession(
            definition=self.definition,
            current_state_index=self.current_state_index,
            score=self.score,
            health=dict(self.health),
            positions=dict(self.positions),
            feedback_log=deque(self.feedback_log, maxlen=self.feedback_log.maxlen),
            turn=self.turn,
            rng_state=self.rng_state,
            status=self.status,
            script_cursor=dict(self.script_cursor),
            priority_done={k: set(v) for k, v in self.priority_done.items()},
        )


@dataclass(frozen=True)
class StepResult:
    accepted: bool
    new_state_index: int
    score_delta: int
    feedback: tuple[str, ...]
    events: tuple[EngineEvent, ...]


@dataclass(frozen=True)
class Outcome:
    """Result of replaying a whole action script on a fresh session."""

    status: Status
    score: int
    visited: tuple[str, ...]
    turns: int
    rejected_steps: tuple[int, ...]
    events: tuple[EngineEvent, ...]


def start_session(definition: GameDefinition, seed: int = 0) -> GameSession:
    positions = {
        role.index: role.position
        for role in definition.roles
        if role.position is not None
    }
    health = {role.index: role.health for role in definition.roles}
    player = definition.player_index()
    session = GameSession(
        definition=definition,
        current_state_index=definition.entry_index,
        score=definition.ui.initial_score,
        health=health,
        positions=positions,
        feedback_log=deque(maxlen=definition.ui.feedback_log_depth),
        turn=0,
        rng_state=seed & 0xFFFFFFFFFFFFFFFF,
        status=Status.LOST if health[player] == 0 else Status.RUNNING,
    )
    return session


def available_actions(session: GameSession) -> list[tuple[ActionSpec, str]]:
    """Player menu at the current state: (action, menu label) pairs.

    The label is the authored dialogue text, falling back to the action
    name.  Sorted by action name, then target.
    """
    if session.status is not Status.RUNNING:
        raise QueryOnFinished(f"session is {session.status.value}")
    player = session.definition.player_index()
    entries = []
    for t in session.definition.transitions_from(session.current_state_index):
        if t.actor != player:
            continue
        action = ActionSpec(name=t.action, target=t.target, dialogue=t.dialogue)
        label = t.dialogue if t.dialogue is not None else (
            t.action if t.target is None else f"{t.action} {t.target}")
        entries.append((action, label))
    entries.sort(key=lambda pair: (pair[0].name, pair[0].target or ""))
    return entries


def _clamped_health(session: GameSession, role: int, delta: int) -> int:
    initial = session.definition.roles[role].health
    return max(0, min(initial, session.health[role] + delta))


def _apply_transition(session: GameSession, t: CompiledTransition) -> list[EngineEvent]:
    """Fire a transition: state change, score, health, feedback, terminal.

    Event order is fixed: state entry, score, health (by role index),
    feedback, then a terminal event if the game just ended.
    """
    definition = session.definition
    events: list[EngineEvent] = []

    session.current_state_index = t.to_index
    to_state = definition.states[t.to_index]
    events.append(EngineEvent(EventKind.STATE_ENTERED, {
        "state": to_state.name, "index": t.to_index,
    }))

    if t.score_delta != 0:
        session.score += t.score_delta
        events.append(EngineEvent(EventKind.SCORE_CHANGED, {
            "delta": t.score_delta, "score": session.score,
        }))

    for role, delta in t.health_deltas:
        new = _clamped_health(session, role, delta)
        applied = new - session.health[role]
        if applied != 0:
            session.health[role] = new
            events.append(EngineEvent(EventKind.HEALTH_CHANGED, {
                "role": definition.role_name(role), "delta": applied, "health": new,
            }))

    feedback = []
    if t.feedback is not None:
        feedback.append(t.feedback)
    if to_state.on_enter_feedback is not None:
        feedback.append(to_state.on_enter_feedback)
    for text in feedback:
        session.feedback_log.append(text)
        events.append(EngineEvent(EventKind.FEEDBACK, {"text": text}))

    # Death takes precedence over reaching the exit on the same transition.
    player = definition.player_index()
    if session.health[player] == 0:
        session.status = Status.LOST
        events.append(EngineEvent(EventKind.GAME_LOST, {"score": session.score}))
    elif t.to_index == definition.exit_index:
        session.status = Status.WON
        events.append(EngineEvent(EventKind.GAME_WON, {"score": session.score}))
    return events


def apply_action(session: GameSession, action: str,
                 target: str | None = None) -> StepResult:
    """Perform one player action; rejected actions still consume a turn."""
    if session.status is not Status.RUNNING:
        raise ActOnFinished(f"session is {session.status.value}")
    session.turn += 1
    definition = session.definition
    player = definition.player_index()
    index = definition.action_table.get((session.current_state_index, action, target))
    if index is None or definition.transitions[index].actor != player:
        return StepResult(
            accepted=False,
            new_state_index=session.current_state_index,
            score_delta=0,
            feedback=("unavailable action",),
            events=(),
        )
    t = definition.transitions[index]
    events = _apply_transition(session, t)
    feedback = tuple(e.payload["text"] for e in events if e.kind is EventKind.FEEDBACK)
    return StepResult(
        accepted=True,
        new_state_index=session.current_state_index,
        score_delta=t.score_delta,
        feedback=feedback,
        events=tuple(events),
    )


# ---------------------------------------------------------------------------
# NPC behaviors
# ---------------------------------------------------------------------------


def _entity_position(definition: GameDefinition, name: str) -> GridPos | None:
    for binding in definition.bindings:
        if binding.entity == name:
            return binding.position
    return None


def _target_position(session: GameSession, name: str) -> GridPos | None:
    """Position of a role or entity target (roles shadow entities)."""
    for role in session.definition.roles:
        if role.name == name:
            return session.positions.get(role.index)
    return _entity_position(session.definition, name)


def _chase_step(origin: GridPos, target: GridPos) -> GridPos:
    """One grid step reducing Manhattan distance; larger axis first,
    ties resolved toward the x axis."""
    dx = target.x - origin.x
    dy = target.y - origin.y
    if dx != 0 and abs(dx) >= abs(dy):
        return GridPos(origin.x + (1 if dx > 0 else -1), origin.y)
    if dy != 0:
        return GridPos(origin.x, origin.y + (1 if dy > 0 else -1))
    return origin


def _chebyshev_adjacent(a: GridPos, b: GridPos) -> bool:
    return max(abs(a.x - b.x), abs(a.y - b.y)) <= 1


def _npc_move_toward(session: GameSession, npc: CompiledNpc,
                     target: GridPos) -> list[EngineEvent]:
    origin = session.positions.get(npc.role)
    if origin is None:
        return []
    step = _chase_step(origin, target)
    if step == origin:
        return []
    session.positions[npc.role] = step
    return [EngineEvent(EventKind.NPC_MOVED, {
        "role": session.definition.role_name(npc.role), "x": step.x, "y": step.y,
    })]


def _npc_apply_scripted(session: GameSession, npc: CompiledNpc,
                        action: ActionSpec) -> list[EngineEvent] | None:
    """Run a behavior action through the shared dispatch table.

    Returns None when the action is not applicable here (wrong state or
    the transition belongs to another actor)."""
    definition = session.definition
    index = definition.action_table.get(
        (session.current_state_index, action.name, action.target))
    if index is None or definition.transitions[index].actor != npc.role:
        return None
    return _apply_transition(session, definition.transitions[index])


def _npc_step(session: GameSession, npc: CompiledNpc) -> list[EngineEvent]:
    behavior = npc.behavior
    kind = behavior.kind
    if kind is BehaviorKind.IDLE:
        return []

    if kind is BehaviorKind.SCRIPT:
        cursor = session.script_cursor.get(npc.role, 0)
        if cursor >= len(behavior.script):
            return []
        events = _npc_apply_scripted(session, npc, behavior.script[cursor])
        if events is None:
            return []  # not applicable yet; retried next tick
        session.script_cursor[npc.role] = cursor + 1
        return events

    if kind is BehaviorKind.PRIORITY_LIST:
        done = session.priority_done.setdefault(npc.role, set())
        for i, action in enumerate(behavior.priorities):
            if i in done:
                continue
            events = _npc_apply_scripted(session, npc, action)
            if events is not None:
                done.add(i)
                return events
            return []  # highest-priority open step not applicable this tick
        return []

    assert behavior.target is not None
    target_pos = _target_position(session, behavior.target)
    if target_pos is None:
        return []

    if kind is BehaviorKind.CHASE:
        return _npc_move_toward(session, npc, target_pos)

    origin = session.positions.get(npc.role)
    if kind is BehaviorKind.ATTACK:
        if origin is not None and _chebyshev_adjacent(origin, target_pos):
            definition = session.definition
            target_index = next(
                r.index for r in definition.roles if r.name == behavior.target)
            old = session.health[target_index]
            new = max(0, old - behavior.attack_damage)
            events = [EngineEvent(EventKind.NPC_ATTACKED, {
                "role": definition.role_name(npc.role),
                "target": behavior.target,
                "damage": behavior.attack_damage,
            })]
            if new != old:
                session.health[target_index] = new
                events.append(EngineEvent(EventKind.HEALTH_CHANGED, {
                    "role": behavior.target, "delta": new - old, "health": new,
                }))
            if target_index == definition.player_index() and new == 0:
                session.status = Status.LOST
                events.append(EngineEvent(EventKind.GAME_LOST,
                                          {"score": session.score}))
            return events
        return _npc_move_toward(session, npc, target_pos)

    # Interact: engage when adjacent, otherwise close the distance.
    if origin is not None and _chebyshev_adjacent(origin, target_pos):
        return [EngineEvent(EventKind.NPC_INTERACTED, {
            "role": session.definition.role_name(npc.role),
            "entity": behavior.target,
        })]
    return _npc_move_toward(session, npc, target_pos)


def tick(session: GameSession) -> list[EngineEvent]:
    """Run one behavior step for every live NPC, in role-index order."""
    if session.status is not Status.RUNNING:
        raise ActOnFinished(f"session is {session.status.value}")
    session.turn += 1
    events: list[EngineEvent] = []
    for npc in session.definition.npc_table:
        if session.status is not Status.RUNNING:
            break
        if session.health.get(npc.role, 0) == 0:
            continue  # incapacitated NPCs stop acting
        events.extend(_npc_step(session, npc))
    return events


# ---------------------------------------------------------------------------
# Scripted playthroughs
# ---------------------------------------------------------------------------


def run_script(definition: GameDefinition, seed: int,
               script: list[tuple[str, str | None]]) -> Outcome:
    """Fold a player script over a fresh session, one tick after each
    action, stopping early once the game ends."""
    session = start_session(definition, seed)
    visited = [definition.states[session.current_state_index].name]
    all_events: list[EngineEvent] = []
    rejected: list[int] = []

    def absorb(events: tuple[EngineEvent, ...] | list[EngineEvent]) -> None:
        for event in events:
            all_events.append(event)
            if event.kind is EventKind.STATE_ENTERED:
                name = event.payload["state"]
                if name != visited[-1]:
                    visited.append(name)

    for i, (action, target) in enumerate(script):
        if session.status is not Status.RUNNING:
            break
        result = apply_action(session, action, target)
        if not result.accepted:
            rejected.append(i)
        absorb(result.events)
        if session.status is Status.RUNNING:
            absorb(tick(session))

    return Outcome(
        status=session.status,
        score=session.score,
        visited=tuple(visited),
        turns=session.turn,
        rejected_steps=tuple(rejected),
        events=tuple(all_events),
    )
