"""JSON interchange form of a scenario document.

Lets external tools and the web player consume scenarios without a DSL
parser.  The tree mirrors the document fields one-to-one; the schema is
documented in ``docs/bundle-schema.md``.  ``from_interchange`` reports a
single error naming the JSON-pointer-style path of the offending field.
"""

from __future__ import annotations

import json
from typing import Any

from .core import (
    ActionSpec,
    BehaviorKind,
    BehaviorSpec,
    Controller,
    Entity,
    EffectKind,
    Goal,
    GoalKind,
    GridPos,
    Mode,
    Placeholder,
    Role,
    ScenarioDoc,
    ScoreEffect,
    StateKind,
    StateNode,
    TransitionRule,
    Verb,
    normalize,
)

_VERB_ORDER = (Verb.MOVE, Verb.PUSH, Verb.PULL, Verb.USE)


class InterchangeError(ValueError):
    """Malformed interchange text; ``path`` points at the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def action_to_obj(action: ActionSpec) -> dict[str, Any]:
    obj: dict[str, Any] = {"name": action.name}
    if action.target is not None:
        obj["target"] = action.target
    if action.dialogue is not None:
        obj["dialogue"] = action.dialogue
    return obj


def pos_to_obj(pos: GridPos | None) -> list[int] | None:
    return None if pos is None else [pos.x, pos.y]


def behavior_to_obj(b: BehaviorSpec) -> dict[str, Any]:
    obj: dict[str, Any] = {"kind": b.kind.value}
    if b.kind is BehaviorKind.SCRIPT:
        obj["script"] = [action_to_obj(a) for a in b.script]
    elif b.kind is BehaviorKind.PRIORITY_LIST:
        obj["priorities"] = [action_to_obj(a) for a in b.priorities]
    elif b.kind in (BehaviorKind.CHASE, BehaviorKind.INTERACT):
        obj["target"] = b.target
    elif b.kind is BehaviorKind.ATTACK:
        obj["target"] = b.target
        obj["attack_damage"] = b.attack_damage
    return obj


def doc_to_obj(doc: ScenarioDoc) -> dict[str, Any]:
    """Plain-dict form of a (normalized) document."""
    doc = normalize(doc)
    roles = []
    for r in doc.roles:
        role_obj: dict[str, Any] = {
            "name": r.name,
            "controller": r.controller.value,
            "health": r.health,
        }
        if r.behavior is not None:
            role_obj["behavior"] = behavior_to_obj(r.behavior)
        if r.position is not None:
            role_obj["position"] = pos_to_obj(r.position)
        roles.append(role_obj)

    entities = []
    for e in doc.entities:
        ent_obj: dict[str, Any] = {
            "name": e.name,
            "tag": e.tag,
            "placeholder": e.placeholder.value,
            "verbs": [v.value for v in _VERB_ORDER if v in e.verbs],
        }
        if e.position is not None:
            ent_obj["position"] = pos_to_obj(e.position)
        entities.append(ent_obj)

    states = []
    for s in doc.states:
        state_obj: dict[str, Any] = {
            "name": s.name,
            "kind": s.kind.value,
            "description": s.description,
        }
        if s.on_enter_feedback is not None:
            state_obj["on_enter_feedback"] = s.on_enter_feedback
        states.append(state_obj)

    transitions = []
    for t in doc.transitions:
        tr_obj: dict[str, Any] = {
            "from": t.from_state,
            "to": t.to_state,
            "action": action_to_obj(t.action),
            "actor": t.actor,
            "effects": [
                {"kind": e.kind.value, "delta": e.delta}
                | ({"subject": e.subject} if e.subject is not None else {})
                for e in t.effects
            ],
        }
        if t.feedback is not None:
            tr_obj["feedback"] = t.feedback
        transitions.append(tr_obj)

    return {
        "name": doc.name,
        "mode": doc.mode.value,
        "roles": roles,
        "entities": entities,
        "states": states,
        "transitions": transitions,
        "goals": [{"kind": g.kind.value, "state": g.state} for g in doc.goals],
        "metadata": {k: v for k, v in doc.metadata},
    }


def to_interchange(doc: ScenarioDoc) -> str:
    return json.dumps(doc_to_obj(doc), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# Reading
# ---------------------------------------------------------------------------


def require_field(obj: Any, key: str, type_: type, path: str) -> Any:
    if not isinstance(obj, dict):
        raise InterchangeError(path or "/", "expected an object")
    if key not in obj:
        raise InterchangeError(f"{path}/{key}", "missing required field")
    value = obj[key]
    if type_ is int and isinstance(value, bool):
        raise InterchangeError(f"{path}/{key}", "expected an integer")
    if not isinstance(value, type_):
        raise InterchangeError(f"{path}/{key}", f"expected {type_.__name__}")
    return value


def optional_field(obj: dict, key: str, type_: type, path: str) -> Any:
    if key not in obj or obj[key] is None:
        return None
    value = obj[key]
    if not isinstance(value, type_):
        raise InterchangeError(f"{path}/{key}", f"expected {type_.__name__}")
    return value


def enum_value(cls: type, value: str, path: str) -> Any:
    try:
        return cls(value)
    except ValueError:
        raise InterchangeError(path, f"unknown value {value!r}") from None


def pos_from_obj(value: Any, path: str) -> GridPos:
    if (not isinstance(value, list) or len(value) != 2
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in value)):
        raise InterchangeError(path, "expected [x, y] integer pair")
    try:
        return GridPos(value[0], value[1])
    except ValueError as exc:
        raise InterchangeError(path, str(exc)) from None


def action_from_obj(obj: Any, path: str) -> ActionSpec:
    name = require_field(obj, "name", str, path)
    return ActionSpec(
        name=name,
        target=optional_field(obj, "target", str, path),
        dialogue=optional_field(obj, "dialogue", str, path),
    )


def behavior_from_obj(obj: Any, path: str) -> BehaviorSpec:
    kind = enum_value(BehaviorKind, require_field(obj, "kind", str, path), f"{path}/kind")
    if kind is BehaviorKind.SCRIPT:
        items = require_field(obj, "script", list, path)
        return BehaviorSpec(kind=kind, script=tuple(
            action_from_obj(a, f"{path}/script/{i}") for i, a in enumerate(items)))
    if kind is BehaviorKind.PRIORITY_LIST:
        items = require_field(obj, "priorities", list, path)
        return BehaviorSpec(kind=kind, priorities=tuple(
            action_from_obj(a, f"{path}/priorities/{i}") for i, a in enumerate(items)))
    if kind in (BehaviorKind.CHASE, BehaviorKind.INTERACT):
        return BehaviorSpec(kind=kind, target=require_field(obj, "target", str, path))
    if kind is BehaviorKind.ATTACK:
        damage = optional_field(obj, "attack_damage", int, path)
        spec = BehaviorSpec(kind=kind, target=require_field(obj, "target", str, path))
        if damage is not None:
            spec = BehaviorSpec(kind=kind, target=spec.target, attack_damage=damage)
        return spec
    return BehaviorSpec(kind=BehaviorKind.IDLE)


def doc_from_obj(obj: Any) -> ScenarioDoc:
    """Build a document from a plain dict, validating shape as we go."""
    name = require_field(obj, "name", str, "")
    mode = enum_value(Mode, require_field(obj, "mode", str, ""), "/mode")

    roles = []
    for i, r in enumerate(require_field(obj, "roles", list, "")):
        path = f"/roles/{i}"
        controller = enum_value(Controller, require_field(r, "controller", str, path),
                           f"{path}/controller")
        behavior_obj = optional_field(r, "behavior", dict, path)
        pos = r.get("position") if isinstance(r, dict) else None
        roles.append(Role(
            name=require_field(r, "name", str, path),
            controller=controller,
            behavior=(None if behavior_obj is None
                      else behavior_from_obj(behavior_obj, f"{path}/behavior")),
            health=require_field(r, "health", int, path),
            position=None if pos is None else pos_from_obj(pos, f"{path}/position"),
        ))

    entities = []
    for i, e in enumerate(require_field(obj, "entities", list, "")):
        path = f"/entities/{i}"
        verbs = require_field(e, "verbs", list, path)
        pos = e.get("position")
        entities.append(Entity(
            name=require_field(e, "name", str, path),
            tag=require_field(e, "tag", str, path),
            placeholder=enum_value(Placeholder, require_field(e, "placeholder", str, path),
                              f"{path}/placeholder"),
            position=None if pos is None else pos_from_obj(pos, f"{path}/position"),
            verbs=frozenset(
                enum_value(Verb, v, f"{path}/verbs/{j}") for j, v in enumerate(verbs)),
        ))

    states = []
    for i, s in enumerate(require_field(obj, "states", list, "")):
        path = f"/states/{i}"
        states.append(StateNode(
            name=require_field(s, "name", str, path),
            kind=enum_value(StateKind, require_field(s, "kind", str, path), f"{path}/kind"),
            description=require_field(s, "description", str, path),
            on_enter_feedback=optional_field(s, "on_enter_feedback", str, path),
        ))

    transitions = []
    for i, t in enumerate(require_field(obj, "transitions", list, "")):
        path = f"/transitions/{i}"
        effects = []
        for j, eff in enumerate(require_field(t, "effects", list, path)):
            eff_path = f"{path}/effects/{j}"
            effects.append(ScoreEffect(
                kind=enum_value(EffectKind, require_field(eff, "kind", str, eff_path),
                           f"{eff_path}/kind"),
                delta=require_field(eff, "delta", int, eff_path),
                subject=optional_field(eff, "subject", str, eff_path),
            ))
        transitions.append(TransitionRule(
            from_state=require_field(t, "from", str, path),
            to_state=require_field(t, "to", str, path),
            action=action_from_obj(require_field(t, "action", dict, path), f"{path}/action"),
            actor=require_field(t, "actor", str, path),
            effects=tuple(effects),
            feedback=optional_field(t, "feedback", str, path),
        ))

    goals = []
    for i, g in enumerate(require_field(obj, "goals", list, "")):
        path = f"/goals/{i}"
        goals.append(Goal(
            kind=enum_value(GoalKind, require_field(g, "kind", str, path), f"{path}/kind"),
            state=require_field(g, "state", str, path),
        ))

    metadata = require_field(obj, "metadata", dict, "")
    for k, v in metadata.items():
        if not isinstance(k, str) or not isinstance(v, str):
            raise InterchangeError(f"/metadata/{k}", "expected string value")

    return ScenarioDoc(
        name=name,
        mode=mode,
        roles=tuple(roles),
        entities=tuple(entities),
        states=tuple(states),
        transitions=tuple(transitions),
        goals=tuple(goals),
        metadata=tuple(sorted(metadata.items())),
    )


def from_interchange(text: str) -> ScenarioDoc:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InterchangeError("/", f"not valid JSON: {exc}") from None
    return doc_from_obj(obj)
