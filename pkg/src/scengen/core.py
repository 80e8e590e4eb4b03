"""Domain model for training scenarios.

A scenario document is the machine-readable form of a workflow/state
diagram: roles (one human player plus scripted NPCs), entities placed in
the world, task states with an entry and one or more exits, transition
rules that move the state machine when an actor performs an action, and
reach-goals naming the terminal state.

Everything here is an immutable value object.  ``normalize`` produces the
canonical ordering used by the serializer and by golden-file tests.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from enum import Enum


class Mode(Enum):
    LINEAR = "linear"


class Controller(Enum):
    PLAYER = "player"
    NPC = "npc"


class Placeholder(Enum):
    """Primitive stand-in shape used before asset substitution."""

    CUBE = "cube"
    SPHERE = "sphere"
    CAPSULE = "capsule"


class Verb(Enum):
    MOVE = "move"
    PUSH = "push"
    PULL = "pull"
    USE = "use"


class StateKind(Enum):
    ENTRY = "entry"
    EXIT = "exit"
    TASK = "task"


class BehaviorKind(Enum):
    IDLE = "idle"
    SCRIPT = "script"
    CHASE = "chase"
    ATTACK = "attack"
    INTERACT = "interact"
    PRIORITY_LIST = "priority"


class EffectKind(Enum):
    SCORE = "score"
    HEALTH = "health"


class GoalKind(Enum):
    REACH = "reach"


ACTION_NAME_RE = re.compile(r"[a-z][a-z0-9_]{0,63}$")

GRID_SIZE = 256
DEFAULT_HEALTH = 100
DEFAULT_ATTACK_DAMAGE = 10


class DuplicateIdError(ValueError):
    """An identifier is declared twice within its kind."""

    def __init__(self, kind: str, identifier: str):
        super().__init__(f"duplicate {kind} {identifier!r}")
        self.kind = kind
        self.identifier = identifier


@dataclass(frozen=True)
class GridPos:
    """Cell on the abstract 2D grid standing in for the 3D environment."""

    x: int
    y: int

    def __post_init__(self) -> None:
        if not (0 <= self.x < GRID_SIZE and 0 <= self.y < GRID_SIZE):
            raise ValueError(f"grid position out of range: ({self.x}, {self.y})")


@dataclass(frozen=True)
class ActionSpec:
    """A verb an actor can perform, optionally aimed at an entity.

    ``dialogue`` is the menu text shown to the player for this action.
    """

    name: str
    target: str | None = None
    dialogue: str | None = None


@dataclass(frozen=True)
class BehaviorSpec:
    """Rule driving an NPC: idle, a scripted action list, chase/attack/
    interact with a target, or a prioritized action list.

    Field presence matches ``kind``: only Script uses ``script``, only
    PriorityList uses ``priorities``, only Chase/Attack/Interact use
    ``target``, and ``attack_damage`` is meaningful for Attack.
    """

    kind: BehaviorKind
    script: tuple[ActionSpec, ...] = ()
    target: str | None = None
    priorities: tuple[ActionSpec, ...] = ()
    attack_damage: int = DEFAULT_ATTACK_DAMAGE


@dataclass(frozen=True)
class Role:
    name: str
    controller: Controller
    behavior: BehaviorSpec | None = None
    health: int = DEFAULT_HEALTH
    position: GridPos | None = None


@dataclass(frozen=True)
class Entity:
    """World object; ``tag`` is the asset-catalog lookup key."""

    name: str
    tag: str
    placeholder: Placeholder = Placeholder.CUBE
    position: GridPos | None = None
    verbs: frozenset[Verb] = frozenset()


@dataclass(frozen=True)
class StateNode:
    name: str
    kind: StateKind
    description: str = ""
    on_enter_feedback: str | None = None


@dataclass(frozen=True)
class ScoreEffect:
    """Score or health delta applied when a transition fires.

    Score effects carry no subject; health effects name the affected role.
    """

    kind: EffectKind
    delta: int
    subject: str | None = None


@dataclass(frozen=True)
class TransitionRule:
    from_state: str
    to_state: str
    action: ActionSpec
    actor: str
    effects: tuple[ScoreEffect, ...] = ()
    feedback: str | None = None


@dataclass(frozen=True)
class Goal:
    kind: GoalKind
    state: str


@dataclass(frozen=True)
class ScenarioDoc:
    name: str
    mode: Mode = Mode.LINEAR
    roles: tuple[Role, ...] = ()
    entities: tuple[Entity, ...] = ()
    states: tuple[StateNode, ...] = ()
    transitions: tuple[TransitionRule, ...] = ()
    goals: tuple[Goal, ...] = ()
    metadata: tuple[tuple[str, str], ...] = ()

    def metadata_dict(self) -> dict[str, str]:
        return dict(self.metadata)

    def role(self, name: str) -> Role:
        for r in self.roles:
            if r.name == name:
                return r
        raise KeyError(name)

    def state(self, name: str) -> StateNode:
        for s in self.states:
            if s.name == name:
                return s
        raise KeyError(name)

    def player_role(self) -> Role:
        for r in self.roles:
            if r.controller is Controller.PLAYER:
                return r
        raise ValueError("document has no player role")


@dataclass(frozen=True)
class ScenarioSummary:
    state_count: int
    transition_count: int
    role_count: int
    entity_count: int


def dispatch_key(t: TransitionRule) -> tuple[str, str, str | None]:
    """Key a transition must be unique under for deterministic dispatch."""
    return (t.from_state, t.action.name, t.action.target)


def transition_sort_key(t: TransitionRule) -> tuple:
    # Primary order is (from, action.name, to); the remaining components
    # only break ties so the order is total.
    return (
        t.from_state,
        t.action.name,
        t.to_state,
        t.action.target or "",
        t.actor,
    )


def check_unique_ids(doc: ScenarioDoc) -> None:
    """Raise DuplicateIdError on any repeated identifier.

    Transition dispatch keys (from-state, action, target) count as
    identifiers too: two rules sharing a key would make dispatch
    ambiguous.
    """
    for kind, names in (
        ("role", [r.name for r in doc.roles]),
        ("entity", [e.name for e in doc.entities]),
        ("state", [s.name for s in doc.states]),
    ):
        seen: set[str] = set()
        for name in names:
            if name in seen:
                raise DuplicateIdError(kind, name)
            seen.add(name)
    keys: set[tuple[str, str, str | None]] = set()
    for t in doc.transitions:
        key = dispatch_key(t)
        if key in keys:
            raise DuplicateIdError("transition", "{}/{}".format(key[0], key[1]))
        keys.add(key)


def normalize(doc: ScenarioDoc) -> ScenarioDoc:
    """Return the canonical form of a document.

    Roles, entities and states are sorted by name, transitions by
    (from, action name, to), goals by target state, metadata by key.
    Idempotent; the set of declarations is unchanged.
    """
    check_unique_ids(doc)
    return replace(
        doc,
        roles=tuple(sorted(doc.roles, key=lambda r: r.name)),
        entities=tuple(sorted(doc.entities, key=lambda e: e.name)),
        states=tuple(sorted(doc.states, key=lambda s: s.name)),
        transitions=tuple(sorted(doc.transitions, key=transition_sort_key)),
        goals=tuple(sorted(doc.goals, key=lambda g: (g.kind.value, g.state))),
        metadata=tuple(sorted(doc.metadata)),
    )


def summary(doc: ScenarioDoc) -> ScenarioSummary:
    return ScenarioSummary(
        state_count=len(doc.states),
        transition_count=len(doc.transitions),
        role_count=len(doc.roles),
        entity_count=len(doc.entities),
    )
