"""Independent oracles and random generators used across the test suite.

The reachability oracle here is a queue-based breadth-first search written
before (and kept independent of) the analyzer's traversal, so the two can
disagree if either is wrong.
"""

from __future__ import annotations

import random
from collections import deque

from scengen.core import (
    ActionSpec,
    BehaviorKind,
    BehaviorSpec,
    Controller,
    Entity,
    EffectKind,
    Goal,
    GoalKind,
    GridPos,
    Placeholder,
    Role,
    ScenarioDoc,
    ScoreEffect,
    StateKind,
    StateNode,
    TransitionRule,
    Verb,
)


def bfs_unreachable(doc: ScenarioDoc) -> set[str]:
    """Breadth-first-search oracle: states not reachable from the entry."""
    adjacency: dict[str, set[str]] = {s.name: set() for s in doc.states}
    for t in doc.transitions:
        adjacency[t.from_state].add(t.to_state)
    entries = [s.name for s in doc.states if s.kind is StateKind.ENTRY]
    seen: set[str] = set(entries)
    queue = deque(entries)
    while queue:
        current = queue.popleft()
        for succ in sorted(adjacency[current]):
            if succ not in seen:
                seen.add(succ)
                queue.append(succ)
    return {s.name for s in doc.states} - seen


def naive_binding_lookup(doc: ScenarioDoc, entries: dict[str, str]) -> list[tuple[str, str]]:
    """One-line-per-entity lookup oracle for asset binding.

    Returns (entity name, resolved label) pairs where the label is either
    ``asset:<id>`` or ``placeholder:<shape>``, sorted by entity name.
    """
    out = []
    for e in sorted(doc.entities, key=lambda e: e.name):
        if e.tag in entries:
            out.append((e.name, f"asset:{entries[e.tag]}"))
        else:
            out.append((e.name, f"placeholder:{e.placeholder.value}"))
    return out


# ---------------------------------------------------------------------------
# Random generators (seeded, deterministic)
# ---------------------------------------------------------------------------

_WORDS = [
    "alpha", "bravo", "cart", "door", "echo", "fire", "gate", "hall",
    "ion", "jet", "kit", "lab", "mask", "net", "oak", "pump", "quay",
    "ray", "sink", "tent", "unit", "vent", "ward", "xray", "yard", "zone",
]

_TEXT_POOL = [
    "Check the seals.",
    "Proceed with care",
    'Quoted "words" inside',
    "Back\\slash",
    "Multi\nline note",
    "çok önemli adım",
    "",
    "trailing space ",
]


def _fresh_names(rng: random.Random, count: int, prefix: str) -> list[str]:
    names = set()
    while len(names) < count:
        word = rng.choice(_WORDS)
        names.add(f"{prefix}{word}{rng.randrange(100)}")
    return sorted(names)


def random_valid_doc(rng: random.Random) -> ScenarioDoc:
    """A random document satisfying every parser-level invariant.

    Not necessarily linear or flaw-free: this feeds round-trip tests,
    which only require structural validity.
    """
    n_states = rng.randint(2, 7)
    state_names = _fresh_names(rng, n_states, "s_")
    rng.shuffle(state_names)
    entry = state_names[0]
    exits = [state_names[-1]]
    for name in state_names[1:-1]:
        if rng.random() < 0.15:
            exits.append(name)

    states = []
    for name in state_names:
        if name == entry:
            kind = StateKind.ENTRY
        elif name in exits:
            kind = StateKind.EXIT
        else:
            kind = StateKind.TASK
        states.append(StateNode(
            name=name,
            kind=kind,
            description=rng.choice(_TEXT_POOL),
            on_enter_feedback=rng.choice(_TEXT_POOL) if rng.random() < 0.3 else None,
        ))

    n_entities = rng.randint(0, 3)
    entity_names = _fresh_names(rng, n_entities, "e_")
    entities = []
    for name in entity_names:
        verbs = frozenset(v for v in Verb if rng.random() < 0.4)
        entities.append(Entity(
            name=name,
            tag=rng.choice(["door", "sink", "fire", "cart", 'odd "tag"', "unmapped"]),
            placeholder=rng.choice(list(Placeholder)),
            position=GridPos(rng.randrange(256), rng.randrange(256))
            if rng.random() < 0.5 else None,
            verbs=verbs,
        ))

    role_names = _fresh_names(rng, 1 + rng.randint(0, 2), "r_")
    roles = []
    for i, name in enumerate(role_names):
        if i == 0:
            roles.append(Role(
                name=name,
                controller=Controller.PLAYER,
                health=rng.choice([100, 50, 120]),
                position=GridPos(rng.randrange(16), rng.randrange(16))
                if rng.random() < 0.5 else None,
            ))
            continue
        kind = rng.choice(list(BehaviorKind))
        behavior = BehaviorSpec(kind=BehaviorKind.IDLE)
        if kind is BehaviorKind.SCRIPT or kind is BehaviorKind.PRIORITY_LIST:
            actions = tuple(
                ActionSpec(
                    name=f"act_{rng.randrange(50)}",
                    target=rng.choice(entity_names) if entity_names and rng.random() < 0.5
                    else None,
                )
                for _ in range(rng.randint(1, 3))
            )
            if kind is BehaviorKind.SCRIPT:
                behavior = BehaviorSpec(kind=kind, script=actions)
            else:
                behavior = BehaviorSpec(kind=kind, priorities=actions)
        elif kind is BehaviorKind.CHASE:
            behavior = BehaviorSpec(kind=kind, target=rng.choice(role_names[:i] + entity_names)
                                    if role_names[:i] + entity_names else None)
            if behavior.target is None:
                behavior = BehaviorSpec(kind=BehaviorKind.IDLE)
        elif kind is BehaviorKind.ATTACK:
            behavior = BehaviorSpec(kind=kind, target=role_names[0],
                                    attack_damage=rng.randint(0, 30))
        elif kind is BehaviorKind.INTERACT:
            if entity_names:
                behavior = BehaviorSpec(kind=kind, target=rng.choice(entity_names))
            else:
                behavior = BehaviorSpec(kind=BehaviorKind.IDLE)
        roles.append(Role(
            name=name,
            controller=Controller.NPC,
            behavior=behavior,
            health=rng.choice([100, 80]),
            position=GridPos(rng.randrange(16), rng.randrange(16))
            if rng.random() < 0.5 else None,
        ))

    transitions = []
    used_keys = set()
    for _ in range(rng.randint(1, 12)):
        frm = rng.choice(state_names)
        to = rng.choice(state_names)
        action_name = f"act_{rng.randrange(50)}"
        target = rng.choice(entity_names) if entity_names and rng.random() < 0.4 else None
        key = (frm, action_name, target)
        if key in used_keys:
            continue
        used_keys.add(key)
        effects = []
        if rng.random() < 0.7:
            effects.append(ScoreEffect(kind=EffectKind.SCORE,
                                       delta=rng.randint(-20, 20)))
        if rng.random() < 0.3:
            effects.append(ScoreEffect(kind=EffectKind.HEALTH,
                                       delta=rng.randint(-30, 10),
                                       subject=rng.choice(role_names)))
        transitions.append(TransitionRule(
            from_state=frm,
            to_state=to,
            action=ActionSpec(
                name=action_name,
                target=target,
                dialogue=rng.choice(_TEXT_POOL) if rng.random() < 0.3 else None,
            ),
            actor=rng.choice(role_names),
            effects=tuple(effects),
            feedback=rng.choice(_TEXT_POOL) if rng.random() < 0.4 else None,
        ))

    goals = tuple(Goal(kind=GoalKind.REACH, state=e) for e in sorted(set(exits))[:1])
    metadata = tuple(
        (f"key_{i}", rng.choice(_TEXT_POOL)) for i in range(rng.randint(0, 2))
    )

    return ScenarioDoc(
        name=rng.choice(["Drill", "Exercise 7", 'Named "run"']),
        roles=tuple(roles),
        entities=tuple(entities),
        states=tuple(states),
        transitions=tuple(transitions),
        goals=goals,
        metadata=metadata,
    )


def random_graph_doc(rng: random.Random, max_states: int = 50) -> ScenarioDoc:
    """A random state graph (single player role, arbitrary edges).

    Structure is unconstrained apart from referential validity, so
    reachability analysis sees the full space of shapes.
    """
    n = rng.randint(1, max_states)
    names = [f"n{i}" for i in range(n)]
    states = [StateNode(name=names[0], kind=StateKind.ENTRY)]
    for name in names[1:]:
        kind = StateKind.EXIT if rng.random() < 0.2 else StateKind.TASK
        states.append(StateNode(name=name, kind=kind))
    player = Role(name="p", controller=Controller.PLAYER)
    n_edges = rng.randint(0, max(1, n * 2))
    transitions = []
    used = set()
    for _ in range(n_edges):
        frm = rng.choice(names)
        to = rng.choice(names)
        action = f"go_{rng.randrange(n * 3 + 1)}"
        if (frm, action, None) in used:
            continue
        used.add((frm, action, None))
        transitions.append(TransitionRule(
            from_state=frm, to_state=to,
            action=ActionSpec(name=action), actor="p",
        ))
    return ScenarioDoc(
        name="graph",
        roles=(player,),
        states=tuple(states),
        transitions=tuple(transitions),
    )
