"""Static diagnostics for scenario documents.

Finds the flaws a scenario author cares about before a game is generated:
states the trainee can never reach, roles nobody plays, states with no way
forward, and structures that break the linear-scenario guarantee (player
choices must not change the terminal outcome).  Also exports the
action-state diagram as Graphviz DOT for visual inspection.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .core import (
    BehaviorKind,
    Controller,
    ScenarioDoc,
    StateKind,
    TransitionRule,
    normalize,
)


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


class Code(Enum):
    UNREACHABLE_STATE = "UnreachableState"
    UNASSIGNED_ROLE = "UnassignedRole"
    DEAD_END = "DeadEnd"
    NOT_LINEAR = "NotLinear"
    MULTIPLE_ENTRIES = "MultipleEntries"
    NO_EXIT = "NoExit"
    UNUSED_ENTITY = "UnusedEntity"
    MISSING_NPC_BEHAVIOR = "MissingNpcBehavior"


_WARNING_CODES = {Code.UNASSIGNED_ROLE, Code.UNUSED_ENTITY}


def severity_of(code: Code) -> Severity:
    return Severity.WARNING if code in _WARNING_CODES else Severity.ERROR


@dataclass(frozen=True)
class Diagnostic:
    code: Code
    subject: str
    message: str

    @property
    def severity(self) -> Severity:
        return severity_of(self.code)

    def __str__(self) -> str:
        return f"{self.severity.value}: {self.code.value}({self.subject}): {self.message}"


@dataclass(frozen=True)
class DiagnosticReport:
    diagnostics: tuple[Diagnostic, ...]
    ok: bool

    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity is Severity.ERROR]

    def warnings(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity is Severity.WARNING]


def _adjacency(transitions: tuple[TransitionRule, ...]) -> dict[str, list[str]]:
    adj: dict[str, list[str]] = {}
    for t in transitions:
        adj.setdefault(t.from_state, []).append(t.to_state)
    return adj


def _closure(start: set[str], adj: dict[str, list[str]],
             allowed: set[str] | None = None) -> set[str]:
    """Forward closure from ``start`` via an explicit DFS stack."""
    seen = set(start)
    stack = sorted(start)
    while stack:
        node = stack.pop()
        for succ in adj.get(node, ()):
            if allowed is not None and succ not in allowed:
                continue
            if succ not in seen:
                seen.add(succ)
                stack.append(succ)
    return seen


def check_reachability(doc: ScenarioDoc) -> set[str]:
    """Names of states not reachable from the entry, ignoring actors."""
    entries = {s.name for s in doc.states if s.kind is StateKind.ENTRY}
    reachable = _closure(entries, _adjacency(doc.transitions)) if entries else set()
    return {s.name for s in doc.states} - reachable


def check_roles(doc: ScenarioDoc) -> list[Diagnostic]:
    """Unassigned roles and NPCs that have no behavior rule."""
    assigned = {t.actor for t in doc.transitions}
    for role in doc.roles:
        b = role.behavior
        if b is not None and b.target is not None:
            assigned.add(b.target)
    out = []
    for role in doc.roles:
        if role.name not in assigned:
            out.append(Diagnostic(
                code=Code.UNASSIGNED_ROLE,
                subject=role.name,
                message=f"role {role.name!r} never acts and is never targeted",
            ))
        if role.controller is Controller.NPC and role.behavior is None:
            out.append(Diagnostic(
                code=Code.MISSING_NPC_BEHAVIOR,
                subject=role.name,
                message=f"NPC role {role.name!r} has no behavior",
            ))
    return out


def _must_pass_states(reachable: set[str], adj: dict[str, list[str]],
                      entry: str, exit_state: str) -> set[str]:
    """States every entry-to-exit walk visits (the progress chain)."""
    chain = {entry, exit_state}
    for state in reachable:
        if state in chain:
            continue
        allowed = reachable - {state}
        if exit_state not in _closure({entry}, adj, allowed):
            chain.add(state)
    return chain


def check_linearity(doc: ScenarioDoc) -> list[Diagnostic]:
    """Verify the linear-scenario guarantee on the reachable subgraph.

    A document is linear when exactly one exit state is reachable, every
    reachable state can still reach an exit (no dead ends), and every
    cycle touches the progress chain (the states every entry-to-exit walk
    must visit) so loops can only delay progress, never redirect it.
    """
    entries = [s.name for s in doc.states if s.kind is StateKind.ENTRY]
    exits = {s.name for s in doc.states if s.kind is StateKind.EXIT}
    if len(entries) != 1 or not exits:
        return []  # structure too degenerate; validate() reports it separately
    entry = entries[0]
    adj = _adjacency(doc.transitions)
    reachable = _closure({entry}, adj)
    out: list[Diagnostic] = []

    for state in sorted(reachable):
        if not (exits & _closure({state}, adj)):
            out.append(Diagnostic(
                code=Code.DEAD_END,
                subject=state,
                message=f"no exit is reachable from state {state!r}",
            ))

    reachable_exits = sorted(exits & reachable)
    if len(reachable_exits) > 1:
        out.append(Diagnostic(
            code=Code.NOT_LINEAR,
            subject=doc.name,
            message="multiple exit states are reachable: "
                    + ", ".join(reachable_exits),
        ))
        return out
    if not reachable_exits:
        return out  # already covered by DeadEnd diagnostics

    chain = _must_pass_states(reachable, adj, entry, reachable_exits[0])
    off_chain = reachable - chain
    cyclic = set()
    for state in off_chain:
        ahead = _closure(set(adj.get(state, ())) & off_chain, adj, off_chain)
        if state in ahead:
            cyclic.add(state)
    reported: set[str] = set()
    for state in sorted(cyclic):
        if state in reported:
            continue
        component = {state} | {
            other for other in cyclic
            if other in _closure({state}, adj, off_chain)
            and state in _closure({other}, adj, off_chain)
        }
        reported |= component
        out.append(Diagnostic(
            code=Code.NOT_LINEAR,
            subject=min(component),
            message="cycle through {} avoids the progress chain".format(
                ", ".join(sorted(component))),
        ))
    return out


def _check_structure(doc: ScenarioDoc) -> list[Diagnostic]:
    entries = [s.name for s in doc.states if s.kind is StateKind.ENTRY]
    exits = [s.name for s in doc.states if s.kind is StateKind.EXIT]
    out = []
    if len(entries) > 1:
        out.append(Diagnostic(
            code=Code.MULTIPLE_ENTRIES,
            subject=doc.name,
            message="multiple entry states declared: " + ", ".join(sorted(entries)),
        ))
    if not exits:
        out.append(Diagnostic(
            code=Code.NO_EXIT,
            subject=doc.name,
            message="no exit state declared",
        ))
    return out


def _check_entities(doc: ScenarioDoc) -> list[Diagnostic]:
    used = {t.action.target for t in doc.transitions if t.action.target}
    for role in doc.roles:
        b = role.behavior
        if b is None:
            continue
        if b.target is not None:
            used.add(b.target)
        for action in b.script + b.priorities:
            if action.target is not None:
                used.add(action.target)
    return [
        Diagnostic(
            code=Code.UNUSED_ENTITY,
            subject=e.name,
            message=f"entity {e.name!r} is never referenced (scenery?)",
        )
        for e in doc.entities
        if e.name not in used
    ]


def validate(doc: ScenarioDoc) -> DiagnosticReport:
    """Run every check and fold the findings into one sorted report."""
    diagnostics: list[Diagnostic] = []
    diagnostics.extend(_check_structure(doc))
    diagnostics.extend(
        Diagnostic(
            code=Code.UNREACHABLE_STATE,
            subject=name,
            message=f"state {name!r} is not reachable from the entry",
        )
        for name in check_reachability(doc)
    )
    diagnostics.extend(check_roles(doc))
    diagnostics.extend(check_linearity(doc))
    diagnostics.extend(_check_entities(doc))
    ordered = tuple(sorted(
        diagnostics,
        key=lambda d: (d.severity.value, d.code.value, d.subject, d.message),
    ))
    return DiagnosticReport(
        diagnostics=ordered,
        ok=not any(d.severity is Severity.ERROR for d in ordered),
    )


# ---------------------------------------------------------------------------
# DOT export
# ---------------------------------------------------------------------------


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


_SHAPES = {
    StateKind.ENTRY: "doublecircle",
    StateKind.EXIT: "doubleoctagon",
    StateKind.TASK: "ellipse",
}


def export_dot(doc: ScenarioDoc) -> str:
    """Graphviz digraph of the action-state diagram.

    One node per state (entry double circle, exit double octagon), one
    edge per transition labeled ``action/actor``.  Output is canonical:
    same document, same bytes.
    """
    doc = normalize(doc)
    lines = ["digraph " + _dot_quote(doc.name) + " {", "  rankdir=LR;"]
    for state in doc.states:
        lines.append(f"  {_dot_quote(state.name)} [shape={_SHAPES[state.kind]}];")
    for t in doc.transitions:
        action = t.action.name
        if t.action.target is not None:
            action += f"({t.action.target})"
        label = _dot_quote(f"{action}/{t.actor}")
        lines.append(
            f"  {_dot_quote(t.from_state)} -> {_dot_quote(t.to_state)} "
            f"[label={label}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
