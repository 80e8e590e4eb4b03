"""Generator core: scenario document to runnable game definition.

The compiled definition fuses four concerns into one self-contained
bundle: the state table (what exists), the action dispatch table (what a
verb does where), the transition machine with its score/health effects,
and the UI configuration.  Compilation is a pure function: the same
document and catalog always produce byte-identical bundles.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .analyzer import DiagnosticReport, check_reachability, validate
from .assets import AssetBinding, AssetCatalog, EMPTY_CATALOG, bind_assets
from .core import (
    BehaviorSpec,
    Controller,
    EffectKind,
    GridPos,
    Placeholder,
    ScenarioDoc,
    StateKind,
    normalize,
)
from .interchange import (
    InterchangeError,
    behavior_from_obj,
    behavior_to_obj,
    enum_value,
    optional_field,
    pos_from_obj,
    pos_to_obj,
    require_field,
)

BUNDLE_VERSION = "1.0"


class RejectedScenario(ValueError):
    """The compiler refuses documents with Error-severity diagnostics."""

    def __init__(self, report: DiagnosticReport):
        lines = [str(d) for d in report.errors()]
        super().__init__("scenario rejected: " + "; ".join(lines))
        self.report = report


class BundleError(ValueError):
    """A game bundle failed to load; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class VersionError(BundleError):
    def __init__(self, found: str):
        super().__init__("/version", f"unsupported bundle version {found!r} "
                         f"(expected {BUNDLE_VERSION!r})")
        self.found = found


@dataclass(frozen=True)
class CompiledRole:
    index: int
    name: str
    controller: Controller
    health: int
    position: GridPos | None


@dataclass(frozen=True)
class CompiledState:
    index: int
    name: str
    kind: StateKind
    description: str
    on_enter_feedback: str | None


@dataclass(frozen=True)
class CompiledTransition:
    index: int
    from_index: int
    to_index: int
    action: str
    target: str | None
    actor: int
    score_delta: int
    health_deltas: tuple[tuple[int, int], ...]  # (role index, delta), merged
    feedback: str | None
    dialogue: str | None


@dataclass(frozen=True)
class UiConfig:
    show_score: bool = True
    show_health: bool = True
    feedback_log_depth: int = 20
    initial_score: int = 0


@dataclass(frozen=True)
class CompiledNpc:
    role: int
    behavior: BehaviorSpec
    position: GridPos | None


@dataclass(frozen=True)
class GameDefinition:
    scenario_name: str
    roles: tuple[CompiledRole, ...]
    states: tuple[CompiledState, ...]
    transitions: tuple[CompiledTransition, ...]
    action_table: dict[tuple[int, str, str | None], int] = field(compare=False)
    ui: UiConfig = UiConfig()
    bindings: tuple[AssetBinding, ...] = ()
    npc_table: tuple[CompiledNpc, ...] = ()
    entry_index: int = 0
    exit_index: int = 0
    version: str = BUNDLE_VERSION

    def __eq__(self, other: object) -> bool:  # action_table is derived data
        if not isinstance(other, GameDefinition):
            return NotImplemented
        return (
            self.scenario_name == other.scenario_name
            and self.roles == other.roles
            and self.states == other.states
            and self.transitions == other.transitions
            and sorted(self.action_table.items(), key=_table_row_key)
            == sorted(other.action_table.items(), key=_table_row_key)
            and self.ui == other.ui
            and self.bindings == other.bindings
            and self.npc_table == other.npc_table
            and self.entry_index == other.entry_index
            and self.exit_index == other.exit_index
            and self.version == other.version
        )

    def player_index(self) -> int:
        for role in self.roles:
            if role.controller is Controller.PLAYER:
                return role.index
        raise ValueError("definition has no player role")

    def role_name(self, index: int) -> str:
        return self.roles[index].name

    def transitions_from(self, state_index: int) -> list[CompiledTransition]:
        return [t for t in self.transitions if t.from_index == state_index]


def _table_row_key(item: tuple[tuple[int, str, str | None], int]) -> tuple:
    (state, action, target), index = item
    return (state, action, target or "", index)


_UI_BOOL_KEYS = {"show_score", "show_health"}
_UI_INT_KEYS = {"feedback_log_depth", "initial_score"}


def _ui_from_metadata(doc: ScenarioDoc) -> UiConfig:
    """UI settings default per UiConfig; scenario metadata may override."""
    values: dict[str, object] = {}
    meta = doc.metadata_dict()
    for key in _UI_BOOL_KEYS:
        if key in meta:
            raw = meta[key].strip().lower()
            if raw not in ("true", "false"):
                raise ValueError(f"metadata {key} must be 'true' or 'false'")
            values[key] = raw == "true"
    for key in _UI_INT_KEYS:
        if key in meta:
            try:
                values[key] = int(meta[key].strip())
            except ValueError:
                raise ValueError(f"metadata {key} must be an integer") from None
    ui = UiConfig(**values)  # type: ignore[arg-type]
    if ui.feedback_log_depth < 1:
        raise ValueError("metadata feedback_log_depth must be >= 1")
    return ui


def compile(doc: ScenarioDoc, catalog: AssetCatalog = EMPTY_CATALOG) -> GameDefinition:
    """Compile a validated document into a game definition.

    Raises RejectedScenario when the document carries any Error-severity
    diagnostic; flawed scenarios are refused, never silently repaired.
    """
    doc = normalize(doc)
    report = validate(doc)
    if not report.ok:
        raise RejectedScenario(report)

    # Entry pinned to index 0; the remaining states keep normalized order.
    entry_name = next(s.name for s in doc.states if s.kind is StateKind.ENTRY)
    ordered = [doc.state(entry_name)] + [s for s in doc.states if s.name != entry_name]
    state_index = {s.name: i for i, s in enumerate(ordered)}
    states = tuple(
        CompiledState(
            index=i,
            name=s.name,
            kind=s.kind,
            description=s.description,
            on_enter_feedback=s.on_enter_feedback,
        )
        for i, s in enumerate(ordered)
    )

    role_index = {r.name: i for i, r in enumerate(doc.roles)}
    roles = tuple(
        CompiledRole(
            index=i,
            name=r.name,
            controller=r.controller,
            health=r.health,
            position=r.position,
        )
        for i, r in enumerate(doc.roles)
    )

    transitions = []
    action_table: dict[tuple[int, str, str | None], int] = {}
    for i, t in enumerate(doc.transitions):
        score_delta = 0
        health: dict[int, int] = {}
        for effect in t.effects:
            if effect.kind is EffectKind.SCORE:
                score_delta += effect.delta
            else:
                assert effect.subject is not None
                subject = role_index[effect.subject]
                health[subject] = health.get(subject, 0) + effect.delta
        compiled = CompiledTransition(
            index=i,
            from_index=state_index[t.from_state],
            to_index=state_index[t.to_state],
            action=t.action.name,
            target=t.action.target,
            actor=role_index[t.actor],
            score_delta=score_delta,
            health_deltas=tuple(sorted(health.items())),
            feedback=t.feedback,
            dialogue=t.action.dialogue,
        )
        transitions.append(compiled)
        action_table[(compiled.from_index, compiled.action, compiled.target)] = i

    unreachable = check_reachability(doc)
    reachable_exits = [
        s.name for s in doc.states
        if s.kind is StateKind.EXIT and s.name not in unreachable
    ]
    assert len(reachable_exits) == 1  # guaranteed by the linearity check

    bindings, _ = bind_assets(doc, catalog)
    npc_table = tuple(
        CompiledNpc(role=role_index[r.name], behavior=r.behavior, position=r.position)
        for r in doc.roles
        if r.controller is Controller.NPC and r.behavior is not None
    )

    return GameDefinition(
        scenario_name=doc.name,
        roles=roles,
        states=states,
        transitions=tuple(transitions),
        action_table=action_table,
        ui=_ui_from_metadata(doc),
        bindings=tuple(bindings),
        npc_table=npc_table,
        entry_index=0,
        exit_index=state_index[reachable_exits[0]],
    )


# ---------------------------------------------------------------------------
# Bundle persistence
# ---------------------------------------------------------------------------


def definition_to_obj(definition: GameDefinition) -> dict:
    return {
        "version": definition.version,
        "scenario_name": definition.scenario_name,
        "ui": {
            "show_score": definition.ui.show_score,
            "show_health": definition.ui.show_health,
            "feedback_log_depth": definition.ui.feedback_log_depth,
            "initial_score": definition.ui.initial_score,
        },
        "roles": [
            {
                "index": r.index,
                "name": r.name,
                "controller": r.controller.value,
                "health": r.health,
                "position": pos_to_obj(r.position),
            }
            for r in definition.roles
        ],
        "states": [
            {
                "index": s.index,
                "name": s.name,
                "kind": s.kind.value,
                "description": s.description,
                "on_enter_feedback": s.on_enter_feedback,
            }
            for s in definition.states
        ],
        "transitions": [
            {
                "index": t.index,
                "from": t.from_index,
                "to": t.to_index,
                "action": t.action,
                "target": t.target,
                "actor": t.actor,
                "score_delta": t.score_delta,
                "health_deltas": [list(pair) for pair in t.health_deltas],
                "feedback": t.feedback,
                "dialogue": t.dialogue,
            }
            for t in definition.transitions
        ],
        "action_table": [
            {"state": state, "action": action, "target": target, "transition": index}
            for (state, action, target), index in sorted(
                definition.action_table.items(), key=_table_row_key)
        ],
        "bindings": [
            {
                "entity": b.entity,
                "asset_id": b.asset_id,
                "placeholder": b.placeholder.value,
                "display_name": b.display_name,
                "position": pos_to_obj(b.position),
            }
            for b in definition.bindings
        ],
        "npcs": [
            {
                "role": n.role,
                "behavior": behavior_to_obj(n.behavior),
                "position": pos_to_obj(n.position),
            }
            for n in definition.npc_table
        ],
        "entry_index": definition.entry_index,
        "exit_index": definition.exit_index,
    }


def emit_bundle(definition: GameDefinition) -> str:
    """Serialize a definition to the versioned ``.game`` bundle text."""
    return json.dumps(definition_to_obj(definition), indent=2, sort_keys=True,
                      ensure_ascii=False) + "\n"


def load_bundle(text: str) -> GameDefinition:
    """Parse bundle text back into a definition.

    Raises VersionError on an unknown format version and BundleError
    (carrying the field path) on any schema violation.
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BundleError("/", f"not valid JSON: {exc}") from None
    try:
        return _definition_from_obj(obj)
    except InterchangeError as exc:
        raise BundleError(exc.path, str(exc).split(": ", 1)[-1]) from None


def _definition_from_obj(obj: dict) -> GameDefinition:
    version = require_field(obj, "version", str, "")
    if version != BUNDLE_VERSION:
        raise VersionError(version)

    ui_obj = require_field(obj, "ui", dict, "")
    ui = UiConfig(
        show_score=require_field(ui_obj, "show_score", bool, "/ui"),
        show_health=require_field(ui_obj, "show_health", bool, "/ui"),
        feedback_log_depth=require_field(ui_obj, "feedback_log_depth", int, "/ui"),
        initial_score=require_field(ui_obj, "initial_score", int, "/ui"),
    )
    if ui.feedback_log_depth < 1:
        raise BundleError("/ui/feedback_log_depth", "must be >= 1")

    roles = []
    for i, r in enumerate(require_field(obj, "roles", list, "")):
        path = f"/roles/{i}"
        pos = r.get("position") if isinstance(r, dict) else None
        roles.append(CompiledRole(
            index=require_field(r, "index", int, path),
            name=require_field(r, "name", str, path),
            controller=enum_value(Controller, require_field(r, "controller", str, path),
                                  f"{path}/controller"),
            health=require_field(r, "health", int, path),
            position=None if pos is None else pos_from_obj(pos, f"{path}/position"),
        ))

    states = []
    for i, s in enumerate(require_field(obj, "states", list, "")):
        path = f"/states/{i}"
        states.append(CompiledState(
            index=require_field(s, "index", int, path),
            name=require_field(s, "name", str, path),
            kind=enum_value(StateKind, require_field(s, "kind", str, path),
                            f"{path}/kind"),
            description=require_field(s, "description", str, path),
            on_enter_feedback=optional_field(s, "on_enter_feedback", str, path),
        ))

    transitions = []
    for i, t in enumerate(require_field(obj, "transitions", list, "")):
        path = f"/transitions/{i}"
        deltas = []
        for j, pair in enumerate(require_field(t, "health_deltas", list, path)):
            if (not isinstance(pair, list) or len(pair) != 2
                    or not all(isinstance(v, int) for v in pair)):
                raise BundleError(f"{path}/health_deltas/{j}",
                                  "expected [role, delta] integer pair")
            deltas.append((pair[0], pair[1]))
        transitions.append(CompiledTransition(
            index=require_field(t, "index", int, path),
            from_index=require_field(t, "from", int, path),
            to_index=require_field(t, "to", int, path),
            action=require_field(t, "action", str, path),
            target=optional_field(t, "target", str, path),
            actor=require_field(t, "actor", int, path),
            score_delta=require_field(t, "score_delta", int, path),
            health_deltas=tuple(deltas),
            feedback=optional_field(t, "feedback", str, path),
            dialogue=optional_field(t, "dialogue", str, path),
        ))

    action_table: dict[tuple[int, str, str | None], int] = {}
    for i, row in enumerate(require_field(obj, "action_table", list, "")):
        path = f"/action_table/{i}"
        key = (
            require_field(row, "state", int, path),
            require_field(row, "action", str, path),
            optional_field(row, "target", str, path),
        )
        if key in action_table:
            raise BundleError(path, "duplicate dispatch key")
        action_table[key] = require_field(row, "transition", int, path)

    bindings = []
    for i, b in enumerate(require_field(obj, "bindings", list, "")):
        path = f"/bindings/{i}"
        pos = b.get("position") if isinstance(b, dict) else None
        bindings.append(AssetBinding(
            entity=require_field(b, "entity", str, path),
            asset_id=optional_field(b, "asset_id", str, path),
            placeholder=enum_value(Placeholder,
                                   require_field(b, "placeholder", str, path),
                                   f"{path}/placeholder"),
            display_name=require_field(b, "display_name", str, path),
            position=None if pos is None else pos_from_obj(pos, f"{path}/position"),
        ))

    npcs = []
    for i, n in enumerate(require_field(obj, "npcs", list, "")):
        path = f"/npcs/{i}"
        pos = n.get("position") if isinstance(n, dict) else None
        npcs.append(CompiledNpc(
            role=require_field(n, "role", int, path),
            behavior=behavior_from_obj(require_field(n, "behavior", dict, path),
                                       f"{path}/behavior"),
            position=None if pos is None else pos_from_obj(pos, f"{path}/position"),
        ))

    definition = GameDefinition(
        scenario_name=require_field(obj, "scenario_name", str, ""),
        roles=tuple(roles),
        states=tuple(states),
        transitions=tuple(transitions),
        action_table=action_table,
        ui=ui,
        bindings=tuple(bindings),
        npc_table=tuple(npcs),
        entry_index=require_field(obj, "entry_index", int, ""),
        exit_index=require_field(obj, "exit_index", int, ""),
        version=version,
    )
    _check_indices(definition)
    return definition


def _check_indices(definition: GameDefinition) -> None:
    n_states = len(definition.states)
    n_roles = len(definition.roles)
    n_transitions = len(definition.transitions)
    for i, s in enumerate(definition.states):
        if s.index != i:
            raise BundleError(f"/states/{i}/index", f"expected {i}, found {s.index}")
    for i, r in enumerate(definition.roles):
        if r.index != i:
            raise BundleError(f"/roles/{i}/index", f"expected {i}, found {r.index}")
    for i, t in enumerate(definition.transitions):
        if t.index != i:
            raise BundleError(f"/transitions/{i}/index", f"expected {i}, found {t.index}")
        if not (0 <= t.from_index < n_states and 0 <= t.to_index < n_states):
            raise BundleError(f"/transitions/{i}", "state index out of range")
        if not (0 <= t.actor < n_roles):
            raise BundleError(f"/transitions/{i}/actor", "role index out of range")
        for role, _ in t.health_deltas:
            if not (0 <= role < n_roles):
                raise BundleError(f"/transitions/{i}/health_deltas",
                                  "role index out of range")
    for key, index in definition.action_table.items():
        if not (0 <= index < n_transitions):
            raise BundleError("/action_table", f"transition index {index} out of range")
        if not (0 <= key[0] < n_states):
            raise BundleError("/action_table", f"state index {key[0]} out of range")
    for i, npc in enumerate(definition.npc_table):
        if not (0 <= npc.role < n_roles):
            raise BundleError(f"/npcs/{i}/role", "role index out of range")
    if not (0 <= definition.entry_index < n_states):
        raise BundleError("/entry_index", "state index out of range")
    if not (0 <= definition.exit_index < n_states):
        raise BundleError("/exit_index", "state index out of range")


# ---------------------------------------------------------------------------
# Definition diffing
# ---------------------------------------------------------------------------


def diff_definitions(a: GameDefinition, b: GameDefinition) -> list[str]:
    """Human-readable differences between two definitions; [] iff equal."""
    diffs: list[str] = []

    def compare(label: str, left: object, right: object) -> None:
        if left != right:
            diffs.append(f"{label}: {left!r} != {right!r}")

    compare("version", a.version, b.version)
    compare("scenario_name", a.scenario_name, b.scenario_name)
    compare("ui", a.ui, b.ui)
    compare("entry_index", a.entry_index, b.entry_index)
    compare("exit_index", a.exit_index, b.exit_index)

    def describe_transition(t: CompiledTransition, definition: GameDefinition) -> str:
        return (f"transition {t.index} "
                f"({definition.states[t.from_index].name} "
                f"--{t.action}--> {definition.states[t.to_index].name})")

    for name, left, right in (
        ("role", a.roles, b.roles),
        ("state", a.states, b.states),
        ("binding", a.bindings, b.bindings),
        ("npc", a.npc_table, b.npc_table),
    ):
        if len(left) != len(right):
            diffs.append(f"{name} count: {len(left)} != {len(right)}")
            continue
        for i, (x, y) in enumerate(zip(left, right)):
            if x != y:
                diffs.append(f"{name} {i}: {x!r} != {y!r}")

    if len(a.transitions) != len(b.transitions):
        diffs.append(f"transition count: {len(a.transitions)} != {len(b.transitions)}")
    else:
        for x, y in zip(a.transitions, b.transitions):
            if x != y:
                diffs.append(f"{describe_transition(x, a)} differs: {x!r} != {y!r}")

    table_a = sorted(a.action_table.items(), key=_table_row_key)
    table_b = sorted(b.action_table.items(), key=_table_row_key)
    if table_a != table_b:
        diffs.append("action_table differs")
    return diffs
