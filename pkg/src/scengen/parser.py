"""Parser and serializer for the ``.scn`` scenario DSL.

The DSL is line/block oriented::

    scenario "Name" {
      meta key: "value"
      role doctor { player health: 100 }
      role guard  { npc behavior: chase(doctor) }
      entity door { tag: "door" placeholder: cube verbs: [use] }
      state Start { entry description: "..." }
      transition Start -> End on action(go, target=door) by doctor {
        score: 10
        health(doctor): -5
        feedback: "..."
        dialogue: "..."
      }
      goal reach(End)
    }

Whitespace between tokens is insignificant, ``#`` starts a comment,
strings are double-quoted with ``\\"`` and ``\\\\`` escapes.  ``parse``
never raises on malformed input; it returns a list of located errors and
recovers to the next top-level block so several errors surface per run.
On success the returned document is already normalized.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .core import (
    ACTION_NAME_RE,
    ActionSpec,
    BehaviorKind,
    BehaviorSpec,
    Controller,
    DEFAULT_HEALTH,
    Entity,
    EffectKind,
    Goal,
    GoalKind,
    GridPos,
    GRID_SIZE,
    Mode,
    Placeholder,
    Role,
    ScenarioDoc,
    ScoreEffect,
    StateKind,
    StateNode,
    TransitionRule,
    Verb,
    dispatch_key,
    normalize,
)


class ErrorKind(Enum):
    SYNTAX = "syntax"
    UNKNOWN_KEYWORD = "unknown-keyword"
    DUPLICATE_ID = "duplicate-id"
    DANGLING_REFERENCE = "dangling-reference"
    TYPE_MISMATCH = "type-mismatch"


@dataclass(frozen=True)
class ParseError:
    line: int
    column: int
    message: str
    kind: ErrorKind

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.kind.value}: {self.message}"


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

_PUNCT = {"{", "}", "(", ")", "[", "]", ":", ",", "="}


@dataclass(frozen=True)
class Token:
    type: str  # ident | string | int | punct | arrow | eof
    value: str
    line: int
    column: int


class _LexError(Exception):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(message)
        self.error = ParseError(line, column, message, ErrorKind.SYNTAX)


def _tokenize(source: str) -> list[Token]:
    # CRLF inputs are accepted by normalizing to LF up front.
    text = source.replace("\r\n", "\n").replace("\r", "\n")
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(text)

    def advance(k: int = 1) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if i < n and text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        c = text[i]
        if c in " \t\n":
            advance()
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                advance()
            continue
        start_line, start_col = line, col
        if c == "-" and i + 1 < n and text[i + 1] == ">":
            tokens.append(Token("arrow", "->", start_line, start_col))
            advance(2)
            continue
        if c in _PUNCT:
            tokens.append(Token("punct", c, start_line, start_col))
            advance()
            continue
        if c == '"':
            advance()
            buf: list[str] = []
            while True:
                if i >= n:
                    raise _LexError("unterminated string", start_line, start_col)
                ch = text[i]
                if ch == "\\":
                    if i + 1 >= n:
                        raise _LexError("unterminated string", start_line, start_col)
                    esc = text[i + 1]
                    if esc not in ('"', "\\"):
                        raise _LexError(
                            f"unsupported escape \\{esc}", line, col
                        )
                    buf.append(esc)
                    advance(2)
                    continue
                if ch == '"':
                    advance()
                    break
                buf.append(ch)
                advance()
            tokens.append(Token("string", "".join(buf), start_line, start_col))
            continue
        if c.isdigit() or (c in "+-" and i + 1 < n and text[i + 1].isdigit()):
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("int", text[i:j], start_line, start_col))
            advance(j - i)
            continue
        if c.isalpha() or c == "_":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token("ident", text[i:j], start_line, start_col))
            advance(j - i)
            continue
        raise _LexError(f"unexpected character {c!r}", start_line, start_col)

    tokens.append(Token("eof", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_BLOCK_KEYWORDS = {"role", "entity", "state", "transition", "goal", "meta"}


class _Abort(Exception):
    """Raised to unwind to block-level recovery after reporting an error."""


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.errors: list[ParseError] = []

    # -- token plumbing -----------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.type != "eof":
            self.pos += 1
        return tok

    def at(self, type_: str, value: str | None = None) -> bool:
        tok = self.peek()
        return tok.type == type_ and (value is None or tok.value == value)

    def error(self, tok: Token, message: str, kind: ErrorKind = ErrorKind.SYNTAX) -> None:
        self.errors.append(ParseError(tok.line, tok.column, message, kind))

    def fail(self, tok: Token, message: str, kind: ErrorKind = ErrorKind.SYNTAX) -> None:
        self.error(tok, message, kind)
        raise _Abort()

    def expect(self, type_: str, value: str | None = None, what: str | None = None) -> Token:
        tok = self.peek()
        if tok.type == type_ and (value is None or tok.value == value):
            return self.next()
        wanted = what or (value if value is not None else type_)
        self.fail(tok, f"expected {wanted}, found {self._describe(tok)}")
        raise AssertionError("unreachable")

    @staticmethod
    def _describe(tok: Token) -> str:
        if tok.type == "eof":
            return "end of input"
        return repr(tok.value)

    def expect_ident(self, what: str) -> Token:
        tok = self.peek()
        if tok.type != "ident":
            self.fail(tok, f"expected {what}, found {self._describe(tok)}")
        return self.next()

    def expect_string(self, what: str) -> str:
        tok = self.peek()
        if tok.type != "string":
            self.fail(tok, f"expected quoted {what}, found {self._describe(tok)}",
                      ErrorKind.TYPE_MISMATCH)
        return self.next().value

    def expect_int(self, what: str) -> int:
        tok = self.peek()
        if tok.type != "int":
            self.fail(tok, f"expected integer {what}, found {self._describe(tok)}",
                      ErrorKind.TYPE_MISMATCH)
        return int(self.next().value)

    def skip_to_block(self) -> None:
        """Recover after an error: drop tokens until the next top-level block
        keyword at scenario-body depth (or a closing brace / end of input)."""
        depth = 0
        while True:
            tok = self.peek()
            if tok.type == "eof":
                return
            if depth == 0 and tok.type == "ident" and tok.value in _BLOCK_KEYWORDS:
                return
            if tok.type == "punct" and tok.value == "{":
                depth += 1
            elif tok.type == "punct" and tok.value == "}":
                if depth == 0:
                    return
                depth -= 1
            self.next()

    # -- grammar ------------------------------------------------------------

    def parse_scenario(self) -> ScenarioDoc | None:
        try:
            self.expect("ident", "scenario")
            name = self.expect_string("scenario name")
            self.expect("punct", "{")
        except _Abort:
            return None

        roles: list[Role] = []
        entities: list[Entity] = []
        states: list[StateNode] = []
        transitions: list[tuple[TransitionRule, Token]] = []
        goals: list[tuple[Goal, Token]] = []
        metadata: list[tuple[str, str]] = []
        seen_names: dict[tuple[str, str], Token] = {}

        def declare(kind: str, tok: Token) -> bool:
            key = (kind, tok.value)
            if key in seen_names:
                self.error(tok, f"duplicate {kind} {tok.value!r}", ErrorKind.DUPLICATE_ID)
                return False
            seen_names[key] = tok
            return True

        while True:
            tok = self.peek()
            if tok.type == "punct" and tok.value == "}":
                self.next()
                break
            if tok.type == "eof":
                self.error(tok, "unexpected end of input inside scenario block")
                break
            if tok.type != "ident":
                self.error(tok, f"expected a block keyword, found {self._describe(tok)}")
                self.next()
                self.skip_to_block()
                continue
            try:
                if tok.value == "role":
                    role, name_tok = self.parse_role()
                    if declare("role", name_tok):
                        roles.append(role)
                elif tok.value == "entity":
                    entity, name_tok = self.parse_entity()
                    if declare("entity", name_tok):
                        entities.append(entity)
                elif tok.value == "state":
                    state, name_tok = self.parse_state()
                    if declare("state", name_tok):
                        states.append(state)
                elif tok.value == "transition":
                    start = self.peek()
                    transitions.append((self.parse_transition(), start))
                elif tok.value == "goal":
                    start = self.peek()
                    goals.append((self.parse_goal(), start))
                elif tok.value == "meta":
                    metadata.append(self.parse_meta())
                elif tok.value == "mode":
                    self.next()
                    self.expect("punct", ":")
                    mode_tok = self.expect_ident("mode")
                    if mode_tok.value != "linear":
                        self.error(mode_tok, f"unknown mode {mode_tok.value!r}",
                                   ErrorKind.TYPE_MISMATCH)
                else:
                    self.error(tok, f"unknown keyword {tok.value!r}",
                               ErrorKind.UNKNOWN_KEYWORD)
                    self.next()
                    self.skip_to_block()
            except _Abort:
                self.skip_to_block()

        tail = self.peek()
        if tail.type != "eof":
            self.error(tail, f"unexpected input after scenario block: {self._describe(tail)}")

        doc = ScenarioDoc(
            name=name,
            mode=Mode.LINEAR,
            roles=tuple(roles),
            entities=tuple(entities),
            states=tuple(states),
            transitions=tuple(t for t, _ in transitions),
            goals=tuple(g for g, _ in goals),
            metadata=tuple(metadata),
        )
        self.check_document(doc, transitions, goals, seen_names)
        return doc

    def parse_meta(self) -> tuple[str, str]:
        self.expect("ident", "meta")
        key = self.expect_ident("metadata key").value
        self.expect("punct", ":")
        return (key, self.expect_string("metadata value"))

    def parse_grid_pos(self) -> GridPos:
        self.expect("punct", "(")
        x_tok = self.peek()
        x = self.expect_int("x coordinate")
        self.expect("punct", ",")
        y_tok = self.peek()
        y = self.expect_int("y coordinate")
        self.expect("punct", ")")
        if not (0 <= x < GRID_SIZE):
            self.fail(x_tok, f"x coordinate {x} outside 0..{GRID_SIZE - 1}",
                      ErrorKind.TYPE_MISMATCH)
        if not (0 <= y < GRID_SIZE):
            self.fail(y_tok, f"y coordinate {y} outside 0..{GRID_SIZE - 1}",
                      ErrorKind.TYPE_MISMATCH)
        return GridPos(x, y)

    def parse_action_ref(self) -> ActionSpec:
        """``name`` or ``name(target)`` as used inside behavior lists."""
        name_tok = self.expect_ident("action name")
        self._check_action_name(name_tok)
        target = None
        if self.at("punct", "("):
            self.next()
            target = self.expect_ident("target entity").value
            self.expect("punct", ")")
        return ActionSpec(name=name_tok.value, target=target)

    def parse_action_list(self) -> tuple[ActionSpec, ...]:
        self.expect("punct", "[")
        actions: list[ActionSpec] = []
        if not self.at("punct", "]"):
            actions.append(self.parse_action_ref())
            while self.at("punct", ","):
                self.next()
                actions.append(self.parse_action_ref())
        self.expect("punct", "]")
        return tuple(actions)

    def _check_action_name(self, tok: Token) -> None:
        if not ACTION_NAME_RE.match(tok.value):
            self.fail(tok, f"action name {tok.value!r} must match [a-z][a-z0-9_]{{0,63}}")

    def parse_behavior(self) -> BehaviorSpec:
        kind_tok = self.expect_ident("behavior kind")
        kind = kind_tok.value
        if kind == "idle":
            return BehaviorSpec(kind=BehaviorKind.IDLE)
        if kind == "script":
            return BehaviorSpec(kind=BehaviorKind.SCRIPT, script=self.parse_action_list())
        if kind == "priority":
            return BehaviorSpec(kind=BehaviorKind.PRIORITY_LIST,
                                priorities=self.parse_action_list())
        if kind in ("chase", "interact"):
            self.expect("punct", "(")
            target = self.expect_ident("target").value
            self.expect("punct", ")")
            bk = BehaviorKind.CHASE if kind == "chase" else BehaviorKind.INTERACT
            return BehaviorSpec(kind=bk, target=target)
        if kind == "attack":
            self.expect("punct", "(")
            target = self.expect_ident("target role").value
            damage = None
            if self.at("punct", ","):
                self.next()
                self.expect("ident", "damage")
                self.expect("punct", ":")
                dmg_tok = self.peek()
                damage = self.expect_int("damage")
                if damage < 0:
                    self.fail(dmg_tok, "attack damage must be >= 0",
                              ErrorKind.TYPE_MISMATCH)
            self.expect("punct", ")")
            if damage is None:
                return BehaviorSpec(kind=BehaviorKind.ATTACK, target=target)
            return BehaviorSpec(kind=BehaviorKind.ATTACK, target=target,
                                attack_damage=damage)
        self.fail(kind_tok, f"unknown behavior {kind!r}", ErrorKind.UNKNOWN_KEYWORD)
        raise AssertionError("unreachable")

    def parse_role(self) -> tuple[Role, Token]:
        self.expect("ident", "role")
        name_tok = self.expect_ident("role name")
        self.expect("punct", "{")
        controller: Controller | None = None
        behavior: BehaviorSpec | None = None
        health: int | None = None
        position: GridPos | None = None
        while not self.at("punct", "}"):
            tok = self.peek()
            if tok.type != "ident":
                self.fail(tok, f"expected role attribute, found {self._describe(tok)}")
            if tok.value in ("player", "npc"):
                self.next()
                if controller is not None:
                    self.error(tok, "controller declared twice")
                controller = Controller.PLAYER if tok.value == "player" else Controller.NPC
            elif tok.value == "health":
                self.next()
                self.expect("punct", ":")
                hp_tok = self.peek()
                health = self.expect_int("health")
                if health < 0:
                    self.fail(hp_tok, "health must be >= 0", ErrorKind.TYPE_MISMATCH)
            elif tok.value == "behavior":
                self.next()
                self.expect("punct", ":")
                behavior = self.parse_behavior()
            elif tok.value == "position":
                self.next()
                self.expect("punct", ":")
                position = self.parse_grid_pos()
            else:
                self.fail(tok, f"unknown role attribute {tok.value!r}",
                          ErrorKind.UNKNOWN_KEYWORD)
        self.expect("punct", "}")
        if controller is None:
            self.fail(name_tok, f"role {name_tok.value!r} must declare player or npc")
        if controller is Controller.PLAYER and behavior is not None:
            self.fail(name_tok, f"player role {name_tok.value!r} cannot have a behavior",
                      ErrorKind.TYPE_MISMATCH)
        role = Role(
            name=name_tok.value,
            controller=controller,
            behavior=behavior,
            health=health if health is not None else DEFAULT_HEALTH,
            position=position,
        )
        return role, name_tok

    def parse_entity(self) -> tuple[Entity, Token]:
        self.expect("ident", "entity")
        name_tok = self.expect_ident("entity name")
        self.expect("punct", "{")
        tag: str | None = None
        placeholder = Placeholder.CUBE
        position: GridPos | None = None
        verbs: set[Verb] = set()
        while not self.at("punct", "}"):
            tok = self.peek()
            if tok.type != "ident":
                self.fail(tok, f"expected entity attribute, found {self._describe(tok)}")
            if tok.value == "tag":
                self.next()
                self.expect("punct", ":")
                tag_tok = self.peek()
                tag = self.expect_string("tag")
                if not tag:
                    self.fail(tag_tok, "tag must be non-empty", ErrorKind.TYPE_MISMATCH)
            elif tok.value == "placeholder":
                self.next()
                self.expect("punct", ":")
                ph_tok = self.expect_ident("placeholder shape")
                try:
                    placeholder = Placeholder(ph_tok.value)
                except ValueError:
                    self.fail(ph_tok, f"unknown placeholder {ph_tok.value!r} "
                              "(cube, sphere or capsule)", ErrorKind.TYPE_MISMATCH)
            elif tok.value == "position":
                self.next()
                self.expect("punct", ":")
                position = self.parse_grid_pos()
            elif tok.value == "verbs":
                self.next()
                self.expect("punct", ":")
                self.expect("punct", "[")
                while not self.at("punct", "]"):
                    verb_tok = self.expect_ident("verb")
                    try:
                        verbs.add(Verb(verb_tok.value))
                    except ValueError:
                        self.fail(verb_tok, f"unknown verb {verb_tok.value!r} "
                                  "(move, push, pull or use)", ErrorKind.TYPE_MISMATCH)
                    if self.at("punct", ","):
                        self.next()
                self.expect("punct", "]")
            else:
                self.fail(tok, f"unknown entity attribute {tok.value!r}",
                          ErrorKind.UNKNOWN_KEYWORD)
        self.expect("punct", "}")
        if tag is None:
            self.fail(name_tok, f"entity {name_tok.value!r} must declare a tag")
        return Entity(name=name_tok.value, tag=tag, placeholder=placeholder,
                      position=position, verbs=frozenset(verbs)), name_tok

    def parse_state(self) -> tuple[StateNode, Token]:
        self.expect("ident", "state")
        name_tok = self.expect_ident("state name")
        self.expect("punct", "{")
        kind = StateKind.TASK
        kind_declared = False
        description = ""
        on_enter_feedback: str | None = None
        while not self.at("punct", "}"):
            tok = self.peek()
            if tok.type != "ident":
                self.fail(tok, f"expected state attribute, found {self._describe(tok)}")
            if tok.value in ("entry", "exit", "task"):
                self.next()
                if kind_declared:
                    self.error(tok, "state kind declared twice")
                kind = StateKind(tok.value)
                kind_declared = True
            elif tok.value == "description":
                self.next()
                self.expect("punct", ":")
                description = self.expect_string("description")
            elif tok.value == "feedback":
                self.next()
                self.expect("punct", ":")
                on_enter_feedback = self.expect_string("feedback")
            else:
                self.fail(tok, f"unknown state attribute {tok.value!r}",
                          ErrorKind.UNKNOWN_KEYWORD)
        self.expect("punct", "}")
        return StateNode(name=name_tok.value, kind=kind, description=description,
                         on_enter_feedback=on_enter_feedback), name_tok

    def parse_transition(self) -> TransitionRule:
        self.expect("ident", "transition")
        from_tok = self.expect_ident("source state")
        self.expect("arrow", what="'->'")
        to_tok = self.expect_ident("target state")
        self.expect("ident", "on")
        self.expect("ident", "action")
        self.expect("punct", "(")
        action_tok = self.expect_ident("action name")
        self._check_action_name(action_tok)
        target: str | None = None
        if self.at("punct", ","):
            self.next()
            self.expect("ident", "target")
            self.expect("punct", "=")
            target = self.expect_ident("target entity").value
        self.expect("punct", ")")
        self.expect("ident", "by")
        actor_tok = self.expect_ident("actor role")

        effects: list[ScoreEffect] = []
        feedback: str | None = None
        dialogue: str | None = None
        if self.at("punct", "{"):
            self.next()
            while not self.at("punct", "}"):
                tok = self.peek()
                if tok.type != "ident":
                    self.fail(tok, f"expected transition attribute, found {self._describe(tok)}")
                if tok.value == "score":
                    self.next()
                    self.expect("punct", ":")
                    effects.append(ScoreEffect(kind=EffectKind.SCORE,
                                               delta=self.expect_int("score delta")))
                elif tok.value == "health":
                    self.next()
                    self.expect("punct", "(")
                    subject = self.expect_ident("role name").value
                    self.expect("punct", ")")
                    self.expect("punct", ":")
                    effects.append(ScoreEffect(kind=EffectKind.HEALTH,
                                               delta=self.expect_int("health delta"),
                                               subject=subject))
                elif tok.value == "feedback":
                    self.next()
                    self.expect("punct", ":")
                    feedback = self.expect_string("feedback")
                elif tok.value == "dialogue":
                    self.next()
                    self.expect("punct", ":")
                    dialogue = self.expect_string("dialogue")
                else:
                    self.fail(tok, f"unknown transition attribute {tok.value!r}",
                              ErrorKind.UNKNOWN_KEYWORD)
            self.expect("punct", "}")

        return TransitionRule(
            from_state=from_tok.value,
            to_state=to_tok.value,
            action=ActionSpec(name=action_tok.value, target=target, dialogue=dialogue),
            actor=actor_tok.value,
            effects=tuple(effects),
            feedback=feedback,
        )

    def parse_goal(self) -> Goal:
        self.expect("ident", "goal")
        kind_tok = self.expect_ident("goal kind")
        if kind_tok.value != "reach":
            self.fail(kind_tok, f"unknown goal kind {kind_tok.value!r}",
                      ErrorKind.UNKNOWN_KEYWORD)
        self.expect("punct", "(")
        state = self.expect_ident("goal state").value
        self.expect("punct", ")")
        return Goal(kind=GoalKind.REACH, state=state)

    # -- whole-document checks ----------------------------------------------

    def check_document(
        self,
        doc: ScenarioDoc,
        transitions: list[tuple[TransitionRule, Token]],
        goals: list[tuple[Goal, Token]],
        seen_names: dict[tuple[str, str], Token],
    ) -> None:
        """Referential and structural invariants that need the full document."""
        state_names = {s.name for s in doc.states}
        role_names = {r.name for r in doc.roles}
        entity_names = {e.name for e in doc.entities}
        known = role_names | entity_names

        def dangling(tok: Token, message: str) -> None:
            self.error(tok, message, ErrorKind.DANGLING_REFERENCE)

        seen_keys: dict[tuple[str, str, str | None], Token] = {}
        for rule, tok in transitions:
            if rule.from_state not in state_names:
                dangling(tok, f"transition names unknown state {rule.from_state!r}")
            if rule.to_state not in state_names:
                dangling(tok, f"transition names unknown state {rule.to_state!r}")
            if rule.actor not in role_names:
                dangling(tok, f"transition names unknown role {rule.actor!r}")
            if rule.action.target is not None and rule.action.target not in entity_names:
                dangling(tok, f"transition names unknown entity {rule.action.target!r}")
            for effect in rule.effects:
                if effect.subject is not None and effect.subject not in role_names:
                    dangling(tok, f"health effect names unknown role {effect.subject!r}")
            key = dispatch_key(rule)
            if key in seen_keys:
                self.error(tok, "duplicate transition {}/{} (same state, action and "
                           "target)".format(key[0], key[1]), ErrorKind.DUPLICATE_ID)
            else:
                seen_keys[key] = tok

        for goal, tok in goals:
            if goal.state not in state_names:
                dangling(tok, f"goal names unknown state {goal.state!r}")
            else:
                if doc.state(goal.state).kind is not StateKind.EXIT:
                    self.error(tok, f"goal state {goal.state!r} is not an exit state",
                               ErrorKind.TYPE_MISMATCH)

        for role in doc.roles:
            if role.behavior is None:
                continue
            tok = seen_names[("role", role.name)]
            b = role.behavior
            if b.kind is BehaviorKind.CHASE and b.target not in known:
                dangling(tok, f"behavior names unknown target {b.target!r}")
            if b.kind is BehaviorKind.ATTACK and b.target not in role_names:
                dangling(tok, f"attack behavior names unknown role {b.target!r}")
            if b.kind is BehaviorKind.INTERACT and b.target not in entity_names:
                dangling(tok, f"interact behavior names unknown entity {b.target!r}")
            for action in b.script + b.priorities:
                if action.target is not None and action.target not in entity_names:
                    dangling(tok, f"behavior action names unknown entity {action.target!r}")

        players = [r for r in doc.roles if r.controller is Controller.PLAYER]
        anchor = self.tokens[0]
        if len(players) != 1:
            self.error(anchor, f"scenario must declare exactly one player role, "
                       f"found {len(players)}")
        entries = [s for s in doc.states if s.kind is StateKind.ENTRY]
        exits = [s for s in doc.states if s.kind is StateKind.EXIT]
        if len(entries) != 1:
            self.error(anchor, f"scenario must declare exactly one entry state, "
                       f"found {len(entries)}")
        if not exits:
            self.error(anchor, "scenario must declare at least one exit state")


def parse(source: str) -> ScenarioDoc | list[ParseError]:
    """Parse DSL text into a normalized document, or a list of errors."""
    try:
        tokens = _tokenize(source)
    except _LexError as exc:
        return [exc.error]
    parser = _Parser(tokens)
    doc = parser.parse_scenario()
    if parser.errors:
        return parser.errors
    assert doc is not None
    return normalize(doc)


def parse_or_raise(source: str) -> ScenarioDoc:
    """Parse, raising ValueError with all error messages on failure."""
    result = parse(source)
    if isinstance(result, list):
        raise ValueError("; ".join(str(e) for e in result))
    return result


# ---------------------------------------------------------------------------
# Serializer
# ---------------------------------------------------------------------------


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


_VERB_ORDER = (Verb.MOVE, Verb.PUSH, Verb.PULL, Verb.USE)


def _format_action_ref(action: ActionSpec) -> str:
    if action.target is None:
        return action.name
    return f"{action.name}({action.target})"


def _format_behavior(b: BehaviorSpec) -> str:
    if b.kind is BehaviorKind.IDLE:
        return "idle"
    if b.kind is BehaviorKind.SCRIPT:
        return "script [" + ", ".join(_format_action_ref(a) for a in b.script) + "]"
    if b.kind is BehaviorKind.PRIORITY_LIST:
        return "priority [" + ", ".join(_format_action_ref(a) for a in b.priorities) + "]"
    if b.kind is BehaviorKind.CHASE:
        return f"chase({b.target})"
    if b.kind is BehaviorKind.INTERACT:
        return f"interact({b.target})"
    return f"attack({b.target}, damage: {b.attack_damage})"


def serialize(doc: ScenarioDoc) -> str:
    """Emit the canonical DSL text of a document (normalized, LF newlines).

    ``parse(serialize(doc))`` equals ``normalize(doc)`` for any valid doc.
    """
    doc = normalize(doc)
    out: list[str] = [f"scenario {_quote(doc.name)} {{"]

    for key, value in doc.metadata:
        out.append(f"  meta {key}: {_quote(value)}")
    if doc.metadata:
        out.append("")

    for role in doc.roles:
        out.append(f"  role {role.name} {{")
        out.append("    " + ("player" if role.controller is Controller.PLAYER else "npc"))
        out.append(f"    health: {role.health}")
        if role.behavior is not None:
            out.append(f"    behavior: {_format_behavior(role.behavior)}")
        if role.position is not None:
            out.append(f"    position: ({role.position.x}, {role.position.y})")
        out.append("  }")

    for entity in doc.entities:
        out.append(f"  entity {entity.name} {{")
        out.append(f"    tag: {_quote(entity.tag)}")
        out.append(f"    placeholder: {entity.placeholder.value}")
        if entity.position is not None:
            out.append(f"    position: ({entity.position.x}, {entity.position.y})")
        if entity.verbs:
            verbs = [v.value for v in _VERB_ORDER if v in entity.verbs]
            out.append("    verbs: [" + ", ".join(verbs) + "]")
        out.append("  }")

    for state in doc.states:
        out.append(f"  state {state.name} {{")
        out.append(f"    {state.kind.value}")
        if state.description:
            out.append(f"    description: {_quote(state.description)}")
        if state.on_enter_feedback is not None:
            out.append(f"    feedback: {_quote(state.on_enter_feedback)}")
        out.append("  }")

    for t in doc.transitions:
        action = t.action.name
        if t.action.target is not None:
            action += f", target={t.action.target}"
        header = (f"  transition {t.from_state} -> {t.to_state} "
                  f"on action({action}) by {t.actor}")
        body: list[str] = []
        for effect in t.effects:
            if effect.kind is EffectKind.SCORE:
                body.append(f"    score: {effect.delta}")
            else:
                body.append(f"    health({effect.subject}): {effect.delta}")
        if t.feedback is not None:
            body.append(f"    feedback: {_quote(t.feedback)}")
        if t.action.dialogue is not None:
            body.append(f"    dialogue: {_quote(t.action.dialogue)}")
        if body:
            out.append(header + " {")
            out.extend(body)
            out.append("  }")
        else:
            out.append(header)

    for goal in doc.goals:
        out.append(f"  goal reach({goal.state})")

    out.append("}")
    return "\n".join(out) + "\n"
