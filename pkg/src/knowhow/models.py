"""Finite labelled transition systems with a line-based text format.

A model is a nonempty set of states, a finite action alphabet, one
transition relation per action and a valuation assigning proposition
letters to states.  Models are immutable after construction; all queries
are pure, so concurrent reads are safe.

File format (UTF-8, one declaration per line)::

    # comment lines and blank lines are ignored
    state <id> [<prop> ... <prop>]   # valuation bracket may be empty
    action <name>                    # optional explicit declaration
    trans <src> <action> <dst>       # one labelled edge

Ids match ``[A-Za-z0-9_]+``.  Declaration order of ``state`` lines fixes
the canonical state ordering; actions are ordered by first mention
(``action`` line or ``trans`` line).  Duplicate ``trans`` lines are
idempotent.  Transitions may reference states declared later in the file.
"""

from __future__ import annotations

import re
from typing import Iterable, Mapping, Sequence

from .syntax import _ATOM_NAME, KEYWORDS

__all__ = ["Model", "ModelFormatError", "parse_model", "format_model", "Plan"]

# A plan is a finite, possibly empty sequence of action names.
Plan = tuple[str, ...]

_ID = re.compile(r"[A-Za-z0-9_]+\Z")
_STATE_LINE = re.compile(r"state\s+(\S+)\s+\[\s*([^\[\]]*?)\s*\]\s*\Z")


class ModelFormatError(ValueError):
    """Raised for malformed model text; ``line`` is the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class Model:
    """A finite ability map: states, actions, labelled edges, valuation."""

    __slots__ = ("states", "actions", "transitions", "valuation", "_index", "_succ", "_can", "_state_set")

    def __init__(
        self,
        states: Sequence[str],
        actions: Sequence[str],
        transitions: Mapping[str, Iterable[tuple[str, str]]],
        valuation: Mapping[str, Iterable[str]],
    ):
        states = tuple(states)
        actions = tuple(actions)
        if not states:
            raise ValueError("a model needs at least one state")
        if len(set(states)) != len(states):
            raise ValueError("duplicate state id")
        if len(set(actions)) != len(actions):
            raise ValueError("duplicate action name")
        state_set = frozenset(states)
        for label in transitions:
            if label not in actions:
                raise ValueError(f"transition label {label!r} is not a declared action")
        trans = {a: frozenset(transitions.get(a, ())) for a in actions}
        for a, pairs in trans.items():
            for src, dst in pairs:
                if src not in state_set or dst not in state_set:
                    raise ValueError(f"transition {src} -{a}-> {dst} mentions an undeclared state")
        for s in valuation:
            if s not in state_set:
                raise ValueError(f"valuation mentions undeclared state {s!r}")
        val = {s: frozenset(valuation.get(s, ())) for s in states}

        object.__setattr__(self, "states", states)
        object.__setattr__(self, "actions", actions)
        object.__setattr__(self, "transitions", trans)
        object.__setattr__(self, "valuation", val)
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(states)})
        object.__setattr__(self, "_state_set", state_set)
        succ: dict[str, dict[str, frozenset[str]]] = {}
        for a in actions:
            by_src: dict[str, set[str]] = {}
            for src, dst in trans[a]:
                by_src.setdefault(src, set()).add(dst)
            succ[a] = {src: frozenset(dsts) for src, dsts in by_src.items()}
        object.__setattr__(self, "_succ", succ)
        object.__setattr__(self, "_can", {a: frozenset(succ[a]) for a in actions})

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("Model is immutable")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Model):
            return NotImplemented
        return (
            self.states == other.states
            and self.actions == other.actions
            and self.transitions == other.transitions
            and self.valuation == other.valuation
        )

    def __hash__(self) -> int:
        return hash((self.states, self.actions))

    def __repr__(self) -> str:
        edges = sum(len(p) for p in self.transitions.values())
        return f"<Model |S|={len(self.states)} |A|={len(self.actions)} edges={edges}>"

    # -- queries ------------------------------------------------------

    def index(self, state: str) -> int:
        """Declaration-order position of ``state``."""
        try:
            return self._index[state]
        except KeyError:
            raise ValueError(f"unknown state {state!r}") from None

    def canonical(self, states: Iterable[str]) -> tuple[str, ...]:
        """Duplicate-free tuple ordered by declaration order."""
        return tuple(sorted(set(states), key=self.index))

    def require_action(self, action: str) -> None:
        if action not in self.transitions:
            raise ValueError(f"unknown action {action!r}")

    def successors(self, state: str, action: str) -> frozenset[str]:
        """All ``action``-successors of ``state``."""
        self.require_action(action)
        return self._succ[action].get(state, frozenset())

    def post_image(self, states: Iterable[str], action: str) -> frozenset[str]:
        """All states reachable from some member of ``states`` by ``action``."""
        self.require_action(action)
        get = self._succ[action].get
        out: set[str] = set()
        for s in states:
            found = get(s)
            if found:
                out |= found
        return frozenset(out)

    def applicable(self, states: Iterable[str], action: str) -> bool:
        """True iff every member of ``states`` has at least one
        ``action``-successor (vacuously true for the empty set)."""
        self.require_action(action)
        can = self._can[action]
        return all(s in can for s in states)

    def labelled(self, letter: str) -> frozenset[str]:
        """States whose valuation contains ``letter``."""
        return frozenset(s for s in self.states if letter in self.valuation[s])


def _check_id(token: str, what: str, line_no: int) -> str:
    if not _ID.match(token):
        raise ModelFormatError(f"bad {what} id {token!r}", line_no)
    return token


def parse_model(text: str) -> Model:
    """Parse the line-based model format into a :class:`Model`."""
    states: list[str] = []
    actions: list[str] = []
    seen_states: set[str] = set()
    valuation: dict[str, list[str]] = {}
    edges: list[tuple[int, str, str, str]] = []  # line, src, action, dst

    def declare_action(name: str) -> None:
        if name not in actions:
            actions.append(name)

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head = line.split(None, 1)[0]
        if head == "state":
            m = _STATE_LINE.match(line)
            if not m:
                raise ModelFormatError("malformed state line (want: state <id> [<props>])", line_no)
            sid = _check_id(m.group(1), "state", line_no)
            if sid in seen_states:
                raise ModelFormatError(f"duplicate state id {sid!r}", line_no)
            seen_states.add(sid)
            states.append(sid)
            props = m.group(2).split()
            for p in props:
                if not _ATOM_NAME.match(p) or p in KEYWORDS:
                    raise ModelFormatError(f"bad proposition letter {p!r}", line_no)
            valuation[sid] = props
        elif head == "action":
            parts = line.split()
            if len(parts) != 2:
                raise ModelFormatError("malformed action line (want: action <name>)", line_no)
            declare_action(_check_id(parts[1], "action", line_no))
        elif head == "trans":
            parts = line.split()
            if len(parts) != 4:
                raise ModelFormatError("malformed trans line (want: trans <src> <action> <dst>)", line_no)
            _, src, act, dst = parts
            _check_id(src, "state", line_no)
            _check_id(dst, "state", line_no)
            declare_action(_check_id(act, "action", line_no))
            edges.append((line_no, src, act, dst))
        else:
            raise ModelFormatError(f"unknown directive {head!r}", line_no)

    if not states:
        raise ModelFormatError("model declares no states")
    for line_no, src, act, dst in edges:
        for endpoint in (src, dst):
            if endpoint not in seen_states:
                raise ModelFormatError(f"transition references undeclared state {endpoint!r}", line_no)

    transitions: dict[str, set[tuple[str, str]]] = {a: set() for a in actions}
    for _, src, act, dst in edges:
        transitions[act].add((src, dst))
    return Model(states, actions, transitions, valuation)


def format_model(model: Model) -> str:
    """Serialize ``model`` in the model file format.

    Deterministic: states and actions in declaration order, each action's
    edges sorted by (source, target) declaration order.  ``parse_model``
    inverts it exactly.
    """
    lines: list[str] = []
    for s in model.states:
        props = sorted(model.valuation[s])
        lines.append(f"state {s} [{' '.join(props)}]" if props else f"state {s} []")
    for a in model.actions:
        lines.append(f"action {a}")
    for a in model.actions:
        pairs = sorted(model.transitions[a], key=lambda e: (model.index(e[0]), model.index(e[1])))
        for src, dst in pairs:
            lines.append(f"trans {src} {a} {dst}")
    return "\n".join(lines) + "\n"
