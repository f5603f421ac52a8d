"""Model generation, bounded countermodel search and the soundness audit.

Random mode draws a deterministic stream from a seed: state count uniform
in ``[1, max_states]``, every possible labelled edge present independently
with probability 1/2, every letter true at every state with probability
1/2 (draw order: state count, then edges by action/source/target, then
valuation by state/letter).  Exhaustive mode enumerates every model with
exactly ``max_states`` states and ``max_actions`` actions in a fixed
canonical order (edge bitmask outer, valuation bitmask inner, low bits
first), so sparse models come first; the closed-form count is
:func:`exhaustive_size`.  Both streams are deterministic functions of the
configuration: identical configurations yield identical streams.

Bounded countermodel search is enumerate-then-check: it is a falsifier
for non-valid formulas, not a decision procedure for validity.
"""

from __future__ import annotations

import random
import string
from dataclasses import dataclass
from itertools import product
from typing import Iterator, Optional

from .models import Model
from .proofs import AXIOM_SCHEMAS, theorem_db
from .semantics import check_U, ext, holds
from .syntax import (
    _ATOM_NAME,
    KEYWORDS,
    Atom,
    Formula,
    Implies,
    Kh,
    KhPlus,
    Not,
    U,
    atom_names,
    substitute_all,
)

__all__ = [
    "GenConfig",
    "generate",
    "exhaustive_size",
    "find_countermodel",
    "soundness_audit",
    "AuditReport",
    "AuditViolation",
]

EXHAUSTIVE_MAX_STATES = 4
EXHAUSTIVE_MAX_ACTIONS = 2


@dataclass(frozen=True)
class GenConfig:
    """Configuration for model generation."""

    max_states: int
    max_actions: int
    letters: tuple[str, ...] = ()
    seed: int = 0
    mode: str = "random"

    def __post_init__(self) -> None:
        object.__setattr__(self, "letters", tuple(self.letters))
        if self.max_states < 1:
            raise ValueError("max_states must be at least 1")
        if self.max_actions < 1:
            raise ValueError("max_actions must be at least 1")
        if self.max_actions > len(string.ascii_lowercase):
            raise ValueError("at most 26 actions are supported")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.mode not in ("random", "exhaustive"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "exhaustive" and (
            self.max_states > EXHAUSTIVE_MAX_STATES or self.max_actions > EXHAUSTIVE_MAX_ACTIONS
        ):
            raise ValueError(
                "exhaustive bounds exceeded: need max_states <= "
                f"{EXHAUSTIVE_MAX_STATES} and max_actions <= {EXHAUSTIVE_MAX_ACTIONS}"
            )
        for letter in self.letters:
            if not _ATOM_NAME.match(letter) or letter in KEYWORDS:
                raise ValueError(f"bad proposition letter {letter!r}")


def _state_names(n: int) -> tuple[str, ...]:
    return tuple(f"s{i}" for i in range(1, n + 1))


def _action_names(k: int) -> tuple[str, ...]:
    return tuple(string.ascii_lowercase[:k])


def _random_models(cfg: GenConfig, count: int) -> Iterator[Model]:
    rng = random.Random(cfg.seed)
    actions = _action_names(cfg.max_actions)
    for _ in range(count):
        states = _state_names(rng.randint(1, cfg.max_states))
        transitions: dict[str, set[tuple[str, str]]] = {}
        for a in actions:
            pairs = set()
            for src in states:
                for dst in states:
                    if rng.getrandbits(1):
                        pairs.add((src, dst))
            transitions[a] = pairs
        valuation: dict[str, set[str]] = {}
        for s in states:
            valuation[s] = {letter for letter in cfg.letters if rng.getrandbits(1)}
        yield Model(states, actions, transitions, valuation)


def _exhaustive_models(cfg: GenConfig, count: Optional[int]) -> Iterator[Model]:
    states = _state_names(cfg.max_states)
    actions = _action_names(cfg.max_actions)
    edge_slots = [(a, src, dst) for a in actions for src in states for dst in states]
    val_slots = [(letter, s) for letter in cfg.letters for s in states]
    emitted = 0
    for edge_mask in range(1 << len(edge_slots)):
        transitions: dict[str, set[tuple[str, str]]] = {a: set() for a in actions}
        for bit, (a, src, dst) in enumerate(edge_slots):
            if edge_mask >> bit & 1:
                transitions[a].add((src, dst))
        for val_mask in range(1 << len(val_slots)):
            if count is not None and emitted >= count:
                return
            valuation: dict[str, set[str]] = {s: set() for s in states}
            for bit, (letter, s) in enumerate(val_slots):
                if val_mask >> bit & 1:
                    valuation[s].add(letter)
            emitted += 1
            yield Model(states, actions, transitions, valuation)


def exhaustive_size(cfg: GenConfig) -> int:
    """Closed-form size of the exhaustive stream for ``cfg``."""
    n, k, nletters = cfg.max_states, cfg.max_actions, len(cfg.letters)
    return 1 << (k * n * n + nletters * n)


def generate(cfg: GenConfig, count: Optional[int] = None) -> Iterator[Model]:
    """Stream models per ``cfg``; ``count`` caps the stream.

    Random mode requires an explicit ``count``; exhaustive mode emits the
    whole space when ``count`` is None.
    """
    if cfg.mode == "random":
        if count is None:
            raise ValueError("random generation needs an explicit count")
        return _random_models(cfg, count)
    return _exhaustive_models(cfg, count)


def find_countermodel(
    phi: Formula, cfg: GenConfig, limit: Optional[int] = None
) -> Optional[tuple[Model, str]]:
    """First generated model and state falsifying ``phi``, or None.

    Deterministic given ``cfg``.  ``limit`` caps how many models are tried
    (required for random mode).  A hit is confirmed by an independent
    re-evaluation before being returned.
    """
    for model in generate(cfg, limit):
        truth = ext(model, phi)
        if len(truth) != len(model.states):
            state = next(s for s in model.states if s not in truth)
            if holds(model, state, phi):
                raise RuntimeError("countermodel confirmation failed")
            return model, state
    return None


@dataclass(frozen=True)
class AuditViolation:
    model_number: int  # 1-based position in the generated stream
    schema: str
    assignment: tuple[tuple[str, str], ...]
    model: Model


@dataclass(frozen=True)
class AuditReport:
    models_checked: int
    instances_checked: int
    violations: tuple[AuditViolation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def _audit_schemas() -> tuple[tuple[str, Formula, tuple[str, ...]], ...]:
    named: list[tuple[str, Formula]] = list(AXIOM_SCHEMAS.items())
    named += [(entry.name, entry.formula) for entry in theorem_db()]
    return tuple((name, schema, tuple(sorted(atom_names(schema)))) for name, schema in named)


def soundness_audit(cfg: GenConfig, count: int) -> AuditReport:
    """Evaluate the axiom validities, the derived theorems, the two
    evaluation routes for ``U`` and the ``Khp`` expansion on every
    generated model, under all assignments of schema letters to
    ``cfg.letters``.  The report lists violations; expected none."""
    if not cfg.letters:
        raise ValueError("the audit needs at least one proposition letter")
    schemas = _audit_schemas()
    atoms = {x: Atom(x) for x in cfg.letters}
    violations: list[AuditViolation] = []
    models_checked = 0
    instances = 0
    for number, model in enumerate(generate(cfg, count), start=1):
        models_checked += 1
        everything = frozenset(model.states)
        for name, schema, schema_letters in schemas:
            for combo in product(cfg.letters, repeat=len(schema_letters)):
                instance = substitute_all(schema, dict(zip(schema_letters, (atoms[x] for x in combo))))
                instances += 1
                if ext(model, instance) != everything:
                    violations.append(
                        AuditViolation(number, name, tuple(zip(schema_letters, combo)), model)
                    )
        for x in cfg.letters:
            instances += 1
            phi = atoms[x]
            if check_U(model, phi) != (ext(model, U(phi)) == everything):
                violations.append(AuditViolation(number, "U-ROUTE", (("p", x),), model))
        for x, y in product(cfg.letters, repeat=2):
            phi = Implies(atoms[x], atoms[y])
            instances += 1
            if check_U(model, phi) != (ext(model, U(phi)) == everything):
                violations.append(AuditViolation(number, "U-ROUTE", (("p", x), ("q", y)), model))
            instances += 1
            expanded = ext(model, Kh(atoms[x], atoms[y])) & ext(model, Not(U(phi)))
            if ext(model, KhPlus(atoms[x], atoms[y])) != expanded:
                violations.append(AuditViolation(number, "KHPLUS-DEF", (("p", x), ("q", y)), model))
    return AuditReport(models_checked, instances, tuple(violations))
