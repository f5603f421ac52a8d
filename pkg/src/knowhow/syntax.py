"""Formula language: AST, concrete syntax, normalization, substitution.

The core connectives are ``top``, atoms, ``~`` (negation), ``&``
(conjunction) and the binary modality ``Kh(condition, goal)`` ("there is a
single plan that is guaranteed to take every condition-state to a
goal-state").  The surface syntax additionally admits derived forms --
``bot``, ``|``, ``->``, ``<->``, the universal modality ``U`` and the
non-trivial variant ``Khp`` -- which :func:`normalize` rewrites into the
core.  ``U phi`` abbreviates ``Kh(~phi, bot)`` and ``Khp(a, b)``
abbreviates ``Kh(a, b) & ~U(a -> b)``.

Grammar (whitespace between tokens is insignificant)::

    phi   ::= disj ('->' phi | '<->' disj)?      # '->' right-associative,
    disj  ::= conj ('|' conj)*                   # '<->' non-chaining
    conj  ::= unary ('&' unary)*
    unary ::= '~' unary | 'U' unary
            | 'Kh' '(' phi ',' phi ')' | 'Khp' '(' phi ',' phi ')'
            | 'top' | 'bot' | ident | '(' phi ')'

Atom names match ``[a-z][a-zA-Z0-9_]*`` and must not be keywords.  The
maximum nesting depth of a parsed formula is 10,000; deeper input is a
hard error.  All values are immutable and all functions are pure.
"""

from __future__ import annotations

import re
import sys
import threading
from dataclasses import dataclass
from typing import Callable, Mapping, TypeVar

__all__ = [
    "Formula",
    "Top",
    "Bot",
    "Atom",
    "Not",
    "And",
    "Or",
    "Implies",
    "Iff",
    "U",
    "Kh",
    "KhPlus",
    "FormulaSyntaxError",
    "parse_formula",
    "print_formula",
    "normalize",
    "substitute",
    "substitute_all",
    "children",
    "formula_height",
    "atom_names",
    "MAX_NESTING_DEPTH",
]

MAX_NESTING_DEPTH = 10_000

KEYWORDS = frozenset({"top", "bot", "Kh", "Khp", "U"})

_ATOM_NAME = re.compile(r"[a-z][a-zA-Z0-9_]*\Z")


@dataclass(frozen=True)
class Formula:
    """Base class of all formula nodes."""

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bot(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    name: str

    def __post_init__(self) -> None:
        if not _ATOM_NAME.match(self.name) or self.name in KEYWORDS:
            raise ValueError(f"invalid atom name {self.name!r}")


@dataclass(frozen=True)
class Not(Formula):
    child: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class U(Formula):
    child: Formula


@dataclass(frozen=True)
class Kh(Formula):
    cond: Formula
    goal: Formula


@dataclass(frozen=True)
class KhPlus(Formula):
    cond: Formula
    goal: Formula


def children(phi: Formula) -> tuple[Formula, ...]:
    """The immediate subformulas of ``phi``, left to right."""
    if isinstance(phi, (Not, U)):
        return (phi.child,)
    if isinstance(phi, (And, Or, Implies, Iff)):
        return (phi.left, phi.right)
    if isinstance(phi, (Kh, KhPlus)):
        return (phi.cond, phi.goal)
    return ()


def formula_height(phi: Formula) -> int:
    """Height of the AST (a leaf has height 1).  Iterative, shares subterms."""
    heights: dict[int, int] = {}
    node_of: dict[int, Formula] = {}
    stack = [phi]
    while stack:
        node = stack.pop()
        key = id(node)
        if key in heights:
            continue
        node_of[key] = node
        kids = children(node)
        pending = [k for k in kids if id(k) not in heights]
        if pending:
            stack.append(node)
            stack.extend(pending)
        else:
            heights[key] = 1 + max((heights[id(k)] for k in kids), default=0)
    return heights[id(phi)]


def atom_names(phi: Formula) -> frozenset[str]:
    """All atom names occurring in ``phi``."""
    names: set[str] = set()
    stack = [phi]
    while stack:
        node = stack.pop()
        if isinstance(node, Atom):
            names.add(node.name)
        else:
            stack.extend(children(node))
    return frozenset(names)


# --- Deep-recursion guard -------------------------------------------------
#
# CPython's main thread segfaults well below the recursion depths the
# 10,000-level nesting contract requires, so operations on large inputs are
# shipped to a worker thread with a big stack.  `threading.stack_size` is
# process-global, hence the lock around thread creation.

_INLINE_TOKEN_LIMIT = 1_500
_INLINE_HEIGHT_LIMIT = 1_500
_WORKER_STACK_BYTES = 256 * 1024 * 1024
_WORKER_RECURSION_LIMIT = 150_000
_SPAWN_LOCK = threading.Lock()

_T = TypeVar("_T")


def _run_deep(fn: Callable[[], _T]) -> _T:
    results: list[_T] = []
    errors: list[BaseException] = []

    def runner() -> None:
        old = sys.getrecursionlimit()
        sys.setrecursionlimit(_WORKER_RECURSION_LIMIT)
        try:
            results.append(fn())
        except BaseException as exc:  # re-raised in the caller
            errors.append(exc)
        finally:
            sys.setrecursionlimit(old)

    with _SPAWN_LOCK:
        old_size = threading.stack_size(_WORKER_STACK_BYTES)
        try:
            thread = threading.Thread(target=runner, name="knowhow-deep")
            thread.start()
        finally:
            threading.stack_size(old_size)
    thread.join()
    if errors:
        raise errors[0]
    return results[0]


def _guarded(phi: Formula, fn: Callable[[], _T]) -> _T:
    if formula_height(phi) > _INLINE_HEIGHT_LIMIT:
        return _run_deep(fn)
    return fn()


# --- Tokenizer ------------------------------------------------------------

_WORD = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
_PUNCT = (
    ("<->", "<->"),
    ("->", "->"),
    ("(", "("),
    (")", ")"),
    (",", ","),
    ("&", "&"),
    ("|", "|"),
    ("~", "~"),
)


class FormulaSyntaxError(ValueError):
    """Raised for malformed formula text.

    ``offset`` is the 1-based character position of the offending input;
    ``expected`` lists the token kinds that would have been accepted there.
    """

    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        self.offset = offset
        self.expected = expected
        detail = f"{message} at offset {offset}"
        if expected:
            detail += " (expected " + " or ".join(expected) + ")"
        super().__init__(detail)


@dataclass(frozen=True)
class _Token:
    kind: str  # punctuation, keyword, "ident" or "end"
    text: str
    pos: int  # 1-based character offset


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        matched = False
        for literal, kind in _PUNCT:
            if text.startswith(literal, i):
                tokens.append(_Token(kind, literal, i + 1))
                i += len(literal)
                matched = True
                break
        if matched:
            continue
        word = _WORD.match(text, i)
        if word:
            w = word.group()
            if w in KEYWORDS:
                tokens.append(_Token(w, w, i + 1))
            elif w[0].islower():
                tokens.append(_Token("ident", w, i + 1))
            else:
                raise FormulaSyntaxError(f"unknown keyword {w!r}", i + 1)
            i = word.end()
            continue
        raise FormulaSyntaxError(f"unexpected character {ch!r}", i + 1)
    tokens.append(_Token("end", "", n + 1))
    return tokens


# --- Parser ---------------------------------------------------------------

_UNARY_EXPECTED = ("'~'", "'U'", "'Kh'", "'Khp'", "'top'", "'bot'", "identifier", "'('")


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, expected: tuple[str, ...]) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise FormulaSyntaxError(
                f"unexpected {self._describe(tok)}", tok.pos, expected
            )
        return self.advance()

    @staticmethod
    def _describe(tok: _Token) -> str:
        return "end of input" if tok.kind == "end" else f"token {tok.text!r}"

    def _check_depth(self, depth: int, pos: int) -> None:
        if depth > MAX_NESTING_DEPTH:
            raise FormulaSyntaxError(
                f"nesting depth exceeds {MAX_NESTING_DEPTH}", pos
            )

    def parse(self) -> Formula:
        phi = self.phi(1)
        tok = self.peek()
        if tok.kind != "end":
            raise FormulaSyntaxError(
                f"unexpected {self._describe(tok)}",
                tok.pos,
                ("'->'", "'<->'", "'|'", "'&'", "end of input"),
            )
        return phi

    def phi(self, depth: int) -> Formula:
        left = self.disj(depth)
        tok = self.peek()
        if tok.kind == "->":
            self.advance()
            self._check_depth(depth + 1, tok.pos)
            return Implies(left, self.phi(depth + 1))
        if tok.kind == "<->":
            self.advance()
            self._check_depth(depth + 1, tok.pos)
            return Iff(left, self.disj(depth + 1))
        return left

    def disj(self, depth: int) -> Formula:
        node = self.conj(depth)
        d = depth
        while self.peek().kind == "|":
            tok = self.advance()
            d += 1
            self._check_depth(d, tok.pos)
            node = Or(node, self.conj(d))
        return node

    def conj(self, depth: int) -> Formula:
        node = self.unary(depth)
        d = depth
        while self.peek().kind == "&":
            tok = self.advance()
            d += 1
            self._check_depth(d, tok.pos)
            node = And(node, self.unary(d))
        return node

    def unary(self, depth: int) -> Formula:
        tok = self.peek()
        self._check_depth(depth, tok.pos)
        if tok.kind == "~":
            self.advance()
            return Not(self.unary(depth + 1))
        if tok.kind == "U":
            self.advance()
            return U(self.unary(depth + 1))
        if tok.kind in ("Kh", "Khp"):
            self.advance()
            self.expect("(", ("'('",))
            cond = self.phi(depth + 1)
            self.expect(",", ("','",))
            goal = self.phi(depth + 1)
            self.expect(")", ("')'",))
            return Kh(cond, goal) if tok.kind == "Kh" else KhPlus(cond, goal)
        if tok.kind == "top":
            self.advance()
            return Top()
        if tok.kind == "bot":
            self.advance()
            return Bot()
        if tok.kind == "ident":
            self.advance()
            return Atom(tok.text)
        if tok.kind == "(":
            self.advance()
            inner = self.phi(depth + 1)
            self.expect(")", ("')'",))
            return inner
        raise FormulaSyntaxError(
            f"unexpected {self._describe(tok)}", tok.pos, _UNARY_EXPECTED
        )


def parse_formula(text: str) -> Formula:
    """Parse ``text`` into a :class:`Formula`.

    Raises :class:`FormulaSyntaxError` with a 1-based character offset and
    the set of expected tokens on malformed input.
    """
    tokens = _tokenize(text)
    if len(tokens) > _INLINE_TOKEN_LIMIT:
        return _run_deep(_Parser(tokens).parse)
    return _Parser(tokens).parse()


# --- Printer --------------------------------------------------------------

# Binding strength; higher binds tighter.  Atoms and Kh/Khp applications are
# self-delimiting.
_LEVEL_IMP = 1
_LEVEL_OR = 2
_LEVEL_AND = 3
_LEVEL_UNARY = 4
_LEVEL_ATOM = 5


def _level(phi: Formula) -> int:
    if isinstance(phi, (Implies, Iff)):
        return _LEVEL_IMP
    if isinstance(phi, Or):
        return _LEVEL_OR
    if isinstance(phi, And):
        return _LEVEL_AND
    if isinstance(phi, (Not, U)):
        return _LEVEL_UNARY
    return _LEVEL_ATOM


def _print(phi: Formula) -> str:
    if isinstance(phi, Top):
        return "top"
    if isinstance(phi, Bot):
        return "bot"
    if isinstance(phi, Atom):
        return phi.name
    if isinstance(phi, Not):
        return "~" + _print_at(phi.child, _LEVEL_UNARY)
    if isinstance(phi, U):
        return "U " + _print_at(phi.child, _LEVEL_UNARY)
    if isinstance(phi, And):
        return _print_at(phi.left, _LEVEL_AND) + " & " + _print_at(phi.right, _LEVEL_AND + 1)
    if isinstance(phi, Or):
        return _print_at(phi.left, _LEVEL_OR) + " | " + _print_at(phi.right, _LEVEL_OR + 1)
    if isinstance(phi, Implies):
        return _print_at(phi.left, _LEVEL_IMP + 1) + " -> " + _print_at(phi.right, _LEVEL_IMP)
    if isinstance(phi, Iff):
        return _print_at(phi.left, _LEVEL_IMP + 1) + " <-> " + _print_at(phi.right, _LEVEL_IMP + 1)
    if isinstance(phi, Kh):
        return f"Kh({_print(phi.cond)}, {_print(phi.goal)})"
    if isinstance(phi, KhPlus):
        return f"Khp({_print(phi.cond)}, {_print(phi.goal)})"
    raise TypeError(f"not a formula: {phi!r}")


def _print_at(phi: Formula, min_level: int) -> str:
    text = _print(phi)
    return "(" + text + ")" if _level(phi) < min_level else text


def print_formula(phi: Formula) -> str:
    """Concrete syntax for ``phi``; ``parse_formula`` inverts it exactly."""
    return _guarded(phi, lambda: _print(phi))


# --- Normalization --------------------------------------------------------


def _normalize(phi: Formula) -> Formula:
    if isinstance(phi, (Top, Atom)):
        return phi
    if isinstance(phi, Bot):
        return Not(Top())
    if isinstance(phi, Not):
        return Not(_normalize(phi.child))
    if isinstance(phi, And):
        return And(_normalize(phi.left), _normalize(phi.right))
    if isinstance(phi, Or):
        return Not(And(Not(_normalize(phi.left)), Not(_normalize(phi.right))))
    if isinstance(phi, Implies):
        return Not(And(_normalize(phi.left), Not(_normalize(phi.right))))
    if isinstance(phi, Iff):
        return And(
            _normalize(Implies(phi.left, phi.right)),
            _normalize(Implies(phi.right, phi.left)),
        )
    if isinstance(phi, U):
        return Kh(Not(_normalize(phi.child)), Not(Top()))
    if isinstance(phi, Kh):
        return Kh(_normalize(phi.cond), _normalize(phi.goal))
    if isinstance(phi, KhPlus):
        return And(
            Kh(_normalize(phi.cond), _normalize(phi.goal)),
            Not(_normalize(U(Implies(phi.cond, phi.goal)))),
        )
    raise TypeError(f"not a formula: {phi!r}")


def normalize(phi: Formula) -> Formula:
    """Rewrite ``phi`` to use only Top, Atom, Not, And and Kh.

    ``bot``, ``|``, ``->`` and ``<->`` expand classically; ``U a`` becomes
    ``Kh(~a, ~top)`` and ``Khp(a, b)`` becomes ``Kh(a, b) & ~U(a -> b)``
    (then expanded recursively).  Idempotent.  Note that ``<->`` and
    ``Khp`` duplicate subterms, so the result can be larger than the input.
    """
    return _guarded(phi, lambda: _normalize(phi))


# --- Substitution ---------------------------------------------------------


def _substitute_all(phi: Formula, mapping: Mapping[str, Formula]) -> Formula:
    if isinstance(phi, Atom):
        return mapping.get(phi.name, phi)
    if isinstance(phi, (Top, Bot)):
        return phi
    if isinstance(phi, Not):
        return Not(_substitute_all(phi.child, mapping))
    if isinstance(phi, U):
        return U(_substitute_all(phi.child, mapping))
    if isinstance(phi, And):
        return And(_substitute_all(phi.left, mapping), _substitute_all(phi.right, mapping))
    if isinstance(phi, Or):
        return Or(_substitute_all(phi.left, mapping), _substitute_all(phi.right, mapping))
    if isinstance(phi, Implies):
        return Implies(_substitute_all(phi.left, mapping), _substitute_all(phi.right, mapping))
    if isinstance(phi, Iff):
        return Iff(_substitute_all(phi.left, mapping), _substitute_all(phi.right, mapping))
    if isinstance(phi, Kh):
        return Kh(_substitute_all(phi.cond, mapping), _substitute_all(phi.goal, mapping))
    if isinstance(phi, KhPlus):
        return KhPlus(_substitute_all(phi.cond, mapping), _substitute_all(phi.goal, mapping))
    raise TypeError(f"not a formula: {phi!r}")


def substitute_all(phi: Formula, mapping: Mapping[str, Formula]) -> Formula:
    """Simultaneously replace every atom named in ``mapping``."""
    if not mapping:
        return phi
    return _guarded(phi, lambda: _substitute_all(phi, mapping))


def substitute(phi: Formula, letter: str, replacement: Formula) -> Formula:
    """Uniformly replace every occurrence of the atom ``letter`` in ``phi``."""
    return substitute_all(phi, {letter: replacement})
