"""Hilbert-style proof checking.

A proof is a numbered list of lines, each carrying a formula and a
justification: ``taut`` (propositional tautology over abstracted modal
units), a named axiom schema instance with an explicit letter binding,
modus ponens, universal necessitation (from ``phi`` infer ``U phi``),
uniform substitution of an earlier line, or (in hypothesis mode) a
reference to a numbered hypothesis.

Axiom schemas::

    DISTU   U p & U(p -> q) -> U q
    COMPKh  Kh(p, r) & Kh(r, q) -> Kh(p, q)
    EMP     U(p -> q) -> Kh(p, q)
    TU      U p -> p
    4KU     Kh(p, q) -> U Kh(p, q)
    5KU     ~Kh(p, q) -> U ~Kh(p, q)

Equality of formulas is taken up to :func:`~knowhow.syntax.normalize` for
axiom instances, modus ponens and necessitation, so lines spelled with
``U`` unify with their ``Kh(~phi, bot)`` expansions; substitution and
hypothesis citations are checked structurally, since substitution is a
purely syntactic rule.

Proof file format (UTF-8; ``#`` starts a comment)::

    hypothesis <formula>                  # optional, numbered 1.. in order
    <n>. <formula> ; taut
    <n>. <formula> ; axiom <NAME> p=<formula> q=<formula> [r=<formula>]
    <n>. <formula> ; mp <i> <j>           # line j is (line i -> this)
    <n>. <formula> ; necu <i>
    <n>. <formula> ; sub <i> <letter> <formula>
    <n>. <formula> ; hyp <h>
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from itertools import product
from typing import Mapping, Optional, Sequence, Union

from .syntax import (
    And,
    Atom,
    Formula,
    FormulaSyntaxError,
    Implies,
    Kh,
    Not,
    Top,
    U,
    _guarded,
    atom_names,
    children,
    normalize,
    parse_formula,
    substitute,
    substitute_all,
)

__all__ = [
    "Taut",
    "AxiomInst",
    "MP",
    "NecU",
    "Sub",
    "Hyp",
    "Justification",
    "ProofLine",
    "Proof",
    "ProofVerdict",
    "ProofFormatError",
    "TautologyBudgetError",
    "ProofDocument",
    "TheoremEntry",
    "AXIOM_SCHEMAS",
    "instantiate_axiom",
    "is_tautology",
    "check_proof",
    "check_proof_under",
    "theorem_db",
    "parse_proof",
]

AXIOM_SCHEMAS: dict[str, Formula] = {
    "DISTU": parse_formula("U p & U(p -> q) -> U q"),
    "COMPKh": parse_formula("Kh(p, r) & Kh(r, q) -> Kh(p, q)"),
    "EMP": parse_formula("U(p -> q) -> Kh(p, q)"),
    "TU": parse_formula("U p -> p"),
    "4KU": parse_formula("Kh(p, q) -> U Kh(p, q)"),
    "5KU": parse_formula("~Kh(p, q) -> U ~Kh(p, q)"),
}

_AXIOM_LETTERS = {name: frozenset(atom_names(schema)) for name, schema in AXIOM_SCHEMAS.items()}

TAUTOLOGY_LETTER_BUDGET = 20


class TautologyBudgetError(ValueError):
    """Raised when a tautology check would need more than 20 distinct units."""


class ProofFormatError(ValueError):
    """Raised for malformed proof text; ``line`` is the 1-based file line."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


# --- Justifications -------------------------------------------------------


@dataclass(frozen=True)
class Taut:
    pass


@dataclass(frozen=True)
class AxiomInst:
    name: str
    binding: Mapping[str, Formula]

    def __post_init__(self) -> None:
        object.__setattr__(self, "binding", dict(self.binding))


@dataclass(frozen=True)
class MP:
    premise: int
    implication: int


@dataclass(frozen=True)
class NecU:
    premise: int


@dataclass(frozen=True)
class Sub:
    premise: int
    letter: str
    replacement: Formula


@dataclass(frozen=True)
class Hyp:
    index: int


Justification = Union[Taut, AxiomInst, MP, NecU, Sub, Hyp]


@dataclass(frozen=True)
class ProofLine:
    index: int
    formula: Formula
    justification: Justification


@dataclass(frozen=True)
class Proof:
    lines: tuple[ProofLine, ...]


@dataclass(frozen=True)
class ProofVerdict:
    """``accepted`` or rejected at ``line`` with ``reason``."""

    accepted: bool
    line: Optional[int] = None
    reason: Optional[str] = None

    def __bool__(self) -> bool:
        return self.accepted


@dataclass(frozen=True)
class ProofDocument:
    """A parsed proof file: hypotheses (possibly none) plus the derivation."""

    hypotheses: tuple[Formula, ...]
    proof: Proof


@dataclass(frozen=True)
class TheoremEntry:
    name: str
    formula: Formula
    proof: Proof


# --- Axiom instantiation ---------------------------------------------------


def instantiate_axiom(name: str, binding: Mapping[str, Formula]) -> Formula:
    """The named schema with its letters simultaneously replaced."""
    schema = AXIOM_SCHEMAS[name]
    missing = _AXIOM_LETTERS[name] - set(binding)
    extra = set(binding) - _AXIOM_LETTERS[name]
    if missing or extra:
        raise ValueError(f"bad binding for axiom {name}: missing={sorted(missing)} extra={sorted(extra)}")
    return substitute_all(schema, binding)


# --- Tautology check -------------------------------------------------------


def _abstraction_units(core: Formula) -> list[Formula]:
    """Maximal non-Boolean subformulas (and atoms) of a normalized formula,
    in first-occurrence order; identical subformulas share a unit."""
    units: list[Formula] = []
    seen: set[Formula] = set()
    stack = [core]
    while stack:
        node = stack.pop()
        if isinstance(node, (Atom, Kh)):
            if node not in seen:
                seen.add(node)
                units.append(node)
        elif isinstance(node, (Not, And)):
            stack.extend(reversed(children(node)))
        elif not isinstance(node, Top):
            raise TypeError(f"not a core formula: {node!r}")
    return units


def _truth(phi: Formula, env: dict[Formula, bool]) -> bool:
    if isinstance(phi, Top):
        return True
    if isinstance(phi, (Atom, Kh)):
        return env[phi]
    if isinstance(phi, Not):
        return not _truth(phi.child, env)
    if isinstance(phi, And):
        return _truth(phi.left, env) and _truth(phi.right, env)
    raise TypeError(f"not a core formula: {phi!r}")


def is_tautology(phi: Formula) -> bool:
    """Decide propositional validity of ``phi`` by truth table.

    Each maximal Kh-rooted subformula of the normalization (``U`` and
    ``Khp`` included, via their expansions) is abstracted to a fresh
    propositional unit; identical subformulas share a unit.  Raises
    :class:`TautologyBudgetError` beyond 20 distinct units.
    """
    core = normalize(phi)

    def run() -> bool:
        units = _abstraction_units(core)
        if len(units) > TAUTOLOGY_LETTER_BUDGET:
            raise TautologyBudgetError(
                f"{len(units)} abstraction units exceed the budget of {TAUTOLOGY_LETTER_BUDGET}"
            )
        for bits in product((False, True), repeat=len(units)):
            if not _truth(core, dict(zip(units, bits))):
                return False
        return True

    return _guarded(core, run)


# --- Proof checking --------------------------------------------------------


def _norm_equal(a: Formula, b: Formula) -> bool:
    return normalize(a) == normalize(b)


def _check_line(
    line: ProofLine, earlier: list[Formula], hypotheses: tuple[Formula, ...]
) -> Optional[str]:
    just = line.justification
    if isinstance(just, Taut):
        if not is_tautology(line.formula):
            return "not a propositional tautology"
        return None
    if isinstance(just, AxiomInst):
        if just.name not in AXIOM_SCHEMAS:
            return f"unknown axiom {just.name!r}"
        letters = _AXIOM_LETTERS[just.name]
        missing = letters - set(just.binding)
        if missing:
            return f"binding for axiom {just.name} is missing letter {sorted(missing)[0]!r}"
        extra = set(just.binding) - letters
        if extra:
            return f"axiom {just.name} does not use letter {sorted(extra)[0]!r}"
        if not _norm_equal(line.formula, instantiate_axiom(just.name, just.binding)):
            return f"does not match axiom {just.name} under the given binding"
        return None
    if isinstance(just, MP):
        for ref in (just.premise, just.implication):
            if not 1 <= ref < line.index:
                return f"reference to line {ref} is out of range"
        premise = earlier[just.premise - 1]
        implication = earlier[just.implication - 1]
        if not _norm_equal(implication, Implies(premise, line.formula)):
            return (
                f"line {just.implication} is not (line {just.premise} -> this line) "
                "up to normalization"
            )
        return None
    if isinstance(just, NecU):
        if not 1 <= just.premise < line.index:
            return f"reference to line {just.premise} is out of range"
        if not _norm_equal(line.formula, U(earlier[just.premise - 1])):
            return f"not U applied to line {just.premise} up to normalization"
        return None
    if isinstance(just, Sub):
        if not 1 <= just.premise < line.index:
            return f"reference to line {just.premise} is out of range"
        expected = substitute(earlier[just.premise - 1], just.letter, just.replacement)
        if line.formula != expected:
            return (
                f"not the result of substituting {just.letter!r} in line {just.premise}"
            )
        return None
    if isinstance(just, Hyp):
        if not 1 <= just.index <= len(hypotheses):
            return f"hypothesis index {just.index} is out of range"
        if line.formula != hypotheses[just.index - 1]:
            return f"does not match hypothesis {just.index}"
        return None
    return f"unknown justification {just!r}"


def check_proof_under(proof: Proof, hypotheses: Sequence[Formula] = ()) -> ProofVerdict:
    """Check every line; hypotheses may be cited with ``Hyp`` justifications.

    Hypotheses are treated as given theorems (necessitation and
    substitution may be applied to their consequences), which is the
    reading needed to replay rule-admissibility derivations.
    """
    hyps = tuple(hypotheses)
    if not proof.lines:
        return ProofVerdict(False, None, "proof has no lines")
    earlier: list[Formula] = []
    for position, line in enumerate(proof.lines, start=1):
        if line.index != position:
            return ProofVerdict(
                False, position, f"line numbered {line.index}, expected {position}"
            )
        reason = _check_line(line, earlier, hyps)
        if reason is not None:
            return ProofVerdict(False, line.index, reason)
        earlier.append(line.formula)
    return ProofVerdict(True)


def check_proof(proof: Proof) -> ProofVerdict:
    """Check a hypothesis-free proof."""
    return check_proof_under(proof, ())


# --- Bundled theorem derivations -------------------------------------------


class _Builder:
    """Assembles proofs line by line; formulas may be given as text."""

    def __init__(self) -> None:
        self.lines: list[ProofLine] = []

    @staticmethod
    def _f(formula: Union[str, Formula]) -> Formula:
        return parse_formula(formula) if isinstance(formula, str) else formula

    def _add(self, formula: Union[str, Formula], just: Justification) -> int:
        index = len(self.lines) + 1
        self.lines.append(ProofLine(index, self._f(formula), just))
        return index

    def formula(self, index: int) -> Formula:
        return self.lines[index - 1].formula

    def taut(self, formula: Union[str, Formula]) -> int:
        return self._add(formula, Taut())

    def axiom(self, name: str, **binding: Union[str, Formula]) -> int:
        bound = {letter: self._f(f) for letter, f in binding.items()}
        return self._add(instantiate_axiom(name, bound), AxiomInst(name, bound))

    def axiom_shown(self, formula: Union[str, Formula], name: str, **binding: Union[str, Formula]) -> int:
        # Display formula spelled with U; matches the schema up to normalization.
        bound = {letter: self._f(f) for letter, f in binding.items()}
        return self._add(formula, AxiomInst(name, bound))

    def mp(self, premise: int, implication: int) -> int:
        impl = self.formula(implication)
        assert isinstance(impl, Implies) and impl.left == self.formula(premise)
        return self._add(impl.right, MP(premise, implication))

    def necu(self, premise: int) -> int:
        return self._add(U(self.formula(premise)), NecU(premise))

    def sub(self, premise: int, letter: str, replacement: Union[str, Formula]) -> int:
        repl = self._f(replacement)
        return self._add(
            substitute(self.formula(premise), letter, repl), Sub(premise, letter, repl)
        )

    def hyp(self, index: int, formula: Union[str, Formula]) -> int:
        return self._add(formula, Hyp(index))

    def chain(self, premises: Sequence[int], conclusion: Union[str, Formula]) -> int:
        """Derive ``conclusion`` from earlier lines by one curried tautology
        (premise_1 -> ... -> premise_k -> conclusion) and k modus ponens."""
        target = self._f(conclusion)
        curried = target
        for index in reversed(premises):
            curried = Implies(self.formula(index), curried)
        step = self.taut(curried)
        for index in premises:
            step = self.mp(index, step)
        return step

    def build(self) -> Proof:
        return Proof(tuple(self.lines))


def _prove_tri() -> Proof:
    b = _Builder()
    t = b.taut("p -> p")
    u = b.necu(t)
    emp = b.axiom("EMP", p="p", q="p")
    b.mp(u, emp)
    return b.build()


def _prove_wskh() -> Proof:
    b = _Builder()
    e1 = b.axiom("EMP", p="p", q="r")
    e2 = b.axiom("EMP", p="o", q="q")
    c1 = b.axiom("COMPKh", p="p", r="r", q="o")
    c2 = b.axiom("COMPKh", p="p", r="o", q="q")
    b.chain([e1, e2, c1, c2], "U(p -> r) & U(o -> q) & Kh(r, o) -> Kh(p, q)")
    return b.build()


def _prove_4u() -> Proof:
    b = _Builder()
    b.axiom_shown("U p -> U U p", "4KU", p="~p", q="bot")
    return b.build()


def _prove_5u() -> Proof:
    b = _Builder()
    b.axiom_shown("~U p -> U ~U p", "5KU", p="~p", q="bot")
    return b.build()


def _prove_cond() -> Proof:
    b = _Builder()
    t = b.taut("bot -> p")
    u = b.necu(t)
    emp = b.axiom("EMP", p="bot", q="p")
    b.mp(u, emp)
    return b.build()


def _prove_uconj() -> Proof:
    b = _Builder()
    u1 = b.necu(b.taut("p & q -> p"))
    d1 = b.axiom("DISTU", p="p & q", q="p")
    u2 = b.necu(b.taut("p & q -> q"))
    d2 = b.axiom("DISTU", p="p & q", q="q")
    u3 = b.necu(b.taut("p -> (q -> p & q)"))
    d3 = b.axiom("DISTU", p="p", q="q -> p & q")
    d4 = b.axiom("DISTU", p="q", q="p & q")
    b.chain([u1, d1, u2, d2, u3, d3, d4], "U(p & q) <-> U p & U q")
    return b.build()


def _prekh_lines(b: _Builder) -> int:
    # Case Kh(p, q): weaken the condition (Kh(p,q) & p entails p) and compose.
    cond = "Kh(p, q) & p"
    u1 = b.necu(b.taut(f"{cond} -> p"))
    e1 = b.axiom("EMP", p=cond, q="p")
    k1 = b.mp(u1, e1)
    c1 = b.axiom("COMPKh", p=cond, r="p", q="q")
    # Case ~Kh(p, q): the condition is then impossible, so compose through bot.
    f1 = b.axiom("5KU", p="p", q="q")
    u2 = b.necu(b.taut(f"~Kh(p, q) -> ({cond} -> bot)"))
    d1 = b.axiom("DISTU", p="~Kh(p, q)", q=f"{cond} -> bot")
    e2 = b.axiom("EMP", p=cond, q="bot")
    u3 = b.necu(b.taut("bot -> q"))
    e3 = b.axiom("EMP", p="bot", q="q")
    k2 = b.mp(u3, e3)
    c2 = b.axiom("COMPKh", p=cond, r="bot", q="q")
    return b.chain([k1, c1, f1, u2, d1, e2, k2, c2], f"Kh({cond}, q)")


def _prove_prekh() -> Proof:
    b = _Builder()
    _prekh_lines(b)
    return b.build()


def _prove_postkh() -> Proof:
    b = _Builder()
    prekh = _prekh_lines(b)
    comp = b.axiom("COMPKh", p="r", r="Kh(p, q) & p", q="q")
    b.chain([prekh, comp], "Kh(r, Kh(p, q) & p) -> Kh(r, q)")
    return b.build()


def _prove_neckh_demo() -> Proof:
    # The admissible necessitation for Kh, demonstrated on the theorem q -> q.
    b = _Builder()
    t = b.taut("q -> q")
    weaken = b.taut("(q -> q) -> (p -> (q -> q))")
    imp = b.mp(t, weaken)
    u = b.necu(imp)
    emp = b.axiom("EMP", p="p", q="q -> q")
    b.mp(u, emp)
    return b.build()


@functools.lru_cache(maxsize=1)
def theorem_db() -> tuple[TheoremEntry, ...]:
    """Machine-checked derivations of the derivable theorems.

    Every entry's proof is hypothesis-free, ends in the entry's formula and
    is accepted by :func:`check_proof` (the test suite re-checks this; the
    NECKh entry demonstrates the admissible Kh-necessitation rule on one
    instance).
    """
    entries = (
        TheoremEntry("TRI", parse_formula("Kh(p, p)"), _prove_tri()),
        TheoremEntry(
            "WSKh",
            parse_formula("U(p -> r) & U(o -> q) & Kh(r, o) -> Kh(p, q)"),
            _prove_wskh(),
        ),
        TheoremEntry("4U", parse_formula("U p -> U U p"), _prove_4u()),
        TheoremEntry("5U", parse_formula("~U p -> U ~U p"), _prove_5u()),
        TheoremEntry("COND", parse_formula("Kh(bot, p)"), _prove_cond()),
        TheoremEntry("UCONJ", parse_formula("U(p & q) <-> U p & U q"), _prove_uconj()),
        TheoremEntry("PREKh", parse_formula("Kh(Kh(p, q) & p, q)"), _prove_prekh()),
        TheoremEntry(
            "POSTKh",
            parse_formula("Kh(r, Kh(p, q) & p) -> Kh(r, q)"),
            _prove_postkh(),
        ),
        TheoremEntry("NECKh", parse_formula("Kh(p, q -> q)"), _prove_neckh_demo()),
    )
    for entry in entries:
        assert entry.proof.lines[-1].formula == entry.formula
    return entries


# --- Proof file parsing -----------------------------------------------------

_NUMBERED = re.compile(r"(\d+)\.\s*(.*)\Z")
_BINDING_START = re.compile(r"([pqr])=")


def _parse_formula_at(text: str, line_no: int, what: str = "formula") -> Formula:
    try:
        return parse_formula(text)
    except FormulaSyntaxError as exc:
        raise ProofFormatError(f"bad {what}: {exc}", line_no) from exc


def _parse_binding(text: str, line_no: int) -> dict[str, Formula]:
    matches = list(_BINDING_START.finditer(text))
    if not matches:
        raise ProofFormatError("axiom justification needs letter bindings like p=<formula>", line_no)
    if text[: matches[0].start()].strip():
        raise ProofFormatError("unexpected text before first axiom binding", line_no)
    binding: dict[str, Formula] = {}
    for current, nxt in zip(matches, list(matches[1:]) + [None]):
        letter = current.group(1)
        if letter in binding:
            raise ProofFormatError(f"duplicate binding for letter {letter!r}", line_no)
        segment = text[current.end() : nxt.start() if nxt else len(text)].strip()
        if not segment:
            raise ProofFormatError(f"empty binding for letter {letter!r}", line_no)
        binding[letter] = _parse_formula_at(segment, line_no, f"binding for {letter!r}")
    return binding


def _parse_int(token: str, line_no: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ProofFormatError(f"expected a line number, got {token!r}", line_no) from None


def _parse_justification(text: str, line_no: int) -> Justification:
    parts = text.split(None, 1)
    if not parts:
        raise ProofFormatError("missing justification after ';'", line_no)
    keyword, rest = parts[0], parts[1] if len(parts) > 1 else ""
    if keyword == "taut":
        if rest:
            raise ProofFormatError("taut takes no arguments", line_no)
        return Taut()
    if keyword == "axiom":
        name_and_binding = rest.split(None, 1)
        if len(name_and_binding) != 2:
            raise ProofFormatError("want: axiom <NAME> p=<formula> ...", line_no)
        name, binding_text = name_and_binding
        return AxiomInst(name, _parse_binding(binding_text, line_no))
    if keyword == "mp":
        refs = rest.split()
        if len(refs) != 2:
            raise ProofFormatError("want: mp <premise-line> <implication-line>", line_no)
        return MP(_parse_int(refs[0], line_no), _parse_int(refs[1], line_no))
    if keyword == "necu":
        refs = rest.split()
        if len(refs) != 1:
            raise ProofFormatError("want: necu <line>", line_no)
        return NecU(_parse_int(refs[0], line_no))
    if keyword == "sub":
        pieces = rest.split(None, 2)
        if len(pieces) != 3:
            raise ProofFormatError("want: sub <line> <letter> <formula>", line_no)
        return Sub(
            _parse_int(pieces[0], line_no),
            pieces[1],
            _parse_formula_at(pieces[2], line_no, "substitution replacement"),
        )
    if keyword == "hyp":
        refs = rest.split()
        if len(refs) != 1:
            raise ProofFormatError("want: hyp <hypothesis-number>", line_no)
        return Hyp(_parse_int(refs[0], line_no))
    raise ProofFormatError(f"unknown justification keyword {keyword!r}", line_no)


def parse_proof(text: str) -> ProofDocument:
    """Parse the proof file format into hypotheses plus a :class:`Proof`."""
    hypotheses: list[Formula] = []
    lines: list[ProofLine] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        parts = stripped.split(None, 1)
        if parts[0] == "hypothesis":
            if len(parts) != 2:
                raise ProofFormatError("want: hypothesis <formula>", line_no)
            hypotheses.append(_parse_formula_at(parts[1], line_no, "hypothesis"))
            continue
        numbered = _NUMBERED.match(stripped)
        if not numbered:
            raise ProofFormatError("want: <n>. <formula> ; <justification>", line_no)
        index = int(numbered.group(1))
        body = numbered.group(2)
        if ";" not in body:
            raise ProofFormatError("missing ';' between formula and justification", line_no)
        formula_text, just_text = body.split(";", 1)
        formula = _parse_formula_at(formula_text.strip(), line_no)
        justification = _parse_justification(just_text.strip(), line_no)
        lines.append(ProofLine(index, formula, justification))
    return ProofDocument(tuple(hypotheses), Proof(tuple(lines)))


def format_verdict(verdict: ProofVerdict) -> str:
    """Render a verdict the way the command line prints it."""
    if verdict.accepted:
        return "ACCEPTED"
    if verdict.line is None:
        return f"REJECTED: {verdict.reason}"
    return f"REJECTED line {verdict.line}: {verdict.reason}"
