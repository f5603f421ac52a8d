from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from knowhow import (
    And,
    Atom,
    Bot,
    FormulaSyntaxError,
    Iff,
    Implies,
    Kh,
    KhPlus,
    Not,
    Or,
    Top,
    U,
    atom_names,
    children,
    formula_height,
    normalize,
    parse_formula,
    print_formula,
    substitute,
)
from knowhow.syntax import _run_deep

from helpers import random_formula

p, q, r, s = Atom("p"), Atom("q"), Atom("r"), Atom("s")


atoms = st.sampled_from(["p", "q", "r", "o"]).map(Atom)
formulas = st.recursive(
    st.one_of(st.just(Top()), st.just(Bot()), atoms),
    lambda kids: st.one_of(
        kids.map(Not),
        kids.map(U),
        st.tuples(kids, kids).map(lambda t: And(*t)),
        st.tuples(kids, kids).map(lambda t: Or(*t)),
        st.tuples(kids, kids).map(lambda t: Implies(*t)),
        st.tuples(kids, kids).map(lambda t: Iff(*t)),
        st.tuples(kids, kids).map(lambda t: Kh(*t)),
        st.tuples(kids, kids).map(lambda t: KhPlus(*t)),
    ),
    max_leaves=30,
)


class TestParse:
    def test_kh(self):
        assert parse_formula("Kh(p, q)") == Kh(p, q)

    def test_top(self):
        assert parse_formula("top") == Top()

    def test_precedence(self):
        assert parse_formula("~p & q -> U r") == Implies(And(Not(p), q), U(r))

    def test_implication_right_associative(self):
        assert parse_formula("p -> q -> r") == Implies(p, Implies(q, r))

    def test_or_and_levels(self):
        assert parse_formula("~p & q | r -> s") == Implies(Or(And(Not(p), q), r), s)

    def test_unary_binds_tighter_than_and(self):
        assert parse_formula("U p & q") == And(U(p), q)

    def test_kh_args_take_full_formulas(self):
        assert parse_formula("Kh(p -> q, r | s)") == Kh(Implies(p, q), Or(r, s))

    def test_khp(self):
        assert parse_formula("Khp(p, q)") == KhPlus(p, q)

    def test_iff_non_chaining(self):
        assert parse_formula("p <-> q & r") == Iff(p, And(q, r))
        with pytest.raises(FormulaSyntaxError):
            parse_formula("p <-> q <-> r")
        with pytest.raises(FormulaSyntaxError):
            parse_formula("p <-> q -> r")
        assert parse_formula("p -> q <-> r") == Implies(p, Iff(q, r))

    def test_whitespace_insignificant(self):
        assert parse_formula(" Kh( p ,q )  ") == Kh(p, q)
        assert parse_formula("~  ~p") == Not(Not(p))

    def test_keywords_are_not_atoms(self):
        assert parse_formula("topx") == Atom("topx")
        assert parse_formula("bot") == Bot()
        with pytest.raises(ValueError):
            Atom("top")
        with pytest.raises(ValueError):
            Atom("Kh")
        with pytest.raises(ValueError):
            Atom("1bad")

    def test_error_offset_and_expected(self):
        with pytest.raises(FormulaSyntaxError) as exc:
            parse_formula("p &")
        assert exc.value.offset == 4
        assert "identifier" in exc.value.expected

        with pytest.raises(FormulaSyntaxError) as exc:
            parse_formula("Kh(p q)")
        assert exc.value.offset == 6
        assert "','" in exc.value.expected

        with pytest.raises(FormulaSyntaxError) as exc:
            parse_formula("(p | q")
        assert exc.value.offset == 7
        assert "')'" in exc.value.expected

    def test_unknown_keyword(self):
        with pytest.raises(FormulaSyntaxError, match="unknown keyword 'Up'"):
            parse_formula("Up")
        with pytest.raises(FormulaSyntaxError, match="unknown keyword 'Foo'"):
            parse_formula("Foo(p, q)")

    def test_unexpected_character(self):
        with pytest.raises(FormulaSyntaxError) as exc:
            parse_formula("p + q")
        assert exc.value.offset == 3

    def test_trailing_garbage(self):
        with pytest.raises(FormulaSyntaxError):
            parse_formula("p q")


class TestPrint:
    def test_kh(self):
        assert print_formula(Kh(p, q)) == "Kh(p, q)"

    def test_u(self):
        assert print_formula(U(p)) == "U p"

    def test_parenthesizes_or_under_and(self):
        assert print_formula(And(Or(p, q), r)) == "(p | q) & r"

    def test_right_nested_and_keeps_structure(self):
        phi = And(p, And(q, r))
        assert print_formula(phi) == "p & (q & r)"
        assert parse_formula(print_formula(phi)) == phi

    def test_negation_of_conjunction(self):
        assert print_formula(Not(And(p, q))) == "~(p & q)"

    def test_implication_chain(self):
        assert print_formula(Implies(p, Implies(q, r))) == "p -> q -> r"
        assert print_formula(Implies(Implies(p, q), r)) == "(p -> q) -> r"

    def test_iff_guards_its_sides(self):
        assert print_formula(Iff(p, Implies(q, r))) == "p <-> (q -> r)"
        assert print_formula(Implies(p, Iff(q, r))) == "p -> q <-> r"


class TestNormalize:
    def test_u_unfolds(self):
        assert normalize(U(p)) == Kh(Not(p), Not(Top()))
        assert print_formula(normalize(U(p))) == "Kh(~p, ~top)"

    def test_core_fixed_point(self):
        assert normalize(p) == p
        phi = Kh(And(p, Not(q)), Top())
        assert normalize(phi) == phi

    def test_khp_expansion(self):
        inner = Not(And(p, Not(q)))  # p -> q, normalized
        expected = And(Kh(p, q), Not(Kh(Not(inner), Not(Top()))))
        assert normalize(KhPlus(p, q)) == expected

    def test_bot_or_implies_iff(self):
        assert normalize(Bot()) == Not(Top())
        assert normalize(Or(p, q)) == Not(And(Not(p), Not(q)))
        assert normalize(Implies(p, q)) == Not(And(p, Not(q)))
        assert normalize(Iff(p, q)) == And(
            Not(And(p, Not(q))), Not(And(q, Not(p)))
        )

    def test_only_core_constructors(self):
        rng = random.Random(5)
        core_types = (Top, Atom, Not, And, Kh)
        for _ in range(200):
            phi = normalize(random_formula(rng))
            stack = [phi]
            while stack:
                node = stack.pop()
                assert isinstance(node, core_types)
                stack.extend(children(node))

    @given(formulas)
    @settings(max_examples=300)
    def test_idempotent(self, phi):
        once = normalize(phi)
        assert normalize(once) == once


class TestSubstitute:
    def test_inside_kh(self):
        assert substitute(Kh(p, q), "p", And(r, s)) == Kh(And(r, s), q)

    def test_uniform(self):
        assert substitute(Implies(p, p), "p", Kh(Atom("a"), Atom("b"))) == Implies(
            Kh(Atom("a"), Atom("b")), Kh(Atom("a"), Atom("b"))
        )

    def test_no_occurrence(self):
        assert substitute(q, "p", r) == q

    @given(formulas)
    @settings(max_examples=200)
    def test_identity_substitution(self, phi):
        for name in atom_names(phi):
            assert substitute(phi, name, Atom(name)) == phi

    @given(formulas, st.sampled_from(["p", "q", "r"]), formulas)
    @settings(max_examples=200)
    def test_compositional(self, phi, letter, repl):
        whole = substitute(phi, letter, repl)
        kids = children(phi)
        if kids:
            rebuilt = type(phi)(*(substitute(k, letter, repl) for k in kids))
            assert whole == rebuilt


class TestRoundTrip:
    @given(formulas)
    @settings(max_examples=500)
    def test_parse_print_identity(self, phi):
        assert parse_formula(print_formula(phi)) == phi

    def test_seeded_bulk(self):
        rng = random.Random(12)
        for _ in range(500):
            phi = random_formula(rng)
            assert parse_formula(print_formula(phi)) == phi


class TestDepthLimit:
    def test_beyond_limit_rejected(self):
        text = "~" * 10_001 + "p"
        with pytest.raises(FormulaSyntaxError, match="nesting depth"):
            parse_formula(text)

    def test_deep_but_legal_input_works(self):
        depth = 9_990
        phi = parse_formula("~" * depth + "p")
        assert formula_height(phi) == depth + 1
        assert _run_deep(lambda: parse_formula(print_formula(phi)) == phi)
        assert _run_deep(lambda: normalize(normalize(phi)) == normalize(phi))
        assert _run_deep(lambda: substitute(phi, "p", q) == parse_formula("~" * depth + "q"))

    def test_deep_parens(self):
        phi = parse_formula("(" * 3000 + "p" + ")" * 3000)
        assert phi == p

    def test_wide_disjunction_counts_toward_depth(self):
        ok = " | ".join(["p"] * 9_000)
        parse_formula(ok)
        too_wide = " | ".join(["p"] * 10_002)
        with pytest.raises(FormulaSyntaxError, match="nesting depth"):
            parse_formula(too_wide)


def test_formula_height():
    assert formula_height(p) == 1
    assert formula_height(And(p, Not(q))) == 3
    assert formula_height(Kh(p, And(p, Not(q)))) == 4


def test_str_matches_printer():
    phi = Implies(And(Not(p), q), U(r))
    assert str(phi) == print_formula(phi)
