from __future__ import annotations

import random

import pytest

from knowhow import GenConfig, find_plan, generate, parse_model, verify_plan

from helpers import plan_exists_bruteforce, plan_exists_pure, random_state_sets


class TestVerifyPlan:
    def test_ex1_good_plan(self, ex1):
        check = verify_plan(ex1, ex1.labelled("p"), ex1.labelled("q"), ("r", "u"))
        assert check.ok
        assert bool(check)

    def test_ex1_rr_fails_at_endpoint(self, ex1):
        check = verify_plan(ex1, ex1.labelled("p"), ex1.labelled("q"), ("r", "r"))
        assert not check.ok
        assert check.kind == "endpoint"
        assert check.state == "s5"
        assert check.start == "s3"

    def test_ex1_u_fails_at_endpoint(self, ex1):
        check = verify_plan(ex1, ex1.labelled("p"), ex1.labelled("q"), ("u",))
        assert not check.ok
        assert check.kind == "endpoint"
        assert check.state == "s6"

    def test_ex2_left_ab_stuck(self, ex2_left):
        check = verify_plan(ex2_left, {"s1"}, {"s4"}, ("a", "b"))
        assert not check.ok
        assert check.kind == "stuck"
        assert check.step == 1
        assert check.state == "s3"
        assert check.action == "b"
        assert "step 2 at state s3" in check.describe()

    def test_empty_plan_needs_starts_in_goals(self, ex1):
        assert verify_plan(ex1, {"s4"}, ex1.labelled("q"), ()).ok
        check = verify_plan(ex1, {"s1", "s4"}, ex1.labelled("q"), ())
        assert not check.ok and check.kind == "endpoint" and check.state == "s1"

    def test_empty_starts_always_ok(self, ex1):
        assert verify_plan(ex1, frozenset(), frozenset(), ("r", "r", "r")).ok

    def test_undeclared_action_raises(self, ex1):
        with pytest.raises(ValueError, match="unknown action"):
            verify_plan(ex1, {"s1"}, {"s2"}, ("z",))

    def test_unknown_state_raises(self, ex1):
        with pytest.raises(ValueError, match="unknown state"):
            verify_plan(ex1, {"nope"}, {"s2"}, ())

    def test_first_violation_scans_starts_in_declaration_order(self):
        # Both starts get stuck immediately; the declaration-first start wins.
        model = parse_model(
            "state a []\nstate b []\nstate c []\n"
            "action m\n"
            "trans c m c\n"
        )
        check = verify_plan(model, {"b", "a"}, {"c"}, ("m",))
        assert (check.start, check.step, check.state) == ("a", 0, "a")


class TestFindPlan:
    def test_ex1_witness(self, ex1):
        result = find_plan(ex1, ex1.labelled("p"), ex1.labelled("q"))
        assert result.decision
        assert result.witness == ("r", "u")

    def test_ex1_no_shorter_plan(self, ex1):
        starts, goals = ex1.labelled("p"), ex1.labelled("q")
        assert not verify_plan(ex1, starts, goals, ()).ok
        for action in ex1.actions:
            assert not verify_plan(ex1, starts, goals, (action,)).ok

    def test_ex2_right_no_plan(self, ex2_right):
        starts = ex2_right.labelled("p")
        goals = ex2_right.labelled("q")
        for action in ex2_right.actions:
            assert not ex2_right.applicable(starts, action)
        result = find_plan(ex2_right, starts, goals)
        assert not result.decision
        assert result.witness is None

    def test_empty_starts_epsilon(self, ex1):
        result = find_plan(ex1, frozenset(), frozenset())
        assert result.decision
        assert result.witness == ()
        assert result.explored == 1

    def test_witness_deterministic(self, ex1):
        first = find_plan(ex1, ex1.labelled("p"), ex1.labelled("q"))
        second = find_plan(ex1, ex1.labelled("p"), ex1.labelled("q"))
        assert first == second

    def test_tie_breaks_by_declaration_order(self):
        # Two one-step plans reach the goal; the first declared action wins.
        model = parse_model(
            "state x []\nstate g []\n"
            "action n\naction m\n"
            "trans x m g\ntrans x n g\n"
        )
        assert find_plan(model, {"x"}, {"g"}).witness == ("n",)


class TestAgainstBruteForce:
    def test_soundness_on_random_models(self):
        rng = random.Random(421)
        cfg = GenConfig(max_states=5, max_actions=3, letters=(), seed=421)
        for model in generate(cfg, 150):
            starts, goals = random_state_sets(model, rng)
            result = find_plan(model, starts, goals)
            if result.decision:
                assert verify_plan(model, starts, goals, result.witness).ok

    def test_completeness_at_desk_scale(self):
        # A light pass; the acceptance suite runs the full-scale comparison.
        rng = random.Random(1009)
        cfg = GenConfig(max_states=4, max_actions=2, letters=(), seed=1009)
        for model in generate(cfg, 40):
            starts, goals = random_state_sets(model, rng)
            bound = 2 ** len(model.states)
            assert find_plan(model, starts, goals).decision == plan_exists_bruteforce(
                model, starts, goals, bound
            )

    def test_cutoff_oracle_matches_pure_oracle(self):
        rng = random.Random(77)
        cfg = GenConfig(max_states=3, max_actions=2, letters=(), seed=77)
        for model in generate(cfg, 80):
            starts, goals = random_state_sets(model, rng)
            bound = 2 ** len(model.states)
            assert plan_exists_bruteforce(model, starts, goals, bound) == plan_exists_pure(
                model, starts, goals, bound
            )

    def test_composition(self):
        # A verified plan to a midpoint set composed with a verified plan
        # onward stays verified end to end.
        rng = random.Random(3)
        cfg = GenConfig(max_states=5, max_actions=2, letters=(), seed=3)
        composed = 0
        for model in generate(cfg, 300):
            starts = frozenset(s for s in model.states if rng.getrandbits(1))
            sigma = tuple(rng.choice(model.actions) for _ in range(rng.randrange(3)))
            everything = frozenset(model.states)
            if not verify_plan(model, starts, everything, sigma).ok:
                continue
            mid = starts
            for action in sigma:
                mid = model.post_image(mid, action)
            eta = tuple(rng.choice(model.actions) for _ in range(rng.randrange(3)))
            if not verify_plan(model, mid, everything, eta).ok:
                continue
            goals = mid
            for action in eta:
                goals = model.post_image(goals, action)
            assert verify_plan(model, starts, goals, sigma + eta).ok
            composed += 1
        assert composed >= 30  # the generator actually produced usable triples


def test_plan_result_records_exploration():
    model = parse_model("state x []\nstate y []\naction a\ntrans x a x\n")
    result = find_plan(model, {"x"}, {"y"})
    assert not result.decision
    assert result.explored >= 1
