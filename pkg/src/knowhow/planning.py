"""Plan verification and uniform plan search over a model.

A plan ``a1 .. an`` is *strongly executable* at a state ``s`` when, for
every ``k < n``, every state reachable from ``s`` by the length-``k``
prefix has at least one ``a_{k+1}``-successor; the plan can never get
stuck.  :func:`verify_plan` checks this definition literally, one start
state at a time, together with "every endpoint satisfies the goal".

:func:`find_plan` decides whether *some* plan works from every start
state, by breadth-first search over belief states (canonically ordered
sets of states):

* the root is the start set ``B0``;
* ``B`` has an ``a``-edge to ``post_image(B, a)`` iff every member of
  ``B`` has an ``a``-successor;
* ``B`` is a goal iff ``B`` is a subset of the goal set (so an empty
  start set succeeds immediately with the empty plan).

Why this is equivalent to "there exists a plan that verify_plan accepts":
for a fixed plan, the set of states reachable from *some* start by the
length-``k`` prefix is exactly the belief state ``B_k`` after ``k`` BFS
edges, because images distribute over unions.  Requiring every member of
``B_k`` to have a successor is the same as requiring it separately for
the reachable sets of each start (their union is ``B_k``), so a plan is
strongly executable from every start iff each of its steps is an edge in
the belief graph, and its endpoints all satisfy the goal iff the final
belief state does.  The graph has at most ``2^|S|`` nodes, so the search
terminates; BFS returns a shortest witness, and expanding actions in
declaration order makes it the lexicographically least shortest one (in
action-index order).

The two functions deliberately share no traversal code: verify_plan is
the independent oracle for find_plan.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional

from .models import Model, Plan

__all__ = ["PlanCheck", "PlanResult", "verify_plan", "find_plan"]


@dataclass(frozen=True, slots=True)
class PlanCheck:
    """Outcome of :func:`verify_plan`.

    On failure, ``kind`` is ``"stuck"`` (with ``step`` the 0-based index of
    the action that cannot be taken, ``state`` the reached state with no
    successor) or ``"endpoint"`` (with ``state`` the offending final
    state); ``start`` is the start state whose check failed.
    """

    ok: bool
    kind: Optional[str] = None
    start: Optional[str] = None
    step: Optional[int] = None
    action: Optional[str] = None
    state: Optional[str] = None

    def __bool__(self) -> bool:
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return "ok"
        if self.kind == "stuck":
            return (
                f"step {self.step + 1} at state {self.state}: "
                f"no {self.action}-successor (from start {self.start})"
            )
        return f"endpoint {self.state} is not a goal state (from start {self.start})"


@dataclass(frozen=True, slots=True)
class PlanResult:
    """Outcome of :func:`find_plan`.

    ``witness`` is present iff ``decision`` is true; ``explored`` counts
    the belief states dequeued and examined by the search.
    """

    decision: bool
    witness: Optional[Plan]
    explored: int


def _check_states(model: Model, states: Iterable[str], what: str) -> frozenset[str]:
    out = frozenset(states)
    if not out <= model._state_set:
        raise ValueError(f"{what} mentions unknown state {min(out - model._state_set)!r}")
    return out


_PLAN_OK = PlanCheck(True)


def verify_plan(
    model: Model,
    starts: Iterable[str],
    goals: Iterable[str],
    plan: Iterable[str],
) -> PlanCheck:
    """Check the plan against the raw definition, start state by start state.

    True iff the plan is strongly executable at every start and every state
    it can reach from a start is a goal state.  The empty plan succeeds iff
    every start is a goal.  Reports the first violation, scanning starts in
    declaration order, then prefix length, then reached states in
    declaration order.
    """
    start_set = _check_states(model, starts, "start set")
    goal_set = _check_states(model, goals, "goal set")
    steps: Plan = tuple(plan)
    try:
        successors = [model._succ[a] for a in steps]
        executable_at = [model._can[a] for a in steps]
    except KeyError as exc:
        raise ValueError(f"unknown action {exc.args[0]!r}") from None
    index = model.index
    ordered = sorted(start_set, key=index) if len(start_set) > 1 else start_set

    for start in ordered:
        reached: set[str] = {start}
        for k, action in enumerate(steps):
            can = executable_at[k]
            if not reached <= can:
                stuck = min(reached - can, key=index)
                return PlanCheck(
                    False, kind="stuck", start=start, step=k, action=action, state=stuck
                )
            succ = successors[k]
            nxt: set[str] = set()
            for t in reached:
                nxt |= succ[t]
            reached = nxt
        if not reached <= goal_set:
            bad = min(reached - goal_set, key=index)
            return PlanCheck(False, kind="endpoint", start=start, state=bad)
    return _PLAN_OK


def find_plan(model: Model, starts: Iterable[str], goals: Iterable[str]) -> PlanResult:
    """Decide whether some plan takes every start to goals, never stuck.

    Breadth-first search over belief states as described in the module
    docstring.  Deterministic: on success the witness is the shortest
    plan, ties broken by action declaration order.
    """
    start_set = _check_states(model, starts, "start set")
    goal_set = _check_states(model, goals, "goal set")

    root = model.canonical(start_set)
    queue: deque[tuple[tuple[str, ...], Plan]] = deque([(root, ())])
    visited: set[tuple[str, ...]] = {root}
    explored = 0
    while queue:
        belief, path = queue.popleft()
        explored += 1
        if goal_set.issuperset(belief):
            return PlanResult(True, path, explored)
        for action in model.actions:
            if not model.applicable(belief, action):
                continue
            nxt = model.canonical(model.post_image(belief, action))
            if nxt not in visited:
                visited.add(nxt)
                queue.append((nxt, path + (action,)))
    return PlanResult(False, None, explored)
