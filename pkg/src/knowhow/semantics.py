"""Global evaluation of formulas over a model.

Truth is computed as *extensions* (sets of states) bottom-up rather than
pointwise: ``Kh(cond, goal)`` holds either at every state or at none, so
each Kh subformula costs exactly one plan search.  Formulas are
normalized to the core connectives first, and subformula extensions are
memoized per call (no cross-call cache, so concurrent evaluations over
the same immutable model are safe).
"""

from __future__ import annotations

from .models import Model
from .planning import find_plan
from .syntax import And, Atom, Formula, Kh, Not, Top, _guarded, normalize

__all__ = ["ext", "holds", "check_U"]


def _eval(model: Model, phi: Formula, memo: dict[Formula, frozenset[str]], everything: frozenset[str]) -> frozenset[str]:
    found = memo.get(phi)
    if found is not None:
        return found
    if isinstance(phi, Top):
        result = everything
    elif isinstance(phi, Atom):
        result = model.labelled(phi.name)
    elif isinstance(phi, Not):
        result = everything - _eval(model, phi.child, memo, everything)
    elif isinstance(phi, And):
        result = _eval(model, phi.left, memo, everything) & _eval(model, phi.right, memo, everything)
    elif isinstance(phi, Kh):
        cond = _eval(model, phi.cond, memo, everything)
        goal = _eval(model, phi.goal, memo, everything)
        result = everything if find_plan(model, cond, goal).decision else frozenset()
    else:
        raise TypeError(f"not a core formula: {phi!r}")
    memo[phi] = result
    return result


def ext(model: Model, phi: Formula) -> frozenset[str]:
    """The extension of ``phi``: the set of states where it is true."""
    core = normalize(phi)
    everything = frozenset(model.states)
    return _guarded(core, lambda: _eval(model, core, {}, everything))


def holds(model: Model, state: str, phi: Formula) -> bool:
    """True iff ``phi`` is true at ``state``."""
    model.index(state)  # raises for unknown states
    return state in ext(model, phi)


def check_U(model: Model, phi: Formula) -> bool:
    """True iff ``phi`` holds at every state.

    By definition this coincides with ``ext(model, U(phi)) == all states``
    computed through the ``Kh(~phi, bot)`` expansion; the redundancy is
    deliberate and property-tested.
    """
    return ext(model, phi) == frozenset(model.states)
