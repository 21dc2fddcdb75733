from __future__ import annotations

from logic.analysis import is_qctl_ii
from logic.formula import (
    AG,
    AtomicProp,
    And,
    Exists,
    Formula,
    Observation,
    Or,
    StateFormula,
    conjunction,
    implies,
    map_children,
    neg,
)
from qctl_utils.errors import FragmentError
from structures.kripke import LocalAlphabets, local_prop

# ====================================================================
# Structure-semantics translation to plain QCTL
# --------------------------------------------------------------------


def uniformity_guard(p: str, observation: Observation, locals: LocalAlphabets) -> StateFormula:
    """p is constant on every reachable state sharing a visible local-state tuple."""
    q = AtomicProp(p)
    clauses = []
    for d in locals.directions(observation.restrict(locals.n).indices):
        seen = conjunction(AtomicProp(local_prop(l)) for l in d)
        clauses.append(Or(AG(implies(seen, q)), AG(implies(seen, neg(q)))))
    return conjunction(clauses)


def translate_structural(f: StateFormula, locals: LocalAlphabets) -> StateFormula:
    """Rewrite a QCTL_ii formula so that every quantifier is a plain one.

    Observation-restricted quantifiers become plain quantifiers guarded by
    a uniformity conjunction over the local-state propositions ``@l``.
    """
    if not is_qctl_ii(f):
        raise FragmentError('translate_structural accepts QCTL_ii formulas only (EX, AX, EU, AU path shapes)')

    def go(g: Formula) -> Formula:
        if isinstance(g, Exists):
            body = And(uniformity_guard(g.prop, g.observation, locals), go(g.body))
            return Exists(g.prop, Observation.everything(), body)
        return map_children(g, go)

    return go(f)
