from __future__ import annotations

from logic.analysis import is_ctl
from logic.formula import (
    And,
    AtomicProp,
    Constant,
    ExistsPath,
    Next,
    Not,
    Or,
    PathNot,
    StateEmbed,
    StateFormula,
    Until,
)
from qctl_utils.errors import FragmentError
from structures.kripke import CompoundKripkeStructure

# ====================================================================
# Classic CTL labelling algorithm
# --------------------------------------------------------------------


def pre_exists(K: CompoundKripkeStructure, target: set[str]) -> set[str]:
    return {s for s in K.states if any(t in target for t in K.successors(s))}


def pre_forall(K: CompoundKripkeStructure, target: set[str]) -> set[str]:
    return {s for s in K.states if all(t in target for t in K.successors(s))}


def eu_states(K: CompoundKripkeStructure, left: set[str], right: set[str]) -> set[str]:
    z = set(right)
    while True:
        grown = z | (left & pre_exists(K, z))
        if grown == z:
            return z
        z = grown


def au_states(K: CompoundKripkeStructure, left: set[str], right: set[str]) -> set[str]:
    z = set(right)
    while True:
        grown = z | (left & pre_forall(K, z))
        if grown == z:
            return z
        z = grown


def ctl_states(K: CompoundKripkeStructure, f: StateFormula) -> set[str]:
    everything = set(K.states)
    match f:
        case AtomicProp(name):
            if not K.knows(name):
                raise ValueError(f'Proposition {name} is not an atom of the model')
            return {s for s in K.states if K.holds(s, name)}
        case Constant(value):
            return everything if value else set()
        case Not(g):
            return everything - ctl_states(K, g)
        case And(l, r):
            return ctl_states(K, l) & ctl_states(K, r)
        case Or(l, r):
            return ctl_states(K, l) | ctl_states(K, r)
        case ExistsPath(Next(StateEmbed(g))):
            return pre_exists(K, ctl_states(K, g))
        case ExistsPath(Until(StateEmbed(l), StateEmbed(r))):
            return eu_states(K, ctl_states(K, l), ctl_states(K, r))
        case ExistsPath(PathNot(Next(StateEmbed(g)))):
            return pre_exists(K, everything - ctl_states(K, g))
        case ExistsPath(PathNot(Until(StateEmbed(l), StateEmbed(r)))):
            return everything - au_states(K, ctl_states(K, l), ctl_states(K, r))
    raise FragmentError(f'Not a CTL formula: {f}')


def check_ctl_fixpoint(K: CompoundKripkeStructure, s: str, f: StateFormula) -> bool:
    if not is_ctl(f):
        raise FragmentError('check_ctl_fixpoint accepts quantifier-free CTL formulas only')
    K.tuple_of(s)
    return s in ctl_states(K, f)
