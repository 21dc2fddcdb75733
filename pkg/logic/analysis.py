from __future__ import annotations

import itertools
from dataclasses import dataclass

from logic.formula import (
    AtomicProp,
    Constant,
    Exists,
    ExistsPath,
    Formula,
    Next,
    Observation,
    PathFormula,
    PathNot,
    StateEmbed,
    StateFormula,
    Until,
    children,
    map_children,
    walk,
)

# ====================================================================
# Proposition bookkeeping
# --------------------------------------------------------------------


@dataclass(frozen=True)
class PropPartition:
    quantified: frozenset[str]
    free: frozenset[str]


def all_props(f: Formula) -> set[str]:
    names = set()
    for node in walk(f):
        if isinstance(node, AtomicProp):
            names.add(node.name)
        elif isinstance(node, Exists):
            names.add(node.prop)
    return names


def free_props(f: Formula, bound: frozenset[str] = frozenset()) -> set[str]:
    if isinstance(f, AtomicProp):
        return set() if f.name in bound else {f.name}
    if isinstance(f, Exists):
        return free_props(f.body, bound | {f.prop})
    result = set()
    for child in children(f):
        result |= free_props(child, bound)
    return result


def quantified_props(f: Formula) -> set[str]:
    return {node.prop for node in walk(f) if isinstance(node, Exists)}


def rename_apart(f: StateFormula) -> tuple[StateFormula, PropPartition]:
    """Give every quantifier a globally fresh proposition."""
    used = all_props(f)
    counter = itertools.count()
    fresh_names = []

    def fresh(base: str) -> str:
        while True:
            name = f'{base}_{next(counter)}'
            if name not in used:
                used.add(name)
                fresh_names.append(name)
                return name

    def go(g: Formula, env: dict[str, str]) -> Formula:
        if isinstance(g, AtomicProp):
            return AtomicProp(env.get(g.name, g.name))
        if isinstance(g, Exists):
            name = fresh(g.prop)
            return Exists(name, g.observation, go(g.body, {**env, g.prop: name}))
        return map_children(g, lambda child: go(child, env))

    renamed = go(f, {})
    return renamed, PropPartition(frozenset(fresh_names), frozenset(free_props(renamed)))


# ====================================================================
# Sizes and subformulas
# --------------------------------------------------------------------


def formula_size(f: Formula, n: int | None = None) -> int:
    """Inductive size, a quantifier adding 1 + |o|.

    A plain `exists p.` has observation [n] and needs `n` to be measured;
    without it the observation counts as empty.
    """
    if isinstance(f, StateEmbed):
        return formula_size(f.formula, n)
    if isinstance(f, Exists):
        obs = f.observation.resolve(n) if n is not None else f.observation
        return 1 + len(obs) + formula_size(f.body, n)
    return 1 + sum(formula_size(child, n) for child in children(f))


def quantifier_depth(f: Formula) -> int:
    inner = max((quantifier_depth(child) for child in children(f)), default=0)
    return inner + 1 if isinstance(f, Exists) else inner


def subformulas(f: Formula) -> list[StateFormula]:
    """Distinct state subformulas in pre-order."""
    seen = {}
    for node in walk(f):
        if isinstance(node, StateFormula):
            seen.setdefault(node, None)
    return list(seen)


def max_state_subformulas(psi: PathFormula) -> list[StateFormula]:
    """max(psi): the maximal state subformulas below the path structure.

    Constants stay part of the LTL skeleton and are not listed.
    """
    found = {}
    stack = [psi]
    while stack:
        node = stack.pop()
        if isinstance(node, StateEmbed):
            if not isinstance(node.formula, Constant):
                found.setdefault(node.formula, None)
        else:
            stack.extend(reversed(children(node)))
    return list(found)


def ltl_skeleton(psi: PathFormula) -> tuple[PathFormula, dict[str, StateFormula]]:
    """Replace each maximal state subformula of psi by a fresh atom."""
    maximal = max_state_subformulas(psi)
    names = {phi: f'm{i}' for i, phi in enumerate(maximal)}

    def go(node: Formula) -> Formula:
        if isinstance(node, StateEmbed):
            if isinstance(node.formula, Constant):
                return node
            return StateEmbed(AtomicProp(names[node.formula]))
        return map_children(node, go)

    return go(psi), {name: phi for phi, name in names.items()}


# ====================================================================
# Observations and hierarchy
# --------------------------------------------------------------------


def _map_observations(f: Formula, fn) -> Formula:
    if isinstance(f, Exists):
        return Exists(f.prop, fn(f.observation), _map_observations(f.body, fn))
    return map_children(f, lambda child: _map_observations(child, fn))


def resolve_observations(f: StateFormula, n: int) -> StateFormula:
    """Replace plain quantifiers by ones observing [n]."""
    return _map_observations(f, lambda o: o.resolve(n))


def restrict_observations(f: StateFormula, n: int) -> StateFormula:
    """Intersect every observation with [n]."""
    return _map_observations(f, lambda o: o.restrict(n))


def hierarchy_violation(f: Formula, n: int | None = None) -> tuple[Observation, Observation] | None:
    def go(g: Formula, outer: tuple[Observation, ...]):
        if isinstance(g, Exists):
            obs = g.observation.restrict(n) if n is not None else g.observation
            for o1 in outer:
                if not o1.issubset(obs):
                    return o1, obs
            outer = outer + (obs,)
        for child in children(g):
            found = go(child, outer)
            if found is not None:
                return found
        return None

    return go(f, ())


def is_hierarchical(f: Formula, n: int | None = None) -> bool:
    return hierarchy_violation(f, n) is None


def obs_intersection(f: Formula, n: int) -> Observation:
    """I_phi: intersection of the observations in f, [n] when there are none."""
    indices = set(range(1, n + 1))
    for node in walk(f):
        if isinstance(node, Exists):
            indices &= set(node.observation.restrict(n).indices)
    return Observation(tuple(indices))


# ====================================================================
# Fragments
# --------------------------------------------------------------------


def _ctl_path_operands(path: PathFormula) -> tuple[StateFormula, ...] | None:
    """State operands of a CTL-shaped path formula, None for other shapes.

    Accepted shapes: X a, a U b, and their negations (the A forms after
    desugaring).
    """
    if isinstance(path, PathNot):
        path = path.operand
    if isinstance(path, Next) and isinstance(path.operand, StateEmbed):
        return (path.operand.formula,)
    if isinstance(path, Until) and isinstance(path.left, StateEmbed) and isinstance(path.right, StateEmbed):
        return path.left.formula, path.right.formula
    return None


def is_qctl_ii(f: Formula) -> bool:
    if isinstance(f, ExistsPath):
        operands = _ctl_path_operands(f.path)
        return operands is not None and all(is_qctl_ii(g) for g in operands)
    if isinstance(f, PathFormula):
        return False
    return all(is_qctl_ii(child) for child in children(f))


def is_ctl(f: Formula) -> bool:
    return quantifier_depth(f) == 0 and is_qctl_ii(f)
