from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, Iterable

# ====================================================================
# Positive boolean formulas over [direction, state] atoms
# --------------------------------------------------------------------
# ⊤ is the empty conjunction and ⊥ the empty disjunction. The smart
# constructors flatten nested connectives and absorb constants.


class PositiveBooleanFormula:
    pass


@dataclass(frozen=True)
class Atom(PositiveBooleanFormula):
    direction: tuple
    state: Hashable


@dataclass(frozen=True)
class Conj(PositiveBooleanFormula):
    items: frozenset


@dataclass(frozen=True)
class Disj(PositiveBooleanFormula):
    items: frozenset


TOP = Conj(frozenset())
BOTTOM = Disj(frozenset())


def conj(*formulas: PositiveBooleanFormula) -> PositiveBooleanFormula:
    return conj_all(formulas)


def disj(*formulas: PositiveBooleanFormula) -> PositiveBooleanFormula:
    return disj_all(formulas)


def conj_all(formulas: Iterable[PositiveBooleanFormula]) -> PositiveBooleanFormula:
    items = set()
    for f in formulas:
        if f == BOTTOM:
            return BOTTOM
        if isinstance(f, Conj):
            items |= f.items
        else:
            items.add(f)
    if len(items) == 1:
        return next(iter(items))
    return Conj(frozenset(items))


def disj_all(formulas: Iterable[PositiveBooleanFormula]) -> PositiveBooleanFormula:
    items = set()
    for f in formulas:
        if f == TOP:
            return TOP
        if isinstance(f, Disj):
            items |= f.items
        else:
            items.add(f)
    if len(items) == 1:
        return next(iter(items))
    return Disj(frozenset(items))


def dual(f: PositiveBooleanFormula) -> PositiveBooleanFormula:
    if isinstance(f, Atom):
        return f
    if isinstance(f, Conj):
        return Disj(frozenset(dual(g) for g in f.items))
    return Conj(frozenset(dual(g) for g in f.items))


def substitute(f: PositiveBooleanFormula,
               fn: Callable[[Atom], PositiveBooleanFormula]) -> PositiveBooleanFormula:
    """Replace every atom by ``fn(atom)`` and simplify."""
    if isinstance(f, Atom):
        return fn(f)
    if isinstance(f, Conj):
        return conj_all(substitute(g, fn) for g in f.items)
    return disj_all(substitute(g, fn) for g in f.items)


def atoms(f: PositiveBooleanFormula) -> set[Atom]:
    if isinstance(f, Atom):
        return {f}
    result = set()
    for g in f.items:
        result |= atoms(g)
    return result


def evaluate(f: PositiveBooleanFormula, true_atoms) -> bool:
    if isinstance(f, Atom):
        return f in true_atoms
    if isinstance(f, Conj):
        return all(evaluate(g, true_atoms) for g in f.items)
    return any(evaluate(g, true_atoms) for g in f.items)


def dnf(f: PositiveBooleanFormula) -> set[frozenset[Atom]]:
    """Disjuncts of the distributed normal form, without absorption."""
    if isinstance(f, Atom):
        return {frozenset((f,))}
    if isinstance(f, Disj):
        result = set()
        for g in f.items:
            result |= dnf(g)
        return result
    result = {frozenset()}
    for g in f.items:
        result = {left | right for left in result for right in dnf(g)}
    return result


def minimal_models(f: PositiveBooleanFormula) -> list[frozenset[Atom]]:
    """Inclusion-minimal sets of atoms satisfying f, in a stable order."""
    models = sorted(dnf(f), key=lambda m: (len(m), sorted(map(repr, m))))
    minimal = []
    for m in models:
        if not any(k <= m for k in minimal):
            minimal.append(m)
    return minimal


def format_pbf(f: PositiveBooleanFormula, fmt_direction=str, fmt_state=str) -> str:
    if f == TOP:
        return 'true'
    if f == BOTTOM:
        return 'false'
    if isinstance(f, Atom):
        return f'[{fmt_direction(f.direction)}, {fmt_state(f.state)}]'
    parts = sorted(format_pbf(g, fmt_direction, fmt_state) for g in f.items)
    joiner = ' & ' if isinstance(f, Conj) else ' | '
    return '(' + joiner.join(parts) + ')'
