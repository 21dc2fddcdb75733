from __future__ import annotations

import itertools

import numpy as np

from automata.pbf import Atom, PositiveBooleanFormula, conj_all, disj_all
from automata.tree_automata import AlternatingTreeAutomaton, NondeterministicTreeAutomaton, RegularTree
from automata.word_automata import LassoWord, all_letters
from games.parity import ParityGame, Player
from logic.formula import (
    AX,
    AU,
    EU,
    EX,
    FALSE,
    TRUE,
    And,
    AtomicProp,
    Exists,
    Next,
    Not,
    Observation,
    Or,
    PathFormula,
    StateFormula,
    Until,
    embed,
    exists_path,
    path_and,
    path_not,
    path_or,
)
from structures.kripke import CompoundKripkeStructure, LocalAlphabets

# ====================================================================
# Random instances
# --------------------------------------------------------------------
# Every generator takes a numpy Generator so suites are reproducible
# from a single seed.


def _pick(rng: np.random.Generator, items):
    items = list(items)
    return items[int(rng.integers(len(items)))]


def _subset(rng: np.random.Generator, items, p: float = 0.5) -> list:
    return [x for x in items if rng.random() < p]


def random_locals(rng: np.random.Generator, n_max: int = 2, alphabet_max: int = 2) -> LocalAlphabets:
    n = int(rng.integers(1, n_max + 1))
    return LocalAlphabets(tuple(
        tuple(f'l{i}{chr(ord("a") + j)}' for j in range(int(rng.integers(1, alphabet_max + 1))))
        for i in range(1, n + 1)
    ))


def random_kripke(rng: np.random.Generator, n_max: int = 2, alphabet_max: int = 2, states_max: int = 4,
                  atoms=('p', 'r')) -> CompoundKripkeStructure:
    locals = random_locals(rng, n_max, alphabet_max)
    tuples = locals.directions(locals.coordinates)
    count = int(rng.integers(1, min(states_max, len(tuples)) + 1))
    chosen = sorted(rng.choice(len(tuples), size=count, replace=False))
    names = [f's{k}' for k in range(count)]
    states = {name: tuples[i] for name, i in zip(names, chosen)}
    edges = {}
    for name in names:
        succ = _subset(rng, names, 0.4) or [_pick(rng, names)]
        edges[name] = tuple(succ)
    labels = {name: frozenset(_subset(rng, atoms)) for name in names}
    return CompoundKripkeStructure(locals, states, edges, labels, frozenset(atoms))


# ====================================================================
# Formulas
# --------------------------------------------------------------------


def random_observation(rng: np.random.Generator, n: int, contains: Observation | None = None) -> Observation:
    indices = set(_subset(rng, range(1, n + 1)))
    if contains is not None:
        indices |= set(contains.indices)
    return Observation(tuple(indices))


def random_formula(rng: np.random.Generator, atoms, n: int = 1, depth: int = 3, max_quantifiers: int = 2,
                   hierarchical: bool = False, _bound=(), _outer: Observation | None = None) -> StateFormula:
    """Random QCTL_ii formula (CTL path shapes) with nested observation quantifiers."""
    props = list(atoms) + list(_bound)
    if depth <= 0 or rng.random() < 0.15:
        if rng.random() < 0.1:
            return TRUE if rng.random() < 0.5 else FALSE
        return AtomicProp(_pick(rng, props))
    kinds = ['not', 'and', 'or', 'EX', 'AX', 'EU', 'AU']
    if max_quantifiers > 0:
        kinds += ['exists', 'exists']

    def sub(**kwargs):
        args = dict(n=n, depth=depth - 1, max_quantifiers=max_quantifiers, hierarchical=hierarchical,
                    _bound=_bound, _outer=_outer)
        args.update(kwargs)
        return random_formula(rng, atoms, **args)

    kind = _pick(rng, kinds)
    match kind:
        case 'not':
            return Not(sub())
        case 'and':
            return And(sub(), sub())
        case 'or':
            return Or(sub(), sub())
        case 'EX':
            return EX(sub())
        case 'AX':
            return AX(sub())
        case 'EU':
            return EU(sub(), sub())
        case 'AU':
            return AU(sub(), sub())
    p = f'q{len(_bound)}'
    observation = random_observation(rng, n, _outer if hierarchical else None)
    body = sub(max_quantifiers=max_quantifiers - 1, _bound=tuple(_bound) + (p,), _outer=observation)
    return Exists(p, observation, body)


def random_path(rng: np.random.Generator, atoms, depth: int = 2) -> PathFormula:
    if depth <= 0 or rng.random() < 0.2:
        return AtomicProp(_pick(rng, atoms))
    kind = _pick(rng, ['not', 'and', 'or', 'X', 'U', 'state'])
    match kind:
        case 'not':
            return path_not(random_path(rng, atoms, depth - 1))
        case 'and':
            return path_and(random_path(rng, atoms, depth - 1), random_path(rng, atoms, depth - 1))
        case 'or':
            return path_or(random_path(rng, atoms, depth - 1), random_path(rng, atoms, depth - 1))
        case 'X':
            return Next(_as_path(random_path(rng, atoms, depth - 1)))
        case 'U':
            return Until(_as_path(random_path(rng, atoms, depth - 1)), _as_path(random_path(rng, atoms, depth - 1)))
    return _as_path(random_ctl_star(rng, atoms, depth - 1))


def _as_path(f) -> PathFormula:
    return embed(f)


def random_ctl_star(rng: np.random.Generator, atoms, depth: int = 2) -> StateFormula:
    """Random quantifier-free CTL* state formula."""
    if depth <= 0 or rng.random() < 0.2:
        return AtomicProp(_pick(rng, atoms))
    kind = _pick(rng, ['not', 'and', 'or', 'E', 'E'])
    match kind:
        case 'not':
            return Not(random_ctl_star(rng, atoms, depth - 1))
        case 'and':
            return And(random_ctl_star(rng, atoms, depth - 1), random_ctl_star(rng, atoms, depth - 1))
        case 'or':
            return Or(random_ctl_star(rng, atoms, depth - 1), random_ctl_star(rng, atoms, depth - 1))
    return exists_path(random_path(rng, atoms, depth))


def random_ltl(rng: np.random.Generator, atoms, size: int = 6) -> PathFormula:
    """Random LTL formula with at most ``size`` operators and atoms."""
    if size <= 1:
        return _as_path(AtomicProp(_pick(rng, atoms)))
    kind = _pick(rng, ['not', 'and', 'or', 'X', 'U'])
    if kind in ('not', 'X'):
        inner = random_ltl(rng, atoms, size - 1)
        return path_not(inner) if kind == 'not' else Next(inner)
    left = int(rng.integers(1, size - 1)) if size > 2 else 1
    l, r = random_ltl(rng, atoms, left), random_ltl(rng, atoms, max(1, size - 1 - left))
    match kind:
        case 'and':
            return path_and(l, r)
        case 'or':
            return path_or(l, r)
    return Until(l, r)


def random_nonhierarchical(rng: np.random.Generator, atoms, n: int = 2) -> StateFormula:
    """Formula nesting a quantifier that observes strictly less of some coordinate than an outer one."""
    outer = Observation(tuple(sorted(set(_subset(rng, range(1, n + 1))) | {int(rng.integers(1, n + 1))})))
    dropped = _pick(rng, outer.indices)
    inner = Observation(tuple(i for i in range(1, n + 1) if i != dropped and (i in outer.indices or rng.random() < 0.5)))
    body = random_formula(rng, atoms, n=n, depth=1, max_quantifiers=0, _bound=('q0', 'q1'))
    inner_formula = Exists('q1', inner, And(AtomicProp('q1'), body))
    wrapped = EX(inner_formula) if rng.random() < 0.5 else Not(inner_formula)
    return Exists('q0', outer, Or(AtomicProp('q0'), wrapped))


def random_lasso(rng: np.random.Generator, atoms, max_prefix: int = 3, max_loop: int = 3) -> LassoWord:
    letters = all_letters(atoms)
    prefix = [_pick(rng, letters) for _ in range(int(rng.integers(0, max_prefix + 1)))]
    loop = [_pick(rng, letters) for _ in range(int(rng.integers(1, max_loop + 1)))]
    return LassoWord(tuple(prefix), tuple(loop))


# ====================================================================
# Automata, trees and games
# --------------------------------------------------------------------


def random_pbf(rng: np.random.Generator, directions, states, depth: int = 2) -> PositiveBooleanFormula:
    if depth <= 0 or rng.random() < 0.3:
        roll = rng.random()
        if roll < 0.1:
            return conj_all(())
        if roll < 0.2:
            return disj_all(())
        return Atom(_pick(rng, directions), _pick(rng, states))
    items = [random_pbf(rng, directions, states, depth - 1) for _ in range(int(rng.integers(2, 4)))]
    return conj_all(items) if rng.random() < 0.5 else disj_all(items)


def random_ata(rng: np.random.Generator, locals: LocalAlphabets, I, atoms=('p',), max_states: int = 4,
               max_colour: int = 3) -> AlternatingTreeAutomaton:
    directions = locals.directions(I)
    states = list(range(int(rng.integers(1, max_states + 1))))
    table = {(q, letter): random_pbf(rng, directions, states) for q in states for letter in all_letters(atoms)}
    colours = {q: int(rng.integers(0, max_colour + 1)) for q in states}
    top = frozenset(_subset(rng, states))
    return AlternatingTreeAutomaton(locals, tuple(I), frozenset(atoms), states, 0, table, colours, top)


def random_nta(rng: np.random.Generator, locals: LocalAlphabets, I, atoms=('p',), max_states: int = 3,
               max_colour: int = 3) -> NondeterministicTreeAutomaton:
    directions = locals.directions(I)
    states = list(range(int(rng.integers(1, max_states + 1))))
    table = {}
    for q in states:
        for letter in all_letters(atoms):
            disjuncts = [conj_all(Atom(d, _pick(rng, states)) for d in directions)
                         for _ in range(int(rng.integers(0, 3)))]
            table[(q, letter)] = disj_all(disjuncts)
    colours = {q: int(rng.integers(0, max_colour + 1)) for q in states}
    top = frozenset(_subset(rng, states))
    return NondeterministicTreeAutomaton(locals, tuple(I), frozenset(atoms), states, 0, table, colours, top)


def random_regular_tree(rng: np.random.Generator, locals: LocalAlphabets, I, atoms=('p',), max_vertices: int = 4,
                        missing: float = 0.2) -> RegularTree:
    directions = locals.directions(I)
    vertices = list(range(int(rng.integers(1, max_vertices + 1))))
    successors = {v: {d: _pick(rng, vertices) for d in directions if rng.random() >= missing} for v in vertices}
    labels = {v: frozenset(_subset(rng, atoms)) for v in vertices}
    return RegularTree(locals, tuple(I), successors, labels, 0, _pick(rng, directions))


def random_graph_labellings(t: RegularTree, p: str):
    """Every p-labelling of the vertices of t, other labels kept."""
    vertices = t.vertices
    for bits in itertools.product((False, True), repeat=len(vertices)):
        yield {v: (t.labels[v] - {p}) | ({p} if bit else set()) for v, bit in zip(vertices, bits)}


def random_parity_game(rng: np.random.Generator, max_positions: int = 6, max_colour: int = 4,
                       deadlock: float = 0.1) -> ParityGame:
    g = ParityGame()
    count = int(rng.integers(1, max_positions + 1))
    for _ in range(count):
        winner = Player(int(rng.integers(2))) if rng.random() < deadlock else None
        g.add_position(Player(int(rng.integers(2))), int(rng.integers(0, max_colour + 1)), winner=winner)
    for v in range(count):
        if v in g.deadlock_winner:
            continue
        for w in _subset(rng, range(count), 0.35) or [int(rng.integers(count))]:
            g.add_move(v, w)
    return g
