from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable

from automata.pbf import (
    BOTTOM,
    TOP,
    Atom,
    PositiveBooleanFormula,
    Conj,
    Disj,
    atoms as pbf_atoms,
    disj,
    disj_all,
    dnf,
    dual,
    format_pbf,
    minimal_models,
    substitute,
)
from automata.safra import det_all_traces
from automata.word_automata import all_letters, format_letter
from games.parity import ParityGame, Player, solve_zielonka
from qctl_utils.errors import AutomatonShapeError, ResourceLimitExceeded
from qctl_utils.logger import logger
from structures.kripke import CompoundKripkeStructure, LocalAlphabets, format_direction

# ====================================================================
# Alternating parity tree automata
# --------------------------------------------------------------------
# Directions are tuples over Λ_I. Letters are subsets of the automaton's
# atoms; a label is read through its intersection with them. An atom
# [d, q'] sent to a missing child is won by Eve iff q' is in Q⊤.


@dataclass
class AlternatingTreeAutomaton:
    locals: LocalAlphabets
    index_set: tuple[int, ...]
    atoms: frozenset[str]
    states: list[Hashable]
    initial: Hashable
    transitions: dict[tuple[Hashable, frozenset[str]], PositiveBooleanFormula]
    colours: dict[Hashable, int]
    top_states: frozenset = frozenset()

    def __post_init__(self):
        self.index_set = tuple(sorted(set(self.index_set)))
        self.atoms = frozenset(self.atoms)
        self.top_states = frozenset(self.top_states)

    def __len__(self):
        return len(self.states)

    @property
    def directions(self) -> list[tuple]:
        return self.locals.directions(self.index_set)

    @property
    def index(self) -> int:
        return len(set(self.colours.values()))

    def letters(self) -> list[frozenset[str]]:
        return all_letters(self.atoms)

    def delta(self, q: Hashable, letter: Iterable[str]) -> PositiveBooleanFormula:
        return self.transitions[(q, frozenset(letter) & self.atoms)]

    def is_top(self, q: Hashable) -> bool:
        return q in self.top_states

    def validate(self) -> None:
        states = set(self.states)
        if self.initial not in states:
            raise AutomatonShapeError(f'initial state {self.initial} is not a state')
        if not self.top_states <= states:
            raise AutomatonShapeError('Q⊤ contains unknown states')
        directions = set(self.directions)
        for q in self.states:
            if q not in self.colours:
                raise AutomatonShapeError(f'state {q} has no colour')
            for letter in self.letters():
                if (q, letter) not in self.transitions:
                    raise AutomatonShapeError(f'no transition for state {q} on {format_letter(letter)}')
                for atom in pbf_atoms(self.transitions[(q, letter)]):
                    if atom.direction not in directions or atom.state not in states:
                        raise AutomatonShapeError(f'atom {atom} is not over the automaton directions and states')


class NondeterministicTreeAutomaton(AlternatingTreeAutomaton):
    """Automaton whose transitions send exactly one copy in every direction."""


def _like(a: AlternatingTreeAutomaton, cls=None, **changes) -> AlternatingTreeAutomaton:
    fields = dict(locals=a.locals, index_set=a.index_set, atoms=a.atoms, states=a.states, initial=a.initial,
                  transitions=a.transitions, colours=a.colours, top_states=a.top_states)
    fields.update(changes)
    return (cls or type(a))(**fields)


def accept_all(locals: LocalAlphabets, I: Iterable[int], atoms: Iterable[str] = ()) -> AlternatingTreeAutomaton:
    atoms = frozenset(atoms)
    table = {(0, letter): TOP for letter in all_letters(atoms)}
    return AlternatingTreeAutomaton(locals, tuple(I), atoms, [0], 0, table, {0: 0}, frozenset({0}))


def reject_all(locals: LocalAlphabets, I: Iterable[int], atoms: Iterable[str] = ()) -> AlternatingTreeAutomaton:
    return dualize(accept_all(locals, I, atoms))


def relabel(a: AlternatingTreeAutomaton, fn: Callable[[Hashable], Hashable]) -> AlternatingTreeAutomaton:
    def rename(f):
        return substitute(f, lambda atom: Atom(atom.direction, fn(atom.state)))

    return _like(
        a,
        states=[fn(q) for q in a.states],
        initial=fn(a.initial),
        transitions={(fn(q), letter): rename(f) for (q, letter), f in a.transitions.items()},
        colours={fn(q): c for q, c in a.colours.items()},
        top_states=frozenset(fn(q) for q in a.top_states),
    )


def retabulate(a: AlternatingTreeAutomaton, atoms: Iterable[str]) -> AlternatingTreeAutomaton:
    """Same automaton with its transition table spelled out over a larger atom set."""
    atoms = frozenset(atoms) | a.atoms
    table = {(q, letter): a.delta(q, letter) for q in a.states for letter in all_letters(atoms)}
    return _like(a, atoms=atoms, transitions=table)


def trim(a: AlternatingTreeAutomaton) -> AlternatingTreeAutomaton:
    """Keep the states reachable from the initial one, renumbered 0..k-1 in BFS order."""
    index = {a.initial: 0}
    queue = deque([a.initial])
    while queue:
        q = queue.popleft()
        for letter in a.letters():
            for atom in sorted(pbf_atoms(a.delta(q, letter)), key=repr):
                if atom.state not in index:
                    index[atom.state] = len(index)
                    queue.append(atom.state)

    def rename(f):
        return substitute(f, lambda atom: Atom(atom.direction, index[atom.state]))

    return _like(
        a,
        states=list(range(len(index))),
        initial=0,
        transitions={(index[q], letter): rename(f) for (q, letter), f in a.transitions.items() if q in index},
        colours={index[q]: c for q, c in a.colours.items() if q in index},
        top_states=frozenset(index[q] for q in a.top_states if q in index),
    )


def normalise_colours(a: AlternatingTreeAutomaton) -> AlternatingTreeAutomaton:
    """Compress colours to a gap-free range keeping their order and parities."""
    mapping, current = {}, None
    for c in sorted(set(a.colours.values())):
        if current is None:
            current = c % 2
        elif c % 2 != current % 2:
            current += 1
        mapping[c] = current
    return _like(a, colours={q: mapping[c] for q, c in a.colours.items()})


# ====================================================================
# The four constructions
# --------------------------------------------------------------------


def dualize(a: AlternatingTreeAutomaton) -> AlternatingTreeAutomaton:
    return _like(
        a,
        cls=AlternatingTreeAutomaton,
        transitions={key: dual(f) for key, f in a.transitions.items()},
        colours={q: c + 1 for q, c in a.colours.items()},
        top_states=frozenset(a.states) - a.top_states,
    )


def narrow(a: AlternatingTreeAutomaton, J: Iterable[int]) -> AlternatingTreeAutomaton:
    """Automaton on Λ_J-trees accepting t iff a accepts every lift of t."""
    J = tuple(sorted(set(J)))
    if not set(J) <= set(a.index_set):
        raise ValueError(f'Cannot narrow an automaton over {list(a.index_set)} to {list(J)}')
    if J == a.index_set:
        return a

    def project(atom: Atom) -> Atom:
        return Atom(a.locals.project(atom.direction, J), atom.state)

    return _like(
        a,
        cls=AlternatingTreeAutomaton,
        index_set=J,
        transitions={key: substitute(f, project) for key, f in a.transitions.items()},
    )


def combine(a1: AlternatingTreeAutomaton, a2: AlternatingTreeAutomaton,
            connective=disj) -> AlternatingTreeAutomaton:
    """Fresh initial state joining both initial transitions with ``connective``."""
    if a1.locals != a2.locals or a1.index_set != a2.index_set:
        raise AutomatonShapeError('combined automata must run on the same directions')
    atoms = a1.atoms | a2.atoms
    left = relabel(a1, lambda q: ('l', q))
    right = relabel(a2, lambda q: ('r', q))
    init = ('init',)
    table = {}
    for letter in all_letters(atoms):
        for part in (left, right):
            for q in part.states:
                table[(q, letter)] = part.delta(q, letter)
        table[(init, letter)] = connective(left.delta(left.initial, letter), right.delta(right.initial, letter))
    colours = {init: 0, **left.colours, **right.colours}
    merged = AlternatingTreeAutomaton(a1.locals, a1.index_set, atoms, [init] + left.states + right.states, init,
                                      table, colours, left.top_states | right.top_states)
    return trim(merged)


def union(a1: AlternatingTreeAutomaton, a2: AlternatingTreeAutomaton) -> AlternatingTreeAutomaton:
    return combine(a1, a2, disj)


def is_nondeterministic(a: AlternatingTreeAutomaton) -> bool:
    directions = a.directions
    for f in a.transitions.values():
        for disjunct in dnf(f):
            if sorted(atom.direction for atom in disjunct) != sorted(directions):
                return False
    return True


def _minimal_sets(sets: Iterable[frozenset]) -> set[frozenset]:
    """Inclusion-minimal members; a smaller annotation never asks more of the subtrees."""
    minimal = []
    for s in sorted(set(sets), key=len):
        if not any(k <= s for k in minimal):
            minimal.append(s)
    return set(minimal)


@dataclass
class SimulationLimits:
    max_nta_states: int | None = None
    max_safra_states: int | None = None
    max_annotation_choices: int | None = None


def simulate(a: AlternatingTreeAutomaton, limits: SimulationLimits | None = None) -> NondeterministicTreeAutomaton:
    """Nondeterministic automaton with the language of ``a``.

    A state (S, x) holds the set S of states the alternating automaton
    visits at the current node and the state x of a deterministic
    automaton reading the annotations (pairs (q, q') sent to a child)
    along the branch; x accepts iff every trace of the annotations is
    max-even. Positional strategies make one annotation per node enough.
    """
    limits = limits or SimulationLimits()
    a = trim(normalise_colours(a))
    det = det_all_traces(len(a), a.colours, limits.max_safra_states)
    directions = a.directions
    letters = a.letters()
    models = {(q, letter): minimal_models(a.delta(q, letter)) for q in a.states for letter in letters}

    initial = (frozenset({a.initial}), det.initial)
    index = {initial: 0}
    order = [initial]
    table = {}
    i = 0
    while i < len(order):
        state = order[i]
        i += 1
        active, x = state
        for letter in letters:
            choices = {frozenset()}
            for q in sorted(active):
                options = models[(q, letter)]
                choices = _minimal_sets(
                    c | {(atom.direction, (q, atom.state)) for atom in m} for c in choices for m in options
                )
                if limits.max_annotation_choices is not None and len(choices) > limits.max_annotation_choices:
                    raise ResourceLimitExceeded('annotation choices per transition', limits.max_annotation_choices)
                if not choices:
                    break
            disjuncts = []
            for choice in sorted(choices, key=lambda c: sorted(map(repr, c))):
                per_direction = {d: set() for d in directions}
                for d, pair in choice:
                    per_direction[d].add(pair)
                conjuncts = []
                for d in directions:
                    relation = frozenset(per_direction[d])
                    target = (frozenset(r for _, r in relation), det.step(x, relation))
                    if target not in index:
                        if limits.max_nta_states is not None and len(order) >= limits.max_nta_states:
                            raise ResourceLimitExceeded('simulated automaton states', limits.max_nta_states)
                        index[target] = len(order)
                        order.append(target)
                    conjuncts.append(Atom(d, index[target]))
                disjuncts.append(Conj(frozenset(conjuncts)) if len(conjuncts) > 1 else conjuncts[0])
            table[(index[state], letter)] = disj_all(disjuncts)

    colours = {index[s]: det.colour(s[1]) for s in order}
    top = frozenset(index[s] for s in order if s[0] <= a.top_states)
    logger.debug(f'simulate: {len(a)} alternating states -> {len(order)} nondeterministic states')
    return NondeterministicTreeAutomaton(a.locals, a.index_set, a.atoms, list(range(len(order))), 0,
                                         table, colours, top)


def project(nta: AlternatingTreeAutomaton, p: str) -> NondeterministicTreeAutomaton:
    """Existential projection of proposition p."""
    if not is_nondeterministic(nta):
        raise AutomatonShapeError('projection needs a nondeterministic automaton (simulate it first)')
    atoms = nta.atoms - {p}
    table = {}
    for q in nta.states:
        for letter in all_letters(atoms):
            table[(q, letter)] = disj(nta.delta(q, letter | {p}), nta.delta(q, letter))
    return _like(nta, cls=NondeterministicTreeAutomaton, atoms=atoms, transitions=table)


# ====================================================================
# Regular trees
# --------------------------------------------------------------------


@dataclass
class RegularTree:
    """Finite pointed graph whose unfolding from ``root`` is a Λ_I-tree."""
    locals: LocalAlphabets
    index_set: tuple[int, ...]
    successors: dict[Hashable, dict[tuple, Hashable]]
    labels: dict[Hashable, frozenset[str]]
    root: Hashable
    root_direction: tuple = field(default=())

    def __post_init__(self):
        self.index_set = tuple(sorted(set(self.index_set)))
        directions = set(self.locals.directions(self.index_set))
        if self.root_direction not in directions:
            raise ValueError(f'Root direction {self.root_direction} is not in Λ_{list(self.index_set)}')
        for v, succ in self.successors.items():
            for d, w in succ.items():
                if d not in directions or w not in self.successors:
                    raise ValueError(f'Edge {v} -{d}-> {w} is not a Λ_{list(self.index_set)} edge of the graph')
        self.labels = {v: frozenset(self.labels.get(v, ())) for v in self.successors}

    @property
    def vertices(self) -> list[Hashable]:
        return list(self.successors)

    @classmethod
    def from_kripke(cls, K: CompoundKripkeStructure, s: str, I: Iterable[int] | None = None,
                    atoms: Iterable[str] | None = None) -> RegularTree:
        """The unfolding of K from s seen through Λ_I, labels restricted to ``atoms``."""
        I = K.locals.coordinates if I is None else tuple(sorted(set(I)))
        successors = {}
        for u in K.states:
            successors[u] = {}
            for v in K.successors(u):
                d = K.locals.project(K.states[v], I)
                if successors[u].get(d, v) != v:
                    raise ValueError(f'Successors {successors[u][d]} and {v} of {u} share the direction '
                                     f'{format_direction(d)} over {list(I)}')
                successors[u][d] = v
        labels = {u: K.labels[u] if atoms is None else K.labels[u] & frozenset(atoms) for u in K.states}
        return cls(K.locals, I, successors, labels, s, K.locals.project(K.states[s], I))


def unfolding_regular_tree(K: CompoundKripkeStructure, s: str, I: Iterable[int] | None = None,
                           atoms: Iterable[str] | None = None) -> RegularTree:
    return RegularTree.from_kripke(K, s, I, atoms)


def full_regular_tree(locals: LocalAlphabets, I: Iterable[int], root_direction: tuple,
                      labels: Iterable[str] = ()) -> RegularTree:
    """The complete Λ_I-tree with a constant labelling."""
    directions = locals.directions(I)
    return RegularTree(locals, tuple(I), {0: {d: 0 for d in directions}}, {0: frozenset(labels)}, 0,
                       root_direction)


def lift_regular_tree(t: RegularTree, I: Iterable[int], extra: tuple) -> RegularTree:
    I, J = tuple(sorted(set(I))), t.index_set
    if not set(J) <= set(I):
        raise ValueError(f'Cannot lift a tree over {list(J)} to {list(I)}')
    successors = {}
    for v, succ in t.successors.items():
        successors[v] = {d: succ[t.locals.project(d, J)] for d in t.locals.directions(I)
                         if t.locals.project(d, J) in succ}
    return RegularTree(t.locals, I, successors, t.labels, t.root, t.locals.combine(t.root_direction, extra))


def with_vertex_labels(t: RegularTree, labels: dict[Hashable, Iterable[str]]) -> RegularTree:
    return RegularTree(t.locals, t.index_set, t.successors, {v: frozenset(labels.get(v, ())) for v in t.vertices},
                       t.root, t.root_direction)


# ====================================================================
# Membership
# --------------------------------------------------------------------


def membership_game(a: AlternatingTreeAutomaton, t: RegularTree, start: Hashable | None = None,
                    max_positions: int | None = None) -> ParityGame:
    """Acceptance game: positions (vertex, state, subformula of a transition)."""
    if a.locals != t.locals or a.index_set != t.index_set:
        raise AutomatonShapeError(f'automaton directions Λ_{list(a.index_set)} do not match '
                                  f'tree directions Λ_{list(t.index_set)}')
    start = t.root if start is None else start
    game = ParityGame()
    ids: dict[tuple, int] = {}
    queue = deque()

    def position(v: Hashable, q: Hashable, f: PositiveBooleanFormula) -> int:
        key = (v, q, f)
        if key not in ids:
            if max_positions is not None and len(ids) >= max_positions:
                raise ResourceLimitExceeded('acceptance game positions', max_positions)
            colour = a.colours[q]
            if f == TOP:
                ids[key] = game.add_position(Player.EVE, colour, key, winner=Player.EVE)
            elif f == BOTTOM:
                ids[key] = game.add_position(Player.EVE, colour, key, winner=Player.ADAM)
            else:
                owner = Player.ADAM if isinstance(f, Conj) else Player.EVE
                ids[key] = game.add_position(owner, colour, key)
                queue.append(key)
        return ids[key]

    game.initial = position(start, a.initial, a.delta(a.initial, t.labels[start]))
    while queue:
        v, q, f = key = queue.popleft()
        source = ids[key]
        if isinstance(f, (Conj, Disj)):
            for g in sorted(f.items, key=repr):
                game.add_move(source, position(v, q, g))
            continue
        child = t.successors[v].get(f.direction)
        if child is None:
            target = position(v, f.state, TOP if a.is_top(f.state) else BOTTOM)
        else:
            target = position(child, f.state, a.delta(f.state, t.labels[child]))
        game.add_move(source, target)
    return game


def membership(a: AlternatingTreeAutomaton, t: RegularTree, start: Hashable | None = None,
               max_positions: int | None = None) -> bool:
    game = membership_game(a, t, start, max_positions)
    solution = solve_zielonka(game)
    logger.debug(f'membership: {len(game)} game positions, automaton of {len(a)} states')
    return solution.winner[game.initial] == Player.EVE


# ====================================================================
# Debug dump
# --------------------------------------------------------------------


def dump_automaton(a: AlternatingTreeAutomaton) -> str:
    kind = 'nta' if isinstance(a, NondeterministicTreeAutomaton) else 'ata'
    lines = [
        f'{kind} index {{{",".join(map(str, a.index_set))}}} atoms {format_letter(a.atoms)} '
        f'states {len(a)} initial {a.initial}',
    ]
    for q in a.states:
        lines.append(f'state {q} colour {a.colours[q]} {"top" if a.is_top(q) else "bottom"}')
        for letter in a.letters():
            lines.append(f'  {format_letter(letter)}: {format_pbf(a.delta(q, letter), format_direction)}')
    return '\n'.join(lines) + '\n'
