from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Hashable, Iterable

import networkx as nx

from logic.formula import (
    And,
    AtomicProp,
    Constant,
    Formula,
    Next,
    Not,
    Or,
    PathAnd,
    PathNot,
    PathOr,
    StateEmbed,
    Until,
    walk,
)

# ====================================================================
# Lasso words
# --------------------------------------------------------------------


@dataclass(frozen=True)
class LassoWord:
    """The ultimately periodic word prefix · loop^ω over letters 2^Σ."""
    prefix: tuple[frozenset[str], ...]
    loop: tuple[frozenset[str], ...]

    def __post_init__(self):
        object.__setattr__(self, 'prefix', tuple(frozenset(a) for a in self.prefix))
        object.__setattr__(self, 'loop', tuple(frozenset(a) for a in self.loop))
        if not self.loop:
            raise ValueError('The loop of a lasso word is nonempty')

    def __len__(self):
        return len(self.prefix) + len(self.loop)

    def letter(self, i: int) -> frozenset[str]:
        return self.prefix[i] if i < len(self.prefix) else self.loop[i - len(self.prefix)]

    def successor(self, i: int) -> int:
        return i + 1 if i + 1 < len(self) else len(self.prefix)

    def letters(self) -> set[frozenset[str]]:
        return set(self.prefix) | set(self.loop)


def _eval_letter(f: Formula, letter: frozenset[str]) -> bool:
    match f:
        case AtomicProp(name):
            return name in letter
        case Constant(value):
            return value
        case Not(g):
            return not _eval_letter(g, letter)
        case And(l, r):
            return _eval_letter(l, letter) and _eval_letter(r, letter)
        case Or(l, r):
            return _eval_letter(l, letter) or _eval_letter(r, letter)
        case _:
            raise ValueError(f'Unsupported LTL construct: {f}')


def ltl_atoms(psi: Formula) -> set[str]:
    return {node.name for node in walk(psi) if isinstance(node, AtomicProp)}


def ltl_eval_lasso(psi: Formula, w: LassoWord, atoms: Iterable[str] | None = None) -> bool:
    """LTL truth of psi at position 0 of w.

    Positions of the lasso are its finitely many distinct suffixes, so
    every subformula is a finite truth vector.
    """
    if atoms is not None:
        unknown = ltl_atoms(psi) - set(atoms)
        if unknown:
            raise ValueError(f'Unknown atoms {sorted(unknown)} in LTL formula')
    positions = range(len(w))

    def holds(f: Formula) -> list[bool]:
        match f:
            case StateEmbed(g):
                return [_eval_letter(g, w.letter(i)) for i in positions]
            case PathNot(g):
                return [not v for v in holds(g)]
            case PathAnd(l, r):
                return [a and b for a, b in zip(holds(l), holds(r))]
            case PathOr(l, r):
                return [a or b for a, b in zip(holds(l), holds(r))]
            case Next(g):
                inner = holds(g)
                return [inner[w.successor(i)] for i in positions]
            case Until(l, r):
                left, right = holds(l), holds(r)
                result = list(right)
                changed = True
                while changed:
                    changed = False
                    for i in positions:
                        if not result[i] and left[i] and result[w.successor(i)]:
                            result[i] = changed = True
                return result
            case _:
                raise ValueError(f'Unsupported LTL construct: {f}')

    return holds(psi)[0]


# ====================================================================
# Negation normal form
# --------------------------------------------------------------------


class Nnf:
    pass


@dataclass(frozen=True)
class Lit(Nnf):
    name: str
    positive: bool = True


@dataclass(frozen=True)
class Const(Nnf):
    value: bool


@dataclass(frozen=True)
class NAnd(Nnf):
    left: Nnf
    right: Nnf


@dataclass(frozen=True)
class NOr(Nnf):
    left: Nnf
    right: Nnf


@dataclass(frozen=True)
class NNext(Nnf):
    operand: Nnf


@dataclass(frozen=True)
class NUntil(Nnf):
    left: Nnf
    right: Nnf


@dataclass(frozen=True)
class NRelease(Nnf):
    left: Nnf
    right: Nnf


def to_nnf(f: Formula, negate: bool = False) -> Nnf:
    """Push negations down to the literals, introducing Release."""
    match f:
        case StateEmbed(g):
            return to_nnf(g, negate)
        case AtomicProp(name):
            return Lit(name, not negate)
        case Constant(value):
            return Const(value != negate)
        case Not(g) | PathNot(g):
            return to_nnf(g, not negate)
        case And(l, r) | PathAnd(l, r):
            node = NOr if negate else NAnd
            return node(to_nnf(l, negate), to_nnf(r, negate))
        case Or(l, r) | PathOr(l, r):
            node = NAnd if negate else NOr
            return node(to_nnf(l, negate), to_nnf(r, negate))
        case Next(g):
            return NNext(to_nnf(g, negate))
        case Until(l, r):
            node = NRelease if negate else NUntil
            return node(to_nnf(l, negate), to_nnf(r, negate))
        case _:
            raise ValueError(f'Unsupported LTL construct: {f}')


def _nnf_nodes(f: Nnf) -> Iterable[Nnf]:
    yield f
    if isinstance(f, NNext):
        yield from _nnf_nodes(f.operand)
    elif isinstance(f, (NAnd, NOr, NUntil, NRelease)):
        yield from _nnf_nodes(f.left)
        yield from _nnf_nodes(f.right)


# ====================================================================
# Büchi word automata
# --------------------------------------------------------------------


def all_letters(atoms: Iterable[str]) -> list[frozenset[str]]:
    atoms = sorted(atoms)
    return [frozenset(c) for k in range(len(atoms) + 1) for c in itertools.combinations(atoms, k)]


@dataclass
class BuchiWordAutomaton:
    atoms: tuple[str, ...]
    states: list[Hashable]
    initial: Hashable
    transitions: dict[tuple[Hashable, frozenset[str]], tuple[Hashable, ...]]
    accepting: frozenset

    def letters(self) -> list[frozenset[str]]:
        return all_letters(self.atoms)

    def successors(self, q: Hashable, letter: frozenset[str]) -> tuple[Hashable, ...]:
        return self.transitions[(q, letter & frozenset(self.atoms))]

    def is_accepting(self, q: Hashable) -> bool:
        return q in self.accepting

    def colour(self, q: Hashable) -> int:
        return 2 if q in self.accepting else 1

    def initial_states(self) -> tuple[Hashable, ...]:
        return (self.initial,)

    def __len__(self):
        return len(self.states)


@dataclass(frozen=True)
class _TableauNode:
    literals: frozenset
    nexts: frozenset
    pending: frozenset

    def allows(self, letter: frozenset[str]) -> bool:
        return all((lit.name in letter) == lit.positive for lit in self.literals)


def _expand(obligations: frozenset) -> list[_TableauNode]:
    """All consistent ways of meeting ``obligations`` now and from the next step on."""
    results = {}

    def go(todo: tuple, done: frozenset, literals: frozenset, nexts: frozenset, pending: frozenset):
        if not todo:
            node = _TableauNode(literals, nexts, pending)
            results.setdefault(node, None)
            return
        f, rest = todo[0], todo[1:]
        if f in done:
            go(rest, done, literals, nexts, pending)
            return
        done = done | {f}
        match f:
            case Const(True):
                go(rest, done, literals, nexts, pending)
            case Const(False):
                return
            case Lit(name, positive):
                if Lit(name, not positive) in literals:
                    return
                go(rest, done, literals | {f}, nexts, pending)
            case NAnd(l, r):
                go((l, r) + rest, done, literals, nexts, pending)
            case NOr(l, r):
                go((l,) + rest, done, literals, nexts, pending)
                go((r,) + rest, done, literals, nexts, pending)
            case NNext(g):
                go(rest, done, literals, nexts | {g}, pending)
            case NUntil(l, r):
                go((r,) + rest, done, literals, nexts, pending)
                go((l,) + rest, done, literals, nexts | {f}, pending | {f})
            case NRelease(l, r):
                go((l, r) + rest, done, literals, nexts, pending)
                go((r,) + rest, done, literals, nexts | {f}, pending)

    go(tuple(sorted(obligations, key=repr)), frozenset(), frozenset(), frozenset(), frozenset())
    return list(results)


INIT = 'init'
SINK = 'sink'


def ltl_to_nbw(psi: Formula, atoms: Iterable[str] | None = None) -> BuchiWordAutomaton:
    """Büchi automaton for the models of an LTL formula.

    Tableau nodes record the literals and next-step obligations of one
    position; until-fulfilment is degeneralised with a round-robin counter.
    """
    nnf = to_nnf(psi)
    atoms = tuple(sorted(set(atoms) if atoms is not None else ltl_atoms(psi)))
    unknown = ltl_atoms(psi) - set(atoms)
    if unknown:
        raise ValueError(f'Unknown atoms {sorted(unknown)} in LTL formula')
    untils = sorted({g for g in _nnf_nodes(nnf) if isinstance(g, NUntil)}, key=repr)
    k = len(untils)
    expansions: dict[frozenset, list[_TableauNode]] = {}

    def expand(obligations: frozenset) -> list[_TableauNode]:
        if obligations not in expansions:
            expansions[obligations] = _expand(obligations)
        return expansions[obligations]

    def counter_after(node: _TableauNode, i: int) -> int:
        if k == 0:
            return 0
        return (i + 1) % k if untils[i] not in node.pending else i

    def moves(state, letter) -> set:
        if state == SINK:
            return {SINK}
        sources = [(n, 0) for n in expand(frozenset({nnf}))] if state == INIT else [state]
        result = set()
        for node, i in sources:
            if node.allows(letter):
                result |= {(m, counter_after(node, i)) for m in expand(node.nexts)}
        return result

    initial_nodes = expand(frozenset({nnf}))
    initial = (initial_nodes[0], 0) if len(initial_nodes) == 1 else INIT
    letters = all_letters(atoms)
    states, transitions = [initial], {}
    index = {initial: 0}
    needs_sink = False
    while len(transitions) < len(states) * len(letters):
        q = states[len(transitions) // len(letters)]
        for letter in letters:
            succ = moves(q, letter)
            if not succ:
                needs_sink = True
                succ = {SINK}
            for r in succ:
                if r not in index and r != SINK:
                    index[r] = len(states)
                    states.append(r)
            transitions[(q, letter)] = succ
    if needs_sink:
        states.append(SINK)
        index[SINK] = len(states) - 1
        for letter in letters:
            transitions[(SINK, letter)] = {SINK}

    accepting = set()
    for q in states:
        if q in (INIT, SINK):
            continue
        node, i = q
        if k == 0 or (i == 0 and untils[0] not in node.pending):
            accepting.add(index[q])
    renamed = {(index[q], letter): tuple(sorted(index[r] for r in succ)) for (q, letter), succ in transitions.items()}
    return BuchiWordAutomaton(atoms, list(range(len(states))), 0, renamed, frozenset(accepting))


def nbw_accepts_lasso(a: BuchiWordAutomaton, w: LassoWord) -> bool:
    if not all(letter <= frozenset(a.atoms) for letter in w.letters()):
        raise ValueError(f'Lasso letters exceed the automaton alphabet {list(a.atoms)}')
    graph = nx.DiGraph()
    start = (a.initial, 0)
    graph.add_node(start)
    stack = [start]
    while stack:
        q, i = stack.pop()
        for r in a.successors(q, w.letter(i)):
            node = (r, w.successor(i))
            if node not in graph:
                graph.add_node(node)
                stack.append(node)
            graph.add_edge((q, i), node)
    for scc in nx.strongly_connected_components(graph):
        looping = len(scc) > 1 or any(graph.has_edge(v, v) for v in scc)
        if looping and any(a.is_accepting(q) for q, _ in scc):
            return True
    return False


def format_letter(letter: frozenset[str]) -> str:
    return '{' + ','.join(sorted(letter)) + '}'


def dump_nbw(a: BuchiWordAutomaton) -> str:
    lines = [f'nbw atoms: {" ".join(a.atoms)}', f'initial {a.initial}']
    for q in a.states:
        lines.append(f'state {q}' + (' accepting' if a.is_accepting(q) else ''))
        for letter in a.letters():
            succ = ' '.join(str(r) for r in a.transitions[(q, letter)])
            lines.append(f'  {format_letter(letter)} -> {succ}')
    return '\n'.join(lines) + '\n'
