from __future__ import annotations

import math
from collections import deque
from typing import Callable, Hashable, Iterable, Protocol

import networkx as nx

from automata.word_automata import LassoWord
from games.parity import Player, cycle_sources
from qctl_utils.errors import ResourceLimitExceeded

# ====================================================================
# Deterministic parity word automata
# --------------------------------------------------------------------
# Transitions are computed on demand: the alphabet of annotation letters
# is far too large to tabulate. Colours follow the max-even convention.


class DeterministicParityWordAutomaton:
    def __init__(self, initial: Hashable, step: Callable[[Hashable, Hashable], Hashable],
                 colour: Callable[[Hashable], int], max_states: int | None = None):
        self.initial = initial
        self._step = step
        self._colour = colour
        self._table: dict[tuple[Hashable, Hashable], Hashable] = {}
        self._seen: dict[Hashable, int] = {initial: 0}
        self.max_states = max_states

    def step(self, state: Hashable, letter: Hashable) -> Hashable:
        key = (state, letter)
        if key not in self._table:
            target = self._step(state, letter)
            if target not in self._seen:
                if self.max_states is not None and len(self._seen) >= self.max_states:
                    raise ResourceLimitExceeded('deterministic parity automaton states', self.max_states)
                self._seen[target] = len(self._seen)
            self._table[key] = target
        return self._table[key]

    def colour(self, state: Hashable) -> int:
        return self._colour(state)

    def state_id(self, state: Hashable) -> int:
        return self._seen[state]

    def run(self, word: Iterable[Hashable]) -> Hashable:
        state = self.initial
        for letter in word:
            state = self.step(state, letter)
        return state

    def explore(self, alphabet: list[Hashable]) -> list[Hashable]:
        """States reachable over ``alphabet``, transitions tabulated on the way."""
        order, queue = [self.initial], deque([self.initial])
        seen = {self.initial}
        while queue:
            state = queue.popleft()
            for letter in alphabet:
                target = self.step(state, letter)
                if target not in seen:
                    seen.add(target)
                    order.append(target)
                    queue.append(target)
        return order


def dpw_accepts_lasso(d: DeterministicParityWordAutomaton, w: LassoWord) -> bool:
    state = d.run(w.prefix)
    visited: dict[tuple[Hashable, int], int] = {}
    colours: list[int] = []
    i = 0
    while (state, i) not in visited:
        visited[(state, i)] = len(colours)
        state = d.step(state, w.loop[i])
        colours.append(d.colour(state))
        i = (i + 1) % len(w.loop)
    return max(colours[visited[(state, i)]:]) % 2 == 0


def dump_dpw(d: DeterministicParityWordAutomaton, alphabet: list[Hashable], fmt_letter=str) -> str:
    states = d.explore(alphabet)
    lines = [f'dpw states: {len(states)}', f'initial {d.state_id(d.initial)}']
    for state in states:
        lines.append(f'state {d.state_id(state)} colour {d.colour(state)}')
        for letter in alphabet:
            lines.append(f'  {fmt_letter(letter)} -> {d.state_id(d.step(state, letter))}')
    return '\n'.join(lines) + '\n'


# ====================================================================
# Safra trees
# --------------------------------------------------------------------
# A tree is a tuple of (name, parent, label) sorted by name. Names are
# compacted to 1..k after every step, so an older node always has the
# smaller name and the root is node 1. The empty tree means no run is left.


class BuchiLike(Protocol):
    def initial_states(self) -> Iterable[Hashable]: ...

    def successors(self, q: Hashable, letter: Hashable) -> Iterable[Hashable]: ...

    def is_accepting(self, q: Hashable) -> bool: ...

    def __len__(self) -> int: ...


def _safra_step(nbw: BuchiLike, tree: tuple, letter: Hashable) -> tuple[tuple, int]:
    """One transition of the Safra automaton with its min-parity colour."""
    neutral = 2 * len(nbw) + 1
    if not tree:
        return (), neutral
    parent = {name: p for name, p, _ in tree}
    label = {name: set(ls) for name, _, ls in tree}
    fresh = max(label) + 1
    for name in sorted(label):
        accepting = {q for q in label[name] if nbw.is_accepting(q)}
        if accepting:
            parent[fresh], label[fresh] = name, accepting
            fresh += 1
    for name in label:
        label[name] = {r for q in label[name] for r in nbw.successors(q, letter)}

    kids: dict[int, list[int]] = {name: [] for name in label}
    for name in sorted(label):
        if parent[name]:
            kids[parent[name]].append(name)

    def clean(name: int, allowed: set) -> None:
        label[name] &= allowed
        claimed = set()
        for child in kids[name]:
            clean(child, label[name] - claimed)
            claimed |= label[child]

    clean(1, label[1])
    if not label[1]:
        return (), 1

    removed, green = [], []

    def prune(name: int) -> None:
        for child in kids[name]:
            prune(child)
        removed.append(name)

    def visit(name: int) -> None:
        alive = [c for c in kids[name] if label[c]]
        for c in kids[name]:
            if not label[c]:
                prune(c)
        kids[name] = alive
        if alive and set().union(*(label[c] for c in alive)) == label[name]:
            for c in alive:
                prune(c)
            kids[name] = []
            green.append(name)
            return
        for c in alive:
            visit(c)

    visit(1)
    e = min(removed, default=math.inf)
    f = min(green, default=math.inf)
    if e < f:
        colour = min(2 * e - 1, neutral)
    elif f < math.inf:
        colour = min(2 * f, neutral)
    else:
        colour = neutral

    alive = set(label) - set(removed)
    rename = {old: new for new, old in enumerate(sorted(alive), start=1)}
    next_tree = tuple((rename[name], rename.get(parent[name], 0), frozenset(label[name]))
                      for name in sorted(alive))
    return next_tree, colour


def safra_determinise(nbw: BuchiLike, max_states: int | None = None) -> DeterministicParityWordAutomaton:
    """Deterministic parity automaton with the language of ``nbw``.

    Safra colours are min-parity with even accepting; they are flipped into
    the max-even convention as 2N + 2 - c. States carry the colour of the
    transition that entered them.
    """
    top = 2 * len(nbw) + 2
    start = frozenset(nbw.initial_states())
    initial_tree = ((1, 0, start),) if start else ()

    def step(state, letter):
        tree, _ = state
        next_tree, colour = _safra_step(nbw, tree, letter)
        return next_tree, top - colour

    return DeterministicParityWordAutomaton((initial_tree, 1), step, lambda state: state[1], max_states)


# ====================================================================
# All-traces automaton
# --------------------------------------------------------------------


class TraceViolationNBW:
    """Büchi automaton guessing a trace of an annotation word that breaks the parity condition.

    Letters are sets of (state, state) pairs. A run follows one trace and at
    some point commits to an odd colour c, after which the trace may not
    exceed c and must hit c infinitely often.
    """

    def __init__(self, q_count: int, colours: dict[int, int]):
        self.q_count = q_count
        self.colours = colours
        self.odd = sorted({c for c in colours.values() if c % 2 == 1})
        self._cache: dict[tuple[Hashable, Hashable], tuple] = {}

    def __len__(self):
        return self.q_count * (1 + len(self.odd))

    def _entries(self, q: int) -> list[tuple[int, int | None]]:
        return [(q, None)] + [(q, c) for c in self.odd if self.colours[q] <= c]

    def initial_states(self) -> list[tuple[int, int | None]]:
        return [s for q in range(self.q_count) for s in self._entries(q)]

    def successors(self, state: tuple[int, int | None], letter: frozenset) -> tuple:
        key = (state, letter)
        if key not in self._cache:
            q, c = state
            targets = [r for p, r in letter if p == q]
            if c is None:
                result = tuple(s for r in targets for s in self._entries(r))
            else:
                result = tuple((r, c) for r in targets if self.colours[r] <= c)
            self._cache[key] = result
        return self._cache[key]

    def is_accepting(self, state: tuple[int, int | None]) -> bool:
        q, c = state
        return c is not None and self.colours[q] == c


def det_all_traces(q_count: int, colours: dict[int, int],
                   max_states: int | None = None) -> DeterministicParityWordAutomaton:
    """Deterministic automaton accepting the annotation words all of whose traces are max-even."""
    violation = safra_determinise(TraceViolationNBW(q_count, colours), max_states)
    return DeterministicParityWordAutomaton(
        violation.initial, violation._step, lambda state: state[1] + 1, max_states,
    )


def lasso_traces_accepting(colours: dict[int, int], w: LassoWord) -> bool:
    """Brute-force check that every infinite trace of an annotation lasso is max-even."""
    graph = nx.DiGraph()
    for i in range(len(w)):
        for q, r in w.letter(i):
            graph.add_edge((q, i), (r, w.successor(i)))
    node_colours = {node: colours[node[0]] for node in graph.nodes}
    index = {node: k for k, node in enumerate(graph.nodes)}
    relabelled = nx.relabel_nodes(graph, index)
    bad = cycle_sources(relabelled, [node_colours[node] for node in index], Player.ADAM)
    return not any(index[node] in bad for node in index if node[1] == 0)
