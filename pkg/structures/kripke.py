from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from lark import Lark
from lark.exceptions import UnexpectedInput

from qctl_utils.errors import ModelFormatError

# ====================================================================
# Local states and directions
# --------------------------------------------------------------------
# A tuple over Λ_I lists one local state per index of I in increasing
# index order. Alphabets are disjoint, so a tuple knows its own index set.
# The blank direction (projection onto no coordinate) is the empty tuple.

BLANK: tuple = ()
BLANK_TEXT = '#blank'
LOCAL_PROP_PREFIX = '@'


def local_prop(l: str) -> str:
    """Dedicated proposition holding exactly in states whose tuple contains ``l``."""
    return f'{LOCAL_PROP_PREFIX}{l}'


def format_direction(d: tuple) -> str:
    return BLANK_TEXT if d == BLANK else '(' + ','.join(d) + ')'


@dataclass(frozen=True)
class LocalAlphabets:
    alphabets: tuple[tuple[str, ...], ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        alphabets = tuple(tuple(a) for a in self.alphabets)
        object.__setattr__(self, 'alphabets', alphabets)
        if not alphabets:
            raise ValueError('At least one local alphabet is required')
        index = {}
        for i, alphabet in enumerate(alphabets, start=1):
            if not alphabet:
                raise ValueError(f'Local alphabet {i} is empty')
            for l in alphabet:
                if l in index:
                    raise ValueError(f'Local state {l} appears in alphabets {index[l]} and {i}')
                index[l] = i
        object.__setattr__(self, '_index', index)

    @property
    def n(self) -> int:
        return len(self.alphabets)

    @property
    def coordinates(self) -> tuple[int, ...]:
        return tuple(range(1, self.n + 1))

    def alphabet(self, i: int) -> tuple[str, ...]:
        return self.alphabets[i - 1]

    def index_of(self, l: str) -> int:
        try:
            return self._index[l]
        except KeyError:
            raise ValueError(f'Unknown local state {l}') from None

    def indices_of(self, d: tuple) -> tuple[int, ...]:
        indices = tuple(self.index_of(l) for l in d)
        if list(indices) != sorted(set(indices)):
            raise ValueError(f'Malformed tuple {d}: coordinates must be distinct and ordered')
        return indices

    def directions(self, indices: Iterable[int]) -> list[tuple]:
        """Λ_I for the given index set, the blank direction alone for I = ∅."""
        indices = sorted(set(indices))
        if any(i < 1 or i > self.n for i in indices):
            raise ValueError(f'Index set {indices} is not included in [1..{self.n}]')
        return list(itertools.product(*(self.alphabet(i) for i in indices)))

    def project(self, d: tuple, J: Iterable[int]) -> tuple:
        J = set(J)
        I = set(self.indices_of(d))
        if not J <= I:
            raise ValueError(f'Cannot project a tuple over {sorted(I)} onto {sorted(J)}')
        return tuple(l for l in d if self._index[l] in J)

    def combine(self, d: tuple, e: tuple) -> tuple:
        """Join tuples over disjoint index sets into one tuple over the union."""
        merged = sorted(d + e, key=self.index_of)
        self.indices_of(tuple(merged))
        return tuple(merged)


def project_state(d: tuple, J: Iterable[int], locals: LocalAlphabets) -> tuple:
    return locals.project(d, J)


def obs_equiv_states(d: tuple, d2: tuple, o, locals: LocalAlphabets) -> bool:
    I = locals.indices_of(d)
    if locals.indices_of(d2) != I:
        raise ValueError(f'Tuples {d} and {d2} range over different coordinates')
    visible = set(I) & set(o)
    return locals.project(d, visible) == locals.project(d2, visible)


# ====================================================================
# Compound Kripke structures
# --------------------------------------------------------------------


@dataclass(frozen=True)
class CompoundKripkeStructure:
    locals: LocalAlphabets
    states: dict[str, tuple]
    edges: dict[str, tuple[str, ...]]
    labels: dict[str, frozenset[str]]
    atoms: frozenset[str] = frozenset()

    def __post_init__(self):
        labels = {s: frozenset(self.labels.get(s, ())) for s in self.states}
        object.__setattr__(self, 'labels', labels)
        object.__setattr__(self, 'atoms', frozenset(self.atoms).union(*labels.values()))
        object.__setattr__(self, 'edges', {s: tuple(self.edges.get(s, ())) for s in self.states})
        by_tuple = {}
        for s, d in self.states.items():
            if len(d) != self.locals.n:
                raise ModelFormatError(f'state {s} has arity {len(d)}, expected {self.locals.n}')
            for i, l in enumerate(d, start=1):
                if l not in self.locals.alphabet(i):
                    raise ModelFormatError(f'state {s}: {l} is not a local state of coordinate {i}')
            if d in by_tuple:
                raise ModelFormatError(f'states {by_tuple[d]} and {s} share the tuple {format_direction(d)}')
            by_tuple[d] = s
        for s, succ in self.edges.items():
            for t in succ:
                if t not in self.states:
                    raise ModelFormatError(f'edge {s} -> {t} targets an unknown state')
            if not succ:
                raise ModelFormatError(f'state {s} has no successor (the relation must be left-total)')

    @property
    def n(self) -> int:
        return self.locals.n

    @property
    def state_names(self) -> list[str]:
        return list(self.states)

    def tuple_of(self, s: str) -> tuple:
        try:
            return self.states[s]
        except KeyError:
            raise ValueError(f'Unknown state {s}') from None

    def state_of(self, d: tuple) -> str:
        for s, t in self.states.items():
            if t == d:
                return s
        raise ValueError(f'No state has tuple {format_direction(d)}')

    def successors(self, s: str) -> tuple[str, ...]:
        return self.edges[s]

    def is_local_prop(self, p: str) -> bool:
        return p.startswith(LOCAL_PROP_PREFIX) and p[len(LOCAL_PROP_PREFIX):] in self.locals._index

    def holds(self, s: str, p: str) -> bool:
        if p in self.labels[s]:
            return True
        return self.is_local_prop(p) and p[len(LOCAL_PROP_PREFIX):] in self.states[s]

    def knows(self, p: str) -> bool:
        return p in self.atoms or self.is_local_prop(p)


def reachable(K: CompoundKripkeStructure, s: str) -> list[str]:
    seen, queue = {s: None}, deque([s])
    while queue:
        u = queue.popleft()
        for v in K.successors(u):
            if v not in seen:
                seen[v] = None
                queue.append(v)
    return list(seen)


def with_labelling(K: CompoundKripkeStructure, p: str, states: Iterable[str]) -> CompoundKripkeStructure:
    """The structure equal to K modulo p, with p holding exactly on ``states``."""
    states = set(states)
    labels = {s: (K.labels[s] - {p}) | ({p} if s in states else set()) for s in K.states}
    return CompoundKripkeStructure(K.locals, K.states, K.edges, labels, K.atoms | {p})


def obs_classes(K: CompoundKripkeStructure, o) -> list[frozenset[str]]:
    """States grouped by what an observer of ``o`` sees of them."""
    visible = set(o) & set(K.locals.coordinates)
    classes: dict[tuple, list[str]] = {}
    for s, d in K.states.items():
        classes.setdefault(K.locals.project(d, visible), []).append(s)
    return [frozenset(c) for c in classes.values()]


def is_uniform_labelling(K: CompoundKripkeStructure, p: str, o) -> bool:
    names = K.state_names
    for s, t in itertools.combinations(names, 2):
        if obs_equiv_states(K.states[s], K.states[t], o, K.locals) and (p in K.labels[s]) != (p in K.labels[t]):
            return False
    return True


def unfold_bounded(K: CompoundKripkeStructure, s: str, depth: int):
    """Unfolding of K from s truncated below ``depth``."""
    from structures.trees import FiniteLabelledTree

    K.tuple_of(s)
    labels = {(K.states[s],): K.labels[s]}
    frontier = [((K.states[s],), s)]
    for _ in range(depth):
        next_frontier = []
        for node, u in frontier:
            for v in K.successors(u):
                child = node + (K.states[v],)
                labels[child] = K.labels[v]
                next_frontier.append((child, v))
        frontier = next_frontier
    return FiniteLabelledTree(K.locals, K.locals.coordinates, labels, depth)


# ====================================================================
# Model files
# --------------------------------------------------------------------

model_grammar = r"""
    ?stmt: "locals" INT ":" NAME+                        -> locals_decl
         | "state" NAME "=" "(" NAME ("," NAME)* ")"     -> state_decl
         | "edge" NAME "->" NAME                         -> edge_decl
         | "label" NAME ":" NAME*                        -> label_decl
         | "atoms" ":" NAME*                             -> atoms_decl

    NAME: /[A-Za-z_][A-Za-z0-9_']*/

    %import common.INT
    %import common.WS_INLINE
    %ignore WS_INLINE
"""

_model_parser = Lark(model_grammar, start='stmt', parser='lalr')


def parse_model(text: str) -> CompoundKripkeStructure:
    alphabets: dict[int, list[str]] = {}
    states: dict[str, tuple] = {}
    edges: dict[str, list[str]] = {}
    labels: dict[str, set[str]] = {}
    atoms: set[str] = set()
    state_line: dict[str, int] = {}
    for lineno, raw in enumerate(text.split('\n'), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        try:
            stmt = _model_parser.parse(line)
        except UnexpectedInput as e:
            raise ModelFormatError(f'cannot parse "{line}" ({e.__class__.__name__})', lineno) from None
        args = [str(c) for c in stmt.children]
        if stmt.data == 'locals_decl':
            i = int(args[0])
            if i in alphabets:
                raise ModelFormatError(f'alphabet {i} declared twice', lineno)
            alphabets[i] = args[1:]
        elif stmt.data == 'state_decl':
            name = args[0]
            if name in states:
                raise ModelFormatError(f'state {name} declared twice', lineno)
            states[name], state_line[name] = tuple(args[1:]), lineno
        elif stmt.data == 'edge_decl':
            for s in args:
                if s not in states:
                    raise ModelFormatError(f'unknown state {s} in edge', lineno)
            edges.setdefault(args[0], []).append(args[1])
        elif stmt.data == 'label_decl':
            if args[0] not in states:
                raise ModelFormatError(f'unknown state {args[0]} in label', lineno)
            labels.setdefault(args[0], set()).update(args[1:])
        else:
            atoms.update(args)
    if sorted(alphabets) != list(range(1, len(alphabets) + 1)) or not alphabets:
        raise ModelFormatError(f'local alphabets must be numbered 1..n, got {sorted(alphabets)}')
    try:
        locals = LocalAlphabets(tuple(tuple(alphabets[i]) for i in sorted(alphabets)))
    except ValueError as e:
        raise ModelFormatError(str(e)) from None
    for name, d in states.items():
        if len(d) != locals.n:
            raise ModelFormatError(f'state {name} has arity {len(d)}, expected {locals.n}', state_line[name])
        if name not in edges:
            raise ModelFormatError(f'state {name} has no successor (the relation must be left-total)',
                                   state_line[name])
    if not states:
        raise ModelFormatError('the model declares no state')
    return CompoundKripkeStructure(locals, states, edges, labels, frozenset(atoms))


def dump_model(K: CompoundKripkeStructure) -> str:
    lines = [f'locals {i}: ' + ' '.join(K.locals.alphabet(i)) for i in K.locals.coordinates]
    if K.atoms:
        lines.append('atoms: ' + ' '.join(sorted(K.atoms)))
    lines += [f'state {s} = ({",".join(d)})' for s, d in K.states.items()]
    lines += [f'edge {s} -> {t}' for s, succ in K.edges.items() for t in succ]
    lines += [f'label {s}: ' + ' '.join(sorted(K.labels[s])) for s in K.states if K.labels[s]]
    return '\n'.join(lines) + '\n'
