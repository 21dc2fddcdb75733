from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

from qctl_utils.errors import LabelConflictError
from structures.kripke import LocalAlphabets, format_direction, obs_equiv_states

# ====================================================================
# Explicit truncated trees
# --------------------------------------------------------------------
# A node is the tuple of directions read from the root; the root node is
# the one-letter word (root,). Trees stop at ``depth``.

Node = tuple


@dataclass(frozen=True)
class FiniteLabelledTree:
    locals: LocalAlphabets
    index_set: tuple[int, ...]
    labels: dict[Node, frozenset[str]]
    depth: int

    def __post_init__(self):
        object.__setattr__(self, 'index_set', tuple(sorted(set(self.index_set))))
        object.__setattr__(self, 'labels', {u: frozenset(ls) for u, ls in self.labels.items()})
        if not self.labels:
            raise ValueError('A tree has at least a root')
        roots = {u[0] for u in self.labels}
        if len(roots) != 1:
            raise ValueError(f'Every node must start with the same root, got {sorted(roots)}')
        directions = set(self.locals.directions(self.index_set))
        for u in self.labels:
            if not u or any(d not in directions for d in u):
                raise ValueError(f'Node {u} is not a word over the directions of {list(self.index_set)}')
            if len(u) > 1 and u[:-1] not in self.labels:
                raise ValueError(f'Node {u} has no parent in the tree')
            if len(u) - 1 > self.depth:
                raise ValueError(f'Node {u} lies below the cutoff depth {self.depth}')

    @property
    def nodes(self) -> frozenset[Node]:
        return frozenset(self.labels)

    @property
    def root(self) -> tuple:
        return next(iter(self.labels))[0]

    @property
    def directions(self) -> list[tuple]:
        return self.locals.directions(self.index_set)

    def children(self, u: Node) -> list[Node]:
        return [u + (d,) for d in self.directions if u + (d,) in self.labels]

    def is_complete(self) -> bool:
        """Every node above the cutoff has a child."""
        return all(self.children(u) for u in self.labels if len(u) - 1 < self.depth)


def full_tree(locals: LocalAlphabets, I: Iterable[int], root: tuple, depth: int,
              labels: dict[Node, Iterable[str]] | None = None) -> FiniteLabelledTree:
    directions = locals.directions(I)
    nodes = {(root,): frozenset()}
    layer = [(root,)]
    for _ in range(depth):
        layer = [u + (d,) for u in layer for d in directions]
        nodes.update((u, frozenset()) for u in layer)
    for u, ls in (labels or {}).items():
        nodes[u] = frozenset(ls)
    return FiniteLabelledTree(locals, tuple(I), nodes, depth)


def project_tree(t: FiniteLabelledTree, J: Iterable[int]) -> FiniteLabelledTree:
    J = set(J)
    if not J <= set(t.index_set):
        raise ValueError(f'Cannot project a tree over {list(t.index_set)} onto {sorted(J)}')
    labels: dict[Node, frozenset[str]] = {}
    for u, ls in t.labels.items():
        image = tuple(t.locals.project(d, J) for d in u)
        if image in labels and labels[image] != ls:
            raise LabelConflictError(f'nodes merged into {dump_node(image)} carry different labels')
        labels[image] = ls
    return FiniteLabelledTree(t.locals, tuple(J), labels, t.depth)


def lift_tree(t: FiniteLabelledTree, I: Iterable[int], extra: tuple) -> FiniteLabelledTree:
    I, J = set(I), set(t.index_set)
    if not J <= I:
        raise ValueError(f'Cannot lift a tree over {sorted(J)} to {sorted(I)}')
    if set(t.locals.indices_of(extra)) != I - J:
        raise ValueError(f'Extra tuple {extra} does not range over {sorted(I - J)}')
    directions = t.locals.directions(I)

    def proj(u: Node) -> Node:
        return tuple(t.locals.project(d, J) for d in u)

    root = t.locals.combine(t.root, extra)
    labels = {(root,): t.labels[(t.root,)]}
    layer = [(root,)]
    for _ in range(t.depth):
        next_layer = []
        for u in layer:
            for d in directions:
                child = u + (d,)
                image = proj(child)
                if image in t.labels:
                    labels[child] = t.labels[image]
                    next_layer.append(child)
        layer = next_layer
    return FiniteLabelledTree(t.locals, tuple(I), labels, t.depth)


def merge_trees(t: FiniteLabelledTree, t2: FiniteLabelledTree) -> FiniteLabelledTree:
    if t.locals != t2.locals or t.index_set != t2.index_set:
        raise ValueError('Merged trees must share their direction set')
    labels = {u: ls | t2.labels[u] for u, ls in t.labels.items() if u in t2.labels}
    if not labels:
        raise ValueError('Merged trees must share their root')
    return FiniteLabelledTree(t.locals, t.index_set, labels, max(len(u) for u in labels) - 1)


def p_project(t: FiniteLabelledTree, p: str) -> FiniteLabelledTree:
    return FiniteLabelledTree(t.locals, t.index_set, {u: ls - {p} for u, ls in t.labels.items()}, t.depth)


def node_obs_equiv(u: Node, u2: Node, o, locals: LocalAlphabets) -> bool:
    return len(u) == len(u2) and all(obs_equiv_states(d, d2, o, locals) for d, d2 in zip(u, u2))


def is_tree_uniform(t: FiniteLabelledTree, p: str, o) -> bool:
    visible = set(t.index_set) & set(o)
    seen: dict[Node, bool] = {}
    for u, ls in t.labels.items():
        key = tuple(t.locals.project(d, visible) for d in u)
        if seen.setdefault(key, p in ls) != (p in ls):
            return False
    return True


def dump_node(u: Node) -> str:
    return '.'.join(format_direction(d) for d in u)


def dump_tree(t: FiniteLabelledTree) -> str:
    nodes = sorted(t.labels, key=lambda u: (len(u), dump_node(u)))
    return '\n'.join(f'node {dump_node(u)}: ' + ' '.join(sorted(t.labels[u])) for u in nodes) + '\n'


def tree_levels(t: FiniteLabelledTree) -> list[list[Node]]:
    by_depth = sorted(t.labels, key=len)
    return [list(group) for _, group in itertools.groupby(by_depth, key=len)]
