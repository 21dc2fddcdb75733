from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

# ====================================================================
# Observations
# --------------------------------------------------------------------


@dataclass(frozen=True)
class Observation:
    """Set of local-state coordinates a quantifier can see.

    ``full`` marks the plain quantifier ``exists p.`` whose observation is
    every coordinate of the model; it is resolved once ``n`` is known.
    """
    indices: tuple[int, ...] = ()
    full: bool = False

    def __post_init__(self):
        indices = tuple(sorted(set(int(i) for i in self.indices)))
        if any(i < 1 for i in indices):
            raise ValueError(f'Observation indices start at 1, got {indices}')
        if self.full and indices:
            raise ValueError('A full observation carries no explicit indices')
        object.__setattr__(self, 'indices', indices)

    @classmethod
    def of(cls, *indices: int) -> Observation:
        return cls(tuple(indices))

    @classmethod
    def everything(cls) -> Observation:
        return cls((), full=True)

    def resolve(self, n: int) -> Observation:
        return Observation(tuple(range(1, n + 1))) if self.full else self

    def restrict(self, n: int) -> Observation:
        return Observation(tuple(i for i in self.resolve(n).indices if i <= n))

    def issubset(self, other: Observation) -> bool:
        if other.full:
            return True
        if self.full:
            return False
        return set(self.indices) <= set(other.indices)

    def __len__(self):
        return len(self.indices)

    def __bool__(self):
        # an empty observation is still an observation
        return True

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __str__(self):
        if self.full:
            return '[n]'
        return '{' + ','.join(str(i) for i in self.indices) + '}'


# ====================================================================
# Formula AST
# --------------------------------------------------------------------


class Formula:
    pass


class StateFormula(Formula):
    pass


class PathFormula(Formula):
    pass


@dataclass(frozen=True)
class AtomicProp(StateFormula):
    name: str


@dataclass(frozen=True)
class Constant(StateFormula):
    value: bool


@dataclass(frozen=True)
class Not(StateFormula):
    operand: StateFormula


@dataclass(frozen=True)
class And(StateFormula):
    left: StateFormula
    right: StateFormula


@dataclass(frozen=True)
class Or(StateFormula):
    left: StateFormula
    right: StateFormula


@dataclass(frozen=True)
class ExistsPath(StateFormula):
    path: PathFormula


@dataclass(frozen=True)
class Exists(StateFormula):
    prop: str
    observation: Observation
    body: StateFormula = field(compare=True)


@dataclass(frozen=True)
class StateEmbed(PathFormula):
    formula: StateFormula


@dataclass(frozen=True)
class PathNot(PathFormula):
    operand: PathFormula


@dataclass(frozen=True)
class PathAnd(PathFormula):
    left: PathFormula
    right: PathFormula


@dataclass(frozen=True)
class PathOr(PathFormula):
    left: PathFormula
    right: PathFormula


@dataclass(frozen=True)
class Next(PathFormula):
    operand: PathFormula


@dataclass(frozen=True)
class Until(PathFormula):
    left: PathFormula
    right: PathFormula


TRUE = Constant(True)
FALSE = Constant(False)


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (AtomicProp, Constant)):
        return ()
    if isinstance(f, (Not, PathNot, Next)):
        return (f.operand,)
    if isinstance(f, (And, Or, PathAnd, PathOr, Until)):
        return f.left, f.right
    if isinstance(f, ExistsPath):
        return (f.path,)
    if isinstance(f, Exists):
        return (f.body,)
    if isinstance(f, StateEmbed):
        return (f.formula,)
    raise ValueError(f'Unsupported formula node: {f!r}')


def map_children(f: Formula, fn: Callable[[Formula], Formula]) -> Formula:
    """Rebuild ``f`` with ``fn`` applied to each direct child."""
    if isinstance(f, (AtomicProp, Constant)):
        return f
    if isinstance(f, (Not, PathNot, Next)):
        return type(f)(fn(f.operand))
    if isinstance(f, (And, Or, PathAnd, PathOr, Until)):
        return type(f)(fn(f.left), fn(f.right))
    if isinstance(f, ExistsPath):
        return ExistsPath(fn(f.path))
    if isinstance(f, Exists):
        return Exists(f.prop, f.observation, fn(f.body))
    if isinstance(f, StateEmbed):
        return StateEmbed(fn(f.formula))
    raise ValueError(f'Unsupported formula node: {f!r}')


def walk(f: Formula) -> Iterator[Formula]:
    """Pre-order traversal over every node of ``f``."""
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


# ====================================================================
# Smart constructors
# --------------------------------------------------------------------
# Paths without temporal operators are kept as a single StateEmbed, so
# every formula has one canonical AST.


def embed(f: Formula) -> PathFormula:
    return StateEmbed(f) if isinstance(f, StateFormula) else f


def neg(f: StateFormula) -> StateFormula:
    """Negation that cancels an existing negation."""
    return f.operand if isinstance(f, Not) else Not(f)


def path_not(psi: Formula, cancel: bool = False) -> PathFormula:
    psi = embed(psi)
    if isinstance(psi, StateEmbed):
        inner = neg(psi.formula) if cancel else Not(psi.formula)
        return StateEmbed(inner)
    if cancel and isinstance(psi, PathNot):
        return psi.operand
    return PathNot(psi)


def path_and(left: Formula, right: Formula) -> PathFormula:
    left, right = embed(left), embed(right)
    if isinstance(left, StateEmbed) and isinstance(right, StateEmbed):
        return StateEmbed(And(left.formula, right.formula))
    return PathAnd(left, right)


def path_or(left: Formula, right: Formula) -> PathFormula:
    left, right = embed(left), embed(right)
    if isinstance(left, StateEmbed) and isinstance(right, StateEmbed):
        return StateEmbed(Or(left.formula, right.formula))
    return PathOr(left, right)


def path_implies(left: Formula, right: Formula) -> PathFormula:
    return path_or(path_not(left, cancel=True), right)


def future(psi: Formula) -> PathFormula:
    return Until(StateEmbed(TRUE), embed(psi))


def globally(psi: Formula) -> PathFormula:
    return path_not(future(path_not(psi, cancel=True)), cancel=True)


def exists_path(psi: Formula) -> StateFormula:
    return ExistsPath(embed(psi))


def forall_path(psi: Formula) -> StateFormula:
    return neg(ExistsPath(path_not(psi, cancel=True)))


def implies(left: StateFormula, right: StateFormula) -> StateFormula:
    return Or(neg(left), right)


def conjunction(items: Iterable[StateFormula]) -> StateFormula:
    items = list(items)
    if not items:
        return TRUE
    result = items[-1]
    for item in reversed(items[:-1]):
        result = And(item, result)
    return result


def disjunction(items: Iterable[StateFormula]) -> StateFormula:
    items = list(items)
    if not items:
        return FALSE
    result = items[-1]
    for item in reversed(items[:-1]):
        result = Or(item, result)
    return result


def EX(f: StateFormula) -> StateFormula:
    return exists_path(Next(embed(f)))


def AX(f: StateFormula) -> StateFormula:
    return forall_path(Next(embed(f)))


def EF(f: StateFormula) -> StateFormula:
    return exists_path(future(f))


def AF(f: StateFormula) -> StateFormula:
    return forall_path(future(f))


def EG(f: StateFormula) -> StateFormula:
    return exists_path(globally(f))


def AG(f: StateFormula) -> StateFormula:
    return forall_path(globally(f))


def EU(left: StateFormula, right: StateFormula) -> StateFormula:
    return exists_path(Until(embed(left), embed(right)))


def AU(left: StateFormula, right: StateFormula) -> StateFormula:
    return forall_path(Until(embed(left), embed(right)))


# ====================================================================
# Gadgets
# --------------------------------------------------------------------


def line(p: str) -> StateFormula:
    """Exactly one node labelled ``p`` on every path."""
    q = AtomicProp(p)
    return And(AF(q), AG(implies(q, AX(AG(neg(q))))))


def uniq(p: str, witness: str = 'uniq_q') -> StateFormula:
    """Exactly one node labelled ``p`` in the whole tree."""
    q, r = AtomicProp(p), AtomicProp(witness)
    return And(EF(q), Exists(witness, Observation.everything(), implies(EF(And(q, r)), AG(implies(q, r)))))


# ====================================================================
# Pretty printer
# --------------------------------------------------------------------

KEYWORDS = frozenset({'true', 'false', 'exists', 'E', 'A', 'X', 'F', 'G', 'U'})
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")
_ESCAPES = {'\\': '\\\\', '"': '\\"', '\n': '\\n', '\t': '\\t'}


def format_prop(name: str) -> str:
    if _IDENT.match(name) and name not in KEYWORDS:
        return name
    return '"' + ''.join(_ESCAPES.get(c, c) for c in name) + '"'


def _is_tight(f: Formula) -> bool:
    if isinstance(f, StateEmbed):
        return _is_tight(f.formula)
    return isinstance(f, (AtomicProp, Constant, Not, PathNot, Next, ExistsPath))


def _wrap(f: Formula) -> str:
    text = pretty_print(f)
    return text if _is_tight(f) else f'({text})'


def pretty_print(f: Formula) -> str:
    if isinstance(f, AtomicProp):
        return format_prop(f.name)
    if isinstance(f, Constant):
        return 'true' if f.value else 'false'
    if isinstance(f, StateEmbed):
        return pretty_print(f.formula)
    if isinstance(f, (Not, PathNot)):
        return f'!{_wrap(f.operand)}'
    if isinstance(f, (And, PathAnd)):
        return f'{_wrap(f.left)} & {_wrap(f.right)}'
    if isinstance(f, (Or, PathOr)):
        return f'{_wrap(f.left)} | {_wrap(f.right)}'
    if isinstance(f, Until):
        return f'{_wrap(f.left)} U {_wrap(f.right)}'
    if isinstance(f, Next):
        return f'X {_wrap(f.operand)}'
    if isinstance(f, ExistsPath):
        return f'E {_wrap(f.path)}'
    if isinstance(f, Exists):
        obs = '' if f.observation.full else '^{' + ','.join(str(i) for i in f.observation) + '}'
        return f'exists {format_prop(f.prop)}{obs}. {pretty_print(f.body)}'
    raise ValueError(f'Unsupported formula node: {f!r}')
