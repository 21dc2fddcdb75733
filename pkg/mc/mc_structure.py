from __future__ import annotations

import itertools

import networkx as nx

from automata.word_automata import ltl_to_nbw
from logic.analysis import free_props, ltl_skeleton, resolve_observations
from logic.formula import (
    And,
    AtomicProp,
    Constant,
    Exists,
    ExistsPath,
    Formula,
    Next,
    Not,
    Or,
    PathNot,
    StateEmbed,
    StateFormula,
    Until,
)
from mc.ctl_fixpoint import au_states, eu_states, pre_exists
from qctl_utils.logger import logger
from structures.kripke import CompoundKripkeStructure, is_uniform_labelling, obs_classes, with_labelling

# ====================================================================
# Structure semantics
# --------------------------------------------------------------------
# A quantifier ranges over the labellings of K that are constant on each
# observation class, which are exactly the o-uniform ones.


def _check_inputs(K: CompoundKripkeStructure, s: str | None, f: StateFormula) -> StateFormula:
    if s is not None:
        K.tuple_of(s)
    unknown = sorted(p for p in free_props(f) if not K.knows(p))
    if unknown:
        raise ValueError(f'Free propositions {unknown} are not atoms of the model')
    return resolve_observations(f, K.n)


class StructureChecker:
    """Memoised evaluator of state formulas on one structure."""

    def __init__(self, K: CompoundKripkeStructure):
        self.K = K
        self._memo: dict[Formula, frozenset[str]] = {}
        self.labellings = 0

    def states(self, f: StateFormula) -> frozenset[str]:
        if f not in self._memo:
            self._memo[f] = frozenset(self._evaluate(f))
        return self._memo[f]

    def _evaluate(self, f: StateFormula) -> set[str]:
        K = self.K
        match f:
            case AtomicProp(name):
                return {s for s in K.states if K.holds(s, name)}
            case Constant(value):
                return set(K.states) if value else set()
            case Not(g):
                return set(K.states) - self.states(g)
            case And(l, r):
                return self.states(l) & self.states(r)
            case Or(l, r):
                return self.states(l) | self.states(r)
            case ExistsPath(path):
                return self._exists_path(path)
            case Exists(p, observation, body):
                return self._exists_prop(p, observation, body)
        raise ValueError(f'Unsupported state formula: {f!r}')

    def _exists_prop(self, p: str, observation, body: StateFormula) -> set[str]:
        classes = obs_classes(self.K, observation)
        result = set()
        for choice in itertools.product((False, True), repeat=len(classes)):
            labelled = set().union(*(c for c, chosen in zip(classes, choice) if chosen))
            inner = StructureChecker(with_labelling(self.K, p, labelled))
            result |= inner.states(body)
            self.labellings += 1 + inner.labellings
            if len(result) == len(self.K.states):
                break
        return result

    def _exists_path(self, path) -> set[str]:
        """States with an outgoing path satisfying ``path``: Büchi product with K."""
        K = self.K
        skeleton, names = ltl_skeleton(path)
        holds = {name: self.states(phi) for name, phi in names.items()}
        nbw = ltl_to_nbw(skeleton, atoms=names)
        letter = {s: frozenset(name for name, sat in holds.items() if s in sat) for s in K.states}

        graph = nx.DiGraph()
        for s in K.states:
            for q in nbw.states:
                graph.add_node((s, q))
                for r in nbw.successors(q, letter[s]):
                    for t in K.successors(s):
                        graph.add_edge((s, q), (t, r))
        good = set()
        for scc in nx.strongly_connected_components(graph):
            looping = len(scc) > 1 or any(graph.has_edge(v, v) for v in scc)
            if looping and any(nbw.is_accepting(q) for _, q in scc):
                good |= scc
        for v in list(good):
            good |= nx.ancestors(graph, v)
        return {s for s in K.states if (s, nbw.initial) in good}


def check_structure_all(K: CompoundKripkeStructure, f: StateFormula) -> set[str]:
    f = _check_inputs(K, None, f)
    return set(StructureChecker(K).states(f))


def check_structure(K: CompoundKripkeStructure, s: str, f: StateFormula) -> bool:
    f = _check_inputs(K, s, f)
    checker = StructureChecker(K)
    verdict = s in checker.states(f)
    logger.debug(f'structure check at {s}: {checker.labellings} labellings explored')
    return verdict


# ====================================================================
# Brute-force oracle
# --------------------------------------------------------------------
# Every subset of S is tried as a labelling and kept when uniform. CTL
# path shapes go through the fixpoint helpers, so this shares no code
# with the automaton products above.


def _bruteforce_states(K: CompoundKripkeStructure, f: StateFormula) -> set[str]:
    everything = set(K.states)
    match f:
        case AtomicProp(name):
            return {s for s in K.states if K.holds(s, name)}
        case Constant(value):
            return everything if value else set()
        case Not(g):
            return everything - _bruteforce_states(K, g)
        case And(l, r):
            return _bruteforce_states(K, l) & _bruteforce_states(K, r)
        case Or(l, r):
            return _bruteforce_states(K, l) | _bruteforce_states(K, r)
        case ExistsPath(Next(StateEmbed(g))):
            return pre_exists(K, _bruteforce_states(K, g))
        case ExistsPath(Until(StateEmbed(l), StateEmbed(r))):
            return eu_states(K, _bruteforce_states(K, l), _bruteforce_states(K, r))
        case ExistsPath(PathNot(Next(StateEmbed(g)))):
            return pre_exists(K, everything - _bruteforce_states(K, g))
        case ExistsPath(PathNot(Until(StateEmbed(l), StateEmbed(r)))):
            return everything - au_states(K, _bruteforce_states(K, l), _bruteforce_states(K, r))
        case ExistsPath(_):
            return StructureChecker(K).states(f)
        case Exists(p, observation, body):
            result = set()
            names = K.state_names
            for k in range(len(names) + 1):
                for subset in itertools.combinations(names, k):
                    labelled = with_labelling(K, p, subset)
                    if is_uniform_labelling(labelled, p, observation):
                        result |= _bruteforce_states(labelled, body)
            return result
    raise ValueError(f'Unsupported state formula: {f!r}')


def check_bruteforce(K: CompoundKripkeStructure, s: str, f: StateFormula) -> bool:
    f = _check_inputs(K, s, f)
    return s in _bruteforce_states(K, f)
