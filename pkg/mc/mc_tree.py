from __future__ import annotations

import threading
import time
from pathlib import Path

from omegaconf import DictConfig

from automata.pbf import BOTTOM, TOP, Atom, conj, conj_all, disj_all
from automata.tree_automata import (
    AlternatingTreeAutomaton,
    SimulationLimits,
    accept_all,
    combine,
    dualize,
    dump_automaton,
    full_regular_tree,
    membership_game,
    narrow,
    project,
    reject_all,
    relabel,
    simulate,
    trim,
    union,
)
from automata.word_automata import all_letters, ltl_to_nbw
from games.parity import Player, solve_zielonka
from logic.analysis import (
    free_props,
    hierarchy_violation,
    ltl_skeleton,
    obs_intersection,
    quantifier_depth,
    rename_apart,
    resolve_observations,
    restrict_observations,
)
from logic.formula import And, AtomicProp, Constant, Exists, ExistsPath, Not, Or, StateFormula, pretty_print
from qctl_utils.config import default_config
from qctl_utils.errors import HierarchyError, ResourceLimitExceeded
from qctl_utils.logger import logger
from structures.kripke import CompoundKripkeStructure

# ====================================================================
# Tree semantics
# --------------------------------------------------------------------
# For every subformula phi and state s the checker builds an automaton on
# Λ_{I_phi}-trees rooted at proj(s) whose labels carry the quantified
# propositions. The formula holds iff the top automaton accepts the full
# tree with the empty labelling.


class TreeChecker:
    def __init__(self, K: CompoundKripkeStructure, Phi: StateFormula, cfg: DictConfig | None = None,
                 dump_dir: str | None = None):
        cfg = cfg if cfg is not None else default_config()
        self.K = K
        self.cfg = cfg
        n = K.n

        violation = hierarchy_violation(Phi, n)
        if violation is not None:
            raise HierarchyError(*violation)
        unknown = sorted(p for p in free_props(Phi) if not K.knows(p))
        if unknown:
            raise ValueError(f'Free propositions {unknown} are not atoms of the model')
        phi = restrict_observations(resolve_observations(Phi, n), n)
        max_depth = cfg.resources.max_quantifier_depth
        if quantifier_depth(phi) > max_depth:
            raise ResourceLimitExceeded('quantifier nesting depth', max_depth)

        self.formula, self.props = rename_apart(phi)
        self.limits = SimulationLimits(
            max_nta_states=cfg.resources.max_nta_states,
            max_safra_states=cfg.resources.max_safra_states,
            max_annotation_choices=cfg.resources.max_annotation_choices,
        )
        self.max_game_positions = cfg.resources.max_game_positions
        self.dump_dir = Path(dump_dir) if dump_dir else None
        if self.dump_dir is not None:
            self.dump_dir.mkdir(parents=True, exist_ok=True)

        self._memo: dict[tuple[StateFormula, str], AlternatingTreeAutomaton] = {}
        self._lock = threading.Lock()
        self.stats = {
            'automata': 0,
            'largest_automaton': 0,
            'largest_simulation': 0,
            'game_positions': 0,
            'wall_time': 0.0,
        }

    def index_set(self, phi: StateFormula) -> tuple[int, ...]:
        return obs_intersection(phi, self.K.n).indices

    # ----------------------------------------------------------------
    # Automaton construction

    def build_automaton(self, phi: StateFormula, s: str) -> AlternatingTreeAutomaton:
        self.K.tuple_of(s)
        key = (phi, s)
        with self._lock:
            if key in self._memo:
                return self._memo[key]
        a = self._build(phi, s)
        with self._lock:
            if key not in self._memo:
                self._memo[key] = a
                self.stats['automata'] += 1
                self.stats['largest_automaton'] = max(self.stats['largest_automaton'], len(a))
                self._dump(phi, s, a)
            return self._memo[key]

    def _build(self, phi: StateFormula, s: str) -> AlternatingTreeAutomaton:
        K, I = self.K, self.index_set(phi)
        match phi:
            case AtomicProp(p) if p in self.props.quantified:
                table = {(0, frozenset()): BOTTOM, (0, frozenset({p})): TOP}
                return AlternatingTreeAutomaton(K.locals, I, {p}, [0], 0, table, {0: 0})
            case AtomicProp(p):
                return accept_all(K.locals, I) if K.holds(s, p) else reject_all(K.locals, I)
            case Constant(value):
                return accept_all(K.locals, I) if value else reject_all(K.locals, I)
            case Not(g):
                return dualize(self.build_automaton(g, s))
            case Or(l, r):
                return union(narrow(self.build_automaton(l, s), I), narrow(self.build_automaton(r, s), I))
            case And(l, r):
                return combine(narrow(self.build_automaton(l, s), I), narrow(self.build_automaton(r, s), I), conj)
            case ExistsPath(path):
                return self._exists_path(path, s, I)
            case Exists(p, _, body):
                nta = simulate(narrow(self.build_automaton(body, s), I), self.limits)
                with self._lock:
                    self.stats['largest_simulation'] = max(self.stats['largest_simulation'], len(nta))
                return trim(project(nta, p))
        raise ValueError(f'Unsupported state formula: {phi!r}')

    def _exists_path(self, path, s: str, I: tuple[int, ...]) -> AlternatingTreeAutomaton:
        """Guess a path of K inside the tree and check the LTL skeleton along it.

        Product states (q, s') never accept at a missing child. At each node
        the automaton guesses which maximal subformulas hold and starts the
        corresponding child automaton, or its dual, at that node.
        """
        K = self.K
        skeleton, names = ltl_skeleton(path)
        nbw = ltl_to_nbw(skeleton, atoms=names)
        ordered = sorted(names)

        children: dict[tuple[str, str, bool], AlternatingTreeAutomaton] = {}
        for name in ordered:
            for t in K.states:
                positive = narrow(self.build_automaton(names[name], t), I)
                children[(name, t, True)] = relabel(positive, lambda q, tag=(name, t, True): ('child', tag, q))
                children[(name, t, False)] = relabel(dualize(positive), lambda q, tag=(name, t, False): ('child', tag, q))
        atoms = frozenset().union(*(c.atoms for c in children.values()))
        letters = all_letters(atoms)
        guesses = all_letters(ordered)

        def product(q, t):
            return ('product', q, t)

        table, colours = {}, {}
        states = [product(q, t) for q in nbw.states for t in K.states]
        for q in nbw.states:
            for t in K.states:
                colours[product(q, t)] = nbw.colour(q)
                moves = {
                    guess: disj_all(Atom(K.locals.project(K.states[u], I), product(r, u))
                                    for r in nbw.successors(q, guess) for u in K.successors(t))
                    for guess in guesses
                }
                for letter in letters:
                    options = []
                    for guess in guesses:
                        checks = [children[(name, t, name in guess)] for name in ordered]
                        options.append(conj_all([moves[guess]] + [c.delta(c.initial, letter) for c in checks]))
                    table[(product(q, t), letter)] = disj_all(options)
        for child in children.values():
            states.extend(child.states)
            colours.update(child.colours)
            for q in child.states:
                for letter in letters:
                    table[(q, letter)] = child.delta(q, letter)
        top = frozenset().union(*(c.top_states for c in children.values()))
        a = AlternatingTreeAutomaton(K.locals, I, atoms, states, product(nbw.initial, s), table, colours, top)
        return trim(a)

    # ----------------------------------------------------------------
    # Final check

    def check(self, s: str) -> bool:
        start = time.time()
        K = self.K
        a = self.build_automaton(self.formula, s)
        I = self.index_set(self.formula)
        tree = full_regular_tree(K.locals, I, K.locals.project(K.states[s], I))
        game = membership_game(a, tree, max_positions=self.max_game_positions)
        solution = solve_zielonka(game)
        self.stats['game_positions'] = len(game)
        self.stats['wall_time'] = time.time() - start
        logger.debug(f'tree check at {s}: automaton of {len(a)} states, game of {len(game)} positions')
        return solution.winner[game.initial] == Player.EVE

    def _dump(self, phi: StateFormula, s: str, a: AlternatingTreeAutomaton) -> None:
        if self.dump_dir is None:
            return
        path = self.dump_dir / f'{self.stats["automata"]:04d}_{s}.txt'
        with open(path, 'w') as f:
            f.write(f'# formula: {pretty_print(phi)}\n# state: {s}\n')
            f.write(dump_automaton(a))


def build_automaton(Phi: StateFormula, K: CompoundKripkeStructure, s: str, phi: StateFormula | None = None,
                    cfg: DictConfig | None = None) -> AlternatingTreeAutomaton:
    """Automaton for ``phi`` (``Phi`` itself by default) at state s.

    ``phi`` is taken as a subformula of the renamed-apart form of ``Phi``.
    """
    checker = TreeChecker(K, Phi, cfg)
    return checker.build_automaton(checker.formula if phi is None else phi, s)


def check_tree(K: CompoundKripkeStructure, s: str, Phi: StateFormula, cfg: DictConfig | None = None,
               dump_dir: str | None = None) -> bool:
    K.tuple_of(s)
    return TreeChecker(K, Phi, cfg, dump_dir).check(s)
