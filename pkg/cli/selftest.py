from __future__ import annotations

import time
from typing import Callable

import numpy as np
import tqdm
from omegaconf import DictConfig

from automata.safra import dpw_accepts_lasso, safra_determinise
from automata.tree_automata import (
    dualize,
    is_nondeterministic,
    lift_regular_tree,
    membership,
    narrow,
    project,
    simulate,
    with_vertex_labels,
)
from automata.word_automata import ltl_eval_lasso, ltl_to_nbw, nbw_accepts_lasso
from cli.corpus import CURATED_CASES, load_corpus_model
from games.parity import solve_bruteforce, solve_zielonka, verify_strategy
from logic.analysis import formula_size, hierarchy_violation
from logic.transs import translate_structural
from mc.mc_structure import check_bruteforce, check_structure
from mc.mc_tree import TreeChecker, check_tree
from qctl_utils.errors import HierarchyError
from qctl_utils.logger import logger
from qctl_utils.random_instances import (
    random_ata,
    random_ctl_star,
    random_formula,
    random_graph_labellings,
    random_kripke,
    random_lasso,
    random_locals,
    random_ltl,
    random_nonhierarchical,
    random_nta,
    random_parity_game,
    random_regular_tree,
)
from structures.kripke import LocalAlphabets

# ====================================================================
# Acceptance suites
# --------------------------------------------------------------------
# Each suite yields one boolean per instance; `run_suites` counts them.

TRANSS_SIZE_FACTOR = 40


def _random_state(rng: np.random.Generator, K) -> str:
    names = K.state_names
    return names[int(rng.integers(len(names)))]


def suite_structure(cfg: DictConfig, rng: np.random.Generator):
    for _ in range(cfg.selftest.structure_instances):
        K = random_kripke(rng)
        s = _random_state(rng, K)
        f = random_formula(rng, ('p', 'r'), n=K.n, depth=3, max_quantifiers=2)
        yield check_structure(K, s, f) == check_bruteforce(K, s, f)


def suite_transs(cfg: DictConfig, rng: np.random.Generator):
    for _ in range(cfg.selftest.transs_instances):
        K = random_kripke(rng)
        s = _random_state(rng, K)
        f = random_formula(rng, ('p', 'r'), n=K.n, depth=3, max_quantifiers=1)
        translated = translate_structural(f, K.locals)
        m = max(len(a) for a in K.locals.alphabets)
        within = formula_size(translated, K.n) <= TRANSS_SIZE_FACTOR * K.n * m ** K.n * formula_size(f, K.n)
        yield within and check_structure(K, s, f) == check_structure(K, s, translated)


def suite_unfolding(cfg: DictConfig, rng: np.random.Generator):
    for _ in range(cfg.selftest.unfolding_instances):
        K = random_kripke(rng, states_max=4)
        s = _random_state(rng, K)
        f = random_ctl_star(rng, ('p', 'r'), depth=2)
        yield check_tree(K, s, f, cfg) == check_structure(K, s, f)


def suite_dualize(cfg: DictConfig, rng: np.random.Generator):
    for _ in range(cfg.selftest.dualize_pairs):
        locals = random_locals(rng, n_max=1)
        a = random_ata(rng, locals, locals.coordinates)
        t = random_regular_tree(rng, locals, locals.coordinates)
        yield membership(dualize(a), t) != membership(a, t)


def suite_narrow(cfg: DictConfig, rng: np.random.Generator):
    locals = LocalAlphabets((('a', 'b'), ('c', 'd')))
    for _ in range(cfg.selftest.narrow_triples):
        J = (1,) if rng.random() < 0.5 else (2,)
        rest = tuple(i for i in (1, 2) if i not in J)
        a = random_ata(rng, locals, (1, 2))
        t = random_regular_tree(rng, locals, J)
        extras = locals.directions(rest)
        e = extras[int(rng.integers(len(extras)))]
        yield membership(narrow(a, J), t) == membership(a, lift_regular_tree(t, (1, 2), e))


def suite_simulate(cfg: DictConfig, rng: np.random.Generator):
    for _ in range(cfg.selftest.simulate_pairs):
        locals = random_locals(rng, n_max=1)
        a = random_ata(rng, locals, locals.coordinates, max_states=3, max_colour=2)
        nta = simulate(a)
        trees = [random_regular_tree(rng, locals, locals.coordinates) for _ in range(3)]
        yield is_nondeterministic(nta) and all(membership(nta, t) == membership(a, t) for t in trees)


def suite_projection(cfg: DictConfig, rng: np.random.Generator):
    for _ in range(cfg.selftest.projection_graphs):
        locals = random_locals(rng, n_max=1)
        nta = random_nta(rng, locals, locals.coordinates)
        projected = project(nta, 'p')
        t = random_regular_tree(rng, locals, locals.coordinates)
        some = any(membership(nta, with_vertex_labels(t, labels)) for labels in random_graph_labellings(t, 'p'))
        yield not some or membership(projected, t)


def suite_parity(cfg: DictConfig, rng: np.random.Generator):
    for _ in range(cfg.selftest.parity_games):
        g = random_parity_game(rng)
        solution = solve_zielonka(g)
        yield solution.winner == solve_bruteforce(g) and verify_strategy(g, solution)


def suite_ltl(cfg: DictConfig, rng: np.random.Generator):
    atoms = ('a', 'b')
    for _ in range(cfg.selftest.ltl_formulas):
        psi = random_ltl(rng, atoms, size=int(rng.integers(1, 7)))
        nbw = ltl_to_nbw(psi, atoms)
        dpw = safra_determinise(nbw)
        agree = True
        for _ in range(cfg.selftest.lassos_per_formula):
            w = random_lasso(rng, atoms)
            expected = ltl_eval_lasso(psi, w, atoms)
            agree &= nbw_accepts_lasso(nbw, w) == expected and dpw_accepts_lasso(dpw, w) == expected
        yield agree


def suite_hierarchy(cfg: DictConfig, rng: np.random.Generator):
    K = load_corpus_model('K2')
    for _ in range(cfg.selftest.hierarchy_formulas):
        f = random_nonhierarchical(rng, ('p',), n=K.n)
        try:
            TreeChecker(K, f, cfg)
        except HierarchyError as e:
            yield (e.outer, e.inner) == hierarchy_violation(f, K.n)
        else:
            yield False


def suite_curated(cfg: DictConfig, rng: np.random.Generator):
    for case in CURATED_CASES:
        K = load_corpus_model(case.model)
        if case.semantics == "tree":
            verdict = check_tree(K, case.state, case.parsed(), cfg)
        else:
            verdict = check_structure(K, case.state, case.parsed())
        if verdict != case.expected:
            logger.warning(f'curated case {case.name} failed: {case.derivation}')
        yield verdict == case.expected


SUITES: dict[str, Callable] = {
    'structure': suite_structure,
    'transs': suite_transs,
    'unfolding': suite_unfolding,
    'curated': suite_curated,
    'dualize': suite_dualize,
    'narrow': suite_narrow,
    'simulate': suite_simulate,
    'projection': suite_projection,
    'parity': suite_parity,
    'ltl': suite_ltl,
    'hierarchy': suite_hierarchy,
}


def run_suites(names: list[str], cfg: DictConfig) -> bool:
    unknown = [name for name in names if name not in SUITES]
    if unknown:
        raise NotImplementedError(f'Available suites are {list(SUITES)}, got {unknown}')
    all_passed = True
    for name in names or list(SUITES):
        rng = np.random.default_rng(cfg.selftest.seed)
        start = time.time()
        passed = total = 0
        pbar = tqdm.tqdm(SUITES[name](cfg, rng), desc=name)
        for ok in pbar:
            total += 1
            passed += int(ok)
            pbar.set_postfix({'passed': passed, 'failed': total - passed})
        pbar.close()
        logger.info(f'{name}: {passed}/{total} passed in {time.time() - start:.2f}s')
        all_passed &= passed == total
    return all_passed
