import numpy as np
import pytest

from automata.pbf import TOP
from automata.tree_automata import full_regular_tree, membership
from cli.corpus import CURATED_CASES, load_corpus_model
from logic.formula import EF, EX, TRUE, And, AtomicProp, Exists, Observation, line
from logic.parser import parse_formula
from mc.mc_structure import check_structure
from mc.mc_tree import TreeChecker, build_automaton, check_tree
from qctl_utils.config import default_config
from qctl_utils.errors import HierarchyError, ResourceLimitExceeded
from qctl_utils.random_instances import random_ctl_star, random_kripke
from structures.kripke import with_labelling

p, q = AtomicProp('p'), AtomicProp('q')

# the line cases are covered by test_blind_line_holds_on_every_model
QUICK_CASES = [case for case in CURATED_CASES if not case.name.startswith('line_')]


@pytest.mark.parametrize('case', QUICK_CASES, ids=[case.name for case in QUICK_CASES])
def test_curated_cases(case):
    K = load_corpus_model(case.model)
    if case.semantics == 'tree':
        assert check_tree(K, case.state, case.parsed()) == case.expected, case.derivation
    else:
        assert check_structure(K, case.state, case.parsed()) == case.expected, case.derivation


@pytest.mark.parametrize('model, state', [('K0', 'u'), ('K1', 'w'), ('K2', 'x')])
def test_blind_line_holds_on_every_model(model, state):
    K = load_corpus_model(model)
    assert check_tree(K, state, Exists('q', Observation(()), line('q')))


def test_parsed_blind_quantifier_verdicts():
    K = load_corpus_model('K0')
    split = parse_formula('exists q^{}. (E X q & E X !q)')
    assert split.observation == Observation(())
    assert not check_tree(K, 'u', split)
    assert check_tree(K, 'u', parse_formula('exists q^{1}. (E X q & E X !q)'))
    assert check_tree(K, 'u', parse_formula('exists q^{}. (q & E X !q)'))
    assert not check_structure(K, 'u', parse_formula('exists q^{}. (q & E X !q)'))


def test_free_proposition_automaton():
    K = load_corpus_model('K0')
    a = build_automaton(p, K, 'v')
    assert len(a) == 1 and a.delta(a.initial, ()) == TOP
    assert a.is_top(a.initial)
    assert build_automaton(p, K, 'u').delta(0, ()) != TOP


def test_quantified_proposition_reads_the_root():
    K = load_corpus_model('K0')
    checker = TreeChecker(K, Exists('q', Observation.of(1), q))
    name = checker.formula.prop
    a = checker.build_automaton(AtomicProp(name), 'u')
    assert a.directions == [('l1',), ('l2',)]
    assert membership(a, full_regular_tree(K.locals, (1,), ('l1',), [name]))
    assert not membership(a, full_regular_tree(K.locals, (1,), ('l1',)))


def test_exists_automaton_lives_on_the_observation():
    K = load_corpus_model('K2')
    checker = TreeChecker(K, parse_formula('exists q^{1}. E X q'))
    assert checker.build_automaton(checker.formula, 'x').index_set == (1,)
    assert checker.index_set(checker.formula.body) == (1, 2)


@pytest.mark.parametrize('labelled', [[], ['u'], ['v'], ['u', 'v']])
def test_next_over_every_labelling(labelled):
    K = with_labelling(load_corpus_model('K0'), 'p', labelled)
    expected = any('p' in K.labels[t] for t in K.successors('u'))
    assert check_tree(K, 'u', EX(p)) == expected
    assert check_structure(K, 'u', EX(p)) == expected


def test_hierarchy_gate():
    K = load_corpus_model('K2')
    bad = Exists('p', Observation.of(1, 2), Exists('q', Observation.of(1), EF(And(p, q))))
    with pytest.raises(HierarchyError) as info:
        TreeChecker(K, bad)
    assert (info.value.outer, info.value.inner) == (Observation.of(1, 2), Observation.of(1))
    TreeChecker(K, Exists('p', Observation.of(1), Exists('q', Observation.of(1, 2), EF(And(p, q)))))
    # coordinate 3 does not exist in K0
    TreeChecker(load_corpus_model('K0'), Exists('p', Observation.of(1, 3), Exists('q', Observation.of(1), And(EX(p), EX(q)))))


def test_input_errors():
    K = load_corpus_model('K0')
    with pytest.raises(ValueError):
        check_tree(K, 'u', EX(AtomicProp('r')))
    with pytest.raises(ValueError):
        check_tree(K, 'nowhere', EX(p))


def test_resource_guards():
    K = load_corpus_model('K0')
    deep = Exists('a', Observation(()), Exists('b', Observation(()), Exists('c', Observation(()), TRUE)))
    with pytest.raises(ResourceLimitExceeded):
        TreeChecker(K, deep)
    cfg = default_config()
    cfg.resources.max_nta_states = 1
    with pytest.raises(ResourceLimitExceeded):
        check_tree(K, 'u', Exists('q', Observation.of(1), EX(q)), cfg)


def test_quantifier_free_formulas_are_unfolding_invariant():
    rng = np.random.default_rng(14)
    for _ in range(15):
        K = random_kripke(rng, states_max=4)
        s = K.state_names[int(rng.integers(len(K.state_names)))]
        f = random_ctl_star(rng, ('p', 'r'), depth=2)
        assert check_tree(K, s, f) == check_structure(K, s, f)


def test_stats_and_dump(tmp_path):
    K = load_corpus_model('K0')
    checker = TreeChecker(K, EX(p), dump_dir=str(tmp_path / 'automata'))
    assert checker.check('u')
    assert checker.stats['automata'] >= 2
    assert checker.stats['game_positions'] > 0
    files = sorted((tmp_path / 'automata').iterdir())
    assert len(files) == checker.stats['automata']
    assert files[-1].read_text().startswith('# formula: E X p\n# state: u\n')
