import numpy as np
import pytest

from automata.pbf import (
    BOTTOM,
    TOP,
    Atom,
    conj,
    disj,
    dnf,
    dual,
    evaluate,
    format_pbf,
    minimal_models,
)
from automata.tree_automata import (
    AlternatingTreeAutomaton,
    NondeterministicTreeAutomaton,
    RegularTree,
    SimulationLimits,
    accept_all,
    combine,
    dualize,
    dump_automaton,
    full_regular_tree,
    is_nondeterministic,
    lift_regular_tree,
    membership,
    membership_game,
    narrow,
    project,
    reject_all,
    simulate,
    trim,
    unfolding_regular_tree,
    union,
    with_vertex_labels,
)
from automata.word_automata import all_letters
from cli.corpus import load_corpus_model
from qctl_utils.errors import AutomatonShapeError, ResourceLimitExceeded
from qctl_utils.random_instances import random_ata, random_graph_labellings, random_nta, random_regular_tree
from structures.kripke import LocalAlphabets

L1 = LocalAlphabets((('a', 'b'),))
L2 = LocalAlphabets((('a', 'b'), ('c', 'd')))
DA, DB = ('a',), ('b',)
P = frozenset({'p'})


def root_has_p(locals=L1, I=(1,)):
    table = {(0, frozenset()): BOTTOM, (0, P): TOP}
    return AlternatingTreeAutomaton(locals, I, P, [0], 0, table, {0: 0})


def always_p(locals=L1, I=(1,), top=()):
    every = conj(*(Atom(d, 0) for d in locals.directions(I)))
    table = {(0, frozenset()): BOTTOM, (0, P): every}
    return AlternatingTreeAutomaton(locals, I, P, [0], 0, table, {0: 0}, frozenset(top))


def next_p():
    step = disj(Atom(DA, 1), Atom(DB, 1))
    table = {(0, frozenset()): step, (0, P): step, (1, frozenset()): BOTTOM, (1, P): TOP}
    return AlternatingTreeAutomaton(L1, (1,), P, [0, 1], 0, table, {0: 1, 1: 1})


def two_vertices(label_root=(), label_other=('p',)):
    # 0 -a-> 1, 0 -b-> 0, 1 -> 1
    return RegularTree(L1, (1,), {0: {DA: 1, DB: 0}, 1: {DA: 1, DB: 1}},
                       {0: label_root, 1: label_other}, 0, DA)


def test_pbf_connectives():
    x, y = Atom(DA, 0), Atom(DB, 1)
    assert conj() == TOP and disj() == BOTTOM
    assert conj(x, TOP) == x and conj(x, BOTTOM) == BOTTOM
    assert disj(x, TOP) == TOP
    assert dual(conj(x, disj(x, y))) == disj(x, conj(x, y))
    assert dnf(conj(x, disj(x, y))) == {frozenset({x}), frozenset({x, y})}
    assert minimal_models(conj(x, disj(x, y))) == [frozenset({x})]
    assert minimal_models(BOTTOM) == []
    assert evaluate(disj(x, y), {y}) and not evaluate(conj(x, y), {y})
    assert format_pbf(TOP) == 'true' and format_pbf(BOTTOM) == 'false'
    assert format_pbf(x) == '[(\'a\',), 0]'


def test_constant_automata():
    t = full_regular_tree(L1, (1,), DA)
    assert membership(accept_all(L1, (1,)), t)
    assert not membership(reject_all(L1, (1,)), t)
    assert reject_all(L1, (1,)).top_states == frozenset()


def test_membership_examples():
    assert membership(root_has_p(), full_regular_tree(L1, (1,), DA, ['p']))
    assert not membership(root_has_p(), full_regular_tree(L1, (1,), DA))
    assert membership(always_p(), full_regular_tree(L1, (1,), DA, ['p']))
    assert not membership(always_p(), two_vertices(label_root=('p',), label_other=()))
    assert membership(next_p(), two_vertices())
    assert not membership(next_p(), two_vertices(label_other=()))
    assert membership(next_p(), two_vertices(), start=1)


def test_missing_child_follows_top_states():
    t = RegularTree(L1, (1,), {0: {DA: 0}}, {0: {'p'}}, 0, DA)
    assert not membership(always_p(), t)
    assert membership(always_p(top=[0]), t)


def test_membership_rejects_other_directions():
    with pytest.raises(AutomatonShapeError):
        membership(always_p(L2, (1, 2)), full_regular_tree(L1, (1,), DA))


def test_membership_game_shape():
    game = membership_game(next_p(), two_vertices())
    assert game.names[game.initial] == (0, 0, disj(Atom(DA, 1), Atom(DB, 1)))
    with pytest.raises(ResourceLimitExceeded):
        membership_game(next_p(), two_vertices(), max_positions=2)


def test_dualize_complements():
    trees = [two_vertices(), two_vertices(label_other=()), two_vertices(label_root=('p',)),
             full_regular_tree(L1, (1,), DB, ['p'])]
    for a in (root_has_p(), always_p(), next_p(), always_p(top=[0])):
        d = dualize(a)
        assert d.top_states == frozenset(a.states) - a.top_states
        for t in trees:
            assert membership(d, t) != membership(a, t)


def test_dualize_random():
    rng = np.random.default_rng(3)
    for _ in range(30):
        a = random_ata(rng, L1, (1,))
        t = random_regular_tree(rng, L1, (1,))
        assert membership(dualize(a), t) != membership(a, t)


def test_narrow_contract():
    a = always_p(L2, (1, 2))
    small = narrow(a, (1,))
    assert small.directions == [DA, DB]
    assert narrow(a, (1, 2)) is a
    with pytest.raises(ValueError):
        narrow(small, (2,))
    rng = np.random.default_rng(4)
    for _ in range(20):
        big = random_ata(rng, L2, (1, 2), max_states=3)
        t = random_regular_tree(rng, L2, (1,))
        extra = ('c',) if rng.random() < 0.5 else ('d',)
        assert membership(narrow(big, (1,)), t) == membership(big, lift_regular_tree(t, (1, 2), extra))


def test_union_and_intersection():
    t = two_vertices(label_root=('p',))
    both = combine(root_has_p(), next_p(), conj)
    either = union(root_has_p(), dualize(next_p()))
    assert membership(both, t)
    assert membership(either, t)
    assert not membership(combine(root_has_p(), dualize(next_p()), conj), t)
    assert both.initial == 0 and both.states == list(range(len(both)))


def test_trim_drops_unreachable_states():
    a = next_p()
    a.states.append(7)
    a.colours[7] = 0
    a.transitions.update({(7, letter): TOP for letter in all_letters(a.atoms)})
    assert len(trim(a)) == 2


def test_simulate_examples():
    trees = [two_vertices(), two_vertices(label_other=()), two_vertices(label_root=('p',), label_other=('p',)),
             RegularTree(L1, (1,), {0: {DA: 0}}, {0: {'p'}}, 0, DA)]
    for a in (root_has_p(), always_p(), next_p(), always_p(top=[0]), dualize(always_p())):
        nta = simulate(a)
        assert isinstance(nta, NondeterministicTreeAutomaton)
        assert is_nondeterministic(nta)
        for t in trees:
            assert membership(nta, t) == membership(a, t)


def test_simulate_random():
    rng = np.random.default_rng(5)
    for _ in range(10):
        a = random_ata(rng, L1, (1,), max_states=2, max_colour=2)
        nta = simulate(a)
        assert is_nondeterministic(nta)
        for _ in range(3):
            t = random_regular_tree(rng, L1, (1,))
            assert membership(nta, t) == membership(a, t)


def test_simulate_state_guard():
    with pytest.raises(ResourceLimitExceeded):
        simulate(next_p(), SimulationLimits(max_nta_states=1))


def test_project_examples():
    projected = project(simulate(root_has_p()), 'p')
    assert projected.atoms == frozenset()
    assert membership(projected, full_regular_tree(L1, (1,), DA))
    with pytest.raises(AutomatonShapeError):
        project(next_p(), 'p')


def test_project_is_sound_on_graph_labellings():
    rng = np.random.default_rng(6)
    for _ in range(10):
        nta = random_nta(rng, L1, (1,))
        projected = project(nta, 'p')
        t = random_regular_tree(rng, L1, (1,), max_vertices=3)
        if any(membership(nta, with_vertex_labels(t, labels)) for labels in random_graph_labellings(t, 'p')):
            assert membership(projected, t)


def test_unfolding_regular_tree():
    K = load_corpus_model('K0')
    t = unfolding_regular_tree(K, 'u')
    assert t.root == 'u' and t.root_direction == ('l1',)
    assert t.successors['u'] == {('l1',): 'u', ('l2',): 'v'}
    with pytest.raises(ValueError):
        unfolding_regular_tree(K, 'u', I=())


def test_dump_automaton():
    text = dump_automaton(simulate(root_has_p()))
    assert text.startswith('nta index {1} atoms {p}')
    assert 'state 0 colour' in text
    assert dump_automaton(root_has_p()).startswith('ata ')
