import pytest

from cli.corpus import K0_TEXT, load_corpus_model
from logic.formula import Observation
from qctl_utils.errors import LabelConflictError, ModelFormatError
from structures.kripke import (
    BLANK,
    LocalAlphabets,
    dump_model,
    format_direction,
    is_uniform_labelling,
    obs_classes,
    obs_equiv_states,
    parse_model,
    project_state,
    reachable,
    unfold_bounded,
    with_labelling,
)
from structures.trees import (
    FiniteLabelledTree,
    dump_tree,
    full_tree,
    is_tree_uniform,
    lift_tree,
    merge_trees,
    node_obs_equiv,
    p_project,
    project_tree,
    tree_levels,
)

L2 = LocalAlphabets((('a', 'b'), ('x', 'y')))


def test_parse_k0():
    K = parse_model(K0_TEXT)
    assert K.n == 1
    assert K.state_names == ['u', 'v']
    assert K.states == {'u': ('l1',), 'v': ('l2',)}
    assert set(K.successors('u')) == {'u', 'v'}
    assert K.labels['v'] == {'p'} and K.labels['u'] == set()
    assert parse_model(dump_model(K)) == K


@pytest.mark.parametrize('text, fragment', [
    ('locals 1: a\nstate s = (a,a)\nedge s -> s\n', 'arity'),
    ('locals 1: a b\nstate s = (a)\nstate t = (b)\nedge s -> t\n', 'left-total'),
    ('locals 1: a\nstate s = (a)\nstate t = (a)\nedge s -> t\nedge t -> s\n', 'share'),
    ('locals 1: a\nstate s = (a)\nedge s -> t\n', 'unknown state'),
    ('locals 1: a\nstate s = (a)\nedge s -> s\nstate s = (a)\n', 'declared twice'),
    ('locals 2: a\nstate s = (a)\nedge s -> s\n', 'numbered'),
    ('locals 1: a\nstate s = (a)\nedge s => s\n', 'cannot parse'),
])
def test_parse_model_errors(text, fragment):
    with pytest.raises(ModelFormatError) as info:
        parse_model(text)
    assert fragment in str(info.value)


def test_parse_model_reports_lines():
    with pytest.raises(ModelFormatError) as info:
        parse_model('locals 1: a\n# comment\nstate s = (a)\nedge s -> t\n')
    assert info.value.line == 4


def test_project_state():
    assert project_state(('a', 'x'), {1}, L2) == ('a',)
    assert project_state(('a', 'x'), set(), L2) == BLANK
    assert project_state(('a', 'x'), {1, 2}, L2) == ('a', 'x')
    assert format_direction(BLANK) == '#blank'
    with pytest.raises(ValueError):
        project_state(('a',), {2}, L2)


def test_obs_equiv_states():
    assert obs_equiv_states(('a', 'x'), ('a', 'y'), Observation.of(1), L2)
    assert not obs_equiv_states(('a', 'x'), ('a', 'y'), Observation.of(1, 2), L2)
    assert obs_equiv_states(('a', 'x'), ('b', 'y'), Observation(()), L2)


def test_uniform_labelling_on_k0():
    K = load_corpus_model('K0')
    only_u = with_labelling(K, 'q', ['u'])
    assert not is_uniform_labelling(only_u, 'q', Observation(()))
    assert is_uniform_labelling(only_u, 'q', Observation.of(1))
    assert is_uniform_labelling(K, 'q', Observation(()))
    assert obs_classes(K, Observation(())) == [frozenset({'u', 'v'})]
    assert sorted(map(sorted, obs_classes(K, Observation.of(1)))) == [['u'], ['v']]


def test_local_propositions():
    K = load_corpus_model('K2')
    assert K.holds('x', '@a') and not K.holds('y', '@a')
    assert K.holds('y', '@c')
    assert K.knows('@b') and not K.knows('@z')
    assert reachable(K, 'x') == ['x', 'y']


def test_unfold_bounded():
    K = load_corpus_model('K0')
    u, v = ('l1',), ('l2',)
    t = unfold_bounded(K, 'u', 1)
    assert t.nodes == {(u,), (u, u), (u, v)}
    assert t.labels[(u, v)] == {'p'}
    assert unfold_bounded(K, 'u', 0).nodes == {(u,)}


def test_project_and_lift_trees():
    t = FiniteLabelledTree(L2, (1, 2), {(('a', 'x'),): {'p'}, (('a', 'x'), ('b', 'x')): set()}, 1)
    assert project_tree(t, {1}).nodes == {(('a',),), (('a',), ('b',))}
    assert project_tree(t, set()).nodes == {(BLANK,), (BLANK, BLANK)}
    assert project_tree(t, {1, 2}) == t

    single = full_tree(L2, (1,), ('a',), 1)
    lifted = lift_tree(single, (1, 2), ('x',))
    assert (('a', 'x'),) in lifted.nodes
    assert len(lifted.nodes) == 1 + 4
    assert project_tree(lifted, (1,)) == single


def test_project_conflict():
    t = full_tree(L2, (1, 2), ('a', 'x'), 1, {(('a', 'x'), ('a', 'x')): {'p'}})
    with pytest.raises(LabelConflictError):
        project_tree(t, {1})


def test_merge_and_p_project():
    t = full_tree(L2, (1,), ('a',), 1, {(('a',),): {'p'}})
    t2 = full_tree(L2, (1,), ('a',), 1, {(('a',),): {'q'}})
    assert merge_trees(t, t2).labels[(('a',),)] == {'p', 'q'}
    assert merge_trees(t, t) == t
    assert p_project(t, 'p').labels[(('a',),)] == set()


def test_node_obs_equiv():
    u = (('a', 'x'), ('a', 'y'))
    u2 = (('a', 'y'), ('a', 'x'))
    assert node_obs_equiv(u, u2, Observation.of(1), L2)
    assert not node_obs_equiv(u, u2, Observation.of(2), L2)
    assert not node_obs_equiv(u, u[:1], Observation(()), L2)


def test_tree_uniformity():
    root = ('a',)
    t = full_tree(L2, (1,), root, 2)
    level2 = [u for u in t.nodes if len(u) == 3]
    on_level = full_tree(L2, (1,), root, 2, {u: {'p'} for u in level2})
    assert is_tree_uniform(on_level, 'p', Observation(()))
    one_child = full_tree(L2, (1,), root, 2, {(root, ('a',)): {'p'}})
    assert not is_tree_uniform(one_child, 'p', Observation(()))
    assert is_tree_uniform(one_child, 'p', Observation.of(1))
    assert is_tree_uniform(t, 'p', Observation(()))
    assert [len(level) for level in tree_levels(t)] == [1, 2, 4]
    assert dump_tree(one_child).splitlines()[1] == 'node (a).(a): p'
