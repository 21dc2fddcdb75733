import numpy as np
import pytest

from cli.corpus import load_corpus_model
from logic.analysis import formula_size
from logic.formula import (
    AF,
    AG,
    AU,
    EF,
    EU,
    EX,
    FALSE,
    TRUE,
    And,
    AtomicProp,
    Exists,
    ExistsPath,
    Next,
    Not,
    Observation,
    Or,
    StateEmbed,
    implies,
    neg,
)
from logic.parser import parse_formula
from logic.transs import translate_structural, uniformity_guard
from mc.ctl_fixpoint import au_states, check_ctl_fixpoint, ctl_states, eu_states
from mc.mc_structure import check_bruteforce, check_structure, check_structure_all
from qctl_utils.errors import FragmentError
from qctl_utils.random_instances import random_ctl_star, random_formula, random_kripke
from structures.kripke import LocalAlphabets, is_uniform_labelling, with_labelling

p, q = AtomicProp('p'), AtomicProp('q')


@pytest.fixture
def K0():
    return load_corpus_model('K0')


def test_quantifier_examples(K0):
    assert check_structure(K0, 'u', parse_formula('exists q^{1}. (q & E X !q)'))
    assert not check_structure(K0, 'u', parse_formula('exists q^{}. (q & E X !q)'))
    assert check_structure(K0, 'v', Exists('q', Observation(()), TRUE))
    assert check_structure(K0, 'u', parse_formula('exists q^{1}. (E X q & E X !q)'))


def test_free_props_must_be_known(K0):
    with pytest.raises(ValueError):
        check_structure(K0, 'u', EX(AtomicProp('r')))
    with pytest.raises(ValueError):
        check_structure(K0, 'w', EX(p))
    assert check_structure(K0, 'u', EX(AtomicProp('@l2')))


def test_path_formulas(K0):
    assert check_structure(K0, 'u', EF(p))
    assert not check_structure(K0, 'u', AG(p))
    assert check_structure(K0, 'u', ExistsPath(Next(Next(StateEmbed(p)))))
    assert check_structure_all(K0, p) == {'v'}
    # every state has a path visiting p infinitely often
    assert check_structure_all(K0, parse_formula('E G F p')) == {'u', 'v'}
    assert check_structure_all(K0, parse_formula('A G F p')) == set()


def test_ctl_fixpoint_examples(K0):
    assert check_ctl_fixpoint(K0, 'u', EX(TRUE))
    assert check_ctl_fixpoint(K0, 'u', EU(TRUE, p))
    assert not check_ctl_fixpoint(K0, 'u', AU(TRUE, FALSE))
    assert eu_states(K0, set(), {'v'}) == {'v'}
    assert au_states(K0, {'u', 'v'}, {'v'}) == {'v'}
    with pytest.raises(FragmentError):
        check_ctl_fixpoint(K0, 'u', Exists('q', Observation.of(1), q))
    with pytest.raises(FragmentError):
        ctl_states(K0, ExistsPath(Next(Next(StateEmbed(p)))))


def test_ctl_fixpoint_agrees_with_structure_checker():
    rng = np.random.default_rng(8)
    for _ in range(100):
        K = random_kripke(rng)
        f = random_formula(rng, ('p', 'r'), n=K.n, depth=3, max_quantifiers=0)
        assert set(ctl_states(K, f)) == check_structure_all(K, f)


def test_structure_checker_matches_bruteforce():
    rng = np.random.default_rng(9)
    for _ in range(100):
        K = random_kripke(rng)
        s = K.state_names[int(rng.integers(len(K.state_names)))]
        f = random_formula(rng, ('p', 'r'), n=K.n, depth=3, max_quantifiers=2)
        assert check_structure(K, s, f) == check_bruteforce(K, s, f)


def test_full_observation_is_the_plain_quantifier(K0):
    rng = np.random.default_rng(10)
    for _ in range(50):
        body = random_formula(rng, ('p', 'q'), n=1, depth=2, max_quantifiers=0)
        restricted = check_structure(K0, 'u', Exists('q', Observation.of(1), body))
        plain = check_structure(K0, 'u', Exists('q', Observation.everything(), body))
        assert restricted == plain


def test_observation_monotonicity():
    rng = np.random.default_rng(11)
    for _ in range(60):
        K = random_kripke(rng, n_max=2)
        s = K.state_names[0]
        body = random_formula(rng, ('p', 'q'), n=K.n, depth=2, max_quantifiers=0)
        if check_structure(K, s, Exists('q', Observation(()), body)):
            assert check_structure(K, s, Exists('q', Observation(K.locals.coordinates), body))


def test_universal_dual_enumerates_every_uniform_labelling():
    K = load_corpus_model('K2')
    body = parse_formula('q -> E X q')
    for o in (Observation(()), Observation.of(1), Observation.of(1, 2)):
        universal = check_structure(K, 'x', Not(Exists('q', o, neg(body))))
        expected = True
        for labelled in ([], ['x'], ['y'], ['x', 'y']):
            L = with_labelling(K, 'q', labelled)
            if is_uniform_labelling(L, 'q', o):
                expected &= check_structure(L, 'x', body)
        assert universal == expected


def test_uniformity_guard_shape():
    locals = LocalAlphabets((('a', 'b'),))
    guard = uniformity_guard('q', Observation.of(1), locals)
    assert isinstance(guard, And)
    expected = Or(AG(implies(TRUE, q)), AG(implies(TRUE, neg(q))))
    assert uniformity_guard('q', Observation(()), locals) == expected


def test_translation_is_sound_and_small():
    rng = np.random.default_rng(12)
    for _ in range(60):
        K = random_kripke(rng)
        s = K.state_names[int(rng.integers(len(K.state_names)))]
        f = random_formula(rng, ('p', 'r'), n=K.n, depth=3, max_quantifiers=1)
        translated = translate_structural(f, K.locals)
        m = max(len(a) for a in K.locals.alphabets)
        assert formula_size(translated, K.n) <= 40 * K.n * m ** K.n * formula_size(f, K.n)
        assert check_structure(K, s, translated) == check_structure(K, s, f)


def test_translation_of_quantifier_free_input_is_identity(K0):
    f = AF(And(p, EX(p)))
    assert translate_structural(f, K0.locals) == f
    with pytest.raises(FragmentError):
        translate_structural(ExistsPath(Next(Next(StateEmbed(p)))), K0.locals)


def test_quantifier_free_ctl_star_is_decided(K0):
    rng = np.random.default_rng(13)
    for _ in range(30):
        f = random_ctl_star(rng, ('p',), depth=2)
        assert check_structure(K0, 'u', f) == check_bruteforce(K0, 'u', f)
