from __future__ import annotations

from dataclasses import dataclass

from logic.formula import Not, StateFormula
from logic.parser import parse_formula
from structures.kripke import CompoundKripkeStructure, parse_model

# ====================================================================
# Regression models
# --------------------------------------------------------------------

K0_TEXT = """\
# two states over one coordinate, complete graph
locals 1: l1 l2
atoms: p
state u = (l1)
state v = (l2)
edge u -> u
edge u -> v
edge v -> u
edge v -> v
label v: p
"""

K1_TEXT = """\
# single state with a self-loop
locals 1: l
state w = (l)
edge w -> w
"""

K2_TEXT = """\
# two coordinates, the second one constant
locals 1: a b
locals 2: c
state x = (a,c)
state y = (b,c)
edge x -> y
edge y -> x
edge y -> y
"""

MODELS = {'K0': K0_TEXT, 'K1': K1_TEXT, 'K2': K2_TEXT}


def load_corpus_model(name: str) -> CompoundKripkeStructure:
    return parse_model(MODELS[name])


LINE = '(A F q & A G (q -> A X A G !q))'


@dataclass(frozen=True)
class CuratedCase:
    name: str
    model: str
    state: str
    formula: str
    semantics: str
    expected: bool
    derivation: str

    def parsed(self) -> StateFormula:
        return parse_formula(self.formula)

    def negated(self) -> CuratedCase:
        return CuratedCase(f'not_{self.name}', self.model, self.state, f'!({self.formula})', self.semantics,
                           not self.expected, f'negation of {self.name}')


BASE_CASES = [
    CuratedCase('line_K0', 'K0', 'u', f'exists q^{{}}. {LINE}', 'tree', True,
                'a blind labelling is constant on each level; labelling level 0 alone puts one q on every path'),
    CuratedCase('line_K1', 'K1', 'w', f'exists q^{{}}. {LINE}', 'tree', True,
                'the unfolding is a single path; label its first node'),
    CuratedCase('line_K2', 'K2', 'x', f'exists q^{{}}. {LINE}', 'tree', True,
                'label level 1 (the node y); every path from x passes it exactly once'),
    CuratedCase('root_only_tree', 'K1', 'w', 'exists q^{1}. (q & A X A G !q)', 'tree', True,
                'nodes of the unfolding are distinct words, so labelling the root alone is uniform'),
    CuratedCase('root_only_structure', 'K1', 'w', 'exists q^{1}. (q & A X A G !q)', 'structure', False,
                'the single state carries q on the root and on all of its successors alike'),
    CuratedCase('split_children_full', 'K0', 'u', 'exists q^{1}. (E X q & E X !q)', 'tree', True,
                'the children of the root have the different directions l1 and l2 and may be labelled apart'),
    CuratedCase('split_children_blind', 'K0', 'u', 'exists q^{}. (E X q & E X !q)', 'tree', False,
                'blind uniformity forces both children of the root to agree on q'),
    CuratedCase('root_then_not_blind_tree', 'K0', 'u', 'exists q^{}. (q & E X !q)', 'tree', True,
                'q on level 0 only; the root and its children lie on different levels'),
    CuratedCase('root_then_not_full_structure', 'K0', 'u', 'exists q^{1}. (q & E X !q)', 'structure', True,
                'two singleton classes: q on u and not on v'),
    CuratedCase('root_then_not_blind_structure', 'K0', 'u', 'exists q^{}. (q & E X !q)', 'structure', False,
                'one class: q holds everywhere or nowhere'),
    CuratedCase('split_children_structure', 'K0', 'u', 'exists q^{1}. (E X q & E X !q)', 'structure', True,
                'u has successors u and v, which lie in different classes'),
    CuratedCase('free_prop_successor', 'K0', 'u', 'E X p', 'tree', True,
                'v is a successor of u and carries p'),
]

CURATED_CASES = BASE_CASES + [case.negated() for case in BASE_CASES]
