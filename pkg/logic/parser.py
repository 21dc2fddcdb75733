from __future__ import annotations

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedEOF, UnexpectedInput, VisitError

from logic.formula import (
    FALSE,
    TRUE,
    AtomicProp,
    Exists,
    Next,
    Observation,
    StateEmbed,
    StateFormula,
    Until,
    exists_path,
    forall_path,
    future,
    globally,
    path_and,
    path_implies,
    path_not,
    path_or,
)
from qctl_utils.errors import FormulaSyntaxError

# ====================================================================
# Grammar
# --------------------------------------------------------------------
# State and path formulas share one expression grammar; the transformer
# sorts them out. A quantifier body extends as far right as possible:
# the LALR shift/reduce conflicts this creates are resolved as shift.

formula_grammar = r"""
    ?start: expr

    ?expr: implication
         | quant

    quant: "exists" prop_name [obs] "." expr

    obs: "^" "{" [obs_indices] "}"
    obs_indices: INT ("," INT)*

    ?implication: disjunction "->" expr    -> implies
                | disjunction

    ?disjunction: conjunction "|" disj_rhs -> or_
                | conjunction
    ?disj_rhs: disjunction | quant

    ?conjunction: until "&" conj_rhs      -> and_
                | until
    ?conj_rhs: conjunction | quant

    ?until: unary "U" until_rhs           -> until
          | unary
    ?until_rhs: until | quant

    ?unary: "!" unary_rhs                 -> not_
          | "X" unary_rhs                 -> next
          | "F" unary_rhs                 -> future
          | "G" unary_rhs                 -> globally
          | "E" unary_rhs                 -> exists_path
          | "A" unary_rhs                 -> forall_path
          | atom
    ?unary_rhs: unary | quant

    ?atom: "true"                         -> true
         | "false"                        -> false
         | prop_name                      -> prop
         | "(" expr ")"

    prop_name: NAME | QUOTED

    NAME: /[A-Za-z_][A-Za-z0-9_']*/
    QUOTED: /"(\\.|[^"\\])*"/
    COMMENT: /--[^\n]*/

    %import common.INT
    %import common.WS
    %ignore WS
    %ignore COMMENT
"""

_parser = Lark(formula_grammar, parser='lalr', maybe_placeholders=True)

_UNESCAPE = {'n': '\n', 't': '\t', '"': '"', '\\': '\\'}


def _unquote(token: Token) -> str:
    body, out, i = token[1:-1], [], 0
    while i < len(body):
        c = body[i]
        if c == '\\':
            escape = body[i + 1]
            if escape not in _UNESCAPE:
                raise FormulaSyntaxError(f'unknown escape \\{escape}', token.line, token.column + i + 1)
            out.append(_UNESCAPE[escape])
            i += 2
        else:
            out.append(c)
            i += 1
    return ''.join(out)


def _expect_state(psi, token: Token | None, what: str) -> StateFormula:
    if not isinstance(psi, StateEmbed):
        line, column = (token.line, token.column) if token is not None else (1, 1)
        raise FormulaSyntaxError(f'path formula used where {what} expects a state formula', line, column)
    return psi.formula


class FormulaBuilder(Transformer):
    """Turns the parse tree into the core AST, desugaring derived connectives.

    Every intermediate value is a path formula; pure state formulas travel
    wrapped in StateEmbed.
    """

    def prop_name(self, items):
        (token,) = items
        return token, _unquote(token) if token.type == 'QUOTED' else str(token)

    def prop(self, items):
        (_, name), = items
        return StateEmbed(AtomicProp(name))

    def true(self, _):
        return StateEmbed(TRUE)

    def false(self, _):
        return StateEmbed(FALSE)

    def obs_indices(self, items):
        for token in items:
            if int(token) < 1:
                raise FormulaSyntaxError('observation indices start at 1', token.line, token.column)
        return [int(token) for token in items]

    def obs(self, items):
        (indices,) = items
        return Observation(tuple(indices or ()))

    def quant(self, items):
        (token, name), observation, body = items
        body = _expect_state(body, token, 'a quantifier body')
        return StateEmbed(Exists(name, Observation.everything() if observation is None else observation, body))

    @v_args(inline=True)
    def not_(self, x):
        return path_not(x)

    @v_args(inline=True)
    def and_(self, x, y):
        return path_and(x, y)

    @v_args(inline=True)
    def or_(self, x, y):
        return path_or(x, y)

    @v_args(inline=True)
    def implies(self, x, y):
        return path_implies(x, y)

    @v_args(inline=True)
    def until(self, x, y):
        return Until(x, y)

    @v_args(inline=True)
    def next(self, x):
        return Next(x)

    @v_args(inline=True)
    def future(self, x):
        return future(x)

    @v_args(inline=True)
    def globally(self, x):
        return globally(x)

    @v_args(inline=True)
    def exists_path(self, x):
        return StateEmbed(exists_path(x))

    @v_args(inline=True)
    def forall_path(self, x):
        return StateEmbed(forall_path(x))


def _end_position(text: str) -> tuple[int, int]:
    lines = text.split('\n')
    return len(lines), len(lines[-1]) + 1


def parse_formula(text: str) -> StateFormula:
    """Parse a state formula written in the surface syntax."""
    stripped = '\n'.join(line.split('--', 1)[0] for line in text.split('\n'))
    if not stripped.strip():
        raise FormulaSyntaxError('empty input', 1, 1)
    try:
        tree = _parser.parse(text)
    except UnexpectedEOF:
        raise FormulaSyntaxError('unexpected end of input', *_end_position(text)) from None
    except UnexpectedInput as e:
        line, column = getattr(e, 'line', -1), getattr(e, 'column', -1)
        if line is None or line < 0:
            line, column = _end_position(text)
        raise FormulaSyntaxError(f'unexpected input {e.__class__.__name__}', line, column) from None
    try:
        result = FormulaBuilder().transform(tree)
    except VisitError as e:
        if isinstance(e.orig_exc, FormulaSyntaxError):
            raise e.orig_exc from None
        raise
    return _expect_state(result, None, 'the top level')
