"""Test fields built by pulling the normal form back along maps."""

import itertools

from sixform.acs import NORMAL_FORM
from sixform.exterior import sort_with_sign
from sixform.formlang import Const, FormField, add, diff_expr, mul, neg, parse_expr


def _det(rows):
    n = len(rows)
    terms = []
    for perm in itertools.permutations(range(n)):
        sign, _ = sort_with_sign(perm)
        t = mul(*(rows[r][perm[r]] for r in range(n)))
        terms.append(t if sign > 0 else neg(t))
    return add(*terms)


def pullback_by_matrix(matrix, form=NORMAL_FORM) -> FormField:
    """Pointwise pullback by a 6 x 6 matrix of expressions (matrix[i][j] = d phi_i / d x_j)."""
    pairs = []
    for target in itertools.combinations(range(1, 7), 3):
        parts = []
        for idx, c in form.coeffs.items():
            rows = [[matrix[i - 1][j - 1] for j in target] for i in idx]
            parts.append(mul(Const(c), _det(rows)))
        pairs.append((target, add(*parts)))
    return FormField.from_terms(3, pairs)


def pullback_by_map(components, form=NORMAL_FORM) -> FormField:
    """Pullback along phi with phi_i given as expression strings."""
    phi = [parse_expr(c) for c in components]
    jac = [[diff_expr(p, j) for j in range(1, 7)] for p in phi]
    return pullback_by_matrix(jac, form)


DIFFEO = [
    "x1 + x2**2/4",
    "x2",
    "x3 + sin(x1)/3",
    "x4 + x5*x3/5",
    "x5",
    "x6 + x1*x4/7",
]


def integrable_field() -> FormField:
    """Closed, integrable and non-constant."""
    return pullback_by_map(DIFFEO)


def twisted_field() -> FormField:
    """Type 2 everywhere (det 1) but with a non-integrable J."""
    m = [[Const(1) if i == j else Const(0) for j in range(6)] for i in range(6)]
    m[0][1] = parse_expr("x3/3")
    m[3][4] = parse_expr("x1*x6/5")
    return pullback_by_matrix(m)


def unclosed_field() -> FormField:
    """Normal form with coefficient x4 on its first term."""
    from sixform.formlang import parse_field

    return parse_field("x4*dx1^dx2^dx3 - dx1^dx5^dx6 + dx2^dx4^dx6 - dx3^dx4^dx5")
