"""Classification and normal forms of 3-forms in six dimensions."""

__version__ = "0.1.0"

from .acs import (
    NORMAL_FORM,
    ChangeOfBasis,
    ComplexStructure,
    ComplexThreeForm,
    complex_structures,
    hitchin_j_on_forms,
    make_gamma,
    normalization_residual,
    normalize,
    purity_residual,
    three_zero_residual,
)
from .classify import TypeLabel, TypeReport, classify, is_multisymplectic, lambda_invariant, q_operator
from .exterior import KForm, alpha, dualize_five, eval_form, form, interior, pullback, volume_form, wedge
from .field import (
    IntegrabilityReport,
    TypeScan,
    exterior_derivative,
    integrability,
    j_at,
    nijenhuis_at,
    scan_types,
    type_at,
)
from .formlang import FormField, diff_expr, parse_expr, parse_field, print_field
from .g2 import restrict, standard_g2_form

OMEGA1 = form(6, [((1, 2, 3),), ((4, 5, 6),)])
OMEGA2 = form(6, [((1, 2, 3),), ((1, 4, 5),), ((2, 4, 6),), (-1, (3, 5, 6))])
OMEGA3 = form(6, [((1, 4, 5),), ((2, 4, 6),), ((3, 5, 6),)])

__all__ = [
    "__version__",
    "alpha",
    "ChangeOfBasis",
    "classify",
    "complex_structures",
    "ComplexStructure",
    "ComplexThreeForm",
    "diff_expr",
    "dualize_five",
    "eval_form",
    "exterior_derivative",
    "form",
    "FormField",
    "hitchin_j_on_forms",
    "integrability",
    "IntegrabilityReport",
    "interior",
    "is_multisymplectic",
    "j_at",
    "KForm",
    "lambda_invariant",
    "make_gamma",
    "nijenhuis_at",
    "NORMAL_FORM",
    "normalization_residual",
    "normalize",
    "OMEGA1",
    "OMEGA2",
    "OMEGA3",
    "parse_expr",
    "parse_field",
    "print_field",
    "pullback",
    "purity_residual",
    "q_operator",
    "restrict",
    "scan_types",
    "standard_g2_form",
    "three_zero_residual",
    "type_at",
    "TypeLabel",
    "TypeReport",
    "TypeScan",
    "volume_form",
    "wedge",
]
