"""Complex structures, (3,0)-forms and normal forms attached to type-2 3-forms.

For a type-2 form ``w`` the operator ``J = Q / sqrt(-lambda)`` squares to
``-I`` and ``w`` is pure with respect to it. The complex form
``gamma = w - i w(J., ., .)`` is then of type (3,0), which yields the
normalisation to

    N = a123 - a156 + a246 - a345 = Re((dx1 + i dx4)(dx2 + i dx5)(dx3 + i dx6)).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import linalg
from .classify import TypeLabel, _theta_for, classify
from .errors import JNotComplexStructure, NotTypeTwo, PurityViolated
from .exterior import KForm, basis_vector, eval_form, form, pullback
from .scalars import EXACT, FLOAT, default_tolerance, exact_sqrt

TRIPLES = list(itertools.combinations(range(1, 7), 3))

NORMAL_FORM = form(6, [((1, 2, 3),), (-1, (1, 5, 6)), ((2, 4, 6),), (-1, (3, 4, 5))])


def normal_form(backend: str = EXACT) -> KForm:
    return NORMAL_FORM.to_backend(backend)


@dataclass(frozen=True)
class ComplexStructure:
    j: np.ndarray
    lam: object
    theta: KForm

    @property
    def backend(self) -> str:
        return EXACT if self.j.dtype == object else FLOAT


@dataclass(frozen=True)
class ComplexThreeForm:
    """gamma = re + i*im restricted to real vectors; extended complex-trilinearly."""

    re: KForm
    im: KForm
    j: np.ndarray

    def evaluate(self, *args):
        """gamma(w1, w2, w3) for complex vectors given as (real, imag) pairs or real vectors.

        Returns (real part, imaginary part), exact when the inputs are.
        """
        parts = []
        for w in args:
            if isinstance(w, tuple):
                parts.append(w)
            else:
                parts.append((w, None))
        zero = 0.0 if self.re.backend == FLOAT else Fraction(0)
        out_re, out_im = zero, zero
        for choice in itertools.product((0, 1), repeat=3):
            vecs = []
            for (real, imag), c in zip(parts, choice):
                v = real if c == 0 else imag
                if v is None:
                    break
                vecs.append(v)
            else:
                a = eval_form(self.re, *vecs)
                b = eval_form(self.im, *vecs)
                # multiply (a + ib) by i^m
                m = sum(choice) % 4
                for _ in range(m):
                    a, b = -b, a
                out_re, out_im = out_re + a, out_im + b
        return out_re, out_im

    def conjugate(self) -> "ComplexThreeForm":
        """re - i*im with the same J: a (0,3)-form, not (3,0)."""
        return ComplexThreeForm(self.re, -self.im, self.j)

    def to_json(self) -> dict:
        from .scalars import format_scalar

        return {
            "re": self.re.to_json(),
            "im": self.im.to_json(),
            "J": [[format_scalar(x) for x in self.j[:, c]] for c in range(6)],
        }


@dataclass(frozen=True)
class ChangeOfBasis:
    """Columns b1, b2, b3, Jb1, Jb2, Jb3; ``pullback(p, w)`` is the normal form.

    Equivalently ``w = (p^-1)^* N``: the new coordinates are
    ``x = p^-1 (old coordinates)`` and ``z^k = x^k + i x^(k+3)``.
    """

    p: np.ndarray
    c: tuple
    direction: str = "pullback(p, omega) == normal form"


def _sqrt_neg(lam):
    if isinstance(lam, Fraction):
        root = exact_sqrt(-lam)
        if root is not None:
            return root
    return float(np.sqrt(-float(lam)))


def complex_structures(omega: KForm, theta: KForm | None = None):
    """Return (J_plus, J_minus) with J_plus = Q / sqrt(-lambda)."""
    theta = _theta_for(omega, theta)
    report = classify(omega, theta)
    if report.label is not TypeLabel.TYPE2:
        raise NotTypeTwo(f"form is {report.label.value}, not Type2")
    root = _sqrt_neg(report.lam)
    q = report.q if isinstance(root, Fraction) else linalg.as_float(report.q)
    jp = q / root
    return (
        ComplexStructure(jp, report.lam, theta),
        ComplexStructure(-jp, report.lam, theta),
    )


def _as_matrix(j) -> np.ndarray:
    return j.j if isinstance(j, ComplexStructure) else np.asarray(j)


def _column(m, i):
    return m[:, i - 1]


def _slot_contract(omega: KForm, jm, idx, slot: int):
    """omega(e_i1, .., J e_i(slot), .., e_ik) = sum_l J[l, i_slot] * omega[.., l, ..]."""
    col = idx[slot] - 1
    total = 0.0 if omega.backend == FLOAT else Fraction(0)
    for l in range(1, omega.dim + 1):
        jl = jm[l - 1, col]
        if jl == 0:
            continue
        c = omega[idx[:slot] + (l,) + idx[slot + 1 :]]
        if c != 0:
            total = total + jl * c
    return total


def purity_residual(omega: KForm, j):
    """Max deviation from w(Jv1,v2,v3) = w(v1,Jv2,v3) = w(v1,v2,Jv3) on basis triples."""
    jm = _as_matrix(j)
    backend = EXACT if jm.dtype == object and omega.backend != FLOAT else FLOAT
    if backend == FLOAT:
        jm, omega = linalg.as_float(jm), omega.to_float()
    worst = 0.0 if backend == FLOAT else Fraction(0)
    for idx in TRIPLES:
        x, y, z = (_slot_contract(omega, jm, idx, s) for s in range(3))
        worst = max(worst, abs(x - y), abs(y - z))
    return worst


def squares_to_minus_one(j, tol: float = 0.0) -> bool:
    jm = _as_matrix(j)
    return linalg.is_scalar_matrix(jm @ jm, -1, tol)


def _tolerance_for(omega: KForm, tol):
    tol = default_tolerance() if tol is None else tol
    return tol * max(omega.max_abs(), 1.0)


def make_gamma(omega: KForm, j, tol: float | None = None) -> ComplexThreeForm:
    """Complex (3,0)-form with real part ``omega`` and imaginary part -w(J., ., .)."""
    jm = _as_matrix(j)
    if jm.dtype != object and omega.backend != FLOAT:
        omega = omega.to_float()
    res = purity_residual(omega, jm)
    limit = 0 if omega.backend == EXACT and jm.dtype == object else _tolerance_for(omega, tol)
    if res > limit:
        raise PurityViolated(f"purity residual {float(res):.3g} exceeds {float(limit):.3g}")
    backend = omega.backend
    terms = [(idx, -_slot_contract(omega, jm, idx, 0)) for idx in TRIPLES]
    im = KForm.from_terms(6, 3, terms, backend)
    return ComplexThreeForm(omega, im, jm)


def three_zero_residual(gamma: ComplexThreeForm):
    """Max over basis b and basis pairs of |gamma(b + iJb, e_j, e_k)|.

    The modulus is measured as max(|re|, |im|) so exact inputs stay exact.
    """
    backend = gamma.re.backend
    jm = gamma.j
    if backend == FLOAT:
        jm = linalg.as_float(jm)
    worst = 0.0 if backend == FLOAT else Fraction(0)
    for b in range(1, 7):
        eb = basis_vector(6, b, backend)
        w = (eb, _column(jm, b))
        for s, t in itertools.combinations(range(1, 7), 2):
            re, im = gamma.evaluate(w, basis_vector(6, s, backend), basis_vector(6, t, backend))
            worst = max(worst, abs(re), abs(im))
    return worst


def _complex_inverse(re, im):
    d = re * re + im * im
    return re / d, -im / d


def normalize(omega: KForm, theta: KForm | None = None) -> ChangeOfBasis:
    """Basis in which ``omega`` becomes the normal form N.

    Picks b1 = e1, then the first standard vectors leaving the real span of
    the previous b's and Jb's, rescales b1 by 1/gamma(b1, b2, b3) in the
    complex structure given by J, and returns the columns (b, Jb).
    """
    jp, _ = complex_structures(omega, theta)
    jm = jp.j
    backend = jp.backend
    work = omega.to_backend(backend)
    gamma = make_gamma(work, jm)

    chosen = []
    span = []
    for k in range(1, 7):
        e = basis_vector(6, k, backend)
        trial = span + [e]
        if linalg.rank(np.column_stack(trial)) == len(trial):
            chosen.append(e)
            span = trial + [jm @ e]
            if len(chosen) == 3:
                break
    assert len(chosen) == 3 and linalg.rank(np.column_stack(span)) == 6, "J has a real eigenvector"

    c_re, c_im = gamma.evaluate(*chosen)
    r_re, r_im = _complex_inverse(c_re, c_im)
    b1 = r_re * chosen[0] + r_im * (jm @ chosen[0])
    bs = [b1, chosen[1], chosen[2]]
    p = np.column_stack(bs + [jm @ b for b in bs])
    return ChangeOfBasis(p, (c_re, c_im))


def normalization_residual(omega: KForm, change: ChangeOfBasis) -> float:
    """Max |coefficient| of pullback(p, omega) - N."""
    pulled = pullback(change.p, omega.to_backend(EXACT if change.p.dtype == object else FLOAT))
    target = normal_form(pulled.backend)
    return (pulled - target).max_abs()


def _basis_forms(backend):
    return [KForm(6, 3, {idx: (1.0 if backend == FLOAT else Fraction(1))}, backend) for idx in TRIPLES]


def apply_a(j, omega: KForm) -> KForm:
    """(A_J w)(v1, v2, v3) = w(Jv1, Jv2, Jv3)."""
    return pullback(_as_matrix(j), omega)


def apply_d(j, omega: KForm) -> KForm:
    """(D_J w)(v1, .., vk) = sum_i w(v1, .., J vi, .., vk)."""
    jm = _as_matrix(j)
    backend = omega.backend
    k = omega.degree
    terms = []
    for idx in itertools.combinations(range(1, omega.dim + 1), k):
        total = 0.0 if backend == FLOAT else Fraction(0)
        for slot in range(k):
            total = total + _slot_contract(omega, jm, idx, slot)
        terms.append((idx, total))
    return KForm.from_terms(omega.dim, k, terms, backend)


def hitchin_j_on_forms(j) -> np.ndarray:
    """20 x 20 matrix of -1/2 (A_J + D_J) on the basis a_{ijk}, i < j < k."""
    jm = _as_matrix(j)
    if not squares_to_minus_one(jm, 0.0 if jm.dtype == object else 1e-9 * max(linalg.max_abs(jm), 1) ** 2):
        raise JNotComplexStructure("J^2 != -I")
    backend = EXACT if jm.dtype == object else FLOAT
    h = linalg.zeros((20, 20), backend)
    half = Fraction(1, 2) if backend == EXACT else 0.5
    for col, basis in enumerate(_basis_forms(backend)):
        image = (apply_a(jm, basis) + apply_d(jm, basis)).scale(-half)
        h[:, col] = form_to_vector(image)
    return h


def form_to_vector(omega: KForm) -> np.ndarray:
    backend = omega.backend
    out = linalg.zeros(20, FLOAT if backend == FLOAT else EXACT)
    for r, idx in enumerate(TRIPLES):
        if idx in omega.coeffs:
            out[r] = omega.coeffs[idx]
    return out


def vector_to_form(v) -> KForm:
    return KForm(6, 3, {idx: v[r] for r, idx in enumerate(TRIPLES)})
