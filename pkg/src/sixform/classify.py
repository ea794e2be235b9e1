"""Orbit type of a 3-form on R^6 via the Q operator and the invariant lambda.

Q is defined by ``(iota_v w) ^ w = iota_{Q v} theta`` for a fixed volume form
theta. It always satisfies ``Q^2 = lambda * I``; the sign of lambda separates
the orbits of multisymplectic forms (positive: type 1, negative: type 2,
zero: type 3).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import BackendFailure, DeltaVerificationError, DimensionMismatch
from .exterior import KForm, basis_vector, dualize_five, interior, volume_form, wedge
from .scalars import EXACT, FLOAT, SYMBOLIC, exact_sqrt, format_scalar

INDETERMINATE_BAND = 1e-8


class TypeLabel(str, enum.Enum):
    TYPE1 = "Type1"
    TYPE2 = "Type2"
    TYPE3 = "Type3"
    NOT_MULTISYMPLECTIC = "NotMultisymplectic"
    # float lambda inside the band around zero; never reported as Type3
    INDETERMINATE = "Indeterminate"

    def __str__(self):
        return self.value


@dataclass
class TypeReport:
    label: TypeLabel
    lam: object
    q: np.ndarray
    delta_basis: list = field(default_factory=list)
    delta_basis_minus: list = field(default_factory=list)
    multisymplectic: bool = True
    backend: str = EXACT
    theta: KForm | None = None
    tolerances: dict = field(default_factory=dict)

    @property
    def type_label(self) -> str:
        return self.label.value

    def to_json(self) -> dict:
        def vec(v):
            return [format_scalar(x) for x in v]

        out = {
            "type": self.label.value,
            "lambda": format_scalar(self.lam),
            "multisymplectic": self.multisymplectic,
            "Q": [vec(self.q[:, j]) for j in range(self.q.shape[1])],
            "delta_basis": [vec(v) for v in self.delta_basis],
            "backend": self.backend,
            "theta": theta_label(self.theta),
            "tolerances": self.tolerances,
        }
        if self.label is TypeLabel.TYPE1:
            out["delta_basis"] = {
                "plus": [vec(v) for v in self.delta_basis],
                "minus": [vec(v) for v in self.delta_basis_minus],
            }
        return out


def theta_label(theta: KForm | None):
    if theta is None:
        return "standard"
    c = theta.coeffs.get((1, 2, 3, 4, 5, 6))
    if c is not None and c == 1:
        return "standard"
    return theta.to_json()


def _check_three_form(omega: KForm):
    if omega.dim != 6 or omega.degree != 3:
        raise DimensionMismatch(f"expected a 3-form on R^6, got degree {omega.degree} on R^{omega.dim}")


def _theta_for(omega: KForm, theta: KForm | None) -> KForm:
    if theta is None:
        return volume_form(6, FLOAT if omega.backend == FLOAT else EXACT)
    return theta


def q_operator(omega: KForm, theta: KForm | None = None) -> np.ndarray:
    """Matrix of Q; column j is Q(e_j)."""
    _check_three_form(omega)
    theta = _theta_for(omega, theta)
    backend = FLOAT if omega.backend == FLOAT else EXACT
    q = linalg.zeros((6, 6), backend)
    for j in range(1, 7):
        e = basis_vector(6, j, backend)
        q[:, j - 1] = dualize_five(wedge(interior(e, omega), omega), theta)
    return q


def lambda_from_q(q: np.ndarray, tol: float | None = None):
    """lambda = tr(Q^2)/6, after checking that Q^2 is scalar."""
    q2 = q @ q
    lam = sum(q2[i, i] for i in range(6)) / 6
    if q.dtype == object:
        if linalg.matrix_backend(q) == SYMBOLIC:
            return lam
        if not linalg.is_scalar_matrix(q2, lam):
            raise BackendFailure("Q^2 is not a scalar matrix in exact arithmetic")
    else:
        bound = (1e-9 if tol is None else tol) * max(linalg.max_abs(q) ** 2, 1e-300)
        if not linalg.is_scalar_matrix(q2, lam, bound):
            raise BackendFailure(
                f"Q^2 deviates from lambda*I by more than {bound:.3g} in float arithmetic"
            )
    return lam


def lambda_invariant(omega: KForm, theta: KForm | None = None):
    return lambda_from_q(q_operator(omega, theta))


def iota_matrix(omega: KForm) -> np.ndarray:
    """15 x 6 coefficient matrix of v -> iota_v omega."""
    backend = FLOAT if omega.backend == FLOAT else EXACT
    rows = [(a, b) for a in range(1, 7) for b in range(a + 1, 7)]
    m = linalg.zeros((15, 6), backend)
    for j in range(1, 7):
        two = interior(basis_vector(6, j, backend), omega)
        for r, key in enumerate(rows):
            if key in two.coeffs:
                m[r, j - 1] = two.coeffs[key]
    return m


def is_multisymplectic(omega: KForm, tol: float | None = None) -> bool:
    _check_three_form(omega)
    if not omega.coeffs:
        return False
    return linalg.rank(iota_matrix(omega), tol) == 6


def delta_residual(omega: KForm, v):
    """``(iota_v w) ^ (iota_v w)`` as a 4-form."""
    two = interior(v, omega)
    return wedge(two, two)


def _verify_delta(omega: KForm, vectors, tol: float):
    for v in vectors:
        res = delta_residual(omega, v)
        if res.backend == FLOAT:
            scale = max(omega.max_abs(), 1e-300) ** 2 * max(float(np.max(np.abs(v))), 1e-300) ** 2
            ok = res.is_zero(tol * scale)
        else:
            ok = res.is_zero()
        if not ok:
            raise DeltaVerificationError(f"vector {list(v)} is not in Delta(omega)")


def indeterminate_bound(omega: KForm, theta: KForm) -> float:
    t = float(theta.coeffs[(1, 2, 3, 4, 5, 6)])
    return INDETERMINATE_BAND * omega.max_abs() ** 4 / (t * t)


def classify(omega: KForm, theta: KForm | None = None, tol: float | None = None) -> TypeReport:
    """Classify a 3-form on R^6.

    Exact inputs give exact signs. Type 1 eigenspaces at an irrational
    sqrt(lambda) are computed in floats with pivot tolerance 1e-10 * |Q|.
    """
    from .scalars import default_tolerance

    _check_three_form(omega)
    theta = _theta_for(omega, theta)
    tol = default_tolerance() if tol is None else tol
    q = q_operator(omega, theta)
    lam = lambda_from_q(q)
    report = TypeReport(
        label=TypeLabel.NOT_MULTISYMPLECTIC,
        lam=lam,
        q=q,
        backend=omega.backend,
        theta=theta,
        tolerances={"residual": tol, "pivot_rtol": linalg.PIVOT_RTOL, "lambda_band": INDETERMINATE_BAND},
    )
    if not is_multisymplectic(omega):
        report.multisymplectic = False
        return report

    if omega.backend == FLOAT:
        if abs(lam) < indeterminate_bound(omega, theta):
            report.label = TypeLabel.INDETERMINATE
            return report

    if lam < 0:
        report.label = TypeLabel.TYPE2
        return report

    if lam == 0:
        kernel = linalg.nullspace(q)
        if len(kernel) != 3:
            raise DeltaVerificationError(f"lambda = 0 but ker Q has dimension {len(kernel)}")
        _verify_delta(omega, kernel, tol)
        report.label = TypeLabel.TYPE3
        report.delta_basis = kernel
        return report

    root = exact_sqrt(lam) if omega.backend == EXACT else None
    if root is None:
        qf = linalg.as_float(q)
        root = float(np.sqrt(float(lam)))
        work_omega = omega.to_float()
        report.backend = FLOAT
        eye = np.eye(6)
    else:
        qf = q
        work_omega = omega
        eye = linalg.identity(6, EXACT)
    plus = linalg.nullspace(qf - root * eye)
    minus = linalg.nullspace(qf + root * eye)
    if len(plus) != 3 or len(minus) != 3:
        raise DeltaVerificationError(
            f"lambda > 0 but eigenspaces have dimensions {len(plus)} and {len(minus)}"
        )
    _verify_delta(work_omega, plus + minus, tol)
    report.label = TypeLabel.TYPE1
    report.delta_basis = plus
    report.delta_basis_minus = minus
    return report
