from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings

import oracles
from conftest import random_invertible, random_rational_form, random_rational_vector, three_forms
from sixform import OMEGA1, OMEGA2, OMEGA3, linalg
from sixform.acs import NORMAL_FORM
from sixform.classify import (
    TypeLabel,
    classify,
    delta_residual,
    is_multisymplectic,
    lambda_invariant,
    q_operator,
)
from sixform.errors import DimensionMismatch
from sixform.exterior import KForm, alpha, form, interior, pullback, volume_form, wedge

F = Fraction

# Frozen from oracles.q_oracle (sympy solve against the dualized wedge).
Q_OMEGA1 = np.diag([1, 1, 1, -1, -1, -1])
Q_OMEGA2 = np.array(
    [
        [0, 0, 0, 0, 0, 2],
        [0, 0, 0, 0, -2, 0],
        [0, 0, 0, -2, 0, 0],
        [0, 0, 2, 0, 0, 0],
        [0, 2, 0, 0, 0, 0],
        [-2, 0, 0, 0, 0, 0],
    ]
)
Q_OMEGA3 = np.array(
    [
        [0, 0, 0, 0, 0, -2],
        [0, 0, 0, 0, 2, 0],
        [0, 0, 0, -2, 0, 0],
        [0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0],
    ]
)


def as_int(m):
    return np.array([[int(x) for x in row] for row in m])


def test_frozen_q_values():
    assert (as_int(q_operator(OMEGA1)) == Q_OMEGA1).all()
    assert (as_int(q_operator(OMEGA2)) == Q_OMEGA2).all()
    assert (as_int(q_operator(OMEGA3)) == Q_OMEGA3).all()


@pytest.mark.slow
@pytest.mark.parametrize("name,omega,frozen", [("w1", OMEGA1, Q_OMEGA1), ("w2", OMEGA2, Q_OMEGA2), ("w3", OMEGA3, Q_OMEGA3)])
def test_oracle_reproduces_frozen(name, omega, frozen):
    q = oracles.q_oracle(dict(omega.coeffs))
    assert q == sympy.Matrix(frozen)


@pytest.mark.slow
def test_q_matches_oracle_on_random_form():
    rng = np.random.default_rng(3)
    a = random_rational_form(rng, density=0.4)
    want = oracles.q_oracle(dict(a.coeffs))
    got = q_operator(a)
    assert sympy.Matrix(6, 6, lambda i, j: sympy.Rational(got[i, j])) == want


def test_q_scales_inversely_with_theta():
    theta = volume_form().scale(F(2))
    q = q_operator(OMEGA2, theta)
    assert (q * 2 == q_operator(OMEGA2)).all()


def test_canonical_labels():
    assert classify(OMEGA1).label is TypeLabel.TYPE1
    assert classify(OMEGA2).label is TypeLabel.TYPE2
    assert classify(OMEGA3).label is TypeLabel.TYPE3
    assert classify(alpha(6, 1, 2, 3)).label is TypeLabel.NOT_MULTISYMPLECTIC
    assert classify(KForm.zero(6, 3)).label is TypeLabel.NOT_MULTISYMPLECTIC


def test_lambda_values():
    assert lambda_invariant(OMEGA1) == 1
    assert lambda_invariant(OMEGA2) == -4
    assert lambda_invariant(OMEGA3) == 0
    assert lambda_invariant(NORMAL_FORM) == -4


def test_type1_eigenspaces():
    r = classify(OMEGA1)
    plus = linalg.rank(np.column_stack(r.delta_basis + [linalg.identity(6)[:, i] for i in range(3)]))
    minus = linalg.rank(np.column_stack(r.delta_basis_minus + [linalg.identity(6)[:, i] for i in range(3, 6)]))
    assert plus == 3 and minus == 3


def test_type3_kernel():
    r = classify(OMEGA3)
    span = np.column_stack(r.delta_basis)
    assert linalg.rank(span) == 3
    assert all(x == 0 for x in span[3:].ravel())


def test_type1_rational_root_stays_exact():
    r = classify(form(6, [((1, 2, 3),), (3, (4, 5, 6))]))
    assert r.lam == 9 and r.backend == "exact"


def test_type1_irrational_root_falls_back_to_float():
    # real part of (a1 + s a4)(a2 + s a5)(a3 + s a6) with s^2 = 2
    w = form(6, [((1, 2, 3),), (2, (1, 5, 6)), (-2, (2, 4, 6)), (2, (3, 4, 5))])
    r = classify(w)
    assert r.label is TypeLabel.TYPE1 and r.lam == 32 and r.backend == "float"
    for v in r.delta_basis + r.delta_basis_minus:
        assert delta_residual(w.to_float(), v).max_abs() < 1e-12


def test_float_backend_labels_and_band():
    assert classify(OMEGA2.to_float()).label is TypeLabel.TYPE2
    assert classify(OMEGA1.to_float()).label is TypeLabel.TYPE1
    assert classify(OMEGA3.to_float()).label is TypeLabel.INDETERMINATE
    tiny = OMEGA3.to_float() + KForm(6, 3, {(1, 2, 3): 1e-6}, "float")
    assert classify(tiny).label is TypeLabel.TYPE1


def test_not_three_form_raises():
    with pytest.raises(DimensionMismatch):
        classify(alpha(6, 1, 2))


def test_report_json_shape():
    j = classify(OMEGA1).to_json()
    assert j["type"] == "Type1" and set(j["delta_basis"]) == {"plus", "minus"}
    j = classify(OMEGA2).to_json()
    assert j["lambda"] == "-4" and j["Q"][0] == ["0", "0", "0", "0", "0", "-2"]


@settings(max_examples=80, deadline=None)
@given(three_forms())
def test_q_squared_is_scalar(a):
    q = q_operator(a)
    lam = lambda_invariant(a)
    assert linalg.is_scalar_matrix(q @ q, lam)


@settings(max_examples=40, deadline=None)
@given(three_forms())
def test_type_invariant_under_gl(a):
    rng = np.random.default_rng(abs(hash(a)) % 2**32)
    p = random_invertible(rng)
    assert classify(pullback(p, a)).label == classify(a).label


@settings(max_examples=40, deadline=None)
@given(three_forms())
def test_lambda_transforms_by_det_squared(a):
    rng = np.random.default_rng(abs(hash(a)) % 2**32)
    p = random_invertible(rng)
    assert lambda_invariant(pullback(p, a)) == linalg.det(p) ** 2 * lambda_invariant(a)


@settings(max_examples=40, deadline=None)
@given(three_forms())
def test_multisymplectic_iff_iota_injective(a):
    m = is_multisymplectic(a)
    if not m:
        assert classify(a).label is TypeLabel.NOT_MULTISYMPLECTIC


def test_delta_membership_lemmas_on_omega2():
    rng = np.random.default_rng(5)
    q = q_operator(OMEGA2)
    for _ in range(30):
        v = random_rational_vector(rng)
        qv = q @ v
        assert interior(qv, interior(v, OMEGA2)).is_zero()
        assert wedge(interior(v, OMEGA2), interior(qv, OMEGA2)).is_zero()
        if any(x != 0 for x in v):
            assert not delta_residual(OMEGA2, v).is_zero()
