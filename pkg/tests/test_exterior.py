from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import random_invertible, random_rational_form, random_rational_vector, three_forms, vectors
from sixform import linalg
from sixform.errors import BackendMismatch, DegenerateVolume, DimensionMismatch
from sixform.exterior import (
    KForm,
    alpha,
    basis_vector,
    dualize_five,
    eval_form,
    form,
    interior,
    pullback,
    sort_with_sign,
    vector,
    volume_form,
    wedge,
)


def test_sort_with_sign_matches_parity_oracle():
    for seq in [(1, 2, 3), (2, 1, 3), (3, 1, 2), (6, 4, 5, 1), (5, 4, 3, 2, 1)]:
        sign, key = sort_with_sign(seq)
        assert key == tuple(sorted(seq))
        assert sign == oracles.parity_sign(list(seq))


def test_sort_with_sign_repeated_index_is_zero():
    sign, key = sort_with_sign((1, 3, 1))
    assert sign == 0 and key is None


def test_from_terms_folds_permutation_signs():
    f = KForm.from_terms(6, 3, [((2, 1, 3), 1), ((1, 2, 3), 5), ((4, 4, 5), 7)])
    assert dict(f.coeffs) == {(1, 2, 3): Fraction(4)}


def test_constructor_rejects_unsorted_and_out_of_range():
    with pytest.raises(ValueError):
        KForm(6, 3, {(2, 1, 3): 1})
    with pytest.raises(DimensionMismatch):
        KForm(6, 3, {(1, 2, 7): 1})
    with pytest.raises(DimensionMismatch):
        KForm(6, 3, {(1, 2): 1})


def test_signed_getitem():
    f = alpha(6, 1, 2, 3)
    assert f[(2, 1, 3)] == -1
    assert f[(3, 1, 2)] == 1
    assert f[(1, 1, 2)] == 0


def test_mixing_float_and_exact_raises():
    with pytest.raises(BackendMismatch):
        alpha(6, 1, 2, 3) + alpha(6, 1, 2, 3).to_float()


def test_wedge_of_basis_one_forms():
    w = wedge(wedge(alpha(6, 1), alpha(6, 2)), alpha(6, 3))
    assert w == alpha(6, 1, 2, 3)
    assert wedge(alpha(6, 2), alpha(6, 1)) == alpha(6, 1, 2, coef=-1)


def test_wedge_too_high_degree_is_zero():
    assert wedge(alpha(6, 1, 2, 3, 4), alpha(6, 5, 6, 1)).is_zero()


@pytest.mark.parametrize("seed", range(4))
def test_wedge_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    a = random_rational_form(rng, density=0.5)
    b = KForm.from_terms(6, 2, [((1, 2), Fraction(3)), ((3, 5), Fraction(-1, 2)), ((4, 6), Fraction(2))])
    expected = oracles.wedge_oracle(6, dict(b.coeffs), 2, dict(a.coeffs), 3)
    assert dict(wedge(b, a).coeffs) == expected


@pytest.mark.parametrize("seed", range(4))
def test_interior_matches_oracle(seed):
    rng = np.random.default_rng(100 + seed)
    a = random_rational_form(rng)
    v = random_rational_vector(rng)
    expected = oracles.interior_oracle(6, list(v), dict(a.coeffs), 3)
    assert dict(interior(v, a).coeffs) == expected


@pytest.mark.parametrize("seed", range(4))
def test_eval_form_matches_oracle(seed):
    rng = np.random.default_rng(200 + seed)
    a = random_rational_form(rng)
    vs = [random_rational_vector(rng) for _ in range(3)]
    assert eval_form(a, *vs) == oracles.full_eval(dict(a.coeffs), [list(v) for v in vs])


def test_interior_first_slot_sign():
    # iota_{e2} a123 = -a13
    assert interior(basis_vector(6, 2), alpha(6, 1, 2, 3)) == alpha(6, 1, 3, coef=-1)


@settings(max_examples=60, deadline=None)
@given(three_forms(), vectors(), vectors())
def test_interior_twice_is_antisymmetric(a, u, v):
    left = interior(u, interior(v, a))
    right = interior(v, interior(u, a))
    assert left == -right


@settings(max_examples=40, deadline=None)
@given(three_forms(), vectors())
def test_interior_is_antiderivation(a, v):
    b = KForm.from_terms(6, 1, [((1,), Fraction(2)), ((4,), Fraction(-1))])
    lhs = interior(v, wedge(b, a))
    # iota(b ^ a) = b(v) a - b ^ iota a for a 1-form b
    rhs = a.scale(eval_form(b, v)) - wedge(b, interior(v, a))
    assert lhs == rhs


@settings(max_examples=40, deadline=None)
@given(three_forms(), three_forms())
def test_wedge_graded_commutativity(a, b):
    one = KForm.from_terms(6, 1, [((2,), Fraction(1)), ((5,), Fraction(3))])
    # odd degrees anticommute
    assert wedge(one, a) == -wedge(a, one)
    two = wedge(one, alpha(6, 6))
    assert wedge(two, a) == wedge(a, two)


@settings(max_examples=40, deadline=None)
@given(three_forms(), vectors(), vectors(), vectors())
def test_eval_alternates(a, u, v, w):
    assert eval_form(a, u, v, w) == -eval_form(a, v, u, w)
    assert eval_form(a, u, v, w) == eval_form(a, v, w, u)
    assert eval_form(a, u, u, w) == 0


def test_pullback_identity_and_composition():
    rng = np.random.default_rng(7)
    a = random_rational_form(rng)
    p = random_invertible(rng)
    q = random_invertible(rng)
    assert pullback(linalg.identity(6), a) == a
    assert pullback(p @ q, a) == pullback(q, pullback(p, a))


def test_pullback_defining_property():
    rng = np.random.default_rng(8)
    a = random_rational_form(rng)
    p = random_invertible(rng)
    vs = [random_rational_vector(rng) for _ in range(3)]
    assert eval_form(pullback(p, a), *vs) == eval_form(a, *(p @ v for v in vs))


def test_pullback_of_volume_is_determinant():
    rng = np.random.default_rng(9)
    p = random_invertible(rng)
    got = pullback(p, volume_form())
    assert got[(1, 2, 3, 4, 5, 6)] == linalg.det(p)


def test_pullback_dimension_check():
    with pytest.raises(DimensionMismatch):
        pullback(linalg.identity(5), alpha(6, 1, 2, 3))


def test_dualize_five_inverts_interior():
    rng = np.random.default_rng(11)
    theta = volume_form().scale(Fraction(3, 2))
    for _ in range(10):
        v = random_rational_vector(rng)
        rho = interior(v, theta)
        assert list(dualize_five(rho, theta)) == list(v)


def test_dualize_five_zero_volume():
    with pytest.raises(DegenerateVolume):
        dualize_five(alpha(6, 1, 2, 3, 4, 5), KForm.zero(6, 6))


def test_float_backend_round_trip():
    a = form(6, [((1, 2, 3),), (Fraction(1, 3), (2, 4, 6))])
    f = a.to_float()
    assert f.backend == "float"
    assert f.to_exact() == form(6, [((1, 2, 3),), (Fraction(6004799503160661, 18014398509481984), (2, 4, 6))])
    assert abs(eval_form(f, *(basis_vector(6, i, "float") for i in (2, 4, 6))) - 1 / 3) < 1e-15


def test_json_round_trip():
    a = form(6, [((1, 2, 3),), (Fraction(-5, 7), (3, 5, 6))])
    assert KForm.from_json(a.to_json()) == a


def test_json_degree_mismatch():
    with pytest.raises(DimensionMismatch):
        KForm.from_json({"dim": 6, "degree": 3, "terms": [{"idx": [1, 2], "coef": "1"}]})


@given(st.lists(st.integers(-4, 4), min_size=6, max_size=6))
def test_vector_backend_inference(comps):
    v = vector(comps)
    assert v.dtype == object
    assert all(isinstance(c, Fraction) for c in v)
