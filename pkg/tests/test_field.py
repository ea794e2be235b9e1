import json
import math
from fractions import Fraction

import numpy as np
import pytest

from conftest import SIGMA_TEXT
from fields import integrable_field, twisted_field, unclosed_field
from sixform import OMEGA2
from sixform.acs import NORMAL_FORM, complex_structures
from sixform.classify import TypeLabel
from sixform.errors import NotTypeTwo, NotTypeTwoAtPoint
from sixform.field import (
    exterior_derivative,
    grid_points,
    integrability,
    j_at,
    nijenhuis_at,
    sample_points,
    scan_types,
    type_at,
)
from sixform.formlang import FormField, parse_field

SIGMA = parse_field(SIGMA_TEXT)
BOX = [(-1, 1)] * 6


def test_d_of_sigma_cancels_syntactically():
    assert exterior_derivative(SIGMA).is_zero()


def test_d_of_constant_is_zero():
    assert exterior_derivative(FormField.constant(NORMAL_FORM)).is_zero()


def test_d_of_unclosed_field():
    d = exterior_derivative(unclosed_field())
    assert list(d.terms) == [(1, 2, 3, 4)]
    assert d.degree == 4


def test_d_squared_is_zero():
    f = twisted_field()
    assert exterior_derivative(exterior_derivative(f)).is_zero()
    one = parse_field("x1*x2*dx3^dx4^dx5 + sin(x6)*x1*dx1^dx2^dx4")
    assert exterior_derivative(exterior_derivative(one)).is_zero()


@pytest.mark.parametrize(
    "x3,label",
    [("pi", TypeLabel.TYPE3), ("pi/2", TypeLabel.TYPE1), ("3*pi/2", TypeLabel.TYPE2), ("0", TypeLabel.TYPE3)],
)
def test_sigma_strata_exact(x3, label):
    point = [0, 0, x3, 0, 0, 0]
    assert SIGMA.evaluate(point).backend == "exact"
    r = type_at(SIGMA, point)
    # the sign of lambda is decided exactly; only irrational eigenvectors use floats
    assert isinstance(r.lam, Fraction)
    assert r.label is label


def test_sigma_float_points():
    assert type_at(SIGMA, [0, 0, 1.0, 0, 0, 0]).label is TypeLabel.TYPE1
    assert type_at(SIGMA, [0, 0, 4.0, 0, 0, 0]).label is TypeLabel.TYPE2


def test_j_at_requires_type2():
    j = j_at(FormField.constant(OMEGA2), [0] * 6)
    assert (j == complex_structures(OMEGA2)[0].j).all()
    with pytest.raises(NotTypeTwoAtPoint):
        j_at(SIGMA, [0, 0, "pi/2", 0, 0, 0])
    assert issubclass(NotTypeTwoAtPoint, NotTypeTwo)


def test_grid_points_row_major():
    pts = grid_points([(0, 1), (0, 0), (0, 0), (0, 0), (0, 0), (2, 3)], [2, 1, 1, 1, 1, 2])
    assert pts.tolist() == [[0, 0, 0, 0, 0, 2], [0, 0, 0, 0, 0, 3], [1, 0, 0, 0, 0, 2], [1, 0, 0, 0, 0, 3]]


def test_sigma_line_scan_matches_sign_of_sine():
    box = [(0, 0), (0, 0), (0.05, 6.2), (0, 0), (0, 0), (0, 0)]
    scan = scan_types(SIGMA, box, [1, 1, 100, 1, 1, 1])
    assert len(scan.labels) == 100
    for p, lab in zip(scan.points, scan.labels):
        s = math.sin(p[2] + p[3])
        if abs(s) > 1e-3:
            assert lab == ("Type1" if s > 0 else "Type2")


def test_scan_exact_retry_at_zero():
    box = [(0, 0), (0, 0), (0, 1), (0, 0), (0, 0), (0, 0)]
    scan = scan_types(SIGMA, box, [1, 1, 3, 1, 1, 1])
    assert scan.labels[0] == "Type3"


def test_scan_parallel_matches_serial():
    box = [(0, 0), (0, 0), (0.1, 6), (-0.5, 0.5), (0, 0), (0, 0)]
    res = [1, 1, 12, 3, 1, 1]
    a = scan_types(SIGMA, box, res)
    b = scan_types(SIGMA, box, res, jobs=2)
    assert a.labels == b.labels
    assert np.allclose(a.lambdas, b.lambdas)


def test_scan_outputs():
    box = [(0, 0), (0, 0), (1, 4), (0, 0), (0, 0), (0, 0)]
    scan = scan_types(SIGMA, box, [1, 1, 2, 1, 1, 1])
    lines = scan.to_csv().splitlines()
    assert lines[0] == "x1,x2,x3,x4,x5,x6,label,lambda"
    assert lines[1].endswith(",Type1," + repr(scan.lambdas[0]))
    js = [json.loads(s) for s in scan.to_jsonl().splitlines()]
    assert js[0]["grid"]["resolution"] == [1, 1, 2, 1, 1, 1]
    assert js[2]["label"] == "Type2"


def test_scan_reports_domain_errors():
    f = parse_field("sqrt(x1)*dx1^dx2^dx3 - dx1^dx5^dx6 + dx2^dx4^dx6 - dx3^dx4^dx5")
    scan = scan_types(f, [(-1, 1), (0, 0), (0, 0), (0, 0), (0, 0), (0, 0)], [3, 1, 1, 1, 1, 1])
    assert scan.labels[0] == "error"


def test_sample_points_deterministic():
    a = sample_points(BOX, 5, seed=3)
    b = sample_points(BOX, 5, seed=3)
    assert (a == b).all() and ((a >= -1) & (a <= 1)).all()


def test_constant_fields_integrable():
    for w in (NORMAL_FORM, OMEGA2):
        r = integrability(FormField.constant(w), BOX, sample_count=20)
        assert r.verdict == "integrable"
        assert r.closed_by == "syntactic"


def test_unclosed_field_not_integrable():
    box = [(-1, 1), (-1, 1), (-1, 1), (0.5, 1.5), (-1, 1), (-1, 1)]
    r = integrability(unclosed_field(), box, sample_count=30)
    assert not r.closed and r.closed_by == "sampling"
    assert r.verdict == "not-integrable"
    assert r.d_max >= 0.999


def test_integrable_non_constant_field():
    r = integrability(integrable_field(), BOX, sample_count=20)
    assert r.closed_by == "syntactic"
    assert r.nijenhuis_max < 1e-12
    assert r.verdict == "integrable"


def test_twisted_field_not_integrable():
    r = integrability(twisted_field(), BOX, sample_count=20)
    assert r.verdict == "not-integrable"
    assert r.nijenhuis_max > 0.1


def test_mixed_types_are_indeterminate():
    box = [(0, 0), (0, 0), (0.5, 4.0), (0, 0), (0, 0), (0, 0)]
    r = integrability(SIGMA, box, sample_count=20)
    assert r.verdict == "indeterminate"
    assert any("not of type 2" in s for s in r.reasons)


def test_sigma_type2_region_verdict():
    # closed, but J is not integrable there
    box = [(0, 0), (0, 0), (3.3, 4.0), (0, 0), (0, 0), (0, 0)]
    r = integrability(SIGMA, box, sample_count=20)
    assert r.closed and r.verdict == "not-integrable"


def test_nijenhuis_modes_agree_on_twisted_field():
    f = twisted_field()
    for p in sample_points(BOX, 10, seed=1):
        s = nijenhuis_at(f, p)
        d = nijenhuis_at(f, p, mode="fd")
        r = nijenhuis_at(f, p, mode="fd", richardson=True)
        assert abs(s - d) <= 1e-4 * max(1.0, s)
        assert abs(s - r) <= 1e-6 * max(1.0, s)


def test_nijenhuis_constant_field_is_zero():
    assert nijenhuis_at(FormField.constant(OMEGA2), [0] * 6) == 0.0
    assert nijenhuis_at(FormField.constant(OMEGA2), [0.1] * 6, mode="fd") < 1e-12


def test_nijenhuis_unknown_mode():
    with pytest.raises(ValueError):
        nijenhuis_at(twisted_field(), [0] * 6, mode="bogus")


def test_report_json():
    r = integrability(FormField.constant(NORMAL_FORM), BOX, sample_count=5, seed=9)
    j = r.to_json()
    assert j["verdict"] == "integrable" and j["seed"] == 9 and j["samples"] == 5
    json.dumps(j)
