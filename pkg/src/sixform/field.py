"""Chart-level operations on 3-form fields: d, pointwise types, J-fields, Nijenhuis.

The integrability verdict follows the Darboux criterion for type-2 forms:
the field has constant coefficients in suitable coordinates exactly when
it is closed and its almost complex structure has vanishing Nijenhuis
tensor. Both conditions are checked numerically at sample points; the
first one is decided symbolically when the coefficients cancel.

J is always the plus branch for the one global volume form, so on a
connected type-2 region it varies continuously.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import kernels
from .acs import complex_structures
from .classify import TypeLabel, TypeReport, classify
from .errors import (
    EvaluationDomain,
    NegativeSqrtDomain,
    NotTypeTwo,
    NotTypeTwoAtPoint,
    NotTypeTwoNearPoint,
    SixformError,
)
from .exterior import KForm, volume_form
from .formlang import (
    Const,
    Expr,
    FormField,
    _lift,
    depends_on,
    diff_expr,
    eval_float,
    neg,
    parse_point,
    sqrt,
)
from .scalars import EXACT, FLOAT, default_tolerance

NCOORDS = 6
FD_STEP = 1e-5
DEFAULT_SAMPLES = 200


def exterior_derivative(f: FormField) -> FormField:
    """d(c dx_I) = sum_i dc/dx_i dx_i ^ dx_I, signs folded by index sorting."""
    if f.degree >= NCOORDS:
        raise ValueError("exterior derivative of a top-degree field")
    pairs = []
    for idx, e in f.terms.items():
        for i in range(1, NCOORDS + 1):
            if i in idx or not depends_on(e, i):
                continue
            pairs.append(((i,) + idx, diff_expr(e, i)))
    return FormField.from_terms(f.degree + 1, pairs)


def _theta_scale(theta: KForm | None) -> float:
    if theta is None:
        return 1.0
    return float(theta.coeffs[(1, 2, 3, 4, 5, 6)])


def _theta_like(omega: KForm, theta: KForm | None) -> KForm | None:
    if theta is None:
        return None
    return theta.to_backend(FLOAT if omega.backend == FLOAT else EXACT)


def type_at(f: FormField, point, theta: KForm | None = None) -> TypeReport:
    omega = f.evaluate(point)
    return classify(omega, _theta_like(omega, theta))


def j_at(f: FormField, point, theta: KForm | None = None) -> np.ndarray:
    """J_plus of the field at ``point``."""
    omega = f.evaluate(point)
    try:
        jp, _ = complex_structures(omega, _theta_like(omega, theta))
    except NotTypeTwo as exc:
        raise NotTypeTwoAtPoint(f"not of type 2 at {list(point)}: {exc}") from exc
    return jp.j


# ---------------------------------------------------------------- scans


@dataclass
class TypeScan:
    points: np.ndarray
    labels: list[str]
    lambdas: list[float]
    box: list[tuple[float, float]]
    resolution: list[int]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"x{i}" for i in range(1, NCOORDS + 1)] + ["label", "lambda"])
        for p, lab, lam in zip(self.points, self.labels, self.lambdas):
            w.writerow([repr(float(x)) for x in p] + [lab, repr(float(lam))])
        return buf.getvalue()

    def to_jsonl(self) -> str:
        meta = {"box": [list(b) for b in self.box], "resolution": self.resolution}
        lines = [json.dumps({"grid": meta})]
        for p, lab, lam in zip(self.points, self.labels, self.lambdas):
            lines.append(json.dumps({"point": [float(x) for x in p], "label": lab, "lambda": float(lam)}))
        return "\n".join(lines) + "\n"


def grid_points(box, resolution) -> np.ndarray:
    """Row-major grid (last axis fastest); a degenerate axis contributes one value."""
    axes = []
    for (lo, hi), n in zip(box, resolution):
        if n < 1:
            raise ValueError("resolution must be >= 1 on every axis")
        axes.append(np.array([float(lo)]) if n == 1 or lo == hi else np.linspace(float(lo), float(hi), n))
    return np.array(list(itertools.product(*axes)), dtype=float).reshape(-1, NCOORDS)


def _label_dense(coeffs: np.ndarray, lam: float, ms: bool, theta_scale: float) -> str:
    """Same decision policy as ``classify`` on the float backend."""
    if not ms or not np.any(coeffs):
        return TypeLabel.NOT_MULTISYMPLECTIC.value
    band = 1e-8 * float(np.max(np.abs(coeffs))) ** 4 / theta_scale**2
    if abs(lam) < band:
        return TypeLabel.INDETERMINATE.value
    if lam < 0:
        return TypeLabel.TYPE2.value
    return TypeLabel.TYPE1.value


def _coeff_rows(f: FormField, points) -> tuple[np.ndarray, list[str | None]]:
    keys = kernels.TRIPLES
    rows = np.zeros((len(points), 20))
    errors: list[str | None] = [None] * len(points)
    exprs = [(keys.index(idx), e) for idx, e in f.terms.items()]
    for n, p in enumerate(points):
        cache: dict = {}
        try:
            for col, e in exprs:
                rows[n, col] = eval_float(e, p, cache)
        except EvaluationDomain as exc:
            errors[n] = str(exc)
    return rows, errors


def scan_types(
    f: FormField,
    box,
    resolution,
    theta: KForm | None = None,
    jobs: int = 1,
) -> TypeScan:
    """Label every grid point; evaluation failures become the label 'error'."""
    if f.degree != 3:
        raise ValueError("type scans need a 3-form field")
    box = [(float(lo), float(hi)) for lo, hi in box]
    resolution = [int(n) for n in resolution]
    pts = grid_points(box, resolution)
    scale = _theta_scale(theta)
    if jobs > 1 and len(pts) > 1:
        chunks = np.array_split(pts, jobs)
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(jobs) as pool:
            parts = list(pool.map(_scan_chunk, [(f, c, scale) for c in chunks]))
        labels = [x for part in parts for x in part[0]]
        lams = [x for part in parts for x in part[1]]
    else:
        labels, lams = _scan_chunk((f, pts, scale))
    return TypeScan(pts, labels, lams, box, resolution)


def _scan_chunk(args):
    f, pts, scale = args
    rows, errors = _coeff_rows(f, pts)
    q = kernels.q_batch(rows, scale)
    lam = kernels.lambda_batch(q)
    ms = kernels.multisymplectic_batch(rows)
    labels, lams = [], []
    for n in range(len(pts)):
        if errors[n] is not None:
            labels.append("error")
            lams.append(float("nan"))
        else:
            label = _label_dense(rows[n], float(lam[n]), bool(ms[n]), scale)
            value = float(lam[n])
            if label == TypeLabel.INDETERMINATE.value:
                label, value = _retry_exact(f, pts[n], scale, label, value)
            labels.append(label)
            lams.append(value)
    return labels, lams


def _retry_exact(f: FormField, p, scale: float, label: str, value: float):
    """Grid points are dyadic rationals; when the coefficients are exact there, decide exactly."""
    omega = f.evaluate([Fraction(float(c)) for c in p])
    if omega.backend != EXACT:
        return label, value
    theta = volume_form(6).scale(Fraction(scale))
    report = classify(omega, theta)
    return report.label.value, float(report.lam)


# ---------------------------------------------------------------- Nijenhuis


class SymbolicJ:
    """Closed-form J = Q / sqrt(-lambda) and its partial derivatives as expressions."""

    def __init__(self, f: FormField, theta: KForm | None = None):
        from .classify import q_operator

        theta = volume_form(6) if theta is None else theta.to_backend(EXACT)
        q = q_operator(f.as_kform(), theta)
        self.q = [[_lift(q[k, j]) for j in range(6)] for k in range(6)]
        lam = sum((self.q[i][m] * self.q[m][i] for i in range(6) for m in range(6)), Const(0)) / 6
        self.lam = _lift(lam)
        self.root = sqrt(neg(self.lam))
        self.j = [[_lift(self.q[k][m]) / self.root for m in range(6)] for k in range(6)]
        self._dj = None

    @property
    def dj(self):
        if self._dj is None:
            out = []
            for l in range(1, NCOORDS + 1):
                memo: dict = {}
                out.append([[diff_expr(self.j[k][m], l, memo) for m in range(6)] for k in range(6)])
            self._dj = out
        return self._dj

    def evaluate(self, point):
        cache: dict = {}
        lam = eval_float(self.lam, point, cache)
        if not lam < 0:
            raise NegativeSqrtDomain(f"lambda = {lam:.6g} >= 0 at {list(point)}")
        j = np.array([[eval_float(e, point, cache) for e in row] for row in self.j])
        dj = np.array([[[eval_float(e, point, cache) for e in row] for row in block] for block in self.dj])
        return j, dj


@lru_cache(maxsize=32)
def _symbolic_j(f: FormField, theta_key) -> SymbolicJ:
    theta = None if theta_key is None else KForm(6, 6, {(1, 2, 3, 4, 5, 6): theta_key})
    return SymbolicJ(f, theta)


def _theta_key(theta: KForm | None):
    if theta is None:
        return None
    return theta.to_exact().coeffs[(1, 2, 3, 4, 5, 6)]


def _j_numeric(f: FormField, point, scale: float) -> np.ndarray:
    rows, errors = _coeff_rows(f, [point])
    if errors[0]:
        raise EvaluationDomain(errors[0])
    jm, lam = kernels.j_batch(rows, scale)
    if not lam[0] < 0:
        raise NegativeSqrtDomain(f"lambda = {lam[0]:.6g} >= 0 at stencil point {list(point)}")
    if not kernels.multisymplectic_batch(rows)[0]:
        raise NotTypeTwoNearPoint(f"not multisymplectic at {list(point)}")
    return jm[0]


def _fd_derivatives(f: FormField, p: np.ndarray, h: float, scale: float) -> np.ndarray:
    dj = np.zeros((6, 6, 6))
    for l in range(6):
        step = h * max(1.0, abs(p[l]))
        up, down = p.copy(), p.copy()
        up[l] += step
        down[l] -= step
        dj[l] = (_j_numeric(f, up, scale) - _j_numeric(f, down, scale)) / (2 * step)
    return dj


def nijenhuis_at(
    f: FormField,
    point,
    mode: str = "symbolic",
    h: float = FD_STEP,
    theta: KForm | None = None,
    richardson: bool = False,
) -> float:
    """Max |N(d_i, d_j)^k| at ``point``.

    Modes: ``symbolic`` differentiates the closed-form J entries;
    ``fd`` uses central differences of J with step ``h`` (relative to |x|),
    optionally Richardson-extrapolated from h and h/2.
    """
    p = np.array([float(x) for x in _float_point(point)])
    scale = _theta_scale(theta)
    if mode == "symbolic":
        if f.is_constant():
            return 0.0
        sym = _symbolic_j(f, _theta_key(theta))
        try:
            j, dj = sym.evaluate(p)
        except NegativeSqrtDomain as exc:
            raise NotTypeTwoNearPoint(str(exc)) from exc
        if not kernels.multisymplectic_batch(_coeff_rows(f, [p])[0])[0]:
            raise NotTypeTwoNearPoint(f"not multisymplectic at {list(p)}")
    elif mode == "fd":
        j = _j_numeric(f, p, scale)
        dj = _fd_derivatives(f, p, h, scale)
        if richardson:
            dj = (4 * _fd_derivatives(f, p, h / 2, scale) - dj) / 3
    else:
        raise ValueError(f"unknown Nijenhuis mode {mode!r}")
    n = kernels.nijenhuis_tensor(j, dj)
    return float(np.max(np.abs(n)))


def _float_point(point):
    pts = parse_point(point) if not isinstance(point, np.ndarray) else list(point)
    return [eval_float(v, [0.0] * NCOORDS) if isinstance(v, Expr) else float(v) for v in pts]


# ---------------------------------------------------------------- verdict


@dataclass
class IntegrabilityReport:
    closed: bool
    closed_by: str
    d_max: float
    nijenhuis_max: float
    verdict: str
    samples: int
    tolerances: dict
    reasons: list[str] = field(default_factory=list)
    mode: str = "symbolic"
    seed: int | None = None
    box: list | None = None

    def to_json(self) -> dict:
        return {
            "closed": self.closed,
            "closed_by": self.closed_by,
            "d_max": self.d_max,
            "nijenhuis_max": self.nijenhuis_max,
            "verdict": self.verdict,
            "samples": self.samples,
            "mode": self.mode,
            "seed": self.seed,
            "box": self.box,
            "tolerances": self.tolerances,
            "reasons": self.reasons,
        }


def sample_points(box, count: int, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    lo = np.array([float(a) for a, _ in box])
    hi = np.array([float(b) for _, b in box])
    return lo + (hi - lo) * rng.random((count, NCOORDS))


def integrability(
    f: FormField,
    box,
    sample_count: int = DEFAULT_SAMPLES,
    theta: KForm | None = None,
    tol: float | None = None,
    seed: int = 0,
    mode: str = "symbolic",
    nijenhuis_tol: float | None = None,
) -> IntegrabilityReport:
    """Integrable iff closed and N vanishes at every sample (all samples type 2)."""
    if f.degree != 3:
        raise ValueError("integrability needs a 3-form field")
    tol = default_tolerance() if tol is None else tol
    if nijenhuis_tol is None:
        nijenhuis_tol = 1e-8 if mode == "symbolic" else 1e-4
    pts = sample_points(box, sample_count, seed)
    scale = _theta_scale(theta)
    reasons: list[str] = []

    df = exterior_derivative(f)
    rows, errors = _coeff_rows(f, pts)
    coeff_scale = max(float(np.max(np.abs(rows))) if rows.size else 0.0, 1.0)
    if df.is_zero():
        closed, closed_by, d_max = True, "syntactic", 0.0
    else:
        d_max = 0.0
        for p in pts:
            cache: dict = {}
            try:
                vals = [abs(eval_float(e, p, cache)) for e in df.terms.values()]
            except EvaluationDomain as exc:
                reasons.append(f"d evaluation failed: {exc}")
                continue
            d_max = max(d_max, max(vals, default=0.0))
        closed = d_max <= tol * coeff_scale
        closed_by = "sampling"

    q = kernels.q_batch(rows, scale)
    lam = kernels.lambda_batch(q)
    ms = kernels.multisymplectic_batch(rows)
    all_type2 = True
    for n, p in enumerate(pts):
        if errors[n]:
            reasons.append(f"sample {n}: {errors[n]}")
            all_type2 = False
        elif _label_dense(rows[n], float(lam[n]), bool(ms[n]), scale) != TypeLabel.TYPE2.value:
            reasons.append(f"sample {n} at {p.tolist()} is not of type 2")
            all_type2 = False

    nij_max = 0.0
    if all_type2:
        for n, p in enumerate(pts):
            try:
                nij_max = max(nij_max, nijenhuis_at(f, p, mode=mode, theta=theta))
            except SixformError as exc:
                reasons.append(f"sample {n}: {exc}")
                all_type2 = False
                break

    if not all_type2:
        verdict = "indeterminate"
    elif closed and nij_max <= nijenhuis_tol:
        verdict = "integrable"
    else:
        verdict = "not-integrable"
        if not closed:
            reasons.append(f"d(omega) reaches {d_max:.3g}")
        if nij_max > nijenhuis_tol:
            reasons.append(f"Nijenhuis tensor reaches {nij_max:.3g}")
    return IntegrabilityReport(
        closed=closed,
        closed_by=closed_by,
        d_max=d_max,
        nijenhuis_max=nij_max,
        verdict=verdict,
        samples=sample_count,
        tolerances={"closed": tol, "closed_scale": coeff_scale, "nijenhuis": nijenhuis_tol,
                    "lambda_band": 1e-8, "fd_step": FD_STEP},
        reasons=reasons,
        mode=mode,
        seed=seed,
        box=[[float(a), float(b)] for a, b in box],
    )
