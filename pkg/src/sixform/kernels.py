"""Dense float kernels for batches of 3-forms on R^6.

A 3-form is a length-20 vector of coefficients in lexicographic order of
``i < j < k``. The Q operator is a fixed quadratic map of that vector, so
it is tabulated once from the exact exterior algebra and then applied to
many points at a time (type scans, finite-difference stencils).

Kernels are compiled with numba when it is importable; set
``SIXFORM_NUMBA=0`` to force the pure-numpy path.
"""

from __future__ import annotations

import itertools
import os
from functools import lru_cache

import numpy as np

TRIPLES = list(itertools.combinations(range(1, 7), 3))
PAIRS = list(itertools.combinations(range(1, 7), 2))


def _numba_requested() -> bool:
    return os.environ.get("SIXFORM_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")


try:
    if not _numba_requested():
        raise ImportError("disabled by SIXFORM_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


@lru_cache(maxsize=None)
def q_table():
    """Sparse table (k, j, a, b, value): Q[k, j] += value * c[a] * c[b] for theta = a123456."""
    from .exterior import KForm, basis_vector, dualize_five, interior, volume_form, wedge

    theta = volume_form(6)
    basis = [KForm(6, 3, {t: 1}) for t in TRIPLES]
    rows = []
    for j in range(6):
        e = basis_vector(6, j + 1)
        for a, fa in enumerate(basis):
            two = interior(e, fa)
            if not two.coeffs:
                continue
            for b, fb in enumerate(basis):
                col = dualize_five(wedge(two, fb), theta)
                for k in range(6):
                    if col[k] != 0:
                        rows.append((k, j, a, b, float(col[k])))
    arr = np.array(rows)
    return (
        arr[:, 0].astype(np.int64),
        arr[:, 1].astype(np.int64),
        arr[:, 2].astype(np.int64),
        arr[:, 3].astype(np.int64),
        arr[:, 4].copy(),
    )


@lru_cache(maxsize=None)
def q_dense_table() -> np.ndarray:
    ks, js, as_, bs, vals = q_table()
    t = np.zeros((6, 6, 20, 20))
    np.add.at(t, (ks, js, as_, bs), vals)
    return t


@lru_cache(maxsize=None)
def iota_table() -> np.ndarray:
    """M[r, j, a]: coefficient of pair r in iota_{e_j} of basis triple a."""
    m = np.zeros((15, 6, 20))
    pair_index = {p: r for r, p in enumerate(PAIRS)}
    for a, idx in enumerate(TRIPLES):
        for p, j in enumerate(idx):
            rest = idx[:p] + idx[p + 1 :]
            m[pair_index[rest], j - 1, a] += -1.0 if p % 2 else 1.0
    return m


@njit(cache=False)
def _q_batch_loops(coeffs, ks, js, as_, bs, vals):
    n = coeffs.shape[0]
    out = np.zeros((n, 6, 6))
    for p in range(n):
        for t in range(vals.shape[0]):
            out[p, ks[t], js[t]] += vals[t] * coeffs[p, as_[t]] * coeffs[p, bs[t]]
    return out


def _q_batch_numpy(coeffs: np.ndarray) -> np.ndarray:
    return np.einsum("kjab,na,nb->nkj", q_dense_table(), coeffs, coeffs)


def q_batch(coeffs, theta_scale: float = 1.0, use_numba: bool | None = None) -> np.ndarray:
    """Q matrices for an (n, 20) array of coefficient vectors."""
    c = np.ascontiguousarray(np.atleast_2d(np.asarray(coeffs, dtype=float)))
    if use_numba is None:
        use_numba = HAVE_NUMBA
    if use_numba:
        q = _q_batch_loops(c, *q_table())
    else:
        q = _q_batch_numpy(c)
    return q / theta_scale


def lambda_batch(q: np.ndarray) -> np.ndarray:
    return np.einsum("nij,nji->n", q, q) / 6.0


def multisymplectic_batch(coeffs, rtol: float = 1e-10) -> np.ndarray:
    c = np.atleast_2d(np.asarray(coeffs, dtype=float))
    mats = np.einsum("rja,na->nrj", iota_table(), c)
    s = np.linalg.svd(mats, compute_uv=False)
    top = np.maximum(s[:, 0], 1e-300)
    return (s[:, -1] > rtol * top) & (s[:, 0] > 0)


def j_batch(coeffs, theta_scale: float = 1.0, use_numba: bool | None = None):
    """J_plus = Q / sqrt(-lambda) per row; rows with lambda >= 0 come back NaN."""
    q = q_batch(coeffs, theta_scale, use_numba)
    lam = lambda_batch(q)
    with np.errstate(invalid="ignore", divide="ignore"):
        root = np.where(lam < 0, np.sqrt(np.where(lam < 0, -lam, 1.0)), np.nan)
    return q / root[:, None, None], lam


@njit(cache=False)
def _nijenhuis_loops(j, dj):
    out = np.zeros((6, 6, 6))
    for i in range(6):
        for jj in range(6):
            for k in range(6):
                s = 0.0
                for l in range(6):
                    s += j[l, i] * dj[l, k, jj] - j[l, jj] * dj[l, k, i]
                    s += -j[k, l] * dj[i, l, jj] + j[k, l] * dj[jj, l, i]
                out[i, jj, k] = s
    return out


def _nijenhuis_numpy(j, dj):
    t1 = np.einsum("li,lkj->ijk", j, dj)
    t3 = np.einsum("kl,ilj->ijk", j, dj)
    return t1 - t1.transpose(1, 0, 2) - t3 + t3.transpose(1, 0, 2)


def nijenhuis_tensor(j, dj, use_numba: bool | None = None) -> np.ndarray:
    """N[i, j, k] = k-th component of N(d_i, d_j); ``dj[l, k, m] = d_l J[k, m]``."""
    j = np.ascontiguousarray(j, dtype=float)
    dj = np.ascontiguousarray(dj, dtype=float)
    if use_numba is None:
        use_numba = HAVE_NUMBA
    return _nijenhuis_loops(j, dj) if use_numba else _nijenhuis_numpy(j, dj)


def backend_name() -> str:
    return "numba" if HAVE_NUMBA else "numpy"
