"""Small dense linear algebra over exact rationals or floats.

Matrices are numpy arrays: ``dtype=object`` holding ``Fraction`` entries for
the exact backend, ``float64`` for the float backend. Row reduction is
written out by hand so the same code path serves both; float pivots below a
relative threshold count as zero.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .scalars import EXACT, FLOAT, SYMBOLIC, backend_of, combine_backends

PIVOT_RTOL = 1e-10


def matrix_backend(m) -> str:
    m = np.asarray(m)
    if m.dtype != object:
        return FLOAT
    return combine_backends(backend_of(x) for x in m.flat)


def as_exact(m) -> np.ndarray:
    m = np.asarray(m, dtype=object)
    out = np.empty(m.shape, dtype=object)
    for idx, x in np.ndenumerate(m):
        if isinstance(x, float):
            raise TypeError("float entry in exact matrix")
        out[idx] = Fraction(x)
    return out


def as_float(m) -> np.ndarray:
    return np.asarray(np.asarray(m, dtype=object).astype(float), dtype=float)


def to_backend(m, backend: str) -> np.ndarray:
    return as_exact(m) if backend == EXACT else as_float(m)


def identity(n: int, backend: str = EXACT) -> np.ndarray:
    if backend == FLOAT:
        return np.eye(n)
    out = np.full((n, n), Fraction(0), dtype=object)
    for i in range(n):
        out[i, i] = Fraction(1)
    return out


def zeros(shape, backend: str = EXACT) -> np.ndarray:
    if backend == FLOAT:
        return np.zeros(shape)
    return np.full(shape, Fraction(0), dtype=object)


def _pivot_threshold(m, tol):
    if m.dtype != object:
        scale = float(np.max(np.abs(m))) if m.size else 0.0
        return (PIVOT_RTOL if tol is None else tol) * max(scale, 1e-300)
    return None


def rref(m, tol: float | None = None):
    """Reduced row echelon form.

    Args:
      m: 2-d array, exact (object) or float.
      tol: relative pivot threshold for floats (default 1e-10 of max |entry|).

    Returns:
      (reduced matrix, list of pivot columns)
    """
    a = np.array(m, dtype=object if np.asarray(m).dtype == object else float, copy=True)
    if matrix_backend(a) == SYMBOLIC:
        raise TypeError("row reduction needs numeric entries")
    thresh = _pivot_threshold(a, tol)
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        if thresh is None:
            p = next((i for i in range(r, rows) if a[i, c] != 0), None)
        else:
            i = r + int(np.argmax(np.abs(a[r:, c])))
            p = i if abs(a[i, c]) > thresh else None
        if p is None:
            if thresh is not None:
                a[r:, c] = 0.0
            continue
        if p != r:
            a[[r, p]] = a[[p, r]]
        a[r] = a[r] / a[r, c]
        for i in range(rows):
            if i != r and a[i, c] != 0:
                a[i] = a[i] - a[i, c] * a[r]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m, tol: float | None = None) -> int:
    return len(rref(m, tol)[1])


def nullspace(m, tol: float | None = None) -> list[np.ndarray]:
    """Basis of the kernel, one vector per free column (RREF parametrisation)."""
    a, pivots = rref(m, tol)
    exact = a.dtype == object
    cols = a.shape[1]
    basis = []
    for free in (c for c in range(cols) if c not in pivots):
        v = zeros(cols, EXACT if exact else FLOAT)
        v[free] = Fraction(1) if exact else 1.0
        for row, pc in enumerate(pivots):
            v[pc] = -a[row, free]
        basis.append(v)
    return basis


def inverse(m, tol: float | None = None) -> np.ndarray:
    m = np.asarray(m)
    n = m.shape[0]
    backend = EXACT if m.dtype == object else FLOAT
    aug = np.concatenate([m, identity(n, backend)], axis=1)
    red, pivots = rref(aug, tol)
    if pivots[:n] != list(range(n)):
        raise np.linalg.LinAlgError("matrix is singular")
    return red[:, n:]


def det(m):
    """Determinant by fraction-free-ish elimination (exact) or numpy (float)."""
    m = np.asarray(m)
    if m.dtype != object:
        return float(np.linalg.det(m))
    a = np.array(m, dtype=object, copy=True)
    n = a.shape[0]
    sign = 1
    result = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if a[i, c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[[c, p]] = a[[p, c]]
            sign = -sign
        result *= a[c, c]
        for i in range(c + 1, n):
            if a[i, c] != 0:
                a[i] = a[i] - (a[i, c] / a[c, c]) * a[c]
    return sign * result


def max_abs(m) -> float:
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(max(abs(x) for x in m.flat))


def is_scalar_matrix(m, value, tol: float = 0.0) -> bool:
    """True when ``m == value * I`` (exactly, or entrywise within ``tol``)."""
    m = np.asarray(m)
    n = m.shape[0]
    for i in range(n):
        for j in range(n):
            target = value if i == j else 0
            diff = m[i, j] - target
            if tol:
                if abs(diff) > tol:
                    return False
            elif diff != 0:
                return False
    return True
