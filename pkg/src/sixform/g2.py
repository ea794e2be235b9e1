"""The standard G2 3-form on R^7 and its restrictions to hyperplanes.

Restricting it to any 6-dimensional subspace gives a type-2 form, which
makes it a convenient generator of type-2 examples.
"""

from __future__ import annotations

import numpy as np

from . import linalg
from .errors import DimensionMismatch, RankDeficientBasis
from .exterior import KForm, form, pullback

_G2_TERMS = [
    (1, (1, 2, 3)),
    (1, (1, 4, 5)),
    (-1, (1, 6, 7)),
    (1, (2, 4, 6)),
    (1, (2, 5, 7)),
    (1, (3, 4, 7)),
    (-1, (3, 5, 6)),
]


def standard_g2_form() -> KForm:
    return form(7, _G2_TERMS)


def restrict(phi: KForm, basis) -> KForm:
    """Pull ``phi`` back along the inclusion spanned by the 6 columns of ``basis`` (7 x 6)."""
    b = np.asarray(basis)
    if b.shape != (phi.dim, 6):
        raise DimensionMismatch(f"basis must be {phi.dim} x 6, got {b.shape}")
    if b.dtype == object:
        b = linalg.as_exact(b)
    if linalg.rank(b) != 6:
        raise RankDeficientBasis("subspace basis does not have rank 6")
    return pullback(b, phi)


def standard_slice() -> np.ndarray:
    """Columns e1..e6 of R^7."""
    return linalg.identity(7)[:, :6]


def random_basis(rng: np.random.Generator, low: int = -3, high: int = 3) -> np.ndarray:
    """Integer 7 x 6 matrix of rank 6, entries uniform on low..high."""
    while True:
        m = linalg.as_exact(rng.integers(low, high + 1, size=(7, 6)).astype(object))
        if linalg.rank(m) == 6:
            return m


def basis_from_json(data) -> np.ndarray:
    """Accept a 7 x 6 nested list (rows) of integers or rational strings."""
    from .scalars import parse_scalar

    rows = [[parse_scalar(x) for x in row] for row in data]
    if len(rows) != 7 or any(len(r) != 6 for r in rows):
        raise DimensionMismatch("basis JSON must be a 7 x 6 array (7 rows of 6 entries)")
    out = np.empty((7, 6), dtype=object)
    for i, r in enumerate(rows):
        for j, v in enumerate(r):
            out[i, j] = v
    return out
