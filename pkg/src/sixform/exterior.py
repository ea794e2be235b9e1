"""Alternating forms on R^n stored sparsely over strictly increasing multi-indices.

Indices are 1-based throughout, matching the usual ``alpha_1 .. alpha_n``
notation. The interior product contracts the first slot:

    iota_v(a^1 ^ ... ^ a^k) = sum_i (-1)^(i-1) a^i(v) a^1 ^ .. (drop i) .. ^ a^k

Every sign downstream (the Q operator, lambda, J) depends on this choice.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from types import MappingProxyType
from typing import Mapping

import numpy as np

from . import linalg
from .errors import BackendMismatch, DegenerateVolume, DimensionMismatch
from .scalars import (
    EXACT,
    FLOAT,
    backend_of,
    combine_backends,
    format_scalar,
    is_zero,
    parse_scalar,
)

Index = tuple[int, ...]


def sort_with_sign(idx) -> tuple[int, Index | None]:
    """Sort an index tuple, returning (permutation sign, sorted tuple).

    A repeated index gives ``(0, None)``.
    """
    return _sort_with_sign(tuple(int(i) for i in idx))


@lru_cache(maxsize=None)
def _sort_with_sign(idx: Index) -> tuple[int, Index | None]:
    if len(set(idx)) != len(idx):
        return 0, None
    inversions = sum(1 for a, b in itertools.combinations(idx, 2) if a > b)
    return (-1 if inversions % 2 else 1), tuple(sorted(idx))


def _permutation_sign(perm) -> int:
    return sort_with_sign(perm)[0]


_PERMS: dict[int, list[tuple[int, tuple[int, ...]]]] = {}


def _signed_perms(k: int):
    if k not in _PERMS:
        _PERMS[k] = [(_permutation_sign(p), p) for p in itertools.permutations(range(k))]
    return _PERMS[k]


def leibniz_det(rows) -> object:
    """Determinant by the permutation expansion; works for any ring scalars."""
    k = len(rows)
    if k == 0:
        return Fraction(1)
    total = 0
    for sign, perm in _signed_perms(k):
        term = rows[0][perm[0]]
        if is_zero(term):
            continue
        for r in range(1, k):
            x = rows[r][perm[r]]
            if is_zero(x):
                term = None
                break
            term = term * x
        if term is None:
            continue
        total = total + term if sign > 0 else total - term
    return total


@dataclass(frozen=True, eq=False)
class KForm:
    """Degree-k alternating form on R^dim.

    Attributes:
      dim: ambient dimension.
      degree: k.
      coeffs: strictly increasing 1-based index tuple -> nonzero scalar.
      backend: ``"exact"``, ``"float"`` or ``"symbolic"``.
    """

    dim: int
    degree: int
    coeffs: Mapping[Index, object] = field(default_factory=dict)
    backend: str = ""

    def __post_init__(self):
        if not 0 <= self.degree <= self.dim:
            raise DimensionMismatch(f"degree {self.degree} outside 0..{self.dim}")
        clean = {}
        for idx, c in self.coeffs.items():
            idx = tuple(int(i) for i in idx)
            if len(idx) != self.degree:
                raise DimensionMismatch(f"index {idx} has length != degree {self.degree}")
            if any(i < 1 or i > self.dim for i in idx):
                raise DimensionMismatch(f"index {idx} outside 1..{self.dim}")
            if any(a >= b for a, b in zip(idx, idx[1:])):
                raise ValueError(f"index {idx} is not strictly increasing; use KForm.from_terms")
            if isinstance(c, int) and not isinstance(c, bool):
                c = Fraction(c)
            if not is_zero(c):
                clean[idx] = c
        backend = combine_backends(
            [backend_of(c) for c in clean.values()] + ([self.backend] if self.backend else [])
        )
        object.__setattr__(self, "coeffs", MappingProxyType(dict(sorted(clean.items()))))
        object.__setattr__(self, "backend", backend)

    @classmethod
    def from_terms(cls, dim: int, degree: int, terms, backend: str = "") -> "KForm":
        """Build from (index tuple, coefficient) pairs in any index order.

        Unsorted tuples have their permutation sign folded into the
        coefficient; repeated indices contribute nothing; duplicates add.
        """
        acc: dict[Index, object] = {}
        for idx, c in (terms.items() if isinstance(terms, Mapping) else terms):
            sign, key = sort_with_sign(idx)
            if sign == 0:
                continue
            if isinstance(c, int) and not isinstance(c, bool):
                c = Fraction(c)
            c = c if sign > 0 else -c
            acc[key] = acc[key] + c if key in acc else c
        return cls(dim, degree, acc, backend)

    @classmethod
    def zero(cls, dim: int, degree: int, backend: str = EXACT) -> "KForm":
        return cls(dim, degree, {}, backend)

    def __getitem__(self, idx) -> object:
        sign, key = sort_with_sign(idx)
        zero = 0.0 if self.backend == FLOAT else Fraction(0)
        if sign == 0 or key not in self.coeffs:
            return zero
        c = self.coeffs[key]
        return c if sign > 0 else -c

    def __eq__(self, other):
        if not isinstance(other, KForm):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.degree == other.degree
            and dict(self.coeffs) == dict(other.coeffs)
        )

    def __hash__(self):
        return hash((self.dim, self.degree, tuple(self.coeffs.items())))

    def __repr__(self):
        if not self.coeffs:
            return f"KForm(dim={self.dim}, degree={self.degree}, 0)"
        body = " + ".join(
            f"({format_scalar(c)})*a{''.join(map(str, idx))}" for idx, c in self.coeffs.items()
        )
        return f"KForm(dim={self.dim}, {body})"

    def _check_compatible(self, other: "KForm"):
        if self.dim != other.dim or self.degree != other.degree:
            raise DimensionMismatch("forms differ in dimension or degree")
        return combine_backends([self.backend, other.backend])

    def __add__(self, other):
        if not isinstance(other, KForm):
            return NotImplemented
        backend = self._check_compatible(other)
        acc = dict(self.coeffs)
        for idx, c in other.coeffs.items():
            acc[idx] = acc[idx] + c if idx in acc else c
        return KForm(self.dim, self.degree, acc, backend)

    def __neg__(self):
        return KForm(self.dim, self.degree, {i: -c for i, c in self.coeffs.items()}, self.backend)

    def __sub__(self, other):
        if not isinstance(other, KForm):
            return NotImplemented
        return self + (-other)

    def scale(self, s) -> "KForm":
        if isinstance(s, int) and not isinstance(s, bool):
            s = Fraction(s)
        backend = combine_backends([self.backend, backend_of(s)])
        return KForm(self.dim, self.degree, {i: s * c for i, c in self.coeffs.items()}, backend)

    def __mul__(self, s):
        if isinstance(s, KForm):
            return NotImplemented
        return self.scale(s)

    __rmul__ = __mul__

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(is_zero(c, tol) for c in self.coeffs.values())

    def max_abs(self) -> float:
        return max((abs(float(c)) for c in self.coeffs.values()), default=0.0)

    def to_float(self) -> "KForm":
        return KForm(self.dim, self.degree, {i: float(c) for i, c in self.coeffs.items()}, FLOAT)

    def to_exact(self) -> "KForm":
        return KForm(self.dim, self.degree, {i: Fraction(c) for i, c in self.coeffs.items()}, EXACT)

    def to_backend(self, backend: str) -> "KForm":
        if backend == self.backend:
            return self
        if backend == FLOAT:
            return self.to_float()
        if backend == EXACT:
            return self.to_exact()
        raise BackendMismatch(f"cannot convert {self.backend} form to {backend}")

    def dense(self) -> np.ndarray:
        """Float coefficients in lexicographic multi-index order."""
        keys = itertools.combinations(range(1, self.dim + 1), self.degree)
        return np.array([float(self.coeffs.get(k, 0)) for k in keys])

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "degree": self.degree,
            "terms": [{"idx": list(i), "coef": format_scalar(c)} for i, c in self.coeffs.items()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "KForm":
        try:
            dim, degree = int(data["dim"]), int(data["degree"])
            terms = [(tuple(t["idx"]), parse_scalar(t["coef"])) for t in data["terms"]]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed form JSON: {exc}") from exc
        for idx, _ in terms:
            if len(idx) != degree:
                raise DimensionMismatch(f"term {list(idx)} does not have degree {degree}")
        return cls.from_terms(dim, degree, terms, EXACT)


def alpha(dim: int, *idx: int, coef=1) -> KForm:
    """Basis form alpha_{i1} ^ ... ^ alpha_{ik} (times ``coef``)."""
    return KForm.from_terms(dim, len(idx), [(idx, coef)])


def form(dim: int, terms, degree: int | None = None) -> KForm:
    """Convenience constructor from ``[(coef, (i, j, k)), ...]`` or index-only entries."""
    pairs = []
    for t in terms:
        if isinstance(t[0], (tuple, list)):
            pairs.append((tuple(t[0]), t[1] if len(t) > 1 else 1))
        else:
            pairs.append((tuple(t[1]), t[0]))
    if degree is None:
        degree = len(pairs[0][0])
    return KForm.from_terms(dim, degree, pairs)


def volume_form(dim: int = 6, backend: str = EXACT) -> KForm:
    one = 1.0 if backend == FLOAT else Fraction(1)
    return KForm(dim, dim, {tuple(range(1, dim + 1)): one}, backend)


def basis_vector(dim: int, j: int, backend: str = EXACT) -> np.ndarray:
    v = linalg.zeros(dim, backend)
    v[j - 1] = 1.0 if backend == FLOAT else Fraction(1)
    return v


def vector(components, backend: str | None = None) -> np.ndarray:
    """Vector from a sequence; exact unless floats are present or requested."""
    comps = list(components)
    if backend is None:
        backend = combine_backends(backend_of(c) for c in comps) if comps else EXACT
    if backend == FLOAT:
        return np.asarray([float(c) for c in comps], dtype=float)
    out = np.empty(len(comps), dtype=object)
    for i, c in enumerate(comps):
        out[i] = Fraction(c) if isinstance(c, (int, str)) else c
    return out


def vector_backend(v) -> str:
    return linalg.matrix_backend(v)


def wedge(a: KForm, b: KForm) -> KForm:
    if a.dim != b.dim:
        raise DimensionMismatch(f"wedge of forms on R^{a.dim} and R^{b.dim}")
    if a.degree + b.degree > a.dim:
        return KForm.zero(a.dim, a.dim, combine_backends([a.backend, b.backend]))
    backend = combine_backends([a.backend, b.backend])
    acc: dict[Index, object] = {}
    for ia, ca in a.coeffs.items():
        for ib, cb in b.coeffs.items():
            sign, key = sort_with_sign(ia + ib)
            if sign == 0:
                continue
            c = ca * cb
            if sign < 0:
                c = -c
            acc[key] = acc[key] + c if key in acc else c
    return KForm(a.dim, a.degree + b.degree, acc, backend)


def interior(v, a: KForm) -> KForm:
    """Contract the first slot of ``a`` with ``v``."""
    v = np.asarray(v)
    if v.shape != (a.dim,):
        raise DimensionMismatch(f"vector of length {v.shape} against form on R^{a.dim}")
    if a.degree < 1:
        raise DimensionMismatch("interior product of a 0-form")
    backend = combine_backends([a.backend, vector_backend(v)])
    acc: dict[Index, object] = {}
    for idx, c in a.coeffs.items():
        for p, j in enumerate(idx):
            vj = v[j - 1]
            if is_zero(vj):
                continue
            key = idx[:p] + idx[p + 1 :]
            term = c * vj
            if p % 2:
                term = -term
            acc[key] = acc[key] + term if key in acc else term
    return KForm(a.dim, a.degree - 1, acc, backend)


def eval_form(a: KForm, *vectors):
    """Evaluate ``a(v1, ..., vk)`` by summing coefficient-weighted minors."""
    if len(vectors) != a.degree:
        raise DimensionMismatch(f"{a.degree}-form evaluated on {len(vectors)} vectors")
    vs = [np.asarray(v) for v in vectors]
    for v in vs:
        if v.shape != (a.dim,):
            raise DimensionMismatch("vector length does not match form dimension")
    combine_backends([a.backend] + [vector_backend(v) for v in vs])
    total = 0.0 if a.backend == FLOAT else Fraction(0)
    for idx, c in a.coeffs.items():
        rows = [[v[i - 1] for i in idx] for v in vs]
        m = leibniz_det(rows)
        if not is_zero(m):
            total = total + c * m
    return total


def pullback(p, a: KForm) -> KForm:
    """Pull ``a`` back along the linear map ``p`` (shape ``a.dim x source_dim``).

    ``(p* a)(v1, .., vk) = a(p v1, .., p vk)``; hence ``(pq)* = q* p*``.
    """
    p = np.asarray(p)
    if p.ndim != 2 or p.shape[0] != a.dim:
        raise DimensionMismatch(f"map of shape {p.shape} cannot pull back a form on R^{a.dim}")
    src = p.shape[1]
    if a.degree > src:
        return KForm.zero(src, a.degree, a.backend)
    backend = combine_backends([a.backend, linalg.matrix_backend(p)])
    if backend == EXACT:
        return _pullback_integer(p, a, src)
    acc: dict[Index, object] = {}
    for target in itertools.combinations(range(1, src + 1), a.degree):
        total = None
        for idx, c in a.coeffs.items():
            rows = [[p[i - 1, j - 1] for j in target] for i in idx]
            m = leibniz_det(rows)
            if is_zero(m):
                continue
            term = c * m
            total = term if total is None else total + term
        if total is not None:
            acc[target] = total
    return KForm(src, a.degree, acc, backend)


def _common_denominator(values) -> int:
    d = 1
    for v in values:
        d = math.lcm(d, Fraction(v).denominator)
    return d


def _pullback_integer(p, a: KForm, src: int) -> KForm:
    # clear denominators so the minors are computed over Python ints
    dp = _common_denominator(p.ravel())
    da = _common_denominator(a.coeffs.values())
    pi = [[int(Fraction(x) * dp) for x in row] for row in p]
    ai = {idx: int(Fraction(c) * da) for idx, c in a.coeffs.items()}
    scale = da * dp**a.degree
    acc: dict[Index, object] = {}
    for target in itertools.combinations(range(1, src + 1), a.degree):
        total = 0
        for idx, c in ai.items():
            m = leibniz_det([[pi[i - 1][j - 1] for j in target] for i in idx])
            if m:
                total += c * m
        if total:
            acc[target] = Fraction(total, scale)
    return KForm(src, a.degree, acc, EXACT)


def dualize_five(rho: KForm, theta: KForm) -> np.ndarray:
    """Return the unique vector v with ``interior(v, theta) == rho``."""
    n = theta.dim
    if theta.degree != n or rho.dim != n or rho.degree != n - 1:
        raise DimensionMismatch("dualize_five needs a (dim-1)-form and a top-degree form")
    full = tuple(range(1, n + 1))
    t = theta.coeffs.get(full)
    if t is None or is_zero(t):
        raise DegenerateVolume("volume form is zero")
    backend = combine_backends([rho.backend, theta.backend])
    v = linalg.zeros(n, FLOAT if backend == FLOAT else EXACT)
    for j in range(1, n + 1):
        c = rho.coeffs.get(full[: j - 1] + full[j:])
        if c is None:
            continue
        c = c / t
        v[j - 1] = c if j % 2 else -c
    return v


def dimension_of(dim: int, degree: int) -> int:
    return comb(dim, degree)
