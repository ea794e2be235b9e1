"""Scalar backends: exact rationals, binary floats, and symbolic expressions.

Exact scalars are ``fractions.Fraction`` (plain ``int`` is accepted and
promoted). Floats are Python/numpy floats. Symbolic scalars are
``formlang.Expr`` nodes; they interoperate with exact constants but never
with floats.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction
from numbers import Integral, Real

import numpy as np

from .errors import BackendMismatch

EXACT = "exact"
FLOAT = "float"
SYMBOLIC = "symbolic"

DEFAULT_TOLERANCE = 1e-9


def default_tolerance() -> float:
    """Return the residual tolerance, honouring ``SIXFORM_TOLERANCE``."""
    raw = os.environ.get("SIXFORM_TOLERANCE")
    if not raw:
        return DEFAULT_TOLERANCE
    value = float(raw)
    if not value > 0:
        raise ValueError(f"SIXFORM_TOLERANCE must be positive, got {raw!r}")
    return value


def backend_of(x) -> str:
    if isinstance(x, (Fraction, Integral)) and not isinstance(x, bool):
        return EXACT
    if isinstance(x, (float, np.floating)):
        return FLOAT
    # late import: formlang depends on this module
    from .formlang import Expr

    if isinstance(x, Expr):
        return SYMBOLIC
    if isinstance(x, Real):
        return FLOAT
    raise TypeError(f"unsupported scalar {x!r} of type {type(x).__name__}")


def combine_backends(backends) -> str:
    """Merge backend tags.

    Exact constants are absorbed by symbolic expressions. Any pairing with
    float other than float itself raises ``BackendMismatch``.
    """
    seen = set(backends)
    if FLOAT in seen and len(seen) > 1:
        raise BackendMismatch(f"cannot mix {' and '.join(sorted(seen))} scalars")
    if SYMBOLIC in seen:
        return SYMBOLIC
    return FLOAT if FLOAT in seen else EXACT


def exact(x) -> Fraction:
    """Coerce int/str/Fraction to Fraction. Floats are rejected."""
    if isinstance(x, float):
        raise BackendMismatch(f"float {x!r} given where an exact scalar is required")
    return Fraction(x)


def is_zero(x, tol: float = 0.0) -> bool:
    cls = x.__class__
    if cls is Fraction or cls is int:
        return x == 0
    if cls is float and not tol:
        return x == 0.0
    if backend_of(x) == SYMBOLIC:
        return x.is_zero()
    if tol and isinstance(x, (float, np.floating)):
        return abs(x) <= tol
    return x == 0


def exact_sqrt(q: Fraction) -> Fraction | None:
    """Square root of a nonnegative rational when it is rational, else None."""
    q = Fraction(q)
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def to_float(x) -> float:
    return float(x)


def format_scalar(x) -> str:
    """Canonical text for JSON output: ``p/q`` for rationals, repr for floats."""
    if backend_of(x) == EXACT:
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if backend_of(x) == SYMBOLIC:
        return str(x)
    return repr(float(x))


def parse_scalar(text) -> Fraction:
    """Parse decimal or ``p/q`` strings (and ints) to an exact rational."""
    if isinstance(text, bool):
        raise ValueError("boolean is not a coefficient")
    if isinstance(text, float):
        raise BackendMismatch("JSON coefficients must be strings or integers, not floats")
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad coefficient {text!r}") from exc
