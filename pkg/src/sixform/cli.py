"""Command-line front end.

Exit codes: 0 success, 2 parse/usage error, 3 numerical backend failure,
4 input is not of type 2, 5 evaluation domain error, 6 rank-deficient basis.
``--backend auto`` keeps rational input exact and moves to floats only
where an irrational square root appears (J, Type-1 eigenspaces).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .acs import complex_structures, make_gamma, normalization_residual, normalize, purity_residual, three_zero_residual
from .classify import TypeLabel, classify
from .errors import FormSyntaxError, SixformError
from .exterior import KForm, volume_form
from .field import integrability, scan_types
from .formlang import FormField, parse_field
from .g2 import basis_from_json, random_basis, restrict, standard_g2_form, standard_slice
from .scalars import FLOAT, default_tolerance, format_scalar, parse_scalar

log = logging.getLogger("sixform")


class UsageError(SixformError):
    exit_code = 2


# ---------------------------------------------------------------- input


def _read_source(args) -> tuple[str, str]:
    if bool(args.inline) == bool(args.file):
        raise UsageError("give exactly one of --inline or --file")
    if args.inline:
        return "dsl", args.inline
    path = Path(args.file)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    return ("json" if path.suffix.lower() == ".json" else "dsl"), text


def _load_forms(args) -> list[KForm]:
    kind, text = _read_source(args)
    if kind == "json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"invalid JSON: {exc}") from exc
        items = data if isinstance(data, list) else [data]
        try:
            forms = [KForm.from_json(d) for d in items]
        except (ValueError, TypeError) as exc:
            raise UsageError(str(exc)) from exc
    else:
        fld = parse_field(text)
        at = getattr(args, "at", None)
        if at is None and not fld.is_constant():
            raise UsageError("field has non-constant coefficients; pass --at x1,..,x6")
        forms = [fld.evaluate(_parse_point(at) if at else [0] * 6)]
    for f in forms:
        if f.dim != 6 or f.degree != 3:
            raise UsageError(f"expected a 3-form on R^6, got degree {f.degree} on R^{f.dim}")
    if args.backend == "float":
        forms = [f.to_float() for f in forms]
    return forms


def _load_field(args) -> FormField:
    kind, text = _read_source(args)
    if kind == "json":
        try:
            return FormField.constant(KForm.from_json(json.loads(text)))
        except (ValueError, TypeError) as exc:
            raise UsageError(str(exc)) from exc
    return parse_field(text)


def _parse_point(text: str) -> list:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 6:
        raise UsageError("--at needs six comma-separated coordinates")
    return [_number_or_expr(p) for p in parts]


def _number_or_expr(p: str):
    try:
        return Fraction(p)
    except ValueError:
        return p


def _theta(args, backend: str = "exact") -> KForm:
    scale = parse_scalar(args.theta)
    if scale == 0:
        raise UsageError("--theta must be nonzero")
    theta = volume_form(6).scale(scale)
    return theta.to_float() if backend == FLOAT else theta


def _tol(args) -> float:
    tol = args.tol if args.tol is not None else default_tolerance()
    if not tol > 0:
        raise UsageError("tolerance must be positive")
    return tol


def _meta(args, **extra) -> dict:
    out = {
        "version": __version__,
        "theta": format_scalar(parse_scalar(args.theta)) if args.theta != "1" else "standard",
        "backend": args.backend,
        "tolerance": _tol(args),
    }
    out.update(extra)
    return out


def _emit(args, payload):
    if getattr(args, "format", "json") == "pretty":
        _pretty(payload)
    else:
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _pretty(payload, indent: int = 0):
    pad = "  " * indent
    if isinstance(payload, dict):
        for k, v in payload.items():
            if isinstance(v, (dict, list)) and v and not _flat(v):
                print(f"{pad}{k}:")
                _pretty(v, indent + 1)
            else:
                print(f"{pad}{k}: {_inline(v)}")
    elif isinstance(payload, list):
        for item in payload:
            if _flat(item):
                print(f"{pad}- {_inline(item)}")
            elif isinstance(item, (dict, list)):
                print(f"{pad}-")
                _pretty(item, indent + 1)
            else:
                print(f"{pad}- {item}")


def _flat(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v)


def _inline(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(map(str, v)) + "]"
    return str(v)


def _matrix_json(m) -> list:
    """Columns of m as lists of strings (column j is the image of e_j)."""
    return [[format_scalar(x) for x in m[:, j]] for j in range(m.shape[1])]


# ---------------------------------------------------------------- commands


def cmd_classify(args) -> int:
    reports = []
    for f in _load_forms(args):
        theta = _theta(args, f.backend)
        reports.append(classify(f, theta, _tol(args)).to_json())
    _emit(args, {"meta": _meta(args), "reports": reports})
    return 0


def cmd_acs(args) -> int:
    out = []
    for f in _load_forms(args):
        theta = _theta(args, f.backend)
        jp, jm = complex_structures(f, theta)
        out.append({
            "J_plus": _matrix_json(jp.j),
            "J_minus": _matrix_json(jm.j),
            "lambda": format_scalar(jp.lam),
            "purity_residual": format_scalar(purity_residual(f, jp)),
            "backend": jp.backend,
        })
    _emit(args, {"meta": _meta(args), "structures": out})
    return 0


def cmd_normalize(args) -> int:
    out = []
    for f in _load_forms(args):
        theta = _theta(args, f.backend)
        change = normalize(f, theta)
        out.append({
            "P": _matrix_json(change.p),
            "convention": change.direction,
            "c": [format_scalar(change.c[0]), format_scalar(change.c[1])],
            "residual": normalization_residual(f, change),
            "backend": "exact" if change.p.dtype == object else "float",
        })
    _emit(args, {"meta": _meta(args), "normalizations": out})
    return 0


def cmd_gamma(args) -> int:
    out = []
    for f in _load_forms(args):
        theta = _theta(args, f.backend)
        jp, _ = complex_structures(f, theta)
        gamma = make_gamma(f, jp, _tol(args))
        entry = gamma.to_json()
        entry["three_zero_residual"] = format_scalar(three_zero_residual(gamma))
        out.append(entry)
    _emit(args, {"meta": _meta(args), "gammas": out})
    return 0


def _parse_range(text: str) -> tuple[float, float]:
    try:
        lo, hi = text.split(":")
        return float(lo), float(hi)
    except ValueError as exc:
        raise UsageError(f"bad range {text!r}; expected lo:hi") from exc


def _parse_box(text: str) -> list[tuple[float, float]]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 6:
        raise UsageError("--box needs six comma-separated lo:hi ranges (or single values)")
    box = []
    for p in parts:
        if ":" in p:
            box.append(_parse_range(p))
        else:
            v = float(p)
            box.append((v, v))
    return box


def cmd_field_scan(args) -> int:
    fld = _load_field(args)
    if args.box:
        box = _parse_box(args.box)
        res = [args.n if lo != hi else 1 for lo, hi in box]
    else:
        at = [float(Fraction(x)) for x in args.at.split(",")] if args.at else [0.0] * 6
        if len(at) != 6:
            raise UsageError("--at needs six coordinates")
        box = [(v, v) for v in at]
        res = [1] * 6
        if args.axis:
            axis = int(args.axis.lstrip("x")) - 1
            if not 0 <= axis < 6:
                raise UsageError(f"unknown axis {args.axis}")
            box[axis] = _parse_range(args.range or "0:1")
            res[axis] = args.n
    scan = scan_types(fld, box, res, _theta(args, FLOAT), jobs=args.jobs)
    if args.format == "jsonl":
        sys.stdout.write(scan.to_jsonl())
    else:
        sys.stdout.write(scan.to_csv())
    return 0


def cmd_field_check(args) -> int:
    fld = _load_field(args)
    box = _parse_box(args.box) if args.box else [(-1.0, 1.0)] * 6
    report = integrability(
        fld, box, args.samples, _theta(args), _tol(args), args.seed, args.mode, args.nijenhuis_tol
    )
    _emit(args, {"meta": _meta(args, seed=args.seed, kernels=kernels.backend_name()), "report": report.to_json()})
    return 0


def _restrict_one(basis):
    phi = standard_g2_form()
    form = restrict(phi, basis)
    return form, classify(form)


def cmd_g2(args) -> int:
    bases = []
    if args.standard_slice:
        bases.append(standard_slice())
    if args.file:
        try:
            bases.append(basis_from_json(json.loads(Path(args.file).read_text(encoding="utf-8"))))
        except (OSError, json.JSONDecodeError, ValueError, TypeError) as exc:
            raise UsageError(f"cannot read basis: {exc}") from exc
    if args.random:
        rng = np.random.default_rng(args.seed)
        bases.extend(random_basis(rng) for _ in range(args.random))
    if not bases:
        raise UsageError("give --standard-slice, --file or --random N")
    if args.jobs > 1 and len(bases) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_restrict_one, bases))
    else:
        results = [_restrict_one(b) for b in bases]
    n2 = sum(r.label is TypeLabel.TYPE2 for _, r in results)
    entries = [
        {"basis": _matrix_json(b), "form": f.to_json(), "report": r.to_json()}
        for b, (f, r) in zip(bases, results)
    ]
    summary = f"{n2}/{len(results)} Type2"
    _emit(args, {"meta": _meta(args, seed=args.seed), "results": entries, "summary": summary})
    if args.format != "pretty":
        print(summary, file=sys.stderr)
    return 0


# ---------------------------------------------------------------- parser


def _common(p: argparse.ArgumentParser, source: bool = True):
    if source:
        p.add_argument("--inline", help="form in the DSL, e.g. 'dx1^dx2^dx3 + dx4^dx5^dx6'")
        p.add_argument("--file", help="JSON form (.json) or DSL file")
    p.add_argument("--theta", default="1", help="volume form scale s for s*dx1^..^dx6 (default 1)")
    p.add_argument("--backend", choices=("exact", "float", "auto"), default="auto")
    p.add_argument("--tol", type=float, default=None, help="residual tolerance (default 1e-9 or SIXFORM_TOLERANCE)")
    p.add_argument("--format", choices=("json", "pretty"), default="json")
    p.add_argument("--at", help="point x1,..,x6 for non-constant DSL input (entries may use pi)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sixform", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"sixform {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn, helptext in (
        ("classify", cmd_classify, "orbit type, lambda, Q and Delta basis"),
        ("acs", cmd_acs, "the two complex structures of a type-2 form"),
        ("normalize", cmd_normalize, "change of basis to the normal form"),
        ("gamma", cmd_gamma, "the (3,0)-form with the given real part"),
    ):
        p = sub.add_parser(name, help=helptext)
        _common(p)
        p.set_defaults(func=fn)

    fp = sub.add_parser("field", help="coordinate-dependent forms")
    fsub = fp.add_subparsers(dest="field_command", required=True)
    scan = fsub.add_parser("scan", help="type labels on a grid (CSV or JSON lines)")
    _common(scan)
    scan.set_defaults(func=cmd_field_scan, format="csv")
    scan.add_argument("--axis", help="scanned coordinate, e.g. x3")
    scan.add_argument("--range", help="lo:hi along --axis")
    scan.add_argument("--n", type=int, default=64, help="points per scanned axis")
    scan.add_argument("--box", help="six lo:hi ranges (or fixed values), comma separated")
    scan.add_argument("--jobs", type=int, default=1)
    for action in scan._actions:
        if action.dest == "format":
            action.choices = ("csv", "jsonl")
            action.default = "csv"

    check = fsub.add_parser("check", help="integrability verdict on a box")
    _common(check)
    check.add_argument("--box", help="six lo:hi ranges (or fixed values), default [-1,1]^6")
    check.add_argument("--samples", type=int, default=200)
    check.add_argument("--seed", type=int, default=0)
    check.add_argument("--mode", choices=("symbolic", "fd"), default="symbolic")
    check.add_argument("--nijenhuis-tol", type=float, default=None)
    check.set_defaults(func=cmd_field_check)

    gp = sub.add_parser("g2", help="restrictions of the G2 form")
    gsub = gp.add_subparsers(dest="g2_command", required=True)
    rp = gsub.add_parser("restrict", help="restrict to 6-dimensional subspaces")
    _common(rp, source=False)
    rp.add_argument("--standard-slice", action="store_true", help="the subspace spanned by e1..e6")
    rp.add_argument("--file", help="JSON 7x6 basis (rows)")
    rp.add_argument("--random", type=int, default=0, help="number of random integer bases")
    rp.add_argument("--seed", type=int, default=0)
    rp.add_argument("--jobs", type=int, default=1)
    rp.set_defaults(func=cmd_g2)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except FormSyntaxError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return exc.exit_code
    except SixformError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
