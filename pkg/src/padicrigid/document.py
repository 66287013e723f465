"""Strict parsing of system documents.

A document is UTF-8 JSON describing one system: rank, prime, per-point
exponent data, optional residue matrices, the two assertions, optional
Frobenius lift data, and optional working precision.  Unknown fields
are rejected and every parse failure carries the JSON path at which it
occurred; mathematical inputs are never silently defaulted (precision
defaults are announced in reports).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import SchemaError
from .fuchsian import FuchsianSystem, LocalData, SingularPoint
from .linalg import JordanType, MatrixQ
from .padics import is_prime
from .series import DEFAULT_PDIGITS, DEFAULT_XBOUND

_TOP_KEYS = {
    "rank", "prime", "precision", "points", "residues", "assertions",
    "frobenius",
}
_POINT_KEYS = {"location", "exponents"}
_EXPONENT_KEYS = {"value", "block"}
_PRECISION_KEYS = {"x_window", "p_digits"}
_ASSERTION_KEYS = {"irreducible", "overconvergent"}
_FROBENIUS_KEYS = {"f", "q", "lift_h"}
_LIFT_TERM_KEYS = {"exponent", "value"}


@dataclass
class FrobeniusSpec:
    f: int | None
    q: int | None
    lift_terms: list  # [(exponent, Fraction)], coefficients of h - 1


@dataclass
class ParsedDocument:
    system: FuchsianSystem
    prime: int
    x_window: int
    p_digits: int
    precision_given: bool
    frobenius: FrobeniusSpec | None
    raw: dict


def _expect(obj, typ, path, what):
    if typ is int and isinstance(obj, bool):
        raise SchemaError(path, f"expected {what}, got a boolean")
    if not isinstance(obj, typ):
        raise SchemaError(
            path, f"expected {what}, got {type(obj).__name__}"
        )
    return obj


def _check_keys(obj, allowed, path):
    for key in obj:
        if key not in allowed:
            raise SchemaError(f"{path}.{key}", "unknown field")


def _rational(text, path):
    try:
        return Fraction(str(_expect(text, str, path, "a rational string")))
    except (ValueError, ZeroDivisionError):
        raise SchemaError(path, f"malformed rational string {text!r}")


def parse_document_text(text, name="<document>"):
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(name, f"not valid JSON: {exc}")
    return parse_document(raw)


def parse_document_file(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SchemaError(str(path), f"cannot read document: {exc}")
    return parse_document_text(text, str(path))


def parse_document(raw):
    _expect(raw, dict, "$", "an object")
    _check_keys(raw, _TOP_KEYS, "$")
    for key in ("rank", "prime", "points", "assertions"):
        if key not in raw:
            raise SchemaError(f"$.{key}", "required field missing")

    rank = _expect(raw["rank"], int, "$.rank", "an integer")
    if rank < 1:
        raise SchemaError("$.rank", f"rank must be >= 1, got {rank}")
    prime = _expect(raw["prime"], int, "$.prime", "an integer")
    if not is_prime(prime):
        raise SchemaError("$.prime", f"{prime} is not prime")

    x_window, p_digits = DEFAULT_XBOUND, DEFAULT_PDIGITS
    precision_given = "precision" in raw
    if precision_given:
        prec = _expect(raw["precision"], dict, "$.precision", "an object")
        _check_keys(prec, _PRECISION_KEYS, "$.precision")
        if "x_window" in prec:
            x_window = _expect(
                prec["x_window"], int, "$.precision.x_window", "an integer"
            )
        if "p_digits" in prec:
            p_digits = _expect(
                prec["p_digits"], int, "$.precision.p_digits", "an integer"
            )
        if x_window < 1 or p_digits < 1:
            raise SchemaError("$.precision", "precision values must be >= 1")

    points = _expect(raw["points"], list, "$.points", "a list")
    if not points:
        raise SchemaError("$.points", "at least one singular point required")
    locals_ = []
    for i, entry in enumerate(points):
        path = f"$.points[{i}]"
        _expect(entry, dict, path, "an object")
        _check_keys(entry, _POINT_KEYS, path)
        for key in _POINT_KEYS:
            if key not in entry:
                raise SchemaError(f"{path}.{key}", "required field missing")
        loc_text = _expect(
            entry["location"], str, f"{path}.location", "a string"
        )
        if loc_text.strip().lower() in ("inf", "infinity", "oo"):
            point = SingularPoint.infinity()
        else:
            point = SingularPoint.finite(
                _rational(loc_text, f"{path}.location")
            )
        exps = _expect(
            entry["exponents"], list, f"{path}.exponents", "a list"
        )
        if not exps:
            raise SchemaError(f"{path}.exponents", "empty exponent list")
        blocks = []
        for j, ex in enumerate(exps):
            epath = f"{path}.exponents[{j}]"
            _expect(ex, dict, epath, "an object")
            _check_keys(ex, _EXPONENT_KEYS, epath)
            if "value" not in ex:
                raise SchemaError(f"{epath}.value", "required field missing")
            value = _rational(ex["value"], f"{epath}.value")
            block = ex.get("block", 1)
            block = _expect(block, int, f"{epath}.block", "an integer")
            if block < 1:
                raise SchemaError(f"{epath}.block", "block size must be >= 1")
            blocks.append((value, block))
        locals_.append(LocalData(point, JordanType(blocks)))

    residues = None
    if "residues" in raw:
        rs = _expect(raw["residues"], list, "$.residues", "a list")
        residues = []
        for i, mat in enumerate(rs):
            path = f"$.residues[{i}]"
            rows = _expect(mat, list, path, "a matrix (list of rows)")
            parsed_rows = []
            for r, row in enumerate(rows):
                row = _expect(row, list, f"{path}[{r}]", "a list")
                parsed_rows.append(
                    [
                        _rational(v, f"{path}[{r}][{c}]")
                        for c, v in enumerate(row)
                    ]
                )
            if len(parsed_rows) != rank or any(
                len(row) != rank for row in parsed_rows
            ):
                raise SchemaError(path, f"residue must be {rank}x{rank}")
            residues.append(MatrixQ(parsed_rows))
        residues = tuple(residues)

    assertions = _expect(raw["assertions"], dict, "$.assertions", "an object")
    _check_keys(assertions, _ASSERTION_KEYS, "$.assertions")
    for key in _ASSERTION_KEYS:
        if key not in assertions:
            raise SchemaError(f"$.assertions.{key}", "required field missing")
        _expect(assertions[key], bool, f"$.assertions.{key}", "a boolean")

    frob = None
    if "frobenius" in raw:
        fb = _expect(raw["frobenius"], dict, "$.frobenius", "an object")
        _check_keys(fb, _FROBENIUS_KEYS, "$.frobenius")
        f = fb.get("f")
        q = fb.get("q")
        if f is not None and q is not None:
            raise SchemaError("$.frobenius", "give f or q, not both")
        if f is not None:
            f = _expect(f, int, "$.frobenius.f", "an integer")
            if f < 1:
                raise SchemaError("$.frobenius.f", "f must be >= 1")
        if q is not None:
            q = _expect(q, int, "$.frobenius.q", "an integer")
        lift_terms = []
        if "lift_h" in fb:
            terms = _expect(fb["lift_h"], list, "$.frobenius.lift_h", "a list")
            for i, term in enumerate(terms):
                path = f"$.frobenius.lift_h[{i}]"
                _expect(term, dict, path, "an object")
                _check_keys(term, _LIFT_TERM_KEYS, path)
                for key in _LIFT_TERM_KEYS:
                    if key not in term:
                        raise SchemaError(
                            f"{path}.{key}", "required field missing"
                        )
                exp = _expect(
                    term["exponent"], int, f"{path}.exponent", "an integer"
                )
                lift_terms.append(
                    (exp, _rational(term["value"], f"{path}.value"))
                )
        frob = FrobeniusSpec(f=f, q=q, lift_terms=lift_terms)

    system = FuchsianSystem(
        rank=rank,
        locals=tuple(locals_),
        residues=residues,
        irreducible=assertions["irreducible"],
        overconvergent_asserted=assertions["overconvergent"],
    )
    return ParsedDocument(
        system=system,
        prime=prime,
        x_window=x_window,
        p_digits=p_digits,
        precision_given=precision_given,
        frobenius=frob,
        raw=raw,
    )
