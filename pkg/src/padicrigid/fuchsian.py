"""Fuchsian systems on the projective line and their index calculators.

A system is rank + per-point local exponent data (with Jordan block
structure), optional residue matrices, and two user assertions
(irreducibility, overconvergence).  The calculators derive compactly
supported and parabolic Euler characteristics from local data alone:
the coefficient object is either the system itself or its endomorphism
object, and with regular singularities

    chi_c = d * (2 - |S|),   chi_p = chi_c + sum_s h0_s,

where h0_s counts local horizontal sections.  The rigidity index is
chi_p of the endomorphism object; index 2 together with the
irreducibility assertion is the rigidity criterion, and 2 - index
counts accessory parameters.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InconsistencyError, InputError
from .linalg import JordanType, MatrixQ, centralizer_dim, jordan_form
from .padics import parse_rational

COEFF_SELF = "self"
COEFF_END = "end"


def _normalize_coefficient(coefficient):
    c = str(coefficient).lower()
    if c in (COEFF_SELF, COEFF_END):
        return c
    raise InputError(f"unknown coefficient object {coefficient!r}")


@dataclass(frozen=True, order=True)
class SingularPoint:
    """A point of P^1: a rational location or the point at infinity."""

    is_infinity: bool
    location: Fraction = Fraction(0)

    @classmethod
    def finite(cls, location):
        return cls(False, Fraction(location))

    @classmethod
    def infinity(cls):
        return cls(True)

    @classmethod
    def parse(cls, text):
        text = str(text).strip().lower()
        if text in ("inf", "infinity", "oo"):
            return cls.infinity()
        return cls.finite(parse_rational(text))

    def __str__(self):
        return "inf" if self.is_infinity else str(self.location)


@dataclass(frozen=True)
class LocalData:
    """Exponent datum at one singular point."""

    point: SingularPoint
    jordan: JordanType

    def exponents(self):
        return self.jordan.eigenvalues()

    def is_resonant(self):
        return self.jordan.is_resonant()


@dataclass(frozen=True)
class FuchsianSystem:
    rank: int
    locals: tuple
    residues: tuple | None = None
    irreducible: bool = False
    overconvergent_asserted: bool = False

    def __post_init__(self):
        object.__setattr__(self, "locals", tuple(self.locals))
        if self.residues is not None:
            object.__setattr__(self, "residues", tuple(self.residues))

    def points(self):
        return [ld.point for ld in self.locals]

    def finite_locals(self):
        return [ld for ld in self.locals if not ld.point.is_infinity]

    def infinity_local(self):
        for ld in self.locals:
            if ld.point.is_infinity:
                return ld
        return None

    def all_exponents(self):
        return [e for ld in self.locals for e in ld.exponents()]

    def require_valid(self):
        report = validate_system(self)
        if not report.valid:
            raise InputError(
                "invalid system: " + "; ".join(
                    f["message"] for f in report.failures
                )
            )
        return report


@dataclass
class ValidationReport:
    failures: list = field(default_factory=list)
    trace_residual: MatrixQ | None = None

    @property
    def valid(self):
        return not self.failures

    def fail(self, code, message):
        self.failures.append({"code": code, "message": message})

    def to_json_dict(self):
        return {
            "valid": self.valid,
            "failures": self.failures,
            "trace_residual": (
                [[str(v) for v in row] for row in self.trace_residual.rows]
                if self.trace_residual is not None
                else None
            ),
        }


def validate_system(sys):
    """Check all structural invariants; failures are itemized, not raised."""
    report = ValidationReport()
    if sys.rank < 1:
        report.fail("rank", f"rank must be >= 1, got {sys.rank}")
    if not sys.locals:
        report.fail("empty", "at least one singular point is required")
    seen = set()
    for ld in sys.locals:
        key = str(ld.point)
        if key in seen:
            report.fail(
                "duplicate-point", f"duplicate singular point {ld.point}"
            )
        seen.add(key)
        if ld.jordan.rank != sys.rank:
            report.fail(
                "rank-mismatch",
                f"Jordan data at {ld.point} has total size "
                f"{ld.jordan.rank}, expected rank {sys.rank}",
            )
    if sys.residues is not None:
        _validate_residues(sys, report)
    return report


def _validate_residues(sys, report):
    finite = sys.finite_locals()
    if sys.infinity_local() is None:
        report.fail(
            "trace-relation",
            "explicit residues imply a residue matrix at infinity "
            "(minus their sum), so infinity must be listed as a "
            "singular point",
        )
        return
    if len(sys.residues) != len(finite):
        report.fail(
            "residue-count",
            f"{len(sys.residues)} residue matrices for "
            f"{len(finite)} finite singular points",
        )
        return
    total = MatrixQ.zero(sys.rank)
    for ld, res in zip(finite, sys.residues):
        if res.n != sys.rank:
            report.fail(
                "residue-size",
                f"residue at {ld.point} is {res.n}x{res.n}, expected "
                f"{sys.rank}x{sys.rank}",
            )
            return
        total = total + res
        _check_residue_jordan(ld, res, report)
    implied = -total
    inf_local = sys.infinity_local()
    _check_residue_jordan(inf_local, implied, report, implied=True)
    # sum over all points (finite + implied at infinity) is zero by
    # construction; reported so consumers can audit the bookkeeping
    report.trace_residual = total + implied


def _check_residue_jordan(ld, res, report, implied=False):
    where = f"implied residue at {ld.point}" if implied else f"residue at {ld.point}"
    try:
        jtype, _ = jordan_form(res)
    except InputError as exc:
        report.fail("residue-spectrum", f"{where}: {exc}")
        return
    if jtype != ld.jordan:
        report.fail(
            "residue-jordan-mismatch",
            f"{where} has Jordan type {jtype}, declared {ld.jordan}",
        )


# -- index calculators ------------------------------------------------------


def euler_char_c(sys, coefficient=COEFF_SELF):
    """Compactly supported Euler characteristic d*(2 - |S|).

    Regular singularities contribute no irregularity terms, so the value
    depends only on the rank of the coefficient object and on |S|.
    """
    sys.require_valid()
    coefficient = _normalize_coefficient(coefficient)
    d = sys.rank if coefficient == COEFF_SELF else sys.rank**2
    return d * (2 - len(sys.locals))


def local_h0(local_data, coefficient=COEFF_SELF):
    """Dimension of local horizontal sections at one point.

    For the system itself this counts Jordan blocks with an integer
    exponent (those admit a Laurent-series solution; the rest need
    fractional powers or logarithms).  For the endomorphism object it is
    the commutant dimension with eigenvalues grouped mod Z.
    """
    coefficient = _normalize_coefficient(coefficient)
    if coefficient == COEFF_SELF:
        return sum(
            1 for ev, _ in local_data.jordan.blocks if ev.denominator == 1
        )
    return centralizer_dim(local_data.jordan, "mod-integers")


def chi_p(sys, coefficient=COEFF_SELF):
    """Parabolic Euler characteristic chi_c + sum of local h0."""
    return euler_char_c(sys, coefficient) + sum(
        local_h0(ld, coefficient) for ld in sys.locals
    )


def rigidity_index(sys):
    """chi_p of the endomorphism object; the value 2 marks rigidity."""
    return chi_p(sys, COEFF_END)


def accessory_parameters(sys):
    """dim of the parabolic H^1 of End: the accessory parameter count.

    Needs the irreducibility assertion (it justifies the outer
    cohomology dimensions being 1 each); an index above 2 contradicts
    irreducibility and is rejected.
    """
    sys.require_valid()
    if not sys.irreducible:
        raise InputError(
            "accessory parameter count requires the irreducibility "
            "assertion; without it the outer cohomology dimensions are "
            "unjustified"
        )
    index = rigidity_index(sys)
    if index > 2:
        raise InconsistencyError(
            f"rigidity index {index} > 2 contradicts irreducibility "
            "(the index of an irreducible system is 2 or <= 0)"
        )
    return 2 - index


@dataclass
class CohomologyReport:
    """End-coefficient index data for one system.

    Under the residue-disk, overconvergence and integrality conditions
    the parabolic Euler characteristic computed here is simultaneously
    the classical and the p-adic value; one calculator serves both
    readings.
    """

    chi_c: int
    local_h0: list
    chi_p: int
    rigidity_index: int
    h1p_end: int | None
    rigid: bool
    resonance_flags: list
    accessory: int | None
    points: list

    def to_json_dict(self):
        return {
            "coefficient": "End",
            "chi_c": self.chi_c,
            "local_h0": [
                {"point": p, "value": v}
                for p, v in zip(self.points, self.local_h0)
            ],
            "chi_p": self.chi_p,
            "rigidity_index": self.rigidity_index,
            "h1p_end": self.h1p_end,
            "rigid": self.rigid,
            "resonance_flags": [
                {"point": p, "resonant": r}
                for p, r in zip(self.points, self.resonance_flags)
            ],
            "accessory_parameters": self.accessory,
            "note": (
                "chi_p is simultaneously the classical and the p-adic "
                "parabolic Euler characteristic when the c1-c3 checks pass"
            ),
        }


def cohomology_report(sys):
    sys.require_valid()
    locs = [local_h0(ld, COEFF_END) for ld in sys.locals]
    cc = euler_char_c(sys, COEFF_END)
    cp = cc + sum(locs)
    index = cp
    rigid = index == 2 and sys.irreducible
    h1p = 2 - index if (sys.irreducible and index <= 2) else None
    accessory = h1p
    return CohomologyReport(
        chi_c=cc,
        local_h0=locs,
        chi_p=cp,
        rigidity_index=index,
        h1p_end=h1p,
        rigid=rigid,
        resonance_flags=[ld.is_resonant() for ld in sys.locals],
        accessory=accessory,
        points=[str(ld.point) for ld in sys.locals],
    )
