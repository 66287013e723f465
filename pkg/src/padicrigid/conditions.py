"""Decidable hypothesis checks at a prime p, and the Frobenius power data.

The checks are named c1-c4 in every report (the stable interface):

  c1  one singular point per residue disk mod p,
  c2  overconvergence (a user assertion, recorded but never inferred),
  c3  pairwise exponent differences p-adically integral at every point
      (the non-Liouville clause holds automatically for rationals),
  c4  exponents rational (structural: the data model only holds
      rationals).

When c1, c3, c4 hold and the exponent denominators are prime to p, the
report carries N (lcm of denominators), the minimal f with
p^f = 1 (mod N), and q = p^f; any positive multiple of f works as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InputError
from .linalg import end_exponents
from .padics import (
    denominator_lcm,
    is_p_integral,
    multiplicative_order,
    padic_valuation,
    is_prime,
)

LIOUVILLE_NOTE = (
    "rational numbers are never p-adic Liouville, so the non-Liouville "
    "clause passes automatically for this data model"
)


def residue_class(point, p):
    """Reduction of a point of P^1 mod p.

    A finite point with non-negative valuation reduces to its image in
    the residue field; negative valuation lands in the disk at
    infinity, as does the point at infinity itself.
    """
    if point.is_infinity:
        return "inf"
    r = point.location
    if padic_valuation(r, p) < 0:
        return "inf"
    mod = r.numerator * pow(r.denominator, -1, p) % p
    return int(mod)


@dataclass
class CheckResult:
    passed: bool
    witnesses: list

    def to_json_dict(self):
        return {"pass": self.passed, "witnesses": self.witnesses}


def check_c1(points, p):
    """Pairwise distinct reductions mod p; witnesses list the collisions."""
    if not is_prime(p):
        raise InputError(f"{p!r} is not a prime number")
    classes = {}
    witnesses = []
    for pt in points:
        cls = residue_class(pt, p)
        if cls in classes:
            witnesses.append(
                {
                    "points": [str(classes[cls]), str(pt)],
                    "residue_class": str(cls),
                }
            )
        else:
            classes[cls] = pt
    return CheckResult(not witnesses, witnesses)


def check_c3(sys, p):
    """Every pairwise difference of exponents at each point lies in Z_p."""
    sys.require_valid()
    if not is_prime(p):
        raise InputError(f"{p!r} is not a prime number")
    witnesses = []
    for ld in sys.locals:
        for diff in sorted(set(end_exponents(ld.exponents()))):
            if not is_p_integral(diff, p):
                witnesses.append(
                    {"point": str(ld.point), "difference": str(diff)}
                )
    return CheckResult(not witnesses, witnesses)


def frobenius_power(sys, p):
    """(N, f, q): exponent denominator lcm, minimal order, q = p^f.

    Raises the ramified-denominator error when gcd(p, N) != 1; no power
    of p can then be 1 mod N.
    """
    sys.require_valid()
    N = denominator_lcm(sys.all_exponents())
    if math.gcd(p, N) != 1:
        raise InputError(
            f"ramified denominator: the exponent denominator lcm {N} is "
            f"divisible by p = {p}; no Frobenius power q = 1 (mod {N}) exists"
        )
    f = multiplicative_order(p, N)
    return N, f, p**f


@dataclass
class ConditionReport:
    prime: int
    c1: CheckResult
    c2_asserted: bool
    c3: CheckResult
    N: int
    f: int | None
    q: int | None
    method1_available: bool
    ramified: bool

    @property
    def eligible(self):
        """True iff a Frobenius power could be computed (q present)."""
        return self.q is not None

    def all_pass(self):
        return (
            self.c1.passed
            and self.c2_asserted
            and self.c3.passed
            and not self.ramified
        )

    def to_json_dict(self):
        out = {
            "prime": self.prime,
            "c1": self.c1.to_json_dict(),
            "c2": {"asserted": self.c2_asserted},
            "c3": dict(self.c3.to_json_dict(), liouville_note=LIOUVILLE_NOTE),
            "c4": {
                "pass": True,
                "note": "structural: exponents are exact rationals by type",
            },
            "N": self.N,
            "f": self.f,
            "q": self.q,
            "method1_available": self.method1_available,
        }
        if self.ramified:
            out["ramified_denominator"] = True
        if self.f is not None:
            out["valid_f_note"] = (
                f"f = {self.f} is minimal; any positive multiple also works"
            )
        return out


def full_condition_report(sys, p):
    """Aggregate c1/c2/c3/c4 and, when eligible, the (N, f, q) data."""
    sys.require_valid()
    if not is_prime(p):
        raise InputError(f"{p!r} is not a prime number")
    c1 = check_c1(sys.points(), p)
    c3 = check_c3(sys, p)
    N = denominator_lcm(sys.all_exponents())
    ramified = math.gcd(p, N) != 1
    f = q = None
    if c1.passed and c3.passed and not ramified:
        f = multiplicative_order(p, N)
        q = p**f
    return ConditionReport(
        prime=p,
        c1=c1,
        c2_asserted=sys.overconvergent_asserted,
        c3=c3,
        N=N,
        f=f,
        q=q,
        method1_available=p >= 3,
        ramified=ramified,
    )
