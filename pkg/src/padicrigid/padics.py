"""Exact rational and capped-precision p-adic scalar arithmetic.

Rationals are ``fractions.Fraction`` (re-exported as :data:`Rational`);
p-adic scalars are :class:`PadicNumber`, which stores an exact rational
representative together with an absolute precision bound.  All values are
immutable and every operation is a pure function, so everything here is
safe for unsynchronized concurrent use.

Interchange formats: rationals parse from and print to "a/b" or "a";
capped p-adic values print as "u * p^v + O(p^(v+m))".
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import InputError, PrecisionError
from . import _faults

INF = math.inf

#: Exact rational scalar type used across the package.
Rational = Fraction


def parse_rational(text):
    """Parse "a/b" or "a" into a Fraction, raising InputError on junk."""
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not a rational number: {text!r} ({exc})")


def is_prime(n):
    """Deterministic Miller-Rabin, exact for arbitrary integer size."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    if n in small:
        return True
    if any(n % q == 0 for q in small):
        return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:  # exact for n < 3.3e24; a safe superset for our use
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _require_prime(p):
    if not isinstance(p, int) or not is_prime(p):
        raise InputError(f"{p!r} is not a prime number")


def padic_valuation(r, p):
    """v_p(r) for a rational r; +inf for r = 0.

    v_p(a/b) = v_p(a) - v_p(b); the fraction being reduced means at most
    one of the two loops runs.
    """
    _require_prime(p)
    r = Fraction(r)
    if r == 0:
        return INF
    num, den = r.numerator, r.denominator
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    if v:
        return v
    while den % p == 0:
        den //= p
        v -= 1
    return v


def is_p_integral(r, p):
    """True iff r lies in Z_p, i.e. v_p(r) >= 0."""
    return padic_valuation(r, p) >= 0


def denominator_lcm(exponents):
    """lcm of the reduced denominators; 1 when all inputs are integers."""
    exponents = list(exponents)
    if not exponents:
        raise InputError("denominator_lcm of an empty list")
    return math.lcm(*(Fraction(e).denominator for e in exponents))


def _factorize(n):
    """Trial-division factorization as {prime: multiplicity}."""
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _carmichael(n):
    lam = 1
    for q, k in _factorize(n).items():
        if q == 2:
            block = 1 if k == 1 else (2 if k == 2 else 2 ** (k - 2))
        else:
            block = q ** (k - 1) * (q - 1)
        lam = math.lcm(lam, block)
    return lam


def multiplicative_order(p, N):
    """Minimal f >= 1 with p^f = 1 (mod N).

    Computed by divisor descent from the Carmichael exponent of (Z/N)*,
    so it stays cheap for the full acceptance sweep.
    """
    _require_prime(p)
    if N < 1:
        raise InputError(f"modulus must be positive, got {N}")
    if math.gcd(p, N) != 1:
        raise InputError(
            f"ramified denominator: gcd({p}, {N}) != 1, no power of {p} "
            f"is 1 mod {N}"
        )
    if N == 1:
        return 1
    f = _carmichael(N)
    for q in _factorize(f):
        while f % q == 0 and pow(p, f // q, N) == 1:
            f //= q
    assert pow(p, f, N) == 1
    return f


def _min_inf(a, b):
    return a if a <= b else b


class PadicNumber:
    """A p-adic scalar: exact rational representative + precision bound.

    ``value`` is the stored rational; the true scalar is congruent to it
    modulo p^abs_prec.  ``abs_prec = inf`` marks an exact value (no
    approximation was ever made).  The reported valuation is the sound
    lower bound min(v_p(value), abs_prec), the reported relative
    precision is abs_prec - valuation, and arithmetic propagates bounds
    by the ultrametric rules:

      add:  abs = min(abs_a, abs_b)
      mul:  abs = min(val_a + abs_b, val_b + abs_a)
      inv:  abs = abs_a - 2*val_a   (requires a known nonzero)
    """

    __slots__ = ("prime", "value", "abs_prec", "_val")

    def __init__(self, prime, value, abs_prec=INF):
        self.prime = prime
        self.value = Fraction(value)
        self.abs_prec = abs_prec
        self._val = None

    # -- constructors -------------------------------------------------

    @classmethod
    def exact(cls, value, prime):
        _require_prime(prime)
        return cls(prime, value)

    @classmethod
    def from_rational(cls, value, prime, precision):
        """Cap a rational at ``precision`` significant p-adic digits."""
        _require_prime(prime)
        if precision < 1:
            raise InputError(f"precision must be >= 1, got {precision}")
        value = Fraction(value)
        if value == 0:
            return cls(prime, 0)
        v = padic_valuation(value, prime)
        return cls(prime, value, v + precision)

    @classmethod
    def zero_to_precision(cls, prime, abs_prec):
        return cls(prime, 0, abs_prec)

    # -- structure ----------------------------------------------------

    @property
    def valuation(self):
        """Sound lower bound for v_p; exact when the value is known nonzero."""
        if self._val is None:
            raw = padic_valuation(self.value, self.prime)
            self._val = _min_inf(raw, self.abs_prec)
        return self._val

    @property
    def precision(self):
        """Relative precision (significant digits past the valuation)."""
        if self.abs_prec is INF:
            return INF
        return self.abs_prec - self.valuation

    def is_exact(self):
        return self.abs_prec is INF

    def is_exact_zero(self):
        return self.abs_prec is INF and self.value == 0

    def is_known_nonzero(self):
        return padic_valuation(self.value, self.prime) < self.abs_prec

    def is_zero_to_precision(self):
        """Zero as far as the stored digits go, but not exactly zero."""
        return not self.is_known_nonzero() and not self.is_exact_zero()

    def is_unit(self):
        return self.is_known_nonzero() and self.valuation == 0

    # -- arithmetic ---------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, PadicNumber):
            if other.prime != self.prime:
                raise InputError(
                    f"prime mismatch: {self.prime} vs {other.prime}"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return PadicNumber(self.prime, other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return PadicNumber(
            self.prime,
            self.value + other.value,
            _min_inf(self.abs_prec, other.abs_prec),
        )

    __radd__ = __add__

    def __neg__(self):
        return PadicNumber(self.prime, -self.value, self.abs_prec)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        value = _faults.mul_hook(self.value * other.value)
        if self.abs_prec is INF and other.abs_prec is INF:
            return PadicNumber(self.prime, value)
        abs_prec = _min_inf(
            self.valuation + other.abs_prec, other.valuation + self.abs_prec
        )
        return PadicNumber(self.prime, value, abs_prec)

    __rmul__ = __mul__

    def invert(self):
        if not self.is_known_nonzero():
            raise PrecisionError(
                "cannot invert a value that is zero to the stored precision"
            )
        v = self.valuation
        abs_prec = INF if self.abs_prec is INF else self.abs_prec - 2 * v
        return PadicNumber(self.prime, 1 / self.value, abs_prec)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.invert()

    # -- normalization and display -------------------------------------

    def unit_residue(self, digits=None):
        """Integer u with value = u * p^v mod p^(v+digits), 0 <= u < p^digits."""
        if not self.is_known_nonzero():
            raise PrecisionError("no unit part: value is zero to precision")
        v = self.valuation
        if digits is None:
            if self.abs_prec is INF:
                raise PrecisionError("exact value needs an explicit digit count")
            digits = self.abs_prec - v
        num, den = self.value.numerator, self.value.denominator
        pv = self.prime**abs(v)
        if v >= 0:
            num //= pv
        else:
            den //= pv
        mod = self.prime**digits
        return num * pow(den, -1, mod) % mod

    def reduced(self):
        """Canonical small representative congruent mod p^abs_prec."""
        if self.abs_prec is INF or self.value == 0:
            return self
        v = padic_valuation(self.value, self.prime)
        if v >= self.abs_prec:
            return PadicNumber(self.prime, 0, self.abs_prec)
        u = self.unit_residue()
        value = (
            Fraction(u * self.prime**v)
            if v >= 0
            else Fraction(u, self.prime**-v)
        )
        return PadicNumber(self.prime, value, self.abs_prec)

    def with_abs_cap(self, abs_cap):
        """Weaken the precision claim to at most p^abs_cap (sound always)."""
        if self.abs_prec <= abs_cap:
            return self
        return PadicNumber(self.prime, self.value, abs_cap).reduced()

    def congruent_to(self, other, abs_level=None):
        """True iff self - other vanishes to the (joint) stated precision."""
        diff = self - other
        if abs_level is None:
            return not diff.is_known_nonzero()
        return diff.valuation >= abs_level

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PadicNumber(self.prime, other)
        if not isinstance(other, PadicNumber):
            return NotImplemented
        return (
            self.prime == other.prime
            and self.value == other.value
            and self.abs_prec == other.abs_prec
        )

    def __str__(self):
        if self.is_exact_zero():
            return "0"
        if self.abs_prec is INF:
            return str(self.value)
        if not self.is_known_nonzero():
            return f"O({self.prime}^{self.abs_prec})"
        u = self.unit_residue()
        return f"{u} * {self.prime}^{self.valuation} + O({self.prime}^{self.abs_prec})"

    def __repr__(self):
        return f"PadicNumber({self.prime}, {self.value!r}, {self.abs_prec!r})"
