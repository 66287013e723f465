"""Truncated Laurent series and matrix series over p-adic coefficients.

A :class:`LaurentSeries` stores sparse coefficients on a half-open
exponent window [lo, hi): below lo everything is known to be zero, at or
above hi nothing is known.  ``hi = inf`` marks a series known exactly at
every exponent (a Laurent polynomial).  Every operation computes the
largest window on which its result is sound, so no coefficient is ever
emitted that a wider recomputation could contradict.

Equality of truncated series always means equality to the declared
window and precision.  The transcendental constructors (`log_one_plus`,
`matrix_exp`) sum until the omitted tail drops below an absolute p-adic
cutoff and then weaken their output's precision claims to that cutoff,
so division-by-k losses are deducted instead of silently kept.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import ConvergenceError, InputError, PrecisionError
from .padics import INF, PadicNumber, padic_valuation

DEFAULT_XBOUND = 32  # default window [-32, 32)
DEFAULT_PDIGITS = 20
DEFAULT_REL_LEN = 2 * DEFAULT_XBOUND


def _min(a, b):
    return a if a <= b else b


def _add_exp(a, b):
    if a is INF or b is INF:
        return INF
    return a + b


class LaurentSeries:
    """Sparse Laurent series with an explicit soundness window."""

    __slots__ = ("prime", "lo", "hi", "coeffs", "pcap")

    def __init__(self, prime, coeffs, lo, hi, pcap=DEFAULT_PDIGITS):
        self.prime = prime
        self.lo = lo
        self.hi = hi
        self.pcap = pcap
        self.coeffs = {
            k: c for k, c in coeffs.items() if not c.is_exact_zero()
        }
        for k in self.coeffs:
            if k < lo or k >= hi:
                raise InputError(
                    f"coefficient at x^{k} outside window [{lo}, {hi})"
                )

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, prime, pcap=DEFAULT_PDIGITS):
        """The exact zero series (known zero at every exponent)."""
        return cls(prime, {}, 0, INF, pcap)

    @classmethod
    def monomial(cls, prime, value, exponent=0, pcap=DEFAULT_PDIGITS):
        c = (
            value
            if isinstance(value, PadicNumber)
            else PadicNumber(prime, Fraction(value))
        )
        if c.is_exact_zero():
            return cls.zero(prime, pcap)
        return cls(prime, {exponent: c}, exponent, INF, pcap)

    @classmethod
    def one(cls, prime, pcap=DEFAULT_PDIGITS):
        return cls.monomial(prime, 1, 0, pcap)

    @classmethod
    def from_terms(cls, prime, terms, hi=INF, pcap=DEFAULT_PDIGITS):
        """Laurent polynomial from (exponent, coefficient) pairs."""
        coeffs = {}
        for k, v in terms:
            c = (
                v
                if isinstance(v, PadicNumber)
                else PadicNumber(prime, Fraction(v))
            )
            coeffs[k] = coeffs[k] + c if k in coeffs else c
        live = {k for k, c in coeffs.items() if not c.is_exact_zero()}
        lo = min(live, default=0)
        return cls(prime, coeffs, lo, hi, pcap)

    def _make(self, coeffs, lo, hi, pcap=None):
        return LaurentSeries(self.prime, coeffs, lo, hi, pcap or self.pcap)

    # -- inspection -------------------------------------------------------

    def items(self):
        return sorted(self.coeffs.items())

    def coefficient(self, k):
        """Coefficient at x^k, or None when it lies beyond the window."""
        if k >= self.hi:
            return None
        return self.coeffs.get(k, PadicNumber(self.prime, 0))

    def is_exact_zero(self):
        return not self.coeffs and self.hi is INF

    def x_order(self):
        """Smallest exponent whose coefficient may be nonzero; None if none."""
        return min(self.coeffs, default=None)

    def known_leading(self):
        """(exponent, coefficient) of the leading term.

        Demands the leading stored coefficient be known nonzero; a
        zero-to-precision coefficient in front would make the order of
        the series undetermined.
        """
        for k, c in self.items():
            if c.is_known_nonzero():
                return k, c
            raise PrecisionError(
                f"leading term undetermined: coefficient at x^{k} is zero "
                "only to its stored precision"
            )
        if self.hi is INF:
            raise InputError("the zero series has no leading term")
        raise PrecisionError("no nonzero coefficient within the window")

    def min_valuation(self):
        """Sound lower bound for min over coefficients of v_p; inf if none."""
        return min((c.valuation for c in self.coeffs.values()), default=INF)

    # -- ring operations --------------------------------------------------

    def _check(self, other):
        if not isinstance(other, LaurentSeries):
            raise InputError(f"expected a series, got {type(other).__name__}")
        if other.prime != self.prime:
            raise InputError("prime mismatch between series")

    def __add__(self, other):
        self._check(other)
        hi = _min(self.hi, other.hi)
        lo = min(self.lo, other.lo)
        coeffs = {k: c for k, c in self.coeffs.items() if k < hi}
        for k, c in other.coeffs.items():
            if k < hi:
                coeffs[k] = coeffs[k] + c if k in coeffs else c
        return self._make(coeffs, lo, hi, _min(self.pcap, other.pcap))

    def __neg__(self):
        return self._make(
            {k: -c for k, c in self.coeffs.items()}, self.lo, self.hi
        )

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        if self.is_exact_zero() or other.is_exact_zero():
            return LaurentSeries.zero(self.prime, self.pcap)
        lo = self.lo + other.lo
        hi = _min(_add_exp(self.lo, other.hi), _add_exp(other.lo, self.hi))
        a = [
            (k, c.value, c.valuation, c.abs_prec)
            for k, c in self.coeffs.items()
        ]
        b = [
            (k, c.value, c.valuation, c.abs_prec)
            for k, c in other.coeffs.items()
        ]
        if len(a) > len(b):
            a, b = b, a
        vals, absps = {}, {}
        for ka, va, la, pa in a:
            for kb, vb, lb, pb in b:
                k = ka + kb
                if k >= hi:
                    continue
                ap = (
                    INF
                    if pa is INF and pb is INF
                    else _min(la + pb, lb + pa)
                )
                if k in vals:
                    vals[k] += va * vb
                    absps[k] = _min(absps[k], ap)
                else:
                    vals[k] = va * vb
                    absps[k] = ap
        coeffs = {
            k: PadicNumber(self.prime, v, absps[k])
            for k, v in vals.items()
            if not (v == 0 and absps[k] is INF)
        }
        return self._make(coeffs, lo, hi, _min(self.pcap, other.pcap))

    def scale(self, c):
        """Multiply by a scalar (PadicNumber or exact rational)."""
        if not isinstance(c, PadicNumber):
            c = PadicNumber(self.prime, Fraction(c))
        if c.is_exact_zero():
            return LaurentSeries.zero(self.prime, self.pcap)
        return self._make(
            {k: v * c for k, v in self.coeffs.items()}, self.lo, self.hi
        )

    def shift(self, k):
        """Multiply by x^k."""
        return self._make(
            {e + k: c for e, c in self.coeffs.items()},
            self.lo + k,
            _add_exp(self.hi, k),
        )

    def power(self, n):
        if n < 0:
            raise InputError("power() takes a non-negative exponent")
        out = LaurentSeries.one(self.prime, self.pcap)
        for _ in range(n):
            out = out * self
        return out

    def derivative(self):
        """d/dx: exponent k maps to coefficient k*a_k at exponent k-1."""
        coeffs = {k - 1: c * k for k, c in self.coeffs.items() if k != 0}
        return self._make(
            coeffs, self.lo - 1, _add_exp(self.hi, -1)
        )

    # -- window and precision management ----------------------------------

    def truncate(self, lo=None, hi=None):
        """Restrict to a smaller window (never widens knowledge)."""
        new_lo = self.lo if lo is None else max(lo, self.lo)
        new_hi = self.hi if hi is None else _min(hi, self.hi)
        coeffs = {
            k: c for k, c in self.coeffs.items() if new_lo <= k < new_hi
        }
        return self._make(coeffs, new_lo, new_hi)

    def reduced(self, abs_cap=None):
        """Canonicalize coefficients; optionally weaken them to abs_cap."""
        coeffs = {}
        for k, c in self.coeffs.items():
            if abs_cap is not None:
                c = c.with_abs_cap(abs_cap)
            c = c.reduced()
            if not c.is_exact_zero():
                coeffs[k] = c
        return self._make(coeffs, self.lo, self.hi)

    def agrees_with(self, other, lo, hi, abs_level=None):
        """Coefficientwise congruence on [lo, hi) at joint precision."""
        for k in range(lo, hi):
            a, b = self.coefficient(k), other.coefficient(k)
            if a is None or b is None:
                return False
            if not a.congruent_to(b, abs_level):
                return False
        return True

    # -- inversion, composition, dlog ---------------------------------------

    def inverse(self, rel_len=None):
        """Multiplicative inverse to ``rel_len`` coefficients past the lead."""
        mu, c0 = self.known_leading()
        if rel_len is None:
            rel_len = self.hi - mu if self.hi is not INF else DEFAULT_REL_LEN
        if self.hi is not INF:
            rel_len = _min(rel_len, self.hi - mu)
        rel_len = int(rel_len)
        c0_inv = c0.invert()
        g = {0: c0_inv}
        for k in range(1, rel_len):
            acc = None
            for i in range(1, k + 1):
                if k - i not in g:
                    continue
                fi = self.coeffs.get(mu + i)
                if fi is None:
                    continue
                term = fi * g[k - i]
                acc = term if acc is None else acc + term
            if acc is not None:
                g[k] = -(c0_inv * acc)
        coeffs = {-mu + k: v for k, v in g.items()}
        return self._make(coeffs, -mu, -mu + rel_len)

    def dlog(self, rel_len=None):
        """Logarithmic derivative f'/f; needs a unit leading coefficient."""
        mu, c0 = self.known_leading()
        if c0.valuation != 0:
            raise PrecisionError(
                "dlog needs a p-adic unit leading coefficient "
                f"(found valuation {c0.valuation} at x^{mu})"
            )
        return self.derivative() * self.inverse(rel_len)

    def substitute(self, phi, hi_target=None):
        """f(phi(x)), truncated to the soundly computable window."""
        self._check(phi)
        if self.is_exact_zero():
            return LaurentSeries.zero(self.prime, self.pcap)
        mu, lead = phi.known_leading()
        if mu < 1:
            raise InputError(
                "substitution needs a series with strictly positive "
                f"leading exponent (got {mu})"
            )
        if not self.coeffs:
            # All-zero on a finite window: the image is known zero below
            # the first unknown term's order.
            hi = self.hi * mu if self.hi is not INF else INF
            return self._make({}, 0, hi)
        has_neg = any(k < 0 for k in self.coeffs)
        if has_neg and lead.valuation != 0:
            raise InputError(
                "substitution into negative powers needs a unit leading "
                "coefficient"
            )
        phi_len = phi.hi - mu if phi.hi is not INF else INF
        w_from_f = INF if self.hi is INF else self.hi * mu
        w_from_phi = _add_exp(min(self.coeffs) * mu, phi_len)
        hi = _min(w_from_f, w_from_phi)
        if hi_target is not None:
            hi = _min(hi, hi_target)
        work_hi = None if hi is INF else int(hi)

        max_neg = -min(min(self.coeffs), 0)
        inv = None
        if has_neg:
            inv_len = (
                work_hi + (max_neg + 2) * mu
                if work_hi is not None
                else DEFAULT_REL_LEN + (max_neg + 2) * mu
            )
            inv = phi.inverse(max(inv_len, 1))
        pows = {0: LaurentSeries.one(self.prime, self.pcap)}

        def phi_power(k):
            if k not in pows:
                prev = (
                    phi_power(k - 1) * phi
                    if k > 0
                    else phi_power(k + 1) * inv
                )
                if work_hi is not None:
                    prev = prev.truncate(hi=work_hi)
                pows[k] = prev
            return pows[k]

        acc = LaurentSeries.zero(self.prime, self.pcap)
        for k, c in self.items():
            if work_hi is not None and k * mu >= work_hi:
                continue
            acc = acc + phi_power(k).scale(c)
        return acc.truncate(hi=None if hi is INF else int(hi))

    # -- display ------------------------------------------------------------

    def __str__(self):
        parts = [f"({c}) * x^{k}" for k, c in self.items()]
        body = " + ".join(parts) if parts else "0"
        if self.hi is INF:
            return body
        return f"{body} + O(x^{self.hi})"

    def __repr__(self):
        return (
            f"<LaurentSeries p={self.prime} "
            f"window=[{self.lo},{self.hi}) {self}>"
        )


def _vp_factorial(k, p):
    """Legendre's formula: v_p(k!) = (k - digit_sum_p(k)) / (p - 1)."""
    s, n = 0, k
    while n:
        s += n % p
        n //= p
    return (k - s) // (p - 1)


def _log_p_floor(k, p):
    return int(math.log(k, p) + 1e-9) if k > 1 else 0


def _series_stop_index(v_t, mu_t, hi, pcap, p, factorial):
    """(K, cutoff): summing k <= K leaves a tail below p^cutoff.

    The denominator loss per term is bounded by log_p(k) (plain log
    series) or (k-1)/(p-1) (factorial series); with v_t >= 1 both leave
    k*v_t - loss non-decreasing, so the first index past the cutoff
    bounds the whole tail.
    """
    cutoff = v_t + pcap + 2
    loss = (
        (lambda k: (k - 1) // (p - 1))
        if factorial
        else (lambda k: _log_p_floor(k, p))
    )
    k_x = None
    if mu_t >= 1 and hi is not INF:
        k_x = max(0, -(-int(hi) // mu_t))  # ceil(hi / mu_t)
    k = 1
    while k * v_t - loss(k) < cutoff:
        if k_x is not None and k >= k_x:
            return k_x, cutoff
        k += 1
        if k > 100000:
            raise ConvergenceError("series does not reach the precision cap")
    K = k - 1
    if k_x is not None:
        K = min(K, k_x)
    return K, cutoff


def log_one_plus(t, hi=None, pcap=None):
    """log(1 + t) = sum_{k>=1} (-1)^(k+1) t^k / k, for v_p(t) >= 1.

    Output coefficients carry at most p^cutoff absolute precision, the
    bound below which the omitted tail falls.
    """
    pcap = pcap or t.pcap
    if t.is_exact_zero():
        return LaurentSeries.zero(t.prime, pcap)
    v_t = t.min_valuation()
    if v_t < 1:
        raise ConvergenceError(
            f"h not = 1 mod p: a coefficient of h - 1 has valuation {v_t}"
        )
    p = t.prime
    work_hi = _min(t.hi, INF if hi is None else hi)
    if work_hi is INF:
        work_hi = DEFAULT_XBOUND
    t = t.truncate(hi=work_hi)
    mu_t = t.x_order()
    if mu_t is None:
        return t  # zero to its stored precision; log(1+t) = t there
    K, cutoff = _series_stop_index(int(v_t), mu_t, work_hi, pcap, p, False)
    acc = LaurentSeries.zero(p, pcap)
    term = t
    margin = _log_p_floor(max(K, 1), p) + 1
    sign = 1
    for k in range(1, K + 1):
        acc = acc + term.scale(Fraction(sign, k))
        if k < K:
            term = (term * t).reduced(cutoff + margin)
        sign = -sign
    return acc.truncate(hi=work_hi).reduced(cutoff)


class MatrixSeries:
    """Square matrix of Laurent series sharing one prime."""

    __slots__ = ("prime", "n", "rows")

    def __init__(self, prime, rows):
        self.prime = prime
        self.rows = tuple(tuple(row) for row in rows)
        self.n = len(self.rows)
        for row in self.rows:
            if len(row) != self.n:
                raise InputError("matrix series must be square")

    @classmethod
    def identity(cls, n, prime, pcap=DEFAULT_PDIGITS):
        return cls(
            prime,
            [
                [
                    LaurentSeries.one(prime, pcap)
                    if i == j
                    else LaurentSeries.zero(prime, pcap)
                    for j in range(n)
                ]
                for i in range(n)
            ],
        )

    @classmethod
    def from_scalar_matrix(cls, matrix, prime, x_power=0, pcap=DEFAULT_PDIGITS):
        """Constant rational matrix times x^x_power, stored exactly."""
        return cls(
            prime,
            [
                [
                    LaurentSeries.monomial(prime, v, x_power, pcap)
                    for v in row
                ]
                for row in matrix
            ],
        )

    def entry(self, i, j):
        return self.rows[i][j]

    def _check(self, other):
        if not isinstance(other, MatrixSeries):
            raise InputError("expected a matrix series")
        if other.prime != self.prime or other.n != self.n:
            raise InputError("matrix series shape or prime mismatch")

    def __add__(self, other):
        self._check(other)
        return MatrixSeries(
            self.prime,
            [
                [self.rows[i][j] + other.rows[i][j] for j in range(self.n)]
                for i in range(self.n)
            ],
        )

    def __neg__(self):
        return MatrixSeries(
            self.prime, [[-e for e in row] for row in self.rows]
        )

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        out = []
        for i in range(self.n):
            row = []
            for j in range(self.n):
                acc = None
                for k in range(self.n):
                    a, b = self.rows[i][k], other.rows[k][j]
                    if a.is_exact_zero() or b.is_exact_zero():
                        continue
                    prod = a * b
                    acc = prod if acc is None else acc + prod
                row.append(
                    acc if acc is not None else LaurentSeries.zero(self.prime)
                )
            out.append(row)
        return MatrixSeries(self.prime, out)

    def scale(self, c):
        return MatrixSeries(
            self.prime, [[e.scale(c) for e in row] for row in self.rows]
        )

    def scale_series(self, s):
        return MatrixSeries(
            self.prime, [[e * s for e in row] for row in self.rows]
        )

    def derivative(self):
        return MatrixSeries(
            self.prime, [[e.derivative() for e in row] for row in self.rows]
        )

    def truncate(self, lo=None, hi=None):
        return MatrixSeries(
            self.prime,
            [[e.truncate(lo, hi) for e in row] for row in self.rows],
        )

    def reduced(self, abs_cap=None):
        return MatrixSeries(
            self.prime,
            [[e.reduced(abs_cap) for e in row] for row in self.rows],
        )

    def min_valuation(self):
        return min(
            (e.min_valuation() for row in self.rows for e in row),
            default=INF,
        )

    def common_window(self):
        lo = min(e.lo for row in self.rows for e in row)
        hi = min(e.hi for row in self.rows for e in row)
        return lo, hi

    def agrees_with(self, other, lo, hi, abs_level=None):
        return all(
            self.rows[i][j].agrees_with(other.rows[i][j], lo, hi, abs_level)
            for i in range(self.n)
            for j in range(self.n)
        )

    def inverse(self, rel_len=None):
        """Gauss-Jordan over the series ring (pivots via series inverses)."""
        n = self.n
        work = [
            list(self.rows[i])
            + [
                LaurentSeries.one(self.prime)
                if i == j
                else LaurentSeries.zero(self.prime)
                for j in range(n)
            ]
            for i in range(n)
        ]
        for col in range(n):
            pivot_row = pivot_ord = None
            for r in range(col, n):
                try:
                    mu, _ = work[r][col].known_leading()
                except (InputError, PrecisionError):
                    continue
                if pivot_ord is None or mu < pivot_ord:
                    pivot_row, pivot_ord = r, mu
            if pivot_row is None:
                raise PrecisionError(
                    "matrix series is not invertible to the stored precision"
                )
            work[col], work[pivot_row] = work[pivot_row], work[col]
            inv_pivot = work[col][col].inverse(rel_len)
            work[col] = [e * inv_pivot for e in work[col]]
            for r in range(n):
                if r == col or work[r][col].is_exact_zero():
                    continue
                factor = work[r][col]
                work[r] = [
                    work[r][j] - factor * work[col][j] for j in range(2 * n)
                ]
        return MatrixSeries(self.prime, [row[n:] for row in work])

    def __str__(self):
        return "\n".join(
            "[" + " | ".join(str(e) for e in row) + "]" for row in self.rows
        )


def _mat_mul_q(a, b):
    n = len(a)
    return [
        [sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)]
        for i in range(n)
    ]


def matrix_exp(matrix, L, hi=None, pcap=None):
    """exp(A (x) L) = sum_k A^k L(x)^k / k! as a matrix series.

    Requires p >= 3, a p-integral A and v_p(L) >= 1; under those bounds
    the factorial loss v_p(k!) grows slower than k*v_p(L), the series
    converges, and the constant term is the identity mod p.
    """
    prime = L.prime
    pcap = pcap or L.pcap
    if prime == 2:
        raise ConvergenceError(
            "the exponential construction diverges for p = 2; use the "
            "change-of-lifting method instead"
        )
    matrix = [[Fraction(v) for v in row] for row in matrix]
    n = len(matrix)
    for row in matrix:
        if len(row) != n:
            raise InputError("exp needs a square matrix")
        for v in row:
            if padic_valuation(v, prime) < 0:
                raise InputError(
                    f"matrix entry {v} is not {prime}-adically integral"
                )
    if L.is_exact_zero():
        return MatrixSeries.identity(n, prime, pcap)
    v_L = L.min_valuation()
    if v_L < 1:
        raise ConvergenceError(
            f"exp needs coefficient valuations >= 1, found {v_L}"
        )
    work_hi = _min(L.hi, INF if hi is None else hi)
    if work_hi is INF:
        work_hi = DEFAULT_XBOUND
    L = L.truncate(hi=work_hi)
    if L.x_order() is None:
        return MatrixSeries.identity(n, prime, pcap)
    K, cutoff = _series_stop_index(
        int(v_L), L.x_order(), work_hi, pcap, prime, True
    )
    out = MatrixSeries.identity(n, prime, pcap)
    a_pow = [
        [Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)
    ]
    l_pow = LaurentSeries.one(prime, pcap)
    kfact = 1
    margin = _vp_factorial(K, prime) + 1
    for k in range(1, K + 1):
        a_pow = _mat_mul_q(a_pow, matrix)
        if all(v == 0 for row in a_pow for v in row):
            break  # nilpotent A: the series terminates exactly
        l_pow = (l_pow * L).reduced(cutoff + margin)
        kfact *= k
        coef = [[v / kfact for v in row] for row in a_pow]
        term = MatrixSeries.from_scalar_matrix(coef, prime, 0, pcap)
        out = out + term.scale_series(l_pow)
    return out.truncate(hi=work_hi).reduced(cutoff)
