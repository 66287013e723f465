"""Local Frobenius structures on truncated Robba-ring models.

A :class:`LocalModule` is the free module with logarithmic connection
matrix A/x for a p-integral constant matrix A with rational spectrum.
A gauge matrix C intertwines connection matrices B and B' exactly when

    dC * C^-1 = C B C^-1 - B',

and every construction here returns a :class:`BaseChangeResult` whose
residual (the difference of the two sides) is recomputed from its parts
and reported as a minimum p-adic valuation over a checked window.  The
gauges carry the named source connection onto the target:

  * ``shift_isomorphism``: x^k on one Jordan block carries
    (A + k*P)/x onto A/x (an eigenvalue shift by k);
  * ``rescaling_isomorphism``: carries qA/x onto A/x whenever
    q = 1 (mod N), N the lcm of eigenvalue denominators;
  * ``exponential_gauge``: exp(A log h) carries the pullback of A/x
    along phi = x^q h onto qA/x (needs p >= 3);
  * ``change_of_lifting``: the Taylor comparison between the pullbacks
    along two lifts sharing q;
  * ``local_frobenius_structure``: the composite pullback -> A/x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ConvergenceError, InputError
from .linalg import MatrixQ, jordan_form
from .padics import INF, PadicNumber, padic_valuation
from .series import (
    DEFAULT_PDIGITS,
    LaurentSeries,
    MatrixSeries,
    _log_p_floor,
    _series_stop_index,
    _vp_factorial,
    log_one_plus,
    matrix_exp,
)


class LocalModule:
    """Free module with connection matrix A/x; A p-integral, spectrum in Q."""

    def __init__(self, prime, matrix):
        if not isinstance(matrix, MatrixQ):
            matrix = MatrixQ(matrix)
        self.prime = prime
        self.matrix = matrix
        self.rank = matrix.n
        for row in matrix.rows:
            for v in row:
                if padic_valuation(v, prime) < 0:
                    raise InputError(
                        f"matrix entry {v} is not {prime}-adically integral"
                    )
        self.jordan_type, self.transform = jordan_form(matrix)
        self.denominator_lcm = math.lcm(
            *(ev.denominator for ev in self.jordan_type.eigenvalues())
        )

    def is_resonant(self):
        return self.jordan_type.is_resonant()

    def connection(self, pcap=DEFAULT_PDIGITS):
        """The connection matrix A * x^-1, stored exactly."""
        return MatrixSeries.from_scalar_matrix(
            self.matrix.rows, self.prime, -1, pcap
        )


def connection_form(module, pcap=DEFAULT_PDIGITS):
    return module.connection(pcap)


class FrobLift:
    """A lift phi(x) = x^q * h(x) of the q-power Frobenius, h = 1 mod p."""

    def __init__(self, prime, q, h=None, pcap=DEFAULT_PDIGITS):
        self.prime = prime
        self.q = q
        self.pcap = pcap
        f, qq = 0, q
        while qq % prime == 0 and qq > 1:
            qq //= prime
            f += 1
        if qq != 1 or f < 1:
            raise InputError(f"q = {q} is not a positive power of p = {prime}")
        self.f = f
        if h is None:
            h = LaurentSeries.one(prime, pcap)
        self.h = h
        c0 = h.coefficient(0)
        if c0 is None:
            raise InputError(
                "lift multiplier h must include exponent 0 in its window"
            )
        if (c0 - PadicNumber(prime, 1)).valuation < 1 or not c0.is_unit():
            raise InputError(
                "lift multiplier h must have unit constant term = 1 mod p"
            )
        delta = h - LaurentSeries.one(prime, pcap)
        if delta.min_valuation() < 1:
            raise InputError(
                "every coefficient of h - 1 must have valuation >= 1"
            )
        self.h_minus_1 = delta

    @classmethod
    def standard(cls, prime, q, pcap=DEFAULT_PDIGITS):
        """The lift phi(x) = x^q."""
        return cls(prime, q, None, pcap)

    def is_standard(self):
        return self.h_minus_1.is_exact_zero()

    def phi(self):
        """phi(x) = x^q * h(x) as a series."""
        return self.h.shift(self.q)


@dataclass
class BaseChangeResult:
    """A gauge with its verification certificate.

    ``residual_valuation`` is the minimum p-adic valuation over all
    coefficients of dC*C^-1 - (C B C^-1 - B') on ``window_checked``;
    +inf means the residual vanishes identically there (exact paths).
    ``threshold`` is the verification bar: working p-digits minus the
    factorial reserve the construction actually spent.
    """

    gauge: MatrixSeries
    gauge_inverse: MatrixSeries
    source: MatrixSeries
    target: MatrixSeries
    residual: MatrixSeries
    residual_valuation: float
    window_checked: tuple
    method: str
    q: int | None
    threshold: float
    resonant: bool = False

    @property
    def verified(self):
        return self.residual_valuation >= self.threshold

    def to_json_dict(self):
        lo, hi = self.window_checked
        return {
            "method": self.method,
            "q": self.q,
            "gauge": _matrix_terms(self.gauge),
            "residual_valuation": _json_inf(self.residual_valuation),
            "window_checked": [_json_inf(lo), _json_inf(hi)],
            "threshold": _json_inf(self.threshold),
            "verified": self.verified,
            "resonant": self.resonant,
        }


def _json_inf(v):
    if v is INF:
        return "inf"
    if v == -INF:
        return "-inf"
    return v


def _matrix_terms(mat):
    out = []
    for i in range(mat.n):
        row = []
        for j in range(mat.n):
            entry = mat.entry(i, j).reduced()
            row.append(
                [{"exponent": k, "value": str(c)} for k, c in entry.items()]
            )
        out.append(row)
    return out


def base_change_residual(gauge, gauge_inverse, source, target):
    """dC*C^-1 - C*B*C^-1 + B' for C the gauge, B source, B' target."""
    c_prime = gauge.derivative()
    return c_prime * gauge_inverse - gauge * source * gauge_inverse + target


def _result(gauge, gauge_inverse, source, target, method, q,
            threshold=INF, resonant=False):
    residual = base_change_residual(gauge, gauge_inverse, source, target)
    lo, hi = residual.common_window()
    return BaseChangeResult(
        gauge=gauge.reduced(),
        gauge_inverse=gauge_inverse.reduced(),
        source=source,
        target=target,
        residual=residual,
        residual_valuation=residual.min_valuation(),
        window_checked=(lo, hi),
        method=method,
        q=q,
        threshold=threshold,
        resonant=resonant,
    )


def pullback_connection(B, lift, hi=None, force_general=False):
    """Pullback of the connection matrix B along the lift.

    For the logarithmic form B = A/x (constant A) this is
    qA/x + A * h'/h; in general it is B(phi) * phi'.
    """
    constant = None if force_general else _logarithmic_part(B)
    if constant is not None:
        qa = MatrixSeries.from_scalar_matrix(
            [[v * lift.q for v in row] for row in constant],
            B.prime,
            -1,
        )
        if lift.is_standard():
            return qa
        rel = None if hi is None else hi + 1
        dlog_h = lift.h.dlog(rel)
        if hi is not None:
            dlog_h = dlog_h.truncate(hi=hi)
        a_const = MatrixSeries.from_scalar_matrix(constant, B.prime, 0)
        return qa + a_const.scale_series(dlog_h)
    phi = lift.phi()
    phi_prime = phi.derivative()
    rows = []
    for i in range(B.n):
        row = []
        for j in range(B.n):
            entry = B.entry(i, j)
            if entry.is_exact_zero():
                row.append(entry)
            else:
                row.append(entry.substitute(phi, hi) * phi_prime)
        rows.append(row)
    out = MatrixSeries(B.prime, rows)
    return out if hi is None else out.truncate(hi=hi)


def _logarithmic_part(B):
    """Rows of constant A when B = A/x exactly; None otherwise."""
    rows = []
    for i in range(B.n):
        row = []
        for j in range(B.n):
            entry = B.entry(i, j)
            if entry.is_exact_zero():
                row.append(Fraction(0))
                continue
            if entry.hi is not INF or set(entry.coeffs) != {-1}:
                return None
            c = entry.coeffs[-1]
            if not c.is_exact():
                return None
            row.append(c.value)
        rows.append(row)
    return rows


def _require_adapted(module, block_index):
    """The module matrix must literally be its canonical Jordan matrix."""
    jt = module.jordan_type
    if module.matrix != jt.matrix():
        raise InputError(
            "non-adapted basis: the shift gauge needs the module matrix "
            "in Jordan form (blocks in canonical order)"
        )
    if not 0 <= block_index < len(jt.blocks):
        raise InputError(
            f"block index {block_index} out of range "
            f"(module has {len(jt.blocks)} blocks)"
        )
    offset = sum(size for _, size in jt.blocks[:block_index])
    return offset, jt.blocks[block_index][1]


def shift_isomorphism(module, k, block_index=0, pcap=DEFAULT_PDIGITS):
    """Gauge x^k on one Jordan block: carries (A + k*P)/x onto A/x.

    P is the projector onto the selected block, so the source has the
    block eigenvalue shifted by the integer k; the residual vanishes
    identically (everything stays an exact Laurent polynomial).
    """
    if not isinstance(k, int):
        raise InputError(f"shift must be an integer, got {k!r}")
    offset, size = _require_adapted(module, block_index)
    n, p = module.rank, module.prime
    rows_c = []
    rows_ci = []
    for i in range(n):
        exp = k if offset <= i < offset + size else 0
        rows_c.append(
            [
                LaurentSeries.monomial(p, 1, exp, pcap)
                if i == j
                else LaurentSeries.zero(p, pcap)
                for j in range(n)
            ]
        )
        rows_ci.append(
            [
                LaurentSeries.monomial(p, 1, -exp, pcap)
                if i == j
                else LaurentSeries.zero(p, pcap)
                for j in range(n)
            ]
        )
    gauge = MatrixSeries(p, rows_c)
    gauge_inv = MatrixSeries(p, rows_ci)
    shifted = [
        [
            module.matrix.rows[i][j]
            + (k if i == j and offset <= i < offset + size else 0)
            for j in range(n)
        ]
        for i in range(n)
    ]
    source = MatrixSeries.from_scalar_matrix(shifted, p, -1, pcap)
    target = module.connection(pcap)
    return _result(
        gauge, gauge_inv, source, target, "shift", None,
        threshold=INF, resonant=module.is_resonant(),
    )


def rescaling_isomorphism(module, q, pcap=DEFAULT_PDIGITS):
    """Gauge carrying qA/x onto A/x (the modules are isomorphic).

    Per Jordan block with eigenvalue ev the shift k = (q-1)*ev is an
    integer because q = 1 (mod N); the block gauge is x^k times the
    constant rescaling diag(1, q, q^2, ...) that restores the nilpotent
    part, conjugated back by the Jordan transform.  Exact arithmetic
    throughout: the residual vanishes identically.
    """
    p, n = module.prime, module.rank
    if (q - 1) % module.denominator_lcm != 0:
        raise InputError(
            f"shift not integral: q = {q} is not 1 mod "
            f"{module.denominator_lcm} (the eigenvalue denominator lcm)"
        )
    jt, t = module.jordan_type, module.transform
    t_inv = t.inverse()
    diag = []
    diag_inv = []
    for ev, size in jt.blocks:
        k = (q - 1) * ev
        assert k.denominator == 1
        k = int(k)
        for i in range(size):
            diag.append((k, Fraction(q) ** i))
            diag_inv.append((-k, Fraction(1, q**i)))
    gauge = _conjugated_monomial_diag(t, t_inv, diag, p, pcap)
    gauge_inv = _conjugated_monomial_diag(t, t_inv, diag_inv, p, pcap)
    source = MatrixSeries.from_scalar_matrix(
        [[v * q for v in row] for row in module.matrix.rows], p, -1, pcap
    )
    target = module.connection(pcap)
    return _result(
        gauge, gauge_inv, source, target, "rescale", q,
        threshold=INF, resonant=module.is_resonant(),
    )


def _conjugated_monomial_diag(t, t_inv, diag, p, pcap):
    """T * diag(c_i x^{k_i}) * T^-1 as an exact matrix series."""
    n = t.n
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            terms = {}
            for m, (k, c) in enumerate(diag):
                v = t.rows[i][m] * c * t_inv.rows[m][j]
                if v == 0:
                    continue
                terms[k] = terms.get(k, Fraction(0)) + v
            row.append(
                LaurentSeries.from_terms(
                    p, [(k, v) for k, v in terms.items() if v != 0],
                    INF, pcap,
                )
            )
        rows.append(row)
    return MatrixSeries(p, rows)


def exponential_gauge(module, lift, hi=None, pcap=DEFAULT_PDIGITS):
    """C = exp(A log h): carries the pullback of A/x along the lift onto qA/x.

    C commutes with A, which reduces the base-change equation to
    dC*C^-1 = A h'/h; convergence needs p >= 3, p-integral A and
    h = 1 mod p.  For the standard lift (h = 1) the gauge is the exact
    identity.
    """
    p = module.prime
    if p != lift.prime:
        raise InputError("module and lift disagree on the prime")
    if p == 2:
        raise ConvergenceError(
            "the exponential construction diverges for p = 2; use the "
            "change-of-lifting method instead"
        )
    if hi is None:
        hi = 2 * lift.q * module.rank
    if lift.is_standard():
        gauge = gauge_inv = MatrixSeries.identity(module.rank, p, pcap)
        threshold = INF
    else:
        L = log_one_plus(lift.h_minus_1, hi, pcap)
        gauge = matrix_exp(module.matrix.rows, L, hi, pcap)
        gauge_inv = matrix_exp((-module.matrix).rows, L, hi, pcap)
        threshold = pcap - _exp_reserve(L, hi, pcap, p)
    source = pullback_connection(module.connection(pcap), lift, hi)
    target = MatrixSeries.from_scalar_matrix(
        [[v * lift.q for v in row] for row in module.matrix.rows],
        p, -1, pcap,
    )
    return _result(
        gauge, gauge_inv, source, target, "exp", lift.q,
        threshold=threshold, resonant=module.is_resonant(),
    )


def _exp_reserve(L, hi, pcap, p):
    """Factorial p-digits actually spent by the exponential series."""
    if L.is_exact_zero() or L.x_order() is None:
        return 0
    v = int(L.min_valuation())
    K, _ = _series_stop_index(v, L.x_order(), _hi_or(L.hi, hi), pcap, p, True)
    return _vp_factorial(K, p) + _log_p_floor(max(K, 1), p)


def _hi_or(a, b):
    return a if a is not INF else b


def change_of_lifting(module, lift1, lift2, hi=None, pcap=DEFAULT_PDIGITS):
    """Taylor comparison gauge from the lift1-pullback to the lift2-pullback.

    The fundamental matrix U of the connection satisfies U^(k) = Q_k U
    with Q_0 = I and Q_{k+1} = Q_k' - Q_k * (A/x); Taylor expansion of
    U(phi2) around phi1 gives the gauge

        sum_k ((phi2 - phi1)^k / k!) Q_k(phi1)
      = sum_k (u^k / k!) P_k,   u = (phi2 - phi1)/phi1,

    with the constant matrices P_0 = I, P_{k+1} = -P_k (A + k I).
    The sum converges when u has positive x-order (finitely many terms
    per coefficient) or when v_p(u) outpaces the factorial loss
    (v_p >= 1 for p >= 3, v_p >= 2 for p = 2).
    """
    p = module.prime
    if lift1.prime != p or lift2.prime != p:
        raise InputError("lifts and module disagree on the prime")
    if lift1.q != lift2.q:
        raise InputError("change of lifting needs both lifts to share q")
    if hi is None:
        hi = 2 * lift1.q * module.rank
    delta = lift1.h - lift2.h
    if delta.min_valuation() < 1:
        raise ConvergenceError(
            "phi1 - phi2 must have coefficient valuations >= 1"
        )
    gauge, reserve = _taylor_comparison(module, lift1, -delta, hi, pcap)
    gauge_inv, reserve_inv = _taylor_comparison(
        module, lift2, delta, hi, pcap
    )
    threshold = (
        INF if delta.is_exact_zero() else pcap - max(reserve, reserve_inv)
    )
    source = pullback_connection(module.connection(pcap), lift1, hi)
    target = pullback_connection(module.connection(pcap), lift2, hi)
    return _result(
        gauge, gauge_inv, source, target, "lifting", lift1.q,
        threshold=threshold, resonant=module.is_resonant(),
    )


def _taylor_comparison(module, base_lift, numer, hi, pcap):
    """sum_k u^k/k! P_k with u = numer/h_base; returns (series, reserve)."""
    p, n = module.prime, module.rank
    if numer.is_exact_zero():
        return MatrixSeries.identity(n, p, pcap), 0
    w = (numer * base_lift.h.inverse(hi + 1)).truncate(hi=hi)
    mu_w = w.x_order()
    if mu_w is None:
        return MatrixSeries.identity(n, p, pcap), 0
    v_w = int(w.min_valuation())
    if mu_w < 1:
        needed = 2 if p == 2 else 1
        if v_w < needed:
            raise ConvergenceError(
                f"comparison series diverges: the lift difference has "
                f"x-order {mu_w} and valuation {v_w}, but p = {p} needs "
                f"valuation >= {needed} (or positive x-order)"
            )
    K, cutoff = _series_stop_index(v_w, mu_w, hi, pcap, p, True)
    out = MatrixSeries.identity(n, p, pcap)
    p_k = MatrixQ.identity(n)
    w_pow = LaurentSeries.one(p, pcap)
    kfact = 1
    margin = _vp_factorial(max(K, 1), p) + 1
    for k in range(1, K + 1):
        p_k = -(p_k * (module.matrix + (k - 1) * MatrixQ.identity(n)))
        if p_k.is_zero():
            break
        w_pow = (w_pow * w).reduced(cutoff + margin)
        kfact *= k
        term = MatrixSeries.from_scalar_matrix(
            [[v / kfact for v in row] for row in p_k.rows], p, 0, pcap
        )
        out = out + term.scale_series(w_pow)
    out = out.truncate(hi=hi).reduced(cutoff)
    return out, _vp_factorial(K, p)


def compose_results(second, first, pcap=DEFAULT_PDIGITS):
    """Composite gauge (second after first), residual recomputed directly."""
    if second.gauge.prime != first.gauge.prime:
        raise InputError("cannot compose gauges over different primes")
    gauge = second.gauge * first.gauge
    gauge_inv = first.gauge_inverse * second.gauge_inverse
    threshold = min(first.threshold, second.threshold)
    residual = base_change_residual(
        gauge, gauge_inv, first.source, second.target
    )
    lo, hi = residual.common_window()
    return BaseChangeResult(
        gauge=gauge.reduced(),
        gauge_inverse=gauge_inv.reduced(),
        source=first.source,
        target=second.target,
        residual=residual,
        residual_valuation=residual.min_valuation(),
        window_checked=(lo, hi),
        method=f"{second.method}*{first.method}",
        q=second.q or first.q,
        threshold=threshold,
        resonant=first.resonant or second.resonant,
    )


def local_frobenius_structure(module, lift, method="exp", hi=None,
                              pcap=DEFAULT_PDIGITS):
    """Composite gauge carrying the lift-pullback of A/x onto A/x itself.

    Chains the chosen pullback-to-qA/x construction with the rescaling
    gauge qA/x -> A/x; requires q = 1 mod the eigenvalue denominator
    lcm of the module.
    """
    if method not in ("exp", "lifting"):
        raise InputError(f"unknown method {method!r} (use exp or lifting)")
    if hi is None:
        hi = 2 * lift.q * module.rank
    if method == "exp":
        step1 = exponential_gauge(module, lift, hi, pcap)
    else:
        step1 = change_of_lifting(
            module, lift, FrobLift.standard(module.prime, lift.q, pcap),
            hi, pcap,
        )
    step2 = rescaling_isomorphism(module, lift.q, pcap)
    out = compose_results(step2, step1, pcap)
    out.method = method
    return out
