"""Built-in invariant suites, one per module, at reduced sizes.

Run by ``padicrigid selftest``.  Every suite uses a fixed seed, so the
run is deterministic; a failure serializes its first counterexample and
the command exits 1.
"""

from __future__ import annotations

import json
import math
import random
import time
from fractions import Fraction

from .conditions import check_c1, check_c3, full_condition_report
from .frobenius import (
    FrobLift,
    LocalModule,
    change_of_lifting,
    compose_results,
    exponential_gauge,
    local_frobenius_structure,
    rescaling_isomorphism,
    shift_isomorphism,
)
from .fuchsian import (
    FuchsianSystem,
    LocalData,
    SingularPoint,
    chi_p,
    euler_char_c,
    local_h0,
    rigidity_index,
)
from .linalg import JordanType, MatrixQ, centralizer_dim, jordan_form, nullspace
from .padics import INF, PadicNumber, denominator_lcm, padic_valuation
from .series import LaurentSeries, log_one_plus, matrix_exp


def _rand_fraction(rng, max_den=6, span=6):
    den = rng.choice([1, 1, 2, 3, 4, 6][: max_den])
    return Fraction(rng.randint(-span, span), den)


def _rand_series(rng, prime, nterms=4, lo=-2, hi=8, min_val=0):
    terms = []
    for _ in range(nterms):
        k = rng.randint(lo, hi - 1)
        c = rng.randint(1, 6) * prime**min_val
        terms.append((k, Fraction(c)))
    return LaurentSeries.from_terms(prime, terms, hi=hi)


def _fail(name, counterexample):
    return {"check": name, "counterexample": counterexample}


def suite_arith(rng):
    for _ in range(120):
        p = rng.choice([2, 3, 5, 7, 13])
        r = _rand_fraction(rng, span=40)
        s = _rand_fraction(rng, span=40)
        if r and s:
            if padic_valuation(r * s, p) != padic_valuation(r, p) + padic_valuation(s, p):
                return _fail("valuation-multiplicative", {"r": str(r), "s": str(s), "p": p})
        vr, vs = padic_valuation(r, p), padic_valuation(s, p)
        vsum = padic_valuation(r + s, p)
        if vsum < min(vr, vs):
            return _fail("valuation-ultrametric", {"r": str(r), "s": str(s), "p": p})
        if vr != vs and vsum != min(vr, vs):
            return _fail("valuation-equality-case", {"r": str(r), "s": str(s), "p": p})
    for _ in range(40):
        exps = [_rand_fraction(rng) for _ in range(rng.randint(1, 5))]
        shuffled = exps[:] + [rng.choice(exps)]
        rng.shuffle(shuffled)
        if denominator_lcm(exps) != denominator_lcm(shuffled):
            return _fail("lcm-permutation", {"exps": [str(e) for e in exps]})
    from .padics import multiplicative_order

    for N in range(1, 80):
        for p in (2, 3, 5, 7, 11):
            if math.gcd(p, N) != 1:
                continue
            f = multiplicative_order(p, N)
            x, k = p % N if N > 1 else 0, 1
            while N > 1 and x != 1:
                x = x * p % N
                k += 1
            if N > 1 and k != f:
                return _fail("order-bruteforce", {"p": p, "N": N, "f": f, "k": k})
    for _ in range(60):
        p = rng.choice([3, 5, 7])
        r = _rand_fraction(rng, span=30)
        if r == 0:
            continue
        m = rng.randint(2, 10)
        a = PadicNumber.from_rational(r, p, m)
        if padic_valuation(a.value - r, p) < a.abs_prec:
            return _fail("padic-roundtrip", {"r": str(r), "p": p, "m": m})
        b = PadicNumber.exact(r, p) * PadicNumber.exact(2, p)
        if b.value != 2 * r:
            return _fail("padic-mul-exactness", {"r": str(r), "p": p, "got": str(b.value)})
    return None


def suite_series(rng):
    for _ in range(25):
        p = rng.choice([3, 5, 7])
        f = _rand_series(rng, p)
        g = _rand_series(rng, p)
        lhs = (f * g).derivative()
        rhs = f.derivative() * g + f * g.derivative()
        lo, hi = max(lhs.lo, rhs.lo), min(lhs.hi, rhs.hi)
        if not lhs.agrees_with(rhs, int(lo), int(hi)):
            return _fail("leibniz", {"f": str(f), "g": str(g)})
    for _ in range(12):
        p = rng.choice([3, 5, 7])
        t = _rand_series(rng, p, nterms=3, lo=0, hi=8, min_val=1)
        h = LaurentSeries.one(p) + t
        L = log_one_plus(t, hi=8)
        back = matrix_exp([[Fraction(1)]], L, hi=8).entry(0, 0)
        if not back.agrees_with(h, 0, 8, abs_level=6):
            return _fail("exp-log-roundtrip", {"h": str(h)})
        t2 = _rand_series(rng, p, nterms=2, lo=1, hi=8, min_val=1)
        h2 = LaurentSeries.one(p) + t2
        prod = h * h2 - LaurentSeries.one(p)
        lhs = log_one_plus(prod, hi=8)
        rhs = log_one_plus(t, hi=8) + log_one_plus(t2, hi=8)
        if not lhs.agrees_with(rhs, 0, 8, abs_level=6):
            return _fail("log-homomorphism", {"h1": str(h), "h2": str(h2)})
    for _ in range(12):
        p = rng.choice([3, 5, 7])
        f = _rand_series(rng, p, nterms=3, lo=-2, hi=6)
        phi = LaurentSeries.from_terms(p, [(1, 1), (2, rng.randint(1, 4) * p)])
        psi = LaurentSeries.from_terms(p, [(1, 1), (3, rng.randint(1, 4) * p)])
        lhs = f.substitute(phi, 12).substitute(psi, 12)
        rhs = f.substitute(phi.substitute(psi, 12), 12)
        lo, hi = max(lhs.lo, rhs.lo), min(min(lhs.hi, rhs.hi), 10)
        if not lhs.agrees_with(rhs, int(lo), int(hi)):
            return _fail("substitution-functorial", {"f": str(f)})
    for _ in range(15):
        p = rng.choice([3, 5, 7])
        a = _rand_series(rng, p, nterms=3, lo=-2, hi=6)
        b = _rand_series(rng, p, nterms=3, lo=-2, hi=6)
        small = (a.truncate(hi=4) * b.truncate(hi=4))
        big = a * b
        lo, hi = max(small.lo, big.lo), min(small.hi, big.hi)
        if not big.agrees_with(small, int(lo), int(hi)):
            return _fail("window-soundness", {"a": str(a), "b": str(b)})
    return None


def _rand_jordan(rng, n):
    blocks = []
    left = n
    while left:
        size = rng.randint(1, left)
        blocks.append((_rand_fraction(rng, span=3), size))
        left -= size
    return JordanType(blocks)


def _commutant_nullity(matrix):
    n = matrix.n
    rows = []
    for i in range(n):
        for j in range(n):
            row = [Fraction(0)] * (n * n)
            for k in range(n):
                row[k * n + j] += matrix.rows[i][k]
                row[i * n + k] -= matrix.rows[k][j]
            rows.append(row)
    return len(nullspace(rows, n * n))


def suite_linalg(rng):
    for _ in range(20):
        n = rng.randint(1, 4)
        jt = _rand_jordan(rng, n)
        t = _rand_unimodular(rng, n)
        a = t * jt.matrix() * t.inverse()
        jt2, trans = jordan_form(a)
        if jt2 != jt:
            return _fail("jordan-type", {"matrix": str(a), "want": str(jt), "got": str(jt2)})
        if trans * jt2.matrix() * trans.inverse() != a:
            return _fail("jordan-roundtrip", {"matrix": str(a)})
        want = _commutant_nullity(jt.matrix())
        got = centralizer_dim(jt, "exact")
        if want != got:
            return _fail("centralizer-oracle", {"jordan": str(jt), "want": want, "got": got})
        if not n <= got <= n * n:
            return _fail("centralizer-bounds", {"jordan": str(jt)})
    return None


def _rand_unimodular(rng, n):
    t = MatrixQ.identity(n)
    for _ in range(2 * n):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j:
            continue
        shear = [
            [
                Fraction(1 if a == b else 0)
                + (Fraction(rng.randint(-2, 2)) if (a, b) == (i, j) else 0)
                for b in range(n)
            ]
            for a in range(n)
        ]
        t = t * MatrixQ(shear)
    return t


def _rand_system(rng, max_rank=3, max_points=4):
    n = rng.randint(1, max_rank)
    npts = rng.randint(1, max_points)
    locations = rng.sample([0, 1, 2, 3, -1, 7], k=npts - 1)
    points = [SingularPoint.finite(l) for l in locations]
    points.append(SingularPoint.infinity())
    locals_ = [LocalData(pt, _rand_jordan(rng, n)) for pt in points]
    return FuchsianSystem(
        rank=n, locals=tuple(locals_), irreducible=True,
        overconvergent_asserted=True,
    )


def suite_fuchsian(rng):
    for _ in range(30):
        sys_ = _rand_system(rng)
        for coeff in ("self", "end"):
            lhs = chi_p(sys_, coeff) - euler_char_c(sys_, coeff)
            rhs = sum(local_h0(ld, coeff) for ld in sys_.locals)
            if lhs != rhs:
                return _fail("chi-assembly", {"system": str(sys_), "coeff": coeff})
        index = rigidity_index(sys_)
        n, s = sys_.rank, len(sys_.locals)
        if not n * n * (2 - s) + s * n <= index <= n * n * (2 - s) + s * n * n:
            return _fail("index-bounds", {"system": str(sys_)})
        # twisting every exponent at a point by one constant per point
        twisted = FuchsianSystem(
            rank=sys_.rank,
            locals=tuple(
                LocalData(
                    ld.point,
                    JordanType(
                        [(ev + c, sz) for ev, sz in ld.jordan.blocks]
                    ),
                )
                for ld, c in zip(
                    sys_.locals,
                    [_rand_fraction(rng) for _ in sys_.locals],
                )
            ),
            irreducible=True,
            overconvergent_asserted=True,
        )
        if rigidity_index(twisted) != index:
            return _fail("twist-invariance", {"index": index})
        if sys_.rank == 1 and index != 2:
            return _fail("rank1-rigidity", {"index": index})
    return None


def suite_conditions(rng):
    for _ in range(25):
        p = rng.choice([3, 5, 7])
        sys_ = _rand_system(rng)
        c1 = check_c1(sys_.points(), p)
        u = rng.choice([1, 2, 3, 4, 6])
        while u % p == 0:
            u += 1
        v = Fraction(rng.randint(0, p - 1))
        moved = [
            pt if pt.is_infinity else SingularPoint.finite(u * pt.location + v)
            for pt in sys_.points()
        ]
        if check_c1(moved, p).passed != c1.passed:
            return _fail("c1-coordinate-invariance", {"p": p})
        report = full_condition_report(sys_, p)
        if report.q is not None and report.q % report.N != 1 % report.N:
            return _fail("q-congruence", {"q": report.q, "N": report.N})
        c3 = check_c3(sys_, p)
        twisted = FuchsianSystem(
            rank=sys_.rank,
            locals=tuple(
                LocalData(
                    ld.point,
                    JordanType([(ev + c, sz) for ev, sz in ld.jordan.blocks]),
                )
                for ld, c in zip(
                    sys_.locals, [Fraction(rng.randint(-3, 3)) for _ in sys_.locals]
                )
            ),
            irreducible=True,
            overconvergent_asserted=True,
        )
        if check_c3(twisted, p).passed != c3.passed:
            return _fail("c3-twist-invariance", {"p": p})
    return None


def suite_frobenius(rng):
    for _ in range(6):
        p = rng.choice([5, 7])
        den = rng.choice([1, 2, 3])
        ev = Fraction(rng.randint(-3, 3), den)
        module = LocalModule(p, [[ev]])
        from .padics import multiplicative_order

        q = p ** multiplicative_order(p, den)
        res = rescaling_isomorphism(module, q)
        if res.residual_valuation is not INF:
            return _fail("rescale-exact", {"p": p, "ev": str(ev), "q": q})
        shift = shift_isomorphism(module, rng.randint(-3, 3))
        if shift.residual_valuation is not INF:
            return _fail("shift-exact", {"p": p, "ev": str(ev)})
        h = LaurentSeries.from_terms(p, [(0, 1), (1, p * rng.randint(1, 3))])
        lift = FrobLift(p, q, h)
        expg = exponential_gauge(module, lift, hi=12)
        if not expg.verified:
            return _fail("exp-verified", {"p": p, "ev": str(ev), "q": q})
        liftg = change_of_lifting(module, lift, FrobLift.standard(p, q), hi=12)
        if not liftg.verified:
            return _fail("lifting-verified", {"p": p, "ev": str(ev)})
        if not liftg.gauge.agrees_with(expg.gauge, 0, 8, abs_level=8):
            return _fail("method-agreement", {"p": p, "ev": str(ev)})
        full = local_frobenius_structure(module, lift, "exp", hi=12)
        if not full.verified:
            return _fail("composite-verified", {"p": p, "ev": str(ev)})
        composed = compose_results(rescaling_isomorphism(module, q), expg)
        if not composed.verified:
            return _fail("compose-verified", {"p": p, "ev": str(ev)})
    return None


def suite_report(rng):
    from .cli import load_document
    from .report import analyze_document, render_json

    doc1 = load_document("corpus:rank1_two_point")
    doc2 = load_document("corpus:rank1_two_point")
    r1 = render_json(analyze_document(doc1))
    r2 = render_json(analyze_document(doc2))
    if r1 != r2:
        return _fail("report-determinism", {"first": r1[:200], "second": r2[:200]})
    return None


SUITES = [
    ("arith", suite_arith),
    ("series", suite_series),
    ("linalg", suite_linalg),
    ("fuchsian", suite_fuchsian),
    ("conditions", suite_conditions),
    ("frobenius", suite_frobenius),
    ("report", suite_report),
]


def run_selftest(out, json_mode=False):
    results = []
    failure = None
    for name, fn in SUITES:
        start = time.perf_counter()
        counter = fn(random.Random(20240301))
        elapsed = time.perf_counter() - start
        ok = counter is None
        results.append({"suite": name, "pass": ok, "seconds": round(elapsed, 3)})
        if not ok and failure is None:
            failure = dict(counter, suite=name)
    payload = {
        "suites": results,
        "suite_count": len(results),
        "pass": failure is None,
        "first_counterexample": failure,
    }
    if json_mode:
        out.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    else:
        for row in results:
            status = "pass" if row["pass"] else "FAIL"
            out.write(
                f"{row['suite']:<12} {status:<5} {row['seconds']:7.3f}s\n"
            )
        out.write(f"suites: {len(results)}\n")
        if failure is not None:
            out.write(
                "first counterexample: "
                + json.dumps(failure, sort_keys=True)
                + "\n"
            )
        out.write("selftest: " + ("pass" if failure is None else "FAIL") + "\n")
    return 0 if failure is None else 1
