"""Seeded verification suites behind ``iwafitt verify``.

Each suite takes (seed, cases, precision) and returns a report dict whose
cases are ordered by index.  Every random choice flows from one
``random.Random`` seeded by the suite name and the seed, so a report is a
pure function of its arguments.
"""
from __future__ import annotations

import random

from . import linalg as la
from .arith import (PBAR, PlaceData, PreconditionError, Scenario, check_cor41_shape,
                    check_lemma46_projection, check_lemma79, check_ledger_cancel,
                    check_ledger_order, check_prop88, GUARDS)
from .complexes import PerfectComplex, det, phi, two_term
from .fitting import fitt, sf, shift_fitt
from .fpmod import FPModule
from .ideals import FracIdeal, compare, equals
from .linalg import RMatrix
from .ring import TRUNCATED, PrecisionExhausted, RingElem, RingSpec, cyclic_projection

SUITES = ("thm104", "thm81", "prop22", "lemma79", "prop88", "cor41", "lemma46", "ledger")

# default case counts; None means the suite has a fixed list of cases
DEFAULT_CASES = {"thm104": 100, "thm81": 50, "prop22": None, "lemma79": None,
                 "prop88": None, "cor41": 25, "lemma46": 20, "ledger": 20}

DEFAULT_PRECISION = {"prop22": (4, 6), "lemma79": (3, 5), "prop88": (4, 6), "ledger": (4, 6)}

PD1_RINGS = [RingSpec(p, g) for p in (3, 5) for g in ((2,), (3,), (4,), (2, 2), (6,))]
RESOLUTION_RINGS = [RingSpec(3, ()), RingSpec(3, (2,)), RingSpec(3, (3,)), RingSpec(5, (2,))]
TRIPLE_RINGS = [RingSpec(3, ()), RingSpec(5, ()), RingSpec(3, (2,)), RingSpec(3, (3,)),
                RingSpec(5, (2,))]
PROJECTION_RINGS = [(RingSpec(3, (4,)), [(2,), (1,)]), (RingSpec(3, (2, 2)), [(2, 1), (1, 2), (1, 1)])]


def _rng(name: str, seed: int) -> random.Random:
    return random.Random(f"{name}:{seed}")


def _summary(name: str, cases: list, **extra) -> dict:
    passed = sum(1 for c in cases if c["verdict"])
    out = {"suite": name, "passed": passed, "total": len(cases),
           "verdict": passed == len(cases), "cases": cases}
    out.update(extra)
    return out


# -- random objects --------------------------------------------------------

def random_element(spec: RingSpec, rng: random.Random, lo: int = -2, hi: int = 2) -> RingElem:
    zero_mon = (0,) * spec.vars
    return spec.elem({(g, zero_mon): rng.randint(lo, hi) for g in spec.group_elements})


def random_unit(spec: RingSpec, rng: random.Random) -> RingElem:
    while True:
        u = random_element(spec, rng)
        if not u.is_zero() and u.is_unit():
            return u


def _diag_entry(spec: RingSpec, rng: random.Random) -> RingElem:
    if rng.random() < 0.5:
        return random_unit(spec, rng).scale(spec.prime ** rng.randint(0, 2))
    return random_element(spec, rng)


def _order_exponent(h: RMatrix):
    """log_p of |coker h| for square h (None if infinite)."""
    E = la.expand(h)
    _, diag, _, r = la.smith_base(E, h.spec.base)
    if r < len(E):
        return None
    return sum(h.spec.base.val(d) for d in diag)


def random_square(spec: RingSpec, rng: random.Random, n: int, max_exp: int = 3) -> RMatrix:
    """Upper triangular h with finite cokernel of order p^e, 1 <= e <= max_exp."""
    z = spec.zero()
    while True:
        rows = [[_diag_entry(spec, rng) if i == j else (random_element(spec, rng) if j > i else z)
                 for j in range(n)] for i in range(n)]
        h = RMatrix(spec, rows, n)
        e = _order_exponent(h)
        if e is not None and 1 <= e <= max_exp:
            return h


def random_pd1_module(spec: RingSpec, rng: random.Random) -> FPModule:
    """coker [h | h c]: a torsion module with a pd <= 1 witness hidden behind redundant columns."""
    n = rng.randint(1, 3)
    h = random_square(spec, rng, n)
    cols = h.columns()
    for _ in range(rng.randint(0, 2)):
        c = [random_element(spec, rng, -1, 1) for _ in range(n)]
        cols.append(h.apply(c))
    order = list(range(len(cols)))
    rng.shuffle(order)
    return FPModule(spec, RMatrix.from_columns(spec, [cols[i] for i in order], n))


def random_torsion_module(spec: RingSpec, rng: random.Random) -> FPModule:
    """coker [h | extra relations]; torsion because h has finite cokernel."""
    n = rng.randint(1, 2)
    h = random_square(spec, rng, n)
    cols = h.columns()
    for _ in range(rng.randint(0, 2)):
        cols.append(tuple(random_element(spec, rng) for _ in range(n)))
    return FPModule(spec, RMatrix.from_columns(spec, cols, n))


def random_torsion_complex(spec: RingSpec, rng: random.Random) -> PerfectComplex:
    """Either [R^n --h--> R^n] or the Koszul complex of (x, y) with x a non-zero-divisor."""
    if rng.random() < 0.5:
        n = rng.randint(1, 2)
        return two_term(random_square(spec, rng, n), lo=rng.choice([-1, 0]))
    x = random_square(spec, rng, 1)[0, 0]
    y = random_element(spec, rng)
    d0 = RMatrix(spec, [[x], [y]], 1)
    d1 = RMatrix(spec, [[-y, x]], 2)
    return PerfectComplex(spec, -2, [1, 2, 1], [d0, d1])


# -- suites ----------------------------------------------------------------

def suite_thm104(seed: int, cases=None, precision=None) -> dict:
    """det(phi(P)) * fitt(P) = R for random torsion modules with pd <= 1 witnesses."""
    rng = _rng("thm104", seed)
    n = DEFAULT_CASES["thm104"] if cases is None else cases
    out = []
    for i in range(n):
        spec = PD1_RINGS[i % len(PD1_RINGS)]
        M = random_pd1_module(spec, rng)
        F = phi(M, seed=seed)
        D = det(F, seed)
        Fi = fitt(M)
        ok = equals(D * Fi, FracIdeal.unit(spec))
        out.append({"index": i, "ring": spec.to_json(), "module": M.to_json(),
                    "resolution_length": F.hi - F.lo, "det_phi": D.to_json(),
                    "fitt": Fi.to_json(), "verdict": ok})
    return _summary("thm104", out)


def suite_thm81(seed: int, cases=None, precision=None) -> dict:
    """Two structurally different resolutions give the same Fitt^(n), n = 1, 2."""
    rng = _rng("thm81", seed)
    per_ring = DEFAULT_CASES["thm81"] if cases is None else cases
    out = []
    i = 0
    for spec in RESOLUTION_RINGS:
        for _ in range(per_ring):
            M = random_torsion_module(spec, rng)
            checks = {}
            for n in (1, 2):
                a = shift_fitt(M, n, variant=0)
                b = shift_fitt(M, n, variant=1)
                checks[str(n)] = {"first": a.to_json(), "second": b.to_json(),
                                  "equal": equals(a, b)}
            out.append({"index": i, "ring": spec.to_json(), "module": M.to_json(),
                        "shift_fitt": checks,
                        "verdict": all(c["equal"] for c in checks.values())})
            i += 1
    return _summary("thm81", out, cases_per_ring=per_ring)


def _prop22_pairs(spec: RingSpec) -> list:
    T1, T2 = spec.T(0), spec.T(1)
    return [
        (T1, T2), (T1 + 3, T2), (T1, T2 + 3), (T1 + 3, T2 + T1 * 3),
        (T1 + T2 * 3, T2 + 3), (T1 * T1 + 3, T2), (T1, T2 * T2 + 3),
        (T1 + T2 * T2, T2 + 3), (T1 + 3, T2 * T2 + T1 * 3), (T1 * T1 + T2 * 3, T2 + T1 * 3),
    ]


def _with_guard(spec: RingSpec, compute):
    """Run compute(spec at a guarded precision), widening the guard on exhaustion."""
    N, M = spec.precision
    for g in GUARDS:
        try:
            return compute(spec.with_precision(N + g, M + g))
        except PrecisionExhausted:
            if g == GUARDS[-1]:
                raise


def suite_prop22(seed: int, cases=None, precision=None) -> dict:
    """sf(R/(f, g), 0) = R for coprime pairs in two variables (pseudo-null quotients)."""
    N, M = precision or DEFAULT_PRECISION["prop22"]
    rings = [RingSpec(3, (), 2, TRUNCATED, (N, M)), RingSpec(3, (2,), 2, TRUNCATED, (N, M))]
    npairs = len(_prop22_pairs(rings[0]))
    out = []
    for i in range(npairs if cases is None else min(cases, npairs)):
        per_ring = []
        for spec in rings:
            def compute(w, i=i):
                f, g = _prop22_pairs(w)[i]
                Q = FPModule.cyclic(w, [f, g])
                I = sf(Q, 0, seed=seed)
                ok, K = compare(I, FracIdeal.unit(w, I.K))
                return {"ring": spec.to_json(), "working_precision": list(w.precision),
                        "f": f.to_json(), "g": g.to_json(), "sf": I.to_json(), "equal": ok,
                        "effective_precision": la.report_precision(w, K)}
            try:
                per_ring.append(_with_guard(spec, compute))
            except PrecisionExhausted as e:
                per_ring.append({"ring": spec.to_json(), "equal": False, "error": str(e)})
        out.append({"index": i, "rings": per_ring,
                    "verdict": all(r["equal"] for r in per_ring)})
    return _summary("prop22", out, requested_precision=[N, M])


def lemma79_scenarios(N: int = 3, M: int = 5) -> list:
    """(name, part, Scenario): three decomposition groups for the finite-index place, then part 2."""
    spec = RingSpec(3, (), 2, TRUNCATED, (N, M))
    g1, g2 = spec.gamma(0), spec.gamma(1)
    p = PlaceData("p", ())
    out = []
    for name, dec in (("full", (g1, g2)), ("index p", (g1 ** 3, g2)),
                      ("index p^2", (g1 ** 3, g2 ** 3))):
        out.append((name, 1, Scenario(spec, [p, PlaceData(PBAR, dec)])))
    v = PlaceData("v", (g1,))
    out.append(("part 2, extra place", 2,
                Scenario(spec, [p, PlaceData(PBAR, (g1 ** 3, g2)), v], S=["p"])))
    return out


def suite_lemma79(seed: int, cases=None, precision=None) -> dict:
    """Fitt^(1) of the augmentation kernel against Fitt^(2) of the residue module, and part 2."""
    N, M = precision or DEFAULT_PRECISION["lemma79"]
    out = []
    for i, (name, part, sc) in enumerate(lemma79_scenarios(N, M)):
        try:
            rep = check_lemma79(part, sc)
        except PrecisionExhausted as e:
            rep = {"check": f"lemma79.{part}", "verdict": False, "error": str(e)}
        rep.update(index=i, scenario=name, input=sc.to_json())
        out.append(rep)
    # S = Sigma_0 is not a valid input to part 2
    sc = lemma79_scenarios(N, M)[-1][2]
    bad = Scenario(sc.spec, sc.places, S=["p", "v"])
    try:
        check_lemma79(2, bad)
        rejected = False
    except PreconditionError:
        rejected = True
    out.append({"index": len(out), "check": "lemma79.2", "scenario": "S = Sigma_0 rejected",
                "input": bad.to_json(), "verdict": rejected})
    return _summary("lemma79", out, requested_precision=[N, M])


def suite_prop88(seed: int, cases=None, precision=None) -> dict:
    """det of [R --(1 - sigma)--> R] in degrees (1, 2) against (1 - sigma^-1)^-1."""
    N, M = precision or DEFAULT_PRECISION["prop88"]
    spec = RingSpec(3, (), 1, TRUNCATED, (N, M))
    s = spec.gamma()
    out = []
    for i, sigma in enumerate([s, s * s, s.scale(4)]):
        rep = check_prop88(sigma)
        rep["index"] = i
        out.append(rep)
    return _summary("prop88", out, requested_precision=[N, M])


def _draw_place(rng: random.Random, label: str) -> tuple:
    return label, rng.randint(1, 3), rng.choice([1, 1, 4, 7, -2]), rng.choice([2, 5, 7, 11, 13])


def _make_place(spec: RingSpec, data) -> PlaceData:
    label, e, c, Nv = data
    return PlaceData(label, (), (spec.gamma() ** e).scale(c), Nv)


def _draw_nzd(rng: random.Random) -> tuple:
    return rng.choice([1, 2, 3, 4, 6]), rng.randint(-2, 2), rng.randint(-1, 1)


def _make_poly(spec: RingSpec, coeffs) -> RingElem:
    T = spec.T()
    return spec.scalar(coeffs[0]) + T * coeffs[1] + T * T * coeffs[2]


def suite_ledger(seed: int, cases=None, precision=None) -> dict:
    """eq101 followed by division through the degree-(1, 2) determinant; eq100 order independence."""
    N, M = precision or DEFAULT_PRECISION["ledger"]
    spec = RingSpec(3, (), 1, TRUNCATED, (N, M))
    rng = _rng("ledger", seed)
    n = DEFAULT_CASES["ledger"] if cases is None else cases
    out = []
    for i in range(n):
        num, den = _draw_nzd(rng), _draw_nzd(rng)
        places = [_draw_place(rng, "v"), _draw_place(rng, "w")]

        def compute(w, num=num, den=den, places=places):
            base = FracIdeal(w, [_make_poly(w, num)], _make_poly(w, den))
            v, u = (_make_place(w, d) for d in places)
            a = check_ledger_cancel(base, v)
            b = check_ledger_order(base, [v, u])
            return {"working_precision": list(w.precision), "base": base.to_json(),
                    "places": [v.to_json(), u.to_json()], "cancel": a, "order": b,
                    "verdict": a["verdict"] and b["verdict"]}
        try:
            rep = _with_guard(spec, compute)
        except (PrecisionExhausted, ValueError) as e:
            rep = {"verdict": False, "error": str(e)}
        rep["index"] = i
        out.append(rep)
    return _summary("ledger", out, requested_precision=[N, M])


def random_triple(spec: RingSpec, rng: random.Random):
    """(H2, Z0, q) with H2 = coker [[h1, C], [0, h2]], Z0 = coker h2, q the projection."""
    while True:
        n1, n2 = rng.randint(0, 2), rng.randint(0, 2)
        if 1 <= n1 + n2 <= 3:
            break
    z = spec.zero()
    h1 = random_square(spec, rng, n1, 2) if n1 else None
    h2 = random_square(spec, rng, n2, 2) if n2 else None
    n = n1 + n2
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if i < n1 and j < n1:
                row.append(h1[i, j])
            elif i >= n1 and j >= n1:
                row.append(h2[i - n1, j - n1])
            elif i < n1:
                row.append(random_element(spec, rng))
            else:
                row.append(z)
        rows.append(row)
    H2 = FPModule(spec, RMatrix(spec, rows, n))
    Z0 = FPModule(spec, h2) if n2 else FPModule.zero(spec)
    one = spec.one()
    q = RMatrix(spec, [[one if j == n1 + i else z for j in range(n)] for i in range(n2)], n)
    return H2, Z0, q


def suite_cor41(seed: int, cases=None, precision=None) -> dict:
    """Fitt(X) = Det(C)^-1 Fitt^(1)(Z0) for random exact triples 0 -> X -> H2 -> Z0 -> 0."""
    rng = _rng("cor41", seed)
    n = DEFAULT_CASES["cor41"] if cases is None else cases
    out = []
    for i in range(n):
        spec = TRIPLE_RINGS[i % len(TRIPLE_RINGS)]
        H2, Z0, q = random_triple(spec, rng)
        rep = check_cor41_shape(H2, Z0, q, seed)
        rep.update(index=i, ring=spec.to_json(), H2=H2.to_json(), Z0=Z0.to_json(), q=q.to_json())
        out.append(rep)
    return _summary("cor41", out)


def suite_lemma46(seed: int, cases=None, precision=None) -> dict:
    """Projection of Det agrees with Det of the projected complex."""
    rng = _rng("lemma46", seed)
    n = DEFAULT_CASES["lemma46"] if cases is None else cases
    out = []
    for i in range(n):
        spec, targets = PROJECTION_RINGS[i % len(PROJECTION_RINGS)]
        F = random_torsion_complex(spec, rng)
        orders = rng.choice(targets)
        rep = check_lemma46_projection(F, cyclic_projection(spec, orders), seed)
        rep.update(index=i, ring=spec.to_json(), target_group=list(orders), complex=F.to_json())
        out.append(rep)
    return _summary("lemma46", out)


RUNNERS = {"thm104": suite_thm104, "thm81": suite_thm81, "prop22": suite_prop22,
           "lemma79": suite_lemma79, "prop88": suite_prop88, "cor41": suite_cor41,
           "lemma46": suite_lemma46, "ledger": suite_ledger}


def run_suite(name: str, seed: int = 0, cases=None, precision=None) -> dict:
    if name == "all":
        reports = [run_suite(s, seed, cases, precision) for s in SUITES]
        return {"suite": "all", "verdict": all(r["verdict"] for r in reports),
                "passed": sum(r["passed"] for r in reports),
                "total": sum(r["total"] for r in reports), "suites": reports}
    if name not in RUNNERS:
        raise KeyError(f"unknown suite {name!r}")
    return RUNNERS[name](seed, cases, precision)
