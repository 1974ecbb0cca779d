"""Fractional ideals (1/den) * span_R(gens) of R."""
from __future__ import annotations

import random
from fractions import Fraction
from math import inf

from . import linalg as la
from .linalg import RMatrix
from .ring import PrecisionExhausted, RingElem, RingHom, RingSpec, loss_order, norm


class NotInvertible(ValueError):
    pass


class GeneratorNotFound(ValueError):
    pass


def nzd_at(a: RingElem, K=None) -> bool:
    """a lifts to a non-zero-divisor (its norm survives modulo m^K)."""
    n = norm(a)
    if K is not None:
        n = la.madic_truncate(n, K)
    return not n.is_zero()


class FracIdeal:
    """(1/den) * span_R(gens), with den a non-zero-divisor.

    ``K`` is the m-adic precision (TRUNCATED mode) to which the generators
    are known.
    """

    def __init__(self, spec: RingSpec, gens, den=None, K=None, check: bool = True):
        self.spec = spec
        if K is None and not spec.exact:
            K = la.base_precision(spec)
        self.K = K
        den = spec.one() if den is None else spec(den)
        if check and not nzd_at(den, K):
            raise ValueError(f"denominator {den} is a zero-divisor")
        self.den = den
        vecs = [(spec(g),) for g in gens]
        self.gens = tuple(v[0] for v in la.minimal_generators(spec, vecs, K=K))

    # -- constructors --------------------------------------------------

    @classmethod
    def unit(cls, spec: RingSpec, K=None):
        return cls(spec, [spec.one()], K=K)

    @classmethod
    def zero(cls, spec: RingSpec, K=None):
        return cls(spec, [], K=K)

    @classmethod
    def principal(cls, a: RingElem, den=None, K=None):
        return cls(a.spec, [a], den, K)

    # -- arithmetic ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.gens

    def __mul__(self, other: "FracIdeal") -> "FracIdeal":
        return multiply(self, other)

    def __pow__(self, n: int) -> "FracIdeal":
        if n < 0:
            return inverse(self) ** (-n)
        out = FracIdeal.unit(self.spec, self.K)
        for _ in range(n):
            out = multiply(out, self)
        return out

    def __eq__(self, other):
        if not isinstance(other, FracIdeal):
            return NotImplemented
        return equals(self, other)

    __hash__ = None

    def scale(self, num: RingElem, den=None) -> "FracIdeal":
        """(num/den) * self."""
        den = self.spec.one() if den is None else den
        return FracIdeal(self.spec, [g * num for g in self.gens], self.den * den, self.K)

    def __repr__(self):
        gens = ", ".join(repr(g) for g in self.gens)
        if self.den == self.spec.one():
            return f"({gens})"
        return f"({gens})/({self.den!r})"

    # -- normal forms --------------------------------------------------

    def normal_form(self):
        """Canonical data identifying the ideal.

        EXACT: (e, rows) with the base lattice of the ideal equal to p^-e times
        the Hermite basis ``rows``.  TRUNCATED: the Howell basis of the
        numerator modulo m^K together with the denominator and K.
        """
        spec = self.spec
        if not spec.exact:
            rows = la.lattice(spec, [(g,) for g in self.gens], 1, self.K)
            return {"den": self.den.to_json(), "madic_precision": self.K,
                    "rows": [[int(x) for x in r] for r in rows]}
        if self.is_zero():
            return (0, ())
        dinv = _q_inverse(self.den)
        elems = [g * dinv for g in self.gens]
        rows = la.rspan_rows(spec, [(e,) for e in elems])
        p = spec.prime
        s = max((_neg_val(x, p) for r in rows for x in r), default=0)
        scaled = [[x * p**s for x in r] for r in rows]
        canon = la.canonical_rows(scaled, spec.base)
        t = min(spec.base.val(x) for r in canon for x in r if x != 0)
        canon = la.canonical_rows([[x / p**t for x in r] for r in canon], spec.base)
        return (s - t, tuple(canon))

    def to_json(self) -> dict:
        nf = self.normal_form()
        if self.spec.exact:
            nf_json = {"p_exponent": -nf[0],
                       "rows": [[_frac_json(x) for x in r] for r in nf[1]]}
        else:
            nf_json = nf
        return {"ring": self.spec.to_json(), "gens": [g.to_json() for g in self.gens],
                "den": self.den.to_json(), "normal_form": nf_json,
                "effective_precision": la.report_precision(self.spec, self.K)}

    @classmethod
    def from_json(cls, d: dict):
        spec = RingSpec.from_json(d["ring"])
        gens = [RingElem.from_json(spec, g) for g in d["gens"]]
        den = RingElem.from_json(spec, d["den"]) if d.get("den") else None
        return cls(spec, gens, den)


def _frac_json(x):
    x = Fraction(x)
    return str(x) if x.denominator != 1 else x.numerator


def _neg_val(x: Fraction, p: int) -> int:
    if x == 0:
        return 0
    d = x.denominator
    k = 0
    while d % p == 0:
        d //= p
        k += 1
    return k


def _q_inverse(a: RingElem) -> RingElem:
    """Inverse of a nzd in the total quotient ring (EXACT mode), as Q-coefficients."""
    spec = a.spec
    A = [[Fraction(x) for x in r] for r in a.regular_matrix()]
    n = len(A)
    b = [Fraction(x) for x in spec.one().vector()]
    M = [A[i] + [b[i]] for i in range(n)]
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("zero-divisor has no inverse")
        M[c], M[piv] = M[piv], M[c]
        inv = 1 / M[c][c]
        M[c] = [x * inv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return la.RingElem(spec, {i: M[i][n] for i in range(n) if M[i][n] != 0})


# -- operations ------------------------------------------------------------

def _K(*ideals):
    Ks = [I.K for I in ideals if I.K is not None]
    return min(Ks) if Ks else None


def _check_same(I: FracIdeal, J: FracIdeal):
    if I.spec != J.spec:
        raise la.MixedRingError("ideals over different rings")


def multiply(I: FracIdeal, J: FracIdeal) -> FracIdeal:
    _check_same(I, J)
    gens = [a * b for a in I.gens for b in J.gens]
    return FracIdeal(I.spec, gens, I.den * J.den, _K(I, J), check=False)


def _cross(I: FracIdeal, J: FracIdeal):
    return [g * J.den for g in I.gens], [g * I.den for g in J.gens]


def comparison_precision(I: FracIdeal, J: FracIdeal):
    """(K, K') for comparing I and J after cross-multiplying.

    The cross products are known modulo m^K, and I = J forces them to agree
    exactly, so they are compared modulo m^K.  K' = K minus the least
    m-adic order among them counts the layers actually compared.
    """
    K = _K(I, J)
    if K is None:
        return None, None
    a, b = _cross(I, J)
    orders = [la.madic_truncate(x, K).madic_order() for x in a + b]
    w = min(orders, default=inf)
    if w == inf:
        raise PrecisionExhausted(f"precision exhausted: both ideals vanish modulo m^{K}")
    return K, la.lose(K, w)


def divide(g: RingElem, d: RingElem, K=None):
    """x with d*x = g (modulo m^K), or None; returns (x, K') with x known mod m^K'."""
    spec = g.spec
    if spec.exact:
        x = la.solve(RMatrix(spec, [[d]], 1), (g,))
        return (None, None) if x is None else (x[0], None)
    K2 = la.lose(K, loss_order(d))
    E = la.expand(RMatrix(spec, [[d]], 1))
    box = la.box_rows(spec, 1, K)
    if box:
        E = [row + [b[i] for b in box] for i, row in enumerate(E)]
    x = la.solve_base(E, la.flatten((g,)), spec.base)
    if x is None:
        return None, K2
    return la.madic_truncate(la.unflatten(spec, x[:spec.rank])[0], K2), K2


def cancel_denominator(I: FracIdeal):
    """I rewritten with denominator 1 when den divides every generator, else None."""
    spec = I.spec
    if I.den == spec.one():
        return I
    if I.den.is_unit():
        inv = I.den.inverse()
        return FracIdeal(spec, [g * inv for g in I.gens], K=I.K)
    try:
        out = [divide(g, I.den, I.K) for g in I.gens]
    except PrecisionExhausted:
        return None
    if any(x is None for x, _ in out):
        return None
    K2 = la.lose(I.K, loss_order(I.den)) if I.K is not None else None
    return FracIdeal(spec, [x for x, _ in out], K=K2)


def equals(I: FracIdeal, J: FracIdeal) -> bool:
    """Equality (TRUNCATED: a necessary condition modulo the comparison precision)."""
    return compare(I, J)[0]


def compare(I: FracIdeal, J: FracIdeal):
    """(verdict, m-adic precision of the verdict)."""
    _check_same(I, J)
    if I.is_zero() and J.is_zero():
        return True, _K(I, J)
    if I.spec.exact:
        return _compare_at(I, J)
    # compare the cancelled forms too when they exist; keep the sharper verdict
    pairs = [(I, J)]
    Ic, Jc = cancel_denominator(I), cancel_denominator(J)
    if Ic is not None and Jc is not None and (Ic is not I or Jc is not J):
        pairs.append((Ic, Jc))
    best, err = None, None
    for A, B in pairs:
        try:
            res = _compare_at(A, B)
        except PrecisionExhausted as e:
            err = e
            continue
        if best is None or res[1] > best[1]:
            best = res
    if best is None:
        raise err
    return best


def _compare_at(I: FracIdeal, J: FracIdeal):
    K, K_rep = comparison_precision(I, J)
    a, b = _cross(I, J)
    return la.lattice(I.spec, [(x,) for x in a], 1, K) == la.lattice(I.spec, [(x,) for x in b], 1, K), K_rep


def contains(I: FracIdeal, J: FracIdeal) -> bool:
    """J inside I."""
    _check_same(I, J)
    if J.is_zero():
        return True
    K, _ = comparison_precision(I, J)
    big, small = _cross(I, J)
    return la.span_contains(I.spec, [(x,) for x in big], [(x,) for x in small], 1, K)


def _candidates(I: FracIdeal, rng: random.Random, tries: int):
    spec = I.spec
    for g in I.gens:
        yield g
    if len(I.gens) < 2:
        return
    zero_mon = spec._zero_mon
    elems = spec.group_elements
    for _ in range(tries):
        c = spec.zero()
        for g in I.gens:
            k = rng.randint(-3, 3)
            if k:
                h = rng.choice(elems)
                c = c + g * spec.elem({(h, zero_mon): k})
        if not c.is_zero():
            yield c


def principal_generator(I: FracIdeal, seed: int = 0, tries: int = 200) -> RingElem:
    """f with I = (f)/den(I); searched among small random combinations of the generators."""
    rng = random.Random(seed)
    for c in _candidates(I, rng, tries):
        if equals(FracIdeal(I.spec, [c], I.den, I.K, check=False), I):
            return c
    raise GeneratorNotFound("generator not found")


def inverse(I: FracIdeal, seed: int = 0) -> FracIdeal:
    spec = I.spec
    if I.is_zero():
        raise NotInvertible("not invertible")
    rng = random.Random(seed)
    if not spec.exact:
        try:
            f = principal_generator(I, seed)
        except GeneratorNotFound:
            raise NotInvertible("not invertible") from None
        if not nzd_at(f, I.K):
            raise NotInvertible("not invertible")
        return FracIdeal(spec, [I.den], f, I.K)
    c = next((x for x in _candidates(I, rng, 100) if nzd_at(x)), None)
    if c is None:
        raise NotInvertible("not invertible")
    # Y = {y : y g_i in cR for all i}
    k = len(I.gens)
    z = spec.zero()
    rows = []
    for i, g in enumerate(I.gens):
        row = [g] + [z] * k
        row[i + 1] = -c
        rows.append(row)
    Y = [v[0] for v in la.kernel(RMatrix(spec, rows, k + 1))]
    J = FracIdeal(spec, [y * I.den for y in Y], c)
    if not equals(multiply(I, J), FracIdeal.unit(spec)):
        raise NotInvertible("not invertible")
    return J


def apply_hom(h: RingHom, I: FracIdeal) -> FracIdeal:
    K = I.K
    if h.target.exact:
        K = None
    elif K is not None:
        K = min(K, la.base_precision(h.target))
    den = h(I.den)
    if not nzd_at(den, K):
        raise ValueError("denominator becomes a zero-divisor under the homomorphism")
    return FracIdeal(h.target, [h(g) for g in I.gens], den, K)


def from_elements(spec: RingSpec, num: list, den: list, K=None) -> FracIdeal:
    """Principal ideal (prod num)/(prod den)."""
    a = spec.one()
    for x in num:
        a = a * x
    b = spec.one()
    for x in den:
        b = b * x
    return FracIdeal(spec, [a], b, K)
