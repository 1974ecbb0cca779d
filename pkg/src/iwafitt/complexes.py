"""Bounded complexes of finite free R-modules and their determinants.

Conventions (cohomological, d^i : F^i -> F^{i+1}, matrices act on columns):

* shift: F[n]^i = F^{i+n}, differentials multiplied by (-1)^n;
* cone(f : F -> G)^i = F^{i+1} (+) G^i with d = [[-d_F, 0], [f, d_G]];
* Det(F) = prod_i Det(F^i)^{(-1)^i}, normalized so that
  Det([R --h--> R^a] in degrees (-1, 0)) = (det h)^{-1}.

The determinant is evaluated by Cayley's formula: choose row sets B_{i+1}
and complementary column sets C_i so that every minor d^i[B_{i+1}, C_i] is
a non-zero-divisor; then Det(F) = prod_i minor_i^{(-1)^i}.  The reduction
of ``k0_reduce`` gives an independent route to the same ideal.
"""
from __future__ import annotations

import itertools
import random
from fractions import Fraction

from . import linalg as la
from .fpmod import FPModule, annihilator_exponent, cokernel, minimize, subquotient
from .ideals import FracIdeal, nzd_at
from .linalg import RMatrix
from .ring import RingElem, RingHom, RingSpec


class ComplexError(ValueError):
    """Malformed complex (d o d != 0, shape mismatch)."""


class NonTorsion(ValueError):
    pass


class PdWitnessNotFound(ValueError):
    pass


class EulerFactorUndefined(ValueError):
    pass


class PerfectComplex:
    """F^lo -> ... -> F^hi with F^i = R^ranks[i - lo]; ``diffs[i - lo]`` is d^i."""

    def __init__(self, spec: RingSpec, lo: int, ranks, diffs, K=None, check: bool = True):
        self.spec = spec
        self.lo = lo
        self.ranks = tuple(int(r) for r in ranks)
        self.diffs = tuple(diffs)
        if K is None and not spec.exact:
            K = la.base_precision(spec)
        self.K = K
        if len(self.diffs) != max(len(self.ranks) - 1, 0):
            raise ComplexError("need one differential between consecutive degrees")
        if check:
            self.validate()

    @property
    def hi(self) -> int:
        return self.lo + len(self.ranks) - 1

    def rank(self, i: int) -> int:
        if self.lo <= i <= self.hi:
            return self.ranks[i - self.lo]
        return 0

    def d(self, i: int) -> RMatrix:
        if self.lo <= i < self.hi:
            return self.diffs[i - self.lo]
        return RMatrix.zeros(self.spec, self.rank(i + 1), self.rank(i))

    def validate(self):
        for i in range(self.lo, self.hi):
            D = self.d(i)
            if D.spec != self.spec:
                raise ComplexError(f"differential in degree {i} over a different ring")
            if (D.nrows, D.ncols) != (self.rank(i + 1), self.rank(i)):
                raise ComplexError(f"differential in degree {i} has the wrong shape")
        for i in range(self.lo, self.hi - 1):
            prod = self.d(i + 1) @ self.d(i)
            if any(not la.madic_truncate(a, self.K).is_zero() for r in prod.entries for a in r):
                raise ComplexError(f"d o d != 0 at degree {i}")

    def __repr__(self):
        return f"PerfectComplex(lo={self.lo}, ranks={list(self.ranks)})"

    def to_json(self) -> dict:
        return {"ring": self.spec.to_json(), "lo": self.lo, "hi": self.hi,
                "ranks": list(self.ranks), "differentials": [d.to_json() for d in self.diffs]}

    @classmethod
    def from_json(cls, d: dict):
        spec = RingSpec.from_json(d["ring"])
        ranks = d["ranks"]
        lo = int(d["lo"])
        if "hi" in d and int(d["hi"]) != lo + len(ranks) - 1:
            raise ComplexError("hi does not match the number of ranks")
        diffs = [RMatrix.from_json(spec, m) for m in d.get("differentials", [])]
        return cls(spec, lo, ranks, diffs)


def zero_complex(spec: RingSpec) -> PerfectComplex:
    return PerfectComplex(spec, 0, (), ())


def two_term(h: RMatrix, lo: int = -1, K=None) -> PerfectComplex:
    """[R^a --h--> R^b] in degrees (lo, lo + 1)."""
    return PerfectComplex(h.spec, lo, (h.ncols, h.nrows), (h,), K)


def trim(F: PerfectComplex) -> PerfectComplex:
    """Drop zero modules at both ends."""
    lo, hi = F.lo, F.hi
    while lo <= hi and F.rank(lo) == 0:
        lo += 1
    while hi >= lo and F.rank(hi) == 0:
        hi -= 1
    if lo > hi:
        return PerfectComplex(F.spec, 0, (), (), F.K)
    return PerfectComplex(F.spec, lo, [F.rank(i) for i in range(lo, hi + 1)],
                          [F.d(i) for i in range(lo, hi)], F.K, check=False)


def shift(F: PerfectComplex, n: int) -> PerfectComplex:
    sign = -1 if n % 2 else 1
    diffs = [d.scale(sign) if sign < 0 else d for d in F.diffs]
    return PerfectComplex(F.spec, F.lo - n, F.ranks, diffs, F.K, check=False)


def direct_sum(F: PerfectComplex, G: PerfectComplex) -> PerfectComplex:
    if not F.ranks:
        return G
    if not G.ranks:
        return F
    lo, hi = min(F.lo, G.lo), max(F.hi, G.hi)
    K = _min_K(F.K, G.K)
    return PerfectComplex(F.spec, lo, [F.rank(i) + G.rank(i) for i in range(lo, hi + 1)],
                          [F.d(i).block_diag(G.d(i)) for i in range(lo, hi)], K, check=False)


def _min_K(*Ks):
    Ks = [k for k in Ks if k is not None]
    return min(Ks) if Ks else None


class ChainMap:
    """Degreewise maps f^i : F^i -> G^i."""

    def __init__(self, source: PerfectComplex, target: PerfectComplex, maps: dict, check: bool = True):
        self.source = source
        self.target = target
        spec = source.spec
        self.maps = {}
        for i in range(min(source.lo, target.lo), max(source.hi, target.hi) + 1):
            m = maps.get(i)
            if m is None:
                m = RMatrix.zeros(spec, target.rank(i), source.rank(i))
            self.maps[i] = m
        if check:
            self.validate()

    def __getitem__(self, i):
        return self.maps.get(i) or RMatrix.zeros(self.source.spec, self.target.rank(i), self.source.rank(i))

    def validate(self):
        F, G = self.source, self.target
        K = _min_K(F.K, G.K)
        for i, m in self.maps.items():
            if (m.nrows, m.ncols) != (G.rank(i), F.rank(i)):
                raise ComplexError(f"chain map has the wrong shape in degree {i}")
        for i in range(min(F.lo, G.lo), max(F.hi, G.hi)):
            lhs = G.d(i) @ self[i]
            rhs = self[i + 1] @ F.d(i)
            diff = lhs - rhs
            if any(not la.madic_truncate(a, K).is_zero() for r in diff.entries for a in r):
                raise ComplexError(f"not a chain map: square at degree {i} does not commute")


def identity_map(F: PerfectComplex) -> ChainMap:
    return ChainMap(F, F, {i: RMatrix.identity(F.spec, F.rank(i)) for i in range(F.lo, F.hi + 1)})


def cone(f: ChainMap) -> PerfectComplex:
    F, G = f.source, f.target
    spec = F.spec
    lo = min(F.lo - 1, G.lo)
    hi = max(F.hi - 1, G.hi)
    ranks = [F.rank(i + 1) + G.rank(i) for i in range(lo, hi + 1)]
    diffs = []
    for i in range(lo, hi):
        top = (-F.d(i + 1)).hstack(RMatrix.zeros(spec, F.rank(i + 2), G.rank(i)))
        bot = f[i + 1].hstack(G.d(i))
        diffs.append(top.vstack(bot))
    return PerfectComplex(spec, lo, ranks, diffs, _min_K(F.K, G.K), check=False)


# -- cohomology ------------------------------------------------------------

def cohomology(F: PerfectComplex, i: int) -> FPModule:
    """H^i(F) = ker d^i / im d^{i-1}, generated by kernel vectors of d^i."""
    spec = F.spec
    r = F.rank(i)
    if r == 0:
        return FPModule.zero(spec)
    D = F.d(i)
    if D.nrows == 0:
        K1, ker = F.K, RMatrix.identity(spec, r).columns()
    else:
        K1, ker = la.syzygies(D, F.K)
    im = F.d(i - 1).columns()
    ker = la.minimal_generators(spec, ker, initial=im, K=K1)
    return subquotient(spec, ker, im, r, K1)


def base_ranks_exact(F: PerfectComplex) -> dict:
    """Q-ranks of the expanded differentials (EXACT mode)."""
    out = {}
    for i in range(F.lo, F.hi):
        D = F.d(i)
        if D.nrows == 0 or D.ncols == 0:
            out[i] = 0
            continue
        out[i] = la.smith_base(la.expand(D), F.spec.base)[3]
    return out


def is_torsion(F: PerfectComplex, seed: int = 0) -> bool:
    """All cohomology torsion (EXACT: finite; TRUNCATED: a Cayley choice exists)."""
    if F.spec.exact:
        rk = base_ranks_exact(F)
        n = F.spec.rank
        return all(rk.get(i - 1, 0) + rk.get(i, 0) == n * F.rank(i) for i in range(F.lo, F.hi + 1))
    try:
        _cayley(F, seed)
        return True
    except NonTorsion:
        return False


# -- determinant ------------------------------------------------------------

def _cayley_choice(F: PerfectComplex):
    """Search row sets; returns the list of minors or None."""
    lo, hi = F.lo, F.hi
    rho = []
    prev = 0
    for i in range(lo, hi):
        r = F.rank(i) - prev
        if r < 0:
            return None
        rho.append(r)
        prev = r
    if prev != F.rank(hi):
        return None
    K = F.K

    def search(i, B_i, acc):
        if i == hi:
            return acc
        C_i = [c for c in range(F.rank(i)) if c not in B_i]
        k = rho[i - lo]
        D = F.d(i)
        for B in itertools.combinations(range(F.rank(i + 1)), k):
            m = la.det(D.submatrix(B, C_i)) if k else F.spec.one()
            if m.is_zero() or not nzd_at(m, K):
                continue
            res = search(i + 1, set(B), acc + [m])
            if res is not None:
                return res
        return None

    return search(lo, set(), [])


def _elementary(spec: RingSpec, n: int, rng: random.Random):
    """Random unipotent U and its inverse (products of elementary matrices)."""
    U = RMatrix.identity(spec, n)
    Uinv = RMatrix.identity(spec, n)
    if n < 2:
        return U, Uinv
    elems = spec.group_elements
    for _ in range(2 * n):
        a, b = rng.sample(range(n), 2)
        c = spec.elem({(rng.choice(elems), spec._zero_mon): rng.choice([-2, -1, 1, 2])})
        z = spec.zero()
        E = RMatrix(spec, [[spec.one() if i == j else (c if (i, j) == (a, b) else z)
                            for j in range(n)] for i in range(n)], n)
        Einv = RMatrix(spec, [[spec.one() if i == j else (-c if (i, j) == (a, b) else z)
                               for j in range(n)] for i in range(n)], n)
        U = E @ U
        Uinv = Uinv @ Einv
    return U, Uinv


def change_basis(F: PerfectComplex, rng: random.Random) -> PerfectComplex:
    """An isomorphic complex through random unipotent base changes (det 1)."""
    mats = {i: _elementary(F.spec, F.rank(i), rng) for i in range(F.lo, F.hi + 1)}
    diffs = [mats[i + 1][0] @ F.d(i) @ mats[i][1] for i in range(F.lo, F.hi)]
    return PerfectComplex(F.spec, F.lo, F.ranks, diffs, F.K, check=False)


def _cayley(F: PerfectComplex, seed: int = 0, attempts: int = 20):
    F = trim(F)
    if not F.ranks:
        return F, []
    if F.spec.exact and not is_torsion(F):
        raise NonTorsion("complex is not torsion")
    rng = random.Random(seed)
    G = F
    for _ in range(attempts):
        minors = _cayley_choice(G)
        if minors is not None:
            return G, minors
        G = change_basis(F, rng)
    raise NonTorsion("complex is not torsion (no non-zero-divisor minors found)")


def det(F: PerfectComplex, seed: int = 0) -> FracIdeal:
    """Det(F) as a principal fractional ideal."""
    G, minors = _cayley(F, seed)
    spec = F.spec
    num, den = spec.one(), spec.one()
    for i, m in enumerate(minors):
        if (G.lo + i) % 2 == 0:
            num = num * m
        else:
            den = den * m
    K = F.K
    if K is not None:
        num, den = la.madic_truncate(num, K), la.madic_truncate(den, K)
    return FracIdeal(spec, [num], den, K)


def invert_principal(I: FracIdeal) -> FracIdeal:
    """Inverse of a principal ideal (g)/(d) with g a non-zero-divisor."""
    if len(I.gens) != 1:
        raise ValueError("expected a principal ideal")
    return FracIdeal(I.spec, [I.den], I.gens[0], I.K)


# -- phi: modules to complexes ------------------------------------------------

def _basis_candidates(spec, vecs, r, k, rng, tries):
    for sub in itertools.combinations(range(len(vecs)), r):
        yield [vecs[j] for j in sub]
    if len(vecs) == r:
        return
    z = spec.zero()
    elems = spec.group_elements
    for _ in range(tries):
        choice = []
        for _ in range(r):
            v = [z] * k
            for c in vecs:
                m = rng.randint(-2, 2)
                if m:
                    e = spec.elem({(rng.choice(elems), spec._zero_mon): m})
                    v = [a + b * e for a, b in zip(v, c)]
            choice.append(tuple(v))
        yield choice


def _basis_search(spec, vecs, r, k, K, rng, tries=40, degrade=False):
    """(r vectors with the same R-span as vecs, K') or None.

    With ``degrade`` (TRUNCATED mode, computed syzygies only) the spans are
    compared modulo m^K' for the largest K' <= K at which some candidate
    works, because truncation leaves high-order junk among computed
    syzygies.  A module's own relations are never degraded.
    """
    if r == 0:
        return ([], K) if not vecs else None
    if len(vecs) < r:
        return None
    levels = range(K, 0, -1) if degrade and K is not None else [K]
    for Kc in levels:
        target = la.lattice(spec, vecs, k, Kc)
        for choice in _basis_candidates(spec, vecs, r, k, random.Random(rng.random()), tries):
            # a match only means something while the chosen vectors survive mod m^Kc
            if Kc is not None and Kc <= max(_vec_order(v) for v in choice):
                continue
            if la.lattice(spec, choice, k, Kc) == target:
                return choice, Kc
    return None


def _vec_order(v) -> float:
    return min(a.madic_order() for a in v)


def phi(M: FPModule, depth: int = 8, seed: int = 0) -> PerfectComplex:
    """A finite free resolution of M placed in degrees <= 0, with H^0 = M."""
    spec = M.spec
    M = minimize(M)
    n = M.ngens
    if n == 0:
        return zero_complex(spec)
    rng = random.Random(seed)
    K = M.K
    vecs = la.minimal_generators(spec, M.relations(), K=K)
    k, r = n, n
    mats = []
    for stage in range(depth):
        found = _basis_search(spec, vecs, r, k, K, rng, degrade=stage > 0)
        if found is not None:
            basis, K = found
            if r:
                mats.append(RMatrix.from_columns(spec, basis, k))
            break
        if not vecs:
            raise PdWitnessNotFound("pd witness not found (rank mismatch)")
        D = RMatrix.from_columns(spec, vecs, k)
        mats.append(D)
        K, vecs = la.syzygies(D, K)
        k, r = len(D.columns()), len(D.columns()) - r
        if r < 0:
            raise PdWitnessNotFound("pd witness not found (negative rank)")
    else:
        raise PdWitnessNotFound("pd witness not found within depth")
    mats.reverse()
    lo = -len(mats)
    ranks = [m.ncols for m in mats] + [n]
    if K is not None:
        mats = [m.map(lambda a: la.madic_truncate(a, K)) for m in mats]
    return PerfectComplex(spec, lo, ranks, mats, K, check=False)


# -- K0 --------------------------------------------------------------------

class K0Class:
    """Formal integer combination of torsion perfect complexes."""

    def __init__(self, terms=()):
        self.terms = [(F, int(m)) for F, m in terms if int(m) != 0]

    def __add__(self, other):
        return K0Class(self.terms + other.terms)

    def __neg__(self):
        return K0Class([(F, -m) for F, m in self.terms])

    @classmethod
    def of_modules(cls, signed_modules, seed: int = 0):
        return cls([(phi(Q, seed=seed), s) for s, Q in signed_modules])


def k0_det(c: K0Class, spec: RingSpec | None = None, seed: int = 0) -> FracIdeal:
    if spec is None:
        if not c.terms:
            raise ValueError("empty class needs a ring")
        spec = c.terms[0][0].spec
    out = FracIdeal.unit(spec)
    for F, m in c.terms:
        D = det(F, seed)
        if m < 0:
            D = invert_principal(D)
        for _ in range(abs(m)):
            out = out * D
    return out


def k0_reduce(F: PerfectComplex, seed: int = 0) -> list:
    """Signed modules (s_j, Q_j) with [F] = sum_j s_j [phi(Q_j)] and each Q_j of pd <= 1.

    Follows the induction on length: kill the top cohomology with f (p^k in
    EXACT mode, a non-zero-divisor maximal minor otherwise), split off
    [R^r --f--> R^r], and continue with the cone after cancelling an identity
    block.
    """
    spec = F.spec
    out = []
    F = trim(F)
    while F.ranks:
        n = F.hi
        sign = -1 if n % 2 else 1
        if F.lo == n:
            raise NonTorsion("a nonzero free module is not torsion")
        D = F.d(n - 1)
        r = F.rank(n)
        if F.lo == n - 1:
            if D.nrows != D.ncols:
                raise NonTorsion("two-term complex with unequal ranks")
            out.append((sign, cokernel(D, F.K)))
            break
        f, X = _kill_top(F, D, r, seed)
        out.append((sign, cokernel(RMatrix.diag(spec, [f] * r), F.K)))
        # reduced cone: degrees lo .. n-1
        ranks = [F.rank(i) for i in range(F.lo, n - 1)] + [F.rank(n - 1)]
        ranks[n - 2 - F.lo] += r
        diffs = []
        for i in range(F.lo, n - 1):
            if i < n - 3:
                diffs.append(F.d(i))
            elif i == n - 3:
                diffs.append(RMatrix.zeros(spec, r, F.rank(i)).vstack(F.d(i)))
            else:
                diffs.append(X.hstack(F.d(n - 2)))
        F = trim(PerfectComplex(spec, F.lo, ranks, diffs, F.K, check=False))
    return out


def _kill_top(F: PerfectComplex, D: RMatrix, r: int, seed: int):
    """(f, X) with D X = f * identity and f a non-zero-divisor killing coker D."""
    spec = F.spec
    if spec.exact:
        k = annihilator_exponent(FPModule(spec, D))
        f = spec.scalar(spec.prime**k)
        cols = []
        for j in range(r):
            e = tuple(f if i == j else spec.zero() for i in range(r))
            x = la.solve(D, e)
            if x is None:
                raise NonTorsion("top cohomology not killed by p^k")
            cols.append(x)
        return f, RMatrix.from_columns(spec, cols, D.ncols)
    for C in itertools.combinations(range(D.ncols), r):
        sub = D.submatrix(range(r), C)
        f = la.det(sub)
        if f.is_zero() or not nzd_at(f, F.K):
            continue
        adj = adjugate(sub)
        z = spec.zero()
        rows = [[z] * r for _ in range(D.ncols)]
        for a, c in enumerate(C):
            rows[c] = list(adj.entries[a])
        return f, RMatrix(spec, rows, r)
    raise NonTorsion("no non-zero-divisor maximal minor in the top differential")


def adjugate(A: RMatrix) -> RMatrix:
    n = A.nrows
    spec = A.spec
    if n == 1:
        return RMatrix(spec, [[spec.one()]], 1)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            minor = la.det(A.submatrix([k for k in range(n) if k != j], [l for l in range(n) if l != i]))
            row.append(minor if (i + j) % 2 == 0 else -minor)
        rows.append(row)
    return RMatrix(spec, rows, n)


def k0_det_of_reduction(signed, spec: RingSpec) -> FracIdeal:
    """prod_j Fitt(Q_j)^(-s_j), the value Det takes on sum_j s_j [phi(Q_j)]."""
    from .fitting import fitt

    out = FracIdeal.unit(spec)
    for s, Q in signed:
        I = fitt(Q)
        if s > 0:
            I = invert_principal(_as_principal(I))
        out = out * I
    return out


def _as_principal(I: FracIdeal) -> FracIdeal:
    if len(I.gens) == 1:
        return I
    from .ideals import principal_generator
    return FracIdeal(I.spec, [principal_generator(I)], I.den, I.K)


# -- Euler factors ------------------------------------------------------------

def euler_factor(sigma: RingElem, Nv: int, K=None) -> FracIdeal:
    """The formal fraction (1 - sigma/Nv) / (1 - sigma)."""
    spec = sigma.spec
    if spec.exact:
        raise EulerFactorUndefined("Euler factor needs a free-part variable (TRUNCATED mode)")
    one = spec.one()
    den = one - sigma
    if K is None:
        K = la.base_precision(spec)
    if not nzd_at(den, K):
        raise EulerFactorUndefined("Euler factor undefined at this level")
    num = one - sigma * spec.scalar(Fraction(1, Nv))
    return FracIdeal(spec, [num], den, K)


def apply_hom_complex(h: RingHom, F: PerfectComplex) -> PerfectComplex:
    K = F.K
    if h.target.exact:
        K = None
    elif K is not None:
        K = min(K, la.base_precision(h.target))
    return PerfectComplex(h.target, F.lo, F.ranks, [d.map(h, h.target) for d in F.diffs], K, check=False)
