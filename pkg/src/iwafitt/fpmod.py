"""Finitely presented R-modules: M = coker(A : R^m -> R^n)."""
from __future__ import annotations

import itertools
import random

from . import linalg as la
from .linalg import RMatrix
from .ring import RingHom, RingSpec, lifts_to_nzd


class NotSurjective(ValueError):
    pass


class NotTorsion(ValueError):
    pass


class FPModule:
    """Cokernel of ``pres``; generators are the standard basis of R^n.

    In TRUNCATED mode ``K`` is the m-adic precision the presentation is
    known to; relations are only meaningful modulo m^K.
    """

    def __init__(self, spec: RingSpec, pres: RMatrix, K=None, embedding: RMatrix | None = None):
        if pres.spec != spec:
            raise ValueError("presentation over a different ring")
        self.spec = spec
        self.pres = pres
        if K is None and not spec.exact:
            K = la.base_precision(spec)
        self.K = K
        # images of the generators in an ambient module, when built as a kernel
        self.embedding = embedding
        self._ann = None

    @property
    def ngens(self) -> int:
        return self.pres.nrows

    @property
    def nrels(self) -> int:
        return self.pres.ncols

    @classmethod
    def cyclic(cls, spec: RingSpec, rels, K=None):
        """R / (rels)."""
        return cls(spec, RMatrix(spec, [list(rels)], len(rels)), K)

    @classmethod
    def from_relations(cls, spec: RingSpec, n: int, rels, K=None):
        """Generated by n elements subject to relation vectors ``rels``."""
        return cls(spec, RMatrix.from_columns(spec, rels, n), K)

    @classmethod
    def free(cls, spec: RingSpec, n: int):
        return cls(spec, RMatrix(spec, [[] for _ in range(n)], 0))

    @classmethod
    def zero(cls, spec: RingSpec):
        return cls.free(spec, 0)

    def relations(self) -> list:
        return self.pres.columns()

    def relation_lattice(self) -> list:
        return la.lattice(self.spec, self.relations(), self.ngens, self.K)

    def is_zero(self) -> bool:
        n = self.ngens
        if n == 0:
            return True
        full = la.canonical_rows(_identity_rows(self.spec, n), self.spec.base)
        return self.relation_lattice() == full

    def element_is_zero(self, vec) -> bool:
        return la.in_span(la.flatten(vec), self.relation_lattice(), self.spec.base)

    def __repr__(self):
        return f"FPModule({self.ngens} gens, {self.nrels} rels over {self.spec})"

    def to_json(self) -> dict:
        d = {"ring": self.spec.to_json(), "presentation": self.pres.to_json()}
        if self.K is not None:
            d["madic_precision"] = self.K
        return d

    @classmethod
    def from_json(cls, d: dict):
        spec = RingSpec.from_json(d["ring"])
        return cls(spec, RMatrix.from_json(spec, d["presentation"]), d.get("madic_precision"))


def _identity_rows(spec: RingSpec, n: int) -> list:
    size = n * spec.rank
    base = spec.base
    return [[base.one if i == j else base.zero for j in range(size)] for i in range(size)]


def _min_K(*Ks):
    Ks = [k for k in Ks if k is not None]
    return min(Ks) if Ks else None


# -- constructions ------------------------------------------------------

def direct_sum(M1: FPModule, M2: FPModule) -> FPModule:
    return FPModule(M1.spec, M1.pres.block_diag(M2.pres), _min_K(M1.K, M2.K))


def base_change(h: RingHom, M: FPModule) -> FPModule:
    if M.spec != h.source:
        raise ValueError("module is not over the source of the homomorphism")
    K = M.K
    if K is not None and not h.target.exact:
        K = min(K, la.base_precision(h.target))
    elif h.target.exact:
        K = None
    return FPModule(h.target, M.pres.map(h, h.target), K)


def minimize(M: FPModule) -> FPModule:
    """Drop generators killed by a relation with a unit coefficient."""
    return minimize_with_kept(M)[0]


def minimize_with_kept(M: FPModule):
    """Return (minimized module, indices of the surviving generators).

    The surviving generators are a subset of the old ones, so an embedding
    stays valid after selecting the kept columns.
    """
    spec = M.spec
    rows = [list(r) for r in M.pres.entries]
    ncols = M.nrels
    kept = list(range(M.ngens))
    while True:
        found = None
        for i, r in enumerate(rows):
            for j in range(ncols):
                if not r[j].is_zero() and r[j].is_unit():
                    found = (i, j)
                    break
            if found:
                break
        if found is None:
            break
        i, j = found
        uinv = rows[i][j].inverse()
        piv_row = rows[i]
        col = [r[j] for r in rows]
        for l in range(ncols):
            if l == j or piv_row[l].is_zero():
                continue
            c = piv_row[l] * uinv
            for k in range(len(rows)):
                if k != i and not col[k].is_zero():
                    rows[k][l] = rows[k][l] - col[k] * c
        del rows[i]
        del kept[i]
        for r in rows:
            del r[j]
        ncols -= 1
    if M.K is not None:
        rows = [[la.madic_truncate(a, M.K) for a in r] for r in rows]
    cols = [tuple(r[j] for r in rows) for j in range(ncols)]
    cols = [c for c in cols if any(not a.is_zero() for a in c)]
    emb = None
    if M.embedding is not None:
        emb = M.embedding.submatrix(range(M.embedding.nrows), kept)
    out = FPModule(spec, RMatrix.from_columns(spec, cols, len(rows)), M.K, emb)
    return out, kept


def subquotient(spec: RingSpec, gens, rels, k: int, K=None) -> FPModule:
    """span(gens) / span(rels) inside R^k, assuming span(rels) is inside span(gens).

    Generators of the result are ``gens``; its ``embedding`` records them.
    """
    gens = [tuple(g) for g in gens]
    if not gens:
        return FPModule(spec, RMatrix(spec, [], 0), K)
    G = RMatrix.from_columns(spec, gens, k)
    if rels:
        G_rel = G.hstack(RMatrix.from_columns(spec, rels, k))
    else:
        G_rel = G
    K2, syz = la.syzygies(G_rel, K)
    n = len(gens)
    proj = [tuple(v[:n]) for v in syz]
    proj = la.minimal_generators(spec, proj, K=K2)
    return FPModule(spec, RMatrix.from_columns(spec, proj, n), K2, G)


def kernel_of_surjection(f: RMatrix, target: FPModule, source=None) -> FPModule:
    """Kernel of the map source -> target given on generators by the columns of f.

    ``source`` is an FPModule or None (free of rank f.ncols).  The result's
    generators are elements of the source, recorded in ``embedding``.
    """
    spec = target.spec
    ns = f.ncols
    nt = target.ngens
    if source is None:
        source = FPModule.free(spec, ns)
    if source.ngens != ns or f.nrows != nt:
        raise ValueError("shape mismatch")
    K = _min_K(target.K, source.K)
    # surjectivity: images plus target relations span R^nt
    span = f.columns() + target.relations()
    full = la.canonical_rows(_identity_rows(spec, nt), spec.base)
    if nt and la.lattice(spec, span, nt, K) != full:
        raise NotSurjective("not surjective")
    # well defined on the source presentation
    if source.nrels:
        images = (f @ source.pres).columns()
        if not la.span_contains(spec, target.relations(), images, nt, K):
            raise ValueError("map is not well defined on the source presentation")
    # generators: x with f x in span(target relations)
    if nt:
        K1, syz = la.syzygies(f.hstack(target.pres), K)
        gens = [tuple(v[:ns]) for v in syz]
    else:
        K1, gens = K, [tuple(row) for row in RMatrix.identity(spec, ns).columns()]
    gens = la.minimal_generators(spec, gens, initial=source.relations(), K=K1)
    out = subquotient(spec, gens, source.relations(), ns, K1)
    return out


# -- invariants ----------------------------------------------------------

def is_torsion(M: FPModule, seed: int = 0) -> bool:
    """EXACT: finiteness.  TRUNCATED: some combination of maximal minors lifts to a nzd."""
    spec = M.spec
    n = M.ngens
    if n == 0:
        return True
    if spec.exact:
        E = la.expand(M.pres)
        if not E or not E[0]:
            return False
        _, diag, _, r = la.smith_base(E, spec.base)
        return r == n * spec.rank
    return torsion_element(M, seed) is not None


def torsion_element(M: FPModule, seed: int = 0, tries: int = 30):
    """An annihilating element of M that lifts to a non-zero-divisor, or None."""
    n = M.ngens
    if n == 0:
        return M.spec.one()
    if M.nrels < n:
        return None
    mins = la.minors(M.pres, n)
    K = M.K
    for m in mins:
        if not m.is_zero() and lifts_to_nzd(_trunc(m, K)):
            return m
    rng = random.Random(seed)
    nz = [m for m in mins if not m.is_zero()]
    if len(nz) < 2:
        return None
    for _ in range(tries):
        c = M.spec.zero()
        for m in nz:
            c = c + m * rng.randint(-2, 2)
        if not c.is_zero() and lifts_to_nzd(_trunc(c, K)):
            return c
    return None


def _trunc(a, K):
    return la.madic_truncate(a, K) if K is not None else a


def annihilator_exponent(M: FPModule) -> int:
    """Smallest k with p^k M = 0 (EXACT mode, torsion M)."""
    spec = M.spec
    if not spec.exact:
        raise ValueError("annihilator exponent is defined in EXACT mode only")
    if M._ann is not None:
        return M._ann
    n = M.ngens
    if n == 0:
        M._ann = 0
        return 0
    E = la.expand(M.pres)
    if not E or not E[0]:
        raise NotTorsion("module is not torsion")
    _, diag, _, r = la.smith_base(E, spec.base)
    if r < n * spec.rank:
        raise NotTorsion("module is not torsion")
    M._ann = max(spec.base.val(d) for d in diag)
    return M._ann


def annihilator(M: FPModule):
    """Generators of Ann(M); returns (K', elements) with K' the precision they hold to."""
    spec = M.spec
    n, r = M.ngens, M.nrels
    if n == 0:
        return M.K, [spec.one()]
    one, z = spec.one(), spec.zero()
    # a with a*e_i = pres*y_i for every i
    rows = []
    for i in range(n):
        for k in range(n):
            row = [one if k == i else z] + [z] * (n * r)
            for j in range(r):
                row[1 + i * r + j] = -M.pres[k, j]
            rows.append(row)
    K1, syz = la.syzygies(RMatrix(spec, rows, 1 + n * r), M.K)
    return K1, [v[0] for v in syz if not v[0].is_zero()]


def pd_le_1_witness(M: FPModule, seed: int = 0, tries: int = 60):
    """Square h with nzd determinant and coker(h) = M, or None (NotFound).

    None does not prove that M has projective dimension > 1.
    """
    spec = M.spec
    M = minimize(M)
    n = M.ngens
    if n == 0:
        return RMatrix(spec, [], 0)
    cols = M.relations()
    if len(cols) < n:
        return None
    K = M.K
    target = la.lattice(spec, cols, n, K)

    def good(choice):
        h = RMatrix.from_columns(spec, choice, n)
        d = la.det(h)
        if d.is_zero() or not lifts_to_nzd(_trunc(d, K)):
            return None
        if la.lattice(spec, choice, n, K) != target:
            return None
        return h

    for sub in itertools.combinations(range(len(cols)), n):
        h = good([cols[j] for j in sub])
        if h is not None:
            return h
    rng = random.Random(seed)
    z = spec.zero()
    for _ in range(tries):
        choice = []
        for _ in range(n):
            v = [z] * n
            for c in cols:
                k = rng.randint(-2, 2)
                if k:
                    v = [a + b * k for a, b in zip(v, c)]
            choice.append(tuple(v))
        h = good(choice)
        if h is not None:
            return h
    return None


def cokernel(h: RMatrix, K=None) -> FPModule:
    return FPModule(h.spec, h, K)
