"""Exact linear algebra over R by restriction of scalars.

Every R-matrix is expanded into a base-scalar matrix through the regular
representation of R.  Over Z_(p) and over Z/p^N the element of least
p-adic valuation divides every other entry, so the Smith form below needs no
gcd steps, and the echelon form of ``canonical_rows`` is the Hermite form
(EXACT) or the Howell form (TRUNCATED) of the row span.
"""
from __future__ import annotations

import itertools
from math import inf

import numpy as np

from .ring import MixedRingError, PrecisionExhausted, RingElem, RingSpec, loss_order


# -- base-scalar routines ----------------------------------------------

def _fits_int64(base) -> bool:
    return not base.exact and base.modulus.bit_length() <= 30


def _val_np(x, p: int, N: int):
    """p-adic valuations of the non-zero residues in x (entries in [1, p^N))."""
    v = np.zeros(x.shape, dtype=np.int64)
    pk = p
    for _ in range(1, N):
        hit = x % pk == 0
        if not hit.any():
            break
        v += hit
        pk *= p
    return v


def _smith_np(A, base):
    p, N, q = base.p, base.N, base.modulus
    A = np.array(A, dtype=np.int64) % q
    m, n = A.shape
    V = np.eye(n, dtype=np.int64)
    diag = []
    for k in range(min(m, n)):
        sub = A[k:, k:]
        nz = sub != 0
        if not nz.any():
            break
        vals = np.full(sub.shape, N, dtype=np.int64)
        vals[nz] = _val_np(sub[nz], p, N)
        i, j = np.unravel_index(int(np.argmin(vals)), sub.shape)
        v = int(vals[i, j])
        i += k
        j += k
        if i != k:
            A[[k, i]] = A[[i, k]]
        if j != k:
            A[:, [k, j]] = A[:, [j, k]]
            V[:, [k, j]] = V[:, [j, k]]
        piv = p**v
        uinv = pow(int(A[k, k]) // piv, -1, q)
        A[k] = A[k] * uinv % q
        c = A[k + 1:, k] // piv
        A[k + 1:] = (A[k + 1:] - np.outer(c, A[k])) % q
        cc = A[k, k + 1:] // piv
        V[:, k + 1:] = (V[:, k + 1:] - np.outer(V[:, k], cc)) % q
        A[k, k + 1:] = 0
        diag.append(piv % q)
    return None, diag, V.tolist(), len(diag)


def _canonical_rows_np(rows, base) -> list:
    p, N, q = base.p, base.N, base.modulus
    A0 = np.array(rows, dtype=np.int64) % q
    A0 = A0[A0.any(axis=1)]
    m0, n = A0.shape
    # room for one p^(N-v) multiple per pivot
    A = np.zeros((m0 + n, n), dtype=np.int64)
    A[:m0] = A0
    alive = np.zeros(m0 + n, dtype=bool)
    alive[:m0] = True
    top = m0
    result, pivots = [], []
    for j in range(n):
        nzi = np.nonzero((A[:top, j] != 0) & alive[:top])[0]
        if not len(nzi):
            continue
        vals = _val_np(A[nzi, j], p, N)
        t = int(np.argmin(vals))
        bi, v = nzi[t], int(vals[t])
        piv = p**v
        r = A[bi] * pow(int(A[bi, j]) // piv, -1, q) % q
        alive[bi] = False
        others = np.delete(nzi, t)
        if len(others):
            B = (A[others] - np.outer(A[others, j] // piv, r)) % q
            A[others] = B
            alive[others[~B.any(axis=1)]] = False
        if v > 0:
            extra = r * p ** (N - v) % q
            if extra.any():
                A[top] = extra
                alive[top] = True
                top += 1
        result.append(r)
        pivots.append((j, piv))
    if not result:
        return []
    R = np.array(result, dtype=np.int64)
    # reducing every earlier row by pivot i in increasing i matches row-by-row reduction
    for i in range(1, len(result)):
        j, piv = pivots[i]
        c = R[:i, j] // piv
        if c.any():
            R[:i] = (R[:i] - np.outer(c, R[i])) % q
    return [tuple(r) for r in R.tolist()]


def smith_base(A, base, want_u: bool = False):
    """Return (U, diag, V, rank) with U*A*V diagonal; diag[k] = p^v_k."""
    if not want_u and A and A[0] and _fits_int64(base):
        return _smith_np(A, base)
    m = len(A)
    n = len(A[0]) if m else 0
    A = [list(r) for r in A]
    red = base.reduce
    p = base.p
    V = [[base.one if i == j else base.zero for j in range(n)] for i in range(n)]
    U = [[base.one if i == j else base.zero for j in range(m)] for i in range(m)] if want_u else None
    diag = []
    for k in range(min(m, n)):
        best, bi, bj = inf, -1, -1
        for i in range(k, m):
            row = A[i]
            for j in range(k, n):
                x = row[j]
                if x != 0:
                    v = base.val(x)
                    if v < best:
                        best, bi, bj = v, i, j
                        if v == 0:
                            break
            if best == 0:
                break
        if best == inf:
            break
        if bi != k:
            A[k], A[bi] = A[bi], A[k]
            if U is not None:
                U[k], U[bi] = U[bi], U[k]
        if bj != k:
            for row in A:
                row[k], row[bj] = row[bj], row[k]
            for row in V:
                row[k], row[bj] = row[bj], row[k]
        v, u = base.split(A[k][k])
        uinv = base.inv_unit(u)
        A[k] = [red(x * uinv) for x in A[k]]
        if U is not None:
            U[k] = [red(x * uinv) for x in U[k]]
        piv = p**v
        rowk = A[k]
        for i in range(k + 1, m):
            x = A[i][k]
            if x != 0:
                q = base.div(x, piv)
                A[i] = [red(a - q * b) for a, b in zip(A[i], rowk)]
                if U is not None:
                    U[i] = [red(a - q * b) for a, b in zip(U[i], U[k])]
        for j in range(k + 1, n):
            x = rowk[j]
            if x != 0:
                q = base.div(x, piv)
                rowk[j] = base.zero
                for row in V:
                    if row[k] != 0:
                        row[j] = red(row[j] - q * row[k])
        diag.append(base.reduce(piv))
    return U, diag, V, len(diag)


def kernel_base(A, base, ncols: int | None = None) -> list:
    """Generators (as column vectors) of the kernel of A over the base ring."""
    n = len(A[0]) if A else (ncols or 0)
    if not A:
        return [[base.one if i == j else base.zero for i in range(n)] for j in range(n)]
    _, diag, V, r = smith_base(A, base)
    out = []
    if not base.exact:
        for k, d in enumerate(diag):
            v = base.val(d)
            if v > 0:
                c = base.p ** (base.N - v)
                out.append([base.reduce(c * row[k]) for row in V])
    for k in range(r, n):
        out.append([row[k] for row in V])
    return [v for v in out if any(x != 0 for x in v)]


def solve_base(A, b, base):
    """Some x with A x = b, or None."""
    m = len(A)
    n = len(A[0]) if m else 0
    if m == 0:
        return [base.zero] * n
    U, diag, V, r = smith_base(A, base, want_u=True)
    red = base.reduce
    c = [red(sum((u * x for u, x in zip(row, b)), base.zero)) for row in U]
    y = [base.zero] * n
    for k in range(r):
        if c[k] != 0:
            if base.val(c[k]) < base.val(diag[k]):
                return None
            y[k] = base.div(c[k], diag[k])
    for k in range(r, m):
        if c[k] != 0:
            return None
    return [red(sum((vk * yk for vk, yk in zip(row, y)), base.zero)) for row in V]


def canonical_rows(rows, base) -> list:
    """Canonical echelon basis of the row span (Hermite / Howell form)."""
    rows = [list(r) for r in rows]
    if not rows:
        return []
    if rows[0] and _fits_int64(base):
        return _canonical_rows_np(rows, base)
    n = len(rows[0])
    red = base.reduce
    p = base.p
    pool = [r for r in rows if any(x != 0 for x in r)]
    result = []
    pivots = []
    for j in range(n):
        best, bi = inf, -1
        for i, r in enumerate(pool):
            if r[j] != 0:
                v = base.val(r[j])
                if v < best:
                    best, bi = v, i
        if bi < 0:
            continue
        r = pool.pop(bi)
        v, u = base.split(r[j])
        uinv = base.inv_unit(u)
        r = [red(x * uinv) for x in r]
        piv = p**v
        new_pool = []
        for s in pool:
            x = s[j]
            if x != 0:
                q = base.div(x, piv)
                s = [red(a - q * b) if b else a for a, b in zip(s, r)]
                if not any(s):
                    continue
            new_pool.append(s)
        if not base.exact and v > 0:
            t = [red(x * p ** (base.N - v)) for x in r]
            if any(x != 0 for x in t):
                new_pool.append(t)
        pool = new_pool
        result.append(r)
        pivots.append((j, v))
    for k in range(len(result)):
        for i in range(k + 1, len(result)):
            j, v = pivots[i]
            x = result[k][j]
            if x != 0:
                res = base.residue(x, v)
                q = base.div(red(x - res), p**v)
                if q != 0:
                    result[k] = [red(a - q * b) for a, b in zip(result[k], result[i])]
    return [tuple(r) for r in result]


def _pivot(row, base):
    for j, x in enumerate(row):
        if x != 0:
            return j, base.val(x)
    return None


def pivots_of(canon, base) -> list:
    return [_pivot(r, base) for r in canon]


def reduce_vector(vec, canon, base, pivots=None):
    """Remainder of vec modulo a canonical row basis (zero iff vec lies in the span)."""
    vec = list(vec)
    red = base.reduce
    p = base.p
    if pivots is None:
        pivots = pivots_of(canon, base)
    for r, (j, v) in zip(canon, pivots):
        x = vec[j]
        if x != 0:
            if base.val(x) < v:
                return vec
            q = base.div(x, p**v)
            vec = [red(a - q * b) for a, b in zip(vec, r)]
    return vec


def in_span(vec, canon, base, pivots=None) -> bool:
    return all(x == 0 for x in reduce_vector(vec, canon, base, pivots))


def det_laplace(mat, one, zero):
    """Determinant over a commutative ring by memoized cofactor expansion."""
    n = len(mat)
    if n == 0:
        return one
    memo = {}

    def rec(row: int, mask: int):
        if row == n:
            return one
        key = mask
        if key in memo:
            return memo[key]
        total = zero
        sign = 1
        for j in range(n):
            if mask & (1 << j):
                continue
            a = mat[row][j]
            if not _is_zero(a):
                sub = rec(row + 1, mask | (1 << j))
                if not _is_zero(sub):
                    term = a * sub
                    total = total + term if sign > 0 else total - term
            sign = -sign
        memo[key] = total
        return total

    return rec(0, 0)


def _is_zero(x) -> bool:
    return x.is_zero() if isinstance(x, RingElem) else x == 0


# -- R-matrices ----------------------------------------------------------

class RMatrix:
    """Dense matrix over R; acts on column vectors."""

    __slots__ = ("spec", "nrows", "ncols", "entries")

    def __init__(self, spec: RingSpec, rows, ncols: int | None = None):
        self.spec = spec
        ents = tuple(tuple(spec(x) for x in r) for r in rows)
        self.nrows = len(ents)
        if ncols is None:
            ncols = len(ents[0]) if ents else 0
        if any(len(r) != ncols for r in ents):
            raise ValueError("ragged matrix")
        self.ncols = ncols
        self.entries = ents

    @classmethod
    def zeros(cls, spec, m, n):
        z = spec.zero()
        return cls(spec, [[z] * n for _ in range(m)], n)

    @classmethod
    def identity(cls, spec, n):
        return cls.diag(spec, [spec.one()] * n)

    @classmethod
    def diag(cls, spec, elems):
        n = len(elems)
        z = spec.zero()
        return cls(spec, [[elems[i] if i == j else z for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_columns(cls, spec, cols, nrows: int | None = None):
        cols = [tuple(c) for c in cols]
        if nrows is None:
            nrows = len(cols[0]) if cols else 0
        return cls(spec, [[c[i] for c in cols] for i in range(nrows)], len(cols))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def columns(self) -> list:
        return [tuple(self.entries[i][j] for i in range(self.nrows)) for j in range(self.ncols)]

    def column(self, j):
        return tuple(self.entries[i][j] for i in range(self.nrows))

    def transpose(self):
        return RMatrix(self.spec, [list(c) for c in self.columns()], self.nrows)

    def __matmul__(self, other: "RMatrix"):
        if other.spec != self.spec:
            raise ValueError("mixed rings")
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        z = self.spec.zero()
        cols = other.columns()
        out = []
        for r in self.entries:
            row = []
            for c in cols:
                acc = z
                for a, b in zip(r, c):
                    if a._c and b._c:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return RMatrix(self.spec, out, other.ncols)

    def apply(self, vec):
        """Matrix times an R-vector (tuple of RingElem)."""
        z = self.spec.zero()
        out = []
        for r in self.entries:
            acc = z
            for a, b in zip(r, vec):
                if a._c and b._c:
                    acc = acc + a * b
            out.append(acc)
        return tuple(out)

    def __add__(self, other):
        return RMatrix(self.spec, [[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)], self.ncols)

    def __sub__(self, other):
        return RMatrix(self.spec, [[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)], self.ncols)

    def __neg__(self):
        return RMatrix(self.spec, [[-a for a in r] for r in self.entries], self.ncols)

    def scale(self, e):
        e = self.spec(e)
        return RMatrix(self.spec, [[a * e for a in r] for r in self.entries], self.ncols)

    def hstack(self, other):
        if self.nrows != other.nrows:
            raise ValueError("row mismatch")
        return RMatrix(self.spec, [list(a) + list(b) for a, b in zip(self.entries, other.entries)],
                       self.ncols + other.ncols)

    def vstack(self, other):
        if self.ncols != other.ncols:
            raise ValueError("column mismatch")
        return RMatrix(self.spec, list(self.entries) + list(other.entries), self.ncols)

    def block_diag(self, other):
        z = self.spec.zero()
        top = [list(r) + [z] * other.ncols for r in self.entries]
        bot = [[z] * self.ncols + list(r) for r in other.entries]
        return RMatrix(self.spec, top + bot, self.ncols + other.ncols)

    def submatrix(self, rows, cols):
        return RMatrix(self.spec, [[self.entries[i][j] for j in cols] for i in rows], len(cols))

    def map(self, fn, spec=None):
        spec = spec or self.spec
        return RMatrix(spec, [[fn(a) for a in r] for r in self.entries], self.ncols)

    def truncate(self, eff):
        return self.map(lambda a: a.truncate(eff))

    def is_zero(self) -> bool:
        return all(a.is_zero() for r in self.entries for a in r)

    def __eq__(self, other):
        return (isinstance(other, RMatrix) and self.spec == other.spec
                and self.ncols == other.ncols and self.entries == other.entries)

    def __hash__(self):
        return hash((self.spec, self.ncols, self.entries))

    def __repr__(self):
        return "RMatrix([" + ", ".join("[" + ", ".join(repr(a) for a in r) + "]" for r in self.entries) + "])"

    def to_json(self) -> dict:
        return {"rows": self.nrows, "cols": self.ncols,
                "entries": [[a.to_json() for a in r] for r in self.entries]}

    @classmethod
    def from_json(cls, spec, d):
        ents = [[RingElem.from_json(spec, a) for a in r] for r in d["entries"]]
        return cls(spec, ents, int(d.get("cols", len(ents[0]) if ents else 0)))


def expand(A: RMatrix) -> list:
    """Base-scalar matrix of A on the rank-(rows*|basis|) lattice."""
    spec = A.spec
    n = spec.rank
    z = spec.base.zero
    out = [[z] * (A.ncols * n) for _ in range(A.nrows * n)]
    for i, r in enumerate(A.entries):
        for j, a in enumerate(r):
            if a.is_zero():
                continue
            block = a.regular_matrix()
            for bi in range(n):
                src = block[bi]
                dst = out[i * n + bi]
                off = j * n
                for bj in range(n):
                    if src[bj] != 0:
                        dst[off + bj] = src[bj]
    return out


def flatten(vec) -> list:
    out = []
    for a in vec:
        out.extend(a.vector())
    return out


def unflatten(spec: RingSpec, flat) -> tuple:
    n = spec.rank
    return tuple(spec.from_vector(flat[i * n:(i + 1) * n]) for i in range(len(flat) // n))


def rspan_rows(spec: RingSpec, vectors) -> list:
    """Base rows spanning the R-span of the given R-vectors."""
    rows = []
    for v in vectors:
        for b in range(spec.rank):
            e = spec.from_vector([spec.base.one if k == b else spec.base.zero for k in range(spec.rank)])
            rows.append(flatten([a * e for a in v]))
    return rows


# -- m-adic precision ---------------------------------------------------
#
# A TRUNCATED-mode object carries an integer K: it is only known modulo
# m^K, where m = (p, T_1, ..., T_d).  Since (p^N, deg >= M) lies inside
# m^min(N, M), a ring at precision (N, M) starts at K = min(N, M).

def base_precision(spec: RingSpec):
    """Starting m-adic precision of the ring (None in EXACT mode)."""
    if spec.exact:
        return None
    N, M = spec.precision
    return N if spec.vars == 0 else min(N, M)


def report_precision(spec: RingSpec, K):
    """The (N, M) pair at which a verdict known modulo m^K is sound."""
    if K is None:
        return None
    return [K, K if spec.vars else spec.precision[1]]


def madic_truncate(a: RingElem, K) -> RingElem:
    """Canonical representative of a modulo m^K."""
    if K is None or a.spec.exact:
        return a
    p = a.spec.prime
    degs = a.spec.degrees
    out = {}
    for i, c in a._c.items():
        e = K - degs[i]
        if e > 0:
            c = c % p**e
            if c:
                out[i] = c
    return RingElem(a.spec, out)


def box_rows(spec: RingSpec, k: int, K) -> list:
    """Base rows spanning m^K R^k inside the truncated ring."""
    if K is None or spec.exact:
        return []
    base = spec.base
    n = spec.rank
    rows = []
    for c in range(k):
        for b, deg in enumerate(spec.degrees):
            e = max(K - deg, 0)
            if e >= base.N:
                continue
            r = [base.zero] * (k * n)
            r[c * n + b] = base.reduce(spec.prime**e)
            rows.append(r)
    return rows


def lattice(spec: RingSpec, vectors, k: int | None = None, K=None) -> list:
    """Canonical base basis of span_R(vectors) (+ m^K R^k when K is given)."""
    rows = rspan_rows(spec, vectors)
    if K is not None:
        rows += box_rows(spec, k, K)
    return canonical_rows(rows, spec.base)


def spans_equal(spec: RingSpec, vecs1, vecs2, k: int, K=None) -> bool:
    return lattice(spec, list(vecs1), k, K) == lattice(spec, list(vecs2), k, K)


def span_contains(spec: RingSpec, big, small, k: int, K=None) -> bool:
    """Is every vector of ``small`` in span(big) (+ m^K R^k)?"""
    canon = lattice(spec, list(big), k, K)
    pivots = pivots_of(canon, spec.base)
    return all(in_span(flatten(v), canon, spec.base, pivots) for v in small)


def kernel(A: RMatrix, K=None, K_out=None) -> list:
    """R-vectors generating {x : A x = 0}, or {x : A x in m^K} when K is given."""
    spec = A.spec
    base = spec.base
    n = spec.rank
    if A.ncols == 0:
        return []
    E = expand(A) if A.nrows else []
    width = A.ncols * n
    box = box_rows(spec, A.nrows, K)
    if box and E:
        E = [row + [b[i] for b in box] for i, row in enumerate(E)]
    kb = kernel_base(E, base, ncols=width)
    kb = [v[:width] for v in kb]
    vecs = [unflatten(spec, v) for v in canonical_rows(kb, base)]
    # low-order vectors first: they tend to generate the rest
    vecs.sort(key=lambda v: min(a.madic_order() for a in v))
    # m^K R^ncols lies in the kernel; only the span modulo it is meaningful
    return minimal_generators(spec, vecs, K=K if K_out is None else K_out)


def minimal_generators(spec: RingSpec, vecs, initial=(), K=None) -> list:
    """Greedy subset of vecs spanning span(vecs) + span(initial) (+ m^K)."""
    base = spec.base
    k = len(vecs[0]) if vecs else 0
    if K is not None:
        vecs = [tuple(madic_truncate(a, K) for a in v) for v in vecs]
    vecs = [tuple(v) for v in vecs if not all(a.is_zero() for a in v)]
    if not vecs:
        return []
    extra = rspan_rows(spec, list(initial)) + box_rows(spec, k, K)
    target = canonical_rows(extra + rspan_rows(spec, vecs), base)
    canon = canonical_rows(extra, base) if extra else []
    pivots = pivots_of(canon, base)
    chosen = []
    for v in vecs:
        if canon == target:
            break
        if in_span(flatten(v), canon, base, pivots):
            continue
        chosen.append(v)
        canon = canonical_rows(list(canon) + rspan_rows(spec, [v]), base)
        pivots = pivots_of(canon, base)
    return chosen


def matrix_loss(A: RMatrix) -> int:
    """Precision cost of a kernel computation (0 in EXACT mode).

    Unit entries are eliminated first (unimodular row and column operations
    move junk to junk), then the cost is the largest order of what is left.
    """
    if A.spec.exact:
        return 0
    rows = [list(r) for r in A.entries]
    while True:
        hit = next(((i, j) for i, r in enumerate(rows) for j, a in enumerate(r)
                    if not a.is_zero() and a.is_unit()), None)
        if hit is None:
            break
        i, j = hit
        uinv = rows[i][j].inverse()
        piv = rows[i]
        rest = []
        for k, r in enumerate(rows):
            if k == i:
                continue
            c = r[j] * uinv
            rest.append([a - c * b for l, (a, b) in enumerate(zip(r, piv)) if l != j])
        rows = rest
    return max((loss_order(a) for r in rows for a in r if not a.is_zero()), default=0)


def lose(K, w: int, floor: int = 1):
    """Precision left after a step costing w; raises below the floor."""
    if K is None:
        return None
    if K - w < floor:
        raise PrecisionExhausted(f"precision exhausted: m-adic precision {K} minus loss {w}")
    return K - w


def syzygies(A: RMatrix, K=None):
    """Kernel generators with truncation junk removed; returns (K', vectors).

    When the entries have m-adic order <= w, every x with A x in m^K agrees
    with a genuine syzygy modulo m^(K-w), so the result is reported modulo
    m^(K-w).
    """
    if A.spec.exact:
        return None, kernel(A)
    if K is None:
        K = base_precision(A.spec)
    K2 = lose(K, matrix_loss(A))
    return K2, kernel(A, K, K_out=K2)


def solve(A: RMatrix, b) -> tuple | None:
    """Some R-vector x with A x = b, or None when no solution exists."""
    spec = A.spec
    x = solve_base(expand(A), flatten(b), spec.base)
    if x is None:
        return None
    if A.ncols == 0:
        return ()
    return unflatten(spec, x)


def det(A: RMatrix) -> RingElem:
    if A.nrows != A.ncols:
        raise ValueError("det requires a square matrix")
    return det_laplace([list(r) for r in A.entries], A.spec.one(), A.spec.zero())


def minors(A: RMatrix, k: int, stop=None) -> list:
    """All k x k minors in sorted (rows, cols) order.

    ``stop(values_so_far)`` may return True to end the enumeration early.
    """
    if k > A.nrows or k > A.ncols or k < 0:
        return []
    if k == 0:
        return [A.spec.one()]
    out = []
    ents = A.entries
    for rows in itertools.combinations(range(A.nrows), k):
        sub_rows = [ents[i] for i in rows]
        for cols in itertools.combinations(range(A.ncols), k):
            out.append(det_laplace([[r[j] for j in cols] for r in sub_rows], A.spec.one(), A.spec.zero()))
            if stop is not None and stop(out):
                return out
    return out
