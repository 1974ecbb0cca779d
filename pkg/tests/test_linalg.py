import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import EXACT_RINGS, elements
from iwafitt import linalg as la
from iwafitt.ring import TRUNCATED, RingSpec


def matrices(spec, m, n, **kw):
    return st.lists(st.lists(elements(spec, **kw), min_size=n, max_size=n), min_size=m, max_size=m) \
        .map(lambda rows: la.RMatrix(spec, rows))


def exact_matrix(max_m=3, max_n=3):
    return st.tuples(st.sampled_from(EXACT_RINGS), st.integers(1, max_m), st.integers(1, max_n)) \
        .flatmap(lambda t: matrices(*t, lo=-3, hi=3))


# -- spec examples -------------------------------------------------------------

def test_expand_examples(c2):
    R, g = c2
    assert la.expand(la.RMatrix(R, [[g]])) == [[0, 1], [1, 0]]
    assert la.expand(la.RMatrix(R, [[R(3)]])) == [[3, 0], [0, 3]]
    S = RingSpec(3, (), 1, TRUNCATED, (2, 2))
    assert la.expand(la.RMatrix(S, [[S.gamma()]])) == [[1, 0], [1, 1]]


def test_kernel_examples(c2):
    R, g = c2
    (v,), = la.kernel(la.RMatrix(R, [[g - 1]]))
    assert la.spans_equal(R, [(v,)], [(g + 1,)], 1)
    assert la.kernel(la.RMatrix(R, [[R(3)]])) == []


def test_kernel_of_row_against_base_oracle(c2):
    R, g = c2
    A = la.RMatrix(R, [[R(3), g - 1]])
    gens = la.kernel(A)
    _check_exact_kernel(A, gens)


def test_solve_examples(c2):
    R, g = c2
    assert la.solve(la.RMatrix(R, [[R(3)]]), (R(6),)) == (R(2),)
    assert la.solve(la.RMatrix(R, [[g - 1]]), (R(1),)) is None


def test_det_examples(c2):
    R, g = c2
    assert la.det(la.RMatrix.diag(R, [R(3), g - 1])) == 3 * (g - 1)
    assert la.det(la.RMatrix.identity(R, 3)) == R.one()
    with pytest.raises(ValueError):
        la.det(la.RMatrix(R, [[R(1), R(2)]]))


def test_minors_of_2x3_match_cofactors():
    R = RingSpec(3, (3,))
    rng = random.Random(5)
    A = la.RMatrix(R, [[R.from_vector([rng.randint(-3, 3) for _ in range(3)]) for _ in range(3)]
                       for _ in range(2)])
    ms = la.minors(A, 2)
    assert len(ms) == 3
    for m, cols in zip(ms, [(0, 1), (0, 2), (1, 2)]):
        assert m == oracles.laplace([[A.entries[i][j] for j in cols] for i in range(2)])
    assert la.minors(A, 3) == []


# -- properties -------------------------------------------------------------------

def _check_exact_kernel(A, gens):
    E = la.expand(A)
    for v in gens:
        assert all(a.is_zero() for a in A.apply(v))
    nullity = len(E[0]) - oracles.rank_q(E)
    rows = la.rspan_rows(A.spec, gens)
    if nullity == 0:
        assert rows == [] or oracles.rank_q(rows) == 0
        return
    # same rank as the rational kernel, and saturated (so equal to the p-local kernel)
    assert oracles.rank_q(rows) == nullity
    assert oracles.rank_mod_p(rows, A.spec.prime) == nullity


@given(exact_matrix())
def test_exact_kernel_is_the_whole_base_kernel(A):
    _check_exact_kernel(A, la.kernel(A))


@pytest.mark.parametrize("shape", [(1, 1), (1, 2), (2, 1)])
@pytest.mark.parametrize("seed", range(8))
def test_truncated_kernel_matches_enumeration(shape, seed):
    S = RingSpec(3, (), 1, TRUNCATED, (2, 2))
    rng = random.Random(seed)
    A = la.RMatrix(S, [[S.from_vector([rng.randrange(9) for _ in range(2)]) for _ in range(shape[1])]
                       for _ in range(shape[0])])
    brute = oracles.kernel_mod(la.expand(A), 9)
    rows = la.rspan_rows(S, la.kernel(A))
    assert oracles.lattice_mod([[int(x) for x in r] for r in rows], 9, 2 * shape[1]) == brute


@given(st.tuples(st.sampled_from(EXACT_RINGS), st.integers(1, 3)).flatmap(
    lambda t: st.tuples(matrices(t[0], t[1], 2), matrices(t[0], 2, t[1]))))
def test_expand_is_multiplicative(pair):
    A, B = pair
    EA, EB = la.expand(A), la.expand(B)
    prod = [[sum((x * y for x, y in zip(r, c)), Fraction(0)) for c in zip(*EB)] for r in EA]
    assert la.expand(A @ B) == prod


@given(st.sampled_from([RingSpec(3, (2,)), RingSpec(3, (4,)), RingSpec(5, (3,)), RingSpec(3, (2, 2))])
       .flatmap(lambda s: st.integers(1, 3).flatmap(lambda n: matrices(s, n, n, lo=-2, hi=2))))
def test_det_of_expansion_is_norm_of_det(A):
    d = la.det(A)
    assert oracles.det_q(la.expand(A)) == oracles.det_q(d.regular_matrix())


@given(exact_matrix(), st.data())
def test_solve_round_trip(A, data):
    x0 = tuple(data.draw(elements(A.spec)) for _ in range(A.ncols))
    b = A.apply(x0)
    x = la.solve(A, b)
    assert x is not None and A.apply(x) == b


def _truncated_rows(seed, base_mod, m, n):
    rng = random.Random(seed)
    return [[rng.choice([0, 0, rng.randrange(base_mod)]) for _ in range(n)] for _ in range(m)]


@pytest.mark.parametrize("seed", range(40))
def test_numpy_howell_matches_pure_python(seed, monkeypatch):
    spec = [RingSpec(3, (), 0, TRUNCATED, (3, 1)), RingSpec(5, (), 0, TRUNCATED, (2, 1))][seed % 2]
    base = spec.base
    rows = _truncated_rows(seed, base.modulus, 2 + seed % 5, 1 + seed % 4)
    fast = la.canonical_rows(rows, base)
    fast_smith = la.smith_base(rows, base)[1]
    monkeypatch.setattr(la, "_fits_int64", lambda b: False)
    assert [[int(x) for x in r] for r in fast] == [[int(x) for x in r] for r in la.canonical_rows(rows, base)]
    assert list(map(int, fast_smith)) == list(map(int, la.smith_base(rows, base)[1]))


@pytest.mark.parametrize("seed", range(20))
def test_howell_form_is_canonical(seed):
    base = RingSpec(3, (), 0, TRUNCATED, (2, 1)).base
    rows = _truncated_rows(seed, 9, 3, 3)
    canon = la.canonical_rows(rows, base)
    assert oracles.lattice_mod([[int(x) for x in r] for r in canon], 9, 3) == oracles.lattice_mod(rows, 9, 3)
    # any other generating set of the same span has the same form
    rng = random.Random(seed)
    mixed = []
    for _ in range(3):
        cs = [rng.randrange(9) for _ in rows]
        mixed.append([sum(c * r[j] for c, r in zip(cs, rows)) % 9 for j in range(3)])
    assert la.canonical_rows(rows + mixed, base) == canon
