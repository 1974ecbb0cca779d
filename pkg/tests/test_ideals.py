import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import elements
from iwafitt.ideals import (FracIdeal, NotInvertible, compare, contains, equals, inverse, multiply,
                            principal_generator)
from iwafitt.ring import TRUNCATED, RingSpec, is_nonzerodivisor

EXACT_IDEAL_RINGS = [RingSpec(3, ()), RingSpec(3, (2,)), RingSpec(3, (3,)), RingSpec(5, (2, 2))]


def test_product_example(c2):
    R, _ = c2
    assert FracIdeal(R, [R(3)]) * FracIdeal(R, [R(3)]) == FracIdeal(R, [R(9)])


def test_unit_ideal_is_neutral(c2):
    R, g = c2
    I = FracIdeal(R, [1 - g])
    assert I * FracIdeal.unit(R) == I


def test_unit_multiple_generators_agree():
    R = RingSpec(3, (4,))
    s = R.gen(0)
    assert FracIdeal(R, [1 - s]) == FracIdeal(R, [1 - s ** -1])


def test_inverse_examples(c2):
    R, g = c2
    assert inverse(FracIdeal(R, [R(3)])) == FracIdeal(R, [R.one()], R(3))
    with pytest.raises(NotInvertible):
        inverse(FracIdeal(R, [g - 1]))


def test_principal_generator_examples(c2):
    R, g = c2
    f = principal_generator(FracIdeal(R, [R(3), 3 * g]))
    assert FracIdeal(R, [f]) == FracIdeal(R, [R(3)])
    assert FracIdeal(R, [principal_generator(FracIdeal(R, [R(3)]))]) == FracIdeal(R, [R(3)])


def test_contains_is_directional(c2):
    R, _ = c2
    assert contains(FracIdeal(R, [R(3)]), FracIdeal(R, [R(9)]))
    assert not contains(FracIdeal(R, [R(9)]), FracIdeal(R, [R(3)]))
    assert contains(FracIdeal(R, [R(1)], R(3)), FracIdeal.unit(R))


def _random_nzd(spec, rng):
    while True:
        f = spec.from_vector([rng.randint(-4, 4) for _ in range(spec.rank)])
        if not f.is_zero() and is_nonzerodivisor(f)[0]:
            return f


def _random_unit(spec, rng):
    while True:
        u = spec.from_vector([rng.randint(-3, 3) for _ in range(spec.rank)])
        if not u.is_zero() and u.is_unit():
            return u


def _invertible(spec, rng):
    f, u = _random_nzd(spec, rng), _random_unit(spec, rng)
    r = spec.from_vector([rng.randint(-3, 3) for _ in range(spec.rank)])
    den = _random_nzd(spec, rng) if rng.random() < 0.5 else None
    return f, u, FracIdeal(spec, [u * f, u * f * r], den)


@pytest.mark.parametrize("case", range(50))
def test_inverse_of_random_invertible_ideal(case):
    spec = EXACT_IDEAL_RINGS[case % len(EXACT_IDEAL_RINGS)]
    _, _, I = _invertible(spec, random.Random(case))
    J = inverse(I)
    assert I * J == FracIdeal.unit(spec)
    assert inverse(J) == I


@pytest.mark.parametrize("case", range(12))
def test_principal_generator_recovers_unit_multiple(case):
    spec = EXACT_IDEAL_RINGS[case % len(EXACT_IDEAL_RINGS)]
    f, _, I = _invertible(spec, random.Random(100 + case))
    c = principal_generator(I)
    assert FracIdeal(spec, [c], I.den) == I
    # c / f is a unit: (c) = (f) as integral ideals
    assert FracIdeal(spec, [c]) == FracIdeal(spec, [f])


def ideals(spec):
    gens = st.lists(elements(spec, lo=-3, hi=3), min_size=0, max_size=2)
    dens = st.sampled_from([None, spec(3), spec(2)])
    return st.builds(lambda gs, d: FracIdeal(spec, gs, d), gens, dens)


@given(st.sampled_from(EXACT_IDEAL_RINGS).flatmap(lambda s: st.tuples(ideals(s), ideals(s), ideals(s))))
def test_multiplication_laws(t):
    I, J, K = t
    spec = I.spec
    assert I * J == J * I
    assert (I * J) * K == I * (J * K)
    assert I * FracIdeal.unit(spec) == I
    assert I == I
    if I == J and J == K:
        assert I == K


# -- truncated principal ideals: verdicts track p-part and distinguished part --

TRUNC = RingSpec(3, (), 1, TRUNCATED, (4, 6))


def _weierstrass_family():
    # distinguished parts chosen so that distinct ones differ visibly modulo m^4
    T = TRUNC.T()
    dist = {"T": T, "T+3": T + 3, "T^2+3": T * T + 3, "T^2+6": T * T + 6, "T^2+3T": T * T + T * 3}
    units = [TRUNC.one(), TRUNC.gamma(), TRUNC(2) + T * 3]
    for (mu, (name, P)), u in itertools.product(itertools.product((0, 1), dist.items()), units):
        yield (mu, name), TRUNC(3 ** mu) * u * P


def test_truncated_principal_ideals_match_weierstrass_data():
    fam = list(_weierstrass_family())
    for (d1, f), (d2, g) in itertools.combinations(fam, 2):
        ok, K = compare(FracIdeal(TRUNC, [f]), FracIdeal(TRUNC, [g]))
        assert ok == (d1 == d2), (d1, d2)
        assert K >= 1


def test_truncated_equality_is_reported_with_precision():
    T = TRUNC.T()
    ok, K = compare(FracIdeal(TRUNC, [T + 3]), FracIdeal(TRUNC, [(T + 3) * TRUNC.gamma()]))
    assert ok and K is not None and K <= 4


def test_truncated_equality_is_only_a_necessary_condition():
    # 9T = T(9 + 3T^2) - 3T^3 lies in (9 + 3T^2) + m^4, so the two agree at (4, 6)
    verdicts = []
    for N, M in [(4, 6), (5, 7), (8, 10)]:
        S = RingSpec(3, (), 1, TRUNCATED, (N, M))
        T = S.T()
        verdicts.append(compare(FracIdeal(S, [3 * (T * T + 3)]), FracIdeal(S, [3 * (T * T + T * 3 + 3)])))
    assert verdicts[0] == (True, 2)
    assert [ok for ok, _ in verdicts[1:]] == [False, False]
