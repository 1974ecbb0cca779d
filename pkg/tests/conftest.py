import sys
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from iwafitt.ring import TRUNCATED, RingSpec

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile("default")

EXACT_RINGS = [RingSpec(3, ()), RingSpec(3, (2,)), RingSpec(3, (4,)), RingSpec(5, (3,)),
               RingSpec(3, (2, 2))]
TRUNC_RINGS = [RingSpec(3, (), 1, TRUNCATED, (2, 3)), RingSpec(3, (2,), 1, TRUNCATED, (2, 2)),
               RingSpec(3, (), 2, TRUNCATED, (2, 3)), RingSpec(5, (2,), 0, TRUNCATED, (3, 1))]
ALL_RINGS = EXACT_RINGS + TRUNC_RINGS


def scalars(spec, lo=-6, hi=6):
    ints = st.integers(lo, hi)
    if not spec.exact:
        return ints
    # p-local rationals: denominators prime to p
    dens = st.integers(1, 4).map(lambda d: d if d % spec.prime else d + 1)
    return st.one_of(ints, st.builds(Fraction, ints, dens))


def elements(spec, **kw):
    return st.lists(scalars(spec, **kw), min_size=spec.rank, max_size=spec.rank).map(spec.from_vector)


def ring_and(n, **kw):
    """A ring drawn from ALL_RINGS together with n of its elements."""
    return st.sampled_from(ALL_RINGS).flatmap(
        lambda s: st.tuples(st.just(s), *[elements(s, **kw) for _ in range(n)]))


@pytest.fixture
def c2():
    R = RingSpec(3, (2,))
    return R, R.gen(0)


def pytest_terminal_summary(terminalreporter):
    acc = sys.modules.get("test_acceptance")
    if acc is None or not acc.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(acc.RESULTS):
        terminalreporter.write_line(acc.RESULTS[n])
