import random

import pytest

from iwafitt import linalg as la
from iwafitt.arith import (PBAR, PlaceData, PreconditionError, Scenario, check_cor41_shape,
                           check_lemma46_projection, check_lemma79, check_ledger_cancel,
                           check_ledger_order, check_prop88, check_z0_sequence, ledger_apply_eq100,
                           ledger_apply_eq101, ledger_remove_eq100, prop88_det, z0, z_module)
from iwafitt.complexes import det, two_term
from iwafitt.fitting import fitt, sf
from iwafitt.fpmod import FPModule
from iwafitt.ideals import FracIdeal, compare
from iwafitt.ring import TRUNCATED, RingSpec, cyclic_projection, twist
from iwafitt.suites import lemma79_scenarios

C2 = RingSpec(3, (2,))
g = C2.gen(0)
# products of several order-1 factors need room: work well above their total order
L1 = RingSpec(3, (), 1, TRUNCATED, (8, 10))
s = L1.gamma()


# -- place modules ---------------------------------------------------------

def test_place_module_examples():
    assert z_module(PlaceData("v", (g,)), C2).pres == la.RMatrix(C2, [[g - 1]])
    assert z0([PlaceData("v", (g,))], C2).is_zero()
    with pytest.raises(PreconditionError):
        z0([], C2)


def test_z0_of_two_places_in_one_variable():
    v, w = PlaceData("v", (s ** 3,)), PlaceData("w", (s,))
    assert z_module(v, L1).pres == la.RMatrix(L1, [[s ** 3 - 1]])
    # Z_w = Z_p, so Z^0 = {(a, -aug(a))} is isomorphic to Z_v
    Z0 = z0([v, w], L1)
    assert fitt(Z0) == FracIdeal(L1, [s ** 3 - 1])
    assert check_z0_sequence([v, w], L1)


@pytest.mark.parametrize("places", [
    [PlaceData("v", (g,)), PlaceData("w", ())],
    [PlaceData("v", ()), PlaceData("w", ()), PlaceData("u", (g,))],
    [PlaceData("v", (g,)), PlaceData("w", (g,))],
])
def test_z0_sequence_is_exact(places):
    assert check_z0_sequence(places, C2)


def test_z0_sequence_exact_with_two_variables():
    S = RingSpec(3, (), 2, TRUNCATED, (6, 8))
    g1, g2 = S.gamma(0), S.gamma(1)
    assert check_z0_sequence([PlaceData("p", ()), PlaceData(PBAR, (g1 ** 3, g2))], S)


def test_finite_index_place_module_has_trivial_sf():
    S = RingSpec(3, (), 2, TRUNCATED, (8, 10))
    g1, g2 = S.gamma(0), S.gamma(1)
    Z = z_module(PlaceData(PBAR, (g1 ** 3, g2)), S)
    I = sf(Z, 0)
    assert compare(I, FracIdeal.unit(S, I.K))[0]


# -- ledger ------------------------------------------------------------------------

def _place(label, sigma, Nv):
    return PlaceData(label, (sigma,), sigma, Nv)


def test_ledger_identities():
    base = FracIdeal(L1, [L1.T() + 3])
    v, w = _place("v", s, 7), _place("w", s * s, 13)
    assert ledger_apply_eq100(base, []) == base
    assert ledger_remove_eq100(ledger_apply_eq100(base, [v]), [v]) == base
    assert ledger_apply_eq100(base, [v, w]) == ledger_apply_eq100(base, [w, v])
    assert ledger_apply_eq101(base, [v]) == base * FracIdeal(L1, [L1.one() - s ** -1])
    assert ledger_apply_eq101(base, []) == base
    assert check_ledger_cancel(base, v)["verdict"]
    assert check_ledger_order(base, [v, w])["verdict"]


def test_ledger_needs_frobenius_data():
    with pytest.raises(PreconditionError):
        ledger_apply_eq100(FracIdeal.unit(L1), [PlaceData("v", (s,))])


# -- degree (1, 2) model of a local complex ---------------------------------------

L46 = RingSpec(3, (), 1, TRUNCATED, (4, 6))


@pytest.mark.parametrize("k", range(3))
def test_local_complex_determinant(k):
    s = L46.gamma()
    sigma = [s, s * s, s.scale(4)][k]
    rep = check_prop88(sigma)
    assert rep["verdict"] and rep["effective_precision"] is not None
    # equivalently (1 - sigma)^-1: the generators differ by the unit -sigma^-1
    D = prop88_det(sigma)
    assert compare(D, FracIdeal(L46, [L46.one()], L46.one() - sigma))[0]


# -- augmentation kernels of the places above p ----------------------------------------------

def test_augmentation_kernel_identity_full_decomposition_group():
    name, part, sc = lemma79_scenarios()[0]
    assert name == "full"
    rep = check_lemma79(part, sc)
    assert rep["verdict"]


def test_second_identity_rejects_full_place_set():
    sc = lemma79_scenarios()[-1][2]
    with pytest.raises(PreconditionError):
        check_lemma79(2, Scenario(sc.spec, sc.places, S=["p", "v"]))


def test_scenario_json_round_trip():
    sc = lemma79_scenarios()[-1][2]
    back = Scenario.from_json(sc.to_json())
    assert back.to_json() == sc.to_json()


# -- exact triples ---------------------------------------------------------------------------

R0 = RingSpec(3, ())


def test_exact_triple_boundary_cases():
    H2 = FPModule.cyclic(R0, [9])
    rep = check_cor41_shape(H2, FPModule.zero(R0), la.RMatrix(R0, [], 1))
    assert rep["verdict"]
    D = FPModule(C2, la.RMatrix.diag(C2, [C2(3), g + 2]))
    rep = check_cor41_shape(D, D, la.RMatrix.identity(C2, 2))
    assert rep["verdict"]


@pytest.mark.parametrize("seed", range(6))
def test_exact_triple_random_extensions(seed):
    rng = random.Random(seed)
    a, b = rng.randint(1, 3), rng.randint(1, 3)
    c = rng.randint(-4, 4)
    H2 = FPModule(R0, la.RMatrix(R0, [[R0(3 ** a), R0(c)], [R0.zero(), R0(3 ** b)]]))
    q = la.RMatrix(R0, [[R0.zero(), R0.one()]])
    rep = check_cor41_shape(H2, FPModule.cyclic(R0, [3 ** b]), q)
    assert rep["verdict"]
    # the kernel of the projection is R/p^a: its Fitting ideal is (p^a)
    assert FracIdeal.from_json(rep["fitt_X"]) == FracIdeal(R0, [R0(3 ** a)])


# -- base change of determinants -------------------------------------------------------

R4 = RingSpec(3, (4,))
s4 = R4.gen(0)


def test_projection_commutes_with_det():
    h = cyclic_projection(R4, (2,))
    F = two_term(la.RMatrix(R4, [[R4(3)]]))
    rep = check_lemma46_projection(F, h)
    assert rep["verdict"] and not rep["skipped"]
    assert FracIdeal.from_json(rep["lhs"]) == FracIdeal(h.target, [h.target.one()], h.target(3))
    F = two_term(la.RMatrix(R4, [[s4 - 1 + 3]]))
    assert check_lemma46_projection(F, h)["verdict"]
    assert check_lemma46_projection(F, twist(R4, (-1,)))["verdict"]


def test_projection_skips_when_torsion_is_lost():
    h = cyclic_projection(R4, (1,))
    rep = check_lemma46_projection(two_term(la.RMatrix(R4, [[s4 - 1]])), h)
    assert rep["skipped"]
