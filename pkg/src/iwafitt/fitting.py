"""Fitting ideals, shifted Fitting ideals Fitt^(n), and the SF^(n) variant."""
from __future__ import annotations

from dataclasses import dataclass

from . import linalg as la
from .fpmod import (FPModule, NotTorsion, annihilator, annihilator_exponent, is_torsion,
                    kernel_of_surjection, minimize)
from .ideals import FracIdeal, compare, nzd_at
from .linalg import RMatrix
from .ring import PrecisionExhausted, RingElem, loss_order


def fitt(M: FPModule) -> FracIdeal:
    """Ideal of n x n minors of a presentation with n generators."""
    spec = M.spec
    M = minimize(M)
    n = M.ngens
    if n == 0:
        return FracIdeal.unit(spec, M.K)
    if M.nrels < n:
        return FracIdeal.zero(spec, M.K)
    mins = la.minors(M.pres, n, stop=lambda acc: acc[-1].is_unit())
    if M.K is not None:
        mins = [la.madic_truncate(m, M.K) for m in mins]
    return FracIdeal(spec, mins, K=M.K)


@dataclass
class ResolutionStep:
    """0 -> Y -> P -> X -> 0 with P = (R/f)^a; ``surjection`` maps P's generators to X."""

    P: FPModule
    f: RingElem
    a: int
    surjection: RMatrix
    Y: FPModule


def _kills(f: RingElem, M: FPModule) -> bool:
    spec = M.spec
    z = spec.zero()
    cols = [tuple(f if k == i else z for k in range(M.ngens)) for i in range(M.ngens)]
    return la.span_contains(spec, M.relations(), cols, M.ngens, M.K)


def _killer(M: FPModule, variant: int) -> RingElem:
    """A non-zero-divisor killing M.

    TRUNCATED mode takes the cheapest (least m-adic order) candidate among
    the annihilator generators and the maximal minors, since the cost of f
    is paid a times in Fitt(P) = (f^a).
    """
    spec = M.spec
    if spec.exact:
        k = annihilator_exponent(M) + (1 if variant else 0)
        return spec.scalar(spec.prime**k)
    n = M.ngens
    _, ann = annihilator(M)
    ann = [a for a in ann if _kills(la.madic_truncate(a, M.K), M)]
    minors = [m for m in la.minors(M.pres, n) if not m.is_zero()]
    cands = []
    for m in ann + minors:
        m = la.madic_truncate(m, M.K)
        if not m.is_zero() and nzd_at(m, M.K) and m not in cands:
            cands.append(m)
    if not cands:
        raise NotTorsion("no non-zero-divisor killer")
    cands.sort(key=loss_order)
    # a second resolution prefers a different killer of the same cost class
    if variant and len(cands) > 1 and loss_order(cands[1]) == loss_order(cands[0]):
        return cands[1]
    return cands[0]


def resolution_step(X: FPModule, variant: int = 0) -> ResolutionStep:
    """One step P -> X -> 0 with P = (R/f)^a.

    variant 0: f = p^k (k = annihilator exponent) or the cheapest
    non-zero-divisor killer, generators in order.  variant 1: f = p^(k+1)
    (resp. another minor of the same cost, when there is one), generators
    reversed plus (EXACT mode) one redundant generator mapping to their sum.
    """
    spec = X.spec
    f = _killer(X, variant)
    n = X.ngens
    one, z = spec.one(), spec.zero()
    if variant:
        cols = [[one if i == n - 1 - j else z for i in range(n)] for j in range(n)]
        if spec.exact:
            cols.append([one] * n)
    else:
        cols = [[one if i == j else z for i in range(n)] for j in range(n)]
    a = len(cols)
    S = RMatrix.from_columns(spec, cols, n)
    P = FPModule(spec, RMatrix.diag(spec, [f] * a), X.K)
    Y = minimize(kernel_of_surjection(S, X, P))
    return ResolutionStep(P, f, a, S, Y)


def _fitt_P(step: ResolutionStep, K) -> FracIdeal:
    g = step.f
    for _ in range(step.a - 1):
        g = g * step.f
    if K is not None:
        g = la.madic_truncate(g, K)
        if g.is_zero():
            raise PrecisionExhausted("precision exhausted: Fitt(P) vanishes modulo m^%d" % K)
    return FracIdeal(step.P.spec, [g], K=K)


def shift_fitt(M: FPModule, n: int, variant: int = 0) -> FracIdeal:
    """Fitt^(n)(M) = prod_i Fitt(P_i)^((-1)^i) * Fitt(Y) along 0 -> Y -> P_1 -> ... -> P_n -> M -> 0."""
    if n < 0:
        raise ValueError("shifted Fitting ideals need n >= 0")
    if n == 0:
        return fitt(M)
    spec = M.spec
    M = minimize(M)
    if M.ngens == 0:
        return FracIdeal.unit(spec, M.K)
    if spec.exact and not is_torsion(M):
        raise NotTorsion("module is not torsion")
    step = resolution_step(M, variant)
    rest = shift_fitt(step.Y, n - 1, variant)
    FP = _fitt_P(step, rest.K)
    if n % 2:
        FP = FracIdeal(spec, [spec.one()], FP.gens[0], FP.K)
    return FP * rest


def sf(M: FPModule, n: int, depth: int = 8, seed: int = 0) -> FracIdeal:
    """SF^(n)(M) = Det(phi(M))^(-(-1)^n) for M with a finite free resolution."""
    from .complexes import det, invert_principal, phi

    F = phi(M, depth=depth, seed=seed)
    D = det(F, seed)
    return invert_principal(D) if n % 2 == 0 else D


def check_lemma83(M: FPModule, n: int, seed: int = 0) -> dict:
    """Compare SF^(n)(M) with Fitt^(n)(M)."""
    a = sf(M, n, seed=seed)
    b = shift_fitt(M, n)
    ok, K = compare(a, b)
    return {"op": "lemma83", "n": n, "sf": a.to_json(), "shift_fitt": b.to_json(),
            "equal": ok, "effective_precision": la.report_precision(M.spec, K)}
