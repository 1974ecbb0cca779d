"""Acceptance criteria 1-9, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are repeated in the
terminal summary) or directly with ``python3 tests/test_acceptance.py``.
"""
import json
import subprocess
import sys
import tempfile
import time
from pathlib import Path

import pytest

from iwafitt.cli import main
from iwafitt.fpmod import FPModule, annihilator_exponent, minimize
from iwafitt.ring import RingSpec
from iwafitt.suites import PD1_RINGS, run_suite

SEED = 7
RESULTS = {}


def record(n: int, ok: bool, detail: str):
    line = f"ACCEPTANCE {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    RESULTS[n] = line
    print(line)
    return ok


def _suite_line(rep):
    return f"{rep['passed']}/{rep['total']}"


def test_criterion_1_det_phi_times_fitt_is_unit():
    with tempfile.TemporaryDirectory() as tmp:
        out = Path(tmp) / "thm104.json"
        t0 = time.perf_counter()
        code = main(["verify", "thm104", "--seed", str(SEED), "--cases", "100", "--out", str(out)])
        elapsed = time.perf_counter() - t0
        rep = json.loads(out.read_text())["report"]
    rings = {json.dumps(c["ring"], sort_keys=True) for c in rep["cases"]}
    modules = [FPModule.from_json(c["module"]) for c in rep["cases"]]
    shapes_ok = all(minimize(M).ngens <= 3 and annihilator_exponent(M) <= 3 for M in modules)
    ok = (code == 0 and rep["passed"] == rep["total"] == 100 and elapsed < 60
          and len(rings) == len(PD1_RINGS) and shapes_ok)
    assert record(1, ok, f"{_suite_line(rep)} exact, {len(rings)} rings, {elapsed:.1f}s (< 60s)")


def test_criterion_2_resolution_independence():
    rep = run_suite("thm81", SEED)
    per_ring = rep["cases_per_ring"]
    ok = rep["verdict"] and per_ring == 50 and rep["total"] == 200
    both_n = all(set(c["shift_fitt"]) == {"1", "2"} for c in rep["cases"])
    assert record(2, ok and both_n, f"{_suite_line(rep)} modules ({per_ring} per ring), n = 1, 2")


def test_criterion_3_pseudo_null_quotients():
    rep = run_suite("prop22", SEED, precision=(4, 6))
    ok = rep["verdict"] and rep["total"] == 10 and all(
        r["effective_precision"] for c in rep["cases"] for r in c["rings"])
    assert record(3, ok, f"{_suite_line(rep)} pairs, trivial G and C2, requested (4, 6)")


def test_criterion_4_augmentation_kernel_at_p():
    rep = run_suite("lemma79", SEED, precision=(3, 5))
    part1 = [c for c in rep["cases"] if c.get("check") == "lemma79.1"]
    ok = len(part1) == 3 and all(c["verdict"] and len(c["agreements"]) == 5 for c in part1)
    precs = ", ".join(f"{c['scenario']} {c['effective_precision']}" for c in part1)
    assert record(4, ok, f"{sum(c['verdict'] for c in part1)}/3 scenarios with 4 cross-checks each; "
                         f"effective precision {precs}")


def test_criterion_5_local_determinant():
    rep = run_suite("prop88", SEED, precision=(4, 6))
    ok = rep["verdict"] and rep["total"] == 3 and all(c["effective_precision"] for c in rep["cases"])
    assert record(5, ok, f"{_suite_line(rep)} Frobenius choices")


def test_criterion_6_ledger_coherence():
    rep = run_suite("ledger", SEED)
    ok = rep["verdict"] and rep["total"] == 20
    assert record(6, ok, f"{_suite_line(rep)} cases (cancellation and order independence)")


def test_criterion_7_exact_triples():
    rep = run_suite("cor41", SEED)
    ok = rep["verdict"] and rep["total"] == 25
    assert record(7, ok, f"{_suite_line(rep)} exact triples")


def test_criterion_8_projection_compatibility():
    rep = run_suite("lemma46", SEED)
    skipped = sum(1 for c in rep["cases"] if c.get("skipped"))
    ok = rep["verdict"] and rep["total"] == 20
    assert record(8, ok, f"{_suite_line(rep)} complexes over C4 and C2xC2 ({skipped} degenerate skips)")


def test_criterion_9_determinism():
    with tempfile.TemporaryDirectory() as tmp:
        outs = [Path(tmp) / f"run{i}.json" for i in (1, 2)]
        procs = [subprocess.Popen([sys.executable, "-m", "iwafitt", "verify", "all", "--seed", str(SEED),
                                   "--out", str(o)]) for o in outs]
        codes = [p.wait(timeout=900) for p in procs]
        a, b = (o.read_bytes() for o in outs)
    ok = a == b and len(a) > 0
    assert record(9, ok, f"verify all --seed {SEED} twice: {len(a)} bytes, "
                         f"{'identical' if a == b else 'DIFFERENT'} (exit codes {codes})")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
