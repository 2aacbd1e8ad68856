"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` and read the "acceptance criteria"
section of the terminal summary.
"""
import json
import math
import random
import subprocess
import sys
import time

import numpy as np
import pytest

from partial_qsearch import analysis, core
from partial_qsearch.analysis import canonical_schedule, lower_bound, sweep_schedules
from partial_qsearch.core import Schedule, SearchSpace
from partial_qsearch.statevector import expand, sv_run

from conftest import ACCEPTANCE_LINES


def report(tag: str, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {tag}: {detail}")
    assert ok, f"{tag}: {detail}"


# 1 -------------------------------------------------------------------------

def test_c01_cross_engine_equivalence():
    rng = random.Random(20240601)
    start = time.perf_counter()
    runs, worst = 0, 0.0
    for n in (8, 16, 64, 256, 1024, 4096):
        for k in (1, 2, 4, 8, 16):
            if n % k:
                continue
            b = n // k
            for _ in range(20):
                schedule = Schedule(
                    rng.randint(0, round(math.pi / 4 * math.sqrt(n)) + 2),
                    rng.randint(0, round(math.pi / 4 * math.sqrt(b)) + 2),
                    rng.random() < 0.8,
                )
                # each schedule at two target placements
                for _ in range(2):
                    space = SearchSpace(n, k, rng.randrange(k), rng.randrange(b))
                    reduced = core.partial_search(space, schedule).states
                    dense = sv_run(space, schedule)
                    for r, sv in zip(reduced, dense, strict=True):
                        worst = max(worst, float(np.max(np.abs(expand(r) - sv.amps))))
                    runs += 1
    elapsed = time.perf_counter() - start
    report(
        "C1 cross-engine equivalence",
        runs >= 1000 and worst <= 1e-10 and elapsed < 60,
        f"{runs} runs, max |diff| = {worst:.2e} (<= 1e-10), {elapsed:.1f}s (< 60s)",
    )


# 2 -------------------------------------------------------------------------

# (N, K, round((pi/4)sqrt(N) - (sqrt(3/4) - pi/6)sqrt(N/K))), evaluated with a
# standalone script outside the package.
QUERY_TABLE = [
    (256, 2, 9), (256, 4, 10), (256, 16, 11), (256, 64, 12),
    (1024, 2, 17), (1024, 4, 20), (1024, 16, 22), (1024, 64, 24),
    (4096, 2, 35), (4096, 4, 39), (4096, 16, 45), (4096, 64, 48),
    (16384, 2, 70), (16384, 4, 79), (16384, 16, 90), (16384, 64, 95),
    (65536, 2, 139), (65536, 4, 157), (65536, 16, 179), (65536, 64, 190),
    (262144, 2, 278), (262144, 4, 314), (262144, 16, 358), (262144, 64, 380),
    (1048576, 2, 556), (1048576, 4, 629), (1048576, 16, 717), (1048576, 64, 760),
    (4194304, 2, 1113), (4194304, 4, 1258), (4194304, 16, 1433), (4194304, 64, 1521),
    (16777216, 2, 2225), (16777216, 4, 2516), (16777216, 16, 2866), (16777216, 64, 3042),
]


def test_c02_query_formula():
    mismatches = [
        (n, k, q, canonical_schedule(SearchSpace(n, k)).query_count)
        for n, k, q in QUERY_TABLE
        if canonical_schedule(SearchSpace(n, k)).query_count != q
    ]
    q1024 = canonical_schedule(SearchSpace(1024, 4)).query_count
    report(
        "C2 query formula",
        not mismatches and q1024 == 20,
        f"{len(QUERY_TABLE)} pinned (N,K) pairs, (1024,4) -> {q1024}, mismatches: {mismatches or 'none'}",
    )


# 3 -------------------------------------------------------------------------

def test_c03_savings_claim():
    windows = {256: (0.27, 0.41), 1024: (0.27, 0.41), 4096: (0.31, 0.37)}
    parts, ok = [], True
    for b, (lo, hi) in windows.items():
        space = SearchSpace(4 * b, 4)
        q = canonical_schedule(space).query_count
        coeff = (math.pi / 4 * math.sqrt(space.n_items) - q) / math.sqrt(b)
        ok &= lo <= coeff <= hi
        parts.append(f"b={b}: {coeff:.4f} in [{lo}, {hi}]")
    report("C3 savings claim", ok, "; ".join(parts))


# 4 -------------------------------------------------------------------------

def test_c04_block_identification():
    worst = {}
    ok = True
    for b in (256, 1024, 4096, 16384, 65536):
        floor = 0.99 if b >= 4096 else 0.95
        for k in (4, 16):
            space = SearchSpace(b * k, k)
            p = core.partial_search(space, canonical_schedule(space).schedule).block_success_probability
            ok &= p >= floor
            worst[b] = min(worst.get(b, 1.0), p)
    detail = ", ".join(f"b={b}: min P={p:.5f}" for b, p in worst.items())
    report("C4 near-certain block identification", ok, detail + " (>=0.95; >=0.99 for b>=4096)")


# 5 -------------------------------------------------------------------------

def test_c05_observation_a():
    worst, ok = 0.0, True
    for b in (64, 256, 1024):
        rb = math.sqrt(b)
        for c in (0.2, 0.4, math.pi / 6, 0.7):
            eta = c * rb
            executed = round(eta)
            sim = analysis.observation_a_simulated(b, executed)
            scaled = abs(sim - analysis.observation_a_predicted(b, eta)) / rb
            scaled_int = abs(sim - analysis.observation_a_predicted(b, executed)) / rb
            ok &= scaled <= 3 / rb and scaled_int <= 3 / rb
            worst = max(worst, scaled * rb, scaled_int * rb)
    report("C5 observation (a)", ok, f"max |sim - pred| = {worst:.3f} (scaled tolerance 3/sqrt(b) <=> 3)")


# 6 -------------------------------------------------------------------------

def test_c06_observation_b():
    worst_lin, worst_sin, ok = 0.0, 0.0, True
    for n in (2**12, 2**16, 2**20):
        rn = math.sqrt(n)
        for eta in (2, 4, 8):
            sim = analysis.observation_b_simulated(n, eta)
            d_lin = abs(sim - 2 * eta)
            d_sin = abs(sim - analysis.observation_b_predicted(n, eta))
            ok &= d_lin <= 3 and d_sin / rn <= 3 / rn
            worst_lin, worst_sin = max(worst_lin, d_lin), max(worst_sin, d_sin)
    report(
        "C6 observation (b)", ok,
        f"max |sim - 2 eta| = {worst_lin:.3f} (<= 3), max |sim - sqrt(N) sin| = {worst_sin:.3f} (scaled <= 3/sqrt(N))",
    )


# 7 -------------------------------------------------------------------------

def test_c07_observation_c():
    ok, max_leak, ratios = True, 0.0, []
    for b in (256, 1024, 4096, 16384, 65536):
        for k in (4, 16):
            space = SearchSpace(b * k, k)
            trace = core.partial_search(space, canonical_schedule(space).schedule)
            ratio = analysis.zeroing_ratio(trace)
            ok &= trace.outside_mass <= 0.05 and 0.8 <= ratio <= 1.2
            max_leak = max(max_leak, trace.outside_mass)
            ratios.append(ratio)
    report(
        "C7 observation (c)", ok,
        f"max outside mass {max_leak:.2e} (<= 0.05), ratio in [{min(ratios):.3f}, {max(ratios):.3f}] (within [0.8, 1.2])",
    )


# 8 -------------------------------------------------------------------------

def test_c08_optimum():
    ok, worst_gap, worst_val = True, 0.0, 0.0
    for b in range(16, 4097):
        opt = analysis.optimal_local_iterations(b)
        gap = abs(opt.grid_argmax - opt.eta_star)
        val = abs(opt.max_saving - (math.sqrt(3) / 2 - math.pi / 6) * math.sqrt(b))
        ok &= gap <= 1 and val <= 1e-12
        worst_gap, worst_val = max(worst_gap, gap), max(worst_val, val)
    report(
        "C8 optimum", ok,
        f"b=16..4096: max |argmax - eta*| = {worst_gap:.3f} (<= 1), max |f(eta*) - closed form| = {worst_val:.1e} (<= 1e-12)",
    )


# 9 -------------------------------------------------------------------------

def test_c09_lower_bound():
    ok, checked = True, 0
    for n_exp in range(2, 31):
        for k_exp in range(1, n_exp + 1):
            space = SearchSpace(2**n_exp, 2**k_exp)
            try:
                q = canonical_schedule(space).query_count
            except analysis.RawNegative:
                continue
            ok &= q >= lower_bound(space)
            checked += 1
    parts = []
    for n, k in ((1024, 4), (4096, 4), (65536, 16), (2**20, 4)):
        space = SearchSpace(n, k)
        result = sweep_schedules(
            space,
            range(analysis.full_search_iterations(n) + 1),
            range(round(math.pi / 4 * math.sqrt(space.block_size)) + 1),
        )
        cheapest = result.cheapest(0.99)
        bound = lower_bound(space)
        ok &= cheapest is not None and cheapest.queries >= bound
        parts.append(f"({n},{k}) best Q@0.99={cheapest.queries} >= {bound:.2f}")
    report("C9 lower bound", ok, f"{checked} canonical spaces respect bound; " + "; ".join(parts))


# 10 ------------------------------------------------------------------------

def test_c10_comparison_constant():
    coeff = analysis.SAVINGS_COEFFICIENT
    ok = round(coeff, 6) == 0.342427 and coeff > analysis.PRIOR_SAVINGS_COEFFICIENT
    report("C10 comparison constant", ok, f"coefficient {coeff:.6f} (pinned 0.342427) > 0.33")


# 11 ------------------------------------------------------------------------

def test_c11_determinism():
    cmd = [sys.executable, "-m", "partial_qsearch", "verify", "--n", "1048576", "--k", "4", "--format", "json"]
    outs = [subprocess.run(cmd, capture_output=True, check=False).stdout for _ in range(2)]
    ok = outs[0] == outs[1] and bool(json.loads(outs[0]))
    report("C11 determinism", ok, f"two verify runs, {len(outs[0])} bytes each, identical={outs[0] == outs[1]}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
