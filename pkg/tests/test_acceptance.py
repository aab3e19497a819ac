"""Acceptance gate. Each test prints one PASS/FAIL line; the summary is repeated at the end of the run."""

import io
import math
import time

import numpy as np

from conftest import ACCEPTANCE_LINES
from infinite_bins.automaton import build_automaton, shortest_sync_exact, synchronized_state
from infinite_bins.cli import main
from infinite_bins.config import Configuration, LazyInfiniteConfiguration, apply_move, project
from infinite_bins.coupling import build_coupling_plan, derive_params
from infinite_bins.oracle import (
    apply_to_universe,
    config_from_mask,
    enumerate_configs,
    mask_of,
    verify_lemma_fproperties,
    verify_lemma_kcycle,
    verify_lemma_klaction,
    verify_lemma_psiaction,
    verify_theorem_coupling,
    verify_weighted_distance,
)
from infinite_bins.simulate import (
    DistributionSpec,
    detect_period,
    estimate_stationary,
    run_chain,
    run_two_chain_coupling,
)

Lazy = LazyInfiniteConfiguration


def record(n: int, ok: bool, summary: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {summary}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_1_exhaustive_coupling():
    t0 = time.perf_counter()
    bad = []
    for l in range(2, 11):
        for k in range(1, l):
            plan = build_coupling_plan(k, l, l)
            out = apply_to_universe(l, plan.word, threads=1)
            if k >= 2:
                want = mask_of(Configuration((k,) * derive_params(k, l).d + (derive_params(k, l).r,)))
            else:
                want = mask_of(Configuration((1,) * l))
            if not (out == want).all() or plan.length >= l + 4 * l * l:
                bad.append((k, l))
    elapsed = time.perf_counter() - t0
    record(1, not bad and elapsed < 10.0,
           f"plan word sends all 2^(l-1) inputs to X0 for 1<=k<l<=10; failures {bad}; {elapsed:.2f}s")


def test_criterion_2_lemma_suite():
    t0 = time.perf_counter()
    failures = []
    for l in range(3, 11):
        for k in range(2, l):
            p = derive_params(k, l)
            for check in (verify_lemma_kcycle(p, threads=1), verify_lemma_psiaction(p),
                          verify_lemma_fproperties(p), verify_lemma_klaction(p)):
                if not check.passed:
                    failures.append(f"{check.name}(k={k},l={l}) counterexample {check.counterexample} "
                                    f"{check.details.get('image', '')}")
    elapsed = time.perf_counter() - t0
    record(2, not failures and elapsed < 30.0,
           f"four lemma checks over 2<=k<l<=10 in {elapsed:.2f}s; failures: {failures or 'none'}")


def test_criterion_3_commutation():
    count = 0
    for m in range(1, 10):
        for x in enumerate_configs(m):
            for n in range(1, m + 1):
                for k in range(1, n + 1):
                    assert project(apply_move(x, k), n) == apply_move(project(x, n), k), (x, n, k)
                    count += 1
    rng = np.random.default_rng(20261016)
    for _ in range(10_000):
        m = int(rng.integers(1, 41))
        x = config_from_mask(int(rng.integers(0, 1 << (m - 1))) if m > 1 else 0, m)
        n = int(rng.integers(1, m + 1))
        k = int(rng.integers(1, n + 1))
        assert project(apply_move(x, k), n) == apply_move(project(x, n), k), (x, n, k)
    record(3, True, f"{count} exhaustive cases (m<=9) and 10000 random cases (m<=40) commute")


def test_criterion_4_weighted_distance():
    bad = [(k, l) for l in range(3, 11) for k in range(2, l) if not verify_weighted_distance(k, l).passed]
    record(4, not bad, f"weighted distance <= k(k-1)/2 with equality only at all-ones; failures {bad}")


def test_criterion_5_n_extension():
    bad = []
    for k, l in [(2, 5), (2, 4), (3, 7)]:
        for N in range(l + 1, l + 6):
            res = verify_theorem_coupling(k, l, N, threads=1)
            if not res.passed or not {1, 2, 3} <= set(res.details["bases"]):
                bad.append((k, l, N))
    record(5, not bad, f"extended plans couple N balls over bases 1,2,3 and length < N+4l^2; failures {bad}")


def test_criterion_6_sync_cross_check():
    bad = []
    for l in range(2, 6):
        for k in range(1, l):
            aut = build_automaton(l, [k, l])
            plan = build_coupling_plan(k, l, l)
            exact = shortest_sync_exact(aut)
            if exact.length > plan.length or synchronized_state(aut, plan.word) is None:
                bad.append((k, l))
    one = shortest_sync_exact(build_automaton(3, [1]))
    ok = not bad and one.length == 2
    record(6, ok, f"exact <= plan and plan synchronizes for l<=5; l=3 alphabet {{1}} length {one.length}; failures {bad}")


def test_criterion_7_deterministic_moves():
    speeds_ok = all(
        run_chain(init, DistributionSpec.deterministic(1), n, seed=s).front_speed == 1
        for init in (Lazy(1), Lazy(4, (2, 1)))
        for n, s in ((1, 0), (999, 1), (100_000, 2))
    )
    periods = {}
    for c in (2, 3):
        for init in (Lazy(1), Lazy(3), Lazy(2, (5, 1, 1)), Lazy(6, (1,))):
            periods[(c, str(init))] = detect_period(init, c, max_steps=10_000)
    ok = speeds_ok and all(v is not None for v in periods.values())
    record(7, ok, f"det:1 speed exactly 1: {speeds_ok}; det:2/det:3 (preperiod, period) {sorted(set(periods.values()))}")


def test_criterion_8_two_chain_coupling():
    dist = DistributionSpec.parse("unif:2,5")
    plan = build_coupling_plan(2, 5, 5)
    p = 0.5 ** plan.length
    occurrences = positions = 0
    bad = []
    for seed in range(20):
        rep = run_two_chain_coupling(Lazy(1), Lazy(3), dist, 1_000_000, seed, watch=plan)
        occurrences += rep.watch_occurrences
        positions += rep.watch_positions
        if not (rep.persistent and rep.first_watch_end is not None and rep.agreement_time <= rep.first_watch_end):
            bad.append(seed)
    expect = positions * p
    sigma = math.sqrt(positions * p * (1 - p))
    z = (occurrences - expect) / sigma
    est = estimate_stationary(dist, depth=2, replicas=200, steps=1_000_000, seed_base=0,
                              initials=[Lazy(1), Lazy(3)])
    pair = est.pairwise[0]
    ok = not bad and abs(z) <= 5 and not pair["flag"]
    record(8, ok, f"agreement before first word end in 20/20 runs (bad {bad}); occurrences {occurrences} "
                  f"vs {expect:.1f} (z={z:+.2f}); TV {pair['tv']:.4f} vs 3-sigma floor {pair['noiseFloor']:.4f}")


def test_criterion_9_determinism():
    invocations = [
        ["simulate", "-d", "unif:2,5", "-n", "300000", "-s", "7", "--watch", "2,5", "--depth", "2"],
        ["simulate", "-d", "cat:1@0.2,3@0.8", "-n", "100000", "-s", "3", "--initial", "base:2[1,4]"],
        ["simulate", "-d", "unif:2,5", "--two-chain", "base:1", "base:3", "-n", "20000", "-s", "9",
         "--replicas", "40", "--depth", "2"],
        ["simulate", "-d", "unif:2,5", "--stationary", "--replicas", "40", "-n", "2000", "-s", "5"],
    ]
    mismatched = []
    for argv in invocations:
        outs = set()
        for threads in ("1", "1", "3", "8"):
            buf = io.StringIO()
            main(argv + ["--threads", threads], out=buf)
            outs.add(buf.getvalue().encode())
        if len(outs) != 1:
            mismatched.append(" ".join(argv))
    record(9, not mismatched, f"{len(invocations)} simulate invocations byte-identical across repeats and "
                              f"--threads 1/3/8; mismatches {mismatched}")
