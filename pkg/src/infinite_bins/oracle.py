"""Brute-force verification of the coupling construction.

Every l-configuration is a composition of ``l``; it is identified with the
bitmask of its ``l - 1`` gap positions (bit ``i`` set means a bin boundary
after ball ``i + 1`` counted from the left). Enumeration runs over masks in
ascending order, so counterexamples are reproducible.

The end-to-end coupling check does not use the coupling module's family constructors:
it compares raw results of applying the plan word, and builds its own
reference ``X_0``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from ._backend import kernels
from .config import (
    Configuration,
    LazyInfiniteConfiguration,
    MoveWord,
    apply_word,
    project,
)
from .coupling import (
    CouplingParams,
    build_coupling_plan,
    build_psi,
    build_psi1,
    derive_params,
    f_map,
    make_X,
    make_Y,
)
from .errors import UniverseTooLarge
from .parallel import default_threads, map_ordered

MAX_L = 24
LAZY_BASES = (1, 2, 3)


def check_universe(l: int) -> None:
    if l < 1:
        raise ValueError(f"l must be positive, got {l}")
    if l > MAX_L:
        raise UniverseTooLarge(f"l={l} exceeds the enumeration cap l <= {MAX_L}")


def config_from_mask(mask: int, l: int) -> Configuration:
    bins = []
    c = 1
    for i in range(l - 1):
        if (mask >> i) & 1:
            bins.append(c)
            c = 1
        else:
            c += 1
    bins.append(c)
    return Configuration(tuple(bins))


def mask_of(config: Configuration) -> int:
    mask = 0
    cum = 0
    for v in config.bins[:-1]:
        cum += v
        mask |= 1 << (cum - 1)
    return mask


def enumerate_configs(l: int) -> Iterator[Configuration]:
    """Every l-configuration exactly once, in ascending mask order."""
    check_universe(l)
    for mask in range(1 << (l - 1)):
        yield config_from_mask(mask, l)


def apply_to_universe(l: int, word: MoveWord, threads: int | None = None) -> np.ndarray:
    """Masks of ``word`` applied to every l-configuration, indexed by input mask."""
    check_universe(l)
    if word.max_type > l:
        raise ValueError(f"word uses move type {word.max_type} > {l}")
    size = 1 << (l - 1)
    types, reps = word.arrays()
    threads = threads or default_threads()
    chunks = max(1, min(threads, size // 4096))
    bounds = np.linspace(0, size, chunks + 1, dtype=np.int64)
    parts = map_ordered(
        lambda ab: kernels.apply_word_masks(l, np.arange(ab[0], ab[1], dtype=np.int64), types, reps),
        list(zip(bounds[:-1], bounds[1:])),
        threads,
    )
    return np.concatenate(parts)


@dataclass
class CheckResult:
    name: str
    passed: bool
    counterexample: Configuration | None = None
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "counterexample": str(self.counterexample) if self.counterexample is not None else None,
            "details": self.details,
        }


@dataclass
class VerificationReport:
    k: int
    l: int
    N: int | None
    params: CouplingParams | None
    universe_size: int
    checks: list[CheckResult]
    elapsed: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        p = self.params
        return {
            "k": self.k,
            "l": self.l,
            "N": self.N,
            "d": p.d if p else None,
            "r": p.r if p else None,
            "M": p.M if p else None,
            "universe_size": self.universe_size,
            "passed": self.passed,
            "checks": [c.to_json() for c in self.checks],
            "elapsed": round(self.elapsed, 6),
        }


def _x0_direct(k: int, l: int) -> Configuration:
    # independent of coupling.make_X on purpose
    d, r = divmod(l, k)
    if r == 0:
        d, r = d - 1, k
    return Configuration((k,) * d + (r,))


def _in_family_shape(c: Configuration, k: int) -> bool:
    """At most k balls per bin and exactly k in every interior bin."""
    b = c.bins
    return all(v <= k for v in b) and all(v == k for v in b[1:-1])


def verify_lemma_kcycle(params: CouplingParams, threads: int | None = None) -> CheckResult:
    k, l = params.k, params.l
    check_universe(l)
    family = {mask_of(make_X(params, i)) for i in range(k)}
    out = apply_to_universe(l, build_psi1(params), threads)
    landed = sorted({int(m) for m in np.unique(out)})
    for src, dst in enumerate(out):
        dst = int(dst)
        img = config_from_mask(dst, l)
        if dst not in family or not _in_family_shape(img, k):
            return CheckResult(
                "lemma_kcycle", False, config_from_mask(src, l),
                {
                    "image": str(img),
                    "M": params.M,
                    "family": sorted(str(config_from_mask(m, l)) for m in family),
                    "min_working_exponent": minimal_kcycle_exponent(params, threads),
                },
            )
    return CheckResult("lemma_kcycle", True, details={
        "checked": len(out), "images": [str(config_from_mask(m, l)) for m in landed],
    })


def minimal_kcycle_exponent(params: CouplingParams, threads: int | None = None, limit: int | None = None) -> int | None:
    """Smallest m with k^m sending every l-configuration into the X family."""
    k, l = params.k, params.l
    family = np.array(sorted(mask_of(make_X(params, i)) for i in range(k)), dtype=np.int64)
    limit = limit if limit is not None else l + k * (k - 1) // 2 + l
    cur = np.arange(1 << (l - 1), dtype=np.int64)
    step = MoveWord.repeat(k, 1)
    types, reps = step.arrays()
    for m in range(limit + 1):
        if np.isin(cur, family).all():
            return m
        cur = kernels.apply_word_masks(l, cur, types, reps)
    return None


def verify_lemma_psiaction(params: CouplingParams) -> CheckResult:
    psi = build_psi(params)
    for i in range(params.k):
        x = make_X(params, i)
        got = apply_word(x, psi)
        want = make_X(params, f_map(params, i))
        if got != want:
            return CheckResult("lemma_psiaction", False, x, {"i": i, "got": str(got), "want": str(want)})
    return CheckResult("lemma_psiaction", True, details={
        "f": [f_map(params, i) for i in range(params.k)], "psi": str(psi),
    })


def verify_lemma_fproperties(params: CouplingParams) -> CheckResult:
    k = params.k
    f = [f_map(params, i) for i in range(k)]
    details = {"f": f}
    if f[0] != 0:
        return CheckResult("lemma_fproperties", False, details={**details, "violation": "f(0) != 0"})
    for i in range(1, k):
        if not f[i] < i:
            return CheckResult("lemma_fproperties", False, details={**details, "violation": f"f({i}) >= {i}"})
    for i in range(1, k):
        if f[i] < f[i - 1]:
            return CheckResult("lemma_fproperties", False, details={**details, "violation": f"f decreases at {i}"})
    iterated = []
    for i in range(k):
        v = i
        for _ in range(k - 1):
            v = f[v]
        iterated.append(v)
    if any(iterated):
        return CheckResult("lemma_fproperties", False, details={**details, "f_iter": iterated})
    return CheckResult("lemma_fproperties", True, details={**details, "f_iter": iterated})


def klaction_exponent(bins: tuple[int, ...]) -> int:
    p = len(bins)
    return sum((p - 1 - j) * bins[j - 1] for j in range(1, p - 1))


def verify_lemma_klaction(params: CouplingParams) -> CheckResult:
    k, l = params.k, params.l
    check_universe(l)
    count = 0
    for x in enumerate_configs(l):
        n = klaction_exponent(x.bins)
        got = apply_word(x, MoveWord.repeat(l, n))
        want = make_Y(l, l - x.bins[-1])
        count += 1
        if got != want:
            return CheckResult("lemma_klaction", False, x, {"part": 1, "n": n, "got": str(got), "want": str(want)})
    for j in range(l):
        y = make_Y(l, j)
        got = apply_word(y, MoveWord.repeat(k, l - k))
        want = make_X(params, max(k - l + j, 0))
        if got != want:
            return CheckResult("lemma_klaction", False, y, {"part": 2, "j": j, "got": str(got), "want": str(want)})
    return CheckResult("lemma_klaction", True, details={"part1_checked": count, "part2_checked": l})


def weighted_distance(proj: Configuration) -> int:
    """Sum over the k rightmost balls of their bin's distance to the rightmost bin."""
    p = len(proj.bins)
    return sum((p - j) * proj.bins[j - 1] for j in range(1, p))


def verify_weighted_distance(k: int, l: int) -> CheckResult:
    check_universe(l)
    cap = k * (k - 1) // 2
    maximizers = 0
    for x in enumerate_configs(l):
        proj = project(x, k)
        n = weighted_distance(proj)
        all_ones = len(proj.bins) == k and all(v == 1 for v in proj.bins)
        if n > cap or (n == cap) != all_ones:
            return CheckResult("weighted_distance", False, x, {"projection": str(proj), "n": n, "cap": cap})
        maximizers += all_ones
        # after n moves of type k the original rightmost bin has absorbed the k balls
        lazy = apply_word(LazyInfiniteConfiguration(1, x.bins), MoveWord.repeat(k, n))
        held = lazy.bin(lazy.shift)
        if held != max(x.bins[-1], k):
            return CheckResult("weighted_distance", False, x, {"n": n, "rightmost_after": held})
    return CheckResult("weighted_distance", True, details={"cap": cap, "maximizers": maximizers})


def verify_rightmost_checkpoint(params: CouplingParams) -> CheckResult:
    """Report X_0's rightmost bin and check that k^(k-r) after it holds k balls."""
    k, r = params.k, params.r
    x0 = _x0_direct(k, params.l)
    after = apply_word(x0, MoveWord.repeat(k, k - r))
    ok = after.rightmost == k
    return CheckResult("rightmost_checkpoint", ok, None if ok else x0, {
        "checkpoint": str(after),
        "x0_rightmost": x0.rightmost,
        "x0_rightmost_at_least_k": x0.rightmost >= k,
        "extra_moves": k - r,
        "checkpoint_rightmost": after.rightmost,
    })


def verify_theorem_coupling(k: int, l: int, N: int | None = None, threads: int | None = None) -> CheckResult:
    N = l if N is None else N
    check_universe(l)
    plan = build_coupling_plan(k, l, N)
    size = 1 << (l - 1)
    details: dict = {"length": plan.length, "bound": plan.bound, "target": str(plan.target)}
    name = "theorem_coupling"
    if plan.length >= plan.bound:
        return CheckResult(name, False, details={**details, "violation": "length >= N + 4l^2"})

    n_fin = min(N, l)
    if k >= 2:
        x0 = _x0_direct(k, l)
        out = apply_to_universe(l, plan.prefix, threads)
        bad = np.nonzero(out != mask_of(x0))[0]
        if bad.size:
            src = int(bad[0])
            return CheckResult(name, False, config_from_mask(src, l),
                               {**details, "checkpoint": str(x0), "got": str(config_from_mask(int(out[src]), l))})
        details["checkpoint"] = str(x0)
    if N <= l:
        out = apply_to_universe(l, plan.word, threads)
        first = project(config_from_mask(int(out[0]), l), n_fin)
        for src in range(size):
            got = project(config_from_mask(int(out[src]), l), n_fin)
            if got != first:
                return CheckResult(name, False, config_from_mask(src, l),
                                   {**details, "got": str(got), "other": str(first)})
        if first != project(plan.target, n_fin):
            return CheckResult(name, False, details={**details, "got": str(first)})
        return CheckResult(name, True, details={**details, "inputs": size, "coupled": str(first)})

    # N > l: embed every l-configuration in lazy infinite configurations
    xis = plan.word.expanded()
    bases = sorted({*LAZY_BASES, k, l})

    def run_one(src):
        window = config_from_mask(src, l).bins
        res = []
        for b in bases:
            chain = kernels.LazyChain(b, window)
            chain.run(xis)
            res.append(tuple(chain.project(N)))
        return res

    results = map_ordered(run_one, range(size), threads)
    want = plan.target.bins
    for src, res in enumerate(results):
        for b, got in zip(bases, res):
            if got != want:
                return CheckResult(name, False, config_from_mask(src, l),
                                   {**details, "base": b, "got": str(Configuration(got))})
    if k >= 2:
        tail_l = apply_word(x0, MoveWord.repeat(l, N - l))
        if project(plan.target, l) != tail_l:
            return CheckResult(name, False, details={**details, "l_projection": str(tail_l)})
    return CheckResult(name, True, details={**details, "inputs": size * len(bases), "bases": bases})


def lemma_checks(params: CouplingParams, threads: int | None = None) -> list[CheckResult]:
    return [
        verify_lemma_kcycle(params, threads),
        verify_lemma_psiaction(params),
        verify_lemma_fproperties(params),
        verify_lemma_klaction(params),
        verify_weighted_distance(params.k, params.l),
        verify_rightmost_checkpoint(params),
    ]


def verify_all(k: int, l: int, N: int | None = None, threads: int | None = None,
               lemmas: bool = True, theorem: bool = True) -> VerificationReport:
    """Run every applicable check for ``(k, l)`` and collect a report."""
    check_universe(l)
    t0 = time.perf_counter()
    params = derive_params(k, l) if k >= 2 else None
    checks: list[CheckResult] = []
    if lemmas and params is not None:
        checks.extend(lemma_checks(params, threads))
    if theorem:
        checks.append(verify_theorem_coupling(k, l, N, threads))
    return VerificationReport(k, l, l if N is None else N, params, 1 << (l - 1), checks,
                              time.perf_counter() - t0)


def sweep_lemmas(l_max: int, l_min: int = 3, threads: int | None = None) -> Iterator[VerificationReport]:
    """Lemma reports for every ``2 <= k < l``, ``l_min <= l <= l_max``."""
    check_universe(l_max)
    for l in range(max(l_min, 3), l_max + 1):
        for k in range(2, l):
            yield verify_all(k, l, threads=threads, theorem=False)
