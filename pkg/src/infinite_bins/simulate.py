"""Seeded simulation of the chain X_{n+1} = phi_{xi_n}(X_n).

Move types are drawn i.i.d. from a bounded-support :class:`DistributionSpec`
with numpy's PCG64 generator, in fixed chunks, so a run is reproducible
from ``(initial, dist, steps, seed)`` alone. Replicas use child seeds from
``SeedSequence(seed).spawn`` and are merged in replica order, so results do
not depend on the thread count.

A regeneration time is a step at which the trailing moves spell a watched
coupling word. With a :class:`~infinite_bins.coupling.CouplingPlan` as the
watch, every firing is checked against the plan's target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ._backend import kernels
from .config import (
    Configuration,
    LazyInfiniteConfiguration,
    MoveWord,
    apply_move_infinite,
    parse_lazy,
)
from .coupling import CouplingPlan
from .errors import InvalidDistribution, ParseError
from .parallel import map_ordered

CHUNK = 1 << 16
PROB_TOL = 1e-12


@dataclass(frozen=True)
class DistributionSpec:
    """Law of the move type: ``det:c``, ``unif:a,b,...`` or ``cat:a@p,b@q,...``."""

    kind: str
    values: tuple[int, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        if self.kind not in ("det", "unif", "cat"):
            raise InvalidDistribution(f"unknown distribution kind {self.kind!r}")
        if not self.values or len(self.values) != len(self.probs):
            raise InvalidDistribution("values and probabilities must be nonempty and aligned")
        if len(set(self.values)) != len(self.values):
            raise InvalidDistribution(f"repeated support value in {self.values}")
        if any(v < 1 for v in self.values):
            raise InvalidDistribution("support values must be positive integers")
        if any(p < 0 for p in self.probs):
            raise InvalidDistribution("probabilities must be nonnegative")
        if abs(math.fsum(self.probs) - 1.0) > PROB_TOL:
            raise InvalidDistribution(f"probabilities sum to {math.fsum(self.probs)!r}, not 1")

    @classmethod
    def deterministic(cls, c: int) -> "DistributionSpec":
        return cls("det", (int(c),), (1.0,))

    @classmethod
    def uniform(cls, values: Sequence[int]) -> "DistributionSpec":
        vals = tuple(int(v) for v in values)
        return cls("unif", vals, tuple(1.0 / len(vals) for _ in vals))

    @classmethod
    def categorical(cls, values: Sequence[int], probs: Sequence[float]) -> "DistributionSpec":
        return cls("cat", tuple(int(v) for v in values), tuple(float(p) for p in probs))

    @classmethod
    def parse(cls, text: str) -> "DistributionSpec":
        kind, sep, body = text.strip().partition(":")
        if not sep or not body:
            raise ParseError(f"distribution must look like det:3, unif:2,5 or cat:2@0.3,5@0.7; got {text!r}")
        try:
            if kind == "det":
                return cls.deterministic(int(body))
            if kind == "unif":
                return cls.uniform([int(v) for v in body.split(",")])
            if kind == "cat":
                pairs = [item.split("@") for item in body.split(",")]
                if any(len(p) != 2 for p in pairs):
                    raise ParseError(f"categorical terms must be value@prob in {text!r}")
                return cls.categorical([int(v) for v, _ in pairs], [float(p) for _, p in pairs])
        except ValueError as exc:
            if isinstance(exc, (ParseError, InvalidDistribution)):
                raise
            raise ParseError(f"bad number in distribution {text!r}") from None
        raise ParseError(f"unknown distribution kind {kind!r}")

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(v for v, p in zip(self.values, self.probs) if p > 0)

    @property
    def support_max(self) -> int:
        return max(self.support)

    @property
    def is_deterministic(self) -> bool:
        return len(self.support) == 1

    def prob(self, value: int) -> float:
        return dict(zip(self.values, self.probs)).get(value, 0.0)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        vals = np.array(self.values, dtype=np.int64)
        if self.kind == "det":
            return np.full(size, vals[0], dtype=np.int64)
        if self.kind == "unif":
            return vals[rng.integers(0, len(vals), size=size)]
        cum = np.cumsum(self.probs)
        idx = np.searchsorted(cum, rng.random(size), side="right")
        return vals[np.minimum(idx, len(vals) - 1)]

    def __str__(self):
        if self.kind == "det":
            return f"det:{self.values[0]}"
        if self.kind == "unif":
            return "unif:" + ",".join(map(str, self.values))
        return "cat:" + ",".join(f"{v}@{p!r}" for v, p in zip(self.values, self.probs))


def default_burn_in(dist: DistributionSpec) -> int:
    return max(10 * dist.support_max, 1000)


def _make_rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


# ---------------------------------------------------------------------------
# single chain


@dataclass(frozen=True)
class ChainState:
    config: LazyInfiniteConfiguration
    step: int = 0
    move_log: tuple[int, ...] = ()
    log_window: int = 0

    @property
    def bins_created(self) -> int:
        return self.config.shift


def step_chain(state: ChainState, xi: int) -> ChainState:
    if xi < 1:
        raise InvalidDistribution(f"move type must be positive, got {xi}")
    log = state.move_log
    if state.log_window:
        log = (log + (xi,))[-state.log_window:]
    return ChainState(apply_move_infinite(state.config, xi), state.step + 1, log, state.log_window)


def _radix(initial: LazyInfiniteConfiguration, dist: DistributionSpec, depth: int) -> int:
    # no bin ever exceeds max(initial bins, largest move type)
    radix = max(initial.base, *initial.window, dist.support_max) + 1
    if depth and radix ** depth >= 1 << 62:
        raise InvalidDistribution(f"depth {depth} too large to pack top bins (radix {radix})")
    return radix


def _decode_key(key: int, depth: int, radix: int) -> Configuration:
    vals = []
    for _ in range(depth):
        key, v = divmod(key, radix)
        vals.append(v)
    return Configuration(tuple(reversed(vals)))


def _hist_json(counts: dict[int, int], depth: int, radix: int) -> dict[str, int]:
    return {str(_decode_key(k, depth, radix)): counts[k] for k in sorted(counts)}


def _merge_counts(acc: dict[int, int], keys: np.ndarray) -> None:
    if keys.size == 0:
        return
    uniq, cnt = np.unique(keys, return_counts=True)
    for u, c in zip(uniq.tolist(), cnt.tolist()):
        acc[u] = acc.get(u, 0) + c


def _word_ends(carry: np.ndarray, xis: np.ndarray, word: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Chunk indices where an occurrence of ``word`` ends, and the new carry."""
    m = len(word)
    ext = np.concatenate([carry, xis]) if carry.size else xis
    if len(ext) >= m:
        win = sliding_window_view(ext, m)
        hits = np.nonzero((win == word).all(axis=1))[0] + (m - 1) - len(carry)
    else:
        hits = np.empty(0, dtype=np.int64)
    new_carry = ext[max(0, len(ext) - (m - 1)):] if m > 1 else ext[:0]
    return hits, new_carry.copy()


@dataclass
class SimulationReport:
    steps: int
    seed: int
    distribution: str
    initial: str
    bins_created: int
    depth: int
    burn_in: int
    watch_word: str | None = None
    regeneration_times: list[int] = field(default_factory=list)
    regeneration_sound: bool | None = None
    top_bin_histogram: dict[str, int] = field(default_factory=dict)
    regeneration_top_bins: dict[str, int] = field(default_factory=dict)
    regenerative_front_speed: dict | None = None
    trace: list[tuple[int, int, str]] = field(default_factory=list)
    tv_distance_series: list[dict] | None = None

    @property
    def front_speed(self) -> Fraction:
        return Fraction(self.bins_created, self.steps)

    def to_json(self) -> dict:
        return {
            "steps": self.steps,
            "seed": self.seed,
            "distribution": self.distribution,
            "initial": self.initial,
            "binsCreated": self.bins_created,
            "frontSpeedEstimate": float(self.front_speed),
            "depth": self.depth,
            "burnIn": self.burn_in,
            "watchWord": self.watch_word,
            "regenerationCount": len(self.regeneration_times),
            "regenerationTimes": self.regeneration_times,
            "regenerationSound": self.regeneration_sound,
            "regenerativeFrontSpeed": self.regenerative_front_speed,
            "topBinHistogram": self.top_bin_histogram,
            "regenerationTopBins": self.regeneration_top_bins,
            "tvDistanceSeries": self.tv_distance_series,
        }


def _regenerative_speed(times: list[int], created: list[int]) -> dict | None:
    """Ratio estimator of front speed over complete regeneration cycles."""
    if len(times) < 3:
        return None
    tau = np.diff(np.array(times, dtype=np.float64))
    y = np.diff(np.array(created, dtype=np.float64))
    n = len(tau)
    est = y.sum() / tau.sum()
    resid = y - est * tau
    stderr = math.sqrt(float(resid @ resid) / (n - 1) / n) / float(tau.mean())
    return {"estimate": float(est), "stderr": stderr, "cycles": n}


def run_chain(
    initial: LazyInfiniteConfiguration,
    dist: DistributionSpec,
    steps: int,
    seed: int,
    watch: MoveWord | CouplingPlan | None = None,
    depth: int = 1,
    burn_in: int | None = None,
    trace_every: int | None = None,
) -> SimulationReport:
    """Run one chain for ``steps`` moves and summarise it."""
    if steps < 1:
        raise InvalidDistribution("steps must be >= 1")
    if depth < 1:
        raise InvalidDistribution("depth must be >= 1")
    plan = watch if isinstance(watch, CouplingPlan) else None
    word = plan.word if plan is not None else watch
    word_arr = word.expanded() if word is not None and word.length else None
    radix = _radix(initial, dist, depth)
    burn = default_burn_in(dist) if burn_in is None else burn_in
    burn = min(burn, steps // 2)

    rng = _make_rng(seed)
    chain = initial.to_chain()
    shift0 = chain.shift
    carry = np.empty(0, dtype=np.int64)
    hist: dict[int, int] = {}
    regen_hist: dict[int, int] = {}
    regen_times: list[int] = []
    regen_created: list[int] = []
    sound = True if plan is not None else None
    trace: list[tuple[int, int, str]] = []
    if trace_every:
        trace.append((0, 0, str(_decode_key(chain.top_key(depth, radix), depth, radix))))

    done = 0
    while done < steps:
        n = min(CHUNK, steps - done)
        xis = dist.sample(rng, n)
        stops: set[int] = set()
        fire: set[int] = set()
        if word_arr is not None:
            hits, carry = _word_ends(carry, xis, word_arr)
            fire = set(hits.tolist())
            stops |= fire
        if trace_every:
            first = (-done) % trace_every or trace_every
            stops |= set(range(first - 1, n, trace_every))
        keys = np.empty(n, dtype=np.int64)
        pos = 0
        for e in sorted(stops):
            chain.run(xis[pos:e + 1], keys[pos:e + 1], depth, radix)
            pos = e + 1
            t = done + e + 1
            if e in fire:
                regen_times.append(t)
                regen_created.append(chain.shift - shift0)
                k = chain.top_key(depth, radix)
                regen_hist[k] = regen_hist.get(k, 0) + 1
                if plan is not None and tuple(chain.project(plan.target.total)) != plan.target.bins:
                    sound = False
            if trace_every and t % trace_every == 0:
                trace.append((t, chain.shift - shift0, str(_decode_key(chain.top_key(depth, radix), depth, radix))))
        chain.run(xis[pos:], keys[pos:], depth, radix)
        lo = max(0, burn - done)
        if lo < n:
            _merge_counts(hist, keys[lo:])
        done += n

    return SimulationReport(
        steps=steps,
        seed=seed,
        distribution=str(dist),
        initial=str(initial),
        bins_created=chain.shift - shift0,
        depth=depth,
        burn_in=burn,
        watch_word=str(word) if word is not None else None,
        regeneration_times=regen_times,
        regeneration_sound=sound,
        top_bin_histogram=_hist_json(hist, depth, radix),
        regeneration_top_bins=_hist_json(regen_hist, depth, radix),
        regenerative_front_speed=_regenerative_speed(regen_times, regen_created),
        trace=trace,
    )


def detect_period(initial: LazyInfiniteConfiguration, c: int, max_steps: int = 10_000,
                  depth: int | None = None) -> tuple[int, int] | None:
    """Preperiod and period of the top-``depth`` bin vector under moves of type ``c`` only.

    Moves of type ``c`` read and write only the rightmost ``c`` bins, so that
    vector evolves on its own and its first repeat marks the cycle.
    """
    depth = c if depth is None else depth
    dist = DistributionSpec.deterministic(c)
    radix = _radix(initial, dist, depth)
    chain = initial.to_chain()
    keys = np.empty(max_steps, dtype=np.int64)
    chain.run(np.full(max_steps, c, dtype=np.int64), keys, depth, radix)
    seen = {initial.to_chain().top_key(depth, radix): 0}
    for i, k in enumerate(keys.tolist(), start=1):
        if k in seen:
            return seen[k], i - seen[k]
        seen[k] = i
    return None


# ---------------------------------------------------------------------------
# two chains on shared noise


@dataclass
class CouplingReport:
    steps: int
    seed: int
    distribution: str
    initial_a: str
    initial_b: str
    projection: int
    agreement_time: int | None
    violations: int
    watch_word: str | None
    first_watch_end: int | None
    watch_occurrences: int
    watch_positions: int
    bins_created_a: int
    bins_created_b: int
    tv_distance_series: list[dict] | None = None

    @property
    def persistent(self) -> bool:
        return self.agreement_time is not None and self.violations == 0

    def to_json(self) -> dict:
        return {
            "steps": self.steps,
            "seed": self.seed,
            "distribution": self.distribution,
            "initialA": self.initial_a,
            "initialB": self.initial_b,
            "projection": self.projection,
            "agreementTime": self.agreement_time,
            "violations": self.violations,
            "persistent": self.persistent,
            "watchWord": self.watch_word,
            "firstWatchEnd": self.first_watch_end,
            "watchOccurrences": self.watch_occurrences,
            "watchPositions": self.watch_positions,
            "frontSpeedEstimateA": self.bins_created_a / self.steps,
            "frontSpeedEstimateB": self.bins_created_b / self.steps,
            "tvDistanceSeries": self.tv_distance_series,
        }


def _tv(counts_a: dict, counts_b: dict) -> float:
    na = sum(counts_a.values())
    nb = sum(counts_b.values())
    keys = set(counts_a) | set(counts_b)
    return 0.5 * sum(abs(counts_a.get(k, 0) / na - counts_b.get(k, 0) / nb) for k in keys)


def _checkpoints(steps: int) -> list[int]:
    pts = []
    t = 10
    while t < steps:
        pts.append(t)
        t *= 10
    pts.append(steps)
    return pts


def run_two_chain_coupling(
    initial_a: LazyInfiniteConfiguration,
    initial_b: LazyInfiniteConfiguration,
    dist: DistributionSpec,
    steps: int,
    seed: int,
    watch: MoveWord | CouplingPlan | None = None,
    depth: int = 1,
    replicas: int = 0,
    checkpoints: Sequence[int] | None = None,
    threads: int | None = None,
) -> CouplingReport:
    """Drive two chains with the same moves and time the agreement of their projections.

    The projection size is the largest move type in the support: once the
    two projections of that size agree they agree forever. With
    ``replicas > 0`` a TV-distance series between the two chains' top-bin
    vectors is estimated over independent seeds.
    """
    if steps < 1:
        raise InvalidDistribution("steps must be >= 1")
    L = dist.support_max
    word = watch.word if isinstance(watch, CouplingPlan) else watch
    word_arr = word.expanded() if word is not None and word.length else None

    rng = _make_rng(seed)
    a, b = initial_a.to_chain(), initial_b.to_chain()
    sa, sb = a.shift, b.shift
    agreed = bool(kernels.projections_agree(a, b, L))
    agreement = 0 if agreed else None
    violations = 0
    carry = np.empty(0, dtype=np.int64)
    first_end = None
    occurrences = 0
    done = 0
    while done < steps:
        n = min(CHUNK, steps - done)
        xis = dist.sample(rng, n)
        if word_arr is not None:
            hits, carry = _word_ends(carry, xis, word_arr)
            occurrences += len(hits)
            if first_end is None and len(hits):
                first_end = done + int(hits[0]) + 1
        first, viol = kernels.pair_run(a, b, xis, L, agreed)
        if first >= 0:
            agreed = True
            agreement = done + first + 1
        violations += viol
        done += n

    series = None
    if replicas > 0:
        series = _tv_series(initial_a, initial_b, dist, seed, depth, replicas,
                            list(checkpoints) if checkpoints else _checkpoints(steps), threads)
    m = len(word_arr) if word_arr is not None else 0
    return CouplingReport(
        steps=steps,
        seed=seed,
        distribution=str(dist),
        initial_a=str(initial_a),
        initial_b=str(initial_b),
        projection=L,
        agreement_time=agreement,
        violations=violations,
        watch_word=str(word) if word is not None else None,
        first_watch_end=first_end,
        watch_occurrences=occurrences,
        watch_positions=max(0, steps - m + 1) if m else 0,
        bins_created_a=a.shift - sa,
        bins_created_b=b.shift - sb,
        tv_distance_series=series,
    )


def _tv_series(initial_a, initial_b, dist, seed, depth, replicas, checkpoints, threads):
    L = dist.support_max
    radix = max(_radix(initial_a, dist, depth), _radix(initial_b, dist, depth))
    children = np.random.SeedSequence(seed).spawn(replicas)

    def one(child):
        rng = _make_rng(child)
        a, b = initial_a.to_chain(), initial_b.to_chain()
        agreed = bool(kernels.projections_agree(a, b, L))
        out = []
        done = 0
        for cp in checkpoints:
            while done < cp:
                n = min(CHUNK, cp - done)
                first, _ = kernels.pair_run(a, b, dist.sample(rng, n), L, agreed)
                agreed = agreed or first >= 0
                done += n
            out.append((a.top_key(depth, radix), b.top_key(depth, radix), agreed))
        return out

    per_rep = map_ordered(one, children, threads)
    series = []
    for i, cp in enumerate(checkpoints):
        ca: dict[int, int] = {}
        cb: dict[int, int] = {}
        uncoupled = 0
        for rep in per_rep:
            ka, kb, ok = rep[i]
            ca[ka] = ca.get(ka, 0) + 1
            cb[kb] = cb.get(kb, 0) + 1
            uncoupled += not ok
        series.append({"step": cp, "tv": _tv(ca, cb), "uncoupledFraction": uncoupled / replicas})
    return series


# ---------------------------------------------------------------------------
# stationary estimate


@dataclass
class StationaryEstimate:
    distribution: str
    depth: int
    replicas: int
    steps: int
    seed: int
    initials: list[str]
    histograms: list[dict[str, int]]
    pairwise: list[dict]

    @property
    def converged(self) -> bool:
        return all(not p["flag"] for p in self.pairwise)

    def to_json(self) -> dict:
        return {
            "distribution": self.distribution,
            "depth": self.depth,
            "replicas": self.replicas,
            "steps": self.steps,
            "seed": self.seed,
            "initials": self.initials,
            "histograms": self.histograms,
            "pairwise": self.pairwise,
            "converged": self.converged,
        }


def tv_noise_floor(counts_a: dict, counts_b: dict, rng: np.random.Generator, draws: int = 400) -> tuple[float, float]:
    """Mean and standard deviation of the TV statistic when both samples share one law.

    The shared law is the pooled empirical distribution; both sample sizes
    are kept.
    """
    na = sum(counts_a.values())
    nb = sum(counts_b.values())
    keys = sorted(set(counts_a) | set(counts_b))
    pooled = np.array([counts_a.get(k, 0) + counts_b.get(k, 0) for k in keys], dtype=np.float64)
    pooled /= pooled.sum()
    xa = rng.multinomial(na, pooled, size=draws) / na
    xb = rng.multinomial(nb, pooled, size=draws) / nb
    tv = 0.5 * np.abs(xa - xb).sum(axis=1)
    return float(tv.mean()), float(tv.std(ddof=1)) if draws > 1 else 0.0


def estimate_stationary(
    dist: DistributionSpec,
    depth: int,
    replicas: int,
    steps: int,
    seed_base: int,
    initials: Sequence[LazyInfiniteConfiguration] | None = None,
    threads: int | None = None,
    noise_draws: int = 400,
) -> StationaryEstimate:
    """Empirical law of the top ``depth`` bins at ``steps``, per initial configuration.

    A pair of initials is flagged when its TV distance exceeds the mean plus
    three standard deviations of the TV statistic under a common law.
    """
    if dist.is_deterministic:
        raise InvalidDistribution("the move type must not be constant for a limiting law to exist")
    if depth < 1 or replicas < 1 or steps < 1:
        raise InvalidDistribution("depth, replicas and steps must be >= 1")
    if initials is None:
        initials = [LazyInfiniteConfiguration(1), LazyInfiniteConfiguration(dist.support_max + 1)]
    radix = max(_radix(x, dist, depth) for x in initials)
    seq = np.random.SeedSequence(seed_base)
    children = seq.spawn(len(initials) * replicas + 1)
    noise_rng = _make_rng(children[-1])

    def one(job):
        init, child = job
        rng = _make_rng(child)
        chain = init.to_chain()
        done = 0
        while done < steps:
            n = min(CHUNK, steps - done)
            chain.run(dist.sample(rng, n))
            done += n
        return chain.top_key(depth, radix)

    jobs = [(init, children[i * replicas + r]) for i, init in enumerate(initials) for r in range(replicas)]
    keys = map_ordered(one, jobs, threads)
    counts = []
    for i in range(len(initials)):
        c: dict[int, int] = {}
        for k in keys[i * replicas:(i + 1) * replicas]:
            c[k] = c.get(k, 0) + 1
        counts.append(c)
    pairwise = []
    for i in range(len(initials)):
        for j in range(i + 1, len(initials)):
            tv = _tv(counts[i], counts[j])
            mean, sd = tv_noise_floor(counts[i], counts[j], noise_rng, noise_draws)
            floor = mean + 3 * sd
            pairwise.append({
                "a": i, "b": j, "tv": tv, "noiseMean": mean, "noiseSd": sd,
                "noiseFloor": floor, "flag": tv > floor, "degenerate": replicas < 2,
                "sharedSupport": bool(set(counts[i]) & set(counts[j])),
            })
    return StationaryEstimate(
        distribution=str(dist),
        depth=depth,
        replicas=replicas,
        steps=steps,
        seed=seed_base,
        initials=[str(x) for x in initials],
        histograms=[_hist_json(c, depth, radix) for c in counts],
        pairwise=pairwise,
    )


def parse_initial(text: str) -> LazyInfiniteConfiguration:
    return parse_lazy(text)

