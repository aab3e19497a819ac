"""Explicit coupling words built from two move types k < l.

For ``l = k*d + r`` with ``1 <= r <= k`` the construction uses

* ``X_0, ..., X_{k-1}``: the k l-configurations cycled by ``phi_k``,
* ``psi1 = k^M`` with ``M = max(l, k(k-1)/2)``, which sends every
  l-configuration into the X family,
* ``psi = k^(k-r) l^(dr + k d(d-1)/2) k^(l-k)``, which maps ``X_i`` to
  ``X_f(i)`` with ``f(i) < i`` for ``i >= 1``.

Applying psi1 then psi ``k-1`` times sends every l-configuration to ``X_0``.
Appending ``N - l`` moves of type ``l`` extends the coupling to N balls.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import (
    Configuration,
    LazyInfiniteConfiguration,
    MoveWord,
    apply_word,
    project,
)
from .errors import IndexOutOfRange, InvalidParams


@dataclass(frozen=True)
class CouplingParams:
    k: int
    l: int
    d: int
    r: int
    M: int


def derive_params(k: int, l: int) -> CouplingParams:
    if k < 2 or k >= l:
        raise InvalidParams(f"need 2 <= k < l, got k={k}, l={l}")
    d, r = divmod(l, k)
    if r == 0:
        d, r = d - 1, k
    return CouplingParams(k, l, d, r, max(l, k * (k - 1) // 2))


def make_X(params: CouplingParams, i: int) -> Configuration:
    k, d, r = params.k, params.d, params.r
    if not 0 <= i <= k - 1:
        raise IndexOutOfRange(f"X index {i} outside [0, {k - 1}]")
    if i == 0:
        bins = [k] * d + [r]
    elif i <= r - 1:
        bins = [i] + [k] * d + [r - i]
    else:
        bins = [i] + [k] * (d - 1) + [k + r - i]
    return Configuration(tuple(bins))


def make_Y(l: int, j: int) -> Configuration:
    if not 0 <= j <= l - 1:
        raise IndexOutOfRange(f"Y index {j} outside [0, {l - 1}]")
    return Configuration((l,) if j == 0 else (j, l - j))


def f_map(params: CouplingParams, i: int) -> int:
    k, l, d, r = params.k, params.l, params.d, params.r
    if not 0 <= i <= k - 1:
        raise IndexOutOfRange(f"f argument {i} outside [0, {k - 1}]")
    if i <= k - r - 1:
        return max(k - l + d * i, 0)
    return max(k - (d + 1) * (k - i), 0)


def psi_l_exponent(params: CouplingParams) -> int:
    d, r, k = params.d, params.r, params.k
    return d * r + k * d * (d - 1) // 2


def build_psi1(params: CouplingParams) -> MoveWord:
    return MoveWord.repeat(params.k, params.M)


def build_psi(params: CouplingParams) -> MoveWord:
    k, l, r = params.k, params.l, params.r
    return MoveWord.repeat(k, k - r) + MoveWord.repeat(l, psi_l_exponent(params)) + MoveWord.repeat(k, l - k)


@dataclass(frozen=True)
class CouplingPlan:
    """Coupling word for the first N balls and its length bookkeeping.

    ``target`` is the projection every input is driven to: for ``k >= 2`` it
    is ``X_0`` when ``N <= l`` and the N-ball projection when ``N > l``; for
    ``k = 1`` it is N single-ball bins.
    """

    k: int
    l: int
    N: int
    params: CouplingParams | None
    word: MoveWord
    psi1_len: int
    psi_len: int
    tail_len: int
    target: Configuration

    @property
    def bound(self) -> int:
        return self.N + 4 * self.l * self.l

    @property
    def length(self) -> int:
        return self.word.length

    @property
    def coupled_balls(self) -> int:
        return self.target.total

    @property
    def prefix(self) -> MoveWord:
        """The word without the tail of ``l`` moves."""
        if self.tail_len == 0:
            return self.word
        return MoveWord(self.word.runs[:-1])

    def to_json(self) -> dict:
        p = self.params
        return {
            "k": self.k,
            "l": self.l,
            "N": self.N,
            "d": p.d if p else None,
            "r": p.r if p else None,
            "M": p.M if p else None,
            "word": str(self.word),
            "length": self.length,
            "bound": self.bound,
            "target": str(self.target),
        }


def build_coupling_plan(k: int, l: int, N: int) -> CouplingPlan:
    if N < 1:
        raise InvalidParams(f"N must be >= 1, got {N}")
    if k < 1 or k >= l:
        raise InvalidParams(f"need 1 <= k < l, got k={k}, l={l}")
    if k == 1:
        return CouplingPlan(1, l, N, None, MoveWord.repeat(1, N), 0, 0, N, Configuration((1,) * N))
    params = derive_params(k, l)
    psi1 = build_psi1(params)
    psi = build_psi(params)
    tail_len = max(0, N - l)
    word = psi1 + psi * (k - 1) + MoveWord.repeat(l, tail_len)
    x0 = make_X(params, 0)
    if tail_len == 0:
        target = x0
    else:
        # any infinite configuration works once the word couples N balls
        reached = apply_word(LazyInfiniteConfiguration(1), word)
        target = project(reached, N)
    return CouplingPlan(k, l, N, params, word, psi1.length, psi.length, tail_len, target)


@dataclass(frozen=True)
class LengthAccounting:
    L_actual: int
    L_paper_formula: int
    bound: int
    derivation_bound: int
    prefix_len: int

    @property
    def within_bound(self) -> bool:
        return self.L_actual < self.bound


def printed_length_formula(params: CouplingParams) -> int:
    """Reference closed form for the prefix length, using d(d+1)/2. Reported next to the real length."""
    k, l, d, r = params.k, params.l, params.d, params.r
    return max(l, k * (k - 1) // 2) + (k - 1) * (k - r + d * r + k * d * (d + 1) // 2 + l - k)


def plan_length_accounting(plan: CouplingPlan) -> LengthAccounting:
    if plan.params is None:
        raise InvalidParams("length accounting needs k >= 2")
    acc = LengthAccounting(
        L_actual=plan.length,
        L_paper_formula=printed_length_formula(plan.params),
        bound=plan.bound,
        derivation_bound=max(plan.N, plan.l) + 4 * plan.l * plan.l,
        prefix_len=plan.length - plan.tail_len,
    )
    if not acc.within_bound:
        raise RuntimeError(f"plan length {acc.L_actual} >= bound {acc.bound}")
    return acc
