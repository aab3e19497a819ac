"""Configurations of balls in bins, moves, projections and move words.

Bins are listed left to right and the last entry is the rightmost bin
(label 0). A finite configuration with ``n`` balls is an *n-configuration*;
empty bins on the left are never stored.

Move words are run-length encoded and applied **first run first**. The
usual compositional notation reads right to left, so the algorithm written
``phi_5^3 phi_2`` (apply ``phi_2`` first) is the word ``"2 5^3"`` here.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from ._backend import kernels
from .errors import MoveTooLarge, ParseError, ProjectionTooLarge


@dataclass(frozen=True)
class Configuration:
    """An n-configuration: positive bin counts, rightmost bin last."""

    bins: tuple[int, ...]
    total: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        bins = tuple(int(b) for b in self.bins)
        if not bins:
            raise ValueError("a configuration needs at least one bin")
        if any(b < 1 for b in bins):
            raise ValueError(f"bin counts must be positive: {bins}")
        object.__setattr__(self, "bins", bins)
        object.__setattr__(self, "total", sum(bins))

    @classmethod
    def parse(cls, text: str) -> "Configuration":
        return parse_configuration(text)

    @property
    def rightmost(self) -> int:
        return self.bins[-1]

    def __len__(self):
        return len(self.bins)

    def __str__(self):
        return "[" + ",".join(map(str, self.bins)) + "]"


@dataclass(frozen=True, eq=False)
class LazyInfiniteConfiguration:
    """An infinite configuration stored as a constant ``base`` plus a window.

    Bin at depth ``j`` (``j = 0`` is the rightmost bin) holds ``window[-1-j]``
    when ``j < len(window)`` and ``base`` otherwise. ``shift`` counts bins
    created since construction. Equality is semantic: leading window entries
    equal to ``base`` are ignored.
    """

    base: int
    window: tuple[int, ...] = ()
    shift: int = 0

    def __post_init__(self):
        window = tuple(int(v) for v in self.window)
        if self.base < 1 or any(v < 1 for v in window):
            raise ValueError("bin counts must be positive")
        if self.shift < 0:
            raise ValueError("shift must be nonnegative")
        object.__setattr__(self, "window", window)

    def bin(self, depth: int) -> int:
        if depth < 0:
            raise IndexError(depth)
        if depth < len(self.window):
            return self.window[-1 - depth]
        return self.base

    def normalized(self) -> "LazyInfiniteConfiguration":
        w = self.window
        i = 0
        while i < len(w) and w[i] == self.base:
            i += 1
        return LazyInfiniteConfiguration(self.base, w[i:], self.shift)

    def _key(self):
        n = self.normalized()
        return (n.base, n.window, n.shift)

    def __eq__(self, other):
        if not isinstance(other, LazyInfiniteConfiguration):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __str__(self):
        return f"base:{self.base}" + ("[" + ",".join(map(str, self.window)) + "]" if self.window else "")

    def to_chain(self):
        return kernels.LazyChain(self.base, self.window, self.shift)

    @classmethod
    def from_chain(cls, chain) -> "LazyInfiniteConfiguration":
        return cls(int(chain.base), tuple(int(v) for v in chain.window()), int(chain.shift))


_TERM = re.compile(r"^([0-9]+)(?:\^([0-9]+))?$")


@dataclass(frozen=True)
class MoveWord:
    """Run-length encoded move sequence, applied first run first."""

    runs: tuple[tuple[int, int], ...] = ()
    length: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        runs = tuple((int(t), int(r)) for t, r in self.runs)
        for t, r in runs:
            if t < 1 or r < 1:
                raise ValueError(f"bad run {t}^{r}: move type and repeat must be >= 1")
        object.__setattr__(self, "runs", runs)
        object.__setattr__(self, "length", sum(r for _, r in runs))

    @classmethod
    def parse(cls, text: str) -> "MoveWord":
        return parse_word(text)

    @classmethod
    def repeat(cls, move: int, times: int) -> "MoveWord":
        return cls(((move, times),)) if times > 0 else cls()

    @classmethod
    def from_moves(cls, moves: Iterable[int]) -> "MoveWord":
        runs: list[list[int]] = []
        for m in moves:
            if runs and runs[-1][0] == m:
                runs[-1][1] += 1
            else:
                runs.append([m, 1])
        return cls(tuple((t, r) for t, r in runs))

    def __add__(self, other: "MoveWord") -> "MoveWord":
        return MoveWord(self.runs + other.runs)

    def __mul__(self, times: int) -> "MoveWord":
        return MoveWord(self.runs * times)

    def moves(self) -> list[int]:
        return [t for t, r in self.runs for _ in range(r)]

    def merged(self) -> "MoveWord":
        """Same moves with adjacent equal runs joined."""
        return MoveWord.from_moves(self.moves())

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        types = np.array([t for t, _ in self.runs], dtype=np.int64)
        reps = np.array([r for _, r in self.runs], dtype=np.int64)
        return types, reps

    def expanded(self) -> np.ndarray:
        types, reps = self.arrays()
        return np.repeat(types, reps)

    @property
    def max_type(self) -> int:
        return max((t for t, _ in self.runs), default=0)

    def __str__(self):
        return " ".join(f"{t}^{r}" for t, r in self.runs)


def parse_configuration(text: str) -> Configuration:
    s = text.strip()
    if not (s.startswith("[") and s.endswith("]")):
        raise ParseError(f"configuration must look like [2,2,1], got {text!r}")
    body = s[1:-1].strip()
    if not body:
        raise ParseError("empty configuration")
    try:
        bins = [int(p) for p in body.split(",")]
    except ValueError:
        raise ParseError(f"non-integer bin in {text!r}") from None
    if any(b < 1 for b in bins):
        raise ParseError(f"bin counts must be positive in {text!r}")
    return Configuration(tuple(bins))


def parse_word(text: str) -> MoveWord:
    runs = []
    for term in text.split():
        m = _TERM.match(term)
        if not m:
            raise ParseError(f"bad word term {term!r}; expected INT or INT^INT")
        t = int(m.group(1))
        r = int(m.group(2)) if m.group(2) is not None else 1
        if t < 1 or r < 1:
            raise ParseError(f"move type and repeat must be >= 1 in {term!r}")
        runs.append((t, r))
    return MoveWord(tuple(runs))


def parse_lazy(text: str) -> LazyInfiniteConfiguration:
    """Parse ``base:B`` or ``base:B[w1,...,wm]``."""
    m = re.fullmatch(r"\s*base:([0-9]+)\s*(\[[0-9,\s]*\])?\s*", text)
    if not m:
        raise ParseError(f"infinite configuration must look like base:2 or base:2[2,1], got {text!r}")
    base = int(m.group(1))
    if base < 1:
        raise ParseError("base must be positive")
    window: tuple[int, ...] = ()
    if m.group(2) and m.group(2)[1:-1].strip():
        window = parse_configuration(m.group(2)).bins
    return LazyInfiniteConfiguration(base, window)


def _move_inplace(bins: deque, k: int) -> None:
    acc = 0
    j = len(bins) - 1
    while True:
        acc += bins[j]
        if acc >= k:
            break
        j -= 1
    if j == len(bins) - 1:
        bins.append(1)
    else:
        bins[j + 1] += 1
    bins[0] -= 1
    if bins[0] == 0:
        bins.popleft()


def apply_move(config: Configuration, k: int) -> Configuration:
    """Move of type ``k`` on a finite configuration; the ball count is preserved."""
    if k < 1 or k > config.total:
        raise MoveTooLarge(f"move type {k} on a configuration with {config.total} balls")
    bins = deque(config.bins)
    _move_inplace(bins, k)
    return Configuration(tuple(bins))


def apply_move_infinite(config: LazyInfiniteConfiguration, k: int) -> LazyInfiniteConfiguration:
    """Move of type ``k`` on an infinite configuration (one ball is added)."""
    if k < 1:
        raise MoveTooLarge(f"move type must be positive, got {k}")
    w = list(config.window)
    acc = 0
    j = len(w) - 1
    while j >= 0:
        acc += w[j]
        if acc >= k:
            break
        j -= 1
    if j >= 0:
        if j == len(w) - 1:
            return LazyInfiniteConfiguration(config.base, (*w, 1), config.shift + 1)
        w[j + 1] += 1
        return LazyInfiniteConfiguration(config.base, tuple(w), config.shift)
    # k-th ball is q bins left of the window, inside the constant region
    q = -(-(k - acc) // config.base) - 1
    if q == 0:
        if not w:
            return LazyInfiniteConfiguration(config.base, (1,), config.shift + 1)
        w[0] += 1
        return LazyInfiniteConfiguration(config.base, tuple(w), config.shift)
    w = [config.base] * q + w
    w[0] += 1
    return LazyInfiniteConfiguration(config.base, tuple(w), config.shift)


AnyConfiguration = Union[Configuration, LazyInfiniteConfiguration]


def project(config: AnyConfiguration, n: int) -> Configuration:
    """Keep the rightmost ``n`` balls."""
    if n < 1:
        raise ProjectionTooLarge(f"projection size must be positive, got {n}")
    if isinstance(config, Configuration):
        if n > config.total:
            raise ProjectionTooLarge(f"cannot keep {n} balls of {config.total}")
        get = lambda d: config.bins[-1 - d]  # noqa: E731
    else:
        get = config.bin
    out = []
    rem = n
    d = 0
    while rem > 0:
        v = min(get(d), rem)
        out.append(v)
        rem -= v
        d += 1
    out.reverse()
    return Configuration(tuple(out))


def apply_word(config: AnyConfiguration, word: MoveWord) -> AnyConfiguration:
    """Fold the moves of ``word`` over ``config`` in application order."""
    if isinstance(config, Configuration):
        if word.max_type > config.total:
            raise MoveTooLarge(f"word uses move type {word.max_type} on {config.total} balls")
        bins = deque(config.bins)
        for t, r in word.runs:
            for _ in range(r):
                _move_inplace(bins, t)
        return Configuration(tuple(bins))
    chain = config.to_chain()
    if word.length:
        chain.run(word.expanded())
    return LazyInfiniteConfiguration.from_chain(chain)


def apply_moves(config: AnyConfiguration, moves: Sequence[int]) -> AnyConfiguration:
    return apply_word(config, MoveWord.from_moves(moves))
