"""The l-configuration dynamics as a DFA, and synchronizing-word search.

States are all l-configurations indexed by gap bitmask (see
:mod:`infinite_bins.oracle`); letters are move types in ``[1, l]``. A word
that sends every state to one state couples the first l balls.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .config import Configuration, MoveWord
from .errors import LetterTooLarge, NotSynchronizable, SubsetSpaceTooLarge
from .oracle import apply_to_universe, check_universe, config_from_mask

EXACT_MAX_STATES = 20
GREEDY_MAX_STATES = 1 << 11  # l <= 12


@dataclass(frozen=True, eq=False)
class BinAutomaton:
    l: int
    alphabet: tuple[int, ...]
    delta: np.ndarray  # (n_states, n_letters) -> state index

    @property
    def n_states(self) -> int:
        return self.delta.shape[0]

    def state(self, index: int) -> Configuration:
        return config_from_mask(index, self.l)

    @property
    def states(self) -> list[Configuration]:
        return [self.state(i) for i in range(self.n_states)]


def build_automaton(l: int, alphabet: Sequence[int], threads: int | None = None) -> BinAutomaton:
    check_universe(l)
    letters = tuple(sorted(set(int(a) for a in alphabet)))
    if not letters:
        raise ValueError("alphabet must be nonempty")
    for a in letters:
        if a < 1 or a > l:
            raise LetterTooLarge(f"letter {a} outside [1, {l}]")
    cols = [apply_to_universe(l, MoveWord.repeat(a, 1), threads) for a in letters]
    return BinAutomaton(l, letters, np.stack(cols, axis=1))


@dataclass(frozen=True)
class SyncResult:
    l: int
    alphabet: tuple[int, ...]
    word: MoveWord
    terminal: Configuration
    method: str
    is_optimal: bool
    probability: float | None = None

    @property
    def length(self) -> int:
        return self.word.length

    def to_json(self) -> dict:
        out = {
            "l": self.l,
            "alphabet": list(self.alphabet),
            "method": self.method,
            "word": str(self.word),
            "length": self.length,
            "terminal": str(self.terminal),
            "optimal": self.is_optimal,
        }
        if self.probability is not None:
            out["probability"] = self.probability
            out["probability_per_length"] = self.probability / self.length if self.length else None
        return out


def word_probability(word: MoveWord, probs: Mapping[int, float]) -> float:
    """Probability that i.i.d. moves spell out ``word`` at a given position."""
    p = 1.0
    for t, r in word.runs:
        p *= probs.get(t, 0.0) ** r
    return p


def synchronized_state(aut: BinAutomaton, word: MoveWord) -> Configuration | None:
    """The common image of all states under ``word``, or None if it does not synchronize."""
    if word.max_type > aut.l:
        raise LetterTooLarge(f"letter {word.max_type} outside [1, {aut.l}]")
    if word.length == 0:
        return aut.state(0) if aut.n_states == 1 else None
    out = apply_to_universe(aut.l, word)
    first = int(out[0])
    if (out != first).any():
        return None
    return config_from_mask(first, aut.l)


def _validated(aut: BinAutomaton, word: MoveWord, method: str, optimal: bool) -> SyncResult:
    terminal = synchronized_state(aut, word)
    if terminal is None:
        raise AssertionError(f"{method} search produced a non-synchronizing word {word}")
    return SyncResult(aut.l, aut.alphabet, word, terminal, method, optimal)


def _image_tables(aut: BinAutomaton) -> list[list[list[int]]]:
    n = aut.n_states
    nchunks = (n + 7) // 8
    tables = []
    for a in range(len(aut.alphabet)):
        col = aut.delta[:, a]
        per_letter = []
        for c in range(nchunks):
            row = [0] * 256
            for byte in range(256):
                img = 0
                for bit in range(8):
                    s = 8 * c + bit
                    if byte >> bit & 1 and s < n:
                        img |= 1 << int(col[s])
                row[byte] = img
            per_letter.append(row)
        tables.append(per_letter)
    return tables


def shortest_sync_exact(aut: BinAutomaton, max_states: int = EXACT_MAX_STATES) -> SyncResult:
    """Breadth-first search over subsets from the full state set.

    Letters are tried in ascending order, so the result is the
    lexicographically smallest among the shortest synchronizing words.
    """
    n = aut.n_states
    if n > max_states:
        raise SubsetSpaceTooLarge(
            f"{n} states exceeds the exact-search cap of {max_states}; use the greedy search"
        )
    if n == 1:
        return _validated(aut, MoveWord(), "exact", True)
    tables = _image_tables(aut)
    nchunks = (n + 7) // 8
    full = (1 << n) - 1
    parent: dict[int, tuple[int, int]] = {full: (-1, -1)}
    queue = deque([full])
    found = None
    while queue and found is None:
        s = queue.popleft()
        for a, per_letter in enumerate(tables):
            img = 0
            for c in range(nchunks):
                img |= per_letter[c][(s >> (8 * c)) & 0xFF]
            if img in parent:
                continue
            parent[img] = (s, a)
            if img & (img - 1) == 0:
                found = img
                break
            queue.append(img)
    if found is None:
        raise NotSynchronizable(f"no synchronizing word over {aut.alphabet} for l={aut.l}")
    letters = []
    s = found
    while parent[s][0] != -1:
        s, a = parent[s]
        letters.append(aut.alphabet[a])
    letters.reverse()
    return _validated(aut, MoveWord.from_moves(letters), "exact", True)


def _pair_merge_table(aut: BinAutomaton) -> tuple[np.ndarray, np.ndarray]:
    """Backward BFS from the diagonal of the pair automaton.

    Returns ``dist[a, b]`` (shortest merging word length, -1 if none) and
    ``choice[a, b]`` (letter index to play first on that word).
    """
    n = aut.n_states
    dist = np.full((n, n), -1, dtype=np.int32)
    choice = np.full((n, n), -1, dtype=np.int16)
    idx = np.arange(n)
    dist[idx, idx] = 0
    frontier = np.zeros((n, n), dtype=bool)
    frontier[idx, idx] = True
    level = 0
    while frontier.any():
        level += 1
        newly = np.zeros((n, n), dtype=bool)
        for a in range(len(aut.alphabet)):
            col = aut.delta[:, a]
            cand = frontier[col[:, None], col[None, :]] & (dist < 0) & ~newly
            choice[cand] = a
            newly |= cand
        dist[newly] = level
        frontier = newly
    return dist, choice


def greedy_sync(aut: BinAutomaton, max_states: int = GREEDY_MAX_STATES) -> SyncResult:
    """Repeatedly merge the closest pair of the current image set."""
    n = aut.n_states
    if n > max_states:
        raise SubsetSpaceTooLarge(f"{n} states exceeds the pair-search cap of {max_states}")
    if n == 1:
        return _validated(aut, MoveWord(), "greedy", False)
    dist, choice = _pair_merge_table(aut)
    cur = np.arange(n)
    letters: list[int] = []
    while cur.size > 1:
        sub = dist[np.ix_(cur, cur)].astype(np.int64)
        np.fill_diagonal(sub, np.iinfo(np.int64).max)
        if (sub < 0).any():
            i, j = np.argwhere(sub < 0)[0]
            raise NotSynchronizable(
                f"states {aut.state(int(cur[i]))} and {aut.state(int(cur[j]))} cannot be merged"
            )
        i, j = np.unravel_index(int(np.argmin(sub)), sub.shape)
        a, b = int(cur[i]), int(cur[j])
        merge = []
        while a != b:
            x = int(choice[a, b])
            merge.append(x)
            a, b = int(aut.delta[a, x]), int(aut.delta[b, x])
        for x in merge:
            cur = np.unique(aut.delta[cur, x])
        letters.extend(aut.alphabet[x] for x in merge)
    return _validated(aut, MoveWord.from_moves(letters), "greedy", False)
