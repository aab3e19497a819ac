"""Pure-Python versions of the compiled kernels in ``_kernels.pyx``.

Same names, same signatures, same results. Used when the extension is not
built or when ``INFBIN_PURE=1`` is set.
"""

from collections import deque

import numpy as np

BACKEND = "python"


def _decode(mask, l):
    bins = []
    c = 1
    for i in range(l - 1):
        if (mask >> i) & 1:
            bins.append(c)
            c = 1
        else:
            c += 1
    bins.append(c)
    return bins


def _encode(bins):
    cum = 0
    mask = 0
    for v in list(bins)[:-1]:
        cum += v
        mask |= 1 << (cum - 1)
    return mask


def _fmove(bins, k):
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


def apply_word_masks(l, masks, types, reps):
    """Apply a run-length word to every l-configuration in ``masks``."""
    runs = list(zip((int(t) for t in types), (int(r) for r in reps)))
    out = np.empty(len(masks), dtype=np.int64)
    for idx, mask in enumerate(masks):
        bins = deque(_decode(int(mask), l))
        for t, r in runs:
            for _ in range(r):
                _fmove(bins, t)
        out[idx] = _encode(bins)
    return out


class LazyChain:
    """Mutable lazy infinite configuration: constant ``base`` to the left of a window."""

    def __init__(self, base, window=(), shift=0):
        if base < 1:
            raise ValueError("base must be positive")
        if any(v < 1 for v in window):
            raise ValueError("bin counts must be positive")
        self.base = int(base)
        self.shift = int(shift)
        self._bins = deque(int(v) for v in window)

    def _bin(self, depth):
        if depth < len(self._bins):
            return self._bins[-1 - depth]
        return self.base

    def _step(self, k):
        bins = self._bins
        acc = 0
        n = len(bins)
        j = n - 1
        while j >= 0:
            acc += bins[j]
            if acc >= k:
                break
            j -= 1
        if j >= 0:
            if j == n - 1:
                bins.append(1)
                self.shift += 1
                return 1
            bins[j + 1] += 1
            return 0
        q = (k - acc + self.base - 1) // self.base - 1
        if q == 0:
            if n == 0:
                bins.append(1)
                self.shift += 1
                return 1
            bins[0] += 1
            return 0
        bins.extendleft([self.base] * q)
        bins[0] += 1
        return 0

    def _key(self, depth, radix):
        key = 0
        for d in range(depth - 1, -1, -1):
            key = key * radix + self._bin(d)
        return key

    def step(self, k):
        if k < 1:
            raise ValueError("move type must be positive")
        return self._step(int(k)) == 1

    def run(self, xis, keys=None, depth=0, radix=0):
        """Apply every move in ``xis``; optionally record a top-bin key after each."""
        xs = [int(x) for x in xis]
        if any(x < 1 for x in xs):
            raise ValueError("move type must be positive")
        record = keys is not None and depth > 0
        if record and len(keys) < len(xs):
            raise ValueError("keys buffer too short")
        created = 0
        step = self._step
        for i, x in enumerate(xs):
            created += step(x)
            if record:
                keys[i] = self._key(depth, radix)
        return created

    def bin(self, depth):
        return self._bin(depth)

    def top_key(self, depth, radix):
        return self._key(depth, radix)

    def window(self):
        return list(self._bins)

    def max_bin(self):
        return max([self.base, *self._bins])

    def project(self, n):
        out = []
        rem = n
        d = 0
        while rem > 0:
            v = min(self._bin(d), rem)
            out.append(v)
            rem -= v
            d += 1
        out.reverse()
        return out


def projections_agree(a, b, n):
    rem = n
    d = 0
    while rem > 0:
        va = a._bin(d)
        vb = b._bin(d)
        if va >= rem and vb >= rem:
            return True
        if va != vb:
            return False
        rem -= va
        d += 1
    return True


def pair_run(a, b, xis, n, agreed):
    """Drive two chains with shared moves, tracking agreement of n-ball projections.

    Returns ``(first, violations)``: index of the move after which agreement
    first held (-1 if not reached or already agreed on entry), and the number
    of moves after agreement where the projections differed.
    """
    xs = [int(x) for x in xis]
    if any(x < 1 for x in xs):
        raise ValueError("move type must be positive")
    first = -1
    violations = 0
    for i, x in enumerate(xs):
        a._step(x)
        b._step(x)
        eq = projections_agree(a, b, n)
        if not agreed:
            if eq:
                agreed = True
                first = i
        elif not eq:
            violations += 1
    return first, violations
