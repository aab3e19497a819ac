# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops for the infinite-bin model.

Mirrors :mod:`infinite_bins._fallback` exactly; the two are cross-checked
in the test suite.
"""

from libc.stdint cimport int64_t
from libc.stdlib cimport free, malloc, realloc
from libc.string cimport memmove

import numpy as np

BACKEND = "compiled"


# ---------------------------------------------------------------------------
# finite l-configurations encoded as gap bitmasks

cdef inline Py_ssize_t _decode(int64_t mask, int l, int64_t* b) noexcept nogil:
    cdef Py_ssize_t n = 0
    cdef int64_t c = 1
    cdef int i
    for i in range(l - 1):
        if (mask >> i) & 1:
            b[n] = c
            n += 1
            c = 1
        else:
            c += 1
    b[n] = c
    return n + 1


cdef inline int64_t _encode(int64_t* b, Py_ssize_t lo, Py_ssize_t hi) noexcept nogil:
    cdef int64_t cum = 0
    cdef int64_t mask = 0
    cdef Py_ssize_t j
    for j in range(lo, hi - 1):
        cum += b[j]
        mask |= (<int64_t>1) << (cum - 1)
    return mask


cdef inline void _fmove(int64_t* b, Py_ssize_t* lo, Py_ssize_t* hi,
                        Py_ssize_t cap, int64_t k) noexcept nogil:
    cdef int64_t acc = 0
    cdef Py_ssize_t j = hi[0] - 1
    cdef Py_ssize_t n
    while True:
        acc += b[j]
        if acc >= k:
            break
        j -= 1
    if j == hi[0] - 1:
        if hi[0] == cap:
            n = hi[0] - lo[0]
            memmove(b, b + lo[0], n * sizeof(int64_t))
            lo[0] = 0
            hi[0] = n
        b[hi[0]] = 1
        hi[0] += 1
    else:
        b[j + 1] += 1
    b[lo[0]] -= 1
    if b[lo[0]] == 0:
        lo[0] += 1


def apply_word_masks(int l, const int64_t[::1] masks,
                     const int64_t[::1] types, const int64_t[::1] reps):
    """Apply a run-length word to every l-configuration in ``masks``."""
    cdef Py_ssize_t m = masks.shape[0]
    cdef Py_ssize_t nruns = types.shape[0]
    out = np.empty(m, dtype=np.int64)
    cdef int64_t[::1] res = out
    cdef Py_ssize_t cap = 2 * l + 2
    cdef int64_t* b = <int64_t*> malloc(cap * sizeof(int64_t))
    if b == NULL:
        raise MemoryError()
    cdef Py_ssize_t idx, lo, hi, r
    cdef int64_t t, rep
    try:
        with nogil:
            for idx in range(m):
                lo = 0
                hi = _decode(masks[idx], l, b)
                for r in range(nruns):
                    t = types[r]
                    for rep in range(reps[r]):
                        _fmove(b, &lo, &hi, cap, t)
                res[idx] = _encode(b, lo, hi)
    finally:
        free(b)
    return out


# ---------------------------------------------------------------------------
# lazy infinite configurations

cdef class LazyChain:
    """Mutable lazy infinite configuration: constant ``base`` to the left of a window."""

    cdef int64_t* buf
    cdef Py_ssize_t cap, lo, hi
    cdef readonly int64_t base
    cdef readonly int64_t shift

    def __cinit__(self, int64_t base, window=(), int64_t shift=0):
        if base < 1:
            raise ValueError("base must be positive")
        n = len(window)
        self.cap = 2 * n + 64
        self.buf = <int64_t*> malloc(self.cap * sizeof(int64_t))
        if self.buf == NULL:
            raise MemoryError()
        self.lo = self.cap // 4
        self.hi = self.lo + n
        for i, v in enumerate(window):
            if v < 1:
                raise ValueError("bin counts must be positive")
            self.buf[self.lo + i] = v
        self.base = base
        self.shift = shift

    def __dealloc__(self):
        if self.buf != NULL:
            free(self.buf)

    cdef int _regrow(self, Py_ssize_t need_left, Py_ssize_t need_right) noexcept nogil:
        cdef Py_ssize_t n = self.hi - self.lo
        cdef Py_ssize_t newcap = 2 * (n + need_left + need_right) + 64
        cdef Py_ssize_t newlo = (newcap - n) // 2
        cdef int64_t* nb
        if newlo < need_left:
            newlo = need_left
        if newcap > self.cap:
            nb = <int64_t*> realloc(self.buf, newcap * sizeof(int64_t))
            if nb == NULL:
                return -1
            self.buf = nb
            self.cap = newcap
        memmove(self.buf + newlo, self.buf + self.lo, n * sizeof(int64_t))
        self.lo = newlo
        self.hi = newlo + n
        return 0

    cdef inline int64_t _bin(self, Py_ssize_t depth) noexcept nogil:
        if depth < self.hi - self.lo:
            return self.buf[self.hi - 1 - depth]
        return self.base

    cdef int _step(self, int64_t k) noexcept nogil:
        # returns 1 if a bin was created, 0 otherwise, -1 on allocation failure
        cdef int64_t acc = 0
        cdef Py_ssize_t j = self.hi - 1
        cdef int64_t q
        cdef Py_ssize_t i
        while j >= self.lo:
            acc += self.buf[j]
            if acc >= k:
                break
            j -= 1
        if j >= self.lo:
            if j == self.hi - 1:
                if self.hi == self.cap and self._regrow(0, 1) < 0:
                    return -1
                self.buf[self.hi] = 1
                self.hi += 1
                self.shift += 1
                return 1
            self.buf[j + 1] += 1
            return 0
        # the k-th ball lies in the constant region, q bins left of the window
        q = (k - acc + self.base - 1) // self.base - 1
        if q == 0:
            if self.hi == self.lo:
                if self.hi == self.cap and self._regrow(0, 1) < 0:
                    return -1
                self.buf[self.hi] = 1
                self.hi += 1
                self.shift += 1
                return 1
            self.buf[self.lo] += 1
            return 0
        if self.lo < q and self._regrow(q, 0) < 0:
            return -1
        for i in range(q):
            self.lo -= 1
            self.buf[self.lo] = self.base
        self.buf[self.lo] += 1
        return 0

    cdef inline int64_t _key(self, Py_ssize_t depth, int64_t radix) noexcept nogil:
        cdef int64_t key = 0
        cdef Py_ssize_t d
        for d in range(depth - 1, -1, -1):
            key = key * radix + self._bin(d)
        return key

    def step(self, int64_t k):
        if k < 1:
            raise ValueError("move type must be positive")
        cdef int res = self._step(k)
        if res < 0:
            raise MemoryError()
        return res == 1

    def run(self, const int64_t[::1] xis, int64_t[::1] keys=None,
            Py_ssize_t depth=0, int64_t radix=0):
        """Apply every move in ``xis``; optionally record a top-bin key after each."""
        cdef Py_ssize_t n = xis.shape[0]
        cdef Py_ssize_t i
        cdef int64_t created = 0
        cdef int res = 0
        cdef bint record = keys is not None and depth > 0
        if record and keys.shape[0] < n:
            raise ValueError("keys buffer too short")
        for i in range(n):
            if xis[i] < 1:
                raise ValueError("move type must be positive")
        if self.cap - self.hi < n + 1:
            if self._regrow(0, n + 1) < 0:
                raise MemoryError()
        with nogil:
            for i in range(n):
                res = self._step(xis[i])
                if res < 0:
                    break
                created += res
                if record:
                    keys[i] = self._key(depth, radix)
        if res < 0:
            raise MemoryError()
        return created

    def bin(self, Py_ssize_t depth):
        return self._bin(depth)

    def top_key(self, Py_ssize_t depth, int64_t radix):
        return self._key(depth, radix)

    def window(self):
        return [self.buf[i] for i in range(self.lo, self.hi)]

    def max_bin(self):
        cdef int64_t m = self.base
        cdef Py_ssize_t i
        for i in range(self.lo, self.hi):
            if self.buf[i] > m:
                m = self.buf[i]
        return m

    def project(self, int64_t n):
        out = []
        cdef int64_t rem = n
        cdef Py_ssize_t d = 0
        cdef int64_t v
        while rem > 0:
            v = self._bin(d)
            if v > rem:
                v = rem
            out.append(v)
            rem -= v
            d += 1
        out.reverse()
        return out


cdef inline bint _proj_equal(LazyChain a, LazyChain b, int64_t n) noexcept nogil:
    cdef int64_t rem = n
    cdef Py_ssize_t d = 0
    cdef int64_t va, vb
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


def projections_agree(LazyChain a, LazyChain b, int64_t n):
    return _proj_equal(a, b, n)


def pair_run(LazyChain a, LazyChain b, const int64_t[::1] xis, int64_t n, bint agreed):
    """Drive two chains with shared moves, tracking agreement of n-ball projections.

    Returns ``(first, violations)``: index of the move after which agreement
    first held (-1 if not reached or already agreed on entry), and the number
    of moves after agreement where the projections differed.
    """
    cdef Py_ssize_t m = xis.shape[0]
    cdef Py_ssize_t i
    cdef Py_ssize_t first = -1
    cdef int64_t violations = 0
    cdef bint eq
    cdef int ra = 0, rb = 0
    for i in range(m):
        if xis[i] < 1:
            raise ValueError("move type must be positive")
    if a.cap - a.hi < m + 1 and a._regrow(0, m + 1) < 0:
        raise MemoryError()
    if b.cap - b.hi < m + 1 and b._regrow(0, m + 1) < 0:
        raise MemoryError()
    with nogil:
        for i in range(m):
            ra = a._step(xis[i])
            rb = b._step(xis[i])
            if ra < 0 or rb < 0:
                break
            eq = _proj_equal(a, b, n)
            if not agreed:
                if eq:
                    agreed = True
                    first = i
            elif not eq:
                violations += 1
    if ra < 0 or rb < 0:
        raise MemoryError()
    return first, violations
