"""Compiled chunk kernel for bulk sketch construction.

Instead of sliding one rolling fingerprint per sampled length, the kernel
computes prefix hashes H(e) of the whole stream once per chunk and derives
each window fingerprint as H(e) - sigma^k * H(e-k) (mod q), which is
arithmetically identical to the rolling update.  Register updates replicate
the scalar sketch bit for bit; equality of the two routes is enforced by
tests.

Only the default modulus 2^61 - 1 is supported here (the reduction below is
specific to that Mersenne prime); other moduli fall back to the scalar path.
"""

from __future__ import annotations

import os

import numpy as np

M61 = (1 << 61) - 1

# skip the TBB probe (and its version warning) unless the user overrides
os.environ.setdefault("NUMBA_THREADING_LAYER", "omp")

try:
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAVE_NUMBA = False

    def njit(*a, **k):
        def deco(f):
            return f
        return deco if not (a and callable(a[0])) else a[0]

    prange = range


def set_threads(n: int) -> None:
    if HAVE_NUMBA and n > 0:
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


@njit(cache=True, inline="always")
def _mulmod61(a, b):
    # split into 32-bit halves; 2^64 = 8 and 2^61 = 1 modulo M61
    a_hi = a >> np.uint64(32)
    a_lo = a & np.uint64(0xFFFFFFFF)
    b_hi = b >> np.uint64(32)
    b_lo = b & np.uint64(0xFFFFFFFF)
    m = a_lo * b_hi + a_hi * b_lo
    m_hi = m >> np.uint64(29)
    m_lo = m & np.uint64(0x1FFFFFFF)
    lo = a_lo * b_lo
    s = ((a_hi * b_hi) << np.uint64(3)) + m_hi + (m_lo << np.uint64(32)) \
        + (lo & np.uint64(M61)) + (lo >> np.uint64(61))
    s = (s & np.uint64(M61)) + (s >> np.uint64(61))
    if s >= np.uint64(M61):
        s -= np.uint64(M61)
    return s


@njit(cache=True, inline="always")
def _append61(h, byte):
    # h * 256 + byte (mod M61); h < 2^61 so split at bit 53
    s = (h >> np.uint64(53)) + ((h & np.uint64((1 << 53) - 1)) << np.uint64(8)) \
        + np.uint64(byte)
    s = (s & np.uint64(M61)) + (s >> np.uint64(61))
    if s >= np.uint64(M61):
        s -= np.uint64(M61)
    return s


@njit(cache=True)
def _fill_prefix(hall, t0, chunk):
    """hall[t0 + 1 + t] = H of the stream up to chunk byte t."""
    h = hall[t0]
    for t in range(chunk.shape[0]):
        h = _append61(h, chunk[t])
        hall[t0 + 1 + t] = h


@njit(cache=True, parallel=True)
def _update_rows(hall, t0, chunk_len, pos, ks, powk, rows, regs, fps, seed, p):
    """Window fingerprints and register updates for every live length.

    hall[t0] is H(pos); hall carries at least max(ks) older prefix hashes
    before it.  Rows of regs are disjoint per length, so lengths run in
    parallel.  fps[i] receives the fingerprint of the final length-ks[i]
    window (0 if that window never filled).
    """
    shift = np.uint64(64 - p)
    pshift = np.uint64(p)
    maxrank = np.uint8(64 - p + 1)
    for ki in prange(ks.shape[0]):
        k = ks[ki]
        pk = powk[ki]
        row = rows[ki]
        start = k if k > pos + 1 else pos + 1
        nwin = pos + chunk_len + 1 - start
        if nwin <= 0:
            continue
        base = t0 + (start - pos)
        # pass 1: fingerprints + finalizer, straight-line so it vectorizes
        zbuf = np.empty(nwin, dtype=np.uint64)
        fp = np.uint64(0)
        for t in range(nwin):
            v = _mulmod61(pk, hall[base + t - k])
            fp = hall[base + t] + (np.uint64(M61) - v)
            if fp >= np.uint64(M61):
                fp -= np.uint64(M61)
            # seeded splitmix64 finalizer
            z = fp ^ seed
            z ^= z >> np.uint64(30)
            z *= np.uint64(0xBF58476D1CE4E5B9)
            z ^= z >> np.uint64(27)
            z *= np.uint64(0x94D049BB133111EB)
            z ^= z >> np.uint64(31)
            zbuf[t] = z
        fps[ki] = fp
        # pass 2: max-rank register updates
        for t in range(nwin):
            z = zbuf[t]
            ridx = z >> shift
            tail = z << pshift
            if tail == np.uint64(0):
                rank = maxrank
            else:
                bl = 0
                v2 = tail
                if v2 >> np.uint64(32):
                    bl += 32
                    v2 >>= np.uint64(32)
                if v2 >> np.uint64(16):
                    bl += 16
                    v2 >>= np.uint64(16)
                if v2 >> np.uint64(8):
                    bl += 8
                    v2 >>= np.uint64(8)
                if v2 >> np.uint64(4):
                    bl += 4
                    v2 >>= np.uint64(4)
                if v2 >> np.uint64(2):
                    bl += 2
                    v2 >>= np.uint64(2)
                if v2 >> np.uint64(1):
                    bl += 1
                rank = np.uint8(64 - bl)
            if rank > regs[row, ridx]:
                regs[row, ridx] = rank


class ChunkEngine:
    """Feeds chunks through the compiled kernel for one sketch.

    Owns the prefix-hash tail (the last max-k hashes) carried between
    chunks.  The caller decides which sampled lengths are live and hands
    their register rows over; frozen or out-of-reach lengths simply are not
    in the list.
    """

    def __init__(self, ks, powers, rows, regs, seed, p, max_k):
        self.ks = np.asarray(ks, dtype=np.int64)
        self.powk = np.asarray(powers, dtype=np.uint64)
        self.rows = np.asarray(rows, dtype=np.int64)
        self.regs = regs
        self.seed = np.uint64(seed)
        self.p = p
        self.max_k = int(max_k)
        self.pos = 0
        # tail[i] = H(pos - len(tail) + 1 + i); starts as just H(0) = 0
        self.tail = np.zeros(1, dtype=np.uint64)
        self.fps = np.zeros(len(self.ks), dtype=np.uint64)

    @property
    def fp_all(self) -> int:
        return int(self.tail[-1])

    def feed(self, chunk: np.ndarray) -> None:
        L = int(chunk.shape[0])
        if L == 0:
            return
        t0 = self.tail.shape[0] - 1
        hall = np.empty(t0 + 1 + L, dtype=np.uint64)
        hall[:t0 + 1] = self.tail
        _fill_prefix(hall, t0, chunk)
        if self.ks.shape[0]:
            _update_rows(hall, t0, L, self.pos, self.ks, self.powk,
                         self.rows, self.regs, self.fps, self.seed, self.p)
        self.pos += L
        keep = min(self.max_k, self.pos) + 1
        self.tail = hall[-keep:].copy()

    def final_fps(self) -> list[int]:
        return [int(v) for v in self.fps]
