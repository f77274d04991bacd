"""One-pass sketch construction in sub-linear working space.

Sliding each length-k window needs the byte k positions back.  A circular
buffer of the last K bytes serves every k <= K; for k > K an optional
run-length BWT with one bookmark per length serves as compressed history.
If the BWT's run count ever reaches 8 n (log2 n)^2 / K the space bound is in
jeopardy, but then the stream is complex enough that the maximizing length
is guaranteed to be at most K, so the large lengths are dropped and frozen.

When no BWT is in play the bytes are buffered and pushed through the
compiled chunk kernel, which produces bit-identical registers to the
byte-at-a-time path.
"""

from __future__ import annotations

import math

import numpy as np

from . import _kernel
from .errors import CapacityExceededError, InvalidParameterError
from .fingerprint import DEFAULT_MODULUS
from .rlbwt import Bookmark, DynamicRLBWT
from .sketch import DeltaSketch, SketchParams

_CHUNK = 1 << 20


def default_window_capacity(n: int) -> int:
    """ceil(sqrt(n) * log2 n), capped at n."""
    return min(n, math.ceil(math.sqrt(n) * math.log2(n)))


class StreamEstimator:
    """Feeds a byte stream of declared maximum length n into a DeltaSketch."""

    def __init__(self, params: SketchParams, n: int,
                 k_override: int | None = None, rlbwt_enabled: bool = False):
        if n < 2:
            raise InvalidParameterError(f"stream bound n must be >= 2, got {n}")
        if n > params.n_max:
            raise InvalidParameterError(
                f"stream bound n={n} exceeds sketch capacity n_max={params.n_max}")
        if rlbwt_enabled and params.epsilon < n ** -0.5:
            raise InvalidParameterError(
                f"epsilon={params.epsilon} below n^-1/2={n ** -0.5:.3g}: the "
                "compressed-history space bound does not hold; disable rlbwt "
                "or raise epsilon")
        if k_override is not None and k_override < 1:
            raise InvalidParameterError(f"window capacity must be >= 1, got {k_override}")
        self.params = params
        self.n = n
        self.K = k_override if k_override is not None else default_window_capacity(n)
        log2n = math.log2(n)
        self.drop_threshold = 8.0 * n * log2n * log2n / self.K
        self.sketch = DeltaSketch(params)
        self.bytes_seen = 0
        self.dropped = False
        self.dropped_r_prime = 0

        self._win = bytearray(self.K)
        large = [k for k in self.sketch.A if k > self.K]
        self.rlbwt: DynamicRLBWT | None = None
        self.bookmarks: list[Bookmark] = []
        self._pending_ks: list[int] = []
        self._large_tracked = False
        if rlbwt_enabled and large:
            self.rlbwt = DynamicRLBWT()
            self._pending_ks = large  # sorted ascending, inits pop from the front
            self._large_tracked = True
        else:
            # without compressed history these lengths cannot be slid once
            # they leave the window; they are never tracked
            for k in large:
                self.sketch.freeze_length(k)

        self._engine: _kernel.ChunkEngine | None = None
        self._buf = bytearray()
        if (self.rlbwt is None and _kernel.HAVE_NUMBA
                and params.q == DEFAULT_MODULUS):
            live = [k for k in self.sketch.A if k <= self.K]
            rows = [self.sketch.A.index(k) for k in live]
            powers = [pow(256, k, params.q) for k in live]
            self._engine = _kernel.ChunkEngine(
                live, powers, rows, self.sketch.regs, params.seed, params.p,
                max(live) if live else 1)
        self.peak_aux_words = 0
        self._note_memory()

    # -- memory accounting ----------------------------------------------------

    def aux_words(self) -> int:
        """Structural word count of all auxiliary state (window cells, run
        nodes, bookmarks, buffered bytes, hash tail, sketch registers)."""
        words = min(self.bytes_seen, self.K)  # window cells
        words += self.sketch.regs.size // 8 + len(self.sketch.A)
        words += len(self._buf) // 8 + 1
        if self._engine is not None:
            words += self._engine.tail.shape[0]
        if self.rlbwt is not None:
            words += 3 * self.rlbwt.r  # symbol, length, block bookkeeping
            words += len(self.bookmarks) + len(self._pending_ks)
        return words

    def _note_memory(self) -> None:
        w = self.aux_words()
        if w > self.peak_aux_words:
            self.peak_aux_words = w

    # -- input --------------------------------------------------------------

    def push(self, a: int) -> None:
        """Consume one byte."""
        if self.bytes_seen >= self.n:
            raise CapacityExceededError(
                f"stream exceeds declared bound n={self.n}")
        if self._engine is not None:
            self._buf.append(a)
            self.bytes_seen += 1
            if len(self._buf) >= _CHUNK:
                self._flush()
            return
        self._push_scalar(a)

    def feed(self, data: bytes) -> None:
        """Consume a block of bytes."""
        if self.bytes_seen + len(data) > self.n:
            raise CapacityExceededError(
                f"stream exceeds declared bound n={self.n}")
        if self._engine is not None:
            self._buf.extend(data)
            self.bytes_seen += len(data)
            while len(self._buf) >= _CHUNK:
                self._flush()
            return
        for a in data:
            self._push_scalar(a)

    def _push_scalar(self, a: int) -> None:
        ell = self.bytes_seen  # stream length before this byte
        win = self._win
        K = self.K
        marks = {bm.k: bm for bm in self.bookmarks}
        rlbwt = self.rlbwt

        def history(k: int) -> int:
            if k <= K:
                return win[(ell - k) % K]
            return rlbwt.access(marks[k].j)

        self.sketch._extend_unchecked(a, history)
        win[ell % K] = a
        self.bytes_seen = ell + 1

        if rlbwt is not None:
            i_prime = rlbwt.extend(a)
            if self.bookmarks:
                js = [bm.j + 1 if bm.j >= i_prime else bm.j for bm in self.bookmarks]
                for bm, nj in zip(self.bookmarks, rlbwt.lf_batch(js)):
                    bm.j = nj
            while self._pending_ks and self._pending_ks[0] == rlbwt.data_len:
                self.bookmarks.append(rlbwt.init_bookmark(self._pending_ks.pop(0)))
            r_prime = rlbwt.runs()[1]
            if r_prime >= self.drop_threshold:
                self._drop_large(r_prime)
        self._note_memory()

    def _drop_large(self, r_prime: int) -> None:
        for k in self.sketch.A:
            if k > self.K:
                self.sketch.freeze_length(k)
        self.rlbwt = None
        self.bookmarks = []
        self._pending_ks = []
        self.dropped = True
        self.dropped_r_prime = r_prime

    def _flush(self) -> None:
        take = min(len(self._buf), _CHUNK)
        chunk = np.frombuffer(bytes(self._buf[:take]), dtype=np.uint8)
        del self._buf[:take]
        pos = self._engine.pos
        self._engine.feed(chunk)
        # unary tracking and window mirror, chunk at a time
        self.sketch._note_byte(int(chunk[0]))
        if not (chunk == chunk[0]).all():
            self.sketch._note_byte(int(chunk[0]) ^ 1)
        K = self.K
        tail = bytes(chunk[-K:])
        for off, b in enumerate(tail, start=pos + take - len(tail)):
            self._win[off % K] = b
        self.sketch.stream_len = self._engine.pos
        self.sketch.fp_all = self._engine.fp_all
        fps = self._engine.final_fps()
        for i, k in enumerate(self._engine.ks):
            row = int(self._engine.rows[i])
            if k <= self._engine.pos:
                self.sketch.fps[row] = fps[i]
        self._note_memory()

    # -- output -------------------------------------------------------------

    def finalize(self) -> tuple[float, DeltaSketch]:
        """Complete the pass; returns (estimate, sketch)."""
        if self._engine is not None:
            while self._buf:
                self._flush()
        sk = self.sketch
        sk.unfreeze_untouched()
        if self._large_tracked and not self.dropped:
            # large lengths were fed from compressed history that does not
            # travel with the sketch, so it cannot be extended later
            if any(self.K < k <= sk.stream_len for k in sk.A):
                sk.mark_non_resumable()
        return sk.estimate(), sk
