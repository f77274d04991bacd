"""The delta sketch: per-sampled-length count-distinct sketches over the
fingerprints of all sliding windows of that length.

Window lengths are sampled on the geometric grid ceil(alpha^i); the estimate
is max over sampled k of (distinct-window estimate at k) / k.  Sketches built
with identical parameters merge register-wise into the sketch of the string
pair, which is what normalized compression distances are computed from.
"""

from __future__ import annotations

import math
import struct
import zlib
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .cardinality import CardinalitySketch
from .errors import (
    CapacityExceededError,
    InvalidParameterError,
    NonResumableError,
    ParameterMismatchError,
    SketchFormatError,
)
from .fingerprint import DEFAULT_MODULUS, SIGMA, FingerprintContext

#: Fixed default seed so published numbers are reproducible run to run.
DEFAULT_SEED = 0x5DE17A5EEDC0FFEE

_MAGIC = b"DSK1"
_VERSION = 1

# unary tracker states
_EMPTY, _UNARY, _MIXED = 0, 1, 2


def sampled_lengths(alpha: float, n_max: int) -> list[int]:
    """Deduplicated sorted grid {ceil(alpha^i) : i >= 0, ceil(alpha^i) <= n_max}.

    Starts at k = 1 (i = 0) so a sample always sits at or below the
    maximizing length even when d_1 dominates.
    """
    if not alpha > 1.0 + 1e-12:
        raise InvalidParameterError(f"sample rate alpha must exceed 1, got {alpha}")
    if n_max < 2:
        raise InvalidParameterError(f"n_max must be >= 2, got {n_max}")
    out: set[int] = set()
    i = 0
    while True:
        v = math.ceil(alpha**i)
        if v > n_max:
            break
        out.add(v)
        i += 1
    return sorted(out)


@dataclass(frozen=True)
class SketchParams:
    """Construction parameters; two sketches merge only if these are equal."""

    epsilon: float = 0.2
    n_max: int = 1 << 20
    alpha: float | None = None  # defaults to 1 + epsilon/4
    p: int = 14
    q: int = DEFAULT_MODULUS
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if not 0.0 < self.epsilon <= 1.0:
            raise InvalidParameterError(f"epsilon must be in (0, 1], got {self.epsilon}")
        if self.n_max < 2:
            raise InvalidParameterError(f"n_max must be >= 2, got {self.n_max}")
        if self.alpha is None:
            object.__setattr__(self, "alpha", 1.0 + self.epsilon / 4.0)
        if not self.alpha > 1.0:
            raise InvalidParameterError(f"alpha must exceed 1, got {self.alpha}")
        if not 4 <= self.p <= 20:
            raise InvalidParameterError(f"p must be in [4, 20], got {self.p}")
        if self.q <= SIGMA:
            raise InvalidParameterError("modulus q must exceed 256")


class DeltaSketch:
    """Mergeable sketch estimating the normalized substring complexity.

    ``extend`` consumes one byte; the caller supplies a history accessor
    ``history(k) -> int`` returning the k-th most recent byte of the stream
    (needed to slide each length-k window).  How that byte is produced -
    direct indexing, a sliding window, or a bookmarked run-length BWT - is
    the caller's concern, which keeps this class storage-agnostic.
    """

    def __init__(self, params: SketchParams):
        self.params = params
        self.A: list[int] = sampled_lengths(params.alpha, params.n_max)
        self.ctx = FingerprintContext(self.A, q=params.q)
        m = 1 << params.p
        self.regs = np.zeros((len(self.A), m), dtype=np.uint8)
        self.cds = [CardinalitySketch(params.p, params.seed, self.regs[i])
                    for i in range(len(self.A))]
        self.fps: list[int] = [0] * len(self.A)
        self.fp_all = 0
        self.stream_len = 0
        self._merged = False
        self._frozen: set[int] = set()
        self._unary_state = _EMPTY
        self._first_byte = 0

    # -- state flags ------------------------------------------------------

    @property
    def resumable(self) -> bool:
        return not self._merged and not self._frozen

    @property
    def is_unary(self) -> bool:
        return self._unary_state == _UNARY

    def mark_non_resumable(self) -> None:
        """Keep the registers usable but refuse further extension; for
        sketches whose rolling state can no longer be reconstructed."""
        self._merged = True

    def freeze_length(self, k: int) -> None:
        """Permanently stop updating length k (its registers keep counting
        in the estimate as an underestimate of d_k)."""
        self._frozen.add(k)

    def unfreeze_untouched(self) -> None:
        """Drop freezes on lengths whose window never filled; no update was
        ever missed for them, so the sketch state is indistinguishable from
        a never-frozen one."""
        self._frozen = {k for k in self._frozen if k <= self.stream_len}

    # -- updates ----------------------------------------------------------

    def _note_byte(self, a: int) -> None:
        if self._unary_state == _EMPTY:
            self._unary_state, self._first_byte = _UNARY, a
        elif self._unary_state == _UNARY and a != self._first_byte:
            self._unary_state = _MIXED

    def extend(self, a: int, history: Callable[[int], int]) -> None:
        """Consume one byte; update every live length whose window is full."""
        if self._merged:
            raise NonResumableError("cannot extend a merged sketch")
        if self._frozen:
            raise NonResumableError("cannot extend a sketch with frozen lengths")
        if self.stream_len >= self.params.n_max:
            raise CapacityExceededError(
                f"stream exceeds declared n_max={self.params.n_max}")
        self._extend_unchecked(a, history)

    def _extend_unchecked(self, a: int, history) -> None:
        # internal entry point for the stream estimator, which owns the
        # freeze policy and capacity checking
        new_len = self.stream_len + 1
        self.fp_all = self.ctx.append(self.fp_all, a)
        self._note_byte(a)
        ctx = self.ctx
        for i, k in enumerate(self.A):
            if k > new_len or k in self._frozen:
                continue
            if k == new_len:
                fp = self.fp_all
            else:
                fp = ctx.slide(self.fps[i], history(k), a, k)
            self.fps[i] = fp
            self.cds[i].add(fp)
        self.stream_len = new_len

    def consume(self, data: bytes) -> None:
        """Extend over an in-memory byte string (direct-indexing history)."""
        if self.stream_len:
            raise NonResumableError("consume() is only supported from an empty sketch")
        pos = 0

        def history(k: int) -> int:
            return data[pos - k]

        for pos in range(len(data)):
            self.extend(data[pos], history)

    # -- queries ----------------------------------------------------------

    def estimate(self) -> float:
        if self.stream_len == 0:
            return 0.0
        if self._unary_state == _UNARY:
            return 1.0
        best = 0.0
        for i, k in enumerate(self.A):
            if k > self.stream_len:
                continue
            est = self.cds[i].estimate() / k
            if est > best:
                best = est
        return best

    # -- merge ------------------------------------------------------------

    def _check_compatible(self, other: "DeltaSketch") -> None:
        for field in ("epsilon", "alpha", "n_max", "p", "q", "seed"):
            a, b = getattr(self.params, field), getattr(other.params, field)
            if a != b:
                raise ParameterMismatchError(f"{field} differs: {a} != {b}")

    def merge(self, other: "DeltaSketch") -> "DeltaSketch":
        """Sketch of the string pair; estimate() then approximates the
        pairwise complexity over per-length substring-set unions."""
        self._check_compatible(other)
        out = DeltaSketch(self.params)
        np.maximum(self.regs, other.regs, out=out.regs)
        out.stream_len = max(self.stream_len, other.stream_len)
        out._merged = True
        out.fps = [0] * len(out.A)
        out.fp_all = 0
        if (self._unary_state == other._unary_state == _UNARY
                and self._first_byte == other._first_byte):
            out._unary_state, out._first_byte = _UNARY, self._first_byte
        elif self._unary_state == _EMPTY and other._unary_state != _EMPTY:
            out._unary_state, out._first_byte = other._unary_state, other._first_byte
        elif other._unary_state == _EMPTY:
            out._unary_state, out._first_byte = self._unary_state, self._first_byte
        else:
            out._unary_state = _MIXED
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, DeltaSketch):
            return NotImplemented
        same = (self.params == other.params
                and self.stream_len == other.stream_len
                and self._merged == other._merged
                and self._unary_state == other._unary_state
                and self._first_byte == other._first_byte
                and bool(np.array_equal(self.regs, other.regs)))
        if same and self.resumable and other.resumable:
            same = self.fps == other.fps and self.fp_all == other.fp_all
        return same

    # -- serialization ----------------------------------------------------

    def to_bytes(self) -> bytes:
        """DSK1 container, little-endian, CRC-protected."""
        p = self.params
        head = bytearray()
        head += _MAGIC
        head += struct.pack("<H", _VERSION)
        head += struct.pack("<ddQQBQ", p.epsilon, p.alpha, p.n_max, p.q, p.p, p.seed)
        resumable = self.resumable
        head += struct.pack("<BBB", int(resumable), self._unary_state, self._first_byte)
        head += struct.pack("<I", len(self.A))
        head += struct.pack(f"<{len(self.A)}Q", *self.A)
        body = self.regs.tobytes()
        tail = struct.pack("<Q", self.stream_len)
        if resumable:
            tail += struct.pack("<Q", self.fp_all)
            tail += struct.pack(f"<{len(self.A)}Q", *self.fps)
        blob = bytes(head) + body + tail
        return blob + struct.pack("<I", zlib.crc32(blob))

    @classmethod
    def from_bytes(cls, blob: bytes) -> "DeltaSketch":
        if len(blob) < 4 + 2 + 4:
            raise SketchFormatError("truncated sketch file")
        if blob[:4] != _MAGIC:
            raise SketchFormatError("bad magic")
        if zlib.crc32(blob[:-4]) != struct.unpack("<I", blob[-4:])[0]:
            raise SketchFormatError("checksum mismatch (corrupted sketch)")
        off = 4
        (version,) = struct.unpack_from("<H", blob, off)
        off += 2
        if version != _VERSION:
            raise SketchFormatError(f"unknown format version {version}")
        try:
            epsilon, alpha, n_max, q, p, seed = struct.unpack_from("<ddQQBQ", blob, off)
            off += struct.calcsize("<ddQQBQ")
            resumable, unary_state, first_byte = struct.unpack_from("<BBB", blob, off)
            off += 3
            (n_a,) = struct.unpack_from("<I", blob, off)
            off += 4
            a_entries = struct.unpack_from(f"<{n_a}Q", blob, off)
            off += 8 * n_a
            params = SketchParams(epsilon=epsilon, n_max=n_max, alpha=alpha,
                                  p=p, q=q, seed=seed)
            sk = cls(params)
            if list(a_entries) != sk.A:
                raise SketchFormatError("sampled-length grid inconsistent with parameters")
            m = 1 << p
            regs = np.frombuffer(blob, dtype=np.uint8, count=n_a * m, offset=off)
            off += n_a * m
            sk.regs[:] = regs.reshape(n_a, m)
            (sk.stream_len,) = struct.unpack_from("<Q", blob, off)
            off += 8
            if resumable:
                (sk.fp_all,) = struct.unpack_from("<Q", blob, off)
                off += 8
                sk.fps = list(struct.unpack_from(f"<{n_a}Q", blob, off))
                off += 8 * n_a
            else:
                sk._merged = True
            sk._unary_state = unary_state
            sk._first_byte = first_byte
            if off != len(blob) - 4:
                raise SketchFormatError("trailing or missing bytes in sketch file")
        except struct.error as exc:
            raise SketchFormatError(f"truncated sketch file: {exc}") from None
        except InvalidParameterError as exc:
            raise SketchFormatError(f"invalid parameters in sketch file: {exc}") from None
        return sk


def build_in_memory(data: bytes, params: SketchParams) -> DeltaSketch:
    """Reference scalar construction over an in-memory string.

    One rolling-fingerprint update per (byte, sampled length).  The stream
    module reaches the same registers through a different route; the two are
    compared bit-for-bit in tests.
    """
    if len(data) > params.n_max:
        raise CapacityExceededError(
            f"input of {len(data)} bytes exceeds n_max={params.n_max}")
    sk = DeltaSketch(params)
    sk.consume(data)
    return sk
