"""Mergeable register-based count-distinct sketch over 64-bit items.

A fixed array of m = 2^p registers records, per register, the maximum
"rank" (leading-zero count + 1) seen among hashed items routed to it.
Merging two sketches is the element-wise register maximum, which is exactly
the sketch of the union of the two item sets.

The estimator has two branches chosen by occupancy:

* more than half the registers still zero -> linear counting
  m * ln(m / V) on the number V of zero registers;
* otherwise the classic harmonic-mean register estimate, passed through a
  fixed monotone bias-inversion table (the raw estimate overshoots badly for
  cardinalities between ~0.7m and ~3m) and floored at m * ln 2.

Both branches are monotone in the registers and the raw branch is always
>= the largest value the linear-counting branch can produce, so estimates
can only grow under merge.  That property is load-bearing for the delta
estimator built on top and is covered by a property test.
"""

from __future__ import annotations

import math
import struct

import numpy as np

from .errors import InvalidParameterError, ParameterMismatchError, SketchFormatError

_MASK64 = 0xFFFFFFFFFFFFFFFF

# Mean of (raw estimate / m) measured at each true cardinality x*m
# (pooled over p in {12,13,14}, ~150 trials per point).  Interpolating the
# inverse mapping de-biases the raw branch; both columns are strictly
# increasing so the corrected estimate stays monotone in the raw one.
_BIAS_X = (0.45, 0.55, 0.65, 0.75, 0.85, 0.95, 1.1, 1.3, 1.5, 1.75, 2.0,
           2.5, 3.0, 4.0, 5.0, 6.5, 8.0, 10.0, 13.0, 17.0, 22.0, 30.0)
_BIAS_Y = (0.96069, 1.02054, 1.0822, 1.1464, 1.21232, 1.28023, 1.38792,
           1.5368, 1.69124, 1.89763, 2.11201, 2.55731, 3.03112, 4.00649,
           4.99956, 6.49722, 8.0114, 10.00854, 12.9815, 16.99731,
           22.00011, 30.02739)

_U = np.uint64


def mix64(x: int, seed: int) -> int:
    """Seeded 64-bit finalizer (splitmix64 style).

    Items added to the sketch are Rabin fingerprints, which are
    arithmetically correlated for similar strings; this scrambles them into
    uniform register assignments.
    """
    z = (x ^ seed) & _MASK64
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _MASK64
    z ^= z >> 31
    return z


def mix64_vec(x: np.ndarray, seed: int) -> np.ndarray:
    """Vectorized :func:`mix64` over a uint64 array."""
    z = x ^ _U(seed)
    z ^= z >> _U(30)
    z *= _U(0xBF58476D1CE4E5B9)
    z ^= z >> _U(27)
    z *= _U(0x94D049BB133111EB)
    z ^= z >> _U(31)
    return z


def _alpha(m: int) -> float:
    if m <= 16:
        return 0.673
    if m <= 32:
        return 0.697
    if m <= 64:
        return 0.709
    return 0.7213 / (1.0 + 1.079 / m)


class CardinalitySketch:
    """2^p one-byte registers estimating the number of distinct items added."""

    __slots__ = ("p", "seed", "registers")

    def __init__(self, p: int = 14, seed: int = 0, registers: np.ndarray | None = None):
        if not 4 <= p <= 20:
            raise InvalidParameterError(f"precision p must be in [4, 20], got {p}")
        self.p = p
        self.seed = seed & _MASK64
        m = 1 << p
        if registers is None:
            registers = np.zeros(m, dtype=np.uint8)
        elif registers.shape != (m,) or registers.dtype != np.uint8:
            raise InvalidParameterError("register buffer must be uint8 of length 2^p")
        self.registers = registers

    @property
    def m(self) -> int:
        return 1 << self.p

    def add(self, item: int) -> None:
        h = mix64(item, self.seed)
        idx = h >> (64 - self.p)
        tail = (h << self.p) & _MASK64
        # rank = leading zeros of the remaining bits + 1
        rank = (64 - self.p + 1) if tail == 0 else (65 - tail.bit_length())
        if rank > self.registers[idx]:
            self.registers[idx] = rank

    def add_many(self, items: np.ndarray) -> None:
        """Bulk add of a uint64 array; register-identical to repeated add()."""
        if items.size == 0:
            return
        h = mix64_vec(items.astype(np.uint64, copy=False), self.seed)
        idx = (h >> _U(64 - self.p)).astype(np.int64)
        tail = h << _U(self.p)
        bl = np.zeros(tail.shape, dtype=np.int64)
        t = tail.copy()
        for b in (32, 16, 8, 4, 2, 1):
            hi = t >> _U(b)
            mask = hi > 0
            bl[mask] += b
            t[mask] = hi[mask]
        bl[tail > 0] += 1
        rank = np.where(tail == 0, 64 - self.p + 1, 65 - bl).astype(np.uint8)
        np.maximum.at(self.registers, idx, rank)

    def _check_compatible(self, other: "CardinalitySketch") -> None:
        if self.p != other.p:
            raise ParameterMismatchError(f"precision differs: {self.p} != {other.p}")
        if self.seed != other.seed:
            raise ParameterMismatchError(f"hash seed differs: {self.seed} != {other.seed}")

    def merge(self, other: "CardinalitySketch") -> "CardinalitySketch":
        """Sketch of the union of both item sets (element-wise register max)."""
        self._check_compatible(other)
        return CardinalitySketch(self.p, self.seed,
                                 np.maximum(self.registers, other.registers))

    def merge_into(self, other: "CardinalitySketch") -> None:
        self._check_compatible(other)
        np.maximum(self.registers, other.registers, out=self.registers)

    def estimate(self) -> float:
        m = self.m
        zeros = int(np.count_nonzero(self.registers == 0))
        if zeros > m // 2:
            # occupancy counting; exact 0 for the empty sketch
            return m * math.log(m / zeros)
        s = float(np.exp2(-self.registers.astype(np.float64)).sum())
        y = _alpha(m) * m / s  # raw estimate / m
        if y <= _BIAS_Y[0]:
            x = _BIAS_X[0] * y / _BIAS_Y[0]
        elif y >= _BIAS_Y[-1]:
            x = _BIAS_X[-1] + (y - _BIAS_Y[-1])
        else:
            x = float(np.interp(y, _BIAS_Y, _BIAS_X))
        # floor keeps the raw branch above anything linear counting can return
        return max(m * x, m * math.log(2.0))

    def copy(self) -> "CardinalitySketch":
        return CardinalitySketch(self.p, self.seed, self.registers.copy())

    def __eq__(self, other) -> bool:
        if not isinstance(other, CardinalitySketch):
            return NotImplemented
        return (self.p == other.p and self.seed == other.seed
                and bool(np.array_equal(self.registers, other.registers)))

    def to_bytes(self) -> bytes:
        """p (1 byte), seed (8 bytes LE), registers (2^p bytes)."""
        return struct.pack("<BQ", self.p, self.seed) + self.registers.tobytes()

    @classmethod
    def from_bytes(cls, blob: bytes) -> "CardinalitySketch":
        if len(blob) < 9:
            raise SketchFormatError("truncated cardinality sketch")
        p, seed = struct.unpack_from("<BQ", blob)
        if not 4 <= p <= 20:
            raise SketchFormatError(f"bad precision byte {p}")
        m = 1 << p
        if len(blob) != 9 + m:
            raise SketchFormatError("register payload length mismatch")
        regs = np.frombuffer(blob, dtype=np.uint8, count=m, offset=9).copy()
        return cls(p, seed, regs)
