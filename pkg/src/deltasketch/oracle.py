"""Exact reference computations: substring complexity profiles, pairwise
complexity, exact NCD, and a naive BWT of the reversed stream.

Everything here is brute force (quadratic is fine) and collision-free by
construction; it is the ground truth the sketching and streaming modules are
tested against.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidParameterError

#: Terminator symbol in integer-alphabet BWTs; smaller than every byte.
SENTINEL = -1

# Above this length the profile switches from literal substring sets to the
# suffix-array route (still exact, just not quadratic in time or memory).
_SET_LIMIT = 1 << 7


@dataclass
class ComplexityProfile:
    """Exact d_k for every k, plus the maximum of d_k / k as a rational."""

    d: list[int]  # d[i] = number of distinct substrings of length i + 1
    delta: Fraction
    k_hat: int  # smallest maximizing length

    def dk(self, k: int) -> int:
        return self.d[k - 1]


def suffix_array(a: np.ndarray) -> np.ndarray:
    """Suffix array of an integer sequence (prefix-doubling, O(n log^2 n))."""
    n = len(a)
    if n == 0:
        return np.empty(0, dtype=np.int64)
    rank = np.unique(a, return_inverse=True)[1].astype(np.int64)
    k = 1
    order = np.argsort(rank, kind="stable")
    while True:
        key2 = np.full(n, -1, dtype=np.int64)
        if k < n:
            key2[:-k] = rank[k:]
        order = np.lexsort((key2, rank))
        changed = np.ones(n, dtype=np.int64)
        changed[1:] = ((rank[order[1:]] != rank[order[:-1]])
                       | (key2[order[1:]] != key2[order[:-1]])).astype(np.int64)
        new_rank = np.cumsum(changed) - 1
        rank = np.empty(n, dtype=np.int64)
        rank[order] = new_rank
        if new_rank[-1] == n - 1:
            return order
        k *= 2


def lcp_array(a: np.ndarray, sa: np.ndarray) -> np.ndarray:
    """Kasai's algorithm; lcp[i] is the common-prefix length of the suffixes
    at sa[i] and sa[i+1]."""
    n = len(a)
    if n < 2:
        return np.empty(0, dtype=np.int64)
    rank = np.empty(n, dtype=np.int64)
    rank[sa] = np.arange(n)
    lcp = np.zeros(n - 1, dtype=np.int64)
    h = 0
    for i in range(n):
        r = rank[i]
        if r == n - 1:
            h = 0
            continue
        j = sa[r + 1]
        while i + h < n and j + h < n and a[i + h] == a[j + h]:
            h += 1
        lcp[r] = h
        if h:
            h -= 1
    return lcp


def _best(d: list[int]) -> tuple[Fraction, int]:
    best_num, best_den = 0, 1
    for k, dk in enumerate(d, start=1):
        if dk * best_den > best_num * k:  # strict: ties break to smallest k
            best_num, best_den = dk, k
    return Fraction(best_num, best_den), best_den


def _profile_sets(s: bytes) -> list[int]:
    n = len(s)
    return [len({s[i:i + k] for i in range(n - k + 1)}) for k in range(1, n + 1)]


def _profile_suffix_array(s: bytes) -> list[int]:
    n = len(s)
    a = np.frombuffer(s, dtype=np.uint8).astype(np.int64)
    sa = suffix_array(a)
    lcp = lcp_array(a, sa)
    # d_k = (n - k + 1) - #{adjacent suffix pairs sharing a k-prefix}
    cnt = np.bincount(lcp, minlength=n + 1)
    ge = np.cumsum(cnt[::-1])[::-1]  # ge[k] = #{lcp >= k}
    return [int(n - k + 1 - ge[k]) for k in range(1, n + 1)]


def exact_profile(s: bytes) -> ComplexityProfile:
    """Exact d_k for all k plus delta = max d_k / k (as a rational)."""
    if len(s) < 1:
        raise InvalidParameterError("exact_profile requires a nonempty string")
    d = _profile_sets(s) if len(s) <= _SET_LIMIT else _profile_suffix_array(s)
    delta, k_hat = _best(d)
    return ComplexityProfile(d, delta, k_hat)


def exact_delta_pair(s: bytes, t: bytes) -> Fraction:
    """max over k of |D_k(S) union D_k(T)| / k, exactly.

    Windows never cross a string boundary.  Iterates k upward and stops once
    the count upper bound (number of windows remaining) can no longer beat
    the current maximum; that bound is decreasing in k, so the cutoff is safe.
    """
    if not s or not t:
        raise InvalidParameterError("exact_delta_pair requires nonempty strings")
    best_num, best_den = 0, 1
    for k in range(1, max(len(s), len(t)) + 1):
        ub = max(0, len(s) - k + 1) + max(0, len(t) - k + 1)
        if ub * best_den <= best_num * k:
            break
        u = len({s[i:i + k] for i in range(len(s) - k + 1)}
                | {t[i:i + k] for i in range(len(t) - k + 1)})
        if u * best_den > best_num * k:
            best_num, best_den = u, k
    return Fraction(best_num, best_den)


def exact_ncd(s: bytes, t: bytes) -> float:
    """Normalized compression distance under the exact complexity measure."""
    ds = exact_profile(s).delta
    dt = exact_profile(t).delta
    dst = exact_delta_pair(s, t)
    return float((dst - min(ds, dt)) / max(ds, dt))


@dataclass
class NaiveBWT:
    """BWT of the reversed input with a terminator, built by suffix sorting.

    Positions are 1-based to match the dynamic structure's API.  ``lf[j]``
    is defined for every position (at the terminator it gives 1, the rank of
    the terminator suffix).
    """

    bwt: list[int]  # SENTINEL marks the terminator
    r: int
    r_prime: int
    lf: list[int]  # 1-based; lf[0] is unused

    def bwt_text(self) -> str:
        return "".join("$" if c == SENTINEL else chr(c) for c in self.bwt)


def _run_count(seq: list[int]) -> int:
    return sum(1 for i, c in enumerate(seq) if i == 0 or seq[i - 1] != c)


def naive_bwt(s: bytes) -> NaiveBWT:
    """Sort all suffixes of reversed(s) + terminator; O(n^2 log n)."""
    t = list(s[::-1]) + [SENTINEL]
    n = len(t)
    sa = sorted(range(n), key=lambda i: t[i:])
    bwt = [t[(sa[j] - 1) % n] for j in range(n)]
    inv = [0] * n
    for j, i in enumerate(sa):
        inv[i] = j
    lf = [0] + [inv[(sa[j] - 1) % n] + 1 for j in range(n)]
    r = _run_count(bwt)
    r_prime = _run_count([c for c in bwt if c != SENTINEL])
    return NaiveBWT(bwt, r, r_prime, lf)
