"""Dynamic run-length BWT of the reversed stream.

Appending a byte to the stream is a backward extension of the transform:
the terminator at position i is replaced by the new byte and a fresh
terminator is inserted at the rank i' of the new reversed stream.  The run
sequence lives in square-root-decomposed blocks (per-block length and
per-symbol totals), giving O(sqrt r)-ish locate/rank/insert, one node per
run.  Per-length bookmarks track the position j with BWT[j] equal to the
byte k positions back in the stream, which is how the streaming estimator
extracts history it no longer has a window for.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidParameterError, SentinelPositionError, WrongPhaseError

#: Terminator symbol; lexicographically below every byte.
SENTINEL = -1

_SPLIT = 64  # split a block when it holds more runs than this


class _SymCounts:
    """Fenwick tree over the 256 byte symbols (terminator excluded)."""

    __slots__ = ("tree",)

    def __init__(self):
        self.tree = [0] * 257

    def add(self, c: int, d: int) -> None:
        i = c + 1
        while i <= 256:
            self.tree[i] += d
            i += i & (-i)

    def below(self, c: int) -> int:
        """Total count of symbols strictly smaller than c."""
        i = c
        s = 0
        while i > 0:
            s += self.tree[i]
            i -= i & (-i)
        return s


class _Block:
    __slots__ = ("syms", "lens", "total", "counts")

    def __init__(self, syms, lens):
        self.syms = syms
        self.lens = lens
        self.total = sum(lens)
        self.counts: dict[int, int] = {}
        for s, l in zip(syms, lens):
            self.counts[s] = self.counts.get(s, 0) + l

    def bump(self, sym: int, d: int) -> None:
        self.total += d
        c = self.counts.get(sym, 0) + d
        if c:
            self.counts[sym] = c
        else:
            del self.counts[sym]


@dataclass
class Bookmark:
    """A maintained BWT position j with BWT[j] = the byte k back in the stream."""

    k: int
    j: int = 0
    state: str = "pending"  # pending | active | retired

    def advance(self, bwt: "DynamicRLBWT", i_prime: int) -> None:
        """Re-establish the invariant after an extension that inserted the
        terminator at i_prime (same push)."""
        if self.state != "active":
            return
        if self.j >= i_prime:
            self.j += 1
        self.j = bwt.lf(self.j)


class DynamicRLBWT:
    """Run-length BWT of reversed(stream) + terminator, under byte appends."""

    def __init__(self):
        self.blocks: list[_Block] = [_Block([SENTINEL], [1])]
        self.length = 1  # characters including the terminator
        self.term_pos = 1
        self.r = 1  # run count including the terminator run
        self._sym_counts = _SymCounts()

    @property
    def data_len(self) -> int:
        return self.length - 1

    # -- internal navigation ----------------------------------------------

    def _locate(self, j: int):
        """(block index, run index, 1-based offset inside the run)."""
        rem = j
        for bi, blk in enumerate(self.blocks):
            if rem <= blk.total:
                for ri, l in enumerate(blk.lens):
                    if rem <= l:
                        return bi, ri, rem
                    rem -= l
            else:
                rem -= blk.total
        raise InvalidParameterError(f"position {j} out of range 1..{self.length}")

    def _neighbor_prev(self, bi: int, ri: int):
        if ri > 0:
            return bi, ri - 1
        for b in range(bi - 1, -1, -1):
            if self.blocks[b].syms:
                return b, len(self.blocks[b].syms) - 1
        return None

    def _neighbor_next(self, bi: int, ri: int):
        if ri + 1 < len(self.blocks[bi].syms):
            return bi, ri + 1
        for b in range(bi + 1, len(self.blocks)):
            if self.blocks[b].syms:
                return b, 0
        return None

    def _maybe_split(self, bi: int) -> None:
        blk = self.blocks[bi]
        if len(blk.syms) > _SPLIT:
            half = len(blk.syms) // 2
            right = _Block(blk.syms[half:], blk.lens[half:])
            self.blocks[bi] = _Block(blk.syms[:half], blk.lens[:half])
            self.blocks.insert(bi + 1, right)

    # -- queries ------------------------------------------------------------

    def access(self, j: int) -> int:
        """BWT[j] (SENTINEL for the terminator)."""
        if not 1 <= j <= self.length:
            raise InvalidParameterError(f"position {j} out of range 1..{self.length}")
        bi, ri, _ = self._locate(j)
        return self.blocks[bi].syms[ri]

    def rank(self, c: int, j: int) -> int:
        """Occurrences of symbol c in BWT[1..j]."""
        rem = j
        total = 0
        for blk in self.blocks:
            if rem > blk.total:
                total += blk.counts.get(c, 0)
                rem -= blk.total
                continue
            for sym, l in zip(blk.syms, blk.lens):
                take = min(rem, l)
                if sym == c:
                    total += take
                rem -= l
                if rem <= 0:
                    return total
            return total
        return total

    def _class_start(self, c: int) -> int:
        # suffixes starting with symbols below c: the terminator suffix
        # plus every smaller data symbol
        return 1 + self._sym_counts.below(c)

    def lf(self, j: int) -> int:
        """LF step at a data position."""
        c = self.access(j)
        if c == SENTINEL:
            raise SentinelPositionError(f"LF undefined at terminator position {j}")
        return self._class_start(c) + self.rank(c, j)

    def lf_batch(self, positions: list[int]) -> list[int]:
        """LF of many positions in one sweep over the runs."""
        if not positions:
            return []
        order = sorted(range(len(positions)), key=positions.__getitem__)
        out = [0] * len(positions)
        counts: dict[int, int] = {}
        qi = 0
        pos_end = 0  # chars consumed so far
        for blk in self.blocks:
            nxt = positions[order[qi]]
            if nxt > pos_end + blk.total:
                for s, l in blk.counts.items():
                    counts[s] = counts.get(s, 0) + l
                pos_end += blk.total
                continue
            for sym, l in zip(blk.syms, blk.lens):
                while qi < len(order) and positions[order[qi]] <= pos_end + l:
                    j = positions[order[qi]]
                    if sym == SENTINEL:
                        raise SentinelPositionError(
                            f"LF undefined at terminator position {j}")
                    rank_c = counts.get(sym, 0) + (j - pos_end)
                    out[order[qi]] = self._class_start(sym) + rank_c
                    qi += 1
                counts[sym] = counts.get(sym, 0) + l
                pos_end += l
                if qi == len(order):
                    return out
        if qi != len(order):
            raise InvalidParameterError("batch position out of range")
        return out

    def runs(self) -> tuple[int, int]:
        """(r, r') - run counts with and without the terminator."""
        if self.length == 1:
            return 1, 0
        bi, ri, _ = self._locate(self.term_pos)
        prev = self._neighbor_prev(bi, ri)
        nxt = self._neighbor_next(bi, ri)
        fused = (prev is not None and nxt is not None
                 and self.blocks[prev[0]].syms[prev[1]]
                 == self.blocks[nxt[0]].syms[nxt[1]])
        return self.r, self.r - 1 - (1 if fused else 0)

    def run_list(self) -> list[tuple[int, int]]:
        """Flat (symbol, length) dump for test diffs."""
        out = []
        for blk in self.blocks:
            out.extend(zip(blk.syms, blk.lens))
        return out

    def to_text(self) -> str:
        return "".join(("$" if s == SENTINEL else chr(s)) * l
                       for s, l in self.run_list())

    # -- extension ----------------------------------------------------------

    def _delete_run(self, bi: int, ri: int) -> None:
        blk = self.blocks[bi]
        sym, l = blk.syms[ri], blk.lens[ri]
        del blk.syms[ri], blk.lens[ri]
        blk.bump(sym, -l)
        if not blk.syms and len(self.blocks) > 1:
            del self.blocks[bi]

    def extend(self, a: int) -> int:
        """Append data byte a to the stream; returns the insertion position
        i' of the new terminator."""
        if not 0 <= a <= 255:
            raise InvalidParameterError(f"data byte out of range: {a}")
        i = self.term_pos
        bi, ri, _ = self._locate(i)
        blk = self.blocks[bi]
        assert blk.syms[ri] == SENTINEL

        prev = self._neighbor_prev(bi, ri)
        nxt = self._neighbor_next(bi, ri)
        prev_sym = self.blocks[prev[0]].syms[prev[1]] if prev else None
        nxt_sym = self.blocks[nxt[0]].syms[nxt[1]] if nxt else None

        # replace the terminator with a, fusing equal neighbors
        if prev_sym == a and nxt_sym == a:
            nb, nr = nxt
            nlen = self.blocks[nb].lens[nr]
            self._delete_run(nb, nr)
            bi2, ri2, _ = self._locate(i)  # indices may have shifted
            self._delete_run(bi2, ri2)
            pb, pr, _ = self._locate(i - 1)
            self.blocks[pb].lens[pr] += 1 + nlen
            self.blocks[pb].bump(a, 1 + nlen)
            self.r -= 2
        elif prev_sym == a:
            self._delete_run(bi, ri)
            pb, pr, _ = self._locate(i - 1)
            self.blocks[pb].lens[pr] += 1
            self.blocks[pb].bump(a, 1)
            self.r -= 1
        elif nxt_sym == a:
            self._delete_run(bi, ri)
            nb2, nr2, off = self._locate(i)
            assert off == 1 and self.blocks[nb2].syms[nr2] == a
            self.blocks[nb2].lens[nr2] += 1
            self.blocks[nb2].bump(a, 1)
            self.r -= 1
        else:
            blk.syms[ri] = a
            blk.bump(SENTINEL, -1)
            blk.bump(a, 1)
        self._sym_counts.add(a, 1)

        # rank of the new reversed stream among the suffixes
        i_prime = self._class_start(a) + self.rank(a, i)

        # insert the new terminator so it occupies position i_prime
        if i_prime == self.length + 1:
            lb = self.blocks[-1]
            lb.syms.append(SENTINEL)
            lb.lens.append(1)
            lb.bump(SENTINEL, 1)
            self.r += 1
            self._maybe_split(len(self.blocks) - 1)
        else:
            tb, tr, off = self._locate(i_prime)
            tblk = self.blocks[tb]
            if off == 1:
                tblk.syms.insert(tr, SENTINEL)
                tblk.lens.insert(tr, 1)
                tblk.bump(SENTINEL, 1)
                self.r += 1
            else:
                sym, l = tblk.syms[tr], tblk.lens[tr]
                tblk.syms[tr:tr + 1] = [sym, SENTINEL, sym]
                tblk.lens[tr:tr + 1] = [off - 1, 1, l - off + 1]
                tblk.bump(SENTINEL, 1)
                self.r += 2
            self._maybe_split(tb)

        self.term_pos = i_prime
        self.length += 1
        return i_prime

    # -- bookmarks ------------------------------------------------------------

    def init_bookmark(self, k: int) -> Bookmark:
        """Activate a bookmark for window length k.

        Must be called right after the extension that brought the stream
        (terminator included) to length k + 1, i.e. data length k; at that
        point LF at the terminator - which is always position 1, the rank of
        the terminator suffix - lands on the byte k back in the stream.
        """
        if self.data_len != k:
            raise WrongPhaseError(
                f"bookmark for k={k} must be initialized at data length {k}, "
                f"stream has {self.data_len}")
        return Bookmark(k=k, j=1, state="active")
