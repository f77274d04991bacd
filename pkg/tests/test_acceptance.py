"""Acceptance gate: the ten quantitative criteria, one test each.

Each test prints a single PASS line with its measured numbers (visible with
pytest -s or in captured output on failure); tolerances are the contract
values, not tuned to the implementation.
"""

import math
import random
import time
from fractions import Fraction

import numpy as np

from deltasketch.cardinality import CardinalitySketch
from deltasketch.ncd import ncd_matrix, write_phylip
from deltasketch.oracle import (
    exact_delta_pair,
    exact_ncd,
    exact_profile,
    naive_bwt,
)
from deltasketch.rlbwt import SENTINEL, DynamicRLBWT
from deltasketch.sketch import SketchParams, build_in_memory, sampled_lengths
from deltasketch.stream import StreamEstimator

from conftest import fibonacci_word, periodic, random_bytes, thue_morse
from test_ncd import parse_phylip


def _family_strings(rng, lengths):
    out = []
    for n in lengths:
        out.append(fibonacci_word(n))
        out.append(thue_morse(n))
        out.append(periodic(n))
        for sigma in (2, 4, 26):
            out.append(random_bytes(rng, n, sigma))
    return out


def _stream_sketch(data, params, seed=None, n=None):
    if seed is not None:
        params = SketchParams(epsilon=params.epsilon, n_max=params.n_max,
                              alpha=params.alpha, p=params.p, q=params.q,
                              seed=seed)
    est = StreamEstimator(params, n if n is not None else max(2, len(data)))
    est.feed(data)
    return est.finalize()


def test_criterion_1_deterministic_sampling_band():
    # sampling-only error: with exact per-length counts restricted to the
    # grid, the max stays within [(1-eps) delta, delta]; zero violations
    t0 = time.time()
    rng = random.Random(101)
    lengths = [round(100 * (5000 / 100) ** (i / 33)) for i in range(34)]
    strings = _family_strings(rng, lengths)[:200]
    assert len(strings) == 200
    violations = 0
    for s in strings:
        prof = exact_profile(s)
        for eps in (0.1, 0.5, 1.0):
            grid = sampled_lengths(1 + eps / 4, len(s)) if len(s) >= 2 else [1]
            best = max(Fraction(prof.dk(k), k) for k in grid if k <= len(s))
            if not (1 - eps) * prof.delta <= best <= prof.delta:
                violations += 1
    elapsed = time.time() - t0
    assert violations == 0
    assert elapsed < 120
    print(f"\n[criterion 1] PASS: 200 strings x 3 epsilon, 0 violations, "
          f"{elapsed:.1f}s")


def test_criterion_2_cardinality_error_table():
    t0 = time.time()
    rng = random.Random(202)
    errs = []
    for seed in range(50):
        for true_n in (10**3, 10**4, 10**5):
            sk = CardinalitySketch(14, seed=seed)
            items = np.array([rng.getrandbits(64) for _ in range(true_n)],
                             dtype=np.uint64)
            sk.add_many(items)
            errs.append(abs(sk.estimate() - true_n) / true_n)
    errs.sort()
    avg = sum(errs) / len(errs)
    p95 = errs[int(0.95 * len(errs))]
    elapsed = time.time() - t0
    assert avg <= 0.01, (avg, p95)
    assert p95 <= 0.025, (avg, p95)
    assert elapsed < 60
    print(f"\n[criterion 2] PASS: avg rel err {avg:.4f} (<=0.01), "
          f"p95 {p95:.4f} (<=0.025), {elapsed:.1f}s")


def test_criterion_3_end_to_end_accuracy():
    t0 = time.time()
    rng = random.Random(303)
    params = SketchParams(epsilon=0.2, n_max=10**4, p=14)
    strings = _family_strings(rng, [10**4])  # 6 family strings
    # extra random draws to reach 20 distinct strings
    for sigma in (2, 4, 26):
        for _ in range(5):
            strings.append(random_bytes(rng, 10**4, sigma))
    strings = strings[:20]
    hits = trials = 0
    for s in strings:
        delta = float(exact_profile(s).delta)
        for seed in range(5):
            est, _ = _stream_sketch(s, params, seed=seed * 7919 + 13)
            trials += 1
            hits += 0.8 * delta <= est <= 1.2 * delta
    elapsed = time.time() - t0
    assert trials == 100
    assert hits >= 95, hits
    assert elapsed < 300
    print(f"\n[criterion 3] PASS: {hits}/100 trials in (1±0.2)·delta, "
          f"{elapsed:.1f}s")


def test_criterion_4_stream_in_memory_bit_exactness():
    rng = random.Random(404)
    params = SketchParams(epsilon=1.0, n_max=10**4, p=10)
    for _ in range(100):
        n = rng.randrange(1, 10**4 + 1)
        data = random_bytes(rng, n, sigma=rng.choice([2, 4, 256]))
        ref = build_in_memory(data, params)
        est = StreamEstimator(params, max(2, n), k_override=max(2, n))
        est.feed(data)
        _, sk = est.finalize()
        assert np.array_equal(ref.regs, sk.regs)
        assert ref.fps == sk.fps and ref.fp_all == sk.fp_all
    # forced tiny window, histories served by the RLBWT, no drop
    params = SketchParams(epsilon=0.5, n_max=2048, p=10)
    for _ in range(20):
        n = rng.randrange(200, 1500)
        piece = random_bytes(rng, rng.randrange(4, 16), sigma=rng.choice([2, 4]))
        data = (piece * (n // len(piece) + 1))[:n]
        ref = build_in_memory(data, params)
        est = StreamEstimator(params, n, k_override=64, rlbwt_enabled=True)
        est.feed(data)
        _, sk = est.finalize()
        assert not est.dropped
        assert np.array_equal(ref.regs, sk.regs)
        assert ref.fps == sk.fps
    print("\n[criterion 4] PASS: 100 direct + 20 rlbwt streams bit-identical "
          "to in-memory builds")


def test_criterion_5_rlbwt_exhaustive_and_random():
    # all binary strings up to length 12
    for n in range(1, 13):
        for bits in range(2**n):
            data = bytes(97 + ((bits >> i) & 1) for i in range(n))
            d = DynamicRLBWT()
            for a in data:
                d.extend(a)
            nb = naive_bwt(data)
            assert d.to_text() == nb.bwt_text()
            assert d.runs() == (nb.r, nb.r_prime)
            for j in range(1, d.length + 1):
                if d.access(j) != SENTINEL:
                    assert d.lf(j) == nb.lf[j]
    # 1000 random strings, sigma = 4, lengths <= 2000, spot-checked LF
    rng = random.Random(505)
    for trial in range(1000):
        n = rng.randrange(1, 2001)
        data = random_bytes(rng, n, sigma=4)
        d = DynamicRLBWT()
        bms = []
        ks = sorted({rng.randrange(1, n + 1) for _ in range(3)})
        for i, a in enumerate(bytes(data), 1):
            i_prime = d.extend(a)
            for bm in bms:
                bm.advance(d, i_prime)
            for k in ks:
                if i == k:
                    bms.append(d.init_bookmark(k))
            for bm in bms:  # invariant at every step
                assert d.access(bm.j) == data[i - bm.k]
        nb = naive_bwt(data)
        assert d.to_text() == nb.bwt_text()
        assert d.runs() == (nb.r, nb.r_prime)
        probe = [rng.randrange(1, d.length + 1) for _ in range(40)]
        probe = [j for j in probe if j != d.term_pos]
        assert d.lf_batch(probe) == [nb.lf[j] for j in probe]
    # Table fixture
    d = DynamicRLBWT()
    for a in b"babba":
        d.extend(a)
    assert d.to_text() == "bb$aba" and d.runs()[0] == 5 and d.lf(2) == 5
    print("\n[criterion 5] PASS: exhaustive binary <=12 (8190 strings), "
          "1000 random sigma=4 streams, fixture, bookmark invariant")


def test_criterion_6_thue_morse_large_k_hat():
    t0 = time.time()
    data = thue_morse(1 << 14)
    delta = float(exact_profile(data).delta)
    params = SketchParams(epsilon=0.25, n_max=1 << 14, p=14)
    est = StreamEstimator(params, len(data), k_override=64, rlbwt_enabled=True)
    est.feed(data)
    value, _ = est.finalize()
    elapsed = time.time() - t0
    assert not est.dropped
    assert 0.75 * delta <= value <= 1.25 * delta, (value, delta)
    assert elapsed < 120
    print(f"\n[criterion 6] PASS: thue-morse 2^14, K=64, estimate {value:.3f} "
          f"vs exact {delta:.3f}, {elapsed:.1f}s")


def test_criterion_7_structural_properties():
    rng = random.Random(707)
    for _ in range(200):
        s = random_bytes(rng, rng.randrange(2, 250), sigma=rng.choice([2, 4, 26]))
        t = random_bytes(rng, rng.randrange(2, 250), sigma=rng.choice([2, 4, 26]))
        ps, pt = exact_profile(s), exact_profile(t)
        dst = exact_delta_pair(s, t)
        assert max(ps.delta, pt.delta) <= dst <= ps.delta + pt.delta
        assert 0.0 <= exact_ncd(s, t) <= 1.0
        assert abs(dst - exact_profile(s + t).delta) <= 1
        for k in range(1, len(s)):
            assert ps.dk(k + 1) >= ps.dk(k) - 1
        assert ps.k_hat <= math.ceil(len(s) / 2)
        if len(set(s)) > 1:
            assert ps.delta >= 2
    print("\n[criterion 7] PASS: 200 pairs, all structural properties hold")


def test_criterion_8_ncd_additive_approximation():
    rng = random.Random(808)
    eps = 0.25
    params = SketchParams(epsilon=eps / 5, n_max=5000, p=14)
    hits = trials = 0
    worst = 0.0
    for _ in range(50):
        sigma_s = rng.choice([2, 4, 26])
        sigma_t = rng.choice([2, 4, 26])
        s = random_bytes(rng, 5000, sigma_s)
        t = random_bytes(rng, 5000, sigma_t)
        _, ka = _stream_sketch(s, params)
        _, kb = _stream_sketch(t, params)
        da, db = ka.estimate(), kb.estimate()
        dab = ka.merge(kb).estimate()
        raw = (dab - min(da, db)) / max(da, db)
        err = abs(raw - exact_ncd(s, t))
        worst = max(worst, err)
        trials += 1
        hits += err <= eps
    assert hits >= 0.95 * trials, (hits, trials)
    print(f"\n[criterion 8] PASS: {hits}/{trials} pairs within ±{eps} "
          f"(worst err {worst:.3f})")


def test_criterion_9_streaming_memory_bound():
    rng = np.random.default_rng(909)
    n = 100 * 10**6
    params = SketchParams(epsilon=1.0, n_max=n, p=14)

    def run(total):
        est = StreamEstimator(params, n)
        left = total
        while left:
            take = min(left, 1 << 20)
            est.feed(rng.integers(0, 256, size=take, dtype=np.uint8).tobytes())
            left -= take
        est.finalize()
        return est

    t0 = time.time()
    big = run(n)
    elapsed = time.time() - t0
    peak_bytes = big.peak_aux_words * 8
    assert peak_bytes <= 64 * 2**20, peak_bytes
    small = run(10 * 10**6)
    ratio = big.peak_aux_words / small.peak_aux_words
    assert ratio <= 1.1  # memory governed by the bound class, not the input
    print(f"\n[criterion 9] PASS: 100MB one pass in {elapsed:.0f}s, peak aux "
          f"{peak_bytes / 2**20:.1f} MiB (<=64), 10MB/100MB peak ratio "
          f"{1 / ratio:.2f}")


def test_criterion_10_all_pairs_workflow():
    t0 = time.time()
    rng = random.Random(1010)
    # 29 synthetic sequences: mutated descendants of three ancestors
    n = 81_000
    ancestors = [random_bytes(rng, n, sigma=4) for _ in range(3)]
    seqs = []
    while len(seqs) < 29:
        base = bytearray(ancestors[len(seqs) % 3])
        for _ in range(rng.randrange(n // 50)):
            base[rng.randrange(n)] = 97 + rng.randrange(4)
        seqs.append(bytes(base))
    params = SketchParams(epsilon=0.25, n_max=n, p=14)
    sketches = []
    for s in seqs:
        _, sk = _stream_sketch(s, params, n=n)
        sketches.append(sk)
    names = [f"seq{i:02d}" for i in range(29)]
    m = ncd_matrix(sketches, names)
    text = write_phylip(m)
    elapsed = time.time() - t0
    for i in range(29):
        assert m.values[i][i] == 0.0
        for j in range(29):
            assert m.values[i][j] == m.values[j][i]
    got_names, rows = parse_phylip(text)
    assert got_names == names
    assert all(abs(rows[i][j] - m.values[i][j]) <= 5e-7
               for i in range(29) for j in range(29))
    assert elapsed < 300
    print(f"\n[criterion 10] PASS: 29 x ~81k sequences, matrix + PHYLIP in "
          f"{elapsed:.0f}s")
