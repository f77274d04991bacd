import random

import pytest


def fibonacci_word(n: int) -> bytes:
    """Prefix of the infinite Fibonacci word over {a, b}."""
    a, b = b"a", b"ab"
    while len(b) < n:
        a, b = b, b + a
    return b[:n]


def thue_morse(n: int) -> bytes:
    """Prefix of the Thue-Morse sequence over {a, b}."""
    out = bytearray()
    for i in range(n):
        out.append(ord("a") + (bin(i).count("1") & 1))
    return bytes(out)


def periodic(n: int, period: bytes = b"abc") -> bytes:
    return (period * (n // len(period) + 1))[:n]


def random_bytes(rng: random.Random, n: int, sigma: int = 256) -> bytes:
    return bytes(rng.randrange(sigma) % 256 + (97 if sigma <= 26 else 0)
                 for _ in range(n))


def string_family(rng: random.Random, lengths):
    """One string per family per length: the mix used across the suite."""
    out = []
    for n in lengths:
        out.append(("fibonacci", fibonacci_word(n)))
        out.append(("thue-morse", thue_morse(n)))
        out.append(("periodic", periodic(n)))
        for sigma in (2, 4, 26):
            out.append((f"random-{sigma}", random_bytes(rng, n, sigma)))
    return out


@pytest.fixture
def rng():
    return random.Random(0xD5EED)
