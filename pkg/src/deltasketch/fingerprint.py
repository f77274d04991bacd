"""Polynomial (Rabin) fingerprints of byte strings with O(1) rolling updates.

The fingerprint of a byte string W is the Horner evaluation of its bytes in
base 256 modulo a large prime q.  Appending a byte and sliding a fixed-length
window both take a constant number of modular multiplications once sigma^(k-1)
mod q is known for the window length k.
"""

from __future__ import annotations

from .errors import InvalidParameterError, MissingPowerError

#: Default modulus: the Mersenne prime 2^61 - 1.  A fixed large prime instead
#: of a randomly sampled one; collisions between distinct windows are
#: vanishingly rare at any realistic scale (see the collision regression test).
DEFAULT_MODULUS = (1 << 61) - 1

#: One base value per possible byte, so no alphabet-discovery pass is needed.
SIGMA = 256


def mod_pow(base: int, exponent: int, q: int) -> int:
    """base**exponent mod q by binary exponentiation."""
    if q < 2:
        raise InvalidParameterError(f"modulus must be >= 2, got {q}")
    if exponent < 0:
        raise InvalidParameterError("exponent must be non-negative")
    return pow(base, exponent, q)


class FingerprintContext:
    """Immutable fingerprinting parameters plus precomputed window powers.

    ``pow_table[k]`` holds sigma^(k-1) mod q for every window length k that
    will be slid; it is what makes :meth:`slide` constant-time.
    """

    __slots__ = ("q", "sigma", "pow_table")

    def __init__(self, window_lengths=(), q: int = DEFAULT_MODULUS, sigma: int = SIGMA):
        if q <= sigma:
            raise InvalidParameterError(f"modulus q={q} must exceed base sigma={sigma}")
        self.q = q
        self.sigma = sigma
        self.pow_table = {int(k): mod_pow(sigma, int(k) - 1, q) for k in window_lengths}

    def full(self, data: bytes) -> int:
        """Fingerprint of a whole byte string (empty string -> 0)."""
        q, sigma = self.q, self.sigma
        fp = 0
        for b in data:
            fp = (fp * sigma + b) % q
        return fp

    def append(self, fp: int, incoming: int) -> int:
        """Fingerprint of W + incoming, given fp = fingerprint(W)."""
        return (fp * self.sigma + incoming) % self.q

    def slide(self, fp: int, outgoing: int, incoming: int, k: int) -> int:
        """Shift a length-k window right by one byte.

        fp must be the fingerprint of a window whose first byte is
        ``outgoing``; the result is the fingerprint of the window ending in
        ``incoming``.
        """
        try:
            p = self.pow_table[k]
        except KeyError:
            raise MissingPowerError(k) from None
        return ((fp - outgoing * p) * self.sigma + incoming) % self.q
