"""Sub-linear sketches for normalized substring complexity.

The central quantity is delta(S) = max_k (distinct length-k substrings of
S) / k, a compressibility measure.  This package estimates it from a small
mergeable sketch, streams arbitrarily long inputs in one pass, and derives
normalized compression distances between strings from merged sketches.
"""

from .cardinality import CardinalitySketch
from .errors import (
    CapacityExceededError,
    DeltaSketchError,
    InvalidParameterError,
    MissingPowerError,
    NonResumableError,
    ParameterMismatchError,
    SentinelPositionError,
    SketchFormatError,
    WrongPhaseError,
)
from .fingerprint import DEFAULT_MODULUS, FingerprintContext
from .ncd import (
    DistanceMatrix,
    epsilon_for_ncd,
    ncd_from_sketches,
    ncd_matrix,
    write_phylip,
    write_tsv,
)
from .oracle import (
    ComplexityProfile,
    NaiveBWT,
    exact_delta_pair,
    exact_ncd,
    exact_profile,
    naive_bwt,
)
from .rlbwt import Bookmark, DynamicRLBWT
from .sketch import (
    DEFAULT_SEED,
    DeltaSketch,
    SketchParams,
    build_in_memory,
    sampled_lengths,
)
from .stream import StreamEstimator, default_window_capacity

__version__ = "0.1.0"

__all__ = [
    "Bookmark",
    "CapacityExceededError",
    "CardinalitySketch",
    "ComplexityProfile",
    "DEFAULT_MODULUS",
    "DEFAULT_SEED",
    "DeltaSketch",
    "DeltaSketchError",
    "DistanceMatrix",
    "DynamicRLBWT",
    "FingerprintContext",
    "InvalidParameterError",
    "MissingPowerError",
    "NaiveBWT",
    "NonResumableError",
    "ParameterMismatchError",
    "SentinelPositionError",
    "SketchFormatError",
    "SketchParams",
    "StreamEstimator",
    "WrongPhaseError",
    "build_in_memory",
    "default_window_capacity",
    "epsilon_for_ncd",
    "exact_delta_pair",
    "exact_ncd",
    "exact_profile",
    "naive_bwt",
    "ncd_from_sketches",
    "ncd_matrix",
    "sampled_lengths",
    "write_phylip",
    "write_tsv",
]
