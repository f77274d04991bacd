"""Normalized compression distance from sketches, plus distance matrices.

NCD(S, T) = (delta(S,T) - min(delta(S), delta(T))) / max(delta(S), delta(T)),
with every delta replaced by its sketch estimate; the pairwise estimate
comes from merging the two sketches.  For the estimate to land within an
additive eps of the true NCD, the sketches must be built with relative
error eps/5 (see epsilon_for_ncd).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidParameterError
from .sketch import DeltaSketch


def epsilon_for_ncd(ncd_epsilon: float) -> float:
    """The sketch construction epsilon needed for an additive ncd_epsilon
    guarantee on the distances."""
    return ncd_epsilon / 5.0


def ncd_from_sketches(sa: DeltaSketch, sb: DeltaSketch) -> tuple[float, float]:
    """(raw, clamped) distance; the inputs are left untouched."""
    da = sa.estimate()
    db = sb.estimate()
    dab = sa.merge(sb).estimate()
    hi = max(da, db)
    if hi <= 0.0:
        raise InvalidParameterError("distance undefined: both sketches are empty")
    raw = (dab - min(da, db)) / hi
    return raw, min(max(raw, 0.0), 1.0)


@dataclass
class DistanceMatrix:
    names: list[str]
    values: list[list[float]]  # clamped, symmetric, zero diagonal
    raw: list[list[float]]


def ncd_matrix(sketches: list[DeltaSketch], names: list[str]) -> DistanceMatrix:
    """All-pairs distances; one merge per pair, inputs unmodified."""
    if len(sketches) != len(names):
        raise InvalidParameterError("one name per sketch required")
    if len(sketches) < 2:
        raise InvalidParameterError("need at least two sketches")
    n = len(sketches)
    estimates = [sk.estimate() for sk in sketches]
    values = [[0.0] * n for _ in range(n)]
    raw = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            da, db = estimates[i], estimates[j]
            hi = max(da, db)
            if hi <= 0.0:
                raise InvalidParameterError(
                    f"distance undefined: '{names[i]}' and '{names[j]}' are both empty")
            dab = sketches[i].merge(sketches[j]).estimate()
            r = (dab - min(da, db)) / hi
            c = min(max(r, 0.0), 1.0)
            raw[i][j] = raw[j][i] = r
            values[i][j] = values[j][i] = c
    return DistanceMatrix(list(names), values, raw)


def write_phylip(m: DistanceMatrix) -> str:
    """Square PHYLIP distance format: count line, then one row per sequence
    with the name padded or truncated to 10 characters."""
    lines = [str(len(m.names))]
    for name, row in zip(m.names, m.values):
        cells = " ".join(f"{v:.6f}" for v in row)
        lines.append(f"{name[:10]:<10}{cells}")
    return "\n".join(lines) + "\n"


def write_tsv(m: DistanceMatrix) -> str:
    """Long-form pairs: name, name, raw, clamped."""
    lines = ["a\tb\traw\tclamped"]
    for i in range(len(m.names)):
        for j in range(i + 1, len(m.names)):
            lines.append(f"{m.names[i]}\t{m.names[j]}"
                         f"\t{m.raw[i][j]:.6f}\t{m.values[i][j]:.6f}")
    return "\n".join(lines) + "\n"
