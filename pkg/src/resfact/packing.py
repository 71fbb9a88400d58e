"""Bit-packed dot products for bipolar vectors.

Maps +1 -> 1 and -1 -> 0, eight elements per byte, so the dot product of
two D-dimensional vectors reduces to D - 2 * popcount(xor).  The dense
engine does its matrix-vector work through BLAS instead; this kernel
exists as an independently verified reference for the packed layout.
"""

from __future__ import annotations

import numpy as np


def pack_bipolar(x) -> np.ndarray:
    """Pack a +-1 vector into a uint8 array, one bit per element.

    Trailing bits of the last byte are zero-padded; the original length
    must be carried separately.
    """
    arr = np.asarray(x)
    if not np.isin(arr, (-1, 1)).all():
        raise ValueError("input must contain only -1 and +1")
    return np.packbits(arr == 1)


def packed_dot(p1: np.ndarray, p2: np.ndarray, dim: int) -> int:
    """Dot product of two packed bipolar vectors of original length ``dim``.

    Computed as dim - 2 * hamming; padding bits cancel in the xor.
    """
    if p1.shape != p2.shape:
        raise ValueError(f"packed length mismatch: {p1.shape} vs {p2.shape}")
    hamming = int(np.bitwise_count(np.bitwise_xor(p1, p2)).sum())
    return dim - 2 * hamming


def packed_similarity(p1: np.ndarray, p2: np.ndarray, dim: int) -> float:
    """Cosine similarity computed on packed vectors."""
    return packed_dot(p1, p2, dim) / dim
