"""Image and kernel quality measures."""

import math

import numpy as np

from ._util import as_image
from .errors import InvalidInputError

__all__ = ["psnr", "kernel_similarity"]


def psnr(a, b):
    """Peak signal-to-noise ratio in dB for intensities on [0, 1].

    Identical images give ``math.inf``.
    """
    a = as_image(a, "a")
    b = as_image(b, "b")
    if a.shape != b.shape:
        raise InvalidInputError(f"shape mismatch {a.shape} vs {b.shape}")
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / mse)


def _shifted(k, dy, dx):
    out = np.zeros_like(k)
    h, w = k.shape
    out[max(0, dy) : h + min(0, dy), max(0, dx) : w + min(0, dx)] = k[
        max(0, -dy) : h + min(0, -dy), max(0, -dx) : w + min(0, -dx)
    ]
    return out


def kernel_similarity(estimate, truth, max_shift=None):
    """Aligned normalized cross-correlation of two kernels.

    The larger kernel's grid is used (the smaller one is zero-padded around
    its centre), and the maximum of ``<a, shift(b)> / (|a| |b|)`` over
    integer shifts up to ``max_shift`` (default: half the grid) is
    returned. Blind estimates are only defined up to translation, hence the
    alignment.
    """
    a = np.asarray(estimate, dtype=np.float64)
    b = np.asarray(truth, dtype=np.float64)
    size = max(a.shape[0], b.shape[0])

    def embed(k):
        pad = (size - k.shape[0]) // 2
        return np.pad(k, pad)

    a, b = embed(a), embed(b)
    if max_shift is None:
        max_shift = size // 2
    norm = np.linalg.norm(a) * np.linalg.norm(b)
    if norm == 0:
        raise InvalidInputError("kernels must be non-zero")
    best = -1.0
    for dy in range(-max_shift, max_shift + 1):
        for dx in range(-max_shift, max_shift + 1):
            best = max(best, float(np.sum(a * _shifted(b, dy, dx))) / norm)
    return best
