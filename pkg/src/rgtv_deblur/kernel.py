"""Blur-kernel estimation in the gradient domain.

Given a skeleton ``x`` and the observation ``b`` the kernel minimizes

    1/2 sum_d ||(D_d x) * k - D_d b||^2 + mu ||k||^2

over both forward-difference directions ``d``. On the periodic image domain
the normal equations ``(A^T A + 2 mu I) k = A^T grad b`` are diagonal in
frequency, so the full-domain minimizer is one division of spectra. It is
then cropped around the zero shift and projected onto the valid-kernel set.
"""

from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft

from ._util import as_image, check_positive
from .errors import DegenerateInputError, DegenerateKernelError, InvalidInputError

__all__ = [
    "KernelSolveParams",
    "circular_gradients",
    "solve_kernel_full",
    "crop_kernel",
    "solve_kernel_raw",
    "solve_kernel",
    "project_kernel",
    "recenter_kernel",
]


@dataclass
class KernelSolveParams:
    mu: float = 0.05
    kernel_size: int = 3
    recenter: bool = False

    def __post_init__(self):
        check_positive(self.mu, "mu")
        if int(self.kernel_size) < 1 or int(self.kernel_size) % 2 == 0:
            raise InvalidInputError(f"kernel_size must be odd, got {self.kernel_size}")


def circular_gradients(img):
    """Periodic forward differences ``(x[:, c+1] - x[:, c], x[r+1] - x[r])``."""
    x = np.asarray(img, dtype=np.float64)
    return np.roll(x, -1, axis=1) - x, np.roll(x, -1, axis=0) - x


def solve_kernel_full(x, b, mu):
    """Full-domain minimizer, indexed by circular shift (origin at ``[0, 0]``)."""
    x = as_image(x, "x")
    b = as_image(b, "b")
    if x.shape != b.shape:
        raise InvalidInputError(f"x {x.shape} and b {b.shape} differ in shape")
    mu = check_positive(mu, "mu")
    num = 0.0
    den = 2.0 * mu
    grad_energy = 0.0
    for gx, gb in zip(circular_gradients(x), circular_gradients(b)):
        fx = sfft.rfft2(gx)
        num = num + np.conj(fx) * sfft.rfft2(gb)
        den = den + np.abs(fx) ** 2
        grad_energy += float(np.sum(gx**2))
    if grad_energy == 0.0:
        raise DegenerateInputError("skeleton has no gradients; kernel is unidentifiable")
    return sfft.irfft2(num / den, s=x.shape)


def crop_kernel(full, size):
    """``size x size`` window of a shift-indexed field, centred on zero shift."""
    size = int(size)
    r = size // 2
    return np.roll(full, (r, r), axis=(0, 1))[:size, :size].copy()


def solve_kernel_raw(x, b, mu, kernel_size):
    """Cropped kernel before thresholding and normalization."""
    x = as_image(x, "x")
    if min(x.shape) < int(kernel_size):
        raise InvalidInputError(f"image {x.shape} smaller than kernel {kernel_size}")
    return crop_kernel(solve_kernel_full(x, b, mu), kernel_size)


def project_kernel(raw):
    """Zero the negative taps and rescale to unit sum."""
    k = np.array(raw, dtype=np.float64)
    if not np.all(np.isfinite(k)):
        raise InvalidInputError("kernel taps must be finite")
    k[k < 0] = 0.0
    total = k.sum()
    if total <= 0.0:
        raise DegenerateKernelError("kernel has no positive taps")
    return k / total


def recenter_kernel(k):
    """Shift a kernel by whole pixels so its centre of mass is nearest the centre."""
    k = np.asarray(k, dtype=np.float64)
    h = k.shape[0]
    idx = np.arange(h)
    total = k.sum()
    cy = float(np.sum(k.sum(axis=1) * idx) / total)
    cx = float(np.sum(k.sum(axis=0) * idx) / total)
    sy, sx = int(round(h // 2 - cy)), int(round(h // 2 - cx))
    out = np.zeros_like(k)
    src = k[max(0, -sy) : h - max(0, sy), max(0, -sx) : h - max(0, sx)]
    out[max(0, sy) : max(0, sy) + src.shape[0], max(0, sx) : max(0, sx) + src.shape[1]] = src
    return out / out.sum()


def solve_kernel(x, b, params):
    """Estimate a normalized blur kernel from skeleton ``x`` and observation ``b``.

    Raises
    ------
    DegenerateInputError
        ``x`` is constant.
    DegenerateKernelError
        No positive taps survive the projection.
    """
    raw = solve_kernel_raw(x, b, params.mu, params.kernel_size)
    k = project_kernel(raw)
    if params.recenter:
        k = recenter_kernel(k)
    return k
