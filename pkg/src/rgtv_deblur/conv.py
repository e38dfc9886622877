"""Convolution, spectra, image gradients and pyramid resampling.

Kernels are plain ``(h, h)`` float arrays with odd ``h``; the centre tap
sits at ``(h // 2, h // 2)``. Convolution is the true (flipped) convolution
``y[n] = sum_m k[m] x[n - (m - c)]``, so a kernel with its mass right of
centre moves image content to the right.
"""

import numpy as np
from scipy import fft as sfft
from scipy import ndimage

from ._util import as_image
from .errors import InvalidInputError

__all__ = [
    "KERNEL_SUM_TOL",
    "check_kernel",
    "delta_kernel",
    "kernel_otf",
    "spectrum",
    "inverse_spectrum",
    "convolve",
    "correlate",
    "image_gradients",
    "pad_for_fft",
    "crop_padding",
    "downsample",
    "resize",
    "upsample_kernel",
    "read_kernel",
    "write_kernel",
    "format_kernel",
    "parse_kernel",
]

KERNEL_SUM_TOL = 1e-9


def check_kernel(k, name="kernel", tol=KERNEL_SUM_TOL):
    """Validate a normalized blur kernel and return it as float64."""
    k = np.asarray(k, dtype=np.float64)
    if k.ndim != 2 or k.shape[0] != k.shape[1] or k.shape[0] % 2 == 0:
        raise InvalidInputError(f"{name} must be square with odd size, got {k.shape}")
    if not np.all(np.isfinite(k)) or k.min() < 0:
        raise InvalidInputError(f"{name} taps must be finite and non-negative")
    if abs(k.sum() - 1.0) > tol:
        raise InvalidInputError(f"{name} must sum to 1 (sum={k.sum():.12g})")
    return k


def delta_kernel(h):
    """Centred identity kernel of odd size ``h``."""
    h = int(h)
    if h < 1 or h % 2 == 0:
        raise InvalidInputError(f"kernel size must be odd and >= 1, got {h}")
    k = np.zeros((h, h))
    k[h // 2, h // 2] = 1.0
    return k


def kernel_otf(k, shape):
    """Real-input spectrum of ``k`` zero-padded to ``shape``, centre at the origin."""
    k = np.asarray(k, dtype=np.float64)
    rows, cols = shape
    if k.shape[0] > rows or k.shape[1] > cols:
        raise InvalidInputError(f"kernel {k.shape} larger than domain {shape}")
    padded = np.zeros(shape)
    padded[: k.shape[0], : k.shape[1]] = k
    padded = np.roll(padded, (-(k.shape[0] // 2), -(k.shape[1] // 2)), axis=(0, 1))
    return sfft.rfft2(padded)


def spectrum(img):
    """Forward transform of a real field (half spectrum along the last axis)."""
    return sfft.rfft2(np.asarray(img, dtype=np.float64))


def inverse_spectrum(spec, shape):
    """Inverse of :func:`spectrum`; ``shape`` resolves odd widths."""
    return sfft.irfft2(spec, s=shape)


def _circular(x, k, flip=False):
    otf = kernel_otf(k, x.shape)
    if flip:
        otf = np.conj(otf)
    return sfft.irfft2(sfft.rfft2(x) * otf, s=x.shape)


def convolve(img, k, boundary="replicate"):
    """Same-size convolution of ``img`` with kernel ``k``.

    Parameters
    ----------
    img : array_like, shape (H, W)
    k : array_like, shape (h, h)
        Odd-sized kernel; not required to be normalized here.
    boundary : {"replicate", "circular"}
        ``replicate`` extends the border pixels (used for synthesis and
        fidelity checks); ``circular`` wraps around (the model assumed by
        the frequency-domain solvers).
    """
    x = as_image(img)
    k = np.asarray(k, dtype=np.float64)
    if k.ndim != 2 or k.shape[0] != k.shape[1] or k.shape[0] % 2 == 0:
        raise InvalidInputError(f"kernel must be square with odd size, got {k.shape}")
    if k.shape[0] > min(x.shape):
        raise InvalidInputError(f"kernel {k.shape} larger than image {x.shape}")
    if boundary not in ("replicate", "circular"):
        raise InvalidInputError(f"unknown boundary {boundary!r}")
    r = k.shape[0] // 2
    if r == 0:
        return x * k[0, 0]
    if boundary == "circular":
        return _circular(x, k)
    padded = np.pad(x, r, mode="edge")
    return _circular(padded, k)[r:-r, r:-r]


def correlate(img, k):
    """Circular correlation, the adjoint of circular :func:`convolve`."""
    x = as_image(img)
    return _circular(x, np.asarray(k, dtype=np.float64), flip=True)


def image_gradients(img):
    """Forward differences with the last column (row) set to zero.

    Returns ``(gx, gy)`` of the same shape as ``img``.
    """
    x = as_image(img)
    if min(x.shape) < 2:
        raise InvalidInputError("image must be at least 2x2 for gradients")
    gx = np.zeros_like(x)
    gy = np.zeros_like(x)
    gx[:, :-1] = x[:, 1:] - x[:, :-1]
    gy[:-1, :] = x[1:, :] - x[:-1, :]
    return gx, gy


def pad_for_fft(img, margin):
    """Replicate-pad by at least ``margin`` on every side, up to a fast FFT size.

    Returns the padded image and the ``(top, left)`` offset of the original.
    """
    x = np.asarray(img, dtype=np.float64)
    margin = int(margin)
    out_shape = tuple(sfft.next_fast_len(n + 2 * margin, real=True) for n in x.shape)
    before = [margin + (o - n - 2 * margin) // 2 for o, n in zip(out_shape, x.shape)]
    pads = [(b, o - n - b) for b, o, n in zip(before, out_shape, x.shape)]
    return np.pad(x, pads, mode="edge"), tuple(before)


def crop_padding(padded, offset, shape):
    top, left = offset
    return padded[top : top + shape[0], left : left + shape[1]]


def _bilinear_resample(x, out_shape):
    rows = (np.arange(out_shape[0]) + 0.5) * (x.shape[0] / out_shape[0]) - 0.5
    cols = (np.arange(out_shape[1]) + 0.5) * (x.shape[1] / out_shape[1]) - 0.5
    rr, cc = np.meshgrid(rows, cols, indexing="ij")
    return ndimage.map_coordinates(x, [rr, cc], order=1, mode="nearest")


def downsample(img, factor):
    """Anti-aliased downsampling by ``factor > 1``.

    Gaussian prefilter with standard deviation ``0.5 * factor`` followed by
    bilinear sampling at the output pixel centres. Output dimensions are
    ``round(input / factor)`` and must be at least 3x3.
    """
    x = as_image(img)
    factor = float(factor)
    if not factor > 1.0:
        raise InvalidInputError(f"downsampling factor must exceed 1, got {factor}")
    out_shape = tuple(int(round(n / factor)) for n in x.shape)
    if min(out_shape) < 3:
        raise InvalidInputError(
            f"downsampling {x.shape} by {factor:g} gives {out_shape}, below 3x3"
        )
    smooth = ndimage.gaussian_filter(x, 0.5 * factor, mode="nearest")
    return _bilinear_resample(smooth, out_shape)


def resize(img, shape):
    """Bilinear resize without prefiltering (used to carry iterates up a pyramid)."""
    return _bilinear_resample(as_image(img), tuple(int(n) for n in shape))


def upsample_kernel(k, new_size, scale=None):
    """Bilinearly stretch kernel ``k`` onto an odd ``new_size`` grid.

    Grid centres are aligned. ``scale`` is the magnification between the
    two grids and defaults to ``new_size / k.size``; pyramid code passes the
    actual image scale ratio instead. Negatives are clamped and the result
    renormalized.
    """
    k = np.asarray(k, dtype=np.float64)
    old = k.shape[0]
    new_size = int(new_size)
    if new_size % 2 == 0:
        raise InvalidInputError(f"new kernel size must be odd, got {new_size}")
    if new_size < old:
        raise InvalidInputError(f"cannot upsample size {old} kernel to {new_size}")
    if scale is None:
        scale = new_size / old
    coords = (np.arange(new_size) - new_size // 2) / float(scale) + old // 2
    rr, cc = np.meshgrid(coords, coords, indexing="ij")
    out = ndimage.map_coordinates(k, [rr, cc], order=1, mode="constant", cval=0.0)
    out = np.maximum(out, 0.0)
    total = out.sum()
    if total <= 0:
        return delta_kernel(new_size)
    return out / total


def format_kernel(k):
    """Text form of a kernel: the size line, then one row per line.

    Taps are written with 17 significant digits, so parsing the text
    reproduces the array bit for bit.
    """
    k = np.asarray(k, dtype=np.float64)
    lines = [str(k.shape[0])]
    lines += [" ".join(f"{v:.17g}" for v in row) for row in k]
    return "\n".join(lines) + "\n"


def parse_kernel(text, source="<string>"):
    """Parse the kernel text format.

    Negative taps are rejected. A sum within 1e-3 of one is renormalized;
    anything further off is an error.
    """
    rows = [line.split() for line in text.splitlines() if line.strip()]
    if not rows:
        raise InvalidInputError(f"{source}: empty kernel file")
    try:
        h = int(rows[0][0])
        taps = np.array([[float(v) for v in row] for row in rows[1:]])
    except (ValueError, IndexError) as exc:
        raise InvalidInputError(f"{source}: malformed kernel file ({exc})") from None
    if len(rows[0]) != 1 or h < 1 or h % 2 == 0:
        raise InvalidInputError(f"{source}: first line must be one odd size")
    if taps.shape != (h, h):
        raise InvalidInputError(f"{source}: expected {h}x{h} taps, got {taps.shape}")
    if not np.all(np.isfinite(taps)) or taps.min() < 0:
        raise InvalidInputError(f"{source}: negative or non-finite taps")
    total = taps.sum()
    if abs(total - 1.0) > 1e-3:
        raise InvalidInputError(f"{source}: taps sum to {total:.6g}, expected 1")
    return taps if total == 1.0 else taps / total


def read_kernel(path):
    with open(path) as fh:
        return parse_kernel(fh.read(), source=str(path))


def write_kernel(k, path):
    with open(path, "w") as fh:
        fh.write(format_kernel(check_kernel(k)))

