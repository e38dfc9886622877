import numpy as np

from .errors import InvalidInputError


def as_image(img, name="image"):
    """Return ``img`` as a finite 2-D float64 array or raise."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise InvalidInputError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite values")
    return arr


def check_positive(value, name):
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise InvalidInputError(f"{name} must be a positive finite number, got {value!r}")
    return value


def odd_at_least(value, minimum=3):
    """Round to the nearest integer, then bump up to an odd value >= minimum."""
    n = int(round(value))
    if n % 2 == 0:
        n += 1
    return max(n, minimum)


def luminance(rgb):
    """ITU-R BT.601 luma of an ``(H, W, 3)`` image."""
    rgb = np.asarray(rgb, dtype=np.float64)
    return rgb[..., 0] * 0.299 + rgb[..., 1] * 0.587 + rgb[..., 2] * 0.114
