"""PNG / PGM reading and writing on the [0, 1] intensity scale."""

from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from ._util import luminance
from .errors import ImageIOError

__all__ = ["read_image", "load_image", "save_image", "save_kernel_image"]

_FORMATS = {".png": "PNG", ".pgm": "PPM", ".ppm": "PPM", ".pnm": "PPM"}


def read_image(path):
    """Read an 8- or 16-bit PNG/PGM.

    Returns ``(H, W)`` for grayscale files and ``(H, W, 3)`` for colour,
    scaled to [0, 1] by the bit depth's maximum code value.
    """
    path = Path(path)
    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            if mode in ("I;16", "I;16B", "I;16L", "I"):
                data = np.asarray(im, dtype=np.float64)
                if data.min() < 0 or data.max() > 65535:
                    raise ImageIOError(path, f"unsupported {mode} pixel range")
                return data / 65535.0
            if mode in ("L", "1", "P", "LA"):
                if mode == "P" and "transparency" not in im.info and _palette_is_color(im):
                    return np.asarray(im.convert("RGB"), dtype=np.float64) / 255.0
                return np.asarray(im.convert("L"), dtype=np.float64) / 255.0
            if mode in ("RGB", "RGBA", "CMYK", "YCbCr"):
                return np.asarray(im.convert("RGB"), dtype=np.float64) / 255.0
            raise ImageIOError(path, f"unsupported image mode {mode}")
    except FileNotFoundError:
        raise ImageIOError(path, "no such file") from None
    except UnidentifiedImageError:
        raise ImageIOError(path, "not a PNG/PGM image or corrupt") from None
    except (OSError, ValueError) as exc:
        if isinstance(exc, ImageIOError):
            raise
        raise ImageIOError(path, str(exc)) from None


def _palette_is_color(im):
    rgb = np.asarray(im.convert("RGB"))
    return not (np.array_equal(rgb[..., 0], rgb[..., 1]) and np.array_equal(rgb[..., 1], rgb[..., 2]))


def load_image(path):
    """Read an image as one intensity plane (BT.601 luma for colour files)."""
    img = read_image(path)
    return luminance(img) if img.ndim == 3 else img


def save_image(img, path, bits=8):
    """Clamp to [0, 1], quantize and write; the format follows the suffix."""
    path = Path(path)
    fmt = _FORMATS.get(path.suffix.lower())
    if fmt is None:
        raise ImageIOError(path, "output must be .png or .pgm")
    data = np.clip(np.asarray(img, dtype=np.float64), 0.0, 1.0)
    if bits == 8:
        arr = np.round(data * 255.0).astype(np.uint8)
        im = Image.fromarray(arr, mode="RGB" if arr.ndim == 3 else "L")
    elif bits == 16 and data.ndim == 2:
        arr = np.round(data * 65535.0).astype(np.uint16)
        im = Image.fromarray(arr)
    else:
        raise ImageIOError(path, f"cannot write {bits}-bit {'colour' if data.ndim == 3 else 'gray'} image")
    try:
        im.save(path, format=fmt)
    except OSError as exc:
        raise ImageIOError(path, str(exc)) from None


def save_kernel_image(k, path):
    """Write a kernel for viewing, taps rescaled so the largest is 255."""
    k = np.asarray(k, dtype=np.float64)
    peak = k.max()
    save_image(k / peak if peak > 0 else k, path)
