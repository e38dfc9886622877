"""Synthetic degradations: builtin blur kernels, seeded noise, test images.

Noise generator
---------------
Noise must be reproducible from the seed alone, independent of the numpy
version, so it uses a fully specified counter-based scheme:

* uniform stream: SplitMix64. Draw ``i`` (0-based) takes
  ``z = seed + (i + 1) * 0x9E3779B97F4A7C15 (mod 2**64)``, then
  ``z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9``,
  ``z = (z ^ (z >> 27)) * 0x94D049BB133111EB``, ``z = z ^ (z >> 31)``,
  and ``u = (z >> 11) * 2**-53`` in [0, 1).
* normals: pixel ``p`` (row-major) uses draws ``2p`` and ``2p + 1`` with the
  cosine branch of Box-Muller, ``sqrt(-2 ln(1 - u0)) * cos(2 pi u1)``.
"""

import math
import re
from dataclasses import dataclass

import numpy as np

from ._util import as_image
from .conv import check_kernel, convolve, read_kernel
from .errors import InvalidInputError

__all__ = [
    "SynthSpec",
    "splitmix64_uniform",
    "gaussian_noise",
    "gaussian_kernel",
    "motion_kernel",
    "disk_kernel",
    "parse_kernel_spec",
    "synth_blur",
    "piecewise_constant_image",
    "step_edge_patch",
]

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def splitmix64_uniform(seed, count, start=0):
    """``count`` uniforms in [0, 1) from the SplitMix64 stream of ``seed``."""
    seed = np.uint64(int(seed) % 2**64)
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = seed + idx * _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * 2.0**-53


def gaussian_noise(shape, seed):
    """Standard normal field of ``shape`` (see module docstring for the algorithm)."""
    n = int(np.prod(shape))
    u = splitmix64_uniform(seed, 2 * n)
    z = np.sqrt(-2.0 * np.log1p(-u[0::2])) * np.cos(2.0 * np.pi * u[1::2])
    return z.reshape(shape)


def gaussian_kernel(std, size=None):
    """Isotropic Gaussian kernel; size defaults to ``2 * ceil(3 std) + 1``."""
    if std <= 0:
        raise InvalidInputError("gaussian std must be positive")
    if size is None:
        size = 2 * math.ceil(3 * std) + 1
    if size % 2 == 0:
        raise InvalidInputError("kernel size must be odd")
    ax = np.arange(size) - size // 2
    g = np.exp(-(ax**2) / (2.0 * std**2))
    k = np.outer(g, g)
    return k / k.sum()


def motion_kernel(length, angle, size=None, samples_per_px=16):
    """Straight-line motion blur through the centre.

    ``length`` is the extent of the path in pixels, so a horizontal
    length-7 line puts 1/7 on each of seven taps; ``angle`` is in degrees,
    counter-clockwise from the +x axis with rows growing downwards. The
    path is sampled uniformly and splatted bilinearly, with samples that
    overhang the end taps folded back onto them.
    """
    if length < 1:
        raise InvalidInputError("motion length must be >= 1")
    if size is None:
        size = int(math.ceil(length))
        size += 1 - size % 2
    if size % 2 == 0:
        raise InvalidInputError("kernel size must be odd")
    c = size // 2
    theta = math.radians(angle)
    n = max(1, int(math.ceil(samples_per_px * length)))
    t = ((np.arange(n) + 0.5) / n - 0.5) * length
    xs = np.clip(c + t * math.cos(theta), 0, size - 1)
    ys = np.clip(c - t * math.sin(theta), 0, size - 1)
    k = np.zeros((size, size))
    x0 = np.floor(xs).astype(int)
    y0 = np.floor(ys).astype(int)
    fx, fy = xs - x0, ys - y0
    for dy, dx, w in (
        (0, 0, (1 - fy) * (1 - fx)),
        (0, 1, (1 - fy) * fx),
        (1, 0, fy * (1 - fx)),
        (1, 1, fy * fx),
    ):
        rr, cc = y0 + dy, x0 + dx
        ok = (rr >= 0) & (rr < size) & (cc >= 0) & (cc < size) & (w > 0)
        np.add.at(k, (rr[ok], cc[ok]), w[ok])
    return k / k.sum()


def disk_kernel(radius, supersample=8):
    """Uniform disk (pillbox) with anti-aliased rim."""
    if radius <= 0:
        raise InvalidInputError("disk radius must be positive")
    r = int(math.ceil(radius - 1e-9))
    size = 2 * r + 1
    sub = (np.arange(size * supersample) + 0.5) / supersample - 0.5 - r
    yy, xx = np.meshgrid(sub, sub, indexing="ij")
    inside = (xx**2 + yy**2 <= radius**2).astype(float)
    k = inside.reshape(size, supersample, size, supersample).mean(axis=(1, 3))
    return k / k.sum()


_BUILTIN = re.compile(r"^builtin:(gaussian|motion|disk):([0-9eE.+\-,\s]+)$")


def parse_kernel_spec(spec):
    """Resolve a ``--kernel`` argument to a kernel array.

    Accepted forms: a kernel text file path, ``builtin:gaussian:<std>``,
    ``builtin:motion:<length>,<angle>`` and ``builtin:disk:<radius>``.
    """
    spec = spec.strip()
    if not spec.startswith("builtin:"):
        return read_kernel(spec)
    m = _BUILTIN.match(spec)
    if not m:
        raise InvalidInputError(f"cannot parse builtin kernel {spec!r}")
    kind = m.group(1)
    try:
        args = [float(a) for a in m.group(2).split(",")]
    except ValueError:
        raise InvalidInputError(f"bad numbers in {spec!r}") from None
    arity = {"gaussian": 1, "motion": 2, "disk": 1}[kind]
    if len(args) != arity:
        raise InvalidInputError(f"{kind} kernel takes {arity} argument(s)")
    if kind == "gaussian":
        return gaussian_kernel(args[0])
    if kind == "motion":
        return motion_kernel(args[0], args[1])
    return disk_kernel(args[0])


@dataclass
class SynthSpec:
    """Blur-plus-noise degradation; ``kernel`` is an array or a kernel spec string."""

    kernel: object
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.noise_sigma < 0:
            raise InvalidInputError("noise_sigma must be >= 0")
        if isinstance(self.kernel, str):
            self.kernel = parse_kernel_spec(self.kernel)
        self.kernel = check_kernel(self.kernel)


def synth_blur(sharp, spec):
    """Replicate-boundary blur, seeded Gaussian noise, clamp to [0, 1].

    Colour input ``(H, W, C)`` is blurred per channel; the noise field is
    drawn for the full array in row-major order.
    """
    x = np.asarray(sharp, dtype=np.float64)
    if x.ndim == 3:
        out = np.stack(
            [convolve(x[..., c], spec.kernel, boundary="replicate") for c in range(x.shape[2])],
            axis=-1,
        )
    else:
        x = as_image(x)
        out = convolve(x, spec.kernel, boundary="replicate")
    if spec.noise_sigma > 0:
        out = out + spec.noise_sigma * gaussian_noise(x.shape, spec.seed)
    return np.clip(out, 0.0, 1.0)


def piecewise_constant_image(size=96):
    """Deterministic piecewise-constant test scene of shape ``(size, size)``.

    Rectangles, a disk, a triangle and a thin bar on a mid-grey background,
    so edges occur at many orientations.
    """
    n = int(size)
    s = n / 96.0
    yy, xx = np.mgrid[0:n, 0:n] / s
    img = np.full((n, n), 0.45)
    img[(yy >= 10) & (yy < 40) & (xx >= 8) & (xx < 44)] = 0.9
    img[(yy >= 52) & (yy < 86) & (xx >= 14) & (xx < 34)] = 0.1
    img[(xx - 66) ** 2 + (yy - 28) ** 2 < 15**2] = 0.15
    tri = (yy >= 50) & (yy < 88) & (xx >= 44) & (xx - 44 < (yy - 50) * 1.1)
    img[tri] = 0.8
    img[(yy >= 60) & (yy < 64) & (xx >= 70) & (xx < 90)] = 0.05
    img[(yy >= 44) & (yy < 92) & (xx >= 84) & (xx < 88)] = 1.0
    return img


def step_edge_patch(size=32, low=0.2, high=0.8, vertical=True):
    """Two constant halves separated by a straight step."""
    img = np.full((size, size), float(low))
    if vertical:
        img[:, size // 2 :] = high
    else:
        img[size // 2 :, :] = high
    return img
