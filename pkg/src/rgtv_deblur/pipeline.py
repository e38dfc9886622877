"""Coarse-to-fine blind deblurring.

At every pyramid level the skeleton and the kernel are re-estimated in
turn, with the TV weight ``lam`` divided by ``lambda_decay`` after each
round, until the kernel stops changing. The kernel found at one level,
upsampled, seeds the next finer level. A fixed-weight graph TV
deconvolution with the final kernel produces the restored image.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._util import as_image, check_positive, luminance, odd_at_least
from .conv import (
    check_kernel,
    crop_padding,
    delta_kernel,
    downsample,
    pad_for_fft,
    resize,
    upsample_kernel,
)
from .errors import (
    ConfigError,
    DegenerateInputError,
    DegenerateKernelError,
    InvalidInputError,
)
from .graph import EdgeWeightField, build_weights, weight_histogram
from .kernel import KernelSolveParams, solve_kernel
from .skeleton import PdState, SkeletonParams, pd_inner_solve, solve_skeleton

__all__ = [
    "SolverParams",
    "PyramidLevel",
    "LevelDiagnostics",
    "DeblurResult",
    "parse_config",
    "read_config",
    "build_pyramid",
    "kernel_init",
    "luminance",
    "nonblind_restore",
    "deblur_blind",
]


@dataclass
class SolverParams:
    """All tunables of the blind deblurring pipeline.

    Defaults: ``sigma=0.1``, ``lambda0=0.01``, ``mu=0.05``, decay 1.1 and
    a per-level scale ratio of ``log2(3)``.
    """

    kernel_size: int = 0
    sigma: float = 0.1
    lambda0: float = 0.01
    mu: float = 0.05
    lambda_decay: float = 1.1
    scale_factor: float = math.log2(3)
    max_outer_iters: int = 20
    convergence_tol: float = 1e-3
    reweight_iters: int = 3
    pd_iters: int = 100
    pd_tol: float = 1e-4
    lambda_nb: float = 2e-3
    recenter: bool = False

    def __post_init__(self):
        for name in ("sigma", "lambda0", "mu", "convergence_tol", "pd_tol", "lambda_nb"):
            check_positive(getattr(self, name), name)
        if not self.lambda_decay > 1:
            raise InvalidInputError("lambda_decay must exceed 1")
        if not self.scale_factor > 1:
            raise InvalidInputError("scale_factor must exceed 1")
        for name in ("max_outer_iters", "reweight_iters", "pd_iters"):
            if int(getattr(self, name)) < 1:
                raise InvalidInputError(f"{name} must be >= 1")
        if self.kernel_size and int(self.kernel_size) % 2 == 0:
            raise InvalidInputError(f"kernel_size must be odd, got {self.kernel_size}")

    def skeleton_params(self, lam):
        return SkeletonParams(
            lam=lam,
            sigma=self.sigma,
            reweight_iters=self.reweight_iters,
            pd_iters=self.pd_iters,
            pd_tol=self.pd_tol,
        )

    def kernel_params(self, kernel_size):
        return KernelSolveParams(mu=self.mu, kernel_size=kernel_size, recenter=self.recenter)


CONFIG_KEYS = (
    "sigma", "lambda0", "mu", "lambda_decay", "kernel_size", "scale_factor",
    "max_outer_iters", "convergence_tol", "reweight_iters", "pd_iters", "pd_tol",
    "lambda_nb",
)
_INT_KEYS = {"kernel_size", "max_outer_iters", "reweight_iters", "pd_iters"}


def parse_config(text, source="<config>", **overrides):
    """Build :class:`SolverParams` from ``key = value`` lines.

    Blank lines and ``#`` comments are ignored. Unknown or repeated keys
    are errors; missing keys keep their defaults.
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (part.strip() for part in line.partition("="))
        if not sep or not key or not value:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            values[key] = int(value) if key in _INT_KEYS else float(value)
        except ValueError:
            raise ConfigError(f"{source}:{lineno}: bad value {value!r} for {key}") from None
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return SolverParams(**values)
    except InvalidInputError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def read_config(path, **overrides):
    with open(path) as fh:
        return parse_config(fh.read(), source=str(path), **overrides)


@dataclass(frozen=True)
class PyramidLevel:
    shape: tuple
    kernel_size: int
    scale: float  # downsampling factor relative to the input (1.0 = finest)


def build_pyramid(shape, kernel_size, scale_factor):
    """Plan the pyramid for an image of ``shape`` and a kernel of size ``h``.

    Level ``l`` (0 = finest) has kernel size ``h / scale_factor**l`` rounded
    and bumped to odd >= 3; levels are added until that size reaches 3 or
    the image would shrink below three kernel widths. Returned coarsest
    first.
    """
    if hasattr(shape, "shape"):
        shape = shape.shape
    rows, cols = (int(n) for n in shape[:2])
    h = int(kernel_size)
    s = float(scale_factor)
    if h < 1 or h % 2 == 0:
        raise InvalidInputError(f"kernel size must be odd, got {h}")
    if not s > 1:
        raise InvalidInputError("scale_factor must exceed 1")
    if min(rows, cols) < max(h, 3):
        raise InvalidInputError(f"image {rows}x{cols} too small for a {h}x{h} kernel")

    levels = [PyramidLevel((rows, cols), h, 1.0)]
    size = h
    level = 0
    while size > 3:
        level += 1
        scale = s**level
        size = odd_at_least(h / scale, 3)
        dims = (int(round(rows / scale)), int(round(cols / scale)))
        if min(dims) < max(3, 3 * size):
            break
        levels.append(PyramidLevel(dims, size, scale))
    return levels[::-1]


def kernel_init(kernel_size, previous=None, scale=None):
    """Delta kernel at the coarsest level, else the upsampled coarser estimate."""
    if previous is None:
        return delta_kernel(kernel_size)
    return upsample_kernel(previous, kernel_size, scale=scale)


def nonblind_restore(b, k, lambda_nb, skeleton=None, sigma=0.1, max_iter=300, tol=1e-5):
    """Deconvolve ``b`` with a known kernel by fixed-weight graph TV.

    Edge weights come from ``skeleton`` when given (all ones otherwise), so
    strong skeleton edges are barely penalized. Colour images, shape
    ``(H, W, C)``, are restored channel by channel with the same kernel and
    weights. The result is clamped to [0, 1].
    """
    b = np.asarray(b, dtype=np.float64)
    k = check_kernel(k)
    lambda_nb = check_positive(lambda_nb, "lambda_nb")
    if b.ndim == 3:
        return np.stack(
            [nonblind_restore(b[..., c], k, lambda_nb, skeleton, sigma, max_iter, tol)
             for c in range(b.shape[2])],
            axis=-1,
        )
    b = as_image(b, "b")
    margin = k.shape[0]
    b_pad, offset = pad_for_fft(b, margin)
    if skeleton is None:
        weights = EdgeWeightField.ones(b_pad.shape)
    else:
        skeleton = as_image(skeleton, "skeleton")
        if skeleton.shape != b.shape:
            raise InvalidInputError("skeleton and image shapes differ")
        weights = build_weights(pad_for_fft(skeleton, margin)[0], sigma)
    x = pd_inner_solve(b_pad, k, weights, lambda_nb, PdState.start(b_pad),
                       max_iter=max_iter, tol=tol)
    return np.clip(crop_padding(x, offset, b.shape), 0.0, 1.0)


@dataclass
class LevelDiagnostics:
    shape: tuple
    kernel_size: int
    lambdas: list = field(default_factory=list)
    objectives: list = field(default_factory=list)
    kernel_changes: list = field(default_factory=list)
    mid_band_fraction: float = math.nan
    converged: bool = False
    warnings: list = field(default_factory=list)
    kernel: np.ndarray = None


@dataclass
class DeblurResult:
    kernel: np.ndarray
    skeleton: np.ndarray
    restored: np.ndarray
    levels: list
    input_mid_band_fraction: float = math.nan


def deblur_blind(b, params, log=None):
    """Estimate the blur kernel of ``b`` and restore it.

    Parameters
    ----------
    b : ndarray, shape (H, W) or (H, W, 3)
        Blurry image on [0, 1]. Colour input is reduced to luminance for
        kernel estimation and restored per channel.
    params : SolverParams
        ``params.kernel_size`` must be set.
    log : list, optional
        Receives the per-iteration primal-dual records of every skeleton
        solve; ``outer`` counts reweighting rounds over the whole run.

    Returns
    -------
    DeblurResult
    """
    b = np.asarray(b, dtype=np.float64)
    gray = as_image(luminance(b) if b.ndim == 3 else b, "b")
    h = int(params.kernel_size)
    if h < 1 or h % 2 == 0:
        raise InvalidInputError("params.kernel_size must be a positive odd integer")
    if min(gray.shape) < 3 * h:
        raise InvalidInputError(f"image {gray.shape} smaller than 3x kernel size {h}")

    levels = build_pyramid(gray.shape, h, params.scale_factor)
    diagnostics = []
    k = x = None
    prev_scale = None
    outer_offset = 0
    for level in levels:
        b_l = gray if level.scale == 1.0 else downsample(gray, level.scale)
        k = kernel_init(level.kernel_size, k, None if k is None else prev_scale / level.scale)
        x = b_l if x is None else resize(x, b_l.shape)
        diag = LevelDiagnostics(b_l.shape, level.kernel_size)
        level_start = k
        lam = params.lambda0
        for _ in range(int(params.max_outer_iters)):
            inner_log = [] if log is not None else None
            x, trace = solve_skeleton(b_l, k, params.skeleton_params(lam), init=x, log=inner_log)
            if log is not None:
                for row in inner_log:
                    log.append(dict(row, outer=row["outer"] + outer_offset))
                outer_offset += params.reweight_iters
            try:
                k_new = solve_kernel(x, b_l, params.kernel_params(level.kernel_size))
            except (DegenerateInputError, DegenerateKernelError) as exc:
                diag.warnings.append(f"kernel update failed ({exc}); kept previous level's kernel")
                k = level_start
                break
            change = float(np.abs(k_new - k).sum())
            diag.lambdas.append(lam)
            diag.objectives.append(trace[-1])
            diag.kernel_changes.append(change)
            k = k_new
            lam = lam / params.lambda_decay
            if change < params.convergence_tol:
                diag.converged = True
                break
        diag.kernel = k.copy()
        diag.mid_band_fraction = weight_histogram(x, sigma=params.sigma).mid_band_fraction
        diagnostics.append(diag)
        prev_scale = level.scale

    restored = nonblind_restore(b, k, params.lambda_nb, skeleton=x, sigma=params.sigma)
    return DeblurResult(
        kernel=k,
        skeleton=x,
        restored=restored,
        levels=diagnostics,
        input_mid_band_fraction=weight_histogram(gray, sigma=params.sigma).mid_band_fraction,
    )

