"""Signals on the 4-neighbour pixel grid graph.

Edge weights are stored per undirected edge in two planes: ``h`` holds the
edge between pixel ``(r, c)`` and its right neighbour ``(r, c + 1)``, ``v``
the edge to the pixel below. All operators work directly on those planes,
so the ``N x N`` adjacency and Laplacian matrices are never formed.

Regularizers provided, each summed once per undirected edge:

=====  ===================================  ==========================
kind   functional                           per-pair penalty of ``d``
=====  ===================================  ==========================
GTV    sum w_ij |x_j - x_i|                 w d
RGTV   sum w_ij(x) |x_j - x_i|              exp(-d^2/s^2) d
GL     sum w_ij (x_j - x_i)^2  (= x^T L x)  w d^2
RGL    sum w_ij(x) (x_j - x_i)^2            exp(-d^2/s^2) d^2
=====  ===================================  ==========================
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from ._util import as_image, check_positive
from .errors import InvalidInputError

__all__ = [
    "EdgeWeightField",
    "PenaltyKind",
    "PairPenaltyCurve",
    "WeightHistogram",
    "edge_weight",
    "build_weights",
    "difference",
    "difference_adjoint",
    "laplacian_apply",
    "gtv_value",
    "rgtv_value",
    "laplacian_value",
    "rgl_value",
    "pair_penalty",
    "pair_penalty_derivative",
    "weight_histogram",
]


def edge_weight(xi, xj, sigma):
    """Gaussian similarity ``exp(-(xi - xj)^2 / sigma^2)`` of two intensities."""
    sigma = check_positive(sigma, "sigma")
    xi, xj = float(xi), float(xj)
    if not (math.isfinite(xi) and math.isfinite(xj)):
        raise InvalidInputError("intensities must be finite")
    return math.exp(-((xi - xj) ** 2) / sigma**2)


@dataclass(frozen=True)
class EdgeWeightField:
    """Weights of the horizontal and vertical edges of an ``H x W`` grid.

    Attributes
    ----------
    h : ndarray, shape (H, W - 1)
        Weight of edge ``(r, c) -- (r, c + 1)``.
    v : ndarray, shape (H - 1, W)
        Weight of edge ``(r, c) -- (r + 1, c)``.
    """

    h: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.h, dtype=np.float64)
        v = np.asarray(self.v, dtype=np.float64)
        if h.ndim != 2 or v.ndim != 2:
            raise InvalidInputError("weight planes must be 2-D")
        if h.shape[0] != v.shape[0] + 1 or h.shape[1] + 1 != v.shape[1]:
            raise InvalidInputError(
                f"inconsistent weight planes h{h.shape} / v{v.shape}"
            )
        for plane in (h, v):
            if plane.size and (
                not np.all(np.isfinite(plane)) or plane.min() < 0 or plane.max() > 1
            ):
                raise InvalidInputError("edge weights must lie in [0, 1]")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "v", v)

    @property
    def shape(self):
        """Shape ``(H, W)`` of the image the field belongs to."""
        return (self.h.shape[0], self.v.shape[1])

    @property
    def num_edges(self):
        return self.h.size + self.v.size

    @classmethod
    def ones(cls, shape):
        rows, cols = shape
        return cls(np.ones((rows, cols - 1)), np.ones((rows - 1, cols)))

    @classmethod
    def zeros(cls, shape):
        rows, cols = shape
        return cls(np.zeros((rows, cols - 1)), np.zeros((rows - 1, cols)))

    def values(self):
        """All edge weights as one flat array (horizontal edges first)."""
        return np.concatenate([self.h.ravel(), self.v.ravel()])

    def max(self):
        return float(self.values().max()) if self.num_edges else 0.0


def _check_match(weights, img):
    if weights.shape != img.shape:
        raise InvalidInputError(
            f"weights built for {weights.shape} but image is {img.shape}"
        )


def difference(img):
    """Forward differences along the grid edges.

    Returns ``(dh, dv)`` with ``dh[r, c] = x[r, c+1] - x[r, c]`` and
    ``dv[r, c] = x[r+1, c] - x[r, c]``; no wrap-around edges.
    """
    x = np.asarray(img, dtype=np.float64)
    return x[:, 1:] - x[:, :-1], x[1:, :] - x[:-1, :]


def difference_adjoint(dh, dv):
    """Adjoint of :func:`difference`: maps edge values back to pixels."""
    rows, cols = dh.shape[0], dv.shape[1]
    out = np.zeros((rows, cols))
    out[:, :-1] -= dh
    out[:, 1:] += dh
    out[:-1, :] -= dv
    out[1:, :] += dv
    return out


def build_weights(img, sigma):
    """Gaussian edge weights of ``img`` on the 4-neighbour graph.

    A 1x1 image has no edges and yields an empty field.
    """
    x = as_image(img)
    sigma = check_positive(sigma, "sigma")
    dh, dv = difference(x)
    return EdgeWeightField(np.exp(-(dh**2) / sigma**2), np.exp(-(dv**2) / sigma**2))


def laplacian_apply(weights, img):
    """Apply ``L = diag(W 1) - W`` to ``img`` without forming ``L``.

    ``(Lx)_i = sum_j w_ij (x_i - x_j)`` over the neighbours of pixel ``i``.
    """
    x = as_image(img)
    _check_match(weights, x)
    dh, dv = difference(x)
    return difference_adjoint(weights.h * dh, weights.v * dv)


def gtv_value(weights, img):
    """Graph total variation with fixed weights, one term per undirected edge."""
    x = as_image(img)
    _check_match(weights, x)
    dh, dv = difference(x)
    return float(np.sum(weights.h * np.abs(dh)) + np.sum(weights.v * np.abs(dv)))


def rgtv_value(img, sigma):
    """Reweighted graph TV: GTV evaluated with the weights of ``img`` itself."""
    return gtv_value(build_weights(img, sigma), img)


def laplacian_value(weights, img):
    """Graph Laplacian regularizer ``x^T L x`` in its edge-sum form."""
    x = as_image(img)
    _check_match(weights, x)
    dh, dv = difference(x)
    return float(np.sum(weights.h * dh**2) + np.sum(weights.v * dv**2))


def rgl_value(img, sigma):
    """Reweighted graph Laplacian regularizer ``x^T L(x) x``."""
    return laplacian_value(build_weights(img, sigma), img)


class PenaltyKind(str, enum.Enum):
    GTV = "GTV"
    RGTV = "RGTV"
    GL = "GL"
    RGL = "RGL"


@dataclass(frozen=True)
class PairPenaltyCurve:
    """Per-edge penalty as a function of ``d = |x_i - x_j|``.

    ``fixed_weight`` is used by GTV and GL, ``sigma`` by RGTV and RGL.
    """

    kind: PenaltyKind
    sigma: float = 0.1
    fixed_weight: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "kind", PenaltyKind(self.kind))
        check_positive(self.sigma, "sigma")
        if not 0.0 <= self.fixed_weight <= 1.0:
            raise InvalidInputError("fixed_weight must lie in [0, 1]")

    def __call__(self, d):
        return pair_penalty(self, d)

    def derivative(self, d):
        return pair_penalty_derivative(self, d)


def _check_distance(d):
    d = np.asarray(d, dtype=np.float64)
    if not np.all(np.isfinite(d)) or np.any(d < 0):
        raise InvalidInputError("d must be finite and non-negative")
    return d


def pair_penalty(curve, d):
    """Closed-form penalty of one node pair; vectorised over ``d``."""
    d = _check_distance(d)
    s2 = curve.sigma**2
    if curve.kind is PenaltyKind.GTV:
        out = curve.fixed_weight * d
    elif curve.kind is PenaltyKind.RGTV:
        out = np.exp(-(d**2) / s2) * d
    elif curve.kind is PenaltyKind.GL:
        out = curve.fixed_weight * d**2
    else:
        out = np.exp(-(d**2) / s2) * d**2
    return out if out.ndim else float(out)


def pair_penalty_derivative(curve, d):
    """Analytic derivative of :func:`pair_penalty` with respect to ``d``."""
    d = _check_distance(d)
    s2 = curve.sigma**2
    if curve.kind is PenaltyKind.GTV:
        out = np.full_like(d, curve.fixed_weight)
    elif curve.kind is PenaltyKind.RGTV:
        out = np.exp(-(d**2) / s2) * (1.0 - 2.0 * d**2 / s2)
    elif curve.kind is PenaltyKind.GL:
        out = 2.0 * curve.fixed_weight * d
    else:
        out = np.exp(-(d**2) / s2) * 2.0 * d * (1.0 - d**2 / s2)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class WeightHistogram:
    """Distribution of edge weights (or differences) inside an image region.

    ``mid_band_fraction`` is the fraction of edge *weights* falling in the
    mid band, whatever the histogram axis is; a sharp piecewise-smooth patch
    puts little mass there.
    """

    bin_edges: np.ndarray
    counts: np.ndarray
    mid_band_fraction: float
    axis: str = "weight"

    @property
    def num_edges(self):
        return int(self.counts.sum())

    @property
    def fractions(self):
        total = self.counts.sum()
        return self.counts / total if total else self.counts.astype(float)

    def to_csv(self):
        lines = ["bin_lo,bin_hi,count"]
        for lo, hi, n in zip(self.bin_edges[:-1], self.bin_edges[1:], self.counts):
            lines.append(f"{lo:.6g},{hi:.6g},{int(n)}")
        lines.append(f"mid_band_fraction,{self.mid_band_fraction:.6g}")
        return "\n".join(lines) + "\n"

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())


def weight_histogram(
    img, region=None, bins=20, mid_band=(0.2, 0.8), sigma=0.1, axis="weight"
):
    """Histogram the 4-neighbour edge weights of a rectangular region.

    Parameters
    ----------
    img : array_like, shape (H, W)
    region : tuple (x, y, w, h), optional
        Column, row, width and height of the region; the whole image by
        default. Only edges with both endpoints inside are counted.
    bins : int
        Number of equal-width bins on [0, 1].
    mid_band : tuple (lo, hi)
        Weight band whose occupancy is reported as ``mid_band_fraction``.
    sigma : float
        Weight kernel parameter.
    axis : {"weight", "difference"}
        Histogram the weights ``w`` or the differences ``d = |x_i - x_j|``.
    """
    x = as_image(img)
    if region is None:
        region = (0, 0, x.shape[1], x.shape[0])
    cx, cy, cw, ch = (int(v) for v in region)
    if cw <= 0 or ch <= 0:
        raise InvalidInputError("empty region")
    if cx < 0 or cy < 0 or cx + cw > x.shape[1] or cy + ch > x.shape[0]:
        raise InvalidInputError(f"region {region} outside image of shape {x.shape}")
    if int(bins) < 2:
        raise InvalidInputError("bins must be >= 2")
    lo, hi = (float(v) for v in mid_band)
    if not 0.0 <= lo <= hi <= 1.0:
        raise InvalidInputError("mid_band must satisfy 0 <= lo <= hi <= 1")
    if axis not in ("weight", "difference"):
        raise InvalidInputError(f"unknown histogram axis {axis!r}")

    patch = x[cy : cy + ch, cx : cx + cw]
    weights = build_weights(patch, sigma).values()
    if weights.size == 0:
        raise InvalidInputError("region contains no edges")
    if axis == "weight":
        samples = weights
    else:
        dh, dv = difference(patch)
        samples = np.clip(np.abs(np.concatenate([dh.ravel(), dv.ravel()])), 0.0, 1.0)
    counts, edges = np.histogram(samples, bins=int(bins), range=(0.0, 1.0))
    in_band = np.count_nonzero((weights >= lo) & (weights <= hi))
    return WeightHistogram(edges, counts, in_band / weights.size, axis)
