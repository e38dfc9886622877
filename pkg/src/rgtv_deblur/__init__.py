"""Blind image deblurring with a reweighted graph total variation prior.

The blur kernel is estimated from a piecewise-smooth "skeleton" of the
blurry image, alternating RGTV-regularized deconvolution with a
gradient-domain least-squares kernel fit over a coarse-to-fine pyramid.
"""

from .conv import convolve, delta_kernel, downsample, read_kernel, upsample_kernel, write_kernel
from .errors import (
    ConfigError,
    DegenerateInputError,
    DegenerateKernelError,
    ImageIOError,
    InvalidInputError,
    SolverFailure,
)
from .graph import (
    EdgeWeightField,
    PairPenaltyCurve,
    PenaltyKind,
    build_weights,
    edge_weight,
    gtv_value,
    laplacian_apply,
    rgtv_value,
    weight_histogram,
)
from .io import load_image, read_image, save_image
from .kernel import KernelSolveParams, project_kernel, solve_kernel
from .metrics import kernel_similarity, psnr
from .pipeline import DeblurResult, SolverParams, build_pyramid, deblur_blind, nonblind_restore
from .skeleton import SkeletonParams, pd_inner_solve, solve_skeleton
from .synth import SynthSpec, synth_blur

__version__ = "0.1.0"
