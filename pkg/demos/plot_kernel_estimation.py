"""
Kernel estimation from a known sharp image
==========================================

With the sharp image in hand the kernel step is a single linear solve
in the gradient domain. ``mu`` trades noise suppression for detail.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from rgtv_deblur import KernelSolveParams, kernel_similarity, solve_kernel
from rgtv_deblur.synth import SynthSpec, motion_kernel, piecewise_constant_image, synth_blur

out = Path(__file__).parent / "output"
out.mkdir(exist_ok=True)

sharp = piecewise_constant_image(96)
k_true = motion_kernel(9, 20)
blurry = synth_blur(sharp, SynthSpec(k_true, noise_sigma=0.01, seed=1))

mus = [1e-4, 1e-2, 0.05, 0.5]
fig, axes = plt.subplots(1, len(mus) + 1, figsize=(12, 2.6))
axes[0].imshow(k_true, cmap="gray")
axes[0].set_title("true")
for ax, mu in zip(axes[1:], mus):
    k = solve_kernel(sharp, blurry, KernelSolveParams(mu=mu, kernel_size=9))
    ax.imshow(k, cmap="gray")
    ax.set_title(f"mu={mu:g}\nNCC {kernel_similarity(k, k_true):.3f}")
for ax in axes:
    ax.axis("off")
fig.tight_layout()
fig.savefig(out / "kernel_estimation.png", dpi=120)
