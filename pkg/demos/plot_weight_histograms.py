"""
Edge-weight histograms of sharp and blurred patches
===================================================

Sharp piecewise-constant patches give edge weights near 0 (across an
edge) or near 1 (inside a flat region). Blur spreads each edge over
several pixels and fills in the middle of the histogram.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from rgtv_deblur.graph import weight_histogram
from rgtv_deblur.synth import SynthSpec, gaussian_kernel, piecewise_constant_image, synth_blur

out = Path(__file__).parent / "output"
out.mkdir(exist_ok=True)

sharp = piecewise_constant_image(96)
blurred = {s: synth_blur(sharp, SynthSpec(gaussian_kernel(s))) for s in (0.8, 1.5, 3.0)}

fig, axes = plt.subplots(1, 4, figsize=(14, 3), sharey=True)
for ax, (name, img) in zip(axes, [("sharp", sharp)] + [(f"blur std {s}", b) for s, b in blurred.items()]):
    h = weight_histogram(img, bins=20)
    ax.bar(h.bin_edges[:-1], h.fractions, width=h.bin_edges[1] - h.bin_edges[0], align="edge")
    ax.set_yscale("log")
    ax.set_title(f"{name}\nmid-band {h.mid_band_fraction:.3f}")
    ax.set_xlabel("edge weight")
fig.tight_layout()
fig.savefig(out / "weight_histograms.png", dpi=120)

# the CSV written by the analyze subcommand
print(weight_histogram(blurred[1.5], region=(0, 0, 48, 48), bins=5).to_csv())
