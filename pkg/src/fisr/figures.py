"""Error-cloud figures rendered to files (no interactive backend)."""
from __future__ import annotations

import numpy as np

from .sweep import DOMAIN_UNIT_EXHAUSTIVE, CloudSample


def render_cloud(sample: CloudSample, path) -> str:
    """Render a two-panel scatter of the error cloud to an image file.

    Top panel: relative error against x.  Bottom panel: normalized absolute
    error against x_tilde in [1, 4).  Returns the path written.
    """
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    fig, (ax_rel, ax_abs) = plt.subplots(2, 1, figsize=(8, 7))
    style = dict(s=2.0, c="#30507a", alpha=0.35, linewidths=0)

    ax_rel.scatter(sample.x, sample.error_relative, **style)
    ax_rel.set_xlabel("x")
    ax_rel.set_ylabel("relative error")
    if sample.x.size and float(np.max(sample.x)) / float(np.min(sample.x)) > 16.0:
        ax_rel.set_xscale("log", base=2)
    ax_rel.axhline(0.0, color="0.6", lw=0.8)

    ax_abs.scatter(sample.x_tilde, sample.error_absolute, **style)
    ax_abs.set_xlabel("x_tilde")
    ax_abs.set_ylabel("normalized absolute error")
    ax_abs.set_xlim(1.0, 4.0)
    ax_abs.axhline(0.0, color="0.6", lw=0.8)

    domain = ("exhaustive [1, 4)" if sample.domain == DOMAIN_UNIT_EXHAUSTIVE
              else f"{sample.x.size} random samples")
    fig.suptitle(f"R = 0x{sample.magic:08X}, {sample.iterations} Newton "
                 f"iteration(s), {domain}")
    fig.tight_layout(rect=(0, 0, 1, 0.96))
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)
