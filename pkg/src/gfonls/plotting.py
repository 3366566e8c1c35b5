"""Matplotlib rendering of |psi| for the report path (``png`` outputs)."""
from __future__ import annotations

from pathlib import Path

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure


def render_field_png(field, path, title: str | None = None) -> None:
    """Density plot of |psi(x, t)| with the mid-time profile underneath."""
    amp = np.abs(field.values)
    x, t = field.x, field.t
    fig = Figure(figsize=(6.0, 6.5), dpi=100)
    FigureCanvasAgg(fig)
    ax, ax2 = fig.subplots(2, 1, gridspec_kw={"height_ratios": [3, 1]})
    ext = [x[0], x[-1], t[0], t[-1]] if len(x) > 1 and len(t) > 1 else None
    im = ax.imshow(amp, origin="lower", aspect="auto", extent=ext, cmap="viridis",
                   interpolation="nearest")
    fig.colorbar(im, ax=ax, label="|ψ|")
    ax.set_xlabel("x")
    ax.set_ylabel("t")
    if title:
        ax.set_title(title)
    mid = len(t) // 2
    ax2.plot(x, amp[mid], lw=1.0)
    ax2.set_xlabel("x")
    ax2.set_ylabel(f"|ψ(x, {t[mid]:.3g})|")
    fig.tight_layout()
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    # no Software/date chunks, so repeated runs give identical files
    fig.savefig(p, format="png", metadata={"Software": None})
