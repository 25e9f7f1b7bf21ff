"""Figure rendering for batch reports: convergence and diversity curves per function."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .optimizers import RunRecord

# curves can legitimately reach 0; keep log axes finite
_LOG_FLOOR = 1e-300


def _mean_curves(records: list[RunRecord]):
    """Group records by (function, dim) and average each algorithm's curves over runs."""
    grouped: dict[tuple[str, int], dict[str, list[RunRecord]]] = {}
    for rec in records:
        grouped.setdefault((rec.function, rec.dim), {}).setdefault(rec.algo, []).append(rec)
    for (function, dim), by_algo in sorted(grouped.items()):
        curves = {}
        for algo, recs in sorted(by_algo.items()):
            best = np.mean([r.best_curve for r in recs], axis=0)
            diversity = np.mean([r.diversity_curve for r in recs], axis=0)
            curves[algo] = (best, diversity)
        yield function, dim, curves


def render_figures(records: list[RunRecord], out_dir) -> list[Path]:
    """Render one convergence and one diversity figure per (function, dim); returns the paths."""
    out = Path(out_dir) / "figures"
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for function, dim, curves in _mean_curves(records):
        for kind, index, ylabel in (("convergence", 0, "best fitness (mean over runs)"),
                                    ("diversity", 1, "position diversity (mean over runs)")):
            fig, ax = plt.subplots(figsize=(6.4, 4.2))
            for algo, pair in curves.items():
                series = np.maximum(pair[index], _LOG_FLOOR)
                ax.plot(np.arange(1, series.shape[0] + 1), series, label=algo, linewidth=1.2)
            ax.set_yscale("log")
            ax.set_xlabel("iteration")
            ax.set_ylabel(ylabel)
            ax.set_title(f"{function} (dim {dim})")
            ax.legend(frameon=False)
            ax.grid(True, which="both", alpha=0.25)
            fig.tight_layout()
            path = out / f"{function}_dim{dim}_{kind}.png"
            fig.savefig(path, dpi=150)
            plt.close(fig)
            written.append(path)
    return written
