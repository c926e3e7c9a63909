"""PNG figures for the simulate and audit reports (matplotlib, Agg backend)."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "figure.dpi": 120,
}


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def failure_rate_figure(results, path):
    """Observed failure rate (exact CI bars) against the predicted rate, one point per run."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5.0, 3.4))
        xs = list(range(len(results)))
        for x, res in zip(xs, results):
            lo, hi = res.ci
            rate = max(res.rate, 1e-12)
            ax.errorbar([x], [rate], yerr=[[rate - max(lo, 1e-12)], [hi - rate]],
                        fmt="o", color="C0", capsize=3, label="observed" if x == 0 else None)
            if res.predicted is not None:
                p = res.predicted
                ax.plot([x - 0.3, x + 0.3], [p, p], color="C3", lw=1.5,
                        label="predicted" if x == 0 else None)
                ax.fill_between([x - 0.3, x + 0.3], p / 2, 2 * p, color="C3", alpha=0.15,
                                label="factor-2 band" if x == 0 else None)
        ax.set_yscale("log")
        ax.set_xticks(xs)
        ax.set_xticklabels([f"{r.params.name}\n2^-{r.exponent}" for r in results], fontsize=7)
        ax.set_ylabel("failure rate")
        ax.legend(frameon=False)
        return _save(fig, path)


def audit_figure(report, path):
    """Horizontal bars of log2 attack cost per instance, with the target line."""
    with plt.rc_context(STYLE):
        rows = report.entries + report.excluded
        fig, ax = plt.subplots(figsize=(5.0, 0.3 * len(rows) + 1.2))
        labels = [f"{e.label} {e.formula}" for e in rows]
        colors = ["0.6" if e in report.excluded else ("C3" if e.log2 < report.target_bits else "C0")
                  for e in rows]
        ax.barh(range(len(rows)), [e.log2 for e in rows], color=colors)
        ax.axvline(report.target_bits, color="k", lw=1, ls="--")
        ax.set_yticks(range(len(rows)))
        ax.set_yticklabels(labels)
        ax.invert_yaxis()
        ax.set_xlabel("log2 attack cost")
        ax.set_title(report.params.name)
        return _save(fig, path)
