"""Chart rendering for reports.

matplotlib is imported lazily with the Agg backend so that importing the
package never requires a display, and library use without figure output
never pays the import cost.
"""

from __future__ import annotations

CATEGORY_ORDER = ("Present", "Reordered", "Mixed", "Unseen")
_BAR_COLORS = ("#4c72b0", "#dd8452", "#55a868", "#c44e52")


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def distribution_figure(report, path) -> None:
    """Bar chart of the PRMU split with the unseen-word share as a caption."""
    plt = _pyplot()
    values = [report.pct_p, report.pct_r, report.pct_m, report.pct_u]
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    ax.bar(CATEGORY_ORDER, values, color=_BAR_COLORS)
    for i, v in enumerate(values):
        ax.text(i, v, f"{v:.1f}", ha="center", va="bottom", fontsize=9)
    ax.set_ylabel("% of keyphrases")
    ax.set_ylim(0, max(values) * 1.2 if any(values) else 1)
    ax.set_title(
        f"{report.n_keyphrases} keyphrases over {report.n_docs} documents "
        f"(%uw = {report.pct_uw:.1f})"
    )
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def experiment_figure(report: dict, path) -> None:
    """Grouped bars, one pair per configuration row."""
    plt = _pyplot()
    rows = report["rows"]
    names = [r["name"] for r in rows]
    bm25 = [100 * r["bm25"]["score"] for r in rows]
    rm3 = [100 * r["bm25_rm3"]["score"] for r in rows]
    x = range(len(rows))
    width = 0.38
    fig, ax = plt.subplots(figsize=(max(6.0, 1.1 * len(rows)), 3.8))
    ax.bar([i - width / 2 for i in x], bm25, width, label="bm25", color="#4c72b0")
    ax.bar([i + width / 2 for i in x], rm3, width, label="bm25+rm3", color="#dd8452")
    ax.set_xticks(list(x))
    ax.set_xticklabels(names, rotation=30, ha="right")
    ax.set_ylabel(f"{report['metric']} × 100")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def generation_figure(report, path) -> None:
    """Category split of the predictions next to the headline F score."""
    plt = _pyplot()
    fig, (left, right) = plt.subplots(
        1, 2, figsize=(7.0, 3.2), gridspec_kw={"width_ratios": [3, 1]}
    )
    values = [report.pct_p, report.pct_r, report.pct_m, report.pct_u]
    left.bar(CATEGORY_ORDER, values, color=_BAR_COLORS)
    left.set_ylabel("% of predictions")
    left.tick_params(axis="x", rotation=20)
    right.bar([f"F@{report.k}"], [report.f_at_k], color="#55a868")
    right.set_ylim(0, 1)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
