"""Report emitters: delimited tables plus rendered figures.

Writes the confusion matrix as CSV alongside an SVG heatmap, and the
objective-measure analysis as a CSV table alongside an SVG box plot.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def write_confusion_csv(cm, class_labels, path):
    """CSV with a `true\\predicted` corner cell, one row per true class."""
    cm = np.asarray(cm)
    lines = ["true\\predicted," + ",".join(class_labels)]
    for label, row in zip(class_labels, cm):
        lines.append(label + "," + ",".join(str(int(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def render_confusion_svg(cm, class_labels, path, title="Confusion matrix"):
    """Row-normalized heatmap with count annotations, rendered to SVG."""
    cm = np.asarray(cm, dtype=float)
    row_sums = cm.sum(axis=1, keepdims=True)
    shade = np.divide(cm, row_sums, out=np.zeros_like(cm),
                      where=row_sums > 0)
    fig, ax = plt.subplots(figsize=(4.2, 3.8))
    ax.imshow(shade, cmap="Blues", vmin=0.0, vmax=1.0)
    ax.set_xticks(range(len(class_labels)), class_labels)
    ax.set_yticks(range(len(class_labels)), class_labels)
    ax.set_xlabel("predicted")
    ax.set_ylabel("true")
    ax.set_title(title)
    for i in range(len(class_labels)):
        for j in range(len(class_labels)):
            color = "white" if shade[i, j] > 0.5 else "black"
            ax.text(j, i, str(int(cm[i, j])), ha="center", va="center",
                    color=color)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def write_measure_csv(analysis, path):
    """One row per gesture (median, IQR), then the Friedman line and the
    six Bonferroni-corrected pairwise comparisons."""
    lines = ["section,a,b,value1,value2,value3,value4"]
    for label, med, iqr in zip(analysis.gesture_labels, analysis.medians,
                               analysis.iqrs):
        lines.append(f"gesture,{label},,{med:.6g},{iqr:.6g},,")
    fr = analysis.friedman
    lines.append(f"friedman,,,{fr.statistic:.6g},{fr.df},{fr.p_raw:.6g},"
                 f"{fr.n}")
    for a, b, r in analysis.pairwise:
        lines.append(f"wilcoxon,{a},{b},{r.statistic:.6g},{r.z:.6g},"
                     f"{r.p_corrected:.6g},{r.effect_size_r:.6g}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def render_measure_svg(analysis, path):
    """Per-gesture box plot of the participant-level measure values."""
    unit = "s" if analysis.measure == "duration" else "m"
    fig, ax = plt.subplots(figsize=(4.6, 3.4))
    ax.boxplot([analysis.per_participant[:, j]
                for j in range(analysis.per_participant.shape[1])],
               tick_labels=analysis.gesture_labels)
    ax.set_ylabel(f"{analysis.measure} ({unit})")
    ax.set_title(f"Per-participant {analysis.measure} by gesture")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
