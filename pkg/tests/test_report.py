"""Report emitters: delimited tables and SVG figures."""

import numpy as np

from armgest.measures import analyze_measure
from armgest.report import (render_confusion_svg, render_measure_svg,
                            write_confusion_csv, write_measure_csv)

LABELS = ["LS", "LW", "HS", "GL"]


def test_confusion_csv_layout(tmp_path):
    cm = np.diag([5, 5, 5, 5])
    cm[0, 1] = 2
    path = tmp_path / "confusion.csv"
    write_confusion_csv(cm, LABELS, path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "true\\predicted,LS,LW,HS,GL"
    assert lines[1] == "LS,5,2,0,0"
    assert len(lines) == 5


def test_confusion_svg_renders(tmp_path):
    cm = np.diag([10, 9, 8, 7])
    path = tmp_path / "confusion.svg"
    render_confusion_svg(cm, LABELS, path)
    text = path.read_text(encoding="utf-8")
    assert text.lstrip().startswith("<?xml")
    assert "<svg" in text


def test_measure_outputs(tmp_path, small_dataset, chain):
    analysis = analyze_measure(small_dataset, chain, "duration")
    csv_path = tmp_path / "measure.csv"
    svg_path = tmp_path / "measure.svg"
    write_measure_csv(analysis, csv_path)
    render_measure_svg(analysis, svg_path)
    lines = csv_path.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("section,")
    assert sum(1 for ln in lines if ln.startswith("gesture,")) == 4
    assert sum(1 for ln in lines if ln.startswith("wilcoxon,")) == 6
    assert sum(1 for ln in lines if ln.startswith("friedman,")) == 1
    assert "<svg" in svg_path.read_text(encoding="utf-8")
