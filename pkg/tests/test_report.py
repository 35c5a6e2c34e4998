import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from polyvem import report as rp

SVG_NS = "{http://www.w3.org/2000/svg}"


def parse_svg(path):
    text = path.read_text()
    root = ET.fromstring(text)
    assert root.tag == SVG_NS + "svg"
    # standalone: no external references of any kind
    assert "href" not in text and "@import" not in text and "url(" not in text
    return root


def test_convergence_plot(tmp_path):
    series = {"k=1": ([10, 100, 1000], [1e-1, 3e-2, 1e-2]), "k=2": ([20, 200, 2000], [1e-2, 1e-3, 1e-4])}
    root = parse_svg(rp.convergence_plot(tmp_path / "c.svg", series, "conv", "err", rates=[1, 2]))
    texts = [t.text for t in root.iter(SVG_NS + "text")]
    assert "k=1" in texts and "k=2" in texts
    assert {"1e1", "1e2", "1e3"} <= set(texts)
    assert len(list(root.iter(SVG_NS + "polygon"))) >= 2


def test_convergence_plot_survives_bad_values(tmp_path):
    series = {"a": ([1, 10], [float("nan"), 0.0])}
    parse_svg(rp.convergence_plot(tmp_path / "c.svg", series, "t", "y"))


def test_trend_and_scatter(tmp_path):
    parse_svg(rp.trend_plot(tmp_path / "t.svg", {"tri": ([0, 1, 2], [0.8, 0.81, 0.8])}, "rho", "rho"))
    parse_svg(rp.scatter_plot(tmp_path / "s.svg", [1, 2, 3], [1e-3, 1e-2, 1e-1], "t", "x", "y", logx=True))


def test_title_is_escaped(tmp_path):
    parse_svg(rp.scatter_plot(tmp_path / "s.svg", [1, 2], [1, 2], "a < b & c", "x", "y", logy=False))


def test_log_axis_decade_ticks():
    ax = rp.Axis.fit([3e-4, 2e-1], True)
    exps = [math.log10(t) for t in ax.ticks]
    assert all(e == round(e) for e in exps)
    assert ax.lo <= 3e-4 and ax.hi >= 2e-1


def test_fitted_slope():
    h = np.array([0.4, 0.2, 0.1, 0.05])
    assert rp.fitted_slope(h, 3 * h**2) == pytest.approx(2.0)
    assert math.isnan(rp.fitted_slope([1.0], [1.0]))


def test_csv_roundtrip_and_markdown(tmp_path):
    path = rp.write_csv(tmp_path / "x.csv", ["a", "b"], [[1, 2], [3, 4]])
    assert rp.read_csv(path) == [{"a": "1", "b": "2"}, {"a": "3", "b": "4"}]
    assert rp.markdown_table(["a", "b"], [[1, 2]]).splitlines() == ["| a | b |", "|---|---|", "| 1 | 2 |"]
