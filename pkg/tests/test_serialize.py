"""Tests for CSV/JSON emission and the standalone SVG chart renderer."""

import json
import math
from xml.etree import ElementTree as ET

import numpy as np
import pytest

from toptrap.serialize import (
    ChartSeries,
    Table,
    parse_csv,
    render_line_chart,
    table_from_sweep,
    to_csv,
    to_json,
)
from toptrap.sweep import figure_dataset

RNG = np.random.default_rng(3)
SVG_NS = "{http://www.w3.org/2000/svg}"


def tricky_table():
    rows = np.array(
        [
            [1 / 3, 0.1, -1e-300],
            [math.pi, 1e300, 5e-324],
            [-0.0, 2.0**-52, 123456789.123456789],
        ]
    )
    return Table(columns=("a", "b", "c"), rows=rows, params={"omega0": 1.0, "note": "x"})


class TestCsv:
    def test_round_trip_is_bit_exact(self):
        table = tricky_table()
        back = parse_csv(to_csv(table))
        assert back.columns == table.columns
        assert np.array_equal(back.rows, table.rows)

    def test_round_trip_random(self):
        rows = RNG.standard_normal((40, 5)) * 10.0 ** RNG.integers(-12, 12, size=(40, 5))
        table = Table(columns=("c1", "c2", "c3", "c4", "c5"), rows=rows)
        back = parse_csv(to_csv(table))
        assert np.array_equal(back.rows, rows)

    def test_headers(self):
        text = to_csv(tricky_table())
        lines = text.splitlines()
        assert lines[0].startswith("# toptrap ")
        assert "# omega0 = 1.0" in lines
        assert "a,b,c" in lines

    def test_parse_requires_header(self):
        with pytest.raises(ValueError):
            parse_csv("# only comments\n")


class TestJson:
    def test_schema_and_round_trip(self):
        table = table_from_sweep(figure_dataset("fig3"))
        payload = json.loads(to_json(table))
        assert set(payload) == {"params", "axes", "columns", "data"}
        assert payload["columns"] == list(table.columns)
        assert [a["name"] for a in payload["axes"]] == ["theta", "x"]
        assert np.array_equal(np.array(payload["data"]), table.rows)

    def test_params_carry_tool_version(self):
        payload = json.loads(to_json(tricky_table()))
        assert payload["params"]["tool"].startswith("toptrap ")
        assert payload["params"]["omega0"] == 1.0


class TestSvg:
    def chart(self):
        xs = np.linspace(0.0, 4.0, 101)
        return render_line_chart(
            [
                ChartSeries("solid", xs, 1.0 / np.sqrt(1 + xs**2)),
                ChartSeries("dashed", xs, np.exp(-xs), dash="6,4"),
            ],
            title="test chart",
            x_label="x",
            y_label="y",
            annotation="note",
        )

    def test_well_formed_and_self_contained(self):
        text = self.chart()
        root = ET.fromstring(text)
        assert root.tag == f"{SVG_NS}svg"
        assert "href" not in text and "url(" not in text and "<!DOCTYPE" not in text

    def test_curves_and_legend(self):
        root = ET.fromstring(self.chart())
        polylines = list(root.iter(f"{SVG_NS}polyline"))
        assert len(polylines) == 2
        assert polylines[1].get("stroke-dasharray") == "6,4"
        labels = [e.text for e in root.iter(f"{SVG_NS}text")]
        assert "solid" in labels and "dashed" in labels and "test chart" in labels

    def test_pixel_mapping_inverts(self):
        xs = np.linspace(0.0, 2.0, 21)
        ys = np.sin(xs)
        root = ET.fromstring(render_line_chart([ChartSeries("s", xs, ys)]))
        x_lo, x_hi = float(root.get("data-x-min")), float(root.get("data-x-max"))
        y_lo, y_hi = float(root.get("data-y-min")), float(root.get("data-y-max"))
        left, top = float(root.get("data-plot-left")), float(root.get("data-plot-top"))
        pw, ph = float(root.get("data-plot-width")), float(root.get("data-plot-height"))
        points = next(root.iter(f"{SVG_NS}polyline")).get("points").split()
        for (raw, x_expected, y_expected) in zip(points, xs, ys):
            px, py = map(float, raw.split(","))
            x_back = x_lo + (px - left) / pw * (x_hi - x_lo)
            y_back = y_hi - (py - top) / ph * (y_hi - y_lo)
            assert x_back == pytest.approx(x_expected, abs=1e-3)
            assert y_back == pytest.approx(y_expected, abs=1e-3)

    def test_empty_series_rejected(self):
        with pytest.raises(ValueError):
            render_line_chart([])
