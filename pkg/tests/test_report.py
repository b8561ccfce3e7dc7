import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pipeclimb.model import DEG, SpringSet
from pipeclimb.report import (MU_COLUMNS, SWEEP_COLUMNS, emit_csv, emit_svg, fmt, read_csv,
                              sweep_svg)
from pipeclimb.sweep import MuRow, SweepResult

SVG = "{http://www.w3.org/2000/svg}"


def make_result(k_deg, tau, stations_deg=None):
    k_deg = np.asarray(k_deg, float)
    n = len(k_deg)
    stations = [math.radians(s) for s in (stations_deg or np.linspace(0, 270, n))]
    return SweepResult(
        stations=stations,
        stiffness_curves=k_deg / DEG,
        torque_curves=np.asarray(tau, float),
        infeasible_stations=[(s, "no equilibrium") for s, row in zip(stations, tau)
                             if not np.all(np.isfinite(row))],
        selected_stiffness=SpringSet(),
        selection_window=(0.0, math.radians(150)),
    )


@pytest.fixture
def four_stations():
    nan = [math.nan] * 4
    k = [[0.021, 0.0041, 0.0043, 0.024], nan,
         [0.0123456789, 1e-7, 123456.789, 0.0], [0.02, 0.003, 0.002, 0.01]]
    tau = [[0.1, 0.02, 0.03, 0.11], nan, [0.05, -0.01, 0.2, 0.0], [0.09, 0.01, 0.01, 0.05]]
    return make_result(k, tau)


def test_fmt():
    assert fmt(None) == "" and fmt(math.nan) == ""
    assert fmt(0.0) == fmt(-0.0) == "0"
    assert fmt(114.62416) == "114.624"
    assert fmt(1e-7) == "1e-07"


def test_sweep_csv_layout(tmp_path, four_stations):
    path = emit_csv(four_stations, tmp_path / "sweep.csv")
    lines = path.read_text().splitlines()
    assert len(lines) == 5
    assert lines[0] == ",".join(SWEEP_COLUMNS)
    assert lines[2] == "90,,,,,,,,,0"
    assert lines[1].endswith(",1")


def test_sweep_csv_round_trip(tmp_path, four_stations):
    header, rows = read_csv(emit_csv(four_stations, tmp_path / "s.csv"))
    assert header == list(SWEEP_COLUMNS)
    for row, phi, k, tau in zip(rows, four_stations.stations, four_stations.stiffness_curves,
                                four_stations.torque_curves):
        assert row[0] == pytest.approx(phi / DEG, rel=5e-6)
        if np.isfinite(k).all():
            assert row[1:5] == pytest.approx(k * DEG, rel=5e-6, abs=0)
            assert row[5:9] == pytest.approx(tau, rel=5e-6, abs=0)
        else:
            assert row[1:9] == [None] * 8


@settings(max_examples=50, deadline=None)
@given(vals=st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=4, max_size=4))
def test_fmt_round_trips_six_digits(vals):
    for v in vals:
        assert float(fmt(v)) == pytest.approx(v, rel=5e-6, abs=1e-300)


def test_mu_csv(tmp_path):
    rows = [MuRow(0.5, 0.5, (1.0, 0.5, 0.25, 2.0)), MuRow(0.6, None, None, "infeasible")]
    lines = emit_csv(rows, tmp_path / "mu.csv").read_text().splitlines()
    assert lines[0] == ",".join(MU_COLUMNS)
    assert lines[2] == "0.6,,,,,"
    assert [float(v) for v in lines[1].split(",")[2:]] == pytest.approx(
        [1.0 * DEG, 0.5 * DEG, 0.25 * DEG, 2.0 * DEG], rel=5e-6)


def test_csv_bytes_deterministic(tmp_path, four_stations):
    a = emit_csv(four_stations, tmp_path / "a.csv").read_bytes()
    b = emit_csv(four_stations, tmp_path / "b.csv").read_bytes()
    assert a == b


def _parse(text):
    root = ET.fromstring(text)
    assert root.tag == SVG + "svg"
    return root


def test_sweep_svg_structure(tmp_path, four_stations):
    root = _parse(emit_svg(four_stations, tmp_path / "s.svg").read_text())
    texts = [t.text for t in root.iter(SVG + "text")]
    for label in ("k1", "k2", "k3", "k4"):
        assert label in texts
    assert any("N*m/deg" in (t or "") for t in texts)
    assert any("phi" in (t or "") for t in texts)
    assert "no feasible stations" not in texts
    # the gap at 90 deg splits each series
    assert len(list(root.iter(SVG + "polyline"))) >= 4


def test_svg_without_feasible_stations():
    nan = [[math.nan] * 4] * 3
    root = _parse(sweep_svg(make_result(nan, nan)))
    assert "no feasible stations" in [t.text for t in root.iter(SVG + "text")]
    assert not list(root.iter(SVG + "polyline"))


def test_mu_svg(tmp_path):
    rows = [MuRow(m, m, (1.0, 1.0, 1.0, 1.0)) for m in (0.5, 0.7, 0.9)]
    text = emit_svg(rows, tmp_path / "mu.svg").read_text()
    root = _parse(text)
    texts = [t.text for t in root.iter(SVG + "text")]
    assert "mu_lim" in texts
    assert text == emit_svg(rows, tmp_path / "mu2.svg").read_text()


def test_unwritable_path(tmp_path, four_stations):
    with pytest.raises(OSError):
        emit_csv(four_stations, tmp_path / "missing" / "s.csv")
    with pytest.raises(OSError):
        emit_svg(four_stations, tmp_path / "missing" / "s.svg")
