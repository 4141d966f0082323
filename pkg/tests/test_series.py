#!/usr/bin/env python
"""Tests de carga UCR, normalización, periodo y segmentación.

Ejecutar: python tests/test_series.py  (o pytest tests/)
"""

import sys
import tempfile
from pathlib import Path

# Añadir src al path
sys.path.insert(0, str(Path(__file__).parent.parent))

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.data.series import (
    DatasetMeta,
    SegmentationConfig,
    TimeSeries,
    denormalize,
    estimate_period,
    segment,
    split,
    train_stats,
    window_starts,
    windows_matrix,
    znormalize,
)
from src.data.ucr import load_manifest, load_ucr, parse_ucr_name, write_manifest, write_ucr
from src.data.validator import validate_dataset, validate_paths
from src.errors import DegeneratePeriodError, InsufficientDataError, MetadataParseError, ParseError


# =============================================================================
# UCR
# =============================================================================

def test_load_minimal_file():
    """x_1_2_3.txt con 0..3 → valores y metadatos."""
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "x_1_2_3.txt"
        path.write_text("0.0\n1.0\n2.0\n3.0")
        ts, meta = load_ucr(path)
    assert ts.values.tolist() == [0.0, 1.0, 2.0, 3.0]
    assert meta == DatasetMeta(1, 2, 3)
    assert ts.name == "x"


def test_load_archive_name():
    """Nombre con prefijo UCR: los tres últimos enteros son los metadatos."""
    rng = np.random.default_rng(0)
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "025_UCR_Anomaly_tiltAPB2_5900_6168_6212.txt"
        path.write_text("\n".join(f"{v:.6f}" for v in rng.standard_normal(10702)))
        ts, meta = load_ucr(path)
    assert (meta.train_end, meta.anomaly_begin, meta.anomaly_end) == (5900, 6168, 6212)
    assert len(ts) == 10702


def test_whitespace_separated_tokens():
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "ws_2_3_4.txt"
        path.write_text("1 2  3\n4\t5\n\n6\n")
        ts, _ = load_ucr(path)
    assert ts.values.tolist() == [1, 2, 3, 4, 5, 6]


def test_bad_name():
    with pytest.raises(MetadataParseError):
        parse_ucr_name("bad.txt")
    with pytest.raises(MetadataParseError):
        parse_ucr_name("name_1_x_3.txt")


def test_non_numeric_token_reports_line():
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "x_1_2_3.txt"
        path.write_text("0.0\n1.0\nabc\n3.0\n")
        with pytest.raises(ParseError) as info:
            load_ucr(path)
    assert info.value.line == 3


def test_undecodable_bytes_report_line():
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "x_1_2_3.txt"
        path.write_bytes(b"0.0\n1.0\n\xff\xfe\n3.0\n")
        with pytest.raises(ParseError) as info:
            load_ucr(path)
    assert info.value.line == 3


def test_non_finite_tokens_rejected():
    """nan e inf son floats válidos para Python pero no valores de una serie."""
    for text, line in (("0.0\nnan\ninf\n3.0\n", 2), ("0.0\n1.0\n2.0 -inf\n", 3)):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "x_1_2_3.txt"
            path.write_text(text)
            with pytest.raises(ParseError) as info:
                load_ucr(path)
        assert info.value.line == line
        assert 'no finito' in str(info.value)


def test_write_then_load_keeps_metadata():
    meta = DatasetMeta(10, 12, 15)
    values = np.linspace(-1, 1, 20)
    with tempfile.TemporaryDirectory() as tmp:
        path = write_ucr(values, meta, tmp, "001_demo")
        ts, loaded = load_ucr(path)
    assert path.name == "001_demo_10_12_15.txt"
    assert loaded == meta
    np.testing.assert_allclose(ts.values, values, atol=1e-6)


def test_manifest_relative_paths():
    with tempfile.TemporaryDirectory() as tmp:
        root = Path(tmp)
        a = write_ucr([0, 1, 2, 3], DatasetMeta(1, 2, 3), root / "data", "a")
        manifest = write_manifest([a], root / "data" / "manifest.txt")
        with open(manifest, 'a', encoding='utf-8') as f:
            f.write("# comentario\n\n")
        paths = load_manifest(manifest)
        assert [p.resolve() for p in paths] == [a.resolve()]
        assert validate_paths(paths).is_valid
        assert not validate_paths([root / "nope.txt"]).is_valid


# =============================================================================
# NORMALIZACIÓN Y SPLIT
# =============================================================================

def test_znormalize_examples():
    """[2,4] con media 3 y std 1 → [−1, 1]; constante → ceros."""
    assert znormalize(TimeSeries([2, 4]), 3.0, 1.0).values.tolist() == [-1.0, 1.0]
    const = TimeSeries([5, 5, 5])
    mean, std = train_stats(const)
    assert znormalize(const, mean, std).values.tolist() == [0.0, 0.0, 0.0]


def test_znormalize_uses_population_std():
    values = np.array([1.0, 2.0, 3.0, 4.0])
    mean, std = train_stats(values)
    assert mean == 2.5
    assert std == pytest.approx(np.sqrt(1.25), abs=1e-15)
    out = znormalize(TimeSeries(values), mean, std).values
    np.testing.assert_allclose(out, (values - 2.5) / np.sqrt(1.25), atol=1e-12)
    np.testing.assert_allclose(denormalize(TimeSeries(out), mean, std).values, values, atol=1e-12)


def test_split_and_labels():
    ts = TimeSeries(np.arange(20.0), name="demo")
    meta = DatasetMeta(train_end=8, anomaly_begin=10, anomaly_end=12)
    train, test = split(ts, meta)
    assert len(train) == 8 and len(test) == 12
    assert test.values[0] == 8.0
    assert meta.test_span() == (2, 4)
    assert meta.test_labels(len(test)).tolist() == [0, 0, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0]


def test_validate_dataset():
    ts = TimeSeries(np.zeros(100))
    assert validate_dataset(ts, DatasetMeta(50, 60, 70)).is_valid
    assert not validate_dataset(ts, DatasetMeta(0, 60, 70)).is_valid
    assert not validate_dataset(ts, DatasetMeta(50, 40, 70)).is_valid
    assert not validate_dataset(ts, DatasetMeta(50, 60, 100)).is_valid
    assert not validate_dataset(ts, DatasetMeta(50, 60, 70), window_len=60).is_valid
    bad = TimeSeries([0.0, np.nan, 1.0, 2.0, 3.0])
    assert not validate_dataset(bad, DatasetMeta(1, 2, 3)).is_valid


# =============================================================================
# PERIODO
# =============================================================================

def test_period_pure_sinusoid():
    n = np.arange(1000)
    assert estimate_period(np.sin(2 * np.pi * n / 50)) == 50


def test_period_dominant_component():
    n = np.arange(800)
    values = np.sin(2 * np.pi * n / 8) + 0.1 * np.sin(2 * np.pi * n / 100)
    assert estimate_period(values) == 8


def test_period_constant_series():
    with pytest.raises(DegeneratePeriodError):
        estimate_period(np.full(100, 3.0))


def test_period_too_short():
    with pytest.raises(InsufficientDataError):
        estimate_period(np.arange(10.0))


# =============================================================================
# SEGMENTACIÓN
# =============================================================================

def test_window_starts_examples():
    assert window_starts(10, 4, 2) == [0, 2, 4, 6]
    assert window_starts(10, 4, 3) == [0, 3, 6]
    assert window_starts(11, 4, 3) == [0, 3, 6, 7]


def test_window_starts_too_short():
    with pytest.raises(InsufficientDataError):
        window_starts(3, 4, 1)


def test_segmentation_from_period():
    seg = SegmentationConfig.from_period(50)
    assert (seg.window_len, seg.stride, seg.period) == (125, 31, 50)
    assert SegmentationConfig.from_period(50, window_len=100).stride == 25


def test_segment_matches_matrix():
    values = np.arange(30.0)
    seg = SegmentationConfig(window_len=8, stride=5, period=4)
    slices = segment(values, seg)
    matrix, starts = windows_matrix(values, seg)
    assert [s.start for s in slices] == starts.tolist() == [0, 5, 10, 15, 20, 22]
    for s, row in zip(slices, matrix):
        np.testing.assert_array_equal(s.values, row)
        assert s.end == s.start + 8


@settings(max_examples=200, deadline=None)
@given(
    n=st.integers(min_value=4, max_value=500),
    window_len=st.integers(min_value=4, max_value=120),
    stride=st.integers(min_value=1, max_value=120),
)
def test_window_starts_cover_tail(n, window_len, stride):
    """Los inicios crecen, caben en la serie y la última ventana acaba en N."""
    if n < window_len:
        return
    starts = window_starts(n, window_len, stride)
    assert starts[0] == 0
    assert all(b > a for a, b in zip(starts, starts[1:]))
    assert starts[-1] == n - window_len
    assert all(b - a <= stride for a, b in zip(starts, starts[1:]))


if __name__ == "__main__":
    from harness import main
    main("Tests de series y carga UCR", dict(globals()))
