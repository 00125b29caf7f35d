from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bcp._streams import ARROW_LEFT, ARROW_RIGHT, RECOVERY
from bcp.graphical import (EventLog, Mark, dump_log, is_open, load_log, make_log, merge_view)


def test_single_site_without_arrows_has_recoveries_only():
    log = make_log((0, 0), 4000.0, 0.0, seed=11)
    assert set(log.kinds.tolist()) == {RECOVERY}
    assert set(log.sites.tolist()) == {0}
    # Poisson(4000) count, generous 5 sigma band
    assert abs(len(log) - 4000) < 5 * np.sqrt(4000)
    assert np.isnan(log.levels).all()


def test_same_arguments_same_log():
    assert make_log((0, 5), 20.0, 2.0, 3) == make_log((0, 5), 20.0, 2.0, 3)
    assert make_log((0, 5), 20.0, 2.0, 3) != make_log((0, 5), 20.0, 2.0, 4)


def test_log_sorted_and_levels_in_range():
    log = make_log((-3, 7), 30.0, 1.7, 5)
    assert np.all(np.diff(log.times) >= 0)
    assert log.times.min() > 0 and log.times.max() <= 30.0
    arrows = log.kinds != RECOVERY
    assert np.all((log.levels[arrows] >= 0) & (log.levels[arrows] < 1.7))
    assert np.isnan(log.levels[~arrows]).all()


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**63), st.integers(-5, 5), st.integers(0, 6), st.integers(0, 6),
       st.floats(0.5, 8.0), st.floats(0.0, 8.0))
def test_substream_stability(seed, lo, w1, extra, t1, dt):
    small = make_log((lo, lo + w1), t1, 1.3, seed)
    big = make_log((lo - extra, lo + w1 + extra), t1 + dt, 1.3, seed)
    assert big.restrict((lo, lo + w1), 0.0, t1) == small


def test_window_extension_keeps_marks():
    a = make_log((0, 10), 100.0, 2.0, 77)
    b = make_log((0, 20), 100.0, 2.0, 77)
    assert b.restrict((0, 10), 0.0, 100.0) == a


def test_is_open_examples():
    m = Mark(1.0, 0, ARROW_RIGHT, 0.3)
    assert is_open(m, 0.5)
    assert not is_open(m, 0.3)
    assert not is_open(Mark(1.0, 0, ARROW_LEFT, 0.0), 0.0)
    with pytest.raises(ValueError):
        is_open(Mark(1.0, 0, RECOVERY), 1.0)


@given(st.floats(0.0, 5.0, exclude_max=True), st.floats(0.0, 5.0), st.floats(0.0, 5.0))
def test_openness_monotone(level, a, b):
    m = Mark(2.0, 1, ARROW_LEFT, level)
    lo, hi = sorted((a, b))
    assert (not is_open(m, lo)) or is_open(m, hi)


def test_mark_validation():
    with pytest.raises(ValueError):
        Mark(1.0, 0, RECOVERY, 0.2)
    with pytest.raises(ValueError):
        Mark(1.0, 0, ARROW_RIGHT)
    with pytest.raises(ValueError):
        Mark(0.0, 0, RECOVERY)
    with pytest.raises(ValueError):
        Mark(1.0, 0, 7)
    assert Mark(1.0, 3, ARROW_LEFT, 0.1).target == 2


def test_merge_view_identity_empty_and_partition():
    log = make_log((0, 4), 10.0, 1.5, 8)
    full = merge_view(log, (0, 4), 0.0, 10.0)
    assert full == list(log)
    assert merge_view(log, (0, 4), 3.0, 3.0) == []
    cuts = [0.0, 1.3, 4.0, 7.5, 10.0]
    parts = [m for a, b in zip(cuts, cuts[1:]) for m in merge_view(log, (0, 4), a, b)]
    assert parts == full
    sub = merge_view(log, (1, 2), 2.0, 6.0)
    assert all(1 <= m.site <= 2 and 2.0 < m.time <= 6.0 for m in sub)


@pytest.mark.parametrize("args", [((0, 5), 0.0, 1.0), ((0, 4), -1.0, 1.0),
                                  ((0, 4), 0.0, 11.0), ((-1, 4), 0.0, 1.0),
                                  ((3, 2), 0.0, 1.0)])
def test_merge_view_rejects_out_of_range(args):
    log = make_log((0, 4), 10.0, 1.5, 8)
    with pytest.raises(ValueError):
        merge_view(log, *args)


@pytest.mark.parametrize("args", [((0, 1), 0.0, 1.0), ((0, 1), -2.0, 1.0),
                                  ((0, 1), 1.0, -0.5), ((2, 1), 1.0, 1.0)])
def test_make_log_rejects_bad_arguments(args):
    with pytest.raises(ValueError):
        make_log(*args, seed=0)


def test_dump_roundtrip(tmp_path):
    log = make_log((-2, 3), 12.0, 2.2, 2**63 + 5)
    path = tmp_path / "log.bin"
    dump_log(log, path)
    assert load_log(path) == log
    raw = path.read_bytes()
    assert len(raw) == 40 + 25 * len(log)
    (tmp_path / "bad.bin").write_bytes(raw[:-3])
    with pytest.raises(ValueError):
        load_log(tmp_path / "bad.bin")


def test_hand_built_log_iterates_marks():
    log = EventLog((0, 1), 3.0, 1.0, 0, np.array([1.0, 2.0]), np.array([0, 0]),
                   np.array([ARROW_RIGHT, RECOVERY], np.uint8), np.array([0.2, np.nan]))
    assert list(log) == [Mark(1.0, 0, ARROW_RIGHT, 0.2), Mark(2.0, 0, RECOVERY)]
