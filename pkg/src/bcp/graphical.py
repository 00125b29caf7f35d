"""Seeded Poisson marks of the Harris graphical construction.

Each site carries three independent streams: recoveries at rate 1 and
arrows to the right and left at rate ``lambda_max``.  An arrow's level is
uniform on ``[0, lambda_max)`` and the arrow is *open* at rate ``lam``
when its level is below ``lam``, so a single log couples every rate up to
``lambda_max``.

Streams are keyed by ``(seed, site, kind)`` (see :mod:`bcp._streams`), so
a log over a larger window or a longer horizon restricts exactly to the
smaller one.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from ._streams import ARROW_LEFT, ARROW_RIGHT, RECOVERY, site_marks

KIND_NAMES = {RECOVERY: "recovery", ARROW_RIGHT: "arrow-right", ARROW_LEFT: "arrow-left"}

_HEADER = struct.Struct("<Qqqdd")
_RECORD = np.dtype([("time", "<f8"), ("site", "<i8"), ("kind", "u1"), ("level", "<f8")])


def _check_window(window) -> tuple[int, int]:
    lo, hi = (int(v) for v in window)
    if hi < lo:
        raise ValueError(f"empty window [{lo}, {hi}]")
    return lo, hi


@dataclass(frozen=True)
class Mark:
    """One point of the construction.

    ``level`` is ``None`` for recoveries and a float in ``[0, lambda_max)``
    for arrows.
    """

    time: float
    site: int
    kind: int
    level: float | None = None

    def __post_init__(self):
        if self.kind not in KIND_NAMES:
            raise ValueError(f"unknown mark kind {self.kind!r}")
        if (self.kind == RECOVERY) != (self.level is None):
            raise ValueError("level must be given exactly for arrow marks")
        if not self.time > 0:
            raise ValueError("mark time must be positive")

    @property
    def is_arrow(self) -> bool:
        return self.kind != RECOVERY

    @property
    def target(self) -> int:
        """Site an arrow points at (the site itself for a recovery)."""
        if self.kind == ARROW_RIGHT:
            return self.site + 1
        if self.kind == ARROW_LEFT:
            return self.site - 1
        return self.site


@dataclass(frozen=True, eq=False)
class EventLog:
    """Time-ordered marks over ``window x (0, horizon]``.

    Stored column-wise; ``levels`` is NaN for recoveries.  Ties in time
    (which the generator never produces in practice) are ordered by
    ``(site, kind)``.
    """

    window: tuple[int, int]
    horizon: float
    lambda_max: float
    seed: int
    times: np.ndarray
    sites: np.ndarray
    kinds: np.ndarray
    levels: np.ndarray

    def __len__(self) -> int:
        return int(self.times.shape[0])

    def __iter__(self) -> Iterator[Mark]:
        for i in range(len(self)):
            yield self.mark(i)

    def mark(self, i: int) -> Mark:
        k = int(self.kinds[i])
        lev = None if k == RECOVERY else float(self.levels[i])
        return Mark(float(self.times[i]), int(self.sites[i]), k, lev)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EventLog):
            return NotImplemented
        return (
            self.window == other.window
            and self.horizon == other.horizon
            and self.lambda_max == other.lambda_max
            and self.seed == other.seed
            and np.array_equal(self.times, other.times)
            and np.array_equal(self.sites, other.sites)
            and np.array_equal(self.kinds, other.kinds)
            and np.array_equal(self.levels, other.levels, equal_nan=True)
        )

    def restrict(self, sub_window, t0: float, t1: float) -> "EventLog":
        """Sub-log of marks with site in ``sub_window`` and time in ``(t0, t1]``."""
        lo, hi = _check_window(sub_window)
        if lo < self.window[0] or hi > self.window[1]:
            raise ValueError(f"sub-window [{lo}, {hi}] not inside {self.window}")
        if not (0.0 <= t0 <= t1 <= self.horizon):
            raise ValueError(f"time range ({t0}, {t1}] not inside (0, {self.horizon}]")
        keep = (self.sites >= lo) & (self.sites <= hi) & (self.times > t0) & (self.times <= t1)
        return EventLog((lo, hi), float(t1), self.lambda_max, self.seed, self.times[keep],
                        self.sites[keep], self.kinds[keep], self.levels[keep])


def make_log(window, horizon: float, lambda_max: float, seed: int) -> EventLog:
    """Generate all marks of ``window`` on ``(0, horizon]``.

    Examples
    --------
    >>> log = make_log((0, 0), 5.0, 0.0, seed=1)
    >>> set(log.kinds.tolist()) <= {0}
    True
    """
    lo, hi = _check_window(window)
    horizon = float(horizon)
    lambda_max = float(lambda_max)
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    if not lambda_max >= 0:
        raise ValueError("lambda_max must be non-negative")
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must fit in 64 unsigned bits")

    t_parts, s_parts, k_parts, l_parts = [], [], [], []
    kinds = (RECOVERY, ARROW_RIGHT, ARROW_LEFT) if lambda_max > 0 else (RECOVERY,)
    for x in range(lo, hi + 1):
        for k in kinds:
            rate = 1.0 if k == RECOVERY else lambda_max
            t, u = site_marks(np.uint64(seed), x, k, rate, horizon)
            t_parts.append(t)
            s_parts.append(np.full(t.shape[0], x, np.int64))
            k_parts.append(np.full(t.shape[0], k, np.uint8))
            l_parts.append(np.full(t.shape[0], np.nan) if k == RECOVERY else u * lambda_max)
    times = np.concatenate(t_parts)
    sites = np.concatenate(s_parts)
    kk = np.concatenate(k_parts)
    levels = np.concatenate(l_parts)
    order = np.lexsort((kk, sites, times))
    return EventLog((lo, hi), horizon, lambda_max, seed, times[order], sites[order],
                    kk[order], levels[order])


def is_open(mark: Mark, lam: float) -> bool:
    """Whether an arrow transmits at rate ``lam`` (its level is below ``lam``)."""
    if mark.kind == RECOVERY:
        raise ValueError("recovery marks carry no level")
    if lam < 0:
        raise ValueError("rate must be non-negative")
    return mark.level < lam


def merge_view(log: EventLog, sub_window, t0: float, t1: float) -> list[Mark]:
    """Marks of ``log`` in ``sub_window x (t0, t1]``, in time order."""
    return list(log.restrict(sub_window, t0, t1))


def dump_log(log: EventLog, path) -> None:
    """Write a debugging dump: little-endian header, then fixed-width records."""
    rec = np.empty(len(log), _RECORD)
    rec["time"] = log.times
    rec["site"] = log.sites
    rec["kind"] = log.kinds
    rec["level"] = log.levels
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(log.seed, log.window[0], log.window[1], log.horizon,
                              log.lambda_max))
        fh.write(rec.tobytes())


def load_log(path) -> EventLog:
    """Read a file written by :func:`dump_log`."""
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size or (len(data) - _HEADER.size) % _RECORD.itemsize:
        raise ValueError(f"{path}: truncated or malformed log dump")
    seed, lo, hi, horizon, lambda_max = _HEADER.unpack_from(data)
    rec = np.frombuffer(data, _RECORD, offset=_HEADER.size)
    return EventLog((lo, hi), horizon, lambda_max, seed, rec["time"].copy(),
                    rec["site"].copy(), rec["kind"].copy(), rec["level"].copy())
