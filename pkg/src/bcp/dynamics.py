"""Contact process with modified border: rules, configurations, replay.

A :class:`BorderRule` assigns a rate to every arrow according to the role
of its source at ``t-``: the rightmost occupied site, the leftmost one, or
an interior site, and whether the arrow points out of or into the occupied
region.  A singleton is both edges and both of its arrows point outward.
In left-infinite mode no site is ever leftmost.

Two engines implement the same rule: :func:`evolve` replays an explicit
:class:`~bcp.graphical.EventLog`, while :func:`evolve_anchored`,
:func:`renewal_times` and :func:`box_connected` draw the same streams
lazily (only for occupied sites), so they never need a window up front.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _engine as E
from .graphical import EventLog

FINITE = "finite"
LEFT_INFINITE = "left-infinite"


@dataclass(frozen=True)
class BorderRule:
    """Infection rates by source role and arrow direction."""

    interior: float
    left_out: float
    left_in: float
    right_out: float
    right_in: float

    def __post_init__(self):
        for name in ("interior", "left_out", "left_in", "right_out", "right_in"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and np.isfinite(v) and v >= 0):
                raise ValueError(f"rate {name} must be a finite non-negative number, got {v!r}")

    @classmethod
    def standard(cls, lambda_i: float, lambda_e: float) -> "BorderRule":
        """Outward arrows of either edge at ``lambda_e``, all others at ``lambda_i``."""
        return cls(lambda_i, lambda_e, lambda_i, lambda_e, lambda_i)

    @classmethod
    def zeta(cls, lambda_c: float, eps: float) -> "BorderRule":
        """Both arrows of the rightmost site at ``lambda_c + eps``, the rest at ``lambda_c``."""
        return cls(lambda_c, lambda_c, lambda_c, lambda_c + eps, lambda_c + eps)

    @classmethod
    def classical(cls, lam: float) -> "BorderRule":
        return cls(lam, lam, lam, lam, lam)

    @property
    def rates(self) -> np.ndarray:
        return np.array([self.interior, self.left_out, self.left_in, self.right_out,
                         self.right_in], dtype=np.float64)

    @property
    def max_rate(self) -> float:
        return float(self.rates.max())

    @property
    def is_attractive(self) -> bool:
        return (self.left_out <= self.interior and self.right_out <= self.interior
                and self.left_in == self.interior and self.right_in == self.interior)

    def check_dominated(self, lambda_max: float) -> None:
        if self.max_rate > lambda_max:
            raise ValueError(f"rule rate {self.max_rate} exceeds lambda_max {lambda_max}")

    def as_dict(self) -> dict:
        return {"interior": self.interior, "left_out": self.left_out,
                "left_in": self.left_in, "right_out": self.right_out,
                "right_in": self.right_in}


@dataclass(frozen=True)
class Configuration:
    """Occupied sites inside an absolute window ``[x_min, x_max]``.

    In left-infinite mode ``x_min`` must be occupied and stands for every
    site to its left.
    """

    mode: str
    occupied: frozenset
    window: tuple[int, int]

    def __post_init__(self):
        if self.mode not in (FINITE, LEFT_INFINITE):
            raise ValueError(f"unknown mode {self.mode!r}")
        lo, hi = self.window
        if hi < lo:
            raise ValueError(f"empty window {self.window}")
        if any(x < lo or x > hi for x in self.occupied):
            raise ValueError("occupied site outside the window")
        if self.mode == LEFT_INFINITE and lo not in self.occupied:
            raise ValueError("left-infinite configuration must occupy its lowest cell")

    @classmethod
    def finite(cls, sites: Iterable[int], window=None) -> "Configuration":
        occ = frozenset(int(x) for x in sites)
        if window is None:
            window = (min(occ), max(occ)) if occ else (0, 0)
        return cls(FINITE, occ, (int(window[0]), int(window[1])))

    @classmethod
    def left_infinite(cls, sites: Iterable[int], window=None) -> "Configuration":
        """From the occupied sites; the lowest one becomes the boundary cell."""
        occ = frozenset(int(x) for x in sites)
        if not occ:
            raise ValueError("left-infinite configuration needs an occupied site")
        if window is None:
            window = (min(occ), max(occ))
        return cls(LEFT_INFINITE, occ, (int(window[0]), int(window[1])))

    @classmethod
    def lower_half(cls, depth: int, holes: Iterable[int] = ()) -> "Configuration":
        """``{..., -1, 0}`` on ``[-depth, 0]``, optionally with ``holes`` removed."""
        holes = set(int(h) for h in holes)
        if -depth in holes or 0 in holes:
            raise ValueError("holes must lie strictly inside the window")
        return cls(LEFT_INFINITE, frozenset(x for x in range(-depth, 1) if x not in holes),
                   (-depth, 0))

    @property
    def offset(self) -> int:
        return self.window[0]

    @property
    def right_edge(self) -> int | None:
        return max(self.occupied) if self.occupied else None

    def sites(self) -> np.ndarray:
        return np.array(sorted(self.occupied), dtype=np.int64)

    def pattern(self, lo: int | None = None, hi: int | None = None) -> str:
        """0/1 string over ``[lo, hi]`` (defaults to the window)."""
        lo = self.window[0] if lo is None else lo
        hi = self.window[1] if hi is None else hi
        return "".join("1" if x in self.occupied else "0" for x in range(lo, hi + 1))


def seen_from_edge(config: Configuration) -> Configuration:
    """Translate so the rightmost occupied site sits at 0.

    >>> seen_from_edge(Configuration.finite([-3, -1])).occupied == {-2, 0}
    True
    """
    r = config.right_edge
    if r is None:
        raise ValueError("empty configuration has no right edge")
    return Configuration(config.mode, frozenset(x - r for x in config.occupied),
                         (config.window[0] - r, config.window[1] - r))


@dataclass(frozen=True)
class Trajectory:
    """Jumps, sampled configurations and the right-edge path of one run.

    ``edge_r`` holds ``None``-free integers; an extinction is recorded with
    ``EMPTY_EDGE``.
    """

    jump_times: np.ndarray
    jump_sites: np.ndarray
    jump_kinds: np.ndarray
    sample_times: np.ndarray
    snapshots: tuple
    edge_times: np.ndarray
    edge_r: np.ndarray
    meta: dict = field(default_factory=dict)

    def snapshot(self, t: float) -> Configuration:
        i = int(np.searchsorted(self.sample_times, t))
        if i == len(self.sample_times) or self.sample_times[i] != t:
            raise KeyError(f"no snapshot at t={t}")
        return self.snapshots[i]

    def right_edge_at(self, t: float) -> int | None:
        """R at time ``t`` from the edge path (right-continuous)."""
        i = int(np.searchsorted(self.edge_times, t, side="right")) - 1
        if i < 0:
            raise ValueError("time precedes the recorded edge path")
        r = int(self.edge_r[i])
        return None if r == EMPTY_EDGE else r

    def to_csv(self, path) -> None:
        """Rows ``(time, event, site, right_edge)``; ``right_edge`` is R after the jump."""
        rows = []
        for t, x, k in zip(self.jump_times, self.jump_sites, self.jump_kinds):
            r = self.right_edge_at(t)
            rows.append((repr(float(t)), "birth" if k == E.JUMP_BIRTH else "death", int(x),
                         "" if r is None else r))
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["time", "event", "site", "right_edge"])
            w.writerows(rows)

    def patterns_to_csv(self, path) -> None:
        """One line per sample time with the 0/1 pattern of the snapshot window."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["time", "x_min", "pattern"])
            for t, c in zip(self.sample_times, self.snapshots):
                w.writerow([repr(float(t)), c.window[0], c.pattern()])


EMPTY_EDGE = int(E.EMPTY)


def _sample_grid(sample_times, horizon: float) -> np.ndarray:
    st = np.asarray(sample_times, dtype=np.float64).ravel()
    if st.size and (np.any(np.diff(st) < 0) or st[0] < 0):
        raise ValueError("sample times must be sorted and non-negative")
    if st.size and st[-1] > horizon:
        raise ValueError(f"sample time {st[-1]} beyond horizon {horizon}")
    return st


def evolve(init: Configuration, log: EventLog, rule: BorderRule,
           sample_times: Sequence[float] = (), record: bool = True) -> Trajectory:
    """Replay ``log`` from ``init`` under ``rule``.

    Arrows leaving ``log.window`` are dropped.  With ``record=False`` only
    the snapshots are filled in (faster for coupling checks).
    """
    rule.check_dominated(log.lambda_max)
    st = _sample_grid(sample_times, log.horizon)
    lo, hi = log.window
    if init.window[0] < lo or init.window[1] > hi:
        raise ValueError(f"initial window {init.window} not inside log window {log.window}")
    occ0 = np.zeros(hi - lo + 1, np.uint8)
    for x in init.occupied:
        occ0[x - lo] = 1
    left_inf = init.mode == LEFT_INFINITE
    snaps, jt, js, jk, et, er = E.replay_log(
        log.times, log.sites, log.kinds.astype(np.int64), log.levels, rule.rates,
        lo, hi, occ0, left_inf, st, record)
    snap_lo = init.window[0] if left_inf else lo
    configs = tuple(
        Configuration(init.mode, frozenset((np.flatnonzero(row) + lo).tolist()), (snap_lo, hi))
        for row in snaps)
    return Trajectory(jt, js, jk, st, configs, et, er,
                      {"rule": rule.as_dict(), "window": log.window, "seed": log.seed})


def _anchored_init(init: Configuration, depth: int) -> np.ndarray:
    if init.mode != LEFT_INFINITE:
        raise ValueError("anchored evolution needs a left-infinite configuration")
    if depth < 2:
        raise ValueError("window depth must be at least 2")
    return init.sites()


def evolve_anchored(init: Configuration, rule: BorderRule, depth: int, horizon: float,
                    seed: int, sample_times: Sequence[float] = (),
                    lambda_max: float | None = None) -> Trajectory:
    """Left-infinite evolution in a window of ``depth`` cells behind the edge.

    The window is ``[R_t - depth, R_t]``; its lowest cell is held occupied
    and cells entering it from the left arrive occupied.  Snapshots are
    seen from the edge, on ``[-depth, 0]``.
    """
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    sites = _anchored_init(init, int(depth))
    lam_max = rule.max_rate if lambda_max is None else float(lambda_max)
    rule.check_dominated(lam_max)
    st = _sample_grid(sample_times, horizon)
    out = E.simulate(np.uint64(seed), lam_max, rule.rates, True, int(depth), sites, 0.0,
                     float(horizon), -E.NO_CLIP, E.NO_CLIP, st, 0, True)
    snap_r, ss, so = out[0], out[6], out[7]
    configs = []
    for i in range(len(st)):
        r = int(snap_r[i])
        occ = frozenset((ss[so[i]:so[i + 1]] - r).tolist())
        configs.append(Configuration(LEFT_INFINITE, occ, (-int(depth), 0)))
    return Trajectory(out[8], out[9], out[10], st, tuple(configs), out[11], out[12],
                      {"rule": rule.as_dict(), "depth": int(depth), "seed": int(seed),
                       "lambda_max": lam_max})


@dataclass(frozen=True)
class Renewals:
    """Renewal times ``tau_0 = 0 < tau_1 < ...`` up to the horizon."""

    times: np.ndarray
    alive_at_horizon: bool
    horizon: float

    def count(self, t: float) -> int:
        """N(t): number of renewals ``tau_k <= t`` with ``k >= 1``."""
        return int(np.searchsorted(self.times[1:], t, side="right"))


def renewal_times(rule: BorderRule, horizon: float, seed: int,
                  lambda_max: float | None = None, max_renewals: int = 1_000_000) -> Renewals:
    """Extinction times of the process restarted from {0} after each extinction."""
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    lam_max = rule.max_rate if lambda_max is None else float(lambda_max)
    rule.check_dominated(lam_max)
    taus, n, alive = E.renewal_sequence(np.uint64(seed), lam_max, rule.rates, float(horizon),
                                        int(max_renewals))
    if n > max_renewals:
        raise RuntimeError(f"more than {max_renewals} renewals before the horizon")
    return Renewals(np.concatenate([[0.0], taus[:n]]), bool(alive), float(horizon))


def box_connected(rule: BorderRule, seed: int, source, box, targets,
                  lambda_max: float | None = None) -> bool:
    """Whether every target ``(y, s)`` is occupied in the box-restricted process.

    The process starts from the sites of the interval ``source`` at time
    ``t0`` and every infection leaving ``[a, b]`` is suppressed.  ``box`` is
    ``(a, b, t0, t1)``.
    """
    a, b, t0, t1 = box
    a, b, t0, t1 = int(a), int(b), float(t0), float(t1)
    if b < a or not (0 <= t0 <= t1):
        raise ValueError(f"malformed box {box}")
    s_lo, s_hi = int(source[0]), int(source[1])
    if s_hi < s_lo or s_lo < a or s_hi > b:
        raise ValueError("source interval must be a nonempty subset of the box")
    tg = [(int(y), float(s)) for y, s in targets]
    for y, s in tg:
        if not (a <= y <= b and t0 <= s <= t1):
            raise ValueError(f"target {(y, s)} outside the box")
    lam_max = rule.max_rate if lambda_max is None else float(lambda_max)
    rule.check_dominated(lam_max)
    times = np.array(sorted({s for _, s in tg}), dtype=np.float64)
    out = E.simulate(np.uint64(seed), lam_max, rule.rates, False, 0,
                     np.arange(s_lo, s_hi + 1, dtype=np.int64), t0, t1, a, b, times, 0, True)
    ss, so = out[6], out[7]
    for y, s in tg:
        i = int(np.searchsorted(times, s))
        if y not in ss[so[i]:so[i + 1]]:
            return False
    return True
