"""Counter-based Poisson mark streams.

Every (seed, site, kind, block) tuple is hashed into a 64-bit key; the
uniforms of that block are ``mix64(key + (i + 1) * GOLDEN)`` for counter
``i``.  A block covers ``[b * BLOCK, (b + 1) * BLOCK)`` and holds the
restriction of a homogeneous Poisson process to that interval, generated
by exponential spacings started at the block's left end.  Because blocks
are keyed independently, the marks of any site at any time can be
produced without replaying other sites or earlier blocks.
"""
from __future__ import annotations

import numpy as np
from numba import njit

RECOVERY = 0
ARROW_RIGHT = 1
ARROW_LEFT = 2

BLOCK = 1.0

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_C_SITE = np.uint64(0xD6E8FEB86659FD93)
_C_KIND = np.uint64(0xA0761D6478BD642F)
_C_BLOCK = np.uint64(0xE7037ED1A0B428DB)
_C_REPLICA = np.uint64(0x8EBC6AF09C88C6E3)
_C_EXPERIMENT = np.uint64(0x589965CC75374CC3)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_TWO_M53 = 1.0 / 9007199254740992.0


@njit(cache=True, inline="always")
def mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True, inline="always")
def _as_u64(x):
    # two's-complement reinterpretation for negative sites
    return np.uint64(np.int64(x) & np.int64(0x7FFFFFFFFFFFFFFF)) | (
        np.uint64(0x8000000000000000) if x < 0 else np.uint64(0)
    )


@njit(cache=True)
def stream_key(seed, site, kind, block):
    h = mix64(np.uint64(seed) + _GOLDEN)
    h = mix64(h ^ (_as_u64(site) * _C_SITE))
    h = mix64(h ^ ((np.uint64(kind) + np.uint64(1)) * _C_KIND))
    return mix64(h ^ ((np.uint64(block) + np.uint64(1)) * _C_BLOCK))


@njit(cache=True, inline="always")
def _bits(key, counter):
    return mix64(key + (np.uint64(counter) + np.uint64(1)) * _GOLDEN)


@njit(cache=True, inline="always")
def uniform_open(key, counter):
    """Uniform on (0, 1); safe under ``log``."""
    return (np.float64(_bits(key, counter) >> _S11) + 0.5) * _TWO_M53


@njit(cache=True, inline="always")
def uniform_co(key, counter):
    """Uniform on [0, 1)."""
    return np.float64(_bits(key, counter) >> _S11) * _TWO_M53


@njit(cache=True)
def replica_seed(seed, replica):
    h = mix64(np.uint64(seed) ^ _C_REPLICA)
    return mix64(h + (np.uint64(replica) + np.uint64(1)) * _GOLDEN)


def experiment_seed(master, experiment):
    """Seed of experiment ``experiment`` under ``master``; replicas derive from it."""
    h = int(mix64(np.uint64(master) ^ _C_EXPERIMENT))
    return int(mix64(np.uint64((h + (experiment + 1) * int(_GOLDEN)) % 2**64)))


@njit(cache=True)
def next_mark(seed, site, kind, rate, key, block, j, t):
    """Advance one mark along the (seed, site, kind) stream.

    ``(key, block, j, t)`` is the cursor: key of the current block, number
    of draws consumed in it, and the time of the last mark (or the block
    start).  Returns the updated cursor and the level as a uniform on [0, 1).
    """
    while True:
        u = uniform_open(key, 2 * j)
        t = t - np.log(u) / rate
        j += 1
        if t < (block + 1) * BLOCK:
            return t, key, block, j, uniform_co(key, 2 * j - 1)
        block += 1
        t = block * BLOCK
        j = 0
        key = stream_key(seed, site, kind, block)


@njit(cache=True)
def first_mark_after(seed, site, kind, rate, t0):
    """Cursor of the first mark strictly after ``t0``."""
    block = np.int64(np.floor(t0 / BLOCK))
    key = stream_key(seed, site, kind, block)
    t = block * BLOCK
    j = np.int64(0)
    while True:
        t, key, block, j, lev = next_mark(seed, site, kind, rate, key, block, j, t)
        if t > t0:
            return t, key, block, j, lev


@njit(cache=True)
def site_marks(seed, site, kind, rate, t_end):
    """All marks of one stream on (0, t_end], as (times, level_u)."""
    if rate <= 0.0:
        return np.empty(0), np.empty(0)
    cap = int(rate * t_end * 1.2) + 16
    times = np.empty(cap)
    levs = np.empty(cap)
    n = 0
    t, key, block, j, lev = first_mark_after(seed, site, kind, rate, 0.0)
    while t <= t_end:
        if n == cap:
            cap *= 2
            nt = np.empty(cap)
            nl = np.empty(cap)
            nt[:n] = times[:n]
            nl[:n] = levs[:n]
            times = nt
            levs = nl
        times[n] = t
        levs[n] = lev
        n += 1
        t, key, block, j, lev = next_mark(seed, site, kind, rate, key, block, j, t)
    return times[:n], levs[:n]
