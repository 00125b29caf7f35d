"""Numba replay kernels.

Two drivers share the same transition rule:

* ``replay_log`` walks an explicit, time-sorted mark array over a fixed
  window (used by :func:`bcp.dynamics.evolve`);
* ``simulate`` draws marks lazily from the counter-based streams, keeping a
  heap of pending marks only for occupied sites, so empty space costs
  nothing.  It supports finite mode (optionally clipped to ``[lo, hi]``)
  and the sliding left-infinite window behind the right edge.

Rate vectors are ordered ``(interior, left_out, left_in, right_out,
right_in)``.
"""
from __future__ import annotations

import numpy as np
from numba import njit

from ._streams import ARROW_RIGHT, RECOVERY, first_mark_after, next_mark, replica_seed

INTERIOR = 0
LEFT_OUT = 1
LEFT_IN = 2
RIGHT_OUT = 3
RIGHT_IN = 4

NO_CLIP = np.int64(2**62)
EMPTY = np.iinfo(np.int64).min

JUMP_BIRTH = 0
JUMP_DEATH = 1


@njit(cache=True, inline="always")
def arrow_rate(rates, x, direction, left, right, left_infinite):
    """Rate applicable to an arrow leaving occupied ``x``.

    A singleton is both edges and all its arrows point outward.
    """
    if direction > 0:
        if x == right:
            return rates[RIGHT_OUT]
        if x == left and not left_infinite:
            return rates[LEFT_IN]
        return rates[INTERIOR]
    if x == left and not left_infinite:
        return rates[LEFT_OUT]
    if x == right:
        return rates[RIGHT_IN]
    return rates[INTERIOR]


# --------------------------------------------------------------------------
# growable buffers


@njit(cache=True)
def _grow_f(a, n):
    if n < a.shape[0]:
        return a
    b = np.empty(2 * a.shape[0] + 16, a.dtype)
    b[: a.shape[0]] = a
    return b


@njit(cache=True)
def _grow_i(a, n):
    if n < a.shape[0]:
        return a
    b = np.empty(2 * a.shape[0] + 16, a.dtype)
    b[: a.shape[0]] = a
    return b


# --------------------------------------------------------------------------
# explicit-log replay


@njit(cache=True)
def replay_log(times, sites, kinds, levels, rates, lo, hi, occ0, left_infinite,
               sample_times, record):
    """Replay marks over the fixed window ``[lo, hi]``.

    ``occ0`` is the 0/1 occupancy of the window at time 0.  In left-infinite
    mode the cell ``pin`` (lowest occupied cell of ``occ0``) never dies.
    Returns ``(snap_occ, jump_t, jump_site, jump_kind, edge_t, edge_r)``;
    the edge path starts with ``(0, R_0)`` and gets a row whenever R moves.
    """
    n_sites = hi - lo + 1
    occ = occ0.copy()
    count = 0
    left = EMPTY
    right = EMPTY
    for i in range(n_sites):
        if occ[i]:
            count += 1
            if left == EMPTY:
                left = lo + i
            right = lo + i
    pin = left if left_infinite else EMPTY

    n_samples = sample_times.shape[0]
    snaps = np.zeros((n_samples, n_sites), np.uint8)
    jt = np.empty(16)
    js = np.empty(16, np.int64)
    jk = np.empty(16, np.int64)
    nj = 0
    et = np.empty(16)
    er = np.empty(16, np.int64)
    ne = 0
    if record:
        et[0] = 0.0
        er[0] = right
        ne = 1
    s_idx = 0

    for m in range(times.shape[0]):
        t = times[m]
        while s_idx < n_samples and sample_times[s_idx] < t:
            snaps[s_idx, :] = occ
            s_idx += 1
        if count == 0:
            break
        x = sites[m]
        if x < lo or x > hi or occ[x - lo] == 0:
            continue
        k = kinds[m]
        if k == RECOVERY:
            if x == pin:
                continue
            occ[x - lo] = 0
            count -= 1
            if record:
                jt = _grow_f(jt, nj)
                js = _grow_i(js, nj)
                jk = _grow_i(jk, nj)
                jt[nj] = t
                js[nj] = x
                jk[nj] = JUMP_DEATH
                nj += 1
            if count == 0:
                left = EMPTY
                right = EMPTY
                if record:
                    et = _grow_f(et, ne)
                    er = _grow_i(er, ne)
                    et[ne] = t
                    er[ne] = EMPTY
                    ne += 1
                continue
            if x == right:
                y = x - 1
                while occ[y - lo] == 0:
                    y -= 1
                right = y
                if record:
                    et = _grow_f(et, ne)
                    er = _grow_i(er, ne)
                    et[ne] = t
                    er[ne] = right
                    ne += 1
            if x == left:
                y = x + 1
                while occ[y - lo] == 0:
                    y += 1
                left = y
        else:
            d = 1 if k == ARROW_RIGHT else -1
            y = x + d
            if y < lo or y > hi or occ[y - lo] == 1:
                continue
            if left_infinite and y < pin:
                continue
            r = arrow_rate(rates, x, d, left, right, left_infinite)
            if levels[m] < r:
                occ[y - lo] = 1
                count += 1
                if y > right:
                    right = y
                    if record:
                        et = _grow_f(et, ne)
                        er = _grow_i(er, ne)
                        et[ne] = t
                        er[ne] = right
                        ne += 1
                if y < left:
                    left = y
                if record:
                    jt = _grow_f(jt, nj)
                    js = _grow_i(js, nj)
                    jk = _grow_i(jk, nj)
                    jt[nj] = t
                    js[nj] = y
                    jk[nj] = JUMP_BIRTH
                    nj += 1
    while s_idx < n_samples:
        snaps[s_idx, :] = occ
        s_idx += 1
    return snaps, jt[:nj], js[:nj], jk[:nj], et[:ne], er[:ne]


# --------------------------------------------------------------------------
# lazy heap engine
#
# Pending marks live in a slot pool (site, kind, occupation id, stream
# cursor, level); the heap orders (time, slot) pairs.  Entries whose site
# was vacated or re-occupied since scheduling are dropped when popped.


@njit(cache=True, inline="always")
def _before(h_t, h_s, p_site, p_kind, a, b):
    if h_t[a] != h_t[b]:
        return h_t[a] < h_t[b]
    sa = h_s[a]
    sb = h_s[b]
    if p_site[sa] != p_site[sb]:
        return p_site[sa] < p_site[sb]
    return p_kind[sa] < p_kind[sb]


@njit(cache=True, inline="always")
def _sift_up(h_t, h_s, p_site, p_kind, i):
    while i > 0:
        p = (i - 1) >> 1
        if _before(h_t, h_s, p_site, p_kind, i, p):
            t = h_t[i]
            h_t[i] = h_t[p]
            h_t[p] = t
            s = h_s[i]
            h_s[i] = h_s[p]
            h_s[p] = s
            i = p
        else:
            break


@njit(cache=True, inline="always")
def _sift_down(h_t, h_s, p_site, p_kind, n, i):
    while True:
        a = 2 * i + 1
        if a >= n:
            break
        c = a
        if a + 1 < n and _before(h_t, h_s, p_site, p_kind, a + 1, a):
            c = a + 1
        if _before(h_t, h_s, p_site, p_kind, c, i):
            t = h_t[i]
            h_t[i] = h_t[c]
            h_t[c] = t
            s = h_s[i]
            h_s[i] = h_s[c]
            h_s[c] = s
            i = c
        else:
            break


@njit(cache=True)
def _refit(occ, gid, base, lo, hi):
    """Re-allocate the site arrays so that ``[lo, hi]`` fits with slack."""
    cap = occ.shape[0]
    need = hi - lo + 1
    new_cap = max(cap, 2 * need + 64)
    new_base = lo - (new_cap - need) // 2
    nocc = np.zeros(new_cap, np.uint8)
    ngid = np.zeros(new_cap, np.int64)
    a = max(lo, base)
    b = min(hi, base + cap - 1)
    for s in range(a, b + 1):
        nocc[s - new_base] = occ[s - base]
        ngid[s - new_base] = gid[s - base]
    return nocc, ngid, new_base


@njit(cache=True)
def _snapshot(s_idx, occ, base, left, right, count, bits_depth, snap_r, snap_n, snap_bits,
              record, ss, nss, so):
    snap_r[s_idx] = right if count > 0 else EMPTY
    snap_n[s_idx] = count
    if count > 0:
        for k in range(bits_depth + 1):
            y = right - k - base
            if y >= 0 and y < occ.shape[0]:
                snap_bits[s_idx, k] = occ[y]
        if record:
            for y in range(left, right + 1):
                if occ[y - base]:
                    ss[nss] = y
                    nss += 1
    if record:
        so[s_idx + 1] = nss
    return nss


# segment exit codes
_DONE = 0
_NEED_HEAP = 1
_NEED_REFIT = 2
_NEED_REC = 3
_NEED_SS = 4

# layout of the integer state vector
_COUNT, _LEFT, _RIGHT, _PIN, _BASE, _HN, _NFREE, _NSLOTS, _GID, _SIDX, _NSS, _NJ, _NE, \
    _NFRESH, _REQ_LO, _REQ_HI = range(16)


@njit(cache=True, nogil=True)
def _segment(seed, lam_max, rates, anchored, depth, clipped, clip_lo, clip_hi, horizon,
             sample_times, bits_depth, record, occ, gid, p_site, p_kind, p_gid, p_block, p_j,
             p_key, p_lev, free, h_t, h_s, fresh, snap_r, snap_n, snap_bits, ss, so, jt, js,
             jk, et, er, st, ft):
    """Process marks until done or until a buffer must grow.

    No array is reallocated here; when capacity runs out the current mark is
    left at the heap root and a ``_NEED_*`` code is returned so the caller
    can grow the buffer and resume.
    """
    count = st[_COUNT]
    left = st[_LEFT]
    right = st[_RIGHT]
    pin = st[_PIN]
    base = st[_BASE]
    hn = st[_HN]
    nfree = st[_NFREE]
    nslots = st[_NSLOTS]
    next_gid = st[_GID]
    s_idx = st[_SIDX]
    nss = st[_NSS]
    nj = st[_NJ]
    ne = st[_NE]
    n_fresh = st[_NFRESH]
    t = ft[0]
    end_time = ft[1]
    n_samples = sample_times.shape[0]
    # arrows whose level reaches the largest rate can never transmit; they
    # are skipped inside their stream and never enter the heap
    cut = rates.max()
    n_kinds = 3 if cut > 0.0 else 1
    hcap = h_t.shape[0]
    n_cells = occ.shape[0]
    status = _DONE

    while True:
        if n_fresh > 0:
            if hn + n_kinds * n_fresh > hcap:
                status = _NEED_HEAP
                break
            for f in range(n_fresh):
                z = fresh[f]
                next_gid += 1
                gid[z - base] = next_gid
                for kind in range(n_kinds):
                    rate = 1.0 if kind == RECOVERY else lam_max
                    tn, key, bn, jn, lv = first_mark_after(seed, z, kind, rate, t)
                    if kind != RECOVERY:
                        while lv * lam_max >= cut and tn <= horizon:
                            tn, key, bn, jn, lv = next_mark(seed, z, kind, rate, key, bn,
                                                            jn, tn)
                    if nfree > 0:
                        nfree -= 1
                        slot = free[nfree]
                    else:
                        slot = nslots
                        nslots += 1
                    p_site[slot] = z
                    p_kind[slot] = kind
                    p_gid[slot] = next_gid
                    p_block[slot] = bn
                    p_j[slot] = jn
                    p_key[slot] = key
                    p_lev[slot] = lv * lam_max
                    h_t[hn] = tn
                    h_s[hn] = slot
                    _sift_up(h_t, h_s, p_site, p_kind, hn)
                    hn += 1
            n_fresh = 0

        if count == 0 or hn == 0:
            break
        tm = h_t[0]
        if tm > horizon:
            break
        short = False
        while s_idx < n_samples and sample_times[s_idx] < tm:
            if record and nss + (right - left + 1) > ss.shape[0]:
                short = True
                break
            nss = _snapshot(s_idx, occ, base, left, right, count, bits_depth,
                            snap_r, snap_n, snap_bits, record, ss, nss, so)
            s_idx += 1
        if short:
            status = _NEED_SS
            break

        slot = h_s[0]
        x = p_site[slot]
        kind = p_kind[slot]
        g = p_gid[slot]
        xi = x - base
        if xi < 0 or xi >= n_cells or occ[xi] == 0 or gid[xi] != g:
            # stale: drop the root
            free[nfree] = slot
            nfree += 1
            hn -= 1
            if hn > 0:
                h_t[0] = h_t[hn]
                h_s[0] = h_s[hn]
                _sift_down(h_t, h_s, p_site, p_kind, hn, 0)
            continue
        if record and (nj >= jt.shape[0] or ne + 1 >= et.shape[0]):
            status = _NEED_REC
            break
        t = tm

        if kind == RECOVERY:
            if not (anchored and x == pin):
                if anchored and x == right:
                    y = x - 1
                    while occ[y - base] == 0:
                        y -= 1
                    if y - depth < base:
                        st[_REQ_LO] = y - depth
                        st[_REQ_HI] = right
                        status = _NEED_REFIT
                        break
                occ[xi] = 0
                count -= 1
                if record:
                    jt[nj] = t
                    js[nj] = x
                    jk[nj] = JUMP_DEATH
                    nj += 1
                if count == 0:
                    left = EMPTY
                    right = EMPTY
                    end_time = t
                    if record:
                        et[ne] = t
                        er[ne] = EMPTY
                        ne += 1
                    break
                if x == right:
                    y = x - 1
                    while occ[y - base] == 0:
                        y -= 1
                    right = y
                    if record:
                        et[ne] = t
                        er[ne] = right
                        ne += 1
                    if anchored:
                        new_pin = right - depth
                        for y in range(new_pin, pin):
                            occ[y - base] = 1
                            count += 1
                            fresh[n_fresh] = y
                            n_fresh += 1
                        pin = new_pin
                        left = pin
                if x == left and not anchored:
                    y = x + 1
                    while occ[y - base] == 0:
                        y += 1
                    left = y
        else:
            d = 1 if kind == ARROW_RIGHT else -1
            y = x + d
            if not ((clipped and (y < clip_lo or y > clip_hi)) or (anchored and y < pin)):
                yi = y - base
                if yi < 0 or yi >= n_cells:
                    st[_REQ_LO] = min(left, y)
                    st[_REQ_HI] = max(right, y)
                    status = _NEED_REFIT
                    break
                if occ[yi] == 0 and p_lev[slot] < arrow_rate(rates, x, d, left, right, anchored):
                    occ[yi] = 1
                    count += 1
                    fresh[n_fresh] = y
                    n_fresh += 1
                    if record:
                        jt[nj] = t
                        js[nj] = y
                        jk[nj] = JUMP_BIRTH
                        nj += 1
                    if y < left:
                        left = y
                    if y > right:
                        right = y
                        if record:
                            et[ne] = t
                            er[ne] = right
                            ne += 1
                        if anchored:
                            new_pin = right - depth
                            for z in range(pin, new_pin):
                                if occ[z - base]:
                                    occ[z - base] = 0
                                    count -= 1
                            pin = new_pin
                            left = pin
                            if occ[pin - base] == 0:
                                occ[pin - base] = 1
                                count += 1
                                fresh[n_fresh] = pin
                                n_fresh += 1

        # advance the stream just consumed, reusing its slot at the root
        if occ[xi] == 1:
            rate = 1.0 if kind == RECOVERY else lam_max
            tn, key, bn, jn, lv = next_mark(seed, x, kind, rate, p_key[slot], p_block[slot],
                                            p_j[slot], t)
            if kind != RECOVERY:
                while lv * lam_max >= cut and tn <= horizon:
                    tn, key, bn, jn, lv = next_mark(seed, x, kind, rate, key, bn, jn, tn)
            p_key[slot] = key
            p_block[slot] = bn
            p_j[slot] = jn
            p_lev[slot] = lv * lam_max
            h_t[0] = tn
            _sift_down(h_t, h_s, p_site, p_kind, hn, 0)
        else:
            free[nfree] = slot
            nfree += 1
            hn -= 1
            if hn > 0:
                h_t[0] = h_t[hn]
                h_s[0] = h_s[hn]
                _sift_down(h_t, h_s, p_site, p_kind, hn, 0)

    st[_COUNT] = count
    st[_LEFT] = left
    st[_RIGHT] = right
    st[_PIN] = pin
    st[_BASE] = base
    st[_HN] = hn
    st[_NFREE] = nfree
    st[_NSLOTS] = nslots
    st[_GID] = next_gid
    st[_SIDX] = s_idx
    st[_NSS] = nss
    st[_NJ] = nj
    st[_NE] = ne
    st[_NFRESH] = n_fresh
    ft[0] = t
    ft[1] = end_time
    return status


@njit(cache=True)
def _grown(a, n):
    b = np.empty(n, a.dtype)
    m = min(n, a.shape[0])
    b[:m] = a[:m]
    return b


@njit(cache=True, nogil=True)
def simulate(seed, lam_max, rates, anchored, depth, init_sites, t0, horizon,
             clip_lo, clip_hi, sample_times, bits_depth, record):
    """Run one replica from ``init_sites`` at ``t0`` up to ``horizon``.

    Finite mode (``anchored == False``): the process lives on ``[clip_lo,
    clip_hi]`` (pass ``-NO_CLIP, NO_CLIP`` for the whole line); the empty set
    is absorbing.

    Anchored mode: window ``[R - depth, R]``.  Its lowest cell is pinned
    occupied and everything left of it counts as occupied.  The lowest
    entry of ``init_sites`` is read as the configuration's own boundary
    (everything left of it occupied).

    Per sample time the kernel records the right edge, the occupied count,
    and the occupancy of ``R - k`` for ``k = 0..bits_depth``.  With
    ``record`` set it also returns the occupied sites at each sample, the
    birth/death jumps and the right-edge path.

    Returns ``(snap_r, snap_n, snap_bits, alive, end_time, right,
    snap_sites, snap_offsets, jump_t, jump_site, jump_kind, edge_t, edge_r)``.
    """
    n_samples = sample_times.shape[0]
    snap_r = np.full(n_samples, EMPTY, np.int64)
    snap_n = np.zeros(n_samples, np.int64)
    snap_bits = np.zeros((n_samples, bits_depth + 1), np.uint8)
    so = np.zeros(n_samples + 1, np.int64)
    rec_cap = 64 if record else 1
    ss = np.empty(rec_cap, np.int64)
    jt = np.empty(rec_cap)
    js = np.empty(rec_cap, np.int64)
    jk = np.empty(rec_cap, np.int64)
    et = np.empty(rec_cap + 2)
    er = np.empty(rec_cap + 2, np.int64)

    clipped = (not anchored) and clip_hi < NO_CLIP
    if clipped:
        base = clip_lo
        cap = clip_hi - clip_lo + 1
    else:
        lo0 = init_sites.min() if init_sites.shape[0] > 0 else 0
        hi0 = init_sites.max() if init_sites.shape[0] > 0 else 0
        if anchored:
            lo0 = hi0 - depth
        cap = 2 * (hi0 - lo0 + 1) + 64
        base = lo0 - (cap - (hi0 - lo0 + 1)) // 2
    occ = np.zeros(cap, np.uint8)
    gid = np.zeros(cap, np.int64)

    count = 0
    left = EMPTY
    right = EMPTY
    pin = EMPTY
    if anchored:
        right = init_sites.max()
        pin = right - depth
        lowest = init_sites.min()
        for q in range(init_sites.shape[0]):
            x = init_sites[q]
            if x >= pin:
                occ[x - base] = 1
        for x in range(pin, max(lowest, pin) + 1):
            occ[x - base] = 1
        for x in range(pin, right + 1):
            count += occ[x - base]
        left = pin
    else:
        for q in range(init_sites.shape[0]):
            x = init_sites[q]
            if clipped and (x < clip_lo or x > clip_hi):
                continue
            if occ[x - base]:
                continue
            occ[x - base] = 1
            count += 1
            if left == EMPTY or x < left:
                left = x
            if right == EMPTY or x > right:
                right = x

    fresh = np.empty(max(count, depth) + 16, np.int64)
    n_fresh = 0
    if count > 0:
        for x in range(left, right + 1):
            if occ[x - base]:
                fresh[n_fresh] = x
                n_fresh += 1
    ne = 0
    if record and count > 0:
        et[0] = t0
        er[0] = right
        ne = 1

    hcap = 3 * count + 64
    p_site = np.empty(hcap, np.int64)
    p_kind = np.empty(hcap, np.int64)
    p_gid = np.empty(hcap, np.int64)
    p_block = np.empty(hcap, np.int64)
    p_j = np.empty(hcap, np.int64)
    p_key = np.empty(hcap, np.uint64)
    p_lev = np.empty(hcap)
    free = np.empty(hcap, np.int64)
    h_t = np.empty(hcap)
    h_s = np.empty(hcap, np.int64)

    s_idx = 0
    while s_idx < n_samples and sample_times[s_idx] < t0:
        s_idx += 1

    st = np.zeros(16, np.int64)
    st[_COUNT] = count
    st[_LEFT] = left
    st[_RIGHT] = right
    st[_PIN] = pin
    st[_BASE] = base
    st[_SIDX] = s_idx
    st[_NE] = ne
    st[_NFRESH] = n_fresh
    ft = np.array([t0, horizon])

    while True:
        status = _segment(seed, lam_max, rates, anchored, depth, clipped, clip_lo, clip_hi,
                          horizon, sample_times, bits_depth, record, occ, gid, p_site, p_kind,
                          p_gid, p_block, p_j, p_key, p_lev, free, h_t, h_s, fresh, snap_r,
                          snap_n, snap_bits, ss, so, jt, js, jk, et, er, st, ft)
        if status == _DONE:
            break
        if status == _NEED_HEAP:
            new_cap = 2 * (st[_HN] + 3 * st[_NFRESH]) + 64
            p_site = _grown(p_site, new_cap)
            p_kind = _grown(p_kind, new_cap)
            p_gid = _grown(p_gid, new_cap)
            p_block = _grown(p_block, new_cap)
            p_j = _grown(p_j, new_cap)
            p_key = _grown(p_key, new_cap)
            p_lev = _grown(p_lev, new_cap)
            free = _grown(free, new_cap)
            h_t = _grown(h_t, new_cap)
            h_s = _grown(h_s, new_cap)
        elif status == _NEED_REFIT:
            occ, gid, base = _refit(occ, gid, st[_BASE], st[_REQ_LO], st[_REQ_HI])
            st[_BASE] = base
        elif status == _NEED_REC:
            jt = _grown(jt, 2 * jt.shape[0])
            js = _grown(js, 2 * js.shape[0])
            jk = _grown(jk, 2 * jk.shape[0])
            et = _grown(et, 2 * et.shape[0])
            er = _grown(er, 2 * er.shape[0])
        else:
            ss = _grown(ss, 2 * ss.shape[0] + (st[_RIGHT] - st[_LEFT] + 1))

    count = st[_COUNT]
    left = st[_LEFT]
    right = st[_RIGHT]
    base = st[_BASE]
    s_idx = st[_SIDX]
    nss = st[_NSS]
    while s_idx < n_samples and sample_times[s_idx] <= horizon:
        if record and count > 0 and nss + (right - left + 1) > ss.shape[0]:
            ss = _grown(ss, 2 * ss.shape[0] + (right - left + 1))
        nss = _snapshot(s_idx, occ, base, left, right, count, bits_depth,
                        snap_r, snap_n, snap_bits, record, ss, nss, so)
        s_idx += 1
    if record:
        for q in range(s_idx, n_samples):
            so[q + 1] = nss
    nj = st[_NJ]
    ne = st[_NE]
    return (snap_r, snap_n, snap_bits, count > 0, ft[1], right,
            ss[:nss], so, jt[:nj], js[:nj], jk[:nj], et[:ne], er[:ne])


# --------------------------------------------------------------------------
# replica batches


@njit(cache=True, nogil=True)
def batch_finite(seed, r0, r1, lam_max, rates, init_sites, horizon, clip_lo, clip_hi,
                 sample_times):
    """Finite-mode replicas ``r0 .. r1-1``: occupancy count and right edge per sample."""
    n = r1 - r0
    ns = sample_times.shape[0]
    counts = np.zeros((n, ns), np.int64)
    edges = np.zeros((n, ns), np.int64)
    ends = np.zeros(n)
    for r in range(r0, r1):
        s = replica_seed(seed, r)
        out = simulate(s, lam_max, rates, False, 0, init_sites, 0.0, horizon,
                       clip_lo, clip_hi, sample_times, 0, False)
        counts[r - r0, :] = out[1]
        edges[r - r0, :] = out[0]
        ends[r - r0] = out[4]
    return counts, edges, ends


@njit(cache=True, nogil=True)
def batch_anchored(seed, r0, r1, lam_max, rates, depth, init_sites, horizon,
                   sample_times, bits_depth):
    """Anchored replicas: right edge, window count and edge bits per sample."""
    n = r1 - r0
    ns = sample_times.shape[0]
    edges = np.zeros((n, ns), np.int64)
    counts = np.zeros((n, ns), np.int64)
    bits = np.zeros((n, ns, bits_depth + 1), np.uint8)
    for r in range(r0, r1):
        s = replica_seed(seed, r)
        out = simulate(s, lam_max, rates, True, depth, init_sites, 0.0, horizon,
                       -NO_CLIP, NO_CLIP, sample_times, bits_depth, False)
        edges[r - r0, :] = out[0]
        counts[r - r0, :] = out[1]
        bits[r - r0, :, :] = out[2]
    return edges, counts, bits


@njit(cache=True, nogil=True)
def renewal_sequence(seed, lam_max, rates, horizon, max_renewals):
    """Extinction times of the process restarted from {0} after each extinction.

    All excursions read the same streams, so this is the restarted process
    of a single graphical construction.  Returns ``(taus, n, alive)``: the
    first ``min(n, max_renewals)`` renewal times in ``(0, horizon]``, their
    total number ``n``, and whether the last excursion reaches the horizon.
    """
    taus = np.zeros(max_renewals)
    init = np.zeros(1, np.int64)
    empty = np.zeros(0)
    t = 0.0
    k = 0
    while True:
        out = simulate(seed, lam_max, rates, False, 0, init, t, horizon,
                       -NO_CLIP, NO_CLIP, empty, 0, False)
        if out[3]:
            return taus, k, True
        t = out[4]
        if t > horizon:
            return taus, k, False
        if k < max_renewals:
            taus[k] = t
        k += 1


@njit(cache=True, nogil=True)
def batch_renewals(seed, r0, r1, lam_max, rates, horizon, max_renewals):
    """:func:`renewal_sequence` for replicas ``r0 .. r1-1``."""
    n = r1 - r0
    taus = np.zeros((n, max_renewals))
    n_tau = np.zeros(n, np.int64)
    alive = np.zeros(n, np.bool_)
    for r in range(r0, r1):
        tr, k, a = renewal_sequence(replica_seed(seed, r), lam_max, rates, horizon,
                                    max_renewals)
        taus[r - r0, :] = tr
        n_tau[r - r0] = k
        alive[r - r0] = a
    return taus, n_tau, alive
