"""Exact transient law on a small window by uniformization.

States are subsets of ``{0, ..., n-1}`` encoded as bitmasks (bit ``x`` set
when site ``x`` is occupied).  Roles and rates follow
:func:`bcp._engine.arrow_rate`; arrows that would leave the window are
dropped, which is exactly what the replay engine does on a clipped window.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.stats import poisson

from .dynamics import BorderRule

MAX_SITES = 12
TAIL = 1e-10


@dataclass(frozen=True)
class Generator:
    """Sparse rate matrix ``Q`` with ``Q[S, S']`` the rate of ``S -> S'``."""

    n_sites: int
    rule: BorderRule
    matrix: sp.csr_matrix

    @property
    def n_states(self) -> int:
        return 1 << self.n_sites

    @property
    def uniformization_rate(self) -> float:
        return self.n_sites * (1.0 + 2.0 * self.rule.max_rate)


def _rate(rule: BorderRule, x: int, d: int, left: int, right: int) -> float:
    if d > 0:
        if x == right:
            return rule.right_out
        if x == left:
            return rule.left_in
        return rule.interior
    if x == left:
        return rule.left_out
    if x == right:
        return rule.right_in
    return rule.interior


def build_generator(n: int, rule: BorderRule) -> Generator:
    """Generator of the process on ``n`` sites with outgoing arrows dropped."""
    if not (isinstance(n, (int, np.integer)) and 1 <= n <= MAX_SITES):
        raise ValueError(f"number of sites must be in 1..{MAX_SITES}, got {n!r}")
    n = int(n)
    rows, cols, vals = [], [], []
    for s in range(1, 1 << n):
        occ = [x for x in range(n) if s >> x & 1]
        left, right = occ[0], occ[-1]
        out = 0.0
        for x in occ:
            rows.append(s)
            cols.append(s & ~(1 << x))
            vals.append(1.0)
            out += 1.0
            for d in (1, -1):
                y = x + d
                if y < 0 or y >= n or s >> y & 1:
                    continue
                r = _rate(rule, x, d, left, right)
                if r > 0:
                    rows.append(s)
                    cols.append(s | 1 << y)
                    vals.append(r)
                    out += r
        rows.append(s)
        cols.append(s)
        vals.append(-out)
    q = sp.csr_matrix((vals, (rows, cols)), shape=(1 << n, 1 << n))
    return Generator(n, rule, q)


def subset_index(sites) -> int:
    idx = 0
    for x in sites:
        idx |= 1 << int(x)
    return idx


def delta(n: int, sites) -> np.ndarray:
    """Point mass on the subset ``sites`` of ``{0..n-1}``."""
    if any(not 0 <= int(x) < n for x in sites):
        raise ValueError("site outside the window")
    p = np.zeros(1 << n)
    p[subset_index(sites)] = 1.0
    return p


def transient(gen: Generator, init: np.ndarray, t: float) -> np.ndarray:
    """Law at time ``t`` from ``init``; truncation error below ``1e-10`` in TV."""
    if t < 0:
        raise ValueError("time must be non-negative")
    p = np.asarray(init, dtype=np.float64)
    if p.shape != (gen.n_states,):
        raise ValueError("initial distribution has the wrong length")
    if t == 0:
        return p.copy()
    lam = gen.uniformization_rate
    mu = lam * t
    k_max = int(poisson.isf(TAIL, mu)) + 1
    weights = poisson.pmf(np.arange(k_max + 1), mu)
    # P = I + Q / lam acts on row vectors
    pt = (gen.matrix / lam).T.tocsr()
    term = p.copy()
    out = weights[0] * term
    for k in range(1, k_max + 1):
        term = term + pt @ term
        out += weights[k] * term
    return out


def extinction_by(gen: Generator, init_set, t: float) -> float:
    """Probability that the process from ``init_set`` is empty at time ``t``."""
    return float(transient(gen, delta(gen.n_sites, init_set), t)[0])


def occupied_probability(gen: Generator, dist: np.ndarray, sites) -> float:
    """Mass of the states containing every site in ``sites``."""
    mask = subset_index(sites)
    idx = np.arange(gen.n_states)
    return float(dist[(idx & mask) == mask].sum())


def dist_to_csv(dist: np.ndarray, n: int, path) -> None:
    """Rows ``(pattern, probability)``; pattern character ``x`` is site ``x``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["pattern", "probability"])
        for s, v in enumerate(dist):
            w.writerow(["".join("1" if s >> x & 1 else "0" for x in range(n)), repr(float(v))])
