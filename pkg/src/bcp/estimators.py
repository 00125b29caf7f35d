"""Monte Carlo estimators built on the replica kernels.

Replica ``r`` of an estimator called with ``seed`` reads the streams of
``replica_seed(seed, r)``.  Replicas are processed in fixed chunks whose
boundaries do not depend on the worker count, and chunk results are
concatenated in replica order, so every report is a deterministic
function of ``(seed, params)``.
"""
from __future__ import annotations

import csv
import json
import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _engine as E
from .dynamics import BorderRule, Configuration

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
Z95 = 1.959963984540054
CHUNK = 64

REPORT_FIELDS = ("quantity", "estimate", "ci_low", "ci_high", "replicas", "seed")


# --------------------------------------------------------------------------
# reports and intervals


@dataclass
class EstimateReport:
    """Point estimate with a 95% interval and full provenance."""

    quantity: str
    estimate: float
    ci_low: float
    ci_high: float
    replicas: int
    seed: int
    params: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["schema_version"] = SCHEMA_VERSION
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kw)

    def csv_row(self) -> dict:
        row = {k: getattr(self, k) for k in REPORT_FIELDS}
        row["params"] = json.dumps(self.params, sort_keys=True)
        return row


def wilson_interval(successes: int, n: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n < 1:
        raise ValueError("need at least one trial")
    p = successes / n
    denom = 1.0 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    # rounding can push an end point past p at the extremes
    return min(p, max(0.0, centre - half)), max(p, min(1.0, centre + half))


def mean_interval(values, z: float = Z95) -> tuple[float, float, float]:
    """Sample mean with a normal-approximation interval; returns (mean, lo, hi)."""
    v = np.asarray(values, dtype=np.float64)
    if v.size < 1:
        raise ValueError("need at least one value")
    m = float(v.mean())
    se = float(v.std(ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0
    return m, m - z * se, m + z * se


def proportion_report(quantity: str, successes: int, n: int, seed: int, params: dict,
                      **extra) -> EstimateReport:
    lo, hi = wilson_interval(successes, n)
    return EstimateReport(quantity, successes / n, lo, hi, n, int(seed), params, extra)


def mean_report(quantity: str, values, seed: int, params: dict, **extra) -> EstimateReport:
    m, lo, hi = mean_interval(values)
    n = int(np.asarray(values).size)
    se = (hi - m) / Z95
    return EstimateReport(quantity, m, lo, hi, n, int(seed), params, {"se": se, **extra})


# --------------------------------------------------------------------------
# replica runner


def run_chunks(kernel: Callable[[int, int], tuple], replicas: int, workers: int = 1,
               chunk: int = CHUNK) -> list[np.ndarray]:
    """Run ``kernel(r0, r1)`` over fixed chunks and concatenate outputs in order.

    The kernels release the GIL, so threads give real parallelism.
    """
    if replicas < 1:
        raise ValueError("replicas must be at least 1")
    if workers < 1:
        raise ValueError("workers must be at least 1")
    bounds = [(r0, min(r0 + chunk, replicas)) for r0 in range(0, replicas, chunk)]
    if workers == 1 or len(bounds) == 1:
        parts = [kernel(r0, r1) for r0, r1 in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: kernel(*b), bounds))
    return [np.concatenate([p[i] for p in parts]) for i in range(len(parts[0]))]


def _lam_max(rule: BorderRule, lambda_max: float | None) -> float:
    lam = rule.max_rate if lambda_max is None else float(lambda_max)
    rule.check_dominated(lam)
    return lam


def _finite(rule, init_sites, horizon, times, replicas, seed, lambda_max, clip, workers):
    lam = _lam_max(rule, lambda_max)
    lo, hi = (-E.NO_CLIP, E.NO_CLIP) if clip is None else (int(clip[0]), int(clip[1]))
    init = np.asarray(sorted(init_sites), dtype=np.int64)
    rates = rule.rates
    s = np.uint64(seed)

    def kernel(r0, r1):
        return E.batch_finite(s, r0, r1, lam, rates, init, float(horizon), lo, hi, times)

    return run_chunks(kernel, replicas, workers)


def _anchored(rule, init, depth, horizon, times, bits_depth, replicas, seed, lambda_max,
              workers):
    if depth < 2:
        raise ValueError("window depth must be at least 2")
    if init is None:
        init = Configuration.lower_half(depth)
    if init.mode != "left-infinite":
        raise ValueError("anchored runs need a left-infinite configuration")
    lam = _lam_max(rule, lambda_max)
    sites = init.sites()
    rates = rule.rates
    s = np.uint64(seed)

    def kernel(r0, r1):
        return E.batch_anchored(s, r0, r1, lam, rates, int(depth), sites, float(horizon),
                                times, int(bits_depth))

    return run_chunks(kernel, replicas, workers)


def _params(rule: BorderRule, **kw) -> dict:
    return {"rule": rule.as_dict(), **kw}


# --------------------------------------------------------------------------
# survival


def estimate_theta(rule: BorderRule, horizon: float, replicas: int, seed: int,
                   lambda_max: float | None = None, clip=None, init=(0,),
                   workers: int = 1) -> EstimateReport:
    """Fraction of runs from ``init`` still alive at ``horizon``.

    This is the finite-horizon survival proxy; the horizon is part of the
    report.  ``clip=(a, b)`` suppresses infections leaving ``[a, b]``.
    """
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    counts, _, _ = _finite(rule, init, horizon, np.array([float(horizon)]), replicas, seed,
                           lambda_max, clip, workers)
    alive = int((counts[:, 0] > 0).sum())
    return proportion_report("survival_at_horizon", alive, replicas, seed,
                             _params(rule, horizon=float(horizon), init=sorted(init),
                                     clip=None if clip is None else list(clip),
                                     lambda_max=_lam_max(rule, lambda_max)))


def survival_curve(rule: BorderRule, times: Sequence[float], replicas: int, seed: int,
                   lambda_max: float | None = None, workers: int = 1) -> np.ndarray:
    """Number of runs from {0} alive at each of ``times`` (same replicas for all)."""
    times = np.asarray(times, dtype=np.float64)
    counts, _, _ = _finite(rule, (0,), float(times[-1]), times, replicas, seed, lambda_max,
                           None, workers)
    return (counts > 0).sum(axis=0)


# --------------------------------------------------------------------------
# edge statistics in anchored mode


def estimate_edge_speed(rule: BorderRule, depth: int, burn_in: float, horizon: float,
                        replicas: int, seed: int, init: Configuration | None = None,
                        lambda_max: float | None = None, workers: int = 1) -> EstimateReport:
    """Mean of ``(R_T - R_b) / (T - b)`` over anchored replicas.

    Per-replica speeds are in ``extra["per_replica"]``.
    """
    if not horizon > burn_in >= 0:
        raise ValueError("need horizon > burn_in >= 0")
    edges, _, _ = _anchored(rule, init, depth, horizon, np.array([burn_in, horizon], float),
                            0, replicas, seed, lambda_max, workers)
    v = (edges[:, 1] - edges[:, 0]) / (horizon - burn_in)
    return mean_report("edge_speed", v, seed,
                       _params(rule, depth=int(depth), burn_in=float(burn_in),
                               horizon=float(horizon)),
                       per_replica=v.tolist())


@dataclass
class EmpiricalEdgeMeasure:
    """Counts of seen-from-edge patterns on ``[-depth, -1]``.

    Pattern strings list sites from ``-depth`` up to ``-1``.
    """

    depth: int
    counts: dict
    replicas: int
    sample_time: float

    def __post_init__(self):
        if sum(self.counts.values()) != self.replicas:
            raise ValueError("counts must sum to the number of replicas")
        if any(len(p) != self.depth for p in self.counts):
            raise ValueError("pattern length must equal the depth")

    def probabilities(self) -> dict:
        return {p: c / self.replicas for p, c in self.counts.items()}

    def merge(self, other: "EmpiricalEdgeMeasure") -> "EmpiricalEdgeMeasure":
        if other.depth != self.depth or other.sample_time != self.sample_time:
            raise ValueError("can only merge measures of equal depth and time")
        counts = dict(self.counts)
        for p, c in other.counts.items():
            counts[p] = counts.get(p, 0) + c
        return EmpiricalEdgeMeasure(self.depth, counts, self.replicas + other.replicas,
                                    self.sample_time)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["pattern", "count"])
            for p in sorted(self.counts):
                w.writerow([p, self.counts[p]])


def _patterns(bits: np.ndarray, depth: int) -> np.ndarray:
    """Integer codes of the patterns on ``[-depth, -1]``; bit ``k-1`` is site ``-k``."""
    w = 1 << np.arange(depth, dtype=np.int64)
    return bits[:, 1:depth + 1].astype(np.int64) @ w


def _code_to_string(code: int, depth: int) -> str:
    return "".join("1" if code >> (k - 1) & 1 else "0" for k in range(depth, 0, -1))


def empirical_measures(rule: BorderRule, init: Configuration | None, depth: int,
                       sample_times: Sequence[float], replicas: int, seed: int,
                       window: int = 200, lambda_max: float | None = None,
                       workers: int = 1) -> list[EmpiricalEdgeMeasure]:
    """Histograms of seen-from-edge patterns at each sample time (same replicas)."""
    if depth < 1 or depth > window:
        raise ValueError(f"depth must be in 1..{window} (the window depth)")
    times = np.asarray(sample_times, dtype=np.float64)
    _, _, bits = _anchored(rule, init, window, float(times[-1]), times, depth, replicas, seed,
                           lambda_max, workers)
    out = []
    for k, t in enumerate(times):
        uniq, cnt = np.unique(_patterns(bits[:, k, :], depth), return_counts=True)
        counts = {_code_to_string(int(c), depth): int(n) for c, n in zip(uniq, cnt)}
        out.append(EmpiricalEdgeMeasure(depth, counts, replicas, float(t)))
    return out


def empirical_measure(rule: BorderRule, init: Configuration | None, depth: int,
                      sample_time: float, replicas: int, seed: int, window: int = 200,
                      lambda_max: float | None = None, workers: int = 1) -> EmpiricalEdgeMeasure:
    """Histogram of seen-from-edge patterns at ``sample_time`` (anchored runs)."""
    return empirical_measures(rule, init, depth, [sample_time], replicas, seed, window,
                              lambda_max, workers)[0]


def tv_distance(m1: EmpiricalEdgeMeasure, m2: EmpiricalEdgeMeasure) -> float:
    """Total variation distance between two empirical measures of equal depth."""
    if m1.depth != m2.depth:
        raise ValueError("measures have different depths")
    p1, p2 = m1.probabilities(), m2.probabilities()
    keys = set(p1) | set(p2)
    return 0.5 * sum(abs(p1.get(k, 0.0) - p2.get(k, 0.0)) for k in keys)


def tv_bootstrap_se(m1: EmpiricalEdgeMeasure, m2: EmpiricalEdgeMeasure, n_boot: int = 500,
                    seed: int = 0) -> float:
    """Bootstrap standard error of :func:`tv_distance` (multinomial resampling)."""
    if m1.depth != m2.depth:
        raise ValueError("measures have different depths")
    keys = sorted(set(m1.counts) | set(m2.counts))
    p1 = np.array([m1.counts.get(k, 0) for k in keys], float) / m1.replicas
    p2 = np.array([m2.counts.get(k, 0) for k in keys], float) / m2.replicas
    rng = np.random.default_rng(seed)
    b1 = rng.multinomial(m1.replicas, p1, size=n_boot) / m1.replicas
    b2 = rng.multinomial(m2.replicas, p2, size=n_boot) / m2.replicas
    return float((0.5 * np.abs(b1 - b2).sum(axis=1)).std(ddof=1))


def agreement_probabilities(rule: BorderRule, init_a: Configuration, init_b: Configuration,
                            depth: int, sample_times: Sequence[float], replicas: int,
                            seed: int, window: int = 200, lambda_max: float | None = None,
                            workers: int = 1) -> list[EstimateReport]:
    """Agreement on ``[-depth, 0]`` at several times; both starts share every replica's marks."""
    if depth < 1 or depth > window:
        raise ValueError(f"depth must be in 1..{window}")
    lam = _lam_max(rule, lambda_max)
    times = np.asarray(sample_times, dtype=np.float64)
    horizon = float(times[-1])
    _, _, ba = _anchored(rule, init_a, window, horizon, times, depth, replicas, seed, lam,
                         workers)
    _, _, bb = _anchored(rule, init_b, window, horizon, times, depth, replicas, seed, lam,
                         workers)
    out = []
    for k, t in enumerate(times):
        agree = int(np.all(ba[:, k, :] == bb[:, k, :], axis=1).sum())
        out.append(proportion_report("agreement", agree, replicas, seed,
                                     _params(rule, depth=int(depth), sample_time=float(t),
                                             window=int(window), lambda_max=lam)))
    return out


def agreement_probability(rule: BorderRule, init_a: Configuration, init_b: Configuration,
                          depth: int, sample_time: float, replicas: int, seed: int,
                          window: int = 200, lambda_max: float | None = None,
                          workers: int = 1) -> EstimateReport:
    """Fraction of shared-randomness replicas whose edge windows agree on ``[-depth, 0]``."""
    return agreement_probabilities(rule, init_a, init_b, depth, [sample_time], replicas, seed,
                                   window, lambda_max, workers)[0]


def increment_moments(rule: BorderRule, burn_in: float, n_increments: int, replicas: int,
                      seed: int, window: int = 200, lambda_max: float | None = None,
                      workers: int = 1) -> dict[str, EstimateReport]:
    """Moments of the unit-time edge increments ``R_{k+1} - R_k`` after ``burn_in``.

    Intervals use per-replica averages as the independent units.  Returns
    reports under ``"positive"``, ``"negative"`` and ``"mean"``.
    """
    if n_increments < 1:
        raise ValueError("need at least one increment")
    times = burn_in + np.arange(n_increments + 1, dtype=np.float64)
    edges, _, _ = _anchored(rule, None, window, float(times[-1]), times, 0, replicas, seed,
                            lambda_max, workers)
    d = np.diff(edges, axis=1).astype(np.float64)
    p = _params(rule, burn_in=float(burn_in), n_increments=int(n_increments),
                window=int(window))
    total = int(d.size)
    return {
        "positive": mean_report("increment_positive", np.maximum(d, 0).mean(axis=1), seed, p,
                                increments=total),
        "negative": mean_report("increment_negative", np.maximum(-d, 0).mean(axis=1), seed, p,
                                increments=total),
        "mean": mean_report("increment_mean", d.mean(axis=1), seed, p, increments=total),
    }


def aij_frequencies(rule: BorderRule, i_values: Sequence[int], j: int, sample_time: float,
                    replicas: int, seed: int, window: int = 200,
                    init: Configuration | None = None, lambda_max: float | None = None,
                    workers: int = 1) -> list[EstimateReport]:
    """:func:`aij_frequency` for several ``i`` from the same replicas."""
    i_values = [int(i) for i in i_values]
    if any(not 0 <= i < window for i in i_values):
        raise ValueError(f"i must be in 0..{window - 1}")
    top = max(i_values)
    _, _, bits = _anchored(rule, init, window, sample_time, np.array([float(sample_time)]),
                           top, replicas, seed, lambda_max, workers)
    csum = np.cumsum(bits[:, 0, :], axis=1)
    out = []
    for i in i_values:
        hits = int((csum[:, i] < j).sum())
        out.append(proportion_report("aij_frequency", hits, replicas, seed,
                                     _params(rule, i=i, j=int(j),
                                             sample_time=float(sample_time),
                                             window=int(window))))
    return out


def aij_frequency(rule: BorderRule, i: int, j: int, sample_time: float, replicas: int,
                  seed: int, window: int = 200, init: Configuration | None = None,
                  lambda_max: float | None = None, workers: int = 1) -> EstimateReport:
    """Fraction of replicas with fewer than ``j`` occupied sites in ``[-i, 0]``."""
    return aij_frequencies(rule, [i], j, sample_time, replicas, seed, window, init,
                           lambda_max, workers)[0]


# --------------------------------------------------------------------------
# critical values


@dataclass
class Bracket:
    """Bisection result with every probe evaluated along the way."""

    lo: float
    hi: float
    evaluations: list
    warnings: list
    params: dict

    def to_dict(self) -> dict:
        d = asdict(self)
        d["schema_version"] = SCHEMA_VERSION
        return d


def _check_monotone(evals: list, key: str) -> list[str]:
    """Flag probe pairs whose intervals say the proxy decreased with the parameter."""
    out = []
    ordered = sorted(evals, key=lambda e: e[key])
    for a, b in zip(ordered, ordered[1:]):
        if a["ci_low"] > b["ci_high"]:
            out.append(f"proxy not monotone: {key}={a[key]:.6g} gives {a['estimate']:.4g} "
                       f"above {key}={b[key]:.6g} giving {b['estimate']:.4g}")
    return out


def _alive_until(rule, horizon, replicas, seed, lam, needed, workers):
    """Survivors at ``horizon``, stopping after the first chunk that reaches ``needed``.

    Chunks are consumed in replica order (``workers`` at a time), and the
    count is cut at the first chunk where the running total reaches
    ``needed``, so the result does not depend on ``workers``.  Returns
    ``(alive, replicas_used)``.
    """
    times = np.array([float(horizon)])
    init = np.zeros(1, np.int64)
    rates = rule.rates
    s = np.uint64(seed)

    def kernel(b):
        c, _, _ = E.batch_finite(s, b[0], b[1], lam, rates, init, float(horizon),
                                 -E.NO_CLIP, E.NO_CLIP, times)
        return int((c[:, 0] > 0).sum())

    bounds = [(r0, min(r0 + CHUNK, replicas)) for r0 in range(0, replicas, CHUNK)]
    alive = 0
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for g in range(0, len(bounds), workers):
            group = bounds[g:g + workers]
            counts = list(pool.map(kernel, group)) if pool else [kernel(b) for b in group]
            for (r0, r1), c in zip(group, counts):
                alive += c
                if alive >= needed:
                    return alive, r1
    finally:
        if pool:
            pool.shutdown()
    return alive, replicas


def estimate_critical_lambda_e(lambda_i: float, horizon: float, replicas: int,
                               survival_threshold: float = 0.005, tolerance: float = 0.05,
                               seed: int = 0, lambda_max: float | None = None,
                               workers: int = 1) -> Bracket:
    """Bracket the smallest ``lambda_e`` whose survival proxy reaches the threshold.

    The proxy is the survival frequency at ``horizon`` from {0}.  Every
    probe shares ``seed`` and ``lambda_max`` (default ``2 lambda_i + 2``), so
    the probes are coupled through one family of graphical constructions.
    A probe stops as soon as enough replicas survive to meet the threshold;
    the decision is the one the full count would give, and the logged
    estimate covers the replicas actually run.
    """
    if not lambda_i > 0:
        raise ValueError("lambda_i must be positive")
    if not tolerance > 0:
        raise ValueError("tolerance must be positive")
    top = 2.0 * lambda_i + 2.0
    lam = top if lambda_max is None else float(lambda_max)
    if lam < top:
        raise ValueError(f"lambda_max must be at least {top}")
    evals: list[dict] = []

    needed = math.ceil(survival_threshold * replicas - 1e-9)

    def survives(le: float) -> bool:
        alive, used = _alive_until(BorderRule.standard(lambda_i, le), horizon, replicas, seed,
                                   lam, needed, workers)
        lo_ci, hi_ci = wilson_interval(alive, used)
        evals.append({"lambda_e": le, "estimate": alive / used, "ci_low": lo_ci,
                      "ci_high": hi_ci, "alive": alive, "replicas": used})
        log.info("lambda_e=%.6g alive=%d/%d", le, alive, used)
        return alive >= needed

    params = {"lambda_i": lambda_i, "horizon": horizon, "replicas": replicas,
              "survival_threshold": survival_threshold, "tolerance": tolerance,
              "seed": int(seed), "lambda_max": lam}
    if survives(0.0):
        return Bracket(0.0, 0.0, evals, [], params)
    if not survives(top):
        raise RuntimeError(f"survival proxy stays below {survival_threshold} on [0, {top}]")
    lo, hi = 0.0, top
    while hi - lo > tolerance:
        mid = 0.5 * (lo + hi)
        if survives(mid):
            hi = mid
        else:
            lo = mid
    notes = _check_monotone(evals, "lambda_e")
    for n in notes:
        warnings.warn(n, RuntimeWarning, stacklevel=2)
    return Bracket(lo, hi, evals, notes, params)


def curvature_probe(lam: float, horizon: float, replicas: int, seed: int,
                    lambda_max: float | None = None, workers: int = 1) -> dict:
    """Local decay exponents of classical survival from {0} early and late.

    Survival is counted at ``T/8, T/4, T/2, T`` on the same replicas.  The
    exponent ``log2(P(a) / P(2a))`` is flat in ``a`` at criticality, drifts
    down above it and up below it.  ``drift`` is late minus early.
    """
    times = horizon * np.array([0.125, 0.25, 0.5, 1.0])
    rule = BorderRule.classical(lam)
    alive = survival_curve(rule, times, replicas, seed, lambda_max=lambda_max,
                           workers=workers).astype(np.float64)
    out = {"lambda": float(lam), "alive": alive.astype(int).tolist()}
    if np.any(alive == 0):
        # extinct before the horizon on every replica: clearly subcritical
        out.update(early=math.inf, late=math.inf, drift=math.inf)
        return out
    early = math.log2(alive[0] / alive[1])
    late = math.log2(alive[2] / alive[3])
    # delta-method standard error of the drift (conditional binomial ratios)
    var = sum((1 - alive[k + 1] / alive[k]) / alive[k + 1] for k in (0, 2)) / math.log(2) ** 2
    out.update(early=early, late=late, drift=late - early, se=math.sqrt(var))
    return out


def calibrate_lambda_c(precision: float = 0.02, horizon: float = 400.0, replicas: int = 10_000,
                       seed: int = 0, lo: float = 0.0, hi: float = 5.0,
                       check_replicas: int = 200, check_horizon: float = 50.0,
                       stages: Sequence[tuple[float, float]] = ((0.0625, 1.0), (0.25, 1.0)),
                       early_z: float = 4.0, workers: int = 1) -> Bracket:
    """Bisection bracket for the critical rate of the classical process.

    The end points are checked first with a cheap survival count: every
    run at ``lo`` must die by ``check_horizon`` and most runs at ``hi``
    must survive it.  Inside, each probe runs :func:`curvature_probe` on a
    ladder of cheaper ``(horizon fraction, replica fraction)`` stages and
    stops at the first stage whose drift is more than ``early_z`` standard
    errors away from zero; the full-size stage decides by the sign of the
    drift (negative means supercritical).  The ladder only saves work far
    from the critical point, where long supercritical runs are expensive;
    short horizons carry a small drift bias near criticality, hence the
    strict ``early_z``.
    """
    if not precision > 0:
        raise ValueError("precision must be positive")
    if not hi > lo >= 0:
        raise ValueError("need hi > lo >= 0")
    evals: list[dict] = []
    lo_rep = estimate_theta(BorderRule.classical(lo), check_horizon, check_replicas, seed,
                            workers=workers)
    hi_rep = estimate_theta(BorderRule.classical(hi), check_horizon, check_replicas, seed,
                            workers=workers)
    evals.append({"lambda": lo, "check_survival": lo_rep.estimate})
    evals.append({"lambda": hi, "check_survival": hi_rep.estimate})
    if lo_rep.estimate > 0.0 or hi_rep.ci_low < 0.5:
        raise RuntimeError(f"bracket check failed: survival {lo_rep.estimate:.3f} at {lo}, "
                           f"{hi_rep.estimate:.3f} at {hi}")
    ladder = [(horizon * f, max(1, int(replicas * g))) for f, g in stages]
    ladder.append((horizon, replicas))
    a, b = lo, hi
    while b - a > precision:
        mid = 0.5 * (a + b)
        for k, (t_k, n_k) in enumerate(ladder):
            probe = curvature_probe(mid, t_k, n_k, seed, workers=workers)
            probe.update(horizon=t_k, replicas=n_k)
            evals.append(probe)
            log.info("lambda=%.6g T=%g N=%d drift=%.4f", mid, t_k, n_k, probe["drift"])
            d, se = probe["drift"], probe.get("se", 0.0)
            if k == len(ladder) - 1 or abs(d) > early_z * se > 0 or math.isinf(d):
                break
        if d < 0:
            b = mid
        else:
            a = mid
    params = {"precision": precision, "horizon": horizon, "replicas": replicas,
              "seed": int(seed), "lo": lo, "hi": hi, "check_replicas": check_replicas,
              "check_horizon": check_horizon, "stages": [list(x) for x in stages],
              "early_z": early_z}
    return Bracket(a, b, evals, [], params)
