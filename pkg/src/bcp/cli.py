"""``bcp`` command line front end.

Every command reads one JSON config (``--config``); command line flags
override config fields, and ``--set key=JSON`` overrides any field.
Unknown fields are rejected before anything runs.

Seeds: experiment ``e`` under master seed ``m`` runs replica ``r`` on the
streams of ``replica_seed(experiment_seed(m, e), r)``.  Grid commands use
the cell index as ``e``; the other commands use the ``experiment`` field.

Exit codes: 0 success, 1 completed check that failed (``oracle-check``),
2 config error, 3 runtime error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import re
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import estimators as est
from . import exact
from ._streams import experiment_seed, replica_seed
from .dynamics import BorderRule, Configuration, renewal_times

SCHEMA_VERSION = 1
EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3

COMMANDS = ("survival", "speed", "measure", "agreement", "critical", "phase", "renewal",
            "oracle-check", "calibrate")

ROW_FIELDS = ("schema_version", "experiment", "command", "params", "estimate", "ci_low",
              "ci_high", "replicas", "wall_time_seconds")
MEASURE_FIELDS = ("schema_version", "experiment", "command", "params", "sample_time",
                  "pattern", "count")

COMMON = {"seed": 0, "replicas": 1000, "out": None, "format": "csv", "workers": 1,
          "experiment": 0, "lambda_max": None, "calibration": None}

# per-command fields and defaults (None: required unless listed in OPTIONAL)
FIELDS = {
    "survival": {"rule": None, "horizon": None, "init": [0], "clip": None},
    "speed": {"rule": None, "window": 400, "burn_in": 0.0, "horizon": None},
    "measure": {"rule": None, "window": 200, "depth": 4, "sample_times": None,
                "holes": [], "holes_b": None},
    "agreement": {"rule": None, "window": 200, "depth": 4, "sample_times": None,
                  "holes_a": [], "holes_b": None},
    "critical": {"lambda_i": None, "horizon": 300.0, "threshold": 0.005, "tolerance": 0.1},
    "phase": {"lambda_i": None, "lambda_e": None, "horizon": 200.0},
    "renewal": {"rule": None, "horizon": None},
    "oracle-check": {"rules": None, "horizons": [1.0, 2.0, 5.0], "min_sites": 1,
                     "max_sites": 8, "z_max": 4.0},
    "calibrate": {"precision": 0.02, "horizon": 400.0, "lo": 0.0, "hi": 5.0,
                  "check_replicas": 200, "check_horizon": 50.0, "stages": None},
}

# fields whose default of None means "not set" rather than "required"
OPTIONAL = {"clip", "holes_b", "stages"}

_LC = re.compile(r"^lambda_c\s*(?:([+-])\s*([0-9]*\.?[0-9]+))?$")


class ConfigError(Exception):
    pass


# --------------------------------------------------------------------------
# configuration


@dataclass
class ExperimentConfig:
    command: str
    values: dict

    def __getitem__(self, key):
        return self.values[key]


def _number(name, v, lo=None, integer=False, positive=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{name} must be a number, got {v!r}")
    if integer and int(v) != v:
        raise ConfigError(f"{name} must be an integer")
    if not math.isfinite(v):
        raise ConfigError(f"{name} must be finite")
    if positive and not v > 0:
        raise ConfigError(f"{name} must be positive")
    if lo is not None and v < lo:
        raise ConfigError(f"{name} must be >= {lo}")
    return int(v) if integer else float(v)


def _load_lambda_c(cfg: dict) -> float:
    path = cfg.get("calibration")
    if not path:
        raise ConfigError("rule refers to lambda_c but no calibration file is given")
    try:
        data = json.loads(Path(path).read_text())
        return float(data["lambda_c"])
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"cannot read calibration file {path}: {exc}") from exc


def _rate(name, v, cfg) -> float:
    if isinstance(v, str):
        m = _LC.match(v.strip())
        if not m:
            raise ConfigError(f"{name}: expected a number or 'lambda_c[+x]', got {v!r}")
        lc = _load_lambda_c(cfg)
        if m.group(1):
            shift = float(m.group(2))
            lc = lc + shift if m.group(1) == "+" else lc - shift
        v = lc
    return _number(name, v, lo=0.0)


RULE_KEYS = {
    "standard": ("lambda_i", "lambda_e"),
    "zeta": ("lambda_c", "eps"),
    "classical": ("lambda",),
    "custom": ("interior", "left_out", "left_in", "right_out", "right_in"),
}


def parse_rule(spec, cfg) -> BorderRule:
    """Rule from ``{"kind": ..., <rates>}``; rates may be ``"lambda_c"`` or ``"lambda_c+x"``."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError(f"rule must be an object with a 'kind', got {spec!r}")
    kind = spec["kind"]
    if kind not in RULE_KEYS:
        raise ConfigError(f"unknown rule kind {kind!r}")
    keys = RULE_KEYS[kind]
    extra = set(spec) - set(keys) - {"kind"}
    if extra:
        raise ConfigError(f"unknown rule fields {sorted(extra)}")
    missing = [k for k in keys if k not in spec]
    if missing:
        raise ConfigError(f"rule {kind} needs {missing}")
    vals = [_rate(f"rule.{k}", spec[k], cfg) for k in keys]
    if kind == "standard":
        return BorderRule.standard(*vals)
    if kind == "zeta":
        return BorderRule.zeta(*vals)
    if kind == "classical":
        return BorderRule.classical(*vals)
    return BorderRule(*vals)


def _sites(name, v):
    if not isinstance(v, list) or any(isinstance(x, bool) or not isinstance(x, int) for x in v):
        raise ConfigError(f"{name} must be a list of integers")
    return [int(x) for x in v]


def _times(name, v, positive=False):
    if not isinstance(v, list) or not v:
        raise ConfigError(f"{name} must be a nonempty list of numbers")
    out = [_number(f"{name}[]", x, lo=0.0) for x in v]
    if positive and min(out) <= 0:
        raise ConfigError(f"{name} must be positive")
    if out != sorted(out):
        raise ConfigError(f"{name} must be sorted")
    return out


def _grid(name, v):
    """``[start, stop, step]`` inclusive of ``stop`` (within rounding), or an explicit list."""
    if isinstance(v, dict):
        if set(v) != {"start", "stop", "step"}:
            raise ConfigError(f"{name} grid needs exactly start, stop, step")
        a = _number(f"{name}.start", v["start"], lo=0.0)
        b = _number(f"{name}.stop", v["stop"], lo=a)
        s = _number(f"{name}.step", v["step"], positive=True)
        n = int(math.floor((b - a) / s + 1e-9)) + 1
        return [round(a + k * s, 12) for k in range(n)]
    return _times(name, v)


def build_config(command: str, raw: dict) -> ExperimentConfig:
    """Validate ``raw`` for ``command``; raise :class:`ConfigError` on any problem."""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    allowed = {**COMMON, **FIELDS[command]}
    unknown = set(raw) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown fields for {command}: {sorted(unknown)}")
    cfg = {**allowed, **raw}
    missing = [k for k, d in FIELDS[command].items()
               if d is None and cfg[k] is None and k not in OPTIONAL]
    if missing:
        raise ConfigError(f"missing required fields for {command}: {missing}")

    v = dict(cfg)
    v["seed"] = _number("seed", cfg["seed"], lo=0, integer=True)
    if v["seed"] >= 2**64:
        raise ConfigError("seed must fit in 64 bits")
    v["replicas"] = _number("replicas", cfg["replicas"], lo=1, integer=True)
    v["workers"] = _number("workers", cfg["workers"], lo=1, integer=True)
    v["experiment"] = _number("experiment", cfg["experiment"], lo=0, integer=True)
    if cfg["format"] not in ("csv", "json"):
        raise ConfigError("format must be csv or json")
    if cfg["lambda_max"] is not None:
        v["lambda_max"] = _number("lambda_max", cfg["lambda_max"], lo=0.0)
    if "rule" in cfg:
        v["rule"] = parse_rule(cfg["rule"], cfg)
        if v["lambda_max"] is not None:
            try:
                v["rule"].check_dominated(v["lambda_max"])
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
    for k in ("horizon", "check_horizon", "precision", "tolerance", "z_max"):
        if k in cfg:
            v[k] = _number(k, cfg[k], positive=True)
    for k in ("burn_in", "threshold", "lo", "hi"):
        if k in cfg:
            v[k] = _number(k, cfg[k], lo=0.0)
    for k in ("window", "depth", "check_replicas", "max_sites", "min_sites"):
        if k in cfg:
            v[k] = _number(k, cfg[k], lo=1, integer=True)
    for k in ("init", "holes", "holes_a"):
        if k in cfg:
            v[k] = _sites(k, cfg[k])
    if cfg.get("holes_b") is not None:
        v["holes_b"] = _sites("holes_b", cfg["holes_b"])
    if "sample_times" in cfg:
        v["sample_times"] = _times("sample_times", cfg["sample_times"])
    if "horizons" in cfg:
        v["horizons"] = _times("horizons", cfg["horizons"], positive=True)

    if command == "survival":
        if not v["init"]:
            raise ConfigError("init must contain a site")
        if cfg["clip"] is not None:
            c = _sites("clip", cfg["clip"])
            if len(c) != 2 or c[1] < c[0] or not all(c[0] <= x <= c[1] for x in v["init"]):
                raise ConfigError("clip must be [a, b] containing the initial sites")
            v["clip"] = c
    if command == "speed" and not v["horizon"] > v["burn_in"]:
        raise ConfigError("horizon must exceed burn_in")
    if command in ("speed", "measure", "agreement") and v["window"] < 2:
        raise ConfigError("window must be at least 2")
    if command in ("measure", "agreement"):
        if v["depth"] > v["window"]:
            raise ConfigError("depth must not exceed window")
        for k in ("holes", "holes_a", "holes_b"):
            if v.get(k) and any(not -v["window"] < h < 0 for h in v[k]):
                raise ConfigError(f"{k} must lie strictly inside (-window, 0)")
    if command == "agreement" and v["holes_b"] is None:
        raise ConfigError("agreement needs holes_b")
    if command == "critical":
        v["lambda_i"] = _number("lambda_i", cfg["lambda_i"], positive=True)
        if not v["threshold"] <= 1:
            raise ConfigError("threshold must be in [0, 1]")
    if command == "phase":
        v["lambda_i"] = _grid("lambda_i", cfg["lambda_i"])
        v["lambda_e"] = _grid("lambda_e", cfg["lambda_e"])
    if command == "oracle-check":
        if not isinstance(cfg["rules"], list) or not cfg["rules"]:
            raise ConfigError("rules must be a nonempty list of rule objects")
        v["rules"] = [parse_rule(r, cfg) for r in cfg["rules"]]
        if not 1 <= v["min_sites"] <= v["max_sites"] <= exact.MAX_SITES:
            raise ConfigError(f"need 1 <= min_sites <= max_sites <= {exact.MAX_SITES}")
    if command == "calibrate":
        if not v["hi"] > v["lo"]:
            raise ConfigError("hi must exceed lo")
        if cfg["stages"] is not None:
            st = cfg["stages"]
            if not isinstance(st, list) or any(
                    not isinstance(p, list) or len(p) != 2 for p in st):
                raise ConfigError("stages must be a list of [horizon_fraction, replica_fraction]")
            v["stages"] = [(_number("stages[]", a, positive=True),
                            _number("stages[]", b, positive=True)) for a, b in st]
    return ExperimentConfig(command, v)


# --------------------------------------------------------------------------
# output


class Sink:
    """Append-only row writer; every row is written whole and flushed."""

    def __init__(self, path, fmt: str, fields):
        self.fmt = fmt
        self.fields = fields
        self.fh = sys.stdout if path is None else open(path, "w", newline="")
        if fmt == "csv":
            self._line(",".join(fields))

    def _line(self, text: str):
        self.fh.write(text + "\n")
        self.fh.flush()

    def write(self, row: dict):
        if self.fmt == "csv":
            buf = io.StringIO()
            csv.writer(buf, lineterminator="").writerow([_cell(row[k]) for k in self.fields])
            self._line(buf.getvalue())
        else:
            self._line(json.dumps(row, sort_keys=True))

    def close(self):
        if self.fh is not sys.stdout:
            self.fh.close()


def _cell(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return v


def _jsonable(o):
    if isinstance(o, BorderRule):
        return o.as_dict()
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, tuple):
        return list(o)
    return o


def _echo(cfg: ExperimentConfig, **extra) -> dict:
    keep = {k: _jsonable(v) for k, v in cfg.values.items()
            if k not in ("out", "format", "workers", "calibration")}
    keep["seed"] = cfg["seed"]
    keep.update(extra)
    return json.loads(json.dumps(keep, default=_jsonable))


def _row(cfg, e, params, rep: est.EstimateReport | None = None, t0=None, **kw) -> dict:
    row = {"schema_version": SCHEMA_VERSION, "experiment": e, "command": cfg.command,
           "params": params}
    if rep is not None:
        row.update(estimate=float(rep.estimate), ci_low=float(rep.ci_low),
                   ci_high=float(rep.ci_high), replicas=int(rep.replicas))
    row.update(kw)
    if t0 is not None:
        row["wall_time_seconds"] = round(time.perf_counter() - t0, 3)
    return row


# --------------------------------------------------------------------------
# commands


def _seed(cfg, e=None) -> int:
    return experiment_seed(cfg["seed"], cfg["experiment"] if e is None else e)


def cmd_survival(cfg, sink):
    t0 = time.perf_counter()
    e = cfg["experiment"]
    rep = est.estimate_theta(cfg["rule"], cfg["horizon"], cfg["replicas"], _seed(cfg),
                             lambda_max=cfg["lambda_max"], clip=cfg["clip"], init=cfg["init"],
                             workers=cfg["workers"])
    sink.write(_row(cfg, e, _echo(cfg), rep, t0))
    return EXIT_OK


def cmd_speed(cfg, sink):
    t0 = time.perf_counter()
    rep = est.estimate_edge_speed(cfg["rule"], cfg["window"], cfg["burn_in"], cfg["horizon"],
                                  cfg["replicas"], _seed(cfg), lambda_max=cfg["lambda_max"],
                                  workers=cfg["workers"])
    sink.write(_row(cfg, cfg["experiment"], _echo(cfg, se=rep.extra["se"]), rep, t0))
    return EXIT_OK


def _init(cfg, key):
    return Configuration.lower_half(cfg["window"], cfg[key] or [])


def cmd_measure(cfg, sink):
    """Pattern counts per sample time; with ``holes_b`` also TV rows between the two starts."""
    e = cfg["experiment"]
    s = _seed(cfg)
    for t in cfg["sample_times"]:
        m = est.empirical_measure(cfg["rule"], _init(cfg, "holes"), cfg["depth"], t,
                                  cfg["replicas"], s, window=cfg["window"],
                                  lambda_max=cfg["lambda_max"], workers=cfg["workers"])
        params = _echo(cfg, init="a")
        for p in sorted(m.counts):
            sink.write(_row(cfg, e, params, sample_time=t, pattern=p, count=m.counts[p]))
        if cfg["holes_b"] is not None:
            mb = est.empirical_measure(cfg["rule"], _init(cfg, "holes_b"), cfg["depth"], t,
                                       cfg["replicas"], s, window=cfg["window"],
                                       lambda_max=cfg["lambda_max"], workers=cfg["workers"])
            params = _echo(cfg, init="b")
            for p in sorted(mb.counts):
                sink.write(_row(cfg, e, params, sample_time=t, pattern=p, count=mb.counts[p]))
            tv = est.tv_distance(m, mb)
            se = est.tv_bootstrap_se(m, mb, seed=s % 2**32)
            sink.write(_row(cfg, e, _echo(cfg, init="tv", tv=tv, tv_se=se), sample_time=t,
                            pattern="", count=0))
    return EXIT_OK


def cmd_agreement(cfg, sink):
    e = cfg["experiment"]
    for t in cfg["sample_times"]:
        t0 = time.perf_counter()
        rep = est.agreement_probability(cfg["rule"], _init(cfg, "holes_a"),
                                        _init(cfg, "holes_b"), cfg["depth"], t,
                                        cfg["replicas"], _seed(cfg), window=cfg["window"],
                                        lambda_max=cfg["lambda_max"], workers=cfg["workers"])
        sink.write(_row(cfg, e, _echo(cfg, sample_time=t), rep, t0))
    return EXIT_OK


def cmd_critical(cfg, sink):
    t0 = time.perf_counter()
    br = est.estimate_critical_lambda_e(cfg["lambda_i"], cfg["horizon"], cfg["replicas"],
                                        cfg["threshold"], cfg["tolerance"], _seed(cfg),
                                        lambda_max=cfg["lambda_max"], workers=cfg["workers"])
    mid = 0.5 * (br.lo + br.hi)
    rep = est.EstimateReport("critical_lambda_e", mid, br.lo, br.hi, cfg["replicas"], 0)
    sink.write(_row(cfg, cfg["experiment"],
                    _echo(cfg, evaluations=br.evaluations, warnings=br.warnings), rep, t0))
    return EXIT_OK


def cmd_phase(cfg, sink):
    """One survival row per (lambda_i, lambda_e) cell, flushed as it completes."""
    e = 0
    for li in cfg["lambda_i"]:
        for le in cfg["lambda_e"]:
            t0 = time.perf_counter()
            rule = BorderRule.standard(li, le)
            rep = est.estimate_theta(rule, cfg["horizon"], cfg["replicas"], _seed(cfg, e),
                                     lambda_max=cfg["lambda_max"], workers=cfg["workers"])
            params = _echo(cfg, lambda_i=li, lambda_e=le, cell=e)
            sink.write(_row(cfg, e, params, rep, t0))
            e += 1
    return EXIT_OK


def cmd_renewal(cfg, sink):
    """Mean renewal count N(T) over replicas, plus the fraction still alive at T."""
    t0 = time.perf_counter()
    s = _seed(cfg)
    rule = cfg["rule"]
    lam = rule.max_rate if cfg["lambda_max"] is None else cfg["lambda_max"]
    counts, alive = [], 0
    for r in range(cfg["replicas"]):
        ren = renewal_times(rule, cfg["horizon"], int(replica_seed(s, r)), lambda_max=lam)
        counts.append(ren.count(cfg["horizon"]))
        alive += ren.alive_at_horizon
    rep = est.mean_report("renewal_count", counts, s, {})
    sink.write(_row(cfg, cfg["experiment"],
                    _echo(cfg, alive_fraction=alive / cfg["replicas"]), rep, t0))
    return EXIT_OK


def cmd_oracle_check(cfg, sink):
    """Extinction-by-T frequencies on clipped windows against uniformization.

    Each window of ``n`` sites starts from its middle site; a cell fails
    when ``|z| > z_max``.
    """
    e = 0
    failed = 0
    for rule in cfg["rules"]:
        for n in range(cfg["min_sites"], cfg["max_sites"] + 1):
            gen = exact.build_generator(n, rule)
            start = n // 2
            for t in cfg["horizons"]:
                t0 = time.perf_counter()
                p = exact.extinction_by(gen, [start], t)
                rep = est.estimate_theta(rule, t, cfg["replicas"], _seed(cfg, e),
                                         lambda_max=cfg["lambda_max"], clip=(0, n - 1),
                                         init=(start,), workers=cfg["workers"])
                freq = 1.0 - rep.estimate
                se = math.sqrt(max(p * (1 - p), 1e-300) / cfg["replicas"])
                z = (freq - p) / se if p * (1 - p) > 0 else (0.0 if freq == p else math.inf)
                ok = abs(z) <= cfg["z_max"]
                failed += not ok
                params = _echo(cfg, rule=rule.as_dict(), n_sites=n, start=start, t=t,
                               oracle=p, z=z, passed=ok)
                low, high = est.wilson_interval(int(round(freq * rep.replicas)), rep.replicas)
                sink.write(_row(cfg, e, params, None, t0, estimate=freq, ci_low=low,
                                ci_high=high, replicas=rep.replicas))
                e += 1
    if failed:
        logging.getLogger(__name__).warning("%d oracle cells failed", failed)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_calibrate(cfg, sink):
    """Bisection bracket for the classical critical rate; persisted to ``calibration``."""
    t0 = time.perf_counter()
    kw = {}
    if cfg["stages"] is not None:
        kw["stages"] = cfg["stages"]
    br = est.calibrate_lambda_c(cfg["precision"], cfg["horizon"], cfg["replicas"], _seed(cfg),
                                lo=cfg["lo"], hi=cfg["hi"],
                                check_replicas=cfg["check_replicas"],
                                check_horizon=cfg["check_horizon"], workers=cfg["workers"],
                                **kw)
    mid = 0.5 * (br.lo + br.hi)
    if cfg["calibration"]:
        record = {"schema_version": SCHEMA_VERSION, "lambda_c": mid, "lo": br.lo, "hi": br.hi,
                  "seed": cfg["seed"], "experiment": cfg["experiment"],
                  "params": br.params, "evaluations": br.evaluations}
        Path(cfg["calibration"]).write_text(json.dumps(record, indent=1, sort_keys=True,
                                                       default=_jsonable) + "\n")
    rep = est.EstimateReport("lambda_c", mid, br.lo, br.hi, cfg["replicas"], 0)
    sink.write(_row(cfg, cfg["experiment"], _echo(cfg, evaluations=br.evaluations), rep, t0))
    return EXIT_OK


HANDLERS = {"survival": cmd_survival, "speed": cmd_speed, "measure": cmd_measure,
            "agreement": cmd_agreement, "critical": cmd_critical, "phase": cmd_phase,
            "renewal": cmd_renewal, "oracle-check": cmd_oracle_check,
            "calibrate": cmd_calibrate}


# --------------------------------------------------------------------------
# entry point


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bcp", description="Contact process with modified "
                                "border: simulation experiments.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="JSON experiment config")
    p.add_argument("--seed", type=int)
    p.add_argument("--replicas", type=int)
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--workers", type=int)
    p.add_argument("--set", action="append", default=[], metavar="KEY=JSON",
                   help="override one config field with a JSON value")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def load_raw(args) -> dict:
    raw = {}
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text())
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
    for item in args.set:
        key, sep, val = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=JSON, got {item!r}")
        try:
            raw[key.strip()] = json.loads(val)
        except ValueError as exc:
            raise ConfigError(f"--set {key}: invalid JSON {val!r}") from exc
    for key in ("seed", "replicas", "out", "format", "workers"):
        v = getattr(args, key)
        if v is not None:
            raw[key] = v
    return raw


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = build_config(args.command, load_raw(args))
    except ConfigError as exc:
        print(f"bcp: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    fields = MEASURE_FIELDS if cfg.command == "measure" else ROW_FIELDS
    try:
        sink = Sink(cfg["out"], cfg["format"], fields)
    except OSError as exc:
        print(f"bcp: cannot open output: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return HANDLERS[cfg.command](cfg, sink)
    except (RuntimeError, ValueError, MemoryError) as exc:
        print(f"bcp: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    finally:
        sink.close()


if __name__ == "__main__":
    sys.exit(main())
