"""Experiment driver.

Each experiment is a subcommand; parameters come from defaults, then an
optional key=value config file, then command-line flags (later wins).
Reports are written atomically; JSON carries a schema version field and is
byte-identical for a fixed (config, seed) regardless of worker count.

Exit codes: 0 ok, 1 invalid config, 2 runtime assertion (e.g. a pruning
violation), 3 acceptance-check failure when --assert is set.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

from . import markoff, hyptrig, fn_surface, orbit, apl
from ._util import atomic_write_text, parallel_map


class ConfigError(ValueError):
    pass


def _load_config(path: str | None, defaults: dict, overrides: dict) -> dict:
    """defaults < file < flags; unknown keys rejected."""
    cfg = dict(defaults)
    if path:
        try:
            with open(path) as f:
                lines = f.read().splitlines()
        except OSError as e:
            raise ConfigError("cannot read config: %s" % e)
        for ln in lines:
            ln = ln.strip()
            if not ln or ln.startswith("#"):
                continue
            if "=" not in ln:
                raise ConfigError("bad config line: %r" % ln)
            k, v = ln.split("=", 1)
            k = k.strip().replace("-", "_")
            if k not in defaults:
                raise ConfigError("unknown config key: %r" % k)
            cfg[k] = v.strip()
    for k, v in overrides.items():
        if v is not None:
            cfg[k] = v
    return cfg


def _as_float(cfg, key):
    try:
        v = float(cfg[key])
    except (TypeError, ValueError):
        raise ConfigError("%s must be numeric, got %r" % (key, cfg[key]))
    if not math.isfinite(v):
        raise ConfigError("%s must be finite" % key)
    return v


def _as_pos_int(cfg, key):
    v = _as_float(cfg, key)
    if v <= 0 or v != int(v):
        raise ConfigError("%s must be a positive integer" % key)
    return int(v)


def _as_triple(cfg, key):
    try:
        parts = [float(p) for p in str(cfg[key]).split(",")]
    except ValueError:
        raise ConfigError("%s must be x,y,z" % key)
    if len(parts) != 3 or not all(math.isfinite(p) for p in parts):
        raise ConfigError("%s must be three finite numbers" % key)
    return tuple(parts)


def _workers(cfg) -> int:
    env = os.environ.get("TEICHLAB_WORKERS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError("TEICHLAB_WORKERS must be an integer")
    return _as_pos_int(cfg, "workers")


def _emit(out_path: str | None, text: str):
    if out_path:
        atomic_write_text(out_path, text)


def _radii_from_spec(spec: str) -> list:
    """lo:hi or lo:hi:n, log-spaced."""
    parts = str(spec).split(":")
    if len(parts) not in (2, 3):
        raise ConfigError("radii must be lo:hi[:n]")
    lo, hi = float(parts[0]), float(parts[1])
    n = int(parts[2]) if len(parts) == 3 else 9
    if lo <= 0 or hi < 100.0 * lo or n < 4:
        raise ConfigError("radii must span >= two decades with >= 4 samples")
    r = math.log(hi / lo)
    return [lo * math.exp(r * i / (n - 1)) for i in range(n)]


# ---------------------------------------------------------------------------
# experiments


def cmd_markoff_count(cfg):
    bound = _as_pos_int(cfg, "bound")
    norm = str(cfg["norm"])
    if norm not in ("max", "sum"):
        raise ConfigError("norm must be max or sum")
    count = markoff.enumerate_count(bound, norm=norm)
    print("count=%d" % count)
    if cfg["out"]:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["p", "q", "r"])
        for t in markoff.enumerate_triples(bound, norm=norm):
            w.writerow(t)
        _emit(cfg["out"], buf.getvalue())
    return 0


def cmd_markoff_fit(cfg):
    bounds = [int(float(b)) for b in str(cfg["bounds"]).split(",")]
    samples = []
    for b in bounds:
        c = markoff.enumerate_count(b, norm=str(cfg["norm"]))
        samples.append((b, c))
        print("bound=%d count=%d norm=%.6f" % (b, c, c / math.log(b) ** 2))
    C, report = markoff.fit_growth(samples)
    print("C=%.6f D=%.6f" % (C, report["D"]))
    if cfg["out"]:
        _emit(cfg["out"], json.dumps(
            {"schema": "MKF1", "samples": samples, "C": C, **report},
            sort_keys=True) + "\n")
    return 0


def cmd_count_simple(cfg):
    X = _as_triple(cfg, "x")
    L = _as_float(cfg, "L")
    print("count=%d" % orbit.count_simple(X, L))
    return 0


def cmd_count_word(cfg):
    X = _as_triple(cfg, "x")
    L = _as_float(cfg, "L")
    rep = orbit.count_orbit_word(X, str(cfg["word"]), L,
                                 prune_c=_as_float(cfg, "prune_c"))
    if rep.prune_violations:
        raise AssertionError("pruning violations: %d" % rep.prune_violations)
    print("count=%d" % rep.counts[-1])
    if cfg["out"]:
        _emit(cfg["out"], rep.to_json() + "\n")
    return 0


def cmd_bx(cfg):
    X = _as_triple(cfg, "x")
    print("B=%.9f" % orbit.thurston_ball_B(X))
    return 0


def cmd_cone_count(cfg):
    X = _as_triple(cfg, "x")
    print("count=%d" % orbit.cone_count(X, _as_pos_int(cfg, "m") if cfg["m"] else 0,
                                        _as_float(cfg, "L")))
    return 0


def cmd_ball_volume(cfg):
    gamma = str(cfg["word"])
    L = _as_float(cfg, "L")
    l1 = _as_float(cfg, "l1")
    mc = int(float(cfg["mc_samples"])) if cfg["mc_samples"] else 0
    if mc:
        vol, avg, se = orbit.ball_volume_and_average(
            gamma, L, mc_samples=mc, seed=_as_pos_int(cfg, "seed") if cfg["seed"] else 0,
            l1=l1, workers=_workers(cfg))
        print("vol=%.6f mc_avg=%.6f mc_stderr=%.6f" % (vol, avg, se))
    else:
        vol = orbit.ball_length_region_volume(gamma, L, l1=l1)
        print("vol=%.6f" % vol)
    return 0


def cmd_apl_ray(cfg):
    gamma = str(cfg["word"])
    d = [float(p) for p in str(cfg["dir"]).split(",")]
    if len(d) != 2:
        raise ConfigError("dir must be dl,dt")
    x0 = [float(p) for p in str(cfg["x0"]).split(",")]
    if len(x0) != 2:
        raise ConfigError("x0 must be l,t")
    fit = apl.ray_fit(gamma, tuple(x0), tuple(d),
                      _radii_from_spec(cfg["radii"]), l1=_as_float(cfg, "l1"))
    print(fit.to_json())
    if cfg["out"]:
        _emit(cfg["out"], fit.to_json() + "\n")
    return 0


def cmd_wall_scan(cfg):
    scan = apl.wall_scan(str(cfg["word"]), grid_n=_as_pos_int(cfg, "grid_n"),
                         l1=_as_float(cfg, "l1"))
    print("walls=%d mids=%s" % (scan.wall_count,
                                [round(s.u_mid, 6) for s in scan.walls]))
    if cfg["out"]:
        _emit(cfg["out"], scan.to_json() + "\n")
    return 0


def _hexagon_trial(i):
    import numpy as np
    rng = np.random.Generator(np.random.Philox(key=[1023, i]))
    ta, tb, cc = (float(v) for v in rng.uniform(0.2, 4.0, size=3))
    c = hyptrig.hexagon_side("convex", ta, tb, cc)
    back = hyptrig.hexagon_side("crossed", ta, tb, c)
    return abs(back - cc) / max(1.0, cc)


def cmd_hexagon_check(cfg):
    n = _as_pos_int(cfg, "trials")
    res = parallel_map(_hexagon_trial, range(n), _workers(cfg))
    worst = max(res)
    s = hyptrig.acosh_1p(1.0)  # cosh s = 2
    reg = abs(hyptrig.hexagon_side("convex", s, s, s) - s)
    print("roundtrip_sup=%.3e regular_residual=%.3e" % (worst, reg))
    return 0 if worst <= 1e-9 and reg <= 1e-12 else 2


def _wolpert_trial(i):
    import numpy as np
    rng = np.random.Generator(np.random.Philox(key=[1024, i]))
    if i % 2 == 0:
        X = fn_surface.SurfacePoint("S11", (float(rng.uniform(0.0, 1.5)),),
                                    float(rng.uniform(0.5, 3.0)),
                                    float(rng.uniform(-2.0, 2.0)))
    else:
        X = fn_surface.SurfacePoint("S04",
                                    tuple(float(v) for v in rng.uniform(0.3, 2.0, size=4)),
                                    float(rng.uniform(1.0, 4.0)),
                                    float(rng.uniform(-2.0, 2.0)))
    return fn_surface.wolpert_check(X)


def cmd_wolpert_check(cfg):
    n = _as_pos_int(cfg, "trials")
    res = parallel_map(_wolpert_trial, range(n), _workers(cfg))
    worst = max(res)
    print("jacobian_sup=%.3e" % worst)
    return 0 if worst <= 1e-5 else 2


def cmd_twist_convexity(cfg):
    gamma = str(cfg["word"])
    if not orbit.is_simple_word(gamma):
        raise ConfigError("twist convexity is a simple-curve property; "
                          "%r is not simple" % gamma)
    ell = _as_float(cfg, "ell")
    f = orbit._gamma_length_fn(gamma, _as_float(cfg, "l1"))
    n = _as_pos_int(cfg, "grid_n")
    span = _as_float(cfg, "span")
    taus = [-span + 2 * span * i / (n - 1) for i in range(n)]
    vals = [f(ell, t) for t in taus]
    d2 = [a - 2 * b + c for a, b, c in zip(vals, vals[1:], vals[2:])]
    print("min_second_diff=%.3e" % min(d2))
    return 0 if min(d2) > 0 else 2


# ---------------------------------------------------------------------------
# acceptance battery (reduced scale, deterministic, parallel-safe)


def _acc_markoff(_):
    c = markoff.enumerate_count(100, norm="max")
    return ("markoff_count_100", float(c), c == markoff.brute_force_count(100))


def _acc_count_simple(_):
    c = orbit.count_simple((3.0, 3.0, 3.0), 2.0)
    return ("count_simple_modular_L2", float(c), c == 3)


def _acc_commutator(_):
    from .fricke import trace_word_fricke
    ok = True
    for t in [(3, 3, 3), (3, 3, 6), (4, 5, 6), (7, 2, 9)]:
        k = t[0] ** 2 + t[1] ** 2 + t[2] ** 2 - t[0] * t[1] * t[2] - 2
        ok = ok and trace_word_fricke(t, "abAB") == k
    return ("commutator_trace", 1.0 if ok else 0.0, ok)


def _acc_hexagon(i):
    worst = max(_hexagon_trial(j) for j in range(20 * i, 20 * i + 20))
    return ("hexagon_roundtrip_%d" % i, worst, worst <= 1e-9)


def _acc_wolpert(i):
    worst = max(_wolpert_trial(j) for j in range(10 * i, 10 * i + 10))
    return ("wolpert_jacobian_%d" % i, worst, worst <= 1e-5)


def _acc_word_oracle(_):
    rep = orbit.count_orbit_word((3.0, 3.0, 3.0), "aabAb", 8.0)
    brute = orbit.count_orbit_word_bruteforce((3.0, 3.0, 3.0), "aabAb", 8.0)
    ok = rep.counts[-1] == brute and rep.prune_violations == 0
    return ("word_oracle_L8", float(rep.counts[-1]), ok)


def _acc_apl(_):
    fit = apl.ray_fit("aab", (0.3, -0.2), (1.0, 0.0),
                      _radii_from_spec("5:500:8"))
    ok = fit.rational["slope"]["ok"] and fit.rational["grad_tau"]["ok"]
    return ("apl_ray_aab", fit.slope, ok)


_ACC_CHECKS = [_acc_markoff, _acc_count_simple, _acc_commutator,
               _acc_hexagon, _acc_hexagon, _acc_wolpert,
               _acc_word_oracle, _acc_apl]


def _run_acc(idx):
    fn = _ACC_CHECKS[idx]
    name, value, ok = fn(idx)
    return {"check": name, "value": value, "pass": bool(ok)}


def cmd_acceptance(cfg):
    rows = parallel_map(_run_acc, range(len(_ACC_CHECKS)), _workers(cfg))
    all_ok = all(r["pass"] for r in rows)
    doc = json.dumps({"schema": "ACC1", "checks": rows, "pass": all_ok},
                     sort_keys=True) + "\n"
    sys.stdout.write(doc)
    if cfg["out"]:
        _emit(cfg["out"], doc)
    if cfg["assert_"] and not all_ok:
        return 3
    return 0


def cmd_report(cfg):
    files = str(cfg["files"]).split(",")
    if not files or not files[0]:
        raise ConfigError("report needs >= 1 file")
    docs = []
    for p in files:
        with open(p) as f:
            docs.append(json.load(f))
    schemas = {d.get("schema") for d in docs}
    if len(schemas) != 1:
        raise ConfigError("schema-version mismatch: %s" % sorted(map(str, schemas)))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    schema = schemas.pop()
    if schema == "ACC1":
        w.writerow(["check", "value", "pass"])
        for d in docs:
            for r in d["checks"]:
                w.writerow([r["check"], r["value"], r["pass"]])
    elif schema == "ORB1":
        w.writerow(["gamma", "L", "count", "sym_order", "pruned"])
        for d in docs:
            w.writerow([d["gamma"], d["L_grid"][-1], d["counts"][-1],
                        d["sym_order"], d["pruned"]])
    elif schema == "APL1":
        w.writerow(["gamma", "slope", "rational_ok"])
        for d in docs:
            w.writerow([d["gamma"], d.get("slope"),
                        d.get("rational", {}).get("slope", {}).get("ok")])
    else:
        raise ConfigError("unknown schema %r" % schema)
    text = buf.getvalue()
    sys.stdout.write(text)
    if cfg["out"]:
        _emit(cfg["out"], text)
    return 0


# ---------------------------------------------------------------------------
# dispatch

_COMMON = {"out": None, "workers": "1", "seed": "0"}

_SPECS = {
    "markoff-count": ({"bound": "100", "norm": "max", **_COMMON}, cmd_markoff_count),
    "markoff-fit": ({"bounds": "1000,1000000,1000000000", "norm": "max",
                     **_COMMON}, cmd_markoff_fit),
    "count-simple": ({"x": "3,3,3", "L": "2.0", **_COMMON}, cmd_count_simple),
    "count-word": ({"x": "3,3,3", "word": "a", "L": "10.0", "prune_c": "3.0",
                    **_COMMON}, cmd_count_word),
    "bx": ({"x": "3,3,3", **_COMMON}, cmd_bx),
    "cone-count": ({"x": "3,3,3", "m": "0", "L": "60.0", **_COMMON}, cmd_cone_count),
    "ball-volume": ({"word": "aabAb", "L": "30.0", "l1": "0.0",
                     "mc_samples": None, **_COMMON}, cmd_ball_volume),
    "apl-ray": ({"word": "aab", "dir": "1,0", "x0": "0,0", "radii": "10:1000",
                 "l1": "0.0", **_COMMON}, cmd_apl_ray),
    "wall-scan": ({"word": "aab", "grid_n": "64", "l1": "0.0", **_COMMON},
                  cmd_wall_scan),
    "hexagon-check": ({"trials": "100", **_COMMON}, cmd_hexagon_check),
    "wolpert-check": ({"trials": "50", **_COMMON}, cmd_wolpert_check),
    "twist-convexity": ({"word": "b", "ell": "1.5", "span": "4.0",
                         "grid_n": "33", "l1": "0.0", **_COMMON},
                        cmd_twist_convexity),
    "acceptance": ({"assert_": None, **_COMMON}, cmd_acceptance),
    "report": ({"files": "", **_COMMON}, cmd_report),
}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="teichlab",
                                 description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)
    for name, (defaults, _) in _SPECS.items():
        p = sub.add_parser(name)
        p.add_argument("--config", default=None)
        for key in defaults:
            if key == "assert_":
                p.add_argument("--assert", dest="assert_",
                               action="store_const", const="1")
            else:
                p.add_argument("--" + key.replace("_", "-"), dest=key,
                               default=None)
    ns = ap.parse_args(argv)
    defaults, fn = _SPECS[ns.cmd]
    overrides = {k: getattr(ns, k) for k in defaults}
    try:
        cfg = _load_config(ns.config, defaults, overrides)
        return fn(cfg)
    except ConfigError as e:
        print("config error: %s" % e, file=sys.stderr)
        return 1
    except (AssertionError, ArithmeticError, RuntimeError) as e:
        print("runtime assertion: %s" % e, file=sys.stderr)
        return 2
    except ValueError as e:
        print("config error: %s" % e, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
