"""Config-driven Monte Carlo runner.

A config is a JSON object::

    {
      "code": {"p": 5, "n": 2, "k": 2, "power": 1.0,
               "outer": {"rs": {"delta": 0.02}}},
      "sweep": {"snr_db": [14, 16]},
      "trials": 1000,
      "seed": 0,
      "out": "results.csv"
    }

``outer`` is either ``{"rs": {...}}`` or ``{"expander": {...}}``.  An
optional ``"cf": {"h": [...], "a": [...]}`` section turns the run into a
compute-and-forward experiment.  Trial ``i`` of a sweep point uses message,
dither and noise streams keyed by ``(seed, i)`` only, so results do not
depend on the number of threads or on which points were already done.
"""

from __future__ import annotations

import copy
import csv
import hashlib
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from ._stats import wilson_interval
from .channel import GAUSSIAN_METHOD, sigma2_from_snr, standard_normal, stream
from .compute_forward import CFSystem, cf_rate, estimate_relay_pe
from .concat import ConcatCode, plan_expander, plan_rs
from .exceptions import BadParams, ConfigError, DegenerateCoefficients, InfeasiblePlan
from .expander import ExpanderCode, random_regular_bipartite
from .galois import build_ext_field, is_prime
from .inner import InnerCodec, estimate_inner_pe
from .lattice import build_nested_pair
from .linear_code import random_code
from .reed_solomon import RSCode

CSV_COLUMNS = ["snr_db", "n", "p", "k", "N_out", "K_out_or_dim", "rate_bits_per_dim",
               "trials", "errors", "p_hat", "ci_lo", "ci_hi", "seed"]

CODE_STREAM = 0
COARSE_STREAM = 1
MSG_STREAM = 4
NOISE_STREAM = 5
GRAPH_STREAM = 7
BATCH_TRIALS = 256

# Exit codes
EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3

_CODE_DEFAULTS = {
    "beta": None,
    "power": 1.0,
    "shaping": "hypercube",
    "coarse_k": 0,
    "code_seed": 0,
    "alpha": None,
}
_RS_DEFAULTS = {"delta": 0.05, "K_out": None, "p_in_trials": 20000}
_EXP_DEFAULTS = {"epsilon": None, "k0": None, "graph_seed": 0}


# -- config ------------------------------------------------------------------

def load_config(path) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except FileNotFoundError:
        raise ConfigError("<file>", f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON: {exc}") from None
    return validate_config(cfg)


def dump_config(cfg: dict) -> str:
    """Canonical text form; ``load``-ing it gives back the same config."""
    return json.dumps(cfg, sort_keys=True, indent=2)


def config_hash(cfg: dict) -> str:
    """Hash of everything that can change results (``out`` and ``threads`` excluded)."""
    core = {k: v for k, v in cfg.items() if k not in ("out", "threads")}
    text = json.dumps(core, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _req(d, key, path):
    if key not in d:
        raise ConfigError(f"{path}.{key}" if path else key, "missing required field")
    return d[key]


def _int(v, path, lo=None):
    if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
        raise ConfigError(path, f"expected an integer, got {v!r}")
    if lo is not None and v < lo:
        raise ConfigError(path, f"must be >= {lo}")
    return int(v)


def _num(v, path, lo=None, allow_none=False):
    if v is None and allow_none:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(path, f"expected a number, got {v!r}")
    if lo is not None and v < lo:
        raise ConfigError(path, f"must be >= {lo}")
    return float(v) if isinstance(v, float) else v


def _int_or_list(v, path, lo=None):
    if isinstance(v, list):
        return [_int(x, f"{path}[{i}]", lo) for i, x in enumerate(v)]
    return _int(v, path, lo)


def _snr(v, path):
    if v is None or v == "inf":
        return "inf"
    return _num(v, path)


def validate_config(cfg) -> dict:
    """Fill defaults and check types and consistency; raises ConfigError."""
    if not isinstance(cfg, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    cfg = copy.deepcopy(cfg)
    code = _req(cfg, "code", "")
    if not isinstance(code, dict):
        raise ConfigError("code", "must be an object")
    for k, v in _CODE_DEFAULTS.items():
        code.setdefault(k, v)
    p = _int(_req(code, "p", "code"), "code.p", 2)
    if not is_prime(p):
        raise ConfigError("code.p", f"{p} is not prime")
    n = _int(_req(code, "n", "code"), "code.n", 1)
    k = _int(_req(code, "k", "code"), "code.k", 1)
    if k > n:
        raise ConfigError("code.k", "must not exceed code.n")
    if p**k > 10**6:
        raise ConfigError("code.k", "p^k is too large to enumerate")
    _num(code["power"], "code.power", 0)
    if code["power"] <= 0:
        raise ConfigError("code.power", "must be positive")
    _num(code["beta"], "code.beta", 0, allow_none=True)
    _num(code["alpha"], "code.alpha", 0, allow_none=True)
    _int(code["code_seed"], "code.code_seed", 0)
    if code["shaping"] not in ("hypercube", "general"):
        raise ConfigError("code.shaping", "must be 'hypercube' or 'general'")
    _int(code["coarse_k"], "code.coarse_k", 0)
    if code["coarse_k"] > n:
        raise ConfigError("code.coarse_k", "must not exceed code.n")

    outer = _req(code, "outer", "code")
    if not isinstance(outer, dict) or len(outer) != 1 or next(iter(outer)) not in ("rs", "expander"):
        raise ConfigError("code.outer", "must be {'rs': {...}} or {'expander': {...}}")
    sweep = cfg.setdefault("sweep", {})
    if not isinstance(sweep, dict):
        raise ConfigError("sweep", "must be an object")
    snrs = sweep.setdefault("snr_db", ["inf"])
    if not isinstance(snrs, list) or not snrs:
        raise ConfigError("sweep.snr_db", "must be a non-empty list")
    sweep["snr_db"] = [_snr(v, f"sweep.snr_db[{i}]") for i, v in enumerate(snrs)]
    q = p**k
    if "rs" in outer:
        rs = outer["rs"]
        if not isinstance(rs, dict):
            raise ConfigError("code.outer.rs", "must be an object")
        for kk, v in _RS_DEFAULTS.items():
            rs.setdefault(kk, v)
        _num(rs["delta"], "code.outer.rs.delta", 0)
        _int(rs["p_in_trials"], "code.outer.rs.p_in_trials", 100)
        if rs["K_out"] is not None:
            _int(rs["K_out"], "code.outer.rs.K_out", 1)
            if rs["K_out"] > q - 1:
                raise ConfigError("code.outer.rs.K_out", f"must be <= p^k - 1 = {q - 1}")
        if q - 1 < 1:
            raise ConfigError("code.k", "outer field too small")
        n_out = sweep.setdefault("N_out", [q - 1])
        if n_out != [q - 1]:
            raise ConfigError("sweep.N_out", f"RS outer codes use N_out = p^k - 1 = {q - 1}")
    else:
        ex = outer["expander"]
        if not isinstance(ex, dict):
            raise ConfigError("code.outer.expander", "must be an object")
        for kk, v in _EXP_DEFAULTS.items():
            ex.setdefault(kk, v)
        base = "code.outer.expander"
        ex["delta_graph"] = _int_or_list(_req(ex, "delta_graph", base), f"{base}.delta_graph", 3)
        if ex["k0"] is None and ex["epsilon"] is None:
            raise ConfigError(f"{base}.k0", "give k0 or epsilon")
        if ex["k0"] is not None:
            ex["k0"] = _int_or_list(ex["k0"], f"{base}.k0", 1)
        _num(ex["epsilon"], f"{base}.epsilon", 0, allow_none=True)
        _int(ex["graph_seed"], f"{base}.graph_seed", 0)
        if "N_out" not in sweep:
            if "m" not in ex:
                raise ConfigError("sweep.N_out", "expander runs need sweep.N_out or code.outer.expander.m")
            d0 = ex["delta_graph"][0] if isinstance(ex["delta_graph"], list) else ex["delta_graph"]
            sweep["N_out"] = [_int(ex["m"], f"{base}.m", 1) * d0]
        n_out = sweep["N_out"]
        if not isinstance(n_out, list) or not n_out:
            raise ConfigError("sweep.N_out", "must be a non-empty list")
        for i, N in enumerate(n_out):
            _int(N, f"sweep.N_out[{i}]", 1)
            D = _per_point(ex["delta_graph"], i, f"{base}.delta_graph", len(n_out))
            if D >= q:
                raise ConfigError(f"{base}.delta_graph", f"delta = {D} needs a field larger than p^k = {q}")
            if N % D or N // D < D:
                raise ConfigError(f"sweep.N_out[{i}]", f"N_out = {N} must be a multiple m*delta with m >= delta = {D}")
            if ex["k0"] is not None:
                k0 = _per_point(ex["k0"], i, f"{base}.k0", len(n_out))
                if k0 > D:
                    raise ConfigError(f"{base}.k0", f"k0 = {k0} exceeds delta = {D}")
    cfg["trials"] = _int(cfg.get("trials", 1000), "trials", 100)
    cfg["seed"] = _int(cfg.get("seed", 0), "seed", 0)
    cfg.setdefault("out", "results.csv")
    if not isinstance(cfg["out"], str):
        raise ConfigError("out", "must be a path string")
    if "threads" in cfg:
        _int(cfg["threads"], "threads", 1)
    if "cf" in cfg:
        cf = cfg["cf"]
        if not isinstance(cf, dict):
            raise ConfigError("cf", "must be an object")
        h = _req(cf, "h", "cf")
        a = _req(cf, "a", "cf")
        if not isinstance(h, list) or not h:
            raise ConfigError("cf.h", "must be a non-empty list")
        if not isinstance(a, list) or len(a) != len(h):
            raise ConfigError("cf.a", "must be a list with the same length as cf.h")
        for i, v in enumerate(h):
            _num(v, f"cf.h[{i}]")
        for i, v in enumerate(a):
            _int(v, f"cf.a[{i}]")
    return cfg


def _per_point(v, i, path, count):
    if isinstance(v, list):
        if len(v) != count:
            raise ConfigError(path, f"list must have one entry per sweep.N_out value ({count})")
        return v[i]
    return v


# -- building ----------------------------------------------------------------

def build_inner(cfg: dict, snr_db) -> InnerCodec:
    """Inner codec for one SNR; the coarse scale defaults to the power budget."""
    code = cfg["code"]
    p, n, k = code["p"], code["n"], code["k"]
    Fp = build_ext_field(p)
    fine = random_code(Fp, n, k, stream(code["code_seed"], CODE_STREAM))
    coarse = None
    if code["shaping"] == "general":
        coarse = random_code(Fp, n, code["coarse_k"], stream(code["code_seed"], COARSE_STREAM))
    P = float(code["power"])
    beta = code["beta"]
    if beta is None:
        unit = build_nested_pair(fine, "hypercube" if coarse is None else "general", 1.0, coarse)
        beta = math.sqrt(n * P) / unit.covering_radius().radius
    pair = build_nested_pair(fine, "hypercube" if coarse is None else "general", beta, coarse)
    sigma2 = sigma2_from_snr(P, None if snr_db == "inf" else snr_db)
    return InnerCodec(pair, power=P, noise_var=sigma2, alpha=code["alpha"]).fit()


@dataclass
class PointSetup:
    code: ConcatCode
    system: CFSystem | None
    planner: dict = field(default_factory=dict)


def build_point(cfg: dict, snr_db, N_out: int, index: int = 0) -> PointSetup:
    """Inner codec, planned outer code and (optionally) CF system for one sweep point."""
    code_cfg = cfg["code"]
    inner = build_inner(cfg, snr_db)
    pair = inner.pair
    F = build_ext_field(pair.p, pair.k)
    seed = cfg["seed"]
    cf = cfg.get("cf")
    planner = {}
    outer_cfg = code_cfg["outer"]
    if "rs" in outer_cfg:
        rs = outer_cfg["rs"]
        if rs["K_out"] is not None:
            K_out = rs["K_out"]
        else:
            if cf is None:
                est = estimate_inner_pe(inner, rs["p_in_trials"], seed=seed)
            else:
                est = estimate_relay_pe(inner, cf["h"], cf["a"], inner.noise_var_, code_cfg["alpha"],
                                        rs["p_in_trials"], seed=seed)
            planner["p_in_hat"] = est.p_hat
            planner["p_in_ci_hi"] = est.ci_hi
            try:
                K_out = plan_rs(est.ci_hi, N_out, rs["delta"]).K_out
            except InfeasiblePlan as exc:
                raise ConfigError("code.outer.rs.delta", f"plan infeasible at snr_db={snr_db}: {exc}") from None
        planner["K_out"] = K_out
        outer = RSCode(F, N_out, K_out)
    else:
        ex = outer_cfg["expander"]
        count = len(cfg["sweep"]["N_out"])
        D = _per_point(ex["delta_graph"], index, "code.outer.expander.delta_graph", count)
        k0 = None if ex["k0"] is None else _per_point(ex["k0"], index, "code.outer.expander.k0", count)
        graph = random_regular_bipartite(D, N_out // D, stream(ex["graph_seed"], GRAPH_STREAM, N_out))
        try:
            plan = plan_expander(ex["epsilon"], D, graph, k0=k0)
        except BadParams as exc:
            raise ConfigError("code.outer.expander", str(exc)) from None
        outer = ExpanderCode(graph, RSCode(F, D, plan.k0), lam=plan.lam)
        planner.update(k0=plan.k0, d0=plan.d0, lam=plan.lam, threshold=plan.threshold,
                       slack_ok=plan.slack_ok, dimension=outer.dimension)
    concat = ConcatCode(inner, outer, dither_seed=seed)
    system = None
    if cf is not None:
        system = CFSystem(concat, cf["h"], cf["a"], inner.noise_var_, alpha=code_cfg["alpha"])
        try:
            planner["cf_rate"] = system.rate()
        except DegenerateCoefficients:
            planner["cf_rate"] = float("-inf")
    planner["rate"] = concat.rate
    return PointSetup(concat, system, planner)


# -- simulation --------------------------------------------------------------

def _messages(q, dim, trials, seed, sources=1):
    return np.stack([stream(seed, MSG_STREAM, int(i)).integers(0, q, size=(sources, dim)) for i in trials], axis=1)


def _noise(N, trials, seed, sigma2):
    if sigma2 == 0:
        return np.zeros((len(trials), N))
    return np.stack([np.sqrt(sigma2) * standard_normal(stream(seed, NOISE_STREAM, int(i)), (N,)) for i in trials])


def simulate_batch(setup: PointSetup, trials, seed: int) -> int:
    """Block errors over the given trial indices."""
    code = setup.code
    q = code.field.order
    sigma2 = code.inner.noise_var_
    trials = np.asarray(trials, dtype=np.int64)
    if setup.system is None:
        msgs = _messages(q, code.dimension, trials, seed)[0]
        x, t = code.encode(msgs, trials)
        w = x + _noise(code.N, trials, seed, sigma2)
        out, ok = code.decode_batch(w, t)
        want = msgs
    else:
        S = setup.system
        msgs = _messages(q, code.dimension, trials, seed, S.L)
        u, t = S.encode_all(msgs, trials)
        w = np.tensordot(S.h, u, axes=1) + _noise(code.N, trials, seed, sigma2)
        out, ok = S.decode_batch(w, t)
        want = S.combine(msgs)
    return int(np.sum(~ok | np.any(out != want, axis=1)))


def count_errors(setup: PointSetup, trials: int, seed: int, threads: int = 1) -> int:
    batches = [range(s, min(s + BATCH_TRIALS, trials)) for s in range(0, trials, BATCH_TRIALS)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return sum(pool.map(lambda b: simulate_batch(setup, b, seed), batches))
    return sum(simulate_batch(setup, b, seed) for b in batches)


@dataclass
class ResultRecord:
    config_hash: str
    snr_db: float | str
    n: int
    p: int
    k: int
    N_out: int
    K_out_or_dim: int
    rate_bits_per_dim: float
    trials: int
    errors: int
    p_hat: float
    ci_lo: float
    ci_hi: float
    seed: int
    wall_clock: float = 0.0
    planner: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.errors <= self.trials:
            raise ValueError("errors must lie in [0, trials]")

    def csv_row(self) -> list:
        return [_fmt(getattr(self, c)) for c in CSV_COLUMNS]

    @property
    def key(self) -> tuple:
        return (str(self.snr_db), int(self.N_out))


def _fmt(v):
    if isinstance(v, np.generic):
        v = v.item()
    if isinstance(v, float):
        return repr(v)
    return str(v)


def run_point(cfg: dict, snr_db, N_out: int, index: int = 0, threads: int = 1) -> ResultRecord:
    start = time.perf_counter()
    setup = build_point(cfg, snr_db, N_out, index)
    trials, seed = cfg["trials"], cfg["seed"]
    errors = count_errors(setup, trials, seed, threads)
    lo, hi = wilson_interval(errors, trials)
    code = cfg["code"]
    return ResultRecord(
        config_hash=config_hash(cfg), snr_db=snr_db, n=code["n"], p=code["p"], k=code["k"],
        N_out=N_out, K_out_or_dim=setup.code.dimension, rate_bits_per_dim=setup.code.rate,
        trials=trials, errors=errors, p_hat=errors / trials, ci_lo=lo, ci_hi=hi, seed=seed,
        wall_clock=time.perf_counter() - start, planner=setup.planner)


def sweep_points(cfg: dict):
    """``(snr_db, N_out, N_out index)`` in run order."""
    for snr in cfg["sweep"]["snr_db"]:
        for i, N in enumerate(cfg["sweep"]["N_out"]):
            yield snr, N, i


def _sidecar_path(out: str) -> str:
    root, _ = os.path.splitext(out)
    return root + ".json"


def _load_previous(out: str, h: str) -> dict:
    side = _sidecar_path(out)
    if not (os.path.exists(out) and os.path.exists(side)):
        return {}
    try:
        with open(side) as fh:
            meta = json.load(fh)
    except (OSError, json.JSONDecodeError):
        return {}
    if meta.get("config_hash") != h:
        return {}
    done = {}
    for r in meta.get("records", []):
        rec = ResultRecord(**r)
        done[rec.key] = rec
    return done


def _write(out: str, cfg: dict, records: list[ResultRecord]):
    d = os.path.dirname(os.path.abspath(out))
    os.makedirs(d, exist_ok=True)
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in records:
            w.writerow(r.csv_row())
    meta = {
        "config": cfg,
        "config_hash": config_hash(cfg),
        "gaussian_method": GAUSSIAN_METHOD,
        "records": [asdict(r) for r in records],
    }
    with open(_sidecar_path(out), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(f"not JSON serializable: {type(o)}")


def run_experiment(cfg: dict, threads: int | None = None, write: bool = True, progress=None) -> list[ResultRecord]:
    """Run every sweep point, writing CSV and sidecar after each one.

    Points already present in an existing output with the same config hash
    are reused rather than recomputed.
    """
    cfg = validate_config(cfg)
    threads = int(threads or cfg.get("threads", 1))
    h = config_hash(cfg)
    out = cfg["out"]
    done = _load_previous(out, h) if write else {}
    records = []
    for snr, N, i in sweep_points(cfg):
        key = (str(snr), int(N))
        rec = done.get(key)
        if rec is None:
            rec = run_point(cfg, snr, N, i, threads)
        records.append(rec)
        if progress is not None:
            progress(rec)
        if write:
            _write(out, cfg, records)
    return records
