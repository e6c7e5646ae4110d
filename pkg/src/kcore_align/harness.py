"""
Experiment orchestration: strict JSON configs, per-trial RNG streams, parallel
execution with order-preserving collection, CSV and plot-data emission.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .alignment import enumerate_k_core_alignments, kcore_align_greedy, oracle_kcore_estimate
from .bounds import recommended_k, xi_and_union_bound
from .converse import _er_edge_arrays, _isolated
from .decomposition import decompose
from .errors import ConfigError
from .genfunc import gf_exact, gf_upper_bound
from .graph import Matching, aligned_intersection, k_core
from .model import CorrelationParams, SeededRng, sample_pair, sample_uniform_bijection
from .oracles import gf_bruteforce

KINDS = ("oracle_kcore", "exhaustive_align", "gf_verify", "bound_eval", "converse", "sweep")

METRICS = {
    "oracle_kcore": ("recovered_fraction", "wrong_pairs", "matched", "kcore_size"),
    "sweep": ("recovered_fraction", "wrong_pairs", "matched", "kcore_size"),
    "exhaustive_align": (
        "recovered_fraction", "wrong_pairs", "matched", "kcore_size",
        "alignments", "wrong_alignments", "any_wrong", "truth_listed", "union_bound",
    ),
    "gf_verify": ("d", "n_prime", "max_rel_err", "bound_ok"),
    "bound_eval": (
        "q1", "q2", "tau", "t_tilde", "z_star", "zeta", "log_tail_bound", "xi", "union_bound",
        "d", "t_cyc_21",
    ),
    "converse": ("isolated", "success_bound"),
}

_FIELDS = {"kind", "n", "p", "k", "trials", "seed", "output", "eps", "z", "mode", "limit"}
_P_SCHEDULE_FIELDS = {"np11", "noise"}
_NEEDS_K = ("oracle_kcore", "sweep", "exhaustive_align", "bound_eval")


@dataclass(frozen=True)
class ExperimentConfig:
    """``p`` is either an explicit ``{"p00", "p01", "p10", "p11"}`` object or a
    schedule ``{"np11": value-or-list, "noise": r}`` giving ``p11 = np11 / n``
    and ``p01 = p10 = r p11``."""

    kind: str
    n: tuple[int, ...]
    p: dict
    k: int | str | None = "recommended"
    trials: int = 1
    seed: int = 0
    output: str | None = None
    eps: int = 0
    z: tuple[float, ...] = (0.5, 1.0, 2.0, 3.0)
    mode: str = "oracle"
    limit: int = 8

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"field 'kind': unknown experiment kind {self.kind!r}")
        if not self.n or any((not isinstance(v, int)) or v < 1 for v in self.n):
            raise ConfigError("field 'n': every entry must be an integer >= 1")
        if self.kind == "gf_verify" and max(self.n) > 5:
            # the outcome oracle enumerates 4^C(n, 2) edge outcomes
            raise ConfigError("field 'n': gf_verify supports n <= 5")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError("field 'trials': must be an integer >= 1")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError("field 'seed': must be a non-negative integer")
        if not (self.k is None or self.k == "recommended" or (isinstance(self.k, int) and self.k >= 0)):
            raise ConfigError("field 'k': must be a non-negative integer or \"recommended\"")
        if self.mode not in ("oracle", "greedy"):
            raise ConfigError("field 'mode': must be \"oracle\" or \"greedy\"")
        if not isinstance(self.eps, int) or self.eps < 0:
            raise ConfigError("field 'eps': must be a non-negative integer")
        if not isinstance(self.p, dict):
            raise ConfigError("field 'p': must be an object")
        list(self.points())

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(d) - _FIELDS
        if unknown:
            raise ConfigError(f"unknown config field(s): {', '.join(sorted(unknown))}")
        for req in ("kind", "n", "p"):
            if req not in d:
                raise ConfigError(f"field {req!r}: required")
        kw = dict(d)
        kw["n"] = tuple(kw["n"]) if isinstance(kw["n"], list) else (kw["n"],)
        if "z" in kw:
            kw["z"] = tuple(float(v) for v in kw["z"])
        return cls(**kw)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"config line {e.lineno}, column {e.colno}: {e.msg}") from None
        return cls.from_dict(d)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_json(Path(path).read_text())

    def to_dict(self) -> dict:
        return {
            "kind": self.kind, "n": list(self.n), "p": self.p, "k": self.k, "trials": self.trials,
            "seed": self.seed, "output": self.output, "eps": self.eps, "z": list(self.z),
            "mode": self.mode, "limit": self.limit,
        }

    def params_for(self, n: int) -> list[tuple[float | None, CorrelationParams]]:
        """``(np11, params)`` for each point of the p axis at size ``n``."""
        p = self.p
        if "np11" in p:
            unknown = set(p) - _P_SCHEDULE_FIELDS
            if unknown:
                raise ConfigError(f"field 'p': unknown schedule field(s) {', '.join(sorted(unknown))}")
            values = p["np11"] if isinstance(p["np11"], list) else [p["np11"]]
            noise = p.get("noise", 0.0)
            out = []
            for c in values:
                p11 = c / n
                try:
                    out.append((float(c), CorrelationParams.from_p11(p11, noise * p11, noise * p11)))
                except ValueError as e:
                    raise ConfigError(f"field 'p': np11={c} at n={n}: {e}") from None
            return out
        try:
            params = CorrelationParams.from_dict(p)
        except (ValueError, TypeError) as e:
            raise ConfigError(f"field 'p': {e}") from None
        return [(None, params)]

    def k_for(self, n: int, p: CorrelationParams) -> int | None:
        if self.kind not in _NEEDS_K:
            return None
        if self.k == "recommended":
            try:
                return recommended_k(n, p.p11)
            except ValueError as e:
                raise ConfigError(f"field 'k': {e}") from None
        return self.k

    def points(self):
        """Grid points ``(n, np11, p, k)`` in a fixed order."""
        for n in self.n:
            for c, p in self.params_for(n):
                yield n, c, p, self.k_for(n, p)


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    n: int
    np11: float | None
    p00: float
    p01: float
    p10: float
    p11: float
    k: int | None
    seed: int
    stream: int
    metrics: dict
    wall_time: float = field(default=0.0, compare=False)

    def __post_init__(self):
        rf = self.metrics.get("recovered_fraction")
        if rf is not None and not 0.0 <= rf <= 1.0:
            raise ValueError("recovered fraction outside [0, 1]")


# columns written to CSV; wall time is left out so reruns are byte-identical
BASE_COLUMNS = ("trial", "n", "np11", "p00", "p01", "p10", "p11", "k", "seed", "stream")


def _recovery_metrics(est: Matching, mu_star: Matching, n: int) -> dict:
    correct = len(est.intersection(mu_star))
    return {
        "recovered_fraction": correct / n,
        "wrong_pairs": len(est) - correct,
        "matched": len(est),
    }


def _trial_kcore(n, p, k, rng, mode, **_):
    mu_star = sample_uniform_bijection(n, rng)
    Ga, Gb = sample_pair(mu_star, p, rng)
    core = k_core(aligned_intersection(Ga, Gb, mu_star), k)
    if mode == "greedy":
        est = kcore_align_greedy(Ga, Gb, k, mu_star)
    else:
        est = oracle_kcore_estimate(Ga, Gb, mu_star, k)
    return {**_recovery_metrics(est, mu_star, n), "kcore_size": len(core)}


def _trial_exhaustive(n, p, k, rng, limit, **_):
    mu_star = sample_uniform_bijection(n, rng)
    Ga, Gb = sample_pair(mu_star, p, rng)
    alignments = enumerate_k_core_alignments(Ga, Gb, k, n_limit=limit)
    star = mu_star.as_set()
    wrong = sum(1 for m in alignments if not m.as_set() <= star)
    truth = oracle_kcore_estimate(Ga, Gb, mu_star, k)
    chosen = alignments[0] if alignments else Matching()
    return {
        **_recovery_metrics(chosen, mu_star, n),
        "kcore_size": len(truth),
        "alignments": len(alignments),
        "wrong_alignments": wrong,
        "any_wrong": int(wrong > 0),
        "truth_listed": int(truth in alignments),
        "union_bound": xi_and_union_bound(n, k, p).union_bound,
    }


def _random_partial_matching(n, gen):
    size = int(gen.integers(0, n + 1))
    a = gen.permutation(n)[:size]
    b = gen.permutation(n)[:size]
    return Matching(zip(a.tolist(), b.tolist()))


def _trial_gf(n, p, k, rng, z, **_):
    gen = rng.generator
    mu_star = sample_uniform_bijection(n, gen)
    m = _random_partial_matching(n, gen)
    stats = decompose(m, mu_star)
    errs, ok = [], True
    for zz in z:
        exact = gf_exact(stats, p, zz)
        ref = gf_bruteforce(m, mu_star, p, zz)
        errs.append(abs(exact - ref) / abs(ref))
        if zz >= 1 and p.p11 * p.p00 >= p.p10 * p.p01:
            ok &= gf_upper_bound(stats, p, zz) >= exact * (1 - 1e-12)
    return {"d": stats.d, "n_prime": stats.n_prime, "max_rel_err": max(errs), "bound_ok": int(ok)}


def _trial_bound(n, p, k, rng, **_):
    rep = xi_and_union_bound(n, k, p)
    return {name: getattr(rep, name) for name in METRICS["bound_eval"]}


def _trial_converse(n, p, k, rng, eps, **_):
    j = _isolated(n, *_er_edge_arrays(n, p.p11, rng.generator))
    log_bound = math.lgamma(eps + 1) - math.lgamma(j + 1)
    return {"isolated": j, "success_bound": math.exp(min(0.0, log_bound))}


_RUNNERS = {
    "oracle_kcore": _trial_kcore,
    "sweep": _trial_kcore,
    "exhaustive_align": _trial_exhaustive,
    "gf_verify": _trial_gf,
    "bound_eval": _trial_bound,
    "converse": _trial_converse,
}


def _run_one(task) -> TrialRecord:
    kind, trial, n, c, p, k, seed, stream, extra = task
    start = time.perf_counter()
    rng = SeededRng(seed, stream)
    metrics = _RUNNERS[kind](n, p, k, rng, **extra)
    return TrialRecord(
        trial, n, c, p.p00, p.p01, p.p10, p.p11, k, seed, stream, metrics,
        wall_time=time.perf_counter() - start,
    )


def _tasks(cfg: ExperimentConfig):
    extra = {"mode": cfg.mode, "limit": cfg.limit, "z": cfg.z, "eps": cfg.eps}
    stream = 0
    for n, c, p, k in cfg.points():
        if k is None and cfg.kind in _NEEDS_K:
            raise ConfigError(f"field 'k': required for kind {cfg.kind!r}")
        # bound evaluation is deterministic, one record per grid point
        trials = 1 if cfg.kind == "bound_eval" else cfg.trials
        for t in range(trials):
            yield (cfg.kind, t, n, c, p, k, cfg.seed, stream, extra)
            stream += 1


@dataclass(frozen=True)
class SummaryRow:
    n: int
    np11: float | None
    p11: float
    k: int | None
    metric: str
    mean: float
    stderr: float
    count: int


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list[TrialRecord]
    summary: list[SummaryRow]


def summarize(records: list[TrialRecord], metrics) -> list[SummaryRow]:
    """Mean and standard error per grid point and metric.  Rows come out in
    sorted key order and values are computed on sorted samples, so the result
    does not depend on the order of ``records``."""
    groups: dict = {}
    for r in records:
        groups.setdefault((r.n, r.np11 if r.np11 is not None else -1.0, r.p11, r.k), []).append(r)
    rows = []
    for key in sorted(groups, key=lambda t: (t[0], t[1], t[2], -1 if t[3] is None else t[3])):
        rs = groups[key]
        for name in metrics:
            vals = np.sort(np.array([float(r.metrics[name]) for r in rs]))
            mean = math.fsum(vals) / len(vals)
            if len(vals) > 1:
                var = math.fsum((vals - mean) ** 2) / (len(vals) - 1)
                se = math.sqrt(var / len(vals))
            else:
                se = 0.0
            n, c, p11, k = key
            rows.append(SummaryRow(n, None if c == -1.0 else c, p11, k, name, mean, se, len(vals)))
    return rows


def run_experiment(cfg: ExperimentConfig, jobs: int = 1) -> ExperimentResult:
    """Run every trial of ``cfg``; trial ``i`` (counted across the whole grid)
    draws from RNG stream ``i`` so results do not depend on ``jobs``."""
    tasks = list(_tasks(cfg))
    if jobs <= 1 or len(tasks) <= 1:
        records = [_run_one(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_one, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    return ExperimentResult(cfg, records, summarize(records, METRICS[cfg.kind]))


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def csv_text(records: list[TrialRecord], metrics=None) -> str:
    if metrics is None:
        metrics = list(records[0].metrics) if records else []
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([*BASE_COLUMNS, *metrics])
    for r in records:
        w.writerow([_fmt(getattr(r, c)) for c in BASE_COLUMNS] + [_fmt(r.metrics[m]) for m in metrics])
    return buf.getvalue()


def emit_csv(records: list[TrialRecord], path, metrics=None) -> None:
    Path(path).write_text(csv_text(records, metrics))


def plot_data_text(summary: list[SummaryRow], metric: str, x: str = "np11") -> str:
    """Tab-separated ``x  y  yerr`` rows for one metric."""
    lines = [f"{x}\t{metric}\t{metric}_stderr"]
    for row in summary:
        if row.metric != metric:
            continue
        xv = getattr(row, x)
        lines.append(f"{_fmt(xv)}\t{row.mean!r}\t{row.stderr!r}")
    return "\n".join(lines) + "\n"


def emit_plot_data(summary: list[SummaryRow], path, metric: str, x: str = "np11") -> None:
    Path(path).write_text(plot_data_text(summary, metric, x))


def summary_to_json(summary: list[SummaryRow]) -> list[dict]:
    return [row.__dict__ for row in summary]
