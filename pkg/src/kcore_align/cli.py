"""Command-line entry point ``kcore-align``."""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import alignment, bounds, converse, decomposition, genfunc, graph, harness
from .errors import ConfigError, InvariantError
from .model import CorrelationParams, SeededRng, sample_pair, sample_uniform_bijection

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT = 0, 2, 3


def _json_default(o):
    if hasattr(o, "to_dict"):
        return o.to_dict()
    if isinstance(o, (set, frozenset, tuple)):
        return sorted(o)
    raise TypeError(f"cannot serialise {type(o).__name__}")


def _finite(o):
    """JSON has no inf/nan; encode them as strings."""
    if isinstance(o, float) and not math.isfinite(o):
        return str(o)
    if isinstance(o, dict):
        return {k: _finite(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_finite(v) for v in o]
    return o


def _emit(obj, out: str | None) -> None:
    if hasattr(obj, "to_dict"):
        obj = obj.to_dict()
    text = json.dumps(_finite(obj), default=_json_default, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_params(value: str) -> CorrelationParams:
    """A JSON file path, an inline JSON object, or four comma-separated numbers."""
    path = Path(value)
    if path.is_file():
        return CorrelationParams.load(path)
    value = value.strip()
    if value.startswith("{"):
        return CorrelationParams.from_dict(json.loads(value))
    try:
        parts = [float(x) for x in value.split(",")]
    except ValueError:
        raise ConfigError(f"cannot read correlation parameters from {value!r}") from None
    if len(parts) != 4:
        raise ConfigError("expected p00,p01,p10,p11")
    return CorrelationParams(*parts)


def cmd_gen(a) -> int:
    rng = SeededRng(a.seed, 0)
    p = _load_params(a.p)
    mu_star = sample_uniform_bijection(a.n, rng)
    Ga, Gb = sample_pair(mu_star, p, rng)
    out = Path(a.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    ext = ".txt" if a.format == "edgelist" else ".json"
    graph.save_graph(Ga, out / f"ga{ext}")
    graph.save_graph(Gb, out / f"gb{ext}")
    graph.save_matching(mu_star, out / "mu_star.json")
    return EXIT_OK


def cmd_intersect(a) -> int:
    Ga, Gb = graph.load_graph(a.ga), graph.load_graph(a.gb)
    m = graph.load_matching(a.mu)
    G = graph.aligned_intersection(Ga, Gb, m)
    _emit(graph.graph_to_dict(G), a.out)
    return EXIT_OK


def cmd_kcore(a) -> int:
    G = graph.load_graph(a.graph)
    _emit({"k": a.k, "vertices": sorted(graph.k_core(G, a.k))}, a.out)
    return EXIT_OK


def cmd_align(a) -> int:
    Ga, Gb = graph.load_graph(a.ga), graph.load_graph(a.gb)
    if a.mode == "exhaustive":
        found = alignment.enumerate_k_core_alignments(Ga, Gb, a.k, n_limit=a.limit)
        result = {
            "mode": "exhaustive",
            "k": a.k,
            "alignments": [graph.matching_to_dict(m)["pairs"] for m in found],
            "estimate": graph.matching_to_dict(found[0])["pairs"] if found else [],
        }
    else:
        if not a.seed_matching:
            raise ConfigError(f"--seed-matching is required for mode {a.mode}")
        seed = graph.load_matching(a.seed_matching)
        if a.mode == "greedy":
            est = alignment.kcore_align_greedy(Ga, Gb, a.k, seed)
        else:
            est = alignment.oracle_kcore_estimate(Ga, Gb, seed, a.k)
        result = {"mode": a.mode, "k": a.k, "estimate": graph.matching_to_dict(est)["pairs"]}
    _emit(result, a.out)
    return EXIT_OK


def cmd_gf(a) -> int:
    m, mu_star = graph.load_matching(a.mu), graph.load_matching(a.mu_star)
    p = _load_params(a.p)
    stats = decomposition.decompose(m, mu_star)
    if a.bound:
        value = genfunc.gf_upper_bound(stats, p, a.z)
    else:
        value = genfunc.gf_exact(stats, p, a.z)
    _emit({"z": a.z, "kind": "bound" if a.bound else "exact", "value": value, "stats": stats.to_dict()}, a.out)
    return EXIT_OK


def cmd_bound(a) -> int:
    p = _load_params(a.p)
    k = bounds.recommended_k(a.n, p.p11) if a.k == "recommended" else int(a.k)
    _emit(bounds.xi_and_union_bound(a.n, k, p), a.out)
    return EXIT_OK


def cmd_converse(a) -> int:
    p = _load_params(a.p)
    rep = converse.partial_recovery_converse_check(a.n, p, a.eps, a.trials, SeededRng(a.seed, 0))
    _emit(rep, a.out)
    return EXIT_OK


def cmd_sweep(a) -> int:
    if not a.config:
        raise ConfigError("sweep needs --config FILE")
    cfg = harness.ExperimentConfig.load(a.config)
    d = cfg.to_dict()
    if a.seed_given:
        d["seed"] = a.seed
    if a.trials is not None:
        d["trials"] = a.trials
    if a.out:
        d["output"] = a.out
    cfg = harness.ExperimentConfig.from_dict(d)
    result = harness.run_experiment(cfg, jobs=a.jobs)
    text = harness.csv_text(result.records, harness.METRICS[cfg.kind])
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)
    if a.summary:
        _emit(harness.summary_to_json(result.summary), a.summary)
    if a.plot_data:
        harness.emit_plot_data(result.summary, a.plot_data, a.metric, x=a.x)
    return EXIT_OK


def _k_arg(v: str):
    if v == "recommended":
        return v
    try:
        k = int(v)
    except ValueError:
        raise argparse.ArgumentTypeError("k must be an integer or 'recommended'") from None
    if k < 0:
        raise argparse.ArgumentTypeError("k must be non-negative")
    return k


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="RNG seed (default 0)")
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help="worker processes (default 1)")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output file or directory")
    common.add_argument("--config", default=argparse.SUPPRESS, help="JSON config file")

    ap = argparse.ArgumentParser(prog="kcore-align", description="k-core graph alignment toolkit",
                                 parents=[common])
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("gen", parents=[common], help="sample a correlated graph pair")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--p", required=True, help="JSON file, inline JSON, or p00,p01,p10,p11")
    s.add_argument("--format", choices=("json", "edgelist"), default="json")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("intersect", parents=[common], help="aligned intersection of two graphs")
    s.add_argument("--ga", required=True)
    s.add_argument("--gb", required=True)
    s.add_argument("--mu", required=True)
    s.set_defaults(func=cmd_intersect)

    s = sub.add_parser("kcore", parents=[common], help="k-core of a graph")
    s.add_argument("--graph", required=True)
    s.add_argument("--k", type=int, required=True)
    s.set_defaults(func=cmd_kcore)

    s = sub.add_parser("align", parents=[common], help="k-core alignment estimators")
    s.add_argument("--ga", required=True)
    s.add_argument("--gb", required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--mode", choices=("exhaustive", "greedy", "oracle"), default="exhaustive")
    s.add_argument("--limit", type=int, default=8)
    s.add_argument("--seed-matching", "--mu-star", dest="seed_matching")
    s.set_defaults(func=cmd_align)

    s = sub.add_parser("gf", parents=[common], help="generating function of the M statistic")
    s.add_argument("--mu", required=True)
    s.add_argument("--mu-star", required=True)
    s.add_argument("--p", required=True)
    s.add_argument("--z", type=float, required=True)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--exact", action="store_true")
    g.add_argument("--bound", action="store_true")
    s.set_defaults(func=cmd_gf)

    s = sub.add_parser("bound", parents=[common], help="tail and union bounds")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=_k_arg, default="recommended")
    s.add_argument("--p", required=True)
    s.set_defaults(func=cmd_bound)

    s = sub.add_parser("converse", parents=[common], help="partial-recovery converse check")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--p", required=True)
    s.add_argument("--eps", type=int, default=0)
    s.add_argument("--trials", type=int, default=100)
    s.set_defaults(func=cmd_converse)

    s = sub.add_parser("sweep", parents=[common], help="run an experiment config")
    s.add_argument("--trials", type=int, default=None, help="override the config's trial count")
    s.add_argument("--summary", help="write per-point summary JSON here")
    s.add_argument("--plot-data", help="write TSV plot data here")
    s.add_argument("--metric", default="recovered_fraction")
    s.add_argument("--x", default="np11", choices=("np11", "n", "p11", "k"))
    s.set_defaults(func=cmd_sweep)

    # required flags may also come from --config, so they are checked after parsing
    for name, sp in sub.choices.items():
        needed = []
        for act in sp._actions:
            if act.required and act.option_strings:
                act.required = False
                needed.append((act.dest, act.option_strings[0]))
        sp.set_defaults(_required=tuple(needed))
    return ap


def _apply_config_defaults(a, argv) -> None:
    """For non-sweep commands ``--config`` holds defaults for the flags;
    explicit flags win and unknown keys are rejected."""
    if a.command == "sweep" or not getattr(a, "config", None):
        return
    try:
        d = json.loads(Path(a.config).read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(f"config line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(d, dict):
        raise ConfigError("config must be a JSON object")
    explicit = {tok.split("=")[0].lstrip("-").replace("-", "_") for tok in argv if tok.startswith("--")}
    for key, value in d.items():
        dest = key.replace("-", "_")
        if not hasattr(a, dest) or dest in ("func", "command", "config", "_required", "seed_given"):
            raise ConfigError(f"unknown config field {key!r} for {a.command}")
        if dest not in explicit:
            setattr(a, dest, value if not isinstance(value, dict) else json.dumps(value))


def main(argv=None) -> int:
    ap = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        a = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    a.seed_given = hasattr(a, "seed")
    for name, default in (("seed", 0), ("jobs", 1), ("out", None), ("config", None)):
        if not hasattr(a, name):
            setattr(a, name, default)
    try:
        _apply_config_defaults(a, argv)
        missing = [flag for dest, flag in a._required if getattr(a, dest, None) is None]
        if missing:
            raise ConfigError(f"missing required option(s): {', '.join(missing)}")
        return a.func(a)
    except InvariantError as e:
        print(f"invariant violated: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ConfigError, ValueError, OSError, KeyError, TypeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
