"""Command-line entry point: generate | ingest | train | detect | benchmark
| selfsup-labels.

Options resolve in three layers: built-in defaults, then a key=value config
file (--config), then explicit flags. Every run is deterministic given its
seed; every output file gets the resolved-config hash and seed, either in
the JSONL header's meta object or in a <name>.meta.json sidecar. Errors
leave a machine-readable JSON object on stderr and a nonzero exit code.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import baselines, detection, evaluation, ingest, sampling, selfsup, sgnn, synthetic
from .errors import NetcpdError, ParameterError
from .graph import DynamicNetwork, EncodingKind, read_network, write_network

OUTPUT_DIR_ENV = "NETCPD_OUT"


# --- config plumbing --------------------------------------------------------


def parse_config_file(path) -> dict:
    """key = value lines; '#' comments; values parsed as JSON when possible."""
    out: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"{path}:{lineno}: expected key = value")
            key, _, value = line.partition("=")
            key = key.strip().replace("-", "_")
            value = value.strip()
            try:
                out[key] = json.loads(value)
            except json.JSONDecodeError:
                out[key] = value
    return out


def apply_config_defaults(args: argparse.Namespace) -> None:
    """Fill options still at their subparser default from the config file
    (explicit flags win over config values)."""
    if not getattr(args, "config", None):
        return
    subparser = args._parser
    overrides = parse_config_file(args.config)
    for key, value in overrides.items():
        if not hasattr(args, key) or key.startswith("_"):
            raise ParameterError(f"unknown config key {key!r}")
        if getattr(args, key) == subparser.get_default(key):
            setattr(args, key, value)


HASH_EXCLUDED_KEYS = {"func", "config", "out", "declared_out", "metrics", "save_correlations"}


def config_hash(args: argparse.Namespace) -> str:
    """Fingerprint of the content-determining options (output paths and the
    config-file location do not change what gets computed)."""
    payload = {
        k: v
        for k, v in sorted(vars(args).items())
        if k not in HASH_EXCLUDED_KEYS and not k.startswith("_")
    }
    return hashlib.sha256(json.dumps(payload, sort_keys=True, default=str).encode()).hexdigest()[:12]


def write_meta(path, args: argparse.Namespace, seed: int) -> None:
    meta = {"config_hash": config_hash(args), "seed": seed}
    with open(str(path) + ".meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh)


def run_meta(args: argparse.Namespace, seed: int) -> dict:
    return {"config_hash": config_hash(args), "seed": seed}


def require(args: argparse.Namespace, *keys: str) -> None:
    """Options that must arrive via flag or config file."""
    for key in keys:
        if getattr(args, key, None) is None:
            raise ParameterError(f"missing required option --{key.replace('_', '-')}")


def out_dir(args: argparse.Namespace) -> Path:
    base = getattr(args, "out", None) or os.environ.get(OUTPUT_DIR_ENV, ".")
    path = Path(base)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _float_list(text: str) -> list[float]:
    return [float(x) for x in str(text).split(",") if str(x).strip()]


def _int_list(text: str) -> list[int]:
    return [int(x) for x in str(text).split(",") if str(x).strip()]


# --- generate ----------------------------------------------------------------


def cmd_generate(args) -> int:
    require(args, "scenario")
    level = args.level if args.level is not None else args.p if args.p is not None else (
        args.s if args.s is not None else args.h
    )
    if level is None:
        raise ParameterError("give a difficulty level (--level, --p, --s or --h)")
    spec = synthetic.ScenarioSpec(args.scenario, float(level), args.n)
    directory = out_dir(args)
    stem = f"{args.scenario}_{level:g}"
    for i in range(args.seeds):
        seed = args.seed + i
        rng = np.random.default_rng(seed)
        tau = args.tau if args.tau else None
        net = synthetic.generate_sequence(spec, T=args.T, tau=tau, rng=rng)
        path = directory / f"{stem}_seed{seed}.jsonl"
        write_network(net, path, meta=run_meta(args, seed))
        print(path)
        if args.pairs:
            prng = np.random.default_rng(seed + 10_000)
            graphs, dataset = synthetic.generate_pair_dataset(spec, args.pairs, prng)
            pool = DynamicNetwork(tuple(graphs))
            pool_path = directory / f"{stem}_pairs_seed{seed}.jsonl"
            write_network(pool, pool_path, meta=run_meta(args, seed))
            for split in ("train", "val", "test"):
                split_path = directory / f"{stem}_pairs_seed{seed}_{split}.csv"
                sampling.write_pairs_csv(dataset.subset(split), split_path)
                write_meta(split_path, args, seed)
            print(pool_path)
    return 0


# --- ingest -------------------------------------------------------------------


def cmd_ingest(args) -> int:
    require(args, "series", "out")
    panel = ingest.read_series_csv(args.series)
    mats = ingest.windowed_correlations(panel, args.window)
    if args.save_correlations:
        np.savez(args.save_correlations, correlations=np.stack(mats))
        write_meta(args.save_correlations, args, args.seed)
    if args.mode == "quantile":
        graphs = ingest.quantile_truncate(mats, args.q_low, args.q_high)
    else:
        graphs = ingest.threshold_binarize(mats, args.eta)
    if args.attrs:
        attrs = ingest.read_attributes_long_csv(args.attrs, len(graphs), panel.n)
        if args.standardize_attrs:
            attrs = ingest.standardize_attributes(attrs)
        graphs = [type(g)(g.adjacency, a) for g, a in zip(graphs, attrs)]
    net = DynamicNetwork(tuple(graphs))
    write_network(net, args.out, meta=run_meta(args, args.seed))
    print(args.out)
    return 0


# --- train --------------------------------------------------------------------


def _model_config(args, n: int) -> sgnn.SgnnConfig:
    fc = tuple(_int_list(args.fc_units)) if args.fc_units else None
    return sgnn.SgnnConfig(
        encoding=EncodingKind.parse(args.encoding),
        gcn_layers=args.gcn_layers,
        hidden_units=args.hidden,
        sortk=args.sortk,
        fc_units=fc,
        dropout=args.dropout,
        pooling_variant=args.pooling,
        learning_rate=args.lr,
        weight_decay=args.weight_decay,
        epochs=args.epochs,
        batch_size=args.batch_size,
    )


def cmd_train(args) -> int:
    require(args, "network", "train_pairs", "val_pairs", "out")
    pool = read_network(args.network)
    train_pairs = sampling.read_pairs_csv(args.train_pairs, split="train")
    val_pairs = sampling.read_pairs_csv(args.val_pairs, split="val")
    config = _model_config(args, pool.n)
    if args.grid != "none":
        grids = sgnn.GRID_PRESETS[args.grid]
        config, grid_results = sgnn.grid_search(
            grids, pool.snapshots, train_pairs, val_pairs, base=config, seed=args.seed
        )
    else:
        grid_results = None
    params, history = sgnn.train(pool.snapshots, train_pairs, val_pairs, config, seed=args.seed)
    sgnn.save_checkpoint(args.out, params, config, args.seed, meta=run_meta(args, args.seed))
    print(args.out)
    if args.metrics:
        with open(args.metrics, "w", encoding="utf-8") as fh:
            fh.write("epoch,train_loss,val_f1,val_accuracy\n")
            for h in history:
                fh.write(f"{h['epoch']},{h['train_loss']!r},{h['val_f1']!r},{h['val_accuracy']!r}\n")
        write_meta(args.metrics, args, args.seed)
    if grid_results is not None:
        grid_path = str(args.out) + ".grid.json"
        with open(grid_path, "w", encoding="utf-8") as fh:
            json.dump(grid_results, fh)
    return 0


# --- detect -------------------------------------------------------------------


def method_statistic(
    method: str,
    net: DynamicNetwork,
    L: int,
    checkpoint: str | None = None,
    config: baselines.BaselineConfig | None = None,
) -> tuple[np.ndarray, int, int]:
    """Canonical-orientation statistic (falls at a change) for a learned
    model or a named baseline: (values, first timestamp, timestamp stride).

    The even/odd-split CUSUM reports one value per two original timestamps
    (stride 2); everything else is stride 1.
    """
    bconfig = config if config is not None else baselines.BaselineConfig()
    if method == "sgnn":
        if checkpoint is None:
            raise ParameterError("the learned detector needs --checkpoint")
        params, mconfig, _, _ = sgnn.load_checkpoint(checkpoint)
        score_fn = sgnn.make_score_fn(params, mconfig)
        return detection.similarity_statistic(score_fn, net, L), L + 1, 1
    info = baselines.METHODS.get(method)
    if info is None:
        raise ParameterError(f"unknown method {method!r}")
    if info.kind == "pairwise":
        fn = baselines.pairwise_measure(method, bconfig)
        values = detection.similarity_statistic(fn, net, L)
        first_t, stride = L + 1, 1
    else:
        values, first_t = baselines.sequence_statistic(method, net, L, bconfig)
        stride = 2 if method == "cusum" else 1
    if info.orientation == "distance":
        values = -values
    return values, first_t, stride


def cmd_detect(args) -> int:
    require(args, "network", "out")
    net = read_network(args.network)
    method = "sgnn" if args.checkpoint else args.method
    if method is None:
        raise ParameterError("give --checkpoint or --method")
    if args.L >= net.T:
        raise ParameterError(f"window L={args.L} must be smaller than T={net.T}")
    values, first_t, stride = method_statistic(method, net, args.L, checkpoint=args.checkpoint)
    if args.theta == "auto":
        if not net.change_points:
            raise ParameterError("theta=auto needs ground-truth change-points in the network")
        if args.val_range:
            lo, hi = (int(x) for x in args.val_range.split(":"))
            keep = [j for j in range(len(values)) if lo <= first_t + stride * j <= hi]
            if not keep:
                raise ParameterError("validation range holds no statistic values")
            z_val = values[keep]
            v_first = first_t + stride * keep[0]
            cps = [t for t in net.change_points if lo <= t <= hi]
        else:
            z_val, v_first, cps = values, first_t, list(net.change_points)
        theta = detection.calibrate_threshold(
            z_val, cps, args.L, net.T, first_t=v_first, stride=stride
        )
    else:
        theta = float(args.theta)
    trace = detection.run_detection(values, args.L, theta, first_t=first_t, stride=stride)
    trace.write_csv(args.out)
    write_meta(args.out, args, args.seed)
    print(args.out)
    if args.increments:
        inc_path = str(args.out) + ".increments.csv"
        with open(inc_path, "w", encoding="utf-8") as fh:
            fh.write("t,dz\n")
            for j in range(1, len(values)):
                fh.write(f"{first_t + stride * j},{abs(values[j] - values[j - 1])!r}\n")
    result = {
        "method": method,
        "theta": theta,
        "declared": list(trace.declared),
    }
    if args.localize != "none":
        result["localized"] = detection.localize_single_offline(
            values, mode=args.localize, first_t=first_t, stride=stride
        )
    if args.declared_out:
        with open(args.declared_out, "w", encoding="utf-8") as fh:
            json.dump(result, fh)
        write_meta(args.declared_out, args, args.seed)
    print(json.dumps(result))
    return 0


# --- benchmark ----------------------------------------------------------------


def _train_for_level(spec, args, seed):
    prng = np.random.default_rng(seed + 10_000)
    graphs, dataset = synthetic.generate_pair_dataset(spec, args.pairs, prng)
    config = _model_config(args, spec.n)
    params, history = sgnn.train(
        graphs, dataset.subset("train"), dataset.subset("val"), config, seed=seed
    )
    batcher = sgnn.PairBatcher(graphs, config.encoding)
    test_acc, test_f1 = sgnn.evaluate_pairs(params, config, batcher, dataset.subset("test"))
    return params, config, {"test_accuracy": test_acc, "test_f1": test_f1}


def _localize(values: np.ndarray, first_t: int, stride: int = 1) -> int:
    return detection.localize_single_offline(values, mode="argmin", first_t=first_t, stride=stride)


def cmd_benchmark(args) -> int:
    if args.networks:
        return _benchmark_networks(args)
    directory = out_dir(args)
    methods = [m.strip() for m in args.methods.split(",")]
    levels = _float_list(args.levels)
    windows = _int_list(args.window_sweep) if args.window_sweep else [args.L]
    poolings = ["sortk", "max", "average"] if args.pooling_sweep else [args.pooling]
    records: list[dict] = []
    for level in levels:
        spec = synthetic.ScenarioSpec(args.scenario, level, args.n)
        for i in range(args.seeds):
            seed = args.seed + i
            net = synthetic.generate_sequence(spec, T=args.T, rng=np.random.default_rng(seed))
            tau = net.change_points[0]
            trained: dict[str, tuple] = {}
            for method in methods:
                for L in windows:
                    if method == "sgnn":
                        for pooling in poolings:
                            key = pooling
                            if key not in trained:
                                model_args = argparse.Namespace(**vars(args))
                                model_args.pooling = pooling
                                trained[key] = _train_for_level(spec, model_args, seed)
                            params, config, pair_stats = trained[key]
                            score_fn = sgnn.make_score_fn(params, config)
                            values = detection.similarity_statistic(score_fn, net, L)
                            tau_hat = _localize(values, L + 1)
                            name = "sgnn" if pooling == args.pooling else f"sgnn-{pooling}"
                            records.append(
                                evaluation.metric_record(
                                    name, args.scenario, level, seed,
                                    {"L": L, "tau": tau, "tau_hat": tau_hat,
                                     "loc_error": evaluation.localisation_error(tau_hat, tau),
                                     **pair_stats},
                                )
                            )
                    else:
                        values, first_t, stride = method_statistic(method, net, L)
                        tau_hat = _localize(values, first_t, stride)
                        records.append(
                            evaluation.metric_record(
                                method, args.scenario, level, seed,
                                {"L": L, "tau": tau, "tau_hat": tau_hat,
                                 "loc_error": evaluation.localisation_error(tau_hat, tau)},
                            )
                        )
    return _write_benchmark_outputs(args, directory, records, group_keys=("method", "level", "L"))


def _summarize(records, group_keys):
    groups: dict[tuple, list[dict]] = {}
    for rec in records:
        key = tuple(rec.get(k) for k in group_keys)
        groups.setdefault(key, []).append(rec)
    summary = []
    for key, recs in sorted(groups.items(), key=lambda kv: tuple(str(x) for x in kv[0])):
        entry = dict(zip(group_keys, key))
        for metric in ("loc_error", "adjusted_f1", "test_accuracy", "test_f1"):
            vals = [r[metric] for r in recs if metric in r]
            if vals:
                entry[f"{metric}_mean"] = float(np.mean(vals))
                entry[f"{metric}_std"] = float(np.std(vals))
        entry["runs"] = len(recs)
        summary.append(entry)
    return summary


def _write_benchmark_outputs(args, directory: Path, records, group_keys) -> int:
    results_path = directory / "results.csv"
    keys: list[str] = []
    for rec in records:
        for k in rec:
            if k not in keys:
                keys.append(k)
    with open(results_path, "w", encoding="utf-8") as fh:
        fh.write(",".join(keys) + "\n")
        for rec in records:
            fh.write(",".join(str(rec.get(k, "")) for k in keys) + "\n")
    write_meta(results_path, args, args.seed)
    summary_path = directory / "summary.json"
    with open(summary_path, "w", encoding="utf-8") as fh:
        json.dump(_summarize(records, group_keys), fh, indent=1)
    write_meta(summary_path, args, args.seed)
    print(results_path)
    print(summary_path)
    return 0


def _benchmark_networks(args) -> int:
    """File-based protocols over prelabelled networks: individual,
    random-split (cross-individual) or leave-one-subject-out."""
    directory = out_dir(args)
    paths = [p.strip() for p in args.networks.split(",")]
    nets = [read_network(p) for p in paths]
    for p, net in zip(paths, nets):
        if not net.change_points:
            raise ParameterError(f"{p} has no ground-truth change-points")
    methods = [m.strip() for m in args.methods.split(",")]
    records: list[dict] = []
    protocol = args.protocol
    for i in range(args.seeds):
        seed = args.seed + i
        rng = np.random.default_rng(seed)
        if protocol == "individual":
            folds = [((net,), net, name) for net, name in zip(nets, paths)]
        elif protocol == "loso":
            folds = [
                (tuple(n for j, n in enumerate(nets) if j != held), nets[held], paths[held])
                for held in range(len(nets))
            ]
        else:  # random-split: train and test within every network
            folds = [(tuple(nets), net, name) for net, name in zip(nets, paths)]
        for train_nets, test_net, fold_name in folds:
            for method in methods:
                rec = _run_protocol_fold(args, method, train_nets, test_net, rng, seed)
                rec.update({"protocol": protocol, "fold": fold_name, "seed": seed})
                records.append(rec)
    return _write_benchmark_outputs(args, directory, records, group_keys=("method", "protocol"))


def _run_protocol_fold(args, method, train_nets, test_net, rng, seed) -> dict:
    L = args.L
    if method == "sgnn":
        graphs: list = []
        pairs: list[sampling.PairExample] = []
        val_pairs: list[sampling.PairExample] = []
        for net in train_nets:
            offset = len(graphs)
            graphs.extend(net.snapshots)
            tr, va, _ = sampling.split_sequence(net.T, (0.5, 0.2, 0.3))
            cps = net.change_points or ()
            budget = min(args.pairs, 10 * net.T)
            try:
                ds = sampling.random_scheme(tr, cps, n_pairs=budget, rng=rng)
            except ParameterError:
                ds = sampling.windowed_scheme(tr, cps, L)
            vs = sampling.windowed_scheme(va, cps, L)
            pairs.extend(sampling.PairExample(p.t1 + offset, p.t2 + offset, p.label) for p in ds.pairs)
            val_pairs.extend(
                sampling.PairExample(p.t1 + offset, p.t2 + offset, p.label) for p in vs.pairs
            )
        config = _model_config(args, test_net.n)
        params, _ = sgnn.train(
            graphs,
            sampling.PairDataset(tuple(pairs)),
            sampling.PairDataset(tuple(val_pairs)),
            config,
            seed=seed,
        )
        score_fn = sgnn.make_score_fn(params, config)
        values = detection.similarity_statistic(score_fn, test_net, L)
        first_t, stride = L + 1, 1
        theta = 0.5
    else:
        values, first_t, stride = method_statistic(method, test_net, L)
        cal_net = train_nets[0]
        cal_values, cal_first, cal_stride = method_statistic(method, cal_net, L)
        theta = detection.calibrate_threshold(
            cal_values, list(cal_net.change_points), L, cal_net.T,
            first_t=cal_first, stride=cal_stride,
        )
    declared = detection.detect_online(values, L, theta, first_t=first_t, stride=stride)
    score = evaluation.adjusted_f1(declared, list(test_net.change_points), test_net.T)
    return {"method": method, "adjusted_f1": score.f1,
            "precision": score.precision, "recall": score.recall}


# --- selfsup-labels -------------------------------------------------------------


def cmd_selfsup_labels(args) -> int:
    require(args, "out")
    if args.correlations:
        data = np.load(args.correlations)
        if "correlations" not in data:
            raise ParameterError(f"{args.correlations} has no 'correlations' array")
        mats = [np.asarray(m, dtype=float) for m in data["correlations"]]
    elif args.series:
        panel = ingest.read_series_csv(args.series)
        mats = ingest.windowed_correlations(panel, args.window)
    else:
        raise ParameterError("give --correlations or --series")
    rng = np.random.default_rng(args.seed)
    k_candidates = None
    if args.k_range:
        lo, hi = (int(x) for x in args.k_range.split(":"))
        k_candidates = range(lo, hi + 1)
    cps = selfsup.pre_estimate_change_points(
        mats, args.k, args.clusters, rng, k_candidates=k_candidates
    )
    selfsup.write_change_points(cps, args.out)
    write_meta(args.out, args, args.seed)
    print(json.dumps(cps))
    return 0


# --- parser -----------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default=None, help="key = value defaults file")
    p.add_argument("--seed", type=int, default=0)


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--encoding", default="degree",
                   help="degree | identity | randomwalk:K | laplacian:K")
    p.add_argument("--gcn-layers", type=int, default=2)
    p.add_argument("--hidden", type=int, default=32)
    p.add_argument("--sortk", type=int, default=20)
    p.add_argument("--fc-units", default=None, help="e.g. 64,32")
    p.add_argument("--dropout", type=float, default=0.05)
    p.add_argument("--pooling", default="sortk", choices=["sortk", "max", "average"])
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--weight-decay", type=float, default=0.0)
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--batch-size", type=int, default=32)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="netcpd")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample synthetic change-point scenarios")
    _add_common(p)
    p.add_argument("--scenario", default=None, choices=list(synthetic.SCENARIOS))
    p.add_argument("--level", type=float, default=None)
    p.add_argument("--p", type=float, default=None, help="level alias for merge/birth2")
    p.add_argument("--s", type=float, default=None, help="level alias for birth1")
    p.add_argument("--h", type=float, default=None, help="level alias for swaps")
    p.add_argument("--n", type=int, default=400)
    p.add_argument("--T", type=int, default=synthetic.DEFAULT_T)
    p.add_argument("--tau", type=int, default=0, help="0 samples uniformly from [25, 75]")
    p.add_argument("--seeds", type=int, default=1, help="number of sequences")
    p.add_argument("--pairs", type=int, default=0, help="labelled pairs per seed (0 = none)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_generate, _parser=p)

    p = sub.add_parser("ingest", help="build a correlation network from a series panel")
    _add_common(p)
    p.add_argument("--series", default=None)
    p.add_argument("--window", type=int, default=100)
    p.add_argument("--mode", default="quantile", choices=["quantile", "threshold"])
    p.add_argument("--q-low", type=float, default=0.1)
    p.add_argument("--q-high", type=float, default=0.9)
    p.add_argument("--eta", type=float, default=0.2)
    p.add_argument("--attrs", default=None, help="long-format attribute CSV")
    p.add_argument("--standardize-attrs", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--save-correlations", default=None, help="also write an .npz of matrices")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_ingest, _parser=p)

    p = sub.add_parser("train", help="fit the similarity model on labelled pairs")
    _add_common(p)
    p.add_argument("--network", default=None, help="JSONL graph pool the pair CSVs index")
    p.add_argument("--train-pairs", default=None)
    p.add_argument("--val-pairs", default=None)
    _add_model_flags(p)
    p.add_argument("--grid", default="none", choices=["none", *sgnn.GRID_PRESETS])
    p.add_argument("--metrics", default=None, help="per-epoch CSV")
    p.add_argument("--out", default=None, help="checkpoint path")
    p.set_defaults(func=cmd_train, _parser=p)

    p = sub.add_parser("detect", help="run a detector over a network file")
    _add_common(p)
    p.add_argument("--network", default=None)
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--method", default=None, choices=sorted(baselines.METHODS))
    p.add_argument("--L", type=int, default=6)
    p.add_argument("--theta", default="0.5", help="threshold, or 'auto' to calibrate")
    p.add_argument("--val-range", default=None, help="A:B timestamps for calibration")
    p.add_argument("--localize", default="argmin", choices=["argmin", "max_increment", "none"])
    p.add_argument("--increments", action="store_true", help="also write |dZ| series")
    p.add_argument("--declared-out", default=None)
    p.add_argument("--out", default=None, help="trace CSV path")
    p.set_defaults(func=cmd_detect, _parser=p)

    p = sub.add_parser("benchmark", help="scenario grid or file-based protocol comparison")
    _add_common(p)
    p.add_argument("--scenario", default="merge", choices=list(synthetic.SCENARIOS))
    p.add_argument("--levels", default="0.5")
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--methods", default="sgnn,frobenius,cusum,cusum2")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--T", type=int, default=100)
    p.add_argument("--L", type=int, default=6)
    p.add_argument("--pairs", type=int, default=600, help="pair-dataset size for the model")
    p.add_argument("--window-sweep", default=None, help="e.g. 6,12,24")
    p.add_argument("--pooling-sweep", action="store_true")
    _add_model_flags(p)
    p.add_argument("--networks", default=None, help="comma-separated JSONL files")
    p.add_argument("--protocol", default="individual",
                   choices=["individual", "random-split", "loso"])
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_benchmark, _parser=p)

    p = sub.add_parser("selfsup-labels", help="pre-estimate change-points without labels")
    _add_common(p)
    p.add_argument("--correlations", default=None, help=".npz with a 'correlations' array")
    p.add_argument("--series", default=None, help="series panel CSV")
    p.add_argument("--window", type=int, default=100)
    p.add_argument("--k", type=int, default=None, help="fixed per-matrix cluster count")
    p.add_argument("--k-range", default=None, help="silhouette candidates, e.g. 10:20")
    p.add_argument("--clusters", type=int, default=9, help="snapshot cluster count")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_selfsup_labels, _parser=p)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        apply_config_defaults(args)
        return args.func(args)
    except NetcpdError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    except Exception as exc:  # unexpected: still machine-readable
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
