"""Command-line front end.

Eight subcommands map onto the library layers: graph-sample, exact-partition,
exact-moments, exact-oracle, asym-predict, series-check, mcmc-run,
clt-experiment.  Scalar results are emitted as JSON records that echo the
resolved configuration and the package version; sample sequences are emitted
as CSV.  Outputs are deterministic byte for byte given the same arguments:
anything volatile (wall-clock runtime, timestamps) goes to stderr and, when
--out is used, to a separate <out>.meta.json sidecar.

Exit codes: 0 success, 2 argument validation, 3 refused by a capacity cap,
4 runtime failure (unparseable input file, numerical impossibility, I/O).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from datetime import datetime, timezone
from fractions import Fraction

from . import __version__
from .asymptotics import (
    predict_log_partition,
    remainder_check,
    taylor_coefficients_exact,
)
from .errors import CapacityError, GraphFormatError
from .exact import (
    disorder_oracle,
    enumerate_partition,
    expected_partition_log,
    second_moment_log,
    variance_ratio_detail,
)
from .graph import GraphSeed, read_graph, sample_graph, write_graph
from .mcmc import ChainConfig, derive_seed, quenched_experiment, run_chain
from .model import ModelParams
from .testfunctions import parse_test_function

_REMAINDER_GRID = (0.25, 0.125, 0.0625)


class _UsageError(Exception):
    pass


def _log(message: str) -> None:
    print(message, file=sys.stderr, flush=True)


def _model_params(args) -> ModelParams:
    try:
        return ModelParams(n=args.n, p=args.p, beta=args.beta)
    except ValueError as err:
        raise _UsageError(str(err)) from None


def _test_function(args):
    try:
        return parse_test_function(args.g)
    except ValueError as err:
        raise _UsageError(str(err)) from None


def _sanitize(obj):
    """Make a payload strict-JSON safe: non-finite floats become strings."""
    if isinstance(obj, dict):
        return {key: _sanitize(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(value) for value in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def _emit(text: str, out: str | None, started: float) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    sidecar = {
        "runtime_seconds": round(time.perf_counter() - started, 3),
        "written_at": datetime.now(timezone.utc).isoformat(),
    }
    with open(out + ".meta.json", "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _emit_json(payload: dict, out: str | None, started: float) -> None:
    text = json.dumps(_sanitize(payload), indent=2, sort_keys=True, allow_nan=False) + "\n"
    _emit(text, out, started)


def _config_echo(args, fields) -> dict:
    return {name: getattr(args, name) for name in fields}


def _load_or_sample_graph(args, params: ModelParams):
    """Graph from --graph when given, else sampled from --seed; returns
    (graph, graph_seed_or_None)."""
    if args.graph is not None:
        _log(f"reading graph from {args.graph}")
        return read_graph(args.graph), None
    seed = derive_seed(args.seed, 1)
    _log(f"sampling graph n={params.n} (seed {args.seed} -> graph stream {seed})")
    return sample_graph(params, GraphSeed(seed)), seed


def _cmd_graph_sample(args) -> int:
    params = _model_params(args)
    try:
        seed = GraphSeed(args.seed)
    except ValueError as err:
        raise _UsageError(str(err)) from None
    started = time.perf_counter()
    g = sample_graph(params, seed)
    _log(f"sampled graph n={g.n} edges={g.edge_count()}")
    buf = io.StringIO()
    write_graph(g, buf)
    _emit(buf.getvalue(), args.out, started)
    return 0


def _cmd_exact_partition(args) -> int:
    params = _model_params(args)
    started = time.perf_counter()
    g, graph_seed = _load_or_sample_graph(args, params)
    if g.n != params.n:
        raise _UsageError(
            f"graph file has n={g.n} but --n is {params.n}"
        )
    _log(f"enumerating 2^{params.n} configurations")
    summary = enumerate_partition(g, params)
    payload = {
        "command": "exact-partition",
        "artifact_version": __version__,
        "config": _config_echo(args, ("n", "p", "beta", "seed", "graph")),
        "graph_seed": graph_seed,
        "log_z": summary.log_z,
        "free_energy_per_site": summary.free_energy_per_site,
        "law": {
            "locations": list(summary.law.locations),
            "weights": list(summary.law.weights),
        },
    }
    _emit_json(payload, args.out, started)
    return 0


def _cmd_exact_moments(args) -> int:
    params = _model_params(args)
    g = _test_function(args)
    started = time.perf_counter()
    _log(f"first moment (n={params.n})")
    first = expected_partition_log(params, g)
    _log("second moment")
    second = second_moment_log(params, g)
    if first == -math.inf:
        ratio, clamped = None, False
    else:
        ratio, clamped = variance_ratio_detail(params, g)
    payload = {
        "command": "exact-moments",
        "artifact_version": __version__,
        "config": _config_echo(args, ("n", "p", "beta", "g")),
        "log_expected_partition": first,
        "log_second_moment": second,
        "variance_ratio": ratio,
        "variance_ratio_clamped": clamped,
    }
    _emit_json(payload, args.out, started)
    return 0


def _cmd_exact_oracle(args) -> int:
    params = _model_params(args)
    g = _test_function(args)
    started = time.perf_counter()
    _log(f"brute-force disorder average over 2^{params.n * params.n} graphs")
    value = disorder_oracle(params, g, args.moment)
    payload = {
        "command": "exact-oracle",
        "artifact_version": __version__,
        "config": _config_echo(args, ("n", "p", "beta", "g", "moment")),
        "log_value": value,
    }
    _emit_json(payload, args.out, started)
    return 0


def _cmd_asym_predict(args) -> int:
    params = _model_params(args)
    g = _test_function(args)
    if not params.beta < 1.0:
        raise _UsageError(f"predictions require beta < 1, got {params.beta}")
    if args.variant == "c" and g.name != "one":
        raise _UsageError("variant 'c' is only defined for --g one")
    started = time.perf_counter()
    prediction = predict_log_partition(params, g, args.variant)
    payload = {
        "command": "asym-predict",
        "artifact_version": __version__,
        "config": _config_echo(args, ("n", "p", "beta", "g", "variant")),
        "log_value": prediction.log_value,
        "gaussian_factor": prediction.gaussian_factor,
    }
    _emit_json(payload, args.out, started)
    return 0


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _cmd_series_check(args) -> int:
    if not 0 < args.p <= 1:
        raise _UsageError(f"p must lie in (0, 1], got {args.p}")
    started = time.perf_counter()
    p_float = float(args.p)
    try:
        exact = taylor_coefficients_exact(args.p, args.max_order)
    except ValueError as err:
        raise _UsageError(str(err)) from None
    remainders = {
        which: {repr(z): remainder_check(p_float, z, which) for z in _REMAINDER_GRID}
        for which in ("odd", "even")
    }
    payload = {
        "command": "series-check",
        "artifact_version": __version__,
        "config": {"p": str(args.p), "max_order": args.max_order},
        "coefficients": [float(c) for c in exact],
        "coefficients_exact": [str(c) for c in exact],
        "remainders": remainders,
    }
    _emit_json(payload, args.out, started)
    return 0


def _chain_config(args, chain_seed: int) -> ChainConfig:
    try:
        return ChainConfig(
            sweeps=args.sweeps,
            burn_in=args.burnin,
            thin=args.thin,
            replicas=args.replicas,
            chain_seed=chain_seed,
        )
    except ValueError as err:
        raise _UsageError(str(err)) from None


def _cmd_mcmc_run(args) -> int:
    params = _model_params(args)
    cfg = _chain_config(args, derive_seed(args.seed, 2))
    started = time.perf_counter()
    g, graph_seed = _load_or_sample_graph(args, params)
    if g.n != params.n:
        raise _UsageError(f"graph file has n={g.n} but --n is {params.n}")
    if cfg.retained(params.n) < 1:
        raise _UsageError(
            f"no samples would be retained (sweeps={cfg.sweeps}, "
            f"burn_in={cfg.resolved_burn_in(params.n)}, thin={cfg.thin})"
        )
    _log(
        f"running {cfg.replicas} replica(s), {cfg.sweeps} sweeps each "
        f"(burn-in {cfg.resolved_burn_in(params.n)}, thin {cfg.thin})"
    )
    samples = run_chain(g, params, cfg, graph_seed=graph_seed)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["graph_seed", "replica_id", "sweep_index", "m_scaled"])
    for sample in samples:
        seed_field = "" if sample.graph_seed is None else sample.graph_seed
        for j, value in enumerate(sample.values):
            writer.writerow(
                [seed_field, sample.replica_id, sample.first_sweep + j * sample.thin, repr(value)]
            )
    _log(f"retained {sum(len(s.values) for s in samples)} samples")
    _emit(buf.getvalue(), args.out, started)
    return 0


def _cmd_clt_experiment(args) -> int:
    params = _model_params(args)
    if not params.beta < 1.0:
        raise _UsageError(f"the Gaussian reference requires beta < 1, got {params.beta}")
    if args.graphs < 1:
        raise _UsageError(f"--graphs must be positive, got {args.graphs}")
    if not args.epsilon > 0:
        raise _UsageError(f"--epsilon must be positive, got {args.epsilon}")
    threads = args.threads
    if threads is None:
        threads = int(os.environ.get("DILUTECW_THREADS", "1"))
    if threads < 1:
        raise _UsageError(f"thread count must be positive, got {threads}")
    cfg = _chain_config(args, 0)
    started = time.perf_counter()
    _log(f"{args.graphs} graphs at n={params.n}, {cfg.replicas} replica(s) each")
    record = quenched_experiment(
        params,
        cfg,
        args.graphs,
        master_seed=args.seed,
        epsilon=args.epsilon,
        threads=threads,
    )
    payload = {
        "command": "clt-experiment",
        "artifact_version": __version__,
        "config": _config_echo(
            args,
            ("n", "p", "beta", "graphs", "sweeps", "burnin", "thin", "replicas",
             "epsilon", "seed"),
        ),
        "reference": {"mean": record.reference.mean, "variance": record.reference.variance},
        "per_graph": [
            {
                "graph_seed": run.graph_seed,
                "n_samples": run.n_samples,
                "sample_mean": run.sample_mean,
                "sample_variance": run.sample_variance,
                "levy": run.levy,
                "ks": run.ks,
            }
            for run in record.runs
        ],
        "pooled": {
            "count": record.pooled_count,
            "mean": record.pooled_mean,
            "variance": record.pooled_variance,
        },
        "exceed_fraction": record.exceed_fraction,
    }
    _emit_json(payload, args.out, started)
    return 0


def _add_model_flags(sub, *, beta=True):
    sub.add_argument("--n", type=int, required=True, help="number of sites")
    sub.add_argument("--p", type=float, required=True, help="edge probability in (0, 1]")
    if beta:
        sub.add_argument("--beta", type=float, required=True, help="inverse temperature")


def _add_chain_flags(sub):
    sub.add_argument("--sweeps", type=int, required=True, help="total sweeps incl. burn-in")
    sub.add_argument("--burnin", type=int, default=None, help="burn-in sweeps (default 10 sqrt(n))")
    sub.add_argument("--thin", type=int, default=1, help="record every thin-th sweep")
    sub.add_argument("--replicas", type=int, default=1, help="independent replicas")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dilutecw",
        description="Dilute mean-field Ising on directed random graphs: "
        "exact thermodynamics, asymptotics, Monte Carlo.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("graph-sample", help="sample a disorder graph to the text format")
    _add_model_flags(sub, beta=False)
    sub.set_defaults(beta=0.0)
    sub.add_argument("--seed", type=int, default=0, help="64-bit master seed")
    sub.add_argument("--out", default=None, help="output path (default stdout)")
    sub.set_defaults(func=_cmd_graph_sample)

    sub = commands.add_parser("exact-partition", help="enumerate one graph's partition sum and law")
    _add_model_flags(sub)
    sub.add_argument("--seed", type=int, default=0, help="master seed when sampling the graph")
    sub.add_argument("--graph", default=None, help="read the graph from this file instead")
    sub.add_argument("--out", default=None)
    sub.set_defaults(func=_cmd_exact_partition)

    sub = commands.add_parser("exact-moments", help="closed-form annealed moments")
    _add_model_flags(sub)
    sub.add_argument("--g", default="one", help="test function (one, gauss, cosine, bump:c,w)")
    sub.add_argument("--out", default=None)
    sub.set_defaults(func=_cmd_exact_moments)

    sub = commands.add_parser("exact-oracle", help="brute-force disorder average (tiny n)")
    _add_model_flags(sub)
    sub.add_argument("--g", default="one")
    sub.add_argument("--moment", choices=("first", "second"), required=True)
    sub.add_argument("--out", default=None)
    sub.set_defaults(func=_cmd_exact_oracle)

    sub = commands.add_parser("asym-predict", help="asymptotic log partition prediction")
    _add_model_flags(sub)
    sub.add_argument("--g", default="one")
    sub.add_argument("--variant", choices=("a", "b", "c"), required=True)
    sub.add_argument("--out", default=None)
    sub.set_defaults(func=_cmd_asym_predict)

    sub = commands.add_parser("series-check", help="Taylor coefficients and remainders of the edge function")
    sub.add_argument(
        "--p",
        type=_rational,
        required=True,
        help="edge probability; fractions like 1/3 and decimals stay exact",
    )
    sub.add_argument("--max-order", type=int, default=8, dest="max_order")
    sub.add_argument("--out", default=None)
    sub.set_defaults(func=_cmd_series_check)

    sub = commands.add_parser("mcmc-run", help="Glauber chain samples as CSV")
    _add_model_flags(sub)
    sub.add_argument("--seed", type=int, default=0, help="master seed (graph + chains)")
    sub.add_argument("--graph", default=None, help="read the graph from this file instead")
    _add_chain_flags(sub)
    sub.add_argument("--out", default=None)
    sub.set_defaults(func=_cmd_mcmc_run)

    sub = commands.add_parser("clt-experiment", help="multi-graph comparison to the Gaussian law")
    _add_model_flags(sub)
    sub.add_argument("--graphs", type=int, required=True, help="number of disorder graphs")
    _add_chain_flags(sub)
    sub.add_argument("--epsilon", type=float, default=0.1, help="distance threshold")
    sub.add_argument("--seed", type=int, default=0, help="master seed")
    sub.add_argument(
        "--threads",
        type=int,
        default=None,
        help="worker threads over graphs (default env DILUTECW_THREADS or 1)",
    )
    sub.add_argument("--out", default=None)
    sub.set_defaults(func=_cmd_clt_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return int(exit_.code or 0)
    try:
        return args.func(args)
    except _UsageError as err:
        _log(f"error: {err}")
        return 2
    except CapacityError as err:
        _log(f"error: capacity: {err}")
        return 3
    except GraphFormatError as err:
        _log(f"error: bad graph file: {err}")
        return 4
    except (ValueError, OSError) as err:
        _log(f"error: {err}")
        return 4


if __name__ == "__main__":
    sys.exit(main())
