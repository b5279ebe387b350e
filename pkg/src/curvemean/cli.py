"""Command-line interface.

Subcommands: ``segment`` (record to dataset), ``smooth`` (dataset to
smoothed dataset), ``mean`` (dataset to mean curve, parameters and trace),
``simulate`` (synthetic dataset) and ``benchmark`` (replicated estimator
comparison). Outputs are CSV/JSON only; progress notes go to stderr.

Every flag can also be supplied through a JSON config file passed with
--config (keys use the flag spelling without the leading dashes, with
either dashes or underscores); explicit flags win over config values.
Exit codes: 0 success, 2 bad input or usage, 1 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .core import GridCurve, as_signal_matrix, grid_points
from .estimators import euclidean_mean, frechet_mean, procrustes_mean
from .ingestion import (
    DatasetFormatError,
    SegmentationConfig,
    default_beat_window,
    detect_peaks,
    load_record,
    load_signals,
    segment,
    store_signals,
)
from .optimizer import OptimizerConfig
from .smoothing import make_smoother
from .synthetic import SimulationConfig, default_mean_shape, run_benchmark, simulate_dataset

_DEFAULTS = {
    "segment": {
        "window": None, "pow2": False, "min_distance": 1,
        "min_prominence": 0.0,
    },
    "smooth": {
        "method": "fourier-gcv", "cutoff": None, "wavelet": "db4", "m0": 3,
    },
    "mean": {
        "method": "frechet", "family": "translation",
        "smoother": "fourier-gcv", "rho": 1e-4, "kappa": 2.0,
        "max_iter": 200, "max_backtracks": 50, "basis_size": 10,
        "degree": 3, "ode_steps": 60, "rounds": 20,
        "search_halfwidth": 0.25,
    },
    "simulate": {
        "n": 128, "signals": 15, "shift_variance": 0.004, "sigma": 0.3,
        "gp_truncation": 50, "shape": None, "seed": None,
    },
    "benchmark": {
        "n": 128, "signals": 15, "shift_variance": 0.004, "sigma": 0.3,
        "gp_truncation": 50, "replications": 100, "shape": None,
        "seed": None, "threads": 1,
    },
}


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvemean",
        description="Mean shapes of noisy, time-deformed periodic signals.",
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config(p):
        p.add_argument("--config", help="JSON file mirroring the flags")

    p = sub.add_parser("segment",
                       help="cut a long record into peak-centered signals")
    add_config(p)
    p.add_argument("--record", required=True, help="single-column CSV")
    p.add_argument("--sample-rate", type=float, required=True)
    p.add_argument("--window", type=int, help="segment length in samples "
                   "(default: about 0.7 s)")
    p.add_argument("--pow2", action="store_true", default=None,
                   help="snap the default window to a power of two")
    p.add_argument("--min-distance", type=int)
    p.add_argument("--min-prominence", type=float)
    p.add_argument("--out", required=True, help="dataset CSV to write")

    p = sub.add_parser("smooth", help="denoise every signal of a dataset")
    add_config(p)
    p.add_argument("--data", required=True, help="dataset CSV")
    p.add_argument("--method",
                   choices=["fourier-gcv", "fourier-fixed", "wavelet",
                            "none"])
    p.add_argument("--cutoff", type=int,
                   help="cut-off for --method fourier-fixed")
    p.add_argument("--wavelet", choices=["haar", "db4"])
    p.add_argument("--m0", type=int, help="coarsest wavelet level")
    p.add_argument("--out", required=True)

    p = sub.add_parser("mean", help="estimate the mean shape of a dataset")
    add_config(p)
    p.add_argument("--data", required=True, help="dataset CSV")
    p.add_argument("--method",
                   choices=["euclidean", "frechet", "procrustes"])
    p.add_argument("--family", choices=["translation", "diffeo"])
    p.add_argument("--smoother", help="smoother spec for --method frechet")
    p.add_argument("--rho", type=float)
    p.add_argument("--kappa", type=float)
    p.add_argument("--max-iter", type=int)
    p.add_argument("--max-backtracks", type=int)
    p.add_argument("--basis-size", type=int)
    p.add_argument("--degree", type=int)
    p.add_argument("--ode-steps", type=int)
    p.add_argument("--rounds", type=int,
                   help="template rounds for --method procrustes")
    p.add_argument("--search-halfwidth", type=float)
    p.add_argument("--out-mean", required=True, help="mean curve CSV")
    p.add_argument("--out-params", help="parameter JSON")
    p.add_argument("--out-trace", help="trace JSON")

    p = sub.add_parser("simulate", help="draw a synthetic dataset")
    add_config(p)
    p.add_argument("--seed", type=int, help="required (reproducibility)")
    p.add_argument("--n", type=int)
    p.add_argument("--signals", type=int)
    p.add_argument("--shift-variance", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--gp-truncation", type=int)
    p.add_argument("--shape", help="CSV with the true shape on the grid")
    p.add_argument("--out", required=True, help="dataset CSV")
    p.add_argument("--out-shifts", required=True, help="true shifts JSON")

    p = sub.add_parser("benchmark",
                       help="replicated aligned-vs-baseline comparison")
    add_config(p)
    p.add_argument("--seed", type=int, help="required (reproducibility)")
    p.add_argument("--n", type=int)
    p.add_argument("--signals", type=int)
    p.add_argument("--shift-variance", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--gp-truncation", type=int)
    p.add_argument("--replications", type=int)
    p.add_argument("--shape", help="CSV with the true shape on the grid")
    p.add_argument("--threads", type=int)
    p.add_argument("--out", required=True, help="per-replication MSE CSV")
    p.add_argument("--out-summary", required=True, help="summary JSON")

    return parser


def _merge_config(args: argparse.Namespace) -> argparse.Namespace:
    config = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise ValueError("config file must hold a JSON object")
        config = {str(k).replace("-", "_"): v for k, v in loaded.items()}
    for key, fallback in _DEFAULTS[args.command].items():
        if getattr(args, key, None) is None:
            setattr(args, key, config.get(key, fallback))
    return args


def _load_shape(path):
    data = load_signals(path)
    if data.shape[0] == 1:
        return GridCurve(data[0])
    if data.shape[1] == 1:
        return GridCurve(data[:, 0])
    raise DatasetFormatError(
        f"{path}: shape file must be a single row or a single column"
    )


def _require_seed(args) -> int:
    if args.seed is None:
        raise ValueError(f"{args.command} needs --seed (or a config value)")
    return int(args.seed)


# ---------------------------------------------------------------------------
# Subcommand bodies
# ---------------------------------------------------------------------------

def _cmd_segment(args) -> int:
    record = load_record(args.record, args.sample_rate)
    window = args.window
    if window is None:
        window = default_beat_window(record.sample_rate,
                                     power_of_two=bool(args.pow2))
        _note(f"segment: using window={window} samples")
    cfg = SegmentationConfig(window=window,
                             min_peak_distance=args.min_distance,
                             min_prominence=args.min_prominence)
    peaks = detect_peaks(record, cfg)
    signals, skipped = segment(record, peaks, window)
    if skipped:
        _note(f"segment: skipped {len(skipped)} peak(s) too close to the "
              f"record ends: {skipped}")
    if signals.shape[0] == 0:
        raise ValueError("no segments produced; check the peak settings")
    store_signals(signals, args.out)
    _note(f"segment: wrote {signals.shape[0]} signals of length "
          f"{signals.shape[1]} to {args.out}")
    return 0


def _cmd_smooth(args) -> int:
    X = as_signal_matrix(load_signals(args.data))
    if args.method == "fourier-fixed":
        if args.cutoff is None:
            raise ValueError("--method fourier-fixed needs --cutoff")
        spec = f"fourier-fixed:{args.cutoff}"
    elif args.method == "wavelet":
        if X.shape[1] & (X.shape[1] - 1):
            raise ValueError(
                f"wavelet smoothing needs a power-of-two signal length, "
                f"got {X.shape[1]}; use --method fourier-gcv instead"
            )
        spec = f"wavelet:{args.wavelet}:{args.m0}"
    else:
        spec = args.method
    smoother = make_smoother(spec)
    nodes = grid_points(X.shape[1])
    out = np.stack([smoother(row).value(nodes) for row in X])
    store_signals(out, args.out)
    _note(f"smooth: wrote {out.shape[0]} smoothed signals to {args.out}")
    return 0


def _optimizer_config(args) -> OptimizerConfig:
    return OptimizerConfig(rho=args.rho, kappa=args.kappa,
                           max_iterations=args.max_iter,
                           max_backtracks=args.max_backtracks)


def _cmd_mean(args) -> int:
    X = load_signals(args.data)
    if args.method == "euclidean":
        mean = euclidean_mean(as_signal_matrix(X))
        params = np.zeros((X.shape[0], 1))
        trace, step_sizes, backtracks = [], [], []
        iterations, converged = 0, True
    else:
        from .criterion import make_family

        family = make_family(args.family, n_basis=args.basis_size,
                             degree=args.degree, ode_steps=args.ode_steps)
        if args.method == "frechet":
            result = frechet_mean(X, smoother=args.smoother, family=family,
                                  config=_optimizer_config(args))
        else:
            result = procrustes_mean(
                X, family=family, max_rounds=args.rounds,
                search_halfwidth=args.search_halfwidth,
                config=_optimizer_config(args),
            )
        mean = result.mean_curve
        params = result.params
        trace = result.trace
        step_sizes = result.step_sizes
        backtracks = result.backtracks
        iterations, converged = result.iterations, result.converged

    store_signals(mean[None, :], args.out_mean)
    if args.out_params:
        with open(args.out_params, "w") as fh:
            json.dump({
                "method": args.method,
                "family": args.family,
                "params": params.tolist(),
            }, fh, indent=2)
            fh.write("\n")
    if args.out_trace:
        with open(args.out_trace, "w") as fh:
            json.dump({
                "criterion": [float(v) for v in trace],
                "step_sizes": [float(v) for v in step_sizes],
                "backtracks": [int(v) for v in backtracks],
                "iterations": iterations,
                "converged": converged,
            }, fh, indent=2)
            fh.write("\n")
    _note(f"mean: {args.method} estimate written to {args.out_mean} "
          f"({iterations} iterations, converged={converged})")
    return 0


def _simulation_config(args, seed: int) -> SimulationConfig:
    return SimulationConfig(
        n=args.n, n_signals=args.signals,
        shift_variance=args.shift_variance, sigma=args.sigma,
        gp_truncation=args.gp_truncation,
        replications=getattr(args, "replications", 1), seed=seed,
    )


def _cmd_simulate(args) -> int:
    seed = _require_seed(args)
    cfg = _simulation_config(args, seed)
    shape = _load_shape(args.shape) if args.shape else default_mean_shape()
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    signals, shifts = simulate_dataset(shape, cfg, rng)
    store_signals(signals, args.out)
    with open(args.out_shifts, "w") as fh:
        json.dump({"seed": seed, "shifts": shifts.tolist()}, fh, indent=2)
        fh.write("\n")
    _note(f"simulate: wrote {cfg.n_signals} signals of length {cfg.n} "
          f"to {args.out}")
    return 0


def _cmd_benchmark(args) -> int:
    seed = _require_seed(args)
    cfg = _simulation_config(args, seed)
    shape = _load_shape(args.shape) if args.shape else default_mean_shape()
    result = run_benchmark(shape, cfg, threads=args.threads)
    with open(args.out, "w", newline="") as fh:
        fh.write("replication,frechet_mse,procrustes_mse\n")
        for m in range(cfg.replications):
            fh.write(f"{m},{result.frechet_mses[m]!r},"
                     f"{result.procrustes_mses[m]!r}\n")
    with open(args.out_summary, "w") as fh:
        json.dump({
            "config": {
                "n": cfg.n, "signals": cfg.n_signals,
                "shift_variance": cfg.shift_variance, "sigma": cfg.sigma,
                "gp_truncation": cfg.gp_truncation,
                "replications": cfg.replications, "seed": cfg.seed,
            },
            **result.summary,
        }, fh, indent=2)
        fh.write("\n")
    _note(f"benchmark: medians frechet="
          f"{result.summary['frechet']['median']:.3g} procrustes="
          f"{result.summary['procrustes']['median']:.3g} "
          f"(aligned mean better in {result.summary['frechet_wins']}"
          f"/{cfg.replications})")
    return 0


_COMMANDS = {
    "segment": _cmd_segment,
    "smooth": _cmd_smooth,
    "mean": _cmd_mean,
    "simulate": _cmd_simulate,
    "benchmark": _cmd_benchmark,
}


def run(argv=None) -> int:
    """Parse arguments and run one subcommand; returns the exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _merge_config(args)
        return _COMMANDS[args.command](args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        _note(f"error: {exc}")
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        _note(f"internal error: {type(exc).__name__}: {exc}")
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
