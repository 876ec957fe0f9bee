"""Command-line interface.

Subcommands: transform, classify, simulate, denoise, bench. All results go to
files; progress lines go to standard error. Exit codes: 0 on success, 1 on a
validation problem (bad flags or bad input values), 2 on an I/O problem.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import persistence
from .classify import group_cv
from .core import load_dataset_csv, load_spectrum_csv, write_pgm
from .diagram import write_diagram_csv
from .simulate import (
    NoiseModel,
    SimulationSpec,
    add_noise,
    bench_denoise,
    denoise,
    generate_ground_truth,
    mean_image,
)


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; this tool reserves 2 for I/O.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _positive_workers(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("thread count must be positive")
    return n


def _default_workers() -> int:
    return os.cpu_count() or 1


def _build_parser() -> _Parser:
    parser = _Parser(prog="topopeaks",
                     description="Persistence-based peak analysis of spectra")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transform", parents=[], help="persistence features of one spectrum",
                       description="Compute the persistence transformation of a spectrum "
                                   "and write the top-k% features as CSV.")
    p.add_argument("--in", dest="infile", required=True, help="input spectrum CSV (mz,intensity)")
    p.add_argument("--out", required=True, help="output feature CSV")
    p.add_argument("--k", type=float, default=100.0, help="percentage of peaks to keep, in (0, 100]")
    p.add_argument("--reduced", action="store_true", help="emit position and persistence only")
    p.add_argument("--diagram", help="also write the persistence diagram CSV here")

    p = sub.add_parser("classify", help="group-level cross-validated classification",
                       description="Cross-validate a classifier on persistence features.")
    p.add_argument("--spectra", required=True, help="dataset CSV (header = mz axis)")
    p.add_argument("--labels", required=True, help="labels CSV (label,group per row)")
    p.add_argument("--out-dir", required=True, help="directory for folds.csv and summary.csv")
    p.add_argument("--scheme", choices=["leave-one-group-out", "two-fold-AB"],
                   default="leave-one-group-out")
    p.add_argument("--classifier", choices=["logistic", "forest"], default="logistic")
    p.add_argument("--k", type=float, default=30.0, help="percentage of peaks to keep")
    p.add_argument("--n-trees", type=int, default=1000)
    p.add_argument("--seed", type=int, default=1234)
    p.add_argument("--threads", type=_positive_workers, default=_default_workers(),
                   help="worker processes for feature building (default: all cores)")

    def add_sim_flags(sp, with_noise=True):
        sp.add_argument("--size", type=int, default=30, help="image side length in pixels")
        sp.add_argument("--baseline", type=float, default=0.0)
        sp.add_argument("--n-mz", type=int, default=3466)
        sp.add_argument("--n-peaks", type=int, default=50)
        sp.add_argument("--seed", type=int, default=1234)
        if with_noise:
            sp.add_argument("--noise", choices=["none", "gaussian", "poisson"],
                            default="gaussian")
            sp.add_argument("--sd", type=float, default=0.1, help="gaussian noise sd")
            sp.add_argument("--lam", type=float, default=1.0, help="poisson noise rate")

    p = sub.add_parser("simulate", help="generate a synthetic image",
                       description="Write ground-truth and noisy mean images as PGM.")
    p.add_argument("--out-dir", required=True)
    add_sim_flags(p)

    p = sub.add_parser("denoise", help="simulate, denoise, and write images",
                       description="Write ground-truth, noisy, and per-k denoised mean "
                                   "images as PGM.")
    p.add_argument("--out-dir", required=True)
    add_sim_flags(p)
    p.add_argument("--k", default="10,25", help="comma-separated k percentages")
    p.add_argument("--threads", type=_positive_workers, default=_default_workers())

    p = sub.add_parser("bench", help="denoising wall-clock benchmark",
                       description="Time denoising across image sizes; write a timing CSV.")
    p.add_argument("--out", required=True, help="output timing CSV")
    p.add_argument("--sizes", default="30,42,60", help="comma-separated image sizes")
    add_sim_flags(p)
    p.add_argument("--k", type=float, default=25.0)
    p.add_argument("--threads", type=_positive_workers, default=1,
                   help="worker processes (default 1: sequential baseline)")
    return parser


def _noise_model(args) -> NoiseModel:
    if args.noise == "none":
        return NoiseModel("none", 0.0, args.seed)
    level = args.sd if args.noise == "gaussian" else args.lam
    return NoiseModel(args.noise, level, args.seed)


def _parse_k_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ValueError(f"bad k list {text!r}: expected comma-separated numbers") from None


def _cmd_transform(args) -> int:
    spectrum = load_spectrum_csv(args.infile)
    triples = persistence.transform(spectrum)
    _log(f"transformed {len(spectrum)} points into {len(triples)} features")
    pairs = persistence.filter_top_k(persistence.reduce(triples), args.k)
    if args.diagram:
        write_diagram_csv(persistence.to_diagram(triples), args.diagram)
        _log(f"wrote {args.diagram}")
    if args.reduced:
        persistence.write_pairs_csv(pairs, spectrum.mz, args.out)
    else:
        keep = {p.position for p in pairs}
        kept = sorted((t for t in triples if t.position in keep),
                      key=lambda t: t.position)
        persistence.write_triples_csv(kept, spectrum.mz, args.out)
    _log(f"wrote {args.out} ({len(pairs)} features at k={args.k})")
    return 0


def _cmd_classify(args) -> int:
    dataset = load_dataset_csv(args.spectra, args.labels)
    _log(f"loaded {dataset.n} spectra with {dataset.q} mz values")
    report = group_cv(dataset, args.scheme, args.classifier, args.k,
                      n_trees=args.n_trees, seed=args.seed, workers=args.threads)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    folds_path = out_dir / "folds.csv"
    with open(folds_path, "w") as fh:
        fh.write("fold,balanced_accuracy\n")
        for name, score in zip(report.fold_names, report.fold_scores):
            fh.write(f"{name},{score!r}\n")
    summary_path = out_dir / "summary.csv"
    with open(summary_path, "w") as fh:
        fh.write("statistic,value\n")
        for stat in ("mean", "min", "max", "median", "std"):
            fh.write(f"{stat},{getattr(report, stat)!r}\n")
    _log(f"wrote {folds_path} and {summary_path}")
    print(report.summary_table())
    return 0


def _cmd_simulate(args) -> int:
    spec = SimulationSpec(size=args.size, n_mz=args.n_mz, n_peaks=args.n_peaks,
                          baseline=args.baseline, seed=args.seed)
    image, _ = generate_ground_truth(spec)
    noisy = add_noise(image, _noise_model(args))
    _log(f"generated {args.size}x{args.size} image with {args.n_mz} mz values")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_pgm(mean_image(image), out_dir / "ground_truth.pgm")
    write_pgm(mean_image(noisy), out_dir / "noisy.pgm")
    _log(f"wrote {out_dir / 'ground_truth.pgm'} and {out_dir / 'noisy.pgm'}")
    return 0


def _cmd_denoise(args) -> int:
    ks = _parse_k_list(args.k)
    if not ks:
        raise ValueError("need at least one k value")
    spec = SimulationSpec(size=args.size, n_mz=args.n_mz, n_peaks=args.n_peaks,
                          baseline=args.baseline, seed=args.seed)
    image, _ = generate_ground_truth(spec)
    noisy = add_noise(image, _noise_model(args))
    _log(f"generated {args.size}x{args.size} image with {args.n_mz} mz values")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_pgm(mean_image(image), out_dir / "ground_truth.pgm")
    write_pgm(mean_image(noisy), out_dir / "noisy.pgm")
    for k in ks:
        cleaned = denoise(noisy, k, workers=args.threads)
        name = f"denoised_k{k:g}.pgm"
        write_pgm(mean_image(cleaned), out_dir / name)
        _log(f"wrote {out_dir / name}")
    return 0


def _cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    rows = bench_denoise(sizes, _noise_model(args), args.k, baseline=args.baseline,
                         n_mz=args.n_mz, n_peaks=args.n_peaks, seed=args.seed,
                         workers=args.threads)
    with open(args.out, "w") as fh:
        fh.write("size,pixels,seconds,seconds_per_pixel,ratio_vs_first\n")
        first = rows[0].seconds
        for r in rows:
            fh.write(f"{r.size},{r.pixels},{r.seconds!r},{r.seconds_per_pixel!r},"
                     f"{r.seconds / first!r}\n")
        _log(f"size {rows[-1].size}: {rows[-1].seconds:.2f}s")
    _log(f"wrote {args.out}")
    return 0


_COMMANDS = {
    "transform": _cmd_transform,
    "classify": _cmd_classify,
    "simulate": _cmd_simulate,
    "denoise": _cmd_denoise,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ValueError as exc:
        print(f"topopeaks: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"topopeaks: i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
