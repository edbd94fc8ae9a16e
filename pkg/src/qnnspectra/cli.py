"""Command-line entry point: ``qnnspectra <subcommand> ...``."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys

from . import bench, encodings, spectrum
from .errors import ArchitectureError, QnnError
from .model import ArchitectureSpec
from .synthdata import build_dataset, derive_seed, sample_target
from .training import TrainConfig

TABLE_SHAPES = [(1, 2), (2, 1), (1, 4), (2, 2), (4, 1), (1, 6), (2, 3), (3, 2), (6, 1)]


def _writer(out, name):
    if out is None:
        return sys.stdout, False
    os.makedirs(out, exist_ok=True)
    return open(os.path.join(out, name), "w", newline=""), True


def cmd_spectrum(args):
    fh, close = _writer(args.out, "spectrum.csv")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["family", "area", "R", "L", "q", "positive_size", "max_gapfree_K"])
    shapes = TABLE_SHAPES if not args.shape else [tuple(s) for s in args.shape]
    for fam in args.families:
        for R, L in shapes:
            try:
                f = encodings.family(fam, R)
                rep = spectrum.frequency_spectrum(f, R, L, with_degeneracy=False)
            except ArchitectureError as err:
                logging.info("skipping %s (%d, %d): %s", fam, R, L, err)
                continue
            w.writerow([fam, R * L, R, L, f.q, rep.positive_size, rep.max_gapfree_K])
    if close:
        fh.close()


def cmd_gen_synthetic(args):
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "manifest.csv"), "w", newline="") as mf:
        m = csv.writer(mf, lineterminator="\n")
        m.writerow(["function_id", "K", "seed", "c0"]
                   + [f"re_c{k}" for k in range(1, args.K + 1)] + [f"im_c{k}" for k in range(1, args.K + 1)])
        for i in range(args.count):
            seed = derive_seed(args.seed, "target", args.K, i)
            g = sample_target(args.K, seed)
            ds = build_dataset(g, args.points)
            fid = f"g{i:04d}"
            with open(os.path.join(args.out, fid + ".csv"), "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["x", "y"])
                w.writerows((bench.fmt(a), bench.fmt(b)) for a, b in zip(ds.x, ds.y))
            c = g.coefficients
            m.writerow([fid, args.K, seed, bench.fmt(c[0].real)]
                       + [bench.fmt(v) for v in c[1:].real] + [bench.fmt(v) for v in c[1:].imag])


def _preset(args):
    return bench.PRESETS[args.preset]


def cmd_capability(args):
    p = _preset(args)
    cfg = TrainConfig(learning_rate=args.lr, epochs=args.epochs or p["epochs"])
    res = bench.learning_capability(
        args.family, args.qubits, args.layers, args.K, args.population or p["population"], cfg,
        args.points or p["points"], master_seed=args.seed, workers=args.workers,
    )
    fh, close = _writer(args.out, "capability.csv")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["function", "seed", "final_loss", "truncation_floor", "diverged"])
    for r in res.per_function:
        w.writerow([r.index, r.seed, bench.fmt(r.final_loss), bench.fmt(r.floor), r.diverged])
    if close:
        fh.close()
    print(f"mu_{args.K} = {res.mu:.6g}  (q25 {res.q25:.6g}, q75 {res.q75:.6g})", file=sys.stderr)


def cmd_classify(args):
    p = _preset(args)
    X_tr, y_tr = bench.read_feature_csv(args.train)
    X_te, y_te = bench.read_feature_csv(args.test)
    spec = ArchitectureSpec(args.family, args.qubits, args.layers, N=X_tr.shape[1], ansatz_mode=args.ansatz)
    cfg = TrainConfig(loss="bce", learning_rate=args.lr, epochs=args.epochs or p["classification_epochs"],
                      batch_size=args.batch_size, seed=args.seed)
    res = bench.classify(spec, X_tr, y_tr, X_te, y_te, cfg)
    out = {"final_loss": res.final_loss, **res.metrics}
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "metrics.json"), "w") as fh:
            json.dump(out, fh, indent=2)
        with open(os.path.join(args.out, "history.csv"), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["epoch", "loss"])
            w.writerows((e, bench.fmt(v)) for e, v in enumerate(res.loss_history, 1))
    print(json.dumps(out, indent=2))


def cmd_prep_nasa(args):
    from .pipeline import load_snapshots, prepare_bearing, rms_features

    archive = load_snapshots(args.dir, workers=args.workers)
    feats = rms_features(archive)
    prep = prepare_bearing(feats, args.ref_window, args.sigma_mult, args.test_fraction, args.seed)
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    ch = [f"rms{i + 1}" for i in range(feats.shape[1])]
    with open(os.path.join(out, "features.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["timestamp"] + ch + ["md", "label"])
        for name, row, md, lab in zip(archive.names, feats, prep.distances, prep.labels):
            w.writerow([name] + [bench.fmt(v) for v in row] + [bench.fmt(md), int(lab)])
    for split, X, y in (("train", prep.X_train, prep.y_train), ("test", prep.X_test, prep.y_test)):
        with open(os.path.join(out, f"{split}.csv"), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(ch + ["label"])
            for row, lab in zip(X, y):
                w.writerow([bench.fmt(v) for v in row] + [int(lab)])
    manifest = {
        "snapshots": len(archive),
        "channels": archive.channel_count,
        "ref_window": args.ref_window,
        "sigma_mult": args.sigma_mult,
        "threshold": prep.threshold,
        "anomalous": int(prep.labels.sum()),
        "test_fraction": args.test_fraction,
        "seed": args.seed,
        "smote_added": prep.smote_added,
        "covariance_regularized": prep.mahalanobis_ref.regularized,
        "scaler": prep.scaler.as_dict(),
    }
    with open(os.path.join(out, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2)
    print(json.dumps({k: manifest[k] for k in ("snapshots", "threshold", "anomalous", "smote_added")}))


def cmd_suite(args):
    paths = bench.run_suite(args.config, args.out or "suite_out", preset=args.preset_given, seed=args.seed_given,
                            workers=args.workers_given, record_timing=args.timings)
    print(paths["results"])


def _global_flags(default):
    # the subcommand copy uses SUPPRESS so flags given before the subcommand survive
    p = argparse.ArgumentParser(add_help=False, argument_default=default)
    p.add_argument("--seed", type=int, help="master seed (default 0)")
    p.add_argument("--workers", type=int, help="parallel worker processes")
    p.add_argument("--preset", choices=sorted(bench.PRESETS))
    p.add_argument("--out", help="output directory")
    p.add_argument("-v", "--verbose", action="store_true", default=default if default is argparse.SUPPRESS else False)
    return p


def build_parser():
    top = _global_flags(None)
    common = _global_flags(argparse.SUPPRESS)
    parser = argparse.ArgumentParser(prog="qnnspectra", parents=[top],
                                     description="QNN encoding spectra, training and benchmarks")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", parents=[common], help="frequency-spectrum table as CSV")
    sp.add_argument("--families", nargs="+", default=list(encodings.FAMILIES), choices=encodings.FAMILIES)
    sp.add_argument("--shape", nargs=2, type=int, action="append", metavar=("R", "L"))
    sp.set_defaults(func=cmd_spectrum)

    gs = sub.add_parser("gen-synthetic", parents=[common], help="random Fourier-series regression targets")
    gs.add_argument("--K", type=int, required=True)
    gs.add_argument("--count", type=int, default=100)
    gs.add_argument("--points", type=int, default=4000)
    gs.set_defaults(func=cmd_gen_synthetic, out_required=True)

    cp = sub.add_parser("capability", parents=[common], help="learning capability of one architecture")
    cp.add_argument("--family", required=True, choices=encodings.FAMILIES)
    cp.add_argument("--qubits", type=int, required=True)
    cp.add_argument("--layers", type=int, required=True)
    cp.add_argument("--K", type=int, default=4)
    cp.add_argument("--population", type=int, default=None)
    cp.add_argument("--epochs", type=int, default=None)
    cp.add_argument("--points", type=int, default=None)
    cp.add_argument("--lr", type=float, default=0.05)
    cp.set_defaults(func=cmd_capability)

    cl = sub.add_parser("classify", parents=[common], help="train a QNN classifier on feature CSVs")
    cl.add_argument("--train", required=True)
    cl.add_argument("--test", required=True)
    cl.add_argument("--family", default="exponential", choices=encodings.FAMILIES)
    cl.add_argument("--qubits", type=int, default=2)
    cl.add_argument("--layers", type=int, default=1)
    cl.add_argument("--ansatz", default="sequential", choices=["sequential", "parallel"])
    cl.add_argument("--epochs", type=int, default=None)
    cl.add_argument("--batch-size", type=int, default=64)
    cl.add_argument("--lr", type=float, default=0.005)
    cl.set_defaults(func=cmd_classify)

    pn = sub.add_parser("prep-nasa", parents=[common], help="bearing snapshots -> labeled, split, scaled CSVs")
    pn.add_argument("--dir", required=True)
    pn.add_argument("--ref-window", type=int, default=200)
    pn.add_argument("--sigma-mult", type=float, default=3.0)
    pn.add_argument("--test-fraction", type=float, default=0.2)
    pn.set_defaults(func=cmd_prep_nasa)

    su = sub.add_parser("suite", parents=[common], help="run a YAML experiment grid")
    su.add_argument("config")
    su.add_argument("--timings", action="store_true", help="fill wall_time_s (breaks byte-identical reruns)")
    su.set_defaults(func=cmd_suite)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    args.preset_given, args.seed_given, args.workers_given = args.preset, args.seed, args.workers
    args.preset = args.preset or "desk"
    args.seed = 0 if args.seed is None else args.seed
    args.workers = 1 if args.workers is None else args.workers
    if getattr(args, "out_required", False) and not args.out:
        build_parser().error(f"{args.command} needs --out")
    try:
        args.func(args)
    except QnnError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
