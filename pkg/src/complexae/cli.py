"""Command line interface.

Subcommands cover the whole workflow: materialize a dataset, train an
autoencoder, reconstruct digits from a checkpoint, demonstrate the
spectral phase swap, verify gradients numerically, and run the
stability and phase-weight studies.

Exit codes: 0 on success, 1 when an operation ran but failed its check
(gradient tolerance exceeded, divergence under ``--strict``), 2 for
configuration and data errors.
"""

import argparse
import os
import sys

import numpy as np

from . import __version__
from .backend import backend_name
from .dataio import (DATA_DIR_ENV, IMAGES_BASENAME, LABELS_BASENAME,
                     resolve_dataset, synthesize_dataset, write_idx_images,
                     write_idx_labels, write_run_csv)
from .errors import ComplexAEError, ConfigError, DivergenceError
from .gradcheck import check_network_gradients
from .losses import CostKind
from .network import init_xavier, load_checkpoint, save_checkpoint
from .spectra import phase_swap, psnr, write_pgm
from .trainer import ExperimentConfig, compare_stability, sweep_alpha, train

_CONFIG_FLAGS = ("codec", "scale", "cost", "alpha", "beta", "mode", "activation",
                 "hidden", "lr", "epochs", "per_class", "seed", "data_seed",
                 "log_every")


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value config file; flags override it")
    p.add_argument("--codec", choices=("pixel-pair", "half-spectrum"))
    p.add_argument("--scale", type=float, help="codec coefficient scale")
    p.add_argument("--cost", choices=("mse", "normalized-mse", "phase-amplitude"))
    p.add_argument("--alpha", type=float, help="phase weight of the phase-amplitude cost")
    p.add_argument("--beta", type=float, help="normalization floor")
    p.add_argument("--mode", choices=("widely", "strictly"))
    p.add_argument("--activation", choices=("arctan", "split-arctan", "identity"))
    p.add_argument("--hidden", type=int,
                   help="hidden width in strictly linear terms (widely uses half)")
    p.add_argument("--lr", type=float)
    p.add_argument("--epochs", type=int)
    p.add_argument("--per-class", dest="per_class", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--data-seed", dest="data_seed", type=int)
    p.add_argument("--log-every", dest="log_every", type=int)


def _build_config(args) -> ExperimentConfig:
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as f:
            cfg = ExperimentConfig.from_text(f.read())
    else:
        cfg = ExperimentConfig()
    overrides = {name: getattr(args, name) for name in _CONFIG_FLAGS
                 if getattr(args, name, None) is not None}
    if overrides:
        from dataclasses import replace
        cfg = replace(cfg, **overrides)
    return cfg


def _load_data(args, cfg: ExperimentConfig):
    images, labels, source = resolve_dataset(
        data_dir=getattr(args, "data_dir", None),
        per_class=cfg.per_class, seed=cfg.data_seed)
    print(f"dataset: {source} ({images.shape[0]} images)")
    return images, labels


def _cmd_train(args) -> int:
    cfg = _build_config(args)
    images, labels = _load_data(args, cfg)
    net, log = train(cfg, images, labels)
    if args.out:
        write_run_csv(args.out, log)
        print(f"log written to {args.out}")
    if args.checkpoint:
        save_checkpoint(net, args.checkpoint)
        print(f"checkpoint written to {args.checkpoint}")
    if log.diverged_at is not None:
        print(f"diverged at epoch {log.diverged_at}")
        if args.strict:
            return 1
    else:
        print(f"final cost {log.final_cost:.6g}, psnr {log.final_psnr:.2f} dB")
    return 0


def _cmd_reconstruct(args) -> int:
    cfg = _build_config(args)
    net = load_checkpoint(args.checkpoint)
    codec = cfg.build_codec()
    if codec.width != net.dims[0]:
        raise ConfigError(
            f"codec width {codec.width} does not match network input {net.dims[0]}")
    images, _ = _load_data(args, cfg)
    if not 0 <= args.index < images.shape[0]:
        raise ConfigError(f"index {args.index} outside dataset of {images.shape[0]}")
    original = images[args.index]
    recon = codec.decode(net.forward(codec.encode(original)))
    print(f"psnr {psnr(original, recon):.2f} dB")
    if args.out_prefix:
        write_pgm(f"{args.out_prefix}-original.pgm", original)
        write_pgm(f"{args.out_prefix}-recon.pgm", recon)
        print(f"wrote {args.out_prefix}-original.pgm and {args.out_prefix}-recon.pgm")
    return 0


def _cmd_phaseswap(args) -> int:
    cfg = _build_config(args)
    images, _ = _load_data(args, cfg)
    n = images.shape[0]
    for idx in (args.magnitude_index, args.phase_index):
        if not 0 <= idx < n:
            raise ConfigError(f"index {idx} outside dataset of {n}")
    mag_src = images[args.magnitude_index]
    phase_src = images[args.phase_index]
    swapped = phase_swap(mag_src, phase_src)
    print(f"psnr against magnitude donor {psnr(mag_src, swapped):.2f} dB")
    print(f"psnr against phase donor     {psnr(phase_src, swapped):.2f} dB")
    if args.out_prefix:
        for name, img in (("magnitude", mag_src), ("phase", phase_src),
                          ("swapped", np.clip(swapped, 0.0, 1.0))):
            write_pgm(f"{args.out_prefix}-{name}.pgm", img)
        print(f"wrote {args.out_prefix}-{{magnitude,phase,swapped}}.pgm")
    return 0


def _cmd_gradcheck(args) -> int:
    cfg = _build_config(args)
    dims = [int(w) for w in args.widths.split(",")]
    net = init_xavier(dims, activations=cfg.activation, mode=cfg.mode, seed=cfg.seed)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(cfg.seed)))
    x = (rng.uniform(-1, 1, (args.batch, dims[0]))
         + 1j * rng.uniform(-1, 1, (args.batch, dims[0])))
    kind = CostKind(tag=cfg.cost, alpha=cfg.alpha, beta=cfg.beta)
    report = check_network_gradients(net, kind, x, h=args.h)
    print(report.summary())
    if not report.ok(args.tol):
        print(f"FAIL: worst relative error exceeds {args.tol:g}")
        return 1
    print(f"OK: all gradients within {args.tol:g}")
    return 0


def _cmd_stability(args) -> int:
    cfg = _build_config(args)
    images, labels = _load_data(args, cfg)
    ladder = tuple(float(v) for v in args.lrs.split(","))
    seeds = tuple(int(v) for v in args.seeds.split(","))
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
    report = compare_stability(cfg, ladder=ladder, seeds=seeds,
                               images=images, labels=labels, out_dir=args.out_dir)
    print(report.summary())
    return 0


def _cmd_sweep_alpha(args) -> int:
    cfg = _build_config(args)
    images, labels = _load_data(args, cfg)
    alphas = tuple(float(v) for v in args.alphas.split(","))
    seeds = tuple(int(v) for v in args.seeds.split(","))
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
    report = sweep_alpha(cfg, alphas=alphas, seeds=seeds,
                         images=images, labels=labels, out_dir=args.out_dir)
    print(report.summary())
    return 0


def _cmd_fetch_data(args) -> int:
    data_dir = args.data_dir or os.environ.get(DATA_DIR_ENV) or "data"
    os.makedirs(data_dir, exist_ok=True)
    ip = os.path.join(data_dir, IMAGES_BASENAME)
    lp = os.path.join(data_dir, LABELS_BASENAME)
    if os.path.exists(ip) and os.path.exists(lp):
        print(f"dataset already present in {data_dir}")
        return 0
    images, labels = synthesize_dataset(per_class=args.per_class, seed=args.data_seed)
    write_idx_images(ip, np.clip(np.rint(images * 255.0), 0, 255).astype(np.uint8))
    write_idx_labels(lp, labels)
    print(f"no digit files found; wrote {10 * args.per_class} synthetic digits "
          f"to {data_dir}")
    print(f"(drop real {IMAGES_BASENAME} / {LABELS_BASENAME} there to use them instead)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="complexae",
        description="Complex-valued autoencoder experiments on digit spectra.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__} ({backend_name()} backend)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train one autoencoder and log its run")
    _add_config_flags(p)
    p.add_argument("--data-dir", help=f"IDX directory (default: ${DATA_DIR_ENV})")
    p.add_argument("--out", help="run log CSV path")
    p.add_argument("--checkpoint", help="checkpoint output path")
    p.add_argument("--strict", action="store_true",
                   help="exit nonzero if training diverges")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("reconstruct", help="reconstruct a digit from a checkpoint")
    _add_config_flags(p)
    p.add_argument("--data-dir", help=f"IDX directory (default: ${DATA_DIR_ENV})")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--index", type=int, default=0, help="dataset index to reconstruct")
    p.add_argument("--out-prefix", help="write PGM images with this prefix")
    p.set_defaults(func=_cmd_reconstruct)

    p = sub.add_parser("phaseswap",
                       help="swap spectral magnitude and phase between two digits")
    _add_config_flags(p)
    p.add_argument("--data-dir", help=f"IDX directory (default: ${DATA_DIR_ENV})")
    p.add_argument("--magnitude-index", type=int, default=0)
    p.add_argument("--phase-index", type=int, default=1)
    p.add_argument("--out-prefix", help="write PGM images with this prefix")
    p.set_defaults(func=_cmd_phaseswap)

    p = sub.add_parser("gradcheck", help="verify gradients by central differences")
    _add_config_flags(p)
    p.add_argument("--widths", default="6,4,6", help="comma-separated layer widths")
    p.add_argument("--batch", type=int, default=3)
    p.add_argument("--h", type=float, default=1e-6, help="finite-difference step")
    p.add_argument("--tol", type=float, default=1e-6, help="relative error tolerance")
    p.set_defaults(func=_cmd_gradcheck)

    p = sub.add_parser("stability",
                       help="learning-rate ladder: strictly vs widely linear")
    _add_config_flags(p)
    p.add_argument("--data-dir", help=f"IDX directory (default: ${DATA_DIR_ENV})")
    p.add_argument("--lrs", default="0.003,0.005,0.006,0.01")
    p.add_argument("--seeds", default="0,1,2")
    p.add_argument("--out-dir", help="write per-run CSVs here")
    p.set_defaults(func=_cmd_stability)

    p = sub.add_parser("sweep-alpha", help="sweep the phase weight of the "
                                           "phase-amplitude cost")
    _add_config_flags(p)
    p.add_argument("--data-dir", help=f"IDX directory (default: ${DATA_DIR_ENV})")
    p.add_argument("--alphas", default="0.5,1,2,4")
    p.add_argument("--seeds", default="0,1,2")
    p.add_argument("--out-dir", help="write per-run CSVs here")
    p.set_defaults(func=_cmd_sweep_alpha)

    p = sub.add_parser("fetch-data",
                       help="materialize the digit dataset in a local directory")
    p.add_argument("--data-dir", help=f"target directory (default: ${DATA_DIR_ENV} or ./data)")
    p.add_argument("--per-class", dest="per_class", type=int, default=250)
    p.add_argument("--data-seed", dest="data_seed", type=int, default=0)
    p.set_defaults(func=_cmd_fetch_data)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ComplexAEError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
