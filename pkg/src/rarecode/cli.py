"""Command-line surface: learn, enhance, saliency, itti, dict-atlas, eval-synthetic.

Exit status: 0 success, 1 usage error, 2 I/O or parse error, 3 contract
violation. Diagnostics go to stderr; output files are written to a
temporary name and renamed into place so no partial file is ever left
behind.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from .coder import CoderConfig
from .errors import ContractViolationError, DictionaryFormatError, PgmError
from .imageio import read_pgm, to_patches, write_pgm
from .ksvd import LearnConfig, dictionary_to_bytes, dictionary_from_bytes, learn
from .pipeline import PipelineConfig, enhance, itti_lite, saliency_map
from .rarity import RARITY_KINDS, TRANSFORM_KINDS, RarityMeasure, TransformSpec
from .synthetic import anomaly_benchmark


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); we own the exit codes
        raise _UsageError(message)


def _pipeline_flags() -> _Parser:
    parent = _Parser(add_help=False)
    grp = parent.add_argument_group("pipeline")
    grp.add_argument("--block", type=int, default=8, help="block side in pixels")
    grp.add_argument("--K", type=int, default=256, help="dictionary atom count")
    grp.add_argument("--iters", type=int, default=20, help="learning alternations")
    grp.add_argument("--seed", type=int, default=0, help="seed for all randomized choices")
    grp.add_argument("--init", choices=("sample_patches", "random_gaussian"),
                     default="sample_patches")
    grp.add_argument("--coder", choices=("omp", "ista"), default="omp")
    grp.add_argument("--T", type=int, default=8, help="atoms per patch (omp)")
    grp.add_argument("--residual-tol", type=float, default=1e-6)
    grp.add_argument("--alpha", type=float, default=0.1, help="l1 weight (ista)")
    grp.add_argument("--ista-max-iter", type=int, default=200)
    grp.add_argument("--ista-obj-tol", type=float, default=1e-6)
    grp.add_argument("--measure", choices=RARITY_KINDS, default="count_fraction")
    grp.add_argument("--scale-S", type=float, default=None,
                     help="rarity scale constant (default: patch count)")
    grp.add_argument("--epsilon", type=float, default=1e-12)
    grp.add_argument("--transform", choices=TRANSFORM_KINDS, default="identity")
    grp.add_argument("--sigmoid-a", type=float, default=10.0)
    grp.add_argument("--sigmoid-b", type=float, default=0.5)
    grp.add_argument("--gamma-g", type=float, default=0.5)
    grp.add_argument("--affine-scale", type=float, default=1.0)
    grp.add_argument("--affine-offset", type=float, default=0.0)
    grp.add_argument("--dc-remove", action="store_true")
    grp.add_argument("--blur-sigma", type=float, default=2.0)
    grp.add_argument("--print-config", action="store_true",
                     help="print the resolved configuration and exit")
    return parent


def _build_parser() -> _Parser:
    parser = _Parser(prog="rarecode",
                     description="Dictionary-learning image enhancement and rarity saliency")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    flags = _pipeline_flags()

    p = sub.add_parser("learn", parents=[flags],
                       help="learn a dictionary from a PGM image")
    p.add_argument("--in", dest="input", help="input PGM path")
    p.add_argument("--dict", dest="dict_path", help="output dictionary path")

    p = sub.add_parser("enhance", parents=[flags],
                       help="rarity-reweighted reconstruction of a PGM image")
    p.add_argument("--in", dest="input")
    p.add_argument("--out", dest="output")

    p = sub.add_parser("saliency", parents=[flags],
                       help="rarity saliency map of a PGM image")
    p.add_argument("--in", dest="input")
    p.add_argument("--out", dest="output")

    p = sub.add_parser("itti", help="center-surround baseline saliency map")
    p.add_argument("--in", dest="input")
    p.add_argument("--out", dest="output")

    p = sub.add_parser("dict-atlas", help="tile dictionary atoms into a PGM")
    p.add_argument("--dict", dest="dict_path")
    p.add_argument("--out", dest="output")

    p = sub.add_parser("eval-synthetic", help="seeded anomaly-detection benchmark")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)

    return parser


def _atomic_write(path, data: bytes) -> None:
    target = Path(path)
    tmp = target.with_name(f".{target.name}.{os.getpid()}.tmp")
    try:
        with open(tmp, "wb") as fh:
            fh.write(data)
        os.replace(tmp, target)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _read_image(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return read_pgm(fh.read())


def _require(args, *names) -> None:
    for name in names:
        if getattr(args, name) is None:
            flag = {"input": "--in", "output": "--out", "dict_path": "--dict"}[name]
            raise _UsageError(f"{flag} is required")


def _config_from_args(args) -> PipelineConfig:
    coder = CoderConfig(
        mode=args.coder,
        T=args.T,
        residual_tol=args.residual_tol,
        alpha=args.alpha,
        max_iter=args.ista_max_iter,
        obj_tol=args.ista_obj_tol,
    )
    learn_cfg = LearnConfig(K=args.K, iters=args.iters, coder=coder,
                            seed=args.seed, init=args.init)
    measure = RarityMeasure(kind=args.measure, S=args.scale_S, epsilon=args.epsilon)
    tf = TransformSpec(kind=args.transform, a=args.sigmoid_a, b=args.sigmoid_b,
                       g=args.gamma_g, scale=args.affine_scale, offset=args.affine_offset)
    return PipelineConfig(learn=learn_cfg, measure=measure, transform=tf,
                          dc_remove=args.dc_remove,
                          saliency_blur_sigma=args.blur_sigma, block=args.block)


def _print_config(cfg: PipelineConfig, command: str) -> None:
    lines = [
        f"command={command}",
        f"block={cfg.block}",
        f"K={cfg.learn.K}",
        f"iters={cfg.learn.iters}",
        f"seed={cfg.learn.seed}",
        f"init={cfg.learn.init}",
        f"coder={cfg.learn.coder.mode}",
        f"T={cfg.learn.coder.T}",
        f"residual_tol={cfg.learn.coder.residual_tol}",
        f"alpha={cfg.learn.coder.alpha}",
        f"ista_max_iter={cfg.learn.coder.max_iter}",
        f"ista_obj_tol={cfg.learn.coder.obj_tol}",
        f"measure={cfg.measure.kind}",
        f"S={'auto' if cfg.measure.S is None else cfg.measure.S}",
        f"epsilon={cfg.measure.epsilon}",
        f"transform={cfg.transform.kind}",
        f"sigmoid_a={cfg.transform.a}",
        f"sigmoid_b={cfg.transform.b}",
        f"gamma_g={cfg.transform.g}",
        f"affine_scale={cfg.transform.scale}",
        f"affine_offset={cfg.transform.offset}",
        f"dc_remove={'true' if cfg.dc_remove else 'false'}",
        f"blur_sigma={cfg.saliency_blur_sigma}",
    ]
    print("\n".join(lines))


def _cmd_learn(args) -> int:
    cfg = _config_from_args(args)
    if args.print_config:
        _print_config(cfg, "learn")
        return 0
    _require(args, "input", "dict_path")
    img = _read_image(args.input)
    patches, _ = to_patches(img, cfg.block)
    dictionary, _, report = learn(patches, cfg.learn)
    _atomic_write(args.dict_path, dictionary_to_bytes(dictionary))
    print(f"n={dictionary.shape[0]}")
    print(f"N={patches.shape[1]}")
    print(f"K={dictionary.shape[1]}")
    for i, (obj, rep) in enumerate(
        zip(report.objective_per_iter, report.atoms_replaced_per_iter), start=1
    ):
        print(f"iter={i} objective={obj:.6e} atoms_replaced={rep}")
    print(f"final_psnr={report.final_psnr:.4f}")
    return 0


def _cmd_enhance(args) -> int:
    cfg = _config_from_args(args)
    if args.print_config:
        _print_config(cfg, "enhance")
        return 0
    _require(args, "input", "output")
    img = _read_image(args.input)
    result = enhance(img, cfg)
    _atomic_write(args.output, write_pgm(result.image))
    return 0


def _cmd_saliency(args) -> int:
    cfg = _config_from_args(args)
    if args.print_config:
        _print_config(cfg, "saliency")
        return 0
    _require(args, "input", "output")
    img = _read_image(args.input)
    _atomic_write(args.output, write_pgm(saliency_map(img, cfg)))
    return 0


def _cmd_itti(args) -> int:
    _require(args, "input", "output")
    img = _read_image(args.input)
    _atomic_write(args.output, write_pgm(itti_lite(img)))
    return 0


def _cmd_dict_atlas(args) -> int:
    _require(args, "dict_path", "output")
    with open(args.dict_path, "rb") as fh:
        dictionary = dictionary_from_bytes(fh.read())
    n, K = dictionary.shape
    side = math.isqrt(n)
    if side * side != n:
        raise ContractViolationError(f"atom dimension {n} is not a square block")
    grid_cols = math.isqrt(K - 1) + 1  # ceil(sqrt(K))
    grid_rows = -(-K // grid_cols)
    atlas = np.zeros((grid_rows * side, grid_cols * side))
    for k in range(K):
        atom = dictionary[:, k].reshape(side, side)
        span = float(atom.max() - atom.min())
        # constant atoms render mid-gray rather than dividing by zero
        tile = np.full_like(atom, 0.5) if span <= 1e-12 else (atom - atom.min()) / span
        r, c = divmod(k, grid_cols)
        atlas[r * side : (r + 1) * side, c * side : (c + 1) * side] = tile
    _atomic_write(args.output, write_pgm(atlas))
    return 0


def _cmd_eval_synthetic(args) -> int:
    metrics = anomaly_benchmark(seed=args.seed, trials=args.trials)
    print(f"trials={metrics['trials']}")
    print(f"anomaly_hit_rate={metrics['anomaly_hit_rate']}")
    print(f"mean_auc={metrics['mean_auc']}")
    return 0


_HANDLERS = {
    "learn": _cmd_learn,
    "enhance": _cmd_enhance,
    "saliency": _cmd_saliency,
    "itti": _cmd_itti,
    "dict-atlas": _cmd_dict_atlas,
    "eval-synthetic": _cmd_eval_synthetic,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise _UsageError("a subcommand is required")
        return _HANDLERS[args.command](args)
    except _UsageError as exc:
        print(f"rarecode: {exc}", file=sys.stderr)
        return 1
    except (OSError, PgmError, DictionaryFormatError) as exc:
        print(f"rarecode: {exc}", file=sys.stderr)
        return 2
    except ContractViolationError as exc:
        print(f"rarecode: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
