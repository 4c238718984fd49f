"""Command-line entry point.

Subcommands: generate, train, evaluate, ablate, sweep-unknowns and
gradcheck. Exit codes: 0 on success, 1 on invalid configuration or input
data, 2 on a runtime or numerical failure (including a failed gradient
check).
"""
import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from unida.classifier.predictions import write_predictions
from unida.configurator import ExperimentConfig, dump_config
from unida.data.dataset import LabeledDataset, LabelSplit
from unida.data.io import read_dataset, write_dataset
from unida.data.synth import generate, make_shift
from unida.gradcheck import run_gradcheck
from unida.losses.log import write_loss_log
from unida.metrics.open_set import evaluate, format_report
from unida.metrics.records import write_metrics
from unida.nn.checkpoint import load_checkpoint, save_checkpoint
from unida.registries import ABLATION_REGISTRY
from unida.trainer import SOURCE_ONLY, predict, shared_classes, train
from unida.utils import (ConfigError, DatasetFormatError,
                         DegenerateFeatureError, ForwardPassError,
                         MemoryBankError, MetricError, NumericalError,
                         derive_seed, get_logger, setup_logging)
from unida.version import __version__

logger = get_logger('unida.cli')

CONFIG_ECHO = 'config.yaml'
CHECKPOINT = 'checkpoint.npz'
LOSS_LOG = 'loss_log.csv'
PREDICTIONS = 'predictions.csv'
METRICS_JSON = 'metrics.json'
SOURCE_FILE = 'source.csv'
TARGET_FILE = 'target.csv'
ABLATION_TABLE = 'ablation.csv'
SWEEP_TABLE = 'sweep_unknowns.csv'
TABLE_METRICS = ('hos', 'acc_kn', 'acc_unk')

EXIT_OK, EXIT_INVALID, EXIT_FAILURE = 0, 1, 2
RUNTIME_ERRORS = (NumericalError, DegenerateFeatureError, ForwardPassError,
                  MemoryBankError, MetricError)
VALIDATION_ERRORS = (ConfigError, DatasetFormatError, OSError, ValueError,
                     KeyError)


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    """Config file (or defaults) with the command-line overrides applied."""
    cfg = ExperimentConfig.fromfile(args.config) \
        if args.config else ExperimentConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.output_dir = args.out
    return cfg


def echo_config(cfg: ExperimentConfig, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    dump_config(cfg.to_dict(), str(out_dir / CONFIG_ECHO), 'yaml')


def config_split(cfg: ExperimentConfig) -> LabelSplit:
    if not cfg.data.is_synthetic:
        raise ConfigError('This command needs data.synthetic, not dataset '
                          'paths.')
    return cfg.data.synthetic.label_split()


def iteration_budget(cfg: ExperimentConfig, split: LabelSplit) -> int:
    """Iterations per epoch of ``split`` under the default rule."""
    spc = cfg.data.synthetic.shift.samples_per_class
    n_source = split.num_source_classes * spc
    n_target = (split.n_shared + split.n_target_private) * spc
    return math.ceil(max(n_source, n_target) / cfg.train.batch_size)


def synthesize(cfg: ExperimentConfig, split: LabelSplit,
               seed: int) -> Tuple[LabeledDataset, LabeledDataset]:
    """Source and target domains of ``split`` from the data seed stream."""
    s = cfg.data.synthetic.shift
    data_seed = derive_seed(seed, 'data')
    shift = make_shift(split,
                       input_dim=s.input_dim,
                       samples_per_class=s.samples_per_class,
                       radius=s.radius,
                       layout=s.layout,
                       covariance_scale=s.covariance_scale,
                       rotation_deg=s.rotation_deg,
                       translation=s.translation,
                       seed=data_seed)
    return generate(split, shift)


def load_domains(cfg: ExperimentConfig,
                 seed: int) -> Tuple[LabeledDataset, LabeledDataset]:
    if cfg.data.is_synthetic:
        return synthesize(cfg, config_split(cfg), seed)
    source = read_dataset(cfg.data.source_path)
    target = read_dataset(cfg.data.target_path)
    if source.domain != 'source' or target.domain != 'target':
        raise DatasetFormatError(
            f'Expected a source and a target file, got {source.domain} and '
            f'{target.domain}.')
    return source, target


def split_summary(split: LabelSplit, source: LabeledDataset,
                  target: LabeledDataset) -> str:
    """Realized label-set division, recomputed from the generated labels."""
    src, tgt = source.classes(), target.classes()
    return (f'|Ls∩Lt| = {len(src & tgt)}  |Ls-Lt| = {len(src - tgt)}  '
            f'|Lt-Ls| = {len(tgt - src)}  (K = {split.num_source_classes}, '
            f'{len(source)} source / {len(target)} target samples)')


def cmd_generate(cfg: ExperimentConfig) -> int:
    split = config_split(cfg)
    out = Path(cfg.output_dir)
    source, target = synthesize(cfg, split, cfg.seed)
    write_dataset(source, out / SOURCE_FILE)
    write_dataset(target, out / TARGET_FILE)
    echo_config(cfg, out)
    print(split_summary(split, source, target))
    logger.info('Wrote %s and %s', out / SOURCE_FILE, out / TARGET_FILE)
    return EXIT_OK


def _warm_start(cfg: ExperimentConfig):
    if cfg.model.init_checkpoint is None:
        return None
    params, head, _ = load_checkpoint(cfg.model.init_checkpoint)
    return params, head


def cmd_train(cfg: ExperimentConfig, progress: bool = True) -> int:
    out = Path(cfg.output_dir)
    echo_config(cfg, out)
    source, target = load_domains(cfg, cfg.seed)
    result = train(source, target, cfg.to_train_config(),
                   init=_warm_start(cfg), progress=progress)

    save_checkpoint(out / CHECKPOINT, result.params, result.head,
                    bank=result.bank)
    write_loss_log(result.loss_log, out / LOSS_LOG)
    write_metrics(result.history, out)
    write_predictions(out / PREDICTIONS, target.ids,
                      predict(result.params, result.head, target.features))
    if result.history:
        logger.info('Final: %s', format_report(result.history[-1]))
    logger.info('Artifacts written to %s', out)
    return EXIT_OK


def cmd_evaluate(cfg: ExperimentConfig) -> int:
    out = Path(cfg.output_dir)
    checkpoint = cfg.evaluate.checkpoint or str(out / CHECKPOINT)
    params, head, _ = load_checkpoint(checkpoint)
    source, target = load_domains(cfg, cfg.seed)
    if params.input_dim != target.input_dim:
        raise ValueError(f'Checkpoint expects {params.input_dim} input '
                         f'columns, the target has {target.input_dim}.')
    decisions = predict(params, head, target.features)
    write_predictions(out / PREDICTIONS, target.ids, decisions)
    report = evaluate(decisions, target.labels,
                      shared_classes(source, target))
    with open(out / METRICS_JSON, 'w') as f:
        json.dump(report.to_dict(), f, indent=4)
    print(format_report(report))
    return EXIT_OK


def run_point(cfg_dict: Dict[str, Any], split: Optional[Tuple[int, int,
                                                               int]],
              disabled: Sequence[str], seed: int,
              out_dir: str) -> Dict[str, float]:
    """Train one sweep or ablation point in ``out_dir``; final metrics.

    Takes and returns plain values so it can run in a worker process.
    """
    cfg = ExperimentConfig.from_dict(cfg_dict)
    if split is None:
        source, target = load_domains(cfg, seed)
    else:
        source, target = synthesize(cfg, LabelSplit(*split), seed)
    result = train(source, target,
                   cfg.to_train_config(seed=seed, disabled=tuple(disabled)),
                   init=_warm_start(cfg))
    write_loss_log(result.loss_log, Path(out_dir) / LOSS_LOG)
    write_metrics(result.history, out_dir)
    return result.history[-1].to_dict()


def _run_points(points: List[Tuple], jobs: int) -> List[Dict[str, float]]:
    if jobs <= 1:
        return [run_point(*p) for p in points]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(run_point, *p) for p in points]
        return [f.result() for f in futures]


def _mean_metrics(records: Sequence[Dict[str, float]]) -> Dict[str, float]:
    return {
        name: float(np.mean([r[name] for r in records]))
        for name in TABLE_METRICS
    }


def _spread(column: pd.Series) -> float:
    return float(column.max() - column.min())


def _slug(label: str) -> str:
    return label.replace('w/o ', 'wo_').replace('+', '_').replace(' ', '_')


def _seeds(cfg: ExperimentConfig) -> List[int]:
    return [cfg.seed + r for r in range(cfg.sweep.repeats)]


def write_table(frame: pd.DataFrame, filename: Path) -> None:
    frame.to_csv(filename, index=False, float_format='%.1f')
    print(frame.to_string(index=False, float_format=lambda x: f'{x:.1f}'))


def cmd_ablate(cfg: ExperimentConfig) -> int:
    out = Path(cfg.output_dir)
    echo_config(cfg, out)
    cfg_dict = cfg.to_dict()
    seeds = _seeds(cfg)
    variants = [(name, ABLATION_REGISTRY.get(name))
                for name in cfg.ablation.variant_names()]
    points, keys = [], []
    for label, disabled in variants:
        for seed in seeds:
            point_dir = out / _slug(label) / f'seed_{seed}'
            point_dir.mkdir(parents=True, exist_ok=True)
            points.append((cfg_dict, None, disabled, seed, str(point_dir)))
            keys.append(label)
    results = _run_points(points, cfg.sweep.jobs)

    rows = []
    for label, _ in variants:
        records = [r for k, r in zip(keys, results) if k == label]
        rows.append({'variant': label, **_mean_metrics(records)})
    frame = pd.DataFrame(rows, columns=['variant', *TABLE_METRICS])
    write_table(frame, out / ABLATION_TABLE)
    return EXIT_OK


def cmd_sweep_unknowns(cfg: ExperimentConfig) -> int:
    out = Path(cfg.output_dir)
    echo_config(cfg, out)
    base = config_split(cfg)
    cfg_dict = cfg.to_dict()
    # Every point trains for the base split's budget, so only the label
    # shift changes along the sweep.
    if cfg.train.iterations_per_epoch is None:
        budget = iteration_budget(cfg, base)
        cfg_dict['train']['iterations_per_epoch'] = budget
        logger.info('Sweep points train for %d iterations per epoch', budget)
    seeds = _seeds(cfg)
    methods = [('adapted', cfg.ablation.disabled())]
    if cfg.sweep.baseline:
        methods.append(('source_only', ABLATION_REGISTRY.get(SOURCE_ONLY)))

    points, keys = [], []
    for n in cfg.sweep.target_private:
        split = replace(base, n_target_private=n)
        for method, disabled in methods:
            for seed in seeds:
                point_dir = out / f'n{n}' / method / f'seed_{seed}'
                point_dir.mkdir(parents=True, exist_ok=True)
                points.append((cfg_dict, (split.n_shared,
                                          split.n_source_private, n),
                               disabled, seed, str(point_dir)))
                keys.append((n, method))
    results = _run_points(points, cfg.sweep.jobs)

    rows = []
    for n in cfg.sweep.target_private:
        row = {
            'n_shared': base.n_shared,
            'n_source_private': base.n_source_private,
            'n_target_private': n,
        }
        for method, _ in methods:
            means = _mean_metrics(
                [r for k, r in zip(keys, results) if k == (n, method)])
            if method == 'adapted':
                row.update(means)
            else:
                row['hos_source_only'] = means['hos']
        rows.append(row)
    frame = pd.DataFrame(rows)
    write_table(frame, out / SWEEP_TABLE)
    if cfg.sweep.baseline and len(rows) > 1:
        logger.info('HOS range: %.1f (method) vs %.1f (source only)',
                    _spread(frame['hos']), _spread(frame['hos_source_only']))
    return EXIT_OK


def cmd_gradcheck(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else 0
    report = run_gradcheck(draws=args.draws, seed=seed,
                           perturbation=args.perturb)
    for line in report.lines():
        print(line)
    print()
    print(report.composite_line())
    if not report.passed:
        logger.error('Gradient check failed for %s',
                     ', '.join(report.failures))
        return EXIT_FAILURE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='Experiment config file '
                        '(.yaml, .yml, .json or .py)')
    common.add_argument('--seed', type=int, help='Override the root seed')
    common.add_argument('--out', help='Override the output directory')
    common.add_argument('--quiet', action='store_true',
                        help='Only log warnings and hide progress bars')

    parser = argparse.ArgumentParser(
        prog='unida', description='Universal domain adaptation on synthetic '
        'domain-shift benchmarks.')
    parser.add_argument('--version', action='version',
                        version=f'%(prog)s {__version__}')
    sub = parser.add_subparsers(dest='command', required=True)
    sub.add_parser('generate', parents=[common],
                   help='Write a synthetic source/target pair')
    sub.add_parser('train', parents=[common],
                   help='Train and write checkpoint, logs and metrics')
    sub.add_parser('evaluate', parents=[common],
                   help='Score a checkpoint on the target domain')
    sub.add_parser('ablate', parents=[common],
                   help='Train every loss ablation variant')
    sub.add_parser('sweep-unknowns', parents=[common],
                   help='HOS against the number of target-private classes')
    grad = sub.add_parser('gradcheck', parents=[common],
                          help='Finite-difference check of the gradients')
    grad.add_argument('--draws', type=int, default=100,
                      help='Random draws (default: 100)')
    grad.add_argument('--perturb', type=float, default=0.0,
                      help='Error added to the analytic gradients')
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(quiet=args.quiet)
    try:
        if args.command == 'gradcheck':
            if args.draws < 1:
                raise ValueError('--draws must be >= 1.')
            return cmd_gradcheck(args)
        cfg = load_config(args)
        if args.command == 'generate':
            return cmd_generate(cfg)
        if args.command == 'train':
            return cmd_train(cfg, progress=not args.quiet)
        if args.command == 'evaluate':
            return cmd_evaluate(cfg)
        if args.command == 'ablate':
            return cmd_ablate(cfg)
        return cmd_sweep_unknowns(cfg)
    except RUNTIME_ERRORS as e:
        logger.error('%s: %s', type(e).__name__, e)
        return EXIT_FAILURE
    except VALIDATION_ERRORS as e:
        logger.error('%s: %s', type(e).__name__, e)
        return EXIT_INVALID


if __name__ == '__main__':
    sys.exit(main())
