import io
import json
import tempfile
import unittest
from contextlib import redirect_stdout
from pathlib import Path

import pandas as pd
import yaml

from unida.cli import build_parser, main
from unida.configurator import ExperimentConfig
from unida.metrics import read_metrics


def _tiny_config(out_dir, **sections):
    config = {
        'seed': 2,
        'output_dir': str(out_dir),
        'data': {
            'synthetic': {
                'split': {
                    'n_shared': 2,
                    'n_source_private': 1,
                    'n_target_private': 1
                },
                'shift': {
                    'input_dim': 3,
                    'samples_per_class': 4
                }
            }
        },
        'model': {
            'depth': 1,
            'width': 6,
            'feature_dim': 4
        },
        'train': {
            'batch_size': 6,
            'epochs': 1
        },
    }
    for key, value in sections.items():
        if key == 'data':
            config[key] = value
        else:
            config.setdefault(key, {}).update(value)
    return config


class CLITestCase(unittest.TestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def write_config(self, name='config.yaml', **sections):
        out_dir = self.tmp / name.split('.')[0]
        path = self.tmp / name
        with open(path, 'w') as f:
            yaml.safe_dump(_tiny_config(out_dir, **sections), f)
        return str(path), out_dir

    def run_cli(self, *argv):
        stdout = io.StringIO()
        with redirect_stdout(stdout):
            code = main(list(argv) + ['--quiet'])
        return code, stdout.getvalue()


class TestParser(unittest.TestCase):

    def test_subcommands(self):
        parser = build_parser()
        for command in ('generate', 'train', 'evaluate', 'ablate',
                        'sweep-unknowns', 'gradcheck'):
            args = parser.parse_args([command, '--seed', '4'])
            self.assertEqual(args.command, command)
            self.assertEqual(args.seed, 4)
        self.assertEqual(parser.parse_args(['gradcheck']).draws, 100)

    def test_command_required(self):
        with self.assertRaises(SystemExit), redirect_stdout(io.StringIO()):
            build_parser().parse_args([])


class TestGenerate(CLITestCase):

    def test_preset_summary(self):
        config, _ = self.write_config(
            data={
                'synthetic': {
                    'preset': 'office31_unida',
                    'shift': {
                        'input_dim': 3,
                        'samples_per_class': 2
                    }
                }
            })
        out = self.tmp / 'gen'
        code, text = self.run_cli('generate', '--config', config, '--out',
                                  str(out))
        self.assertEqual(code, 0)
        self.assertIn('|Ls∩Lt| = 10', text)
        self.assertIn('|Ls-Lt| = 10', text)
        self.assertIn('|Lt-Ls| = 11', text)
        self.assertTrue((out / 'source.csv').exists())
        self.assertTrue((out / 'target.csv').exists())
        echoed = ExperimentConfig.fromfile(str(out / 'config.yaml'))
        self.assertEqual(echoed.data.synthetic.preset, 'office31_unida')

    def test_same_seed_same_files(self):
        config, _ = self.write_config()
        first, second = self.tmp / 'a', self.tmp / 'b'
        self.run_cli('generate', '--config', config, '--out', str(first))
        self.run_cli('generate', '--config', config, '--out', str(second))
        for name in ('source.csv', 'target.csv'):
            self.assertEqual((first / name).read_bytes(),
                             (second / name).read_bytes())

    def test_paths_rejected(self):
        config, _ = self.write_config(data={
            'source_path': 's.csv',
            'target_path': 't.csv'
        })
        code, _ = self.run_cli('generate', '--config', config)
        self.assertEqual(code, 1)


class TestTrainEvaluate(CLITestCase):

    def test_artifacts(self):
        config, out = self.write_config()
        code, _ = self.run_cli('train', '--config', config)
        self.assertEqual(code, 0)
        for name in ('checkpoint.npz', 'loss_log.csv', 'metrics.csv',
                     'metrics.jsonl', 'predictions.csv', 'config.yaml'):
            self.assertTrue((out / name).exists(), msg=name)
        log = pd.read_csv(out / 'loss_log.csv')
        self.assertEqual(list(log.columns), [
            'epoch', 'iteration', 'ce', 'sova', 'esl', 'sfc', 'tova', 'total'
        ])
        self.assertEqual(len(read_metrics(out / 'metrics.jsonl')), 1)

        code, text = self.run_cli('evaluate', '--config', config)
        self.assertEqual(code, 0)
        self.assertIn('HOS', text.upper())
        with open(out / 'metrics.json') as f:
            report = json.load(f)
        for key in ('hos', 'acc_kn', 'acc_unk'):
            self.assertIn(key, report)

    def test_disabled_term_logged_as_zero(self):
        config, out = self.write_config(ablation={'disable_esl': True})
        self.assertEqual(self.run_cli('train', '--config', config)[0], 0)
        log = pd.read_csv(out / 'loss_log.csv')
        self.assertTrue((log['esl'] == 0).all())
        self.assertTrue((log['ce'] > 0).all())

    def test_reproducible(self):
        config, _ = self.write_config()
        runs = {}
        for name, seed in (('a', '5'), ('b', '5'), ('c', '6')):
            out = self.tmp / name
            self.run_cli('train', '--config', config, '--seed', seed,
                         '--out', str(out))
            runs[name] = (out / 'loss_log.csv').read_text()
        self.assertEqual(runs['a'], runs['b'])
        self.assertNotEqual(runs['a'], runs['c'])

    def test_evaluate_without_checkpoint(self):
        config, _ = self.write_config()
        code, _ = self.run_cli('evaluate', '--config', config)
        self.assertEqual(code, 1)


class TestAblateSweep(CLITestCase):

    def test_ablate_table(self):
        config, out = self.write_config()
        code, _ = self.run_cli('ablate', '--config', config)
        self.assertEqual(code, 0)
        table = pd.read_csv(out / 'ablation.csv')
        self.assertEqual(list(table.columns),
                         ['variant', 'hos', 'acc_kn', 'acc_unk'])
        self.assertEqual(len(table), 5)
        self.assertEqual(table['variant'].iloc[0], 'ALL')

    def test_zero_weights_make_variants_identical(self):
        config, out = self.write_config(loss={
            'alpha': 0.0,
            'beta': 0.0,
            'gamma': 0.0
        })
        self.assertEqual(self.run_cli('ablate', '--config', config)[0], 0)
        table = pd.read_csv(out / 'ablation.csv')
        for column in ('hos', 'acc_kn', 'acc_unk'):
            self.assertEqual(table[column].nunique(), 1)

    def test_sweep_single_point(self):
        config, out = self.write_config(sweep={'target_private': [1]})
        self.assertEqual(self.run_cli('sweep-unknowns', '--config',
                                      config)[0], 0)
        table = pd.read_csv(out / 'sweep_unknowns.csv')
        self.assertEqual(len(table), 1)
        self.assertNotIn('hos_source_only', table.columns)

    def test_sweep_counts_and_baseline(self):
        config, out = self.write_config(sweep={
            'target_private': [0, 1, 2],
            'baseline': True
        })
        self.assertEqual(self.run_cli('sweep-unknowns', '--config',
                                      config)[0], 0)
        table = pd.read_csv(out / 'sweep_unknowns.csv')
        self.assertEqual(table['n_target_private'].tolist(), [0, 1, 2])
        self.assertEqual(table['n_shared'].tolist(), [2, 2, 2])
        self.assertIn('hos_source_only', table.columns)
        self.assertTrue((out / 'n2' / 'source_only' / 'seed_2').is_dir())

    def test_sweep_points_share_iteration_budget(self):
        config, out = self.write_config(sweep={'target_private': [1, 3]})
        self.assertEqual(self.run_cli('sweep-unknowns', '--config',
                                      config)[0], 0)
        # Base split 2/1/1 with 4 samples per class: ceil(12 / 6) = 2.
        for n in (1, 3):
            log = pd.read_csv(out / f'n{n}' / 'adapted' / 'seed_2' /
                              'loss_log.csv')
            self.assertEqual(len(log), 2)


class TestExitCodes(CLITestCase):

    def test_invalid_config(self):
        code, _ = self.run_cli('train', '--config',
                               'tests/data/unknown_key.yaml')
        self.assertEqual(code, 1)
        code, _ = self.run_cli('train', '--config',
                               'tests/data/does_not_exist.yaml')
        self.assertEqual(code, 1)

    def test_gradcheck(self):
        code, text = self.run_cli('gradcheck', '--draws', '2')
        self.assertEqual(code, 0)
        losses, composite = text.strip().split('\n\n')
        self.assertEqual([line.split()[0] for line in losses.splitlines()],
                         ['ce', 'sova', 'esl', 'sfc', 'tova'])
        self.assertTrue(composite.startswith('objective total'))
        code, text = self.run_cli('gradcheck', '--draws', '1', '--perturb',
                                  '0.01')
        self.assertEqual(code, 2)
        self.assertIn('FAIL', text)

    def test_gradcheck_rejects_zero_draws(self):
        code, _ = self.run_cli('gradcheck', '--draws', '0')
        self.assertEqual(code, 1)


if __name__ == '__main__':
    unittest.main()
