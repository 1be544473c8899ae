import csv
import json
import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
from django.core.management import CommandError, call_command
from django.test import TestCase
from numpy.testing import assert_allclose

from fitting.dataio import WEIGHTS, load_animation, load_rig
from fitting.models import RunRecord


def run(name, **options):
    call_command(name, stdout=StringIO(), **options)


def read_csv(path):
    with open(path, newline='') as stream:
        return list(csv.DictReader(stream))


class CommandTestCase(TestCase):
    def setUp(self):
        tmp = tempfile.TemporaryDirectory()
        self.addCleanup(tmp.cleanup)
        self.root = Path(tmp.name)

    def generate(self, name='data', **overrides):
        options = dict(character='ada', blendshapes=8, vertices=20, pairs=3, triplets=2, quads=1,
                       frames=4, sparsity=3, seed=1)
        options.update(overrides)
        out = self.root / name
        run('generate', out=str(out), **options)
        return out


class GenerateCommandTests(CommandTestCase):
    def test_writes_data_and_manifest(self):
        out = self.generate()
        manifest = json.loads((out / 'manifest.json').read_text())
        self.assertEqual(manifest['command'], 'generate')
        self.assertEqual(manifest['files'], ['clean.txt', 'noisy.txt', 'rig.txt', 'weights.txt'])
        self.assertEqual(manifest['seeds'], {'rig': 1, 'sequence': 2, 'noise': 3})
        self.assertEqual(load_animation(out / 'weights.txt', kind=WEIGHTS).frame_count, 4)
        self.assertEqual(RunRecord.objects.get().command, 'generate')

    def test_same_seed_same_files(self):
        first, second = self.generate('a'), self.generate('b')
        for name in ('rig.txt', 'weights.txt', 'clean.txt', 'noisy.txt'):
            self.assertEqual((first / name).read_bytes(), (second / name).read_bytes(), name)

    def test_no_corrections(self):
        out = self.generate(no_corrections=True, binary=True)
        self.assertTrue((out / 'rig.npz').exists())

    def test_orthogonal_rig(self):
        out = self.generate(orthogonal=True)
        basis = load_rig(out / 'rig.txt').basis
        gram = basis.T @ basis
        assert_allclose(gram, gram[0, 0] * np.eye(8), atol=1e-10 * gram[0, 0])
        self.assertTrue(json.loads((out / 'manifest.json').read_text())['config']['orthogonal'])

    def test_infeasible_dimensions_are_a_config_error(self):
        with self.assertRaises(CommandError) as ctx:
            self.generate(blendshapes=3, pairs=10)
        self.assertEqual(ctx.exception.returncode, 2)


class FitAndEvalCommandTests(CommandTestCase):
    def setUp(self):
        super().setUp()
        self.data = self.generate()

    def fit(self, name='fit', **options):
        out = self.root / name
        run('fit', out=str(out), rig=str(self.data / 'rig.txt'), frames=str(self.data / 'noisy.txt'),
            omit_timing=True, **options)
        return out

    def evaluate(self, fitted, name='eval', reference='clean.txt'):
        out = self.root / name
        run('eval', out=str(out), rig=str(self.data / 'rig.txt'), weights=str(fitted / 'fitted.txt'),
            reference=str(self.data / reference), reports=str(fitted / 'reports.json'), omit_timing=True)
        return out

    def test_fit_reports(self):
        out = self.fit(passes=3)
        reports = json.loads((out / 'reports.json').read_text())
        self.assertEqual(reports['method'], 'CD_QUARTIC')
        self.assertEqual(len(reports['frames']), 4)
        for frame in reports['frames']:
            trace = frame['objective_trace']
            self.assertEqual(len(trace), 3)
            self.assertEqual(frame['wall_time'], 0.0)
            self.assertTrue(all(b <= a + 1e-10 * (1 + abs(a)) for a, b in zip(trace, trace[1:])))

    def test_seol_updates_each_blendshape_once(self):
        out = self.fit(method='SEOL')
        reports = json.loads((out / 'reports.json').read_text())
        self.assertTrue(all(frame['coordinate_visits'] == 8 for frame in reports['frames']))

    def test_eval_summary(self):
        out = self.evaluate(self.fit())
        summary = json.loads((out / 'summary.json').read_text())
        self.assertEqual((summary['method'], summary['passes'], summary['frame_count']), ('CD_QUARTIC', 1, 4))
        rows = read_csv(out / 'metrics.csv')
        self.assertEqual([row['frame_id'] for row in rows], ['0', '1', '2', '3', 'mean'])
        self.assertEqual(float(rows[-1]['roughness']), summary['roughness'])
        self.assertTrue(all(row['roughness'] == '' for row in rows[:-1]))

    def test_pipeline_is_byte_reproducible(self):
        first = self.evaluate(self.fit('fit-a'), 'eval-a')
        second = self.evaluate(self.fit('fit-b'), 'eval-b')
        self.assertEqual((first / 'metrics.csv').read_bytes(), (second / 'metrics.csv').read_bytes())
        self.assertEqual((first / 'summary.json').read_bytes(), (second / 'summary.json').read_bytes())

    def test_noisy_reference_is_a_data_error(self):
        with self.assertRaises(CommandError) as ctx:
            self.evaluate(self.fit(), reference='noisy.txt')
        self.assertEqual(ctx.exception.returncode, 3)

    def test_rig_mismatch_is_a_data_error(self):
        other = self.generate('other', vertices=10)
        with self.assertRaises(CommandError) as ctx:
            run('fit', out=str(self.root / 'bad'), rig=str(other / 'rig.txt'),
                frames=str(self.data / 'noisy.txt'))
        self.assertEqual(ctx.exception.returncode, 3)

    def test_normalized_correlation(self):
        raw = self.fit('raw', ordering='iteration-correlation', passes=2)
        cosine = self.fit('cosine', ordering='iteration-correlation', passes=2, normalized_correlation=True)
        manifest = json.loads((cosine / 'manifest.json').read_text())
        self.assertTrue(manifest['config']['normalized_correlation'])
        self.assertFalse(json.loads((raw / 'manifest.json').read_text())['config']['normalized_correlation'])
        reports = json.loads((cosine / 'reports.json').read_text())
        self.assertTrue(all(frame['coordinate_visits'] == 16 for frame in reports['frames']))

    def test_seol_with_dynamic_ordering_is_a_config_error(self):
        with self.assertRaises(CommandError) as ctx:
            self.fit(method='SEOL', ordering='gauss-southwell')
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertFalse(RunRecord.objects.filter(command='fit').exists())


class ExperimentCommandTests(CommandTestCase):
    def setUp(self):
        super().setUp()
        self.data = self.generate()
        self.inputs = dict(rig=str(self.data / 'rig.txt'), frames=str(self.data / 'noisy.txt'),
                           reference=str(self.data / 'clean.txt'), omit_timing=True)

    def test_sweep(self):
        out = self.root / 'sweep'
        run('sweep', out=str(out), methods='JOSHI,CETINASLAN', alpha_grid='0,0.5', passes_grid='1', **self.inputs)
        rows = read_csv(out / 'sweep.csv')
        self.assertEqual([row['label'] for row in rows], ['JOSHI-1', 'CETINASLAN-1', 'CETINASLAN-1'])
        self.assertEqual(rows[0]['rmse_mean'], rows[1]['rmse_mean'])

    def test_compare_orderings(self):
        out = self.root / 'orderings'
        run('compare_orderings', out=str(out), orderings='decreasing-magnitude,maximum-improvement',
            **self.inputs)
        rows = read_csv(out / 'orderings.csv')
        self.assertEqual([row['label'] for row in rows], ['decreasing-magnitude', 'maximum-improvement'])

    def test_compare_orderings_with_normalized_correlation(self):
        out = self.root / 'cosine'
        run('compare_orderings', out=str(out), orderings='frame-correlation,iteration-correlation',
            normalized_correlation=True, **self.inputs)
        rows = read_csv(out / 'orderings.csv')
        self.assertEqual([row['label'] for row in rows], ['frame-correlation', 'iteration-correlation'])
        self.assertTrue(json.loads((out / 'manifest.json').read_text())['config']['normalized_correlation'])

    def test_benchmark(self):
        out = self.root / 'benchmark'
        run('benchmark', out=str(out), weights=str(self.data / 'weights.txt'), passes=1, **self.inputs)
        rows = read_csv(out / 'benchmark.csv')
        self.assertEqual(rows[-1]['label'], 'ground-truth')
        self.assertEqual(len(rows), 6)

    def test_noise_study(self):
        out = self.root / 'noise'
        run('noise_study', out=str(out), rig=self.inputs['rig'], reference=self.inputs['reference'],
            frames=2, sigma2_grid='0,0.03', alpha_grid='0.5', passes=1)
        rows = read_csv(out / 'noise_study.csv')
        self.assertEqual(len(rows), 2 * 3 * 2)
        self.assertEqual(RunRecord.objects.filter(command='noise_study').count(), 1)

    def test_unknown_method_in_list(self):
        with self.assertRaises(CommandError) as ctx:
            run('sweep', out=str(self.root / 'bad'), methods='JOSHI,LM', **self.inputs)
        self.assertEqual(ctx.exception.returncode, 2)
